#!/usr/bin/env python3
"""Regenerate the published JSON schemas (wire protocol + scenario format)."""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from swarmshape.protocol import protocol_schema
from swarmshape.scenario import scenario_json_schema

ROOT = Path(__file__).resolve().parents[1]


def main():
    (ROOT / "protocol.schema.json").write_text(
        json.dumps(protocol_schema(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (ROOT / "scenario.schema.json").write_text(
        json.dumps(scenario_json_schema(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print("wrote protocol.schema.json and scenario.schema.json")


if __name__ == "__main__":
    main()
