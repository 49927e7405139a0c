#!/usr/bin/env python3
"""Run every bundled scenario headlessly; write metrics and renders to out/."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from swarmshape.cli import main

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    out = ROOT / "out" / "scenarios"
    failures = 0
    for scenario in sorted((ROOT / "scenarios").glob("*.json")):
        rc = main(
            [
                "--scenario", str(scenario),
                "--metrics", str(out / f"{scenario.stem}.metrics.json"),
                "--log", str(out / f"{scenario.stem}.log"),
                "--render", str(out / f"{scenario.stem}.svg"),
            ]
        )
        failures += rc != 0
    sys.exit(1 if failures else 0)
