#!/usr/bin/env python3
"""Line-vs-point rendering comparison over the built-in contour corpus.

Runs every corpus shape at 30/40/50/60 robots in both rendering modes,
writes the report and final-frame renders under out/compare/.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from swarmshape.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parents[1] / "out" / "compare"
    sys.exit(
        main(
            [
                "--compare",
                "--corpus", "all",
                "--robots", "30,40,50,60",
                "--seed", "7",
                "--metrics", str(out / "report.json"),
                "--render", str(out),
            ]
        )
    )
