"""Headless runner and experiment harness.

One entry point: run a scenario file (or synthesise one from an SVG),
write metrics / trajectory logs / rendered frames, sweep the line-vs-point
rendering comparison, or serve the interactive session.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from pathlib import Path

from .corpus import CORPUS, corpus_svg
from .engine import ScenarioError, Simulation
from .motion import BehaviorPhase
from .render import render_frame
from .scenario import build_simulation, load_scenario

DEFAULT_PORT = int(os.environ.get("SWARMSHAPE_PORT", "8000"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="swarmshape",
        description="Deterministic swarm-robot shape simulator: headless runs, "
        "rendering comparisons, and a live server.",
    )
    p.add_argument("--scenario", type=Path, help="scenario JSON file to run or serve")
    p.add_argument("--svg", type=Path, help="SVG contour file (synthesises a scenario)")
    p.add_argument(
        "--corpus",
        help=f"built-in contour name ({', '.join(CORPUS)} or 'all' with --compare)",
    )
    p.add_argument(
        "--robots",
        default="30",
        help="robot count, or comma-separated counts for --compare (default 30)",
    )
    p.add_argument("--mode", choices=("line", "point"), help="rendering mode")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--metrics", type=Path, help="write metrics/report JSON here")
    p.add_argument("--log", type=Path, help="write the trajectory log here")
    p.add_argument(
        "--render", type=Path, help="write final-frame SVG here (a directory for --compare)"
    )
    p.add_argument(
        "--compare",
        action="store_true",
        help="run the line-vs-point comparison over the robot-count grid",
    )
    p.add_argument("--serve", action="store_true", help="serve the scenario interactively")
    p.add_argument("--port", type=int, default=DEFAULT_PORT, help="server port")
    p.add_argument("--max-time", type=float, help="simulated-time budget override (s)")
    return p


def _svg_scenario(source_name: str, svg_text: str, n: int, mode: str, seed: int, max_time: float | None) -> dict:
    return {
        "name": f"{source_name}-{mode}-{n}",
        "seed": seed,
        "robots": {"count": n, "layout": "spread"},
        "mode": mode,
        "shape": {"kind": "svg", "text": svg_text, "fit": False},
        "max_time": max_time if max_time is not None else 120.0,
    }


def _read_svg_sources(args) -> list[tuple[str, str]]:
    if args.corpus:
        if args.corpus == "all":
            return [(name, corpus_svg(name)) for name in CORPUS]
        return [(args.corpus, corpus_svg(args.corpus))]
    if args.svg:
        if not args.svg.exists():
            raise FileNotFoundError(f"SVG file not found: {args.svg}")
        return [(args.svg.stem, args.svg.read_text(encoding="utf-8"))]
    raise ScenarioError("--compare needs --svg or --corpus")


def _write_metrics(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _run_one(sim: Simulation) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sim.run()
    metrics = sim.metrics().to_dict()
    metrics["holding"] = sum(1 for r in sim.robots if r.phase == BehaviorPhase.HOLDING)
    metrics["robots"] = len(sim.robots)
    return metrics


def cmd_run(args) -> int:
    if args.scenario is not None:
        if not args.scenario.exists():
            print(f"scenario file not found: {args.scenario}", file=sys.stderr)
            return 2
        doc = load_scenario(args.scenario)
        base_dir = args.scenario.parent
    elif args.svg is not None or args.corpus:
        (name, text), = _read_svg_sources(args)
        n = int(args.robots.split(",")[0])
        doc = _svg_scenario(name, text, n, args.mode or "line", args.seed or 0, args.max_time)
        base_dir = None
    else:
        print("nothing to run: pass --scenario or --svg/--corpus", file=sys.stderr)
        return 2

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.max_time is not None:
        overrides["max_sim_time"] = args.max_time
    sim = build_simulation(doc, overrides=overrides, collect_log=args.log is not None, base_dir=base_dir)
    metrics = _run_one(sim)
    if args.metrics:
        _write_metrics(args.metrics, metrics)
    if args.log:
        args.log.parent.mkdir(parents=True, exist_ok=True)
        args.log.write_text(sim.trajectory_log(), encoding="utf-8")
    if args.render:
        render_frame(sim.snapshot(), args.render, reference=sim.reference, world=(sim.params.world_width, sim.params.world_height))
    name = doc["name"] if isinstance(doc, dict) else doc.name
    print(
        f"{name}: completed={metrics['completed']} makespan={metrics['makespan_s']} "
        f"coverage={metrics['coverage_error_mm']} min_sep={metrics['min_separation_mm']}"
    )
    return 0 if metrics["completed"] else 1


def cmd_compare(args) -> int:
    sources = _read_svg_sources(args)
    counts = [int(v) for v in args.robots.split(",") if v.strip()]
    modes = [args.mode] if args.mode else ["line", "point"]
    seed = args.seed if args.seed is not None else 7
    render_dir = args.render
    cases = []
    started = time.time()
    for name, text in sources:
        for n in counts:
            row = {"shape": name, "robots": n}
            for mode in modes:
                doc = _svg_scenario(name, text, n, mode, seed, args.max_time)
                sim = build_simulation(doc)
                metrics = _run_one(sim)
                row[mode] = {
                    "coverage_error_mm": metrics["coverage_error_mm"],
                    "makespan_s": metrics["makespan_s"],
                    "completed": metrics["completed"],
                    "holding": metrics["holding"],
                }
                if render_dir is not None:
                    render_frame(
                        sim.snapshot(),
                        Path(render_dir) / f"{name}_{mode}_{n}.svg",
                        reference=sim.reference,
                        world=(sim.params.world_width, sim.params.world_height),
                    )
            cases.append(row)
    report = {
        "seed": seed,
        "counts": counts,
        "modes": modes,
        "cases": cases,
        "wall_time_s": round(time.time() - started, 2),
    }
    if "line" in modes and "point" in modes:
        report["line_never_worse"] = all(
            c["line"]["coverage_error_mm"] <= c["point"]["coverage_error_mm"] for c in cases
        )
    if args.metrics:
        _write_metrics(args.metrics, report)
    header = f"{'shape':<14}{'n':>4}" + "".join(f"{m + ' cov (mm)':>16}" for m in modes)
    print(header)
    for c in cases:
        line = f"{c['shape']:<14}{c['robots']:>4}"
        for m in modes:
            cov = c[m]["coverage_error_mm"]
            line += f"{cov:>16.2f}" if cov is not None else f"{'-':>16}"
        print(line)
    if "line_never_worse" in report:
        print(f"line mode never worse: {report['line_never_worse']}")
    return 0 if report.get("line_never_worse", True) else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    sim = None
    if args.scenario is not None:
        if not args.scenario.exists():
            print(f"scenario file not found: {args.scenario}", file=sys.stderr)
            return 2
        overrides = {"seed": args.seed} if args.seed is not None else None
        sim = build_simulation(args.scenario, overrides=overrides)
    app = create_app(sim)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.serve:
            return cmd_serve(args)
        if args.compare:
            return cmd_compare(args)
        return cmd_run(args)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ScenarioError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
