"""Command line interface: scenario runs, demo generation, plotting, and the
live teaching service."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .geometry import catalog_from_json
from .grounding import grounding_catalog_from_json
from .harness import (
    LearningScenario,
    SimContext,
    read_demos_jsonl,
    rows_to_csv,
    run_learning_scenario,
    write_demos_jsonl,
)
from .planner import PlanConfig, workspace_from_json
from .synth import (
    default_grounding_catalog,
    default_object_catalog,
    default_relation_symbols,
    default_workspace,
    generate_synthetic_demos,
    ground_truth_distribution,
)


def _load_scenarios(path: Path, seed: int, ctx: SimContext) -> list[LearningScenario]:
    spec = json.loads(path.read_text(encoding="utf-8"))
    symbols = {s.id: s for s in default_relation_symbols()}
    relations = spec.get("relations", "all")
    if relations == "all":
        relations = list(symbols)
    repetitions = int(spec.get("repetitions", 10))
    task_count = int(spec.get("task_count", 10))
    clutter = int(spec.get("clutter", 3))
    demo_files = spec.get("demos", {})

    scenarios = []
    for rid in relations:
        symbol = symbols[rid]
        if rid in demo_files:
            demos = read_demos_jsonl(path.parent / demo_files[rid], symbols)
        else:
            demos = generate_synthetic_demos(
                symbol,
                ground_truth_distribution(rid),
                ctx.catalog,
                ctx.workspace,
                ctx.config,
                count=task_count,
                clutter=clutter,
                seed=seed,
            )
        scenarios.append(LearningScenario(symbol, demos, repetitions=repetitions, seed=seed))
    return scenarios


def cmd_run(args) -> int:
    ctx = SimContext(default_object_catalog(), default_workspace(), PlanConfig(seed=args.seed))
    scenarios = _load_scenarios(Path(args.scenario), args.seed, ctx)
    rows = []
    for scenario in scenarios:
        if args.mode == "baseline":
            scenario = LearningScenario(
                scenario.relation, scenario.demonstrations, repetitions=1, seed=scenario.seed
            )
        rows.extend(run_learning_scenario(ctx, scenario, args.mode))
        print(f"finished {scenario.relation.id}", file=sys.stderr)
    Path(args.out).write_text(rows_to_csv(rows), encoding="utf-8")
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_gen_demos(args) -> int:
    symbols = {s.id: s for s in default_relation_symbols()}
    if args.relation not in symbols:
        print(f"unknown relation {args.relation!r}; known: {sorted(symbols)}", file=sys.stderr)
        return 2
    demos = generate_synthetic_demos(
        symbols[args.relation],
        ground_truth_distribution(args.relation),
        default_object_catalog(),
        default_workspace(),
        PlanConfig(seed=args.seed),
        count=args.count,
        clutter=args.clutter,
        seed=args.seed,
    )
    write_demos_jsonl(Path(args.out), demos)
    print(f"wrote {len(demos)} demos to {args.out}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    from .harness import rows_from_csv
    from .plotting import plot_metrics

    rows = rows_from_csv(Path(args.infile).read_text(encoding="utf-8"))
    baseline = None
    if args.baseline:
        baseline = rows_from_csv(Path(args.baseline).read_text(encoding="utf-8"))
    plot_metrics(rows, args.out, baseline_rows=baseline)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import Session, create_app

    catalog = (
        catalog_from_json(Path(args.catalog).read_text(encoding="utf-8"))
        if args.catalog
        else default_object_catalog()
    )
    grounding = (
        grounding_catalog_from_json(Path(args.grounding).read_text(encoding="utf-8"))
        if args.grounding
        else default_grounding_catalog()
    )
    workspace = (
        workspace_from_json(Path(args.workspace).read_text(encoding="utf-8"))
        if args.workspace
        else default_workspace()
    )
    if args.scene:
        from .geometry import scene_from_dict

        scene = scene_from_dict(json.loads(Path(args.scene).read_text(encoding="utf-8")))
    else:
        from .synth import demo_scene

        scene = demo_scene()
    session = Session(catalog, grounding, workspace, scene, PlanConfig(seed=args.seed))
    app = create_app(session)
    uvicorn.run(app, host=args.addr, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="relspace")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run learning scenarios and write metrics CSV")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--mode", choices=["learned", "baseline"], default="learned")
    p.add_argument("--out", required=True, help="output metrics CSV path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen-demos", help="generate synthetic demonstrations")
    p.add_argument("--relation", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--clutter", type=int, default=3)
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_demos)

    p = sub.add_parser("plot", help="plot success-ratio curves from metrics CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--baseline", help="optional baseline metrics CSV")
    p.add_argument("--out", required=True, help="output SVG/PNG path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("serve", help="start the interactive teaching service")
    p.add_argument("--addr", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--catalog", help="objects.json file")
    p.add_argument("--grounding", help="grounding catalog.json file")
    p.add_argument("--workspace", help="workspace.json file")
    p.add_argument("--scene", help="initial scene JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
