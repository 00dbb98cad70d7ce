"""Command line entry point: ``rewire-stability {analyze,rewire,verify,experiment}``.

Exit status is 0 only when no bound was violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .filters import PolynomialFilter
from .graph import format_edge_list, read_edge_list
from .harness import (
    EXPERIMENT_COLUMNS,
    TRIAL_COLUMNS,
    ExperimentConfig,
    build_features,
    build_model,
    evaluate_instance,
    generate_graph,
    run_experiment,
    run_verification,
    summarize_reports,
    trial_rows,
    trial_streams,
    write_csv,
    write_summary,
)
from .perturbation import format_plan, read_plan
from .shift import NORM_TOL
from .strategies import STRATEGIES, select_rewirings, top_quartile

log = logging.getLogger("rewire_stability")


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="edge-list file; overrides the random graph model")
    p.add_argument("--graph-model", choices=("er", "ba"), default="er")
    p.add_argument("--n", type=int, default=32, help="number of nodes (default: 32)")
    p.add_argument("--p", type=float, default=0.2, help="Erdos-Renyi edge probability")
    p.add_argument("--ba-m", type=int, default=None,
                   help="edges per arriving node; selects the Barabasi-Albert model")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gamma", type=float, default=1.0, help="augmentation (default: 1)")
    p.add_argument("--rewirings", type=int, default=5)
    p.add_argument("--strategy", choices=STRATEGIES, default="random")
    p.add_argument("--node", type=int, default=None, help="anchor node for --strategy localized")
    p.add_argument("--tol", type=float, default=NORM_TOL, help="power-iteration tolerance")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--filter", default=None,
                   help="filter coefficients 'theta0,...,thetaK' (default: Gaussian per trial)")
    p.add_argument("--filter-order", type=int, default=3)
    p.add_argument("--model", choices=("sgcn", "gcn"), default=None)
    p.add_argument("--layers", type=int, default=2, help="GCN depth")
    p.add_argument("--power", type=int, default=2, help="SGCN propagation power K")
    p.add_argument("--features", type=int, default=4, help="feature dimension d")
    p.add_argument("--classes", type=int, default=None, help="output width (default: d)")
    p.add_argument("--weights", nargs="+", default=(), metavar="CSV",
                   help="weight matrices, one CSV per layer")
    p.add_argument("--features-csv", default=None, help="feature matrix CSV (unit-norm columns)")


def _config(args, **overrides) -> ExperimentConfig:
    if args.graph:
        graph_model = "file"
    elif args.ba_m is not None:
        graph_model = "ba"
    else:
        graph_model = args.graph_model
    values = dict(
        seed=args.seed,
        graph_model=graph_model,
        n=args.n,
        p=args.p,
        ba_m=args.ba_m if args.ba_m is not None else 2,
        graph_path=args.graph,
        gamma=args.gamma,
        num_rewirings=args.rewirings,
        strategy=args.strategy,
        node=args.node,
        tol=args.tol,
    )
    if hasattr(args, "model"):
        values.update(
            filter=args.filter,
            filter_order=args.filter_order,
            model=args.model,
            layers=args.layers,
            power=args.power,
            features=args.features,
            classes=args.classes,
            weights_paths=tuple(args.weights),
            features_path=args.features_csv,
        )
    if hasattr(args, "trials"):
        values["trials"] = args.trials
    values.update(overrides)
    return ExperimentConfig(**values)


def _json_ready(metrics: dict) -> dict:
    out = {}
    for k, v in metrics.items():
        if isinstance(v, (float, np.floating)) and not np.isfinite(v):
            out[k] = str(v)
        elif isinstance(v, np.integer):
            out[k] = int(v)
        else:
            out[k] = v
    return out


def cmd_analyze(args) -> int:
    config = _config(args, graph_model="file", trials=1)
    g = read_edge_list(args.graph)
    plan = read_plan(args.plan) if args.plan else []
    filt = PolynomialFilter.parse(args.filter) if args.filter else None
    _, _, _, model_rng = trial_streams(args.seed, 0)
    model = build_model(config, model_rng)
    features = build_features(config, g, model_rng) if model else None
    metrics, violations = evaluate_instance(
        g, plan, args.gamma, filt, model, features, tol=args.tol
    )
    report = {"metrics": _json_ready(metrics), "violations": violations}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 1 if violations else 0


def cmd_rewire(args) -> int:
    config = _config(args, trials=1)
    graph_rng, plan_rng, _, _ = trial_streams(config.seed, 0)
    g = generate_graph(config, graph_rng)
    node = args.node
    if args.strategy == "localized" and node is None:
        node = top_quartile(g)[0]
    plan = select_rewirings(g, args.strategy, args.rewirings, plan_rng, node=node)
    if plan.shortfall:
        log.warning("only %d of %d rewirings found", len(plan), plan.requested)
    text = format_plan(plan)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.graph_out:
        Path(args.graph_out).write_text(format_edge_list(g))
    return 0


def cmd_verify(args) -> int:
    config = _config(args)
    reports = run_verification(config, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "trials.csv", TRIAL_COLUMNS, trial_rows(reports, config.model))
    summary = summarize_reports(config, reports)
    write_summary(out / "summary.json", summary)
    bad = [r for r in reports if r.violations]
    for r in bad:
        stem = out / f"violation_trial{r.trial}"
        Path(f"{stem}.edges").write_text(format_edge_list(r.graph))
        Path(f"{stem}.plan").write_text(format_plan(r.plan))
        log.error("trial %d violates %s; replay files at %s.*", r.trial, ",".join(r.violations), stem)
    print(f"{len(reports)} trials, {len(bad)} with violations -> {out}")
    return 1 if bad else 0


def cmd_experiment(args) -> int:
    config = _config(args)
    strategies = args.strategies.split(",")
    for s in strategies:
        if s not in STRATEGIES:
            raise SystemExit(f"unknown strategy {s!r}; choose from {STRATEGIES}")
    gammas = _float_list(args.gammas)
    rows, failures = run_experiment(config, strategies, gammas)
    text = write_csv(args.out, EXPERIMENT_COLUMNS, rows)
    if not args.out:
        sys.stdout.write(text)
    for t, strategy, gamma, violations in failures:
        log.error("trial %d, %s, gamma=%g violates %s", t, strategy, gamma, ",".join(violations))
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewire-stability",
        description="Stability bounds of graph filters and GCNs under double edge rewiring.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="norms and bounds for a given graph and plan")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--plan", help="rewiring plan file ('u v u2 v2' per line)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    _add_common_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=cmd_analyze, n=0, p=0.2, ba_m=None, graph_model="er")

    p = sub.add_parser("rewire", help="sample a rewiring plan")
    _add_graph_flags(p)
    _add_common_flags(p)
    p.add_argument("--out", help="plan file (default: stdout)")
    p.add_argument("--graph-out", help="also write the sampled graph as an edge list")
    p.set_defaults(func=cmd_rewire)

    p = sub.add_parser("verify", help="bound-verification campaign -> CSV + JSON")
    _add_graph_flags(p)
    _add_common_flags(p)
    _add_model_flags(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="verify-out", help="output directory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="strategy/gamma sweep -> long-format CSV")
    _add_graph_flags(p)
    _add_common_flags(p)
    _add_model_flags(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--strategies", default="random,high-degree,low-degree")
    p.add_argument("--gammas", default="0,1,4")
    p.add_argument("--out", help="CSV file (default: stdout)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
