"""Bound-verification campaigns and strategy sweeps.

Every trial draws its randomness from ``SeedSequence([seed, trial])`` so
serial and parallel schedules produce identical reports.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .filters import PolynomialFilter, filter_distance, prop1_bound
from .generators import barabasi_albert, erdos_renyi
from .graph import Graph, GraphError, read_edge_list
from .models import (
    GcnModel,
    SgcnModel,
    check_features,
    corollary_bound,
    gaussian_weights,
    gcn_forward,
    prop2_bound,
    prop3_bound,
    random_features,
    sgcn_logits,
    weight_norms,
)
from .perturbation import (
    Rewiring,
    apply_plan,
    error_matrix,
    norm_max,
    norm_one,
    norm_two,
    rewiring_bound,
    row_norm_closed_form,
    row_norms,
    summarize_plan,
)
from .shift import NORM_TOL, build_shift
from .strategies import STRATEGIES, select_rewirings, top_quartile

log = logging.getLogger(__name__)

GRAPH_MODELS = ("er", "ba", "file")
MODELS = ("sgcn", "gcn")
# absolute slack on every "bound >= measured" comparison
BOUND_SLACK = 1e-9
ROW_NORM_TOL = 1e-12
SLACK_FLOOR = 1e-12
MAX_GRAPH_RESAMPLES = 1000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    graph_model: str = "er"
    n: int = 32
    p: float = 0.2
    ba_m: int = 2
    graph_path: str | None = None
    gamma: float = 1.0
    num_rewirings: int = 5
    strategy: str = "random"
    node: int | None = None
    filter: str | None = None  # None: fresh Gaussian coefficients per trial
    filter_order: int = 3
    model: str | None = None
    layers: int = 2
    power: int = 2
    features: int = 4
    classes: int | None = None
    weights_paths: tuple[str, ...] = ()
    features_path: str | None = None
    trials: int = 100
    tol: float = NORM_TOL

    def __post_init__(self):
        if self.graph_model not in GRAPH_MODELS:
            raise ConfigError(f"graph model must be one of {GRAPH_MODELS}, got {self.graph_model!r}")
        if self.graph_model == "file" and not self.graph_path:
            raise ConfigError("graph model 'file' needs a graph path")
        if self.graph_model != "file" and self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if self.graph_model == "er" and not 0.0 < self.p <= 1.0:
            raise ConfigError(f"p must lie in (0, 1], got {self.p}")
        if self.graph_model == "ba" and not 1 <= self.ba_m < self.n:
            raise ConfigError(f"Barabasi-Albert needs 1 <= m < n, got m={self.ba_m}, n={self.n}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be nonnegative, got {self.gamma}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.model is not None and self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        for name in ("trials", "layers", "power", "features"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_rewirings < 0 or self.filter_order < 0:
            raise ConfigError("num_rewirings and filter_order must be nonnegative")
        if self.classes is not None and self.classes < 1:
            raise ConfigError(f"classes must be positive, got {self.classes}")
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.filter is not None:
            PolynomialFilter.parse(self.filter)


def trial_streams(seed: int, trial: int, count: int = 4) -> list[np.random.Generator]:
    """Independent generators for graph, plan, filter and model of one trial."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence([seed, trial]).spawn(count)]


def generate_graph(
    config: ExperimentConfig, rng: np.random.Generator, min_gamma: float | None = None
) -> Graph:
    """Seeded graph for one trial.

    Random models are redrawn while the graph has an isolated node and the
    smallest gamma in use is 0.
    """
    min_gamma = config.gamma if min_gamma is None else min_gamma
    if config.graph_model == "file":
        g = read_edge_list(config.graph_path)
        if min_gamma == 0 and g.isolated_nodes():
            raise ConfigError(
                f"graph file has isolated node {g.isolated_nodes()[0]}; use gamma > 0"
            )
        return g
    for _ in range(MAX_GRAPH_RESAMPLES):
        if config.graph_model == "er":
            g = erdos_renyi(config.n, config.p, rng)
        else:
            g = barabasi_albert(config.n, config.ba_m, rng)
        if min_gamma > 0 or not g.isolated_nodes():
            return g
    raise GraphError(
        f"no graph without isolated nodes after {MAX_GRAPH_RESAMPLES} draws "
        f"(n={config.n}, p={config.p}); use gamma > 0 or a denser model"
    )


def build_filter(config: ExperimentConfig, rng: np.random.Generator) -> PolynomialFilter:
    if config.filter is not None:
        return PolynomialFilter.parse(config.filter)
    return PolynomialFilter(tuple(rng.standard_normal(config.filter_order + 1)))


def read_matrix(path: str | Path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))


def build_model(config: ExperimentConfig, rng: np.random.Generator) -> SgcnModel | GcnModel | None:
    if config.model and config.weights_paths:
        layers = [read_matrix(p) for p in config.weights_paths]
        if config.model == "sgcn":
            if len(layers) != 1:
                raise ConfigError("an SGCN takes exactly one weight matrix")
            return SgcnModel(config.power, layers[0])
        return GcnModel(tuple(layers))
    d = config.features
    c = config.classes or d
    if config.model == "sgcn":
        return SgcnModel(config.power, gaussian_weights((d, c), rng))
    if config.model == "gcn":
        shapes = [(d, d)] * (config.layers - 1) + [(d, c)]
        return GcnModel(tuple(gaussian_weights(sh, rng) for sh in shapes))
    return None


def build_features(config: ExperimentConfig, g: Graph, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm feature columns, read from file or drawn from ``rng``."""
    if config.features_path:
        return check_features(read_matrix(config.features_path))
    return random_features(g.num_nodes, config.features, rng)


def _slack(bound: float, actual: float) -> float:
    return math.inf if actual < SLACK_FLOOR else bound / actual


def evaluate_instance(
    g: Graph,
    rewirings: Sequence[Rewiring],
    gamma: float,
    filt: PolynomialFilter | None = None,
    model: SgcnModel | GcnModel | None = None,
    features: np.ndarray | None = None,
    tol: float = NORM_TOL,
) -> tuple[dict, list[str]]:
    """All norms, bounds and measured distances for one (graph, plan) pair.

    Returns the metric dictionary and a list of violated checks.
    """
    gp = apply_plan(g, rewirings)
    summary = summarize_plan(g, rewirings)
    s, sp = build_shift(g, gamma), build_shift(gp, gamma)
    e = error_matrix(s, sp)
    m: dict = {
        "num_nodes": g.num_nodes,
        "num_edges": g.num_edges,
        "gamma": float(gamma),
        "rewirings": len(rewirings),
        "e_max": norm_max(e),
        "e_two": norm_two(e, tol=tol),
        "e_two_oracle": float(np.max(np.abs(np.linalg.eigvalsh(e.matrix)), initial=0.0)),
        "e_one": norm_one(e),
    }
    violations = []
    if not summary.degree_preserving:
        violations.append("degree_sequence_changed")
    m["rewiring_bound"] = rewiring_bound(g, summary, gamma)
    direct = row_norms(e)
    closed = np.array([row_norm_closed_form(g, summary, gamma, u) for u in range(g.num_nodes)])
    m["row_norm_max_error"] = float(np.max(np.abs(closed - direct), initial=0.0))
    touched = sorted({w for r in rewirings for w in r.nodes})
    m["mean_touched_degree"] = float(np.mean(g.degrees()[touched])) if touched else math.nan

    if m["e_max"] > m["e_two"] + BOUND_SLACK:
        violations.append("e_max>e_two")
    if m["e_two"] > m["e_one"] + BOUND_SLACK:
        violations.append("e_two>e_one")
    if m["e_one"] > m["rewiring_bound"] + BOUND_SLACK:
        violations.append("e_one>rewiring_bound")
    if m["row_norm_max_error"] > ROW_NORM_TOL:
        violations.append("closed_form_row_norm")

    if filt is not None:
        m["filter_order"] = filt.order
        m["filter_distance"] = filter_distance(filt, s, sp, tol=tol)
        m["prop1_bound"] = prop1_bound(filt, m["e_two"])
        if m["filter_distance"] > m["prop1_bound"] + BOUND_SLACK:
            violations.append("filter_distance>prop1_bound")

    if model is not None:
        if features is None:
            raise ConfigError("a model needs a feature matrix")
        features = check_features(features)
        d = features.shape[1]
        s1 = s if gamma == 1.0 else build_shift(g, 1.0)
        sp1 = sp if gamma == 1.0 else build_shift(gp, 1.0)
        e_two_1 = m["e_two"] if gamma == 1.0 else norm_two(error_matrix(s1, sp1), tol=tol)
        norms = weight_norms(model, tol=tol)
        if isinstance(model, SgcnModel):
            out, out_p = sgcn_logits(model, s1, features), sgcn_logits(model, sp1, features)
            depth = model.power
            m["model_bound"] = prop2_bound(d, depth, e_two_1, norms[0])
        else:
            out, out_p = gcn_forward(model, s1, features), gcn_forward(model, sp1, features)
            depth = model.depth
            m["model_bound"] = prop3_bound(d, depth, e_two_1, norms)
        m["e_two_gamma1"] = e_two_1
        m["model_distance"] = float(np.linalg.norm(out - out_p))
        m["corollary_bound"] = corollary_bound(g, summary, d, depth, norms)
        if m["model_distance"] > m["model_bound"] + BOUND_SLACK:
            violations.append("model_distance>model_bound")
        if m["model_bound"] > m["corollary_bound"] + BOUND_SLACK:
            violations.append("model_bound>corollary_bound")

    m["slack_rewiring"] = _slack(m["rewiring_bound"], m["e_two"])
    if "prop1_bound" in m:
        m["slack_prop1"] = _slack(m["prop1_bound"], m["filter_distance"])
    if "model_bound" in m:
        m["slack_model"] = _slack(m["model_bound"], m["model_distance"])
        m["slack_corollary"] = _slack(m["corollary_bound"], m["model_distance"])
    return m, violations


@dataclass
class TrialReport:
    trial: int
    strategy: str
    shortfall: int
    metrics: dict
    violations: list[str]
    wall_time: float
    graph: Graph = field(repr=False)
    plan: tuple[Rewiring, ...] = field(repr=False)

    @property
    def ok(self) -> bool:
        return not self.violations


def _default_node(g: Graph, config: ExperimentConfig) -> int | None:
    if config.strategy != "localized" or config.node is not None:
        return config.node
    return top_quartile(g)[0]


def run_trial(config: ExperimentConfig, trial: int) -> TrialReport:
    start = time.perf_counter()
    graph_rng, plan_rng, filter_rng, model_rng = trial_streams(config.seed, trial)
    g = generate_graph(config, graph_rng)
    plan = select_rewirings(
        g, config.strategy, config.num_rewirings, plan_rng, node=_default_node(g, config)
    )
    filt = build_filter(config, filter_rng)
    model = build_model(config, model_rng)
    features = build_features(config, g, model_rng) if model else None
    metrics, violations = evaluate_instance(
        g, plan.rewirings, config.gamma, filt, model, features, tol=config.tol
    )
    return TrialReport(
        trial=trial,
        strategy=config.strategy,
        shortfall=plan.shortfall,
        metrics=metrics,
        violations=violations,
        wall_time=time.perf_counter() - start,
        graph=g,
        plan=plan.rewirings,
    )


def _run_one(args):
    return run_trial(*args)


def run_verification(config: ExperimentConfig, jobs: int = 1) -> list[TrialReport]:
    tasks = [(config, t) for t in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        reports = [_run_one(t) for t in tasks]
    bad = [r.trial for r in reports if r.violations]
    if bad:
        log.warning("bound violations in trials %s", bad)
    return reports


# CSV output. Column order is part of the output contract.

TRIAL_COLUMNS = (
    "trial", "strategy", "num_nodes", "num_edges", "gamma", "rewirings", "shortfall",
    "e_max", "e_two", "e_two_oracle", "e_one", "rewiring_bound", "row_norm_max_error",
    "mean_touched_degree", "filter_order", "filter_distance", "prop1_bound",
    "model", "e_two_gamma1", "model_distance", "model_bound", "corollary_bound",
    "slack_rewiring", "slack_prop1", "slack_model", "slack_corollary", "violations",
)

EXPERIMENT_COLUMNS = ("trial", "strategy", "gamma", "metric", "value")
EXPERIMENT_METRICS = (
    "rewirings", "shortfall", "mean_touched_degree", "e_max", "e_two", "e_one",
    "rewiring_bound", "filter_distance", "prop1_bound",
    "model_distance", "model_bound", "corollary_bound",
)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(v)


def trial_rows(reports: Sequence[TrialReport], model: str | None = None) -> list[list[str]]:
    rows = []
    for r in reports:
        values = dict(r.metrics)
        values.update(
            trial=r.trial,
            strategy=r.strategy,
            shortfall=r.shortfall,
            model=model or "",
            violations=";".join(r.violations),
        )
        rows.append([format_value(values.get(c)) for c in TRIAL_COLUMNS])
    return rows


def write_csv(path: str | Path | None, header: Sequence[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def summarize_reports(config: ExperimentConfig, reports: Sequence[TrialReport]) -> dict:
    def stats(key):
        vals = np.array([r.metrics[key] for r in reports if key in r.metrics], dtype=float)
        vals = vals[np.isfinite(vals)]
        if not vals.size:
            return None
        return {"min": float(vals.min()), "median": float(np.median(vals)), "max": float(vals.max())}

    return {
        "config": asdict(config),
        "trials": len(reports),
        "violations": sum(1 for r in reports if r.violations),
        "violating_trials": [r.trial for r in reports if r.violations],
        "shortfall_trials": [r.trial for r in reports if r.shortfall],
        "slack": {k: stats(k) for k in ("slack_rewiring", "slack_prop1", "slack_model", "slack_corollary")},
        "wall_time_s": float(sum(r.wall_time for r in reports)),
    }


def write_summary(path: str | Path, summary: dict) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def run_experiment(
    config: ExperimentConfig,
    strategies: Sequence[str],
    gammas: Sequence[float],
) -> tuple[list[list[str]], list[tuple[int, str, float, list[str]]]]:
    """Strategy x gamma sweep on matched graphs and plan seeds.

    For each trial one graph is drawn; every strategy then selects its plan
    from the same plan seed and the plan is evaluated at every gamma.
    Returns long-format rows and a list of ``(trial, strategy, gamma, violations)``.
    """
    rows: list[list[str]] = []
    failures = []
    min_gamma = min(gammas)
    for t in range(config.trials):
        graph_rng, _, filter_rng, model_rng = trial_streams(config.seed, t)
        g = generate_graph(config, graph_rng, min_gamma=min_gamma)
        filt = build_filter(config, filter_rng)
        model = build_model(config, model_rng)
        features = build_features(config, g, model_rng) if model else None
        for strategy in strategies:
            plan_rng = trial_streams(config.seed, t)[1]
            node = config.node
            if strategy == "localized" and node is None:
                node = top_quartile(g)[0]
            plan = select_rewirings(g, strategy, config.num_rewirings, plan_rng, node=node)
            for gamma in gammas:
                m, violations = evaluate_instance(
                    g, plan.rewirings, gamma, filt, model, features, tol=config.tol
                )
                m["shortfall"] = plan.shortfall
                for metric in EXPERIMENT_METRICS:
                    if metric in m:
                        rows.append([str(t), strategy, format_value(float(gamma)), metric, format_value(m[metric])])
                if violations:
                    failures.append((t, strategy, float(gamma), violations))
    return rows, failures
