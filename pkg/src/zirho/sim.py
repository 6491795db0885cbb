"""Deterministic Monte Carlo harness for the estimator and the estimated bounds.

Replication r of scenario i draws from the Philox stream keyed by
(seed, i, r), so replications can run in any order or on any number of
threads and still produce the same numbers. Aggregates are summed in
replication order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bounds import RECIPES, bounds_closed_form, bounds_oracle, empirical_bounds
from .copulas import CopulaSpec, joint_pmf, sample_pairs
from .estimator import estimate_rho_A
from .exact import spearman_exact
from .margins import DEFAULT_EPS, PoissonSpec, zip_margin

TABLE1_GRID = [
    (lf, lg, p, a)
    for lf, lg in ((2.0, 2.0), (2.0, 8.0), (8.0, 8.0))
    for p in (0.2, 0.8)
    for a in (0.2, 0.5, 0.8)
]
TABLE3_GRID = [
    (lf, lg, p)
    for lf, lg in ((2.0, 2.0), (2.0, 8.0), (8.0, 8.0))
    for p in (0.2, 0.8)
]
# the recipe whose means are reported as "estimated" bounds
REPORTED_RECIPE = "parametric"


@dataclass(frozen=True)
class ScenarioConfig:
    lambda_f: float
    lambda_g: float
    p1: float
    p2: float
    alpha: float
    n: int = 150
    reps: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        for name in ("p1", "p2", "alpha"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        PoissonSpec(self.lambda_f)
        PoissonSpec(self.lambda_g)

    def margins(self, eps: float = DEFAULT_EPS):
        return zip_margin(self.lambda_f, self.p1, eps), zip_margin(self.lambda_g, self.p2, eps)


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    scenario_id: int
    true_rho: float
    est_mean: float
    mse_times_100: float
    per_rep_estimates: np.ndarray
    bounds_true: tuple[float, float]
    bounds_true_closed: tuple[float, float]
    bounds_est_mean: dict[str, tuple[float, float]]
    per_rep_bounds: dict[str, np.ndarray] = field(repr=False, default_factory=dict)
    degenerate_counts: dict[str, int] = field(default_factory=dict)

    @property
    def bounds_est(self) -> tuple[float, float]:
        return self.bounds_est_mean[REPORTED_RECIPE]


def _ordered_mean(values) -> float:
    # fixed left-to-right summation so the result is independent of chunking
    return math.fsum(values) / len(values)


def _one_rep(F, G, cfg: ScenarioConfig, scenario_id: int, rep: int, recipes):
    s = sample_pairs(F, G, cfg.alpha, cfg.n, cfg.seed, stream=(scenario_id, rep))
    est = estimate_rho_A(s)
    bnds = {}
    for recipe in recipes:
        kw = {}
        if recipe == "parametric":
            kw = {"base_x": PoissonSpec(cfg.lambda_f), "base_y": PoissonSpec(cfg.lambda_g)}
        b = empirical_bounds(s, recipe=recipe, **kw)
        bnds[recipe] = (b.rho_min, b.rho_max)
    return est.rho_a, est.degenerate_flags, bnds


def run_scenario(cfg: ScenarioConfig, scenario_id: int = 0, workers: int = 1,
                 recipes=RECIPES, eps: float = DEFAULT_EPS) -> ScenarioResult:
    """Run ``cfg.reps`` replications and aggregate estimator and bound statistics."""
    F, G = cfg.margins(eps)
    true_rho = spearman_exact(joint_pmf(F, G, CopulaSpec.frechet(cfg.alpha)))
    oracle = bounds_oracle(F, G)
    closed = bounds_closed_form(F, G)

    def task(rep):
        return _one_rep(F, G, cfg, scenario_id, rep, recipes)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(task, range(cfg.reps)))
    else:
        out = [task(r) for r in range(cfg.reps)]

    est = np.array([o[0] for o in out])
    degenerate: dict[str, int] = {}
    for _, flags, _ in out:
        if flags:
            degenerate["any"] = degenerate.get("any", 0) + 1
        for f in flags:
            degenerate[f] = degenerate.get(f, 0) + 1
    per_rep_bounds = {r: np.array([o[2][r] for o in out]) for r in recipes}
    bounds_mean = {
        r: (_ordered_mean(b[:, 0]), _ordered_mean(b[:, 1])) for r, b in per_rep_bounds.items()
    }
    return ScenarioResult(
        config=cfg,
        scenario_id=scenario_id,
        true_rho=true_rho,
        est_mean=_ordered_mean(est),
        mse_times_100=100.0 * _ordered_mean((est - true_rho) ** 2),
        per_rep_estimates=est,
        bounds_true=(oracle.rho_min, oracle.rho_max),
        bounds_true_closed=(closed.rho_min, closed.rho_max),
        bounds_est_mean=bounds_mean,
        per_rep_bounds=per_rep_bounds,
        degenerate_counts=dict(sorted(degenerate.items())),
    )


def run_scenarios(configs, workers: int = 1, recipes=RECIPES) -> list[ScenarioResult]:
    return [run_scenario(c, i, workers, recipes) for i, c in enumerate(configs)]


def table1_configs(seed: int, n: int = 150, reps: int = 1000) -> list[ScenarioConfig]:
    return [ScenarioConfig(lf, lg, p, p, a, n, reps, seed) for lf, lg, p, a in TABLE1_GRID]


def reproduce_table1(seed: int, n: int = 150, reps: int = 1000, workers: int = 1,
                     recipes=RECIPES) -> list[ScenarioResult]:
    """The 18 estimator scenarios (lambda pair x p x alpha)."""
    return run_scenarios(table1_configs(seed, n, reps), workers, recipes)


def reproduce_table3(seed: int, n: int = 150, reps: int = 1000, workers: int = 1,
                     table1: list[ScenarioResult] | None = None) -> list[ScenarioResult]:
    """The 6 margin configurations of the bounds table.

    Bounds depend on the margins only, so the alpha = 0.5 scenarios are used.
    Passing a finished 18-scenario run reuses its alpha = 0.5 rows.
    """
    if table1 is not None:
        return [r for r in table1 if r.config.alpha == 0.5]
    all_rows = table1_configs(seed, n, reps)
    picked = [(i, c) for i, c in enumerate(all_rows) if c.alpha == 0.5]
    return [run_scenario(c, i, workers) for i, c in picked]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def table1_csv(results: list[ScenarioResult]) -> str:
    header = ["scenario_id", "lambda_f", "lambda_g", "p1", "p2", "alpha", "n", "reps",
              "true_rho", "est_mean", "mse_times_100", "degenerate_reps"]
    rows = []
    for r in results:
        c = r.config
        deg = r.degenerate_counts.get("any", 0)
        rows.append([r.scenario_id, c.lambda_f, c.lambda_g, c.p1, c.p2, c.alpha, c.n, c.reps,
                     r.true_rho, r.est_mean, r.mse_times_100, deg])
    return _csv_text(header, rows)


def table3_csv(results: list[ScenarioResult]) -> str:
    header = ["lambda_f", "lambda_g", "p1", "p2", "true_min_closed", "true_max_closed",
              "true_min_oracle", "true_max_oracle"]
    recipes = list(results[0].bounds_est_mean) if results else []
    for rcp in recipes:
        header += [f"est_min_{rcp}", f"est_max_{rcp}"]
    rows = []
    for r in results:
        c = r.config
        row = [c.lambda_f, c.lambda_g, c.p1, c.p2, *r.bounds_true_closed, *r.bounds_true]
        for rcp in recipes:
            row += list(r.bounds_est_mean[rcp])
        rows.append(row)
    return _csv_text(header, rows)


def export_boxplot_data(results: list[ScenarioResult], path) -> Path:
    """Long-format CSV: scenario_id, rep, estimate, true_rho."""
    path = Path(path)
    rows = []
    for r in results:
        rows.extend([r.scenario_id, i, e, r.true_rho] for i, e in enumerate(r.per_rep_estimates))
    path.write_text(_csv_text(["scenario_id", "rep", "estimate", "true_rho"], rows),
                    encoding="utf-8")
    return path


def read_boxplot_data(path) -> dict[int, tuple[float, np.ndarray]]:
    """Inverse of :func:`export_boxplot_data`: scenario_id -> (true_rho, estimates)."""
    out: dict[int, tuple[float, list]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            sid = int(row["scenario_id"])
            true_rho = float(row["true_rho"])
            out.setdefault(sid, (true_rho, []))[1].append(float(row["estimate"]))
    return {k: (t, np.array(v)) for k, (t, v) in out.items()}


SCENARIO_COLUMNS = ("lambda_f", "lambda_g", "p1", "p2", "alpha", "n", "reps")


def read_scenarios(path, seed: int) -> list[ScenarioConfig]:
    """Scenario CSV with columns lambda_f, lambda_g, p1, p2, alpha, n, reps."""
    configs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(SCENARIO_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: scenario file lacks columns {sorted(missing)}")
        for line, row in enumerate(reader, start=2):
            try:
                configs.append(ScenarioConfig(
                    float(row["lambda_f"]), float(row["lambda_g"]), float(row["p1"]),
                    float(row["p2"]), float(row["alpha"]), int(row["n"]), int(row["reps"]), seed))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: {exc}") from None
    if not configs:
        raise ValueError(f"{path}: no scenarios")
    return configs


def result_summary(r: ScenarioResult) -> dict:
    return {
        "scenario_id": r.scenario_id,
        "config": asdict(r.config),
        "true_rho": r.true_rho,
        "est_mean": r.est_mean,
        "mse_times_100": r.mse_times_100,
        "bounds_true": list(r.bounds_true),
        "bounds_est_mean": {k: list(v) for k, v in r.bounds_est_mean.items()},
        "degenerate_counts": r.degenerate_counts,
    }
