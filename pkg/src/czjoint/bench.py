"""Benchmark harness: the random linear batch and the nonlinear example.

Each experiment simulates ground truth, runs every requested method, checks
that the truth stays inside every enclosure, and writes tidy CSV files. The
column order of :data:`METRIC_COLUMNS` is part of the output contract.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .czsets import (
    ConstrainedZonotope,
    EmptySetError,
    contains_point,
    from_text,
    projection_area_2d,
    projection_polygon_2d,
    to_text,
)
from .estimators import (
    METHODS,
    DivergenceError,
    EstimatorConfig,
    EstimatorState,
    InconsistentMeasurementError,
    initial_state,
    step,
)
from .models import (
    Trajectory,
    UncertaintyBudget,
    example_nonlinear_system,
    random_linear_system,
    random_truth,
    read_trajectory_csv,
    simulate,
    write_trajectory_csv,
)

__all__ = [
    "OUTPUT_ENV",
    "METRIC_COLUMNS",
    "ExperimentConfig",
    "MetricsRow",
    "EstimatorTrace",
    "AuditReport",
    "load_config",
    "default_config",
    "linear_fixture",
    "nonlinear_fixture",
    "run_method",
    "audit_containment",
    "run_linear_batch",
    "run_nonlinear",
    "read_set_dump",
]

logger = logging.getLogger(__name__)

OUTPUT_ENV = "CZJOINT_OUT"
METRIC_COLUMNS = ("k", "method", "mean_radius_x", "mean_radius_p", "area_x", "contains_truth",
                  "n_g", "n_c", "wall_time_ms")
EXPERIMENTS = ("linear-batch", "nonlinear")
# (n, n_p) of the systems each experiment builds
_DIMENSIONS = {"linear-batch": (10, 6), "nonlinear": (2, 1)}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seeds: tuple = (0,)
    horizon: int = 200
    methods: tuple = ("CZ-J", "CZ", "Z-J", "FBP")
    max_ng: int = 70
    max_nc: int = 20
    output_dir: str = "results"
    x0: tuple | None = None
    p: tuple | None = None
    snapshots: tuple = ()
    dump_sets: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "snapshots", tuple(int(k) for k in self.snapshots))
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if int(self.horizon) < 1:
            raise ValueError("horizon must be at least 1")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; expected one of {METHODS}")
        n, n_p = _DIMENSIONS[self.experiment]
        for m in self.methods:
            cfg = self.estimator_config(m)
            cfg.check_budget(n + n_p if cfg.joint else n)
        if self.experiment == "nonlinear":
            for m in self.methods:
                if m in ("CZ-J", "CZ", "Z-J"):
                    raise ValueError(f"method {m} needs a linear model; use its MV variant")

    def estimator_config(self, method: str) -> EstimatorConfig:
        return EstimatorConfig(method, self.max_ng, self.max_nc)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        d = dict(d)
        budgets = d.pop("budgets", None)
        if budgets is not None:
            d.setdefault("max_ng", budgets[0])
            d.setdefault("max_nc", budgets[1])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("x0", "p"):
            if d.get(key) is not None:
                d[key] = tuple(float(v) for v in d[key])
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def default_config(experiment: str) -> ExperimentConfig:
    """The shipped configuration for ``experiment``."""
    name = {"linear-batch": "linear_batch.json", "nonlinear": "nonlinear.json"}[experiment]
    text = resources.files("czjoint").joinpath("configs", name).read_text()
    return ExperimentConfig.from_dict(json.loads(text))


def resolve_output_dir(config: ExperimentConfig, override=None) -> Path:
    """``override`` beats the ``CZJOINT_OUT`` variable, which beats the config."""
    if override:
        return Path(override)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else Path(config.output_dir)


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def linear_fixture(seed: int, horizon: int):
    """System, budget and simulated trajectory for one linear seed."""
    model, budget = random_linear_system(seed)
    x0, p = random_truth(budget, [seed, 1])
    traj = simulate(model, budget, x0, p, [seed, 2], horizon)
    return model, budget, traj


def nonlinear_fixture(seed: int, horizon: int, x0=(10.2, 0.65), p=(1 / 7,)):
    model, budget = example_nonlinear_system()
    traj = simulate(model, budget, x0, p, seed, horizon)
    return model, budget, traj


# ---------------------------------------------------------------------------
# traces and metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricsRow:
    k: int
    method: str
    mean_radius_x: float
    mean_radius_p: float
    area_x: float | None
    contains_truth: bool
    n_g: float
    n_c: float
    wall_time_ms: float

    def as_csv(self) -> list:
        return [self.k, self.method, _fmt(self.mean_radius_x), _fmt(self.mean_radius_p),
                "" if self.area_x is None else _fmt(self.area_x), str(bool(self.contains_truth)).lower(),
                _fmt(self.n_g), _fmt(self.n_c), f"{self.wall_time_ms:.3f}"]


def _fmt(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


@dataclass
class EstimatorTrace:
    """Per-step record of one method on one trajectory."""

    method: str
    n: int
    n_p: int
    predicted: list = field(default_factory=list)
    sets: list = field(default_factory=list)
    hulls: list = field(default_factory=list)
    counts: list = field(default_factory=list)
    wall_time_ms: list = field(default_factory=list)
    parameter_set: ConstrainedZonotope | None = None

    @property
    def horizon(self) -> int:
        return len(self.sets) - 1

    def joint_set(self, k: int) -> ConstrainedZonotope:
        """``Ẑ_k`` as a set over ``(x, p)``; FBP boxes become zonotopes."""
        Z = self.sets[k]
        if not isinstance(Z, ConstrainedZonotope):
            return ConstrainedZonotope.from_box(Z.lo, Z.hi)
        return Z

    def contains(self, k: int, x, p, tol: float = 1e-9) -> bool:
        Z = self.joint_set(k)
        z = np.concatenate([np.asarray(x, float), np.asarray(p, float)])
        if Z.dim == self.n + self.n_p:
            return contains_point(Z, z, tol)
        return contains_point(Z, z[: self.n], tol) and contains_point(self.parameter_set, z[self.n:], tol)

    def radii(self) -> np.ndarray:
        h = np.asarray(self.hulls)
        return 0.5 * (h[:, :, 1] - h[:, :, 0])

    def area(self, k: int, dims=(0, 1)) -> float:
        """Exact area of the projection of ``X̂_k`` onto ``dims``."""
        return projection_area_2d(self.joint_set(k), dims, n_directions=None)

    def metrics(self, traj: Trajectory, with_area: bool = False, tol: float = 1e-9) -> list:
        r = self.radii()
        rows = []
        for k in range(len(self.sets)):
            c = self.counts[k]
            rows.append(MetricsRow(
                k=k, method=self.method,
                mean_radius_x=float(r[k, : self.n].mean()),
                mean_radius_p=float(r[k, self.n:].mean()),
                area_x=self.area(k) if with_area else None,
                contains_truth=self.contains(k, traj.x[k], traj.p, tol),
                n_g=c.get("ng", 0), n_c=c.get("nc", 0),
                wall_time_ms=self.wall_time_ms[k]))
        return rows

    def trace_rows(self, metrics: list) -> list:
        """Per-dimension hull bounds joined with the metric columns."""
        out = []
        h = np.asarray(self.hulls)
        for row in metrics:
            out.append([row.k, row.method]
                       + [_fmt(v) for v in h[row.k].reshape(-1)]
                       + ["" if row.area_x is None else _fmt(row.area_x),
                          str(bool(row.contains_truth)).lower(),
                          _fmt(row.n_g), _fmt(row.n_c), f"{row.wall_time_ms:.3f}"])
        return out

    def trace_header(self) -> list:
        dims = [f"x{i + 1}" for i in range(self.n)] + [f"p{i + 1}" for i in range(self.n_p)]
        bounds = [f"{d}_{side}" for d in dims for side in ("lo", "hi")]
        return ["k", "method"] + bounds + ["area_x", "contains_truth", "n_g", "n_c", "wall_time_ms"]


def run_method(method: str, model, budget: UncertaintyBudget, traj: Trajectory,
               config: EstimatorConfig | None = None) -> EstimatorTrace:
    """Filter ``traj`` with ``method``; raises on inconsistency or divergence."""
    config = config or EstimatorConfig(method)
    trace = EstimatorTrace(method, model.n, model.n_p,
                           parameter_set=None if config.joint else budget.P)
    state = None
    for k in range(traj.horizon + 1):
        t0 = time.perf_counter()
        if state is None:
            state = initial_state(model, budget, traj.y[0], traj.u[0], config)
        else:
            state = step(state, traj.y[k], traj.u[k], config)
        _record(trace, state, 1e3 * (time.perf_counter() - t0))
    return trace


def _record(trace: EstimatorTrace, state: EstimatorState, ms: float):
    trace.predicted.append(state.predicted)
    trace.sets.append(state.Z)
    trace.hulls.append(np.column_stack([state.hull.lo, state.hull.hi]))
    trace.counts.append(dict(state.counts))
    trace.wall_time_ms.append(ms)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

@dataclass
class AuditReport:
    checked: int = 0
    violations: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.errors

    def merge(self, other: AuditReport) -> AuditReport:
        self.checked += other.checked
        self.violations.extend(other.violations)
        self.errors.extend(other.errors)
        return self

    def summary(self) -> str:
        lines = [f"checked {self.checked} steps: {len(self.violations)} violation(s), "
                 f"{len(self.errors)} error(s)"]
        lines += [f"  violation: {v}" for v in self.violations]
        lines += [f"  error: {e}" for e in self.errors]
        return "\n".join(lines)


def audit_containment(trace: EstimatorTrace, trajectory: Trajectory, tol: float = 1e-9) -> AuditReport:
    """Check ``(x_k, p) ∈ Ẑ_k`` for every recorded step."""
    if trace.horizon != trajectory.horizon:
        raise ValueError(f"trace covers k=0..{trace.horizon} but the trajectory k=0..{trajectory.horizon}")
    report = AuditReport()
    for k in range(trace.horizon + 1):
        report.checked += 1
        if not trace.contains(k, trajectory.x[k], trajectory.p, tol):
            report.violations.append({"method": trace.method, "k": k})
    return report


def write_set_dump(trace: EstimatorTrace, path) -> None:
    """JSON lines, one record per step, readable by :func:`read_set_dump`."""
    with open(path, "w") as fh:
        for k in range(len(trace.sets)):
            rec = {"k": k, "method": trace.method, "n": trace.n, "n_p": trace.n_p,
                   "set": json.loads(to_text(trace.joint_set(k)))}
            if trace.parameter_set is not None:
                rec["parameter_set"] = json.loads(to_text(trace.parameter_set))
            fh.write(json.dumps(rec) + "\n")


def read_set_dump(path) -> EstimatorTrace:
    trace = None
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if trace is None:
                P = from_text(rec["parameter_set"]) if "parameter_set" in rec else None
                trace = EstimatorTrace(rec["method"], rec["n"], rec["n_p"], parameter_set=P)
            if rec["k"] != len(trace.sets):
                raise ValueError(f"{path}: expected step {len(trace.sets)}, found {rec['k']}")
            trace.sets.append(from_text(rec["set"]))
    if trace is None:
        raise ValueError(f"{path} holds no records")
    return trace


def audit_files(set_paths, trajectory_path, tol: float = 1e-9) -> AuditReport:
    traj = read_trajectory_csv(trajectory_path)
    report = AuditReport()
    for p in set_paths:
        report.merge(audit_containment(read_set_dump(p), traj, tol))
    return report


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)


def write_metrics_csv(path, rows) -> None:
    _write_rows(path, METRIC_COLUMNS, [r.as_csv() for r in rows])


def write_long_format(path, rows, metrics=("mean_radius_x", "mean_radius_p", "area_x")) -> None:
    """Whitespace-separated ``method metric k value`` blocks for gnuplot ``index``."""
    with open(path, "w") as fh:
        fh.write("# method metric k value\n")
        methods = list(dict.fromkeys(r.method for r in rows))
        for m in methods:
            for name in metrics:
                vals = [(r.k, getattr(r, name)) for r in rows if r.method == m]
                if all(v is None for _, v in vals):
                    continue
                for k, v in vals:
                    fh.write(f"{m} {name} {k} {_fmt(v)}\n")
                fh.write("\n\n")


def _average_rows(per_seed: list) -> list:
    """Mean over systems of the per-system, per-step rows."""
    out = []
    by_key = {}
    for rows in per_seed:
        for r in rows:
            by_key.setdefault((r.method, r.k), []).append(r)
    for (method, k), rs in by_key.items():
        out.append(MetricsRow(
            k=k, method=method,
            mean_radius_x=float(np.mean([r.mean_radius_x for r in rs])),
            mean_radius_p=float(np.mean([r.mean_radius_p for r in rs])),
            area_x=None,
            contains_truth=all(r.contains_truth for r in rs),
            n_g=float(np.mean([r.n_g for r in rs])),
            n_c=float(np.mean([r.n_c for r in rs])),
            wall_time_ms=float(np.mean([r.wall_time_ms for r in rs]))))
    order = {m: i for i, m in enumerate(dict.fromkeys(r.method for rows in per_seed for r in rows))}
    out.sort(key=lambda r: (order[r.method], r.k))
    return out


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

@dataclass
class ExperimentResult:
    output_dir: Path
    rows: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)
    report: AuditReport = field(default_factory=AuditReport)
    summary: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.report.ok


def _run_one(method, model, budget, traj, config, out_dir, tag, with_area, result, key):
    try:
        trace = run_method(method, model, budget, traj, config.estimator_config(method))
    except (InconsistentMeasurementError, DivergenceError, EmptySetError) as exc:
        logger.error("%s %s: %s", tag, method, exc)
        result.report.errors.append({"method": method, "run": tag, "error": f"{type(exc).__name__}: {exc}"})
        return None
    rows = trace.metrics(traj, with_area=with_area)
    rep = audit_containment(trace, traj)
    for v in rep.violations:
        v["run"] = tag
    result.report.merge(rep)
    result.traces[key] = trace
    if config.dump_sets:
        write_set_dump(trace, out_dir / f"sets_{tag}_{method}.jsonl")
    return trace, rows


def run_linear_batch(config: ExperimentConfig, output_dir=None, keep_traces: bool = False) -> ExperimentResult:
    """Every seed and method of the linear benchmark; writes CSV files under ``output_dir``."""
    if config.experiment != "linear-batch":
        raise ValueError("run_linear_batch needs a linear-batch config")
    out = Path(output_dir) if output_dir else resolve_output_dir(config)
    out.mkdir(parents=True, exist_ok=True)
    result = ExperimentResult(out)
    per_seed = []
    for seed in config.seeds:
        model, budget, traj = linear_fixture(seed, config.horizon)
        tag = f"seed{seed}"
        write_trajectory_csv(traj, out / f"trajectory_{tag}.csv")
        seed_rows, trace_rows, header = [], [], None
        for method in config.methods:
            res = _run_one(method, model, budget, traj, config, out, tag, False, result, (seed, method))
            if res is None:
                continue
            trace, rows = res
            seed_rows.extend(rows)
            header = trace.trace_header()
            trace_rows.extend(trace.trace_rows(rows))
            if not keep_traces:
                result.traces.pop((seed, method), None)
        write_metrics_csv(out / f"metrics_{tag}.csv", seed_rows)
        if header:
            _write_rows(out / f"trace_{tag}.csv", header, trace_rows)
        result.rows[seed] = seed_rows
        per_seed.append(seed_rows)
        logger.info("seed %d done", seed)
    avg = _average_rows(per_seed)
    write_metrics_csv(out / "metrics_average.csv", avg)
    write_long_format(out / "metrics_average.dat", avg, metrics=("mean_radius_x", "mean_radius_p"))
    result.rows["average"] = avg
    final = {r.method: r for r in avg if r.k == config.horizon}
    result.summary = {m: {"mean_radius_x": r.mean_radius_x, "mean_radius_p": r.mean_radius_p}
                      for m, r in final.items()}
    _write_summary(out / "summary.json", config, result)
    return result


def nonlinear_ratios(rows_a: list, rows_b: list) -> dict:
    """Mean over ``k`` of ``area(a)/area(b)`` and ``rad_p(a)/rad_p(b)``."""
    area = np.mean([a.area_x / b.area_x for a, b in zip(rows_a, rows_b)])
    rad = np.mean([a.mean_radius_p / b.mean_radius_p for a, b in zip(rows_a, rows_b)])
    return {"area_ratio": float(area), "radius_p_ratio": float(rad)}


def run_nonlinear(config: ExperimentConfig, output_dir=None, keep_traces: bool = True) -> ExperimentResult:
    """The nonlinear example; writes metrics, traces, snapshots and the summary ratios."""
    if config.experiment != "nonlinear":
        raise ValueError("run_nonlinear needs a nonlinear config")
    out = Path(output_dir) if output_dir else resolve_output_dir(config)
    out.mkdir(parents=True, exist_ok=True)
    result = ExperimentResult(out)
    seed = config.seeds[0]
    kwargs = {k: v for k, v in (("x0", config.x0), ("p", config.p)) if v is not None}
    model, budget, traj = nonlinear_fixture(seed, config.horizon, **kwargs)
    write_trajectory_csv(traj, out / "trajectory.csv")
    all_rows, trace_rows, header = [], [], None
    for method in config.methods:
        res = _run_one(method, model, budget, traj, config, out, f"seed{seed}", True, result, method)
        if res is None:
            continue
        trace, rows = res
        result.rows[method] = rows
        all_rows.extend(rows)
        header = trace.trace_header()
        trace_rows.extend(trace.trace_rows(rows))
    write_metrics_csv(out / "metrics.csv", all_rows)
    write_long_format(out / "metrics.dat", all_rows)
    if header:
        _write_rows(out / "trace.csv", header, trace_rows)
    _write_snapshots(out / "snapshots.csv", result.traces, config.snapshots)
    if "CZMV-J" in result.rows and "ZMV-J" in result.rows:
        result.summary = nonlinear_ratios(result.rows["CZMV-J"], result.rows["ZMV-J"])
    if not keep_traces:
        result.traces.clear()
    _write_summary(out / "summary.json", config, result)
    return result


def _write_snapshots(path, traces: dict, steps) -> None:
    rows = []
    for method, trace in traces.items():
        for k in steps:
            if k > trace.horizon:
                continue
            poly = projection_polygon_2d(trace.joint_set(k), (0, 1), n_directions=None)
            rows.extend([method, k, i, _fmt(v[0]), _fmt(v[1])] for i, v in enumerate(poly))
    _write_rows(path, ["method", "k", "vertex", "x1", "x2"], rows)


def _write_summary(path, config: ExperimentConfig, result: ExperimentResult) -> None:
    rec = {"config": config.to_dict(), "summary": result.summary, "checked_steps": result.report.checked,
           "violations": result.report.violations, "errors": result.report.errors}
    with open(path, "w") as fh:
        json.dump(rec, fh, indent=2, sort_keys=True)
        fh.write("\n")
