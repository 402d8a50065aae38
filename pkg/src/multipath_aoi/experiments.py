"""Scenarios, sweeps and figure presets producing long-format result tables.

A table is a list of :class:`Row`. Analytic and simulated values for the same
point share every key except ``source``; comparison rows (KS distance,
percentile gap, one-sided bound gap) carry ``source="simulated"``.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import age, latency, simulator, stats
from .model import Kind, Quality, Scheme, SystemConfig, arrival_rate, assert_stable, check_quality, packet_size

DEFAULT_FRAMES = 1 << 20
DEFAULT_SEED = 1
METRICS = ("latency_cdf", "paoi_cdf", "p99_latency", "p99_paoi", "delivery_prob")
AXES = ("tau", "eta", "epsilon")
OBJECTIVES = {"minimize_p99_paoi": "p99_paoi", "minimize_p99_latency": "p99_latency"}
CSV_HEADER = ("scenario", "scheme", "quality", "metric", "axis", "axis_value", "source", "value", "flag")


class Row(NamedTuple):
    scenario: str
    scheme: str
    quality: str
    metric: str
    axis: str
    axis_value: float
    source: str
    value: float
    flag: str = ""


@dataclass(frozen=True)
class Scenario:
    name: str
    cfg: SystemConfig
    n_frames: int = DEFAULT_FRAMES
    seed: int = DEFAULT_SEED
    metrics: tuple[str, ...] = METRICS
    qualities: tuple[Quality, ...] | None = None  # None: all qualities of the scheme
    analytic: bool = True
    simulate: bool = True

    def __post_init__(self):
        bad = set(self.metrics) - set(METRICS)
        if bad:
            raise ValueError(f"unknown metrics {sorted(bad)}; choose from {METRICS}")
        if self.qualities is None:
            object.__setattr__(self, "qualities", self.cfg.scheme.qualities)
        else:
            object.__setattr__(self, "qualities",
                               tuple(check_quality(self.cfg.scheme, q) for q in self.qualities))


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axis: str
    grid: tuple[float, ...]
    optimize: str | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ValueError("sweep grid is empty")
        object.__setattr__(self, "grid", grid)
        for v in grid:
            _apply_axis(self.base.cfg, self.axis, v)  # validates the range
        if self.optimize is not None:
            if self.optimize not in OBJECTIVES:
                raise ValueError(f"optimize must be one of {sorted(OBJECTIVES)}, got {self.optimize!r}")
            if self.axis == "tau":
                raise ValueError("cannot optimize tau while sweeping tau")


def _apply_axis(cfg: SystemConfig, axis: str, value: float) -> SystemConfig:
    if axis == "tau":
        return cfg.replace(tau=value)
    if axis == "eta":
        if cfg.scheme.kind is not Kind.CODED:
            # the other schemes have a fixed rate; the point repeats the reference value
            return cfg
        return cfg.replace(scheme=Scheme.coded(value))
    if axis == "epsilon":
        return cfg.replace(eps=(value, value))
    raise ValueError(f"unknown axis {axis!r}")


# ---------------------------------------------------------------- evaluation


class _Point:
    """Lazily computed analytic and simulated quantities for one configuration."""

    def __init__(self, cfg: SystemConfig, n_frames: int, seed: int):
        self.cfg = cfg
        self.n_frames = n_frames
        self.seed = seed
        self.stable = bool(assert_stable(cfg))
        self.has_analytic = cfg.scheme.kind is not Kind.QUEUE_BASED
        self._trace = None
        self._cache = {}

    @property
    def trace(self):
        if self._trace is None:
            self._trace = simulator.run(self.cfg, self.n_frames, self.seed)
        return self._trace

    def curve(self, kind: str, q: Quality):
        key = ("curve", kind, q)
        if key not in self._cache:
            if kind == "latency":
                self._cache[key] = latency.latency_curve(self.cfg, q)
            else:
                self._cache[key] = age.paoi_curve(self.cfg, q)
        return self._cache[key]

    def samples(self, kind: str, q: Quality):
        key = ("emp", kind, q)
        if key not in self._cache:
            x = (simulator.extract_latencies if kind == "latency" else simulator.extract_paoi)(self.trace, q)
            self._cache[key] = stats.empirical_cdf(x) if x.size else None
        return self._cache[key]


def _quality_tag(scheme: Scheme, q: Quality) -> str:
    return q.value


def _eval_point(scn_name: str, pt: _Point, metrics, qualities, axis: str, axis_value: float,
                analytic: bool = True, simulate: bool = True, grid_points: int = 100) -> list[Row]:
    cfg = pt.cfg
    scheme = cfg.scheme.label
    rows: list[Row] = []

    def add(q, metric, source, value, flag="", ax=axis, av=axis_value):
        rows.append(Row(scn_name, scheme, _quality_tag(cfg.scheme, q), metric, ax, float(av),
                        source, float(value), flag))

    for q in qualities:
        for metric in metrics:
            kind = "paoi" if "paoi" in metric else "latency"
            want_an = analytic and pt.has_analytic
            want_sim = simulate
            if not pt.stable:
                if want_an:
                    add(q, metric, "analytic", math.inf, "unstable")
                if want_sim:
                    add(q, metric, "simulated", math.inf, "unstable")
                continue
            if metric == "delivery_prob":
                if want_an:
                    add(q, metric, "analytic", latency.delivery_probability(cfg.scheme, q, *cfg.eps))
                if want_sim:
                    ok, total = simulator.delivered_fraction(pt.trace, q)
                    add(q, metric, "simulated", ok / total, "" if pt.has_analytic else "simulation_only")
                continue
            curve = pt.curve(kind, q) if want_an else None
            bound_flag = "lower_bound" if getattr(curve, "is_lower_bound", False) else ""
            emp = pt.samples(kind, q) if want_sim else None
            if metric.startswith("p99"):
                an = curve.percentile(0.99) if curve is not None else None
                if an is not None:
                    add(q, metric, "analytic", an, bound_flag)
                if emp is not None:
                    add(q, metric, "simulated", stats.percentile(emp, 0.99),
                        "" if pt.has_analytic else "simulation_only")
                    if an is not None:
                        add(q, metric + "_gap", "simulated", abs(stats.percentile(emp, 0.99) - an), bound_flag)
                continue
            # full cdf on a t grid
            if curve is not None:
                t_max = curve.percentile(0.999)
            elif emp is not None:
                t_max = stats.percentile(emp, 0.999)
            else:
                continue
            grid = np.linspace(0.0, t_max, grid_points)
            grid_axis = "delta" if kind == "paoi" else "t"
            if curve is not None:
                for t, v in zip(grid, curve.cdf(grid)):
                    add(q, metric, "analytic", v, bound_flag, grid_axis, t)
            if emp is not None:
                for t, v in zip(grid, emp.cdf(grid)):
                    add(q, metric, "simulated", v, "" if pt.has_analytic else "simulation_only", grid_axis, t)
                if curve is not None:
                    if bound_flag:
                        # one-sided: how far the empirical cdf rises above the bound
                        gap = float(np.max(emp.cdf(emp.samples) - curve.cdf(emp.samples)))
                        add(q, f"bound_gap_{kind}", "simulated", max(gap, 0.0), bound_flag)
                    else:
                        add(q, f"ks_{kind}", "simulated", stats.ks_distance(emp, curve.cdf))
    return rows


def run_scenario(scn: Scenario, grid_points: int = 100) -> list[Row]:
    """Evaluate every requested metric, analytically and by simulation."""
    pt = _Point(scn.cfg, scn.n_frames, scn.seed)
    return sort_rows(_eval_point(scn.name, pt, scn.metrics, scn.qualities, "tau", scn.cfg.tau,
                                 scn.analytic, scn.simulate, grid_points))


def _tau_bounds(cfg: SystemConfig) -> tuple[float, float]:
    """Stable tau range used by the frame-rate optimizer."""
    mu_min = min(cfg.mu)
    # tau at which the most loaded path reaches rho = 1
    tau_crit = packet_size(cfg.scheme) * arrival_rate(cfg.scheme, 1.0) / mu_min
    if cfg.scheme.kind is Kind.QUEUE_BASED:
        tau_crit = 1.0 / sum(cfg.mu)
    lo = tau_crit * 1.02
    return lo, max(10.0 * tau_crit, 10.0 / mu_min)


def golden_section(f, lo: float, hi: float, rtol: float = 1e-3) -> tuple[float, float]:
    """Minimize a unimodal f on [lo, hi]; returns (argmin, min)."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * (a + b) / 2.0:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def _optimal_tau(cfg: SystemConfig, metric: str, q: Quality, n_frames: int, seed: int) -> float:
    lo, hi = _tau_bounds(cfg)
    kind = "paoi" if "paoi" in metric else "latency"
    if cfg.scheme.kind is Kind.QUEUE_BASED:
        # simulated objective with common random numbers (same seed everywhere)
        def obj(tau):
            pt = _Point(cfg.replace(tau=tau), n_frames, seed)
            return stats.percentile(pt.samples(kind, q), 0.99)
    else:
        def obj(tau):
            c = cfg.replace(tau=tau)
            curve = latency.latency_curve(c, q) if kind == "latency" else age.paoi_curve(c, q)
            return curve.percentile(0.99)
    tau, _ = golden_section(obj, lo, hi)
    return tau


def sweep(spec: SweepSpec, grid_points: int = 100) -> list[Row]:
    """One row per (grid value, quality, metric, source); see :class:`SweepSpec`."""
    base = spec.base
    rows: list[Row] = []
    # schemes without a coding rate are flat along eta: evaluate once, repeat the rows
    done: dict[SystemConfig, list[Row]] = {}
    for v in spec.grid:
        cfg = _apply_axis(base.cfg, spec.axis, v)
        if cfg in done:
            rows += [r._replace(axis_value=v) for r in done[cfg]]
            continue
        start = len(rows)
        if spec.optimize is None:
            pt = _Point(cfg, base.n_frames, base.seed)
            rows += _eval_point(base.name, pt, base.metrics, base.qualities, spec.axis, v,
                                base.analytic, base.simulate, grid_points)
            done[cfg] = rows[start:]
            continue
        metric = OBJECTIVES[spec.optimize]
        for q in base.qualities:
            tau = _optimal_tau(cfg, metric, q, base.n_frames, base.seed)
            pt = _Point(cfg.replace(tau=tau), base.n_frames, base.seed)
            rows.append(Row(base.name, cfg.scheme.label, q.value, "tau_opt", spec.axis, v,
                            "analytic" if pt.has_analytic else "simulated", tau,
                            "" if pt.has_analytic else "simulation_only"))
            rows += _eval_point(base.name, pt, (metric,), (q,), spec.axis, v,
                                base.analytic, base.simulate, grid_points)
        done[cfg] = rows[start:]
    return sort_rows(rows)


# ---------------------------------------------------------------- output


def sort_rows(rows) -> list[Row]:
    return sorted(rows, key=lambda r: (r.scenario, r.axis_value, r.scheme, r.quality, r.metric, r.source))


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{v:.9g}"


def emit_csv(table, path) -> None:
    """Write a result table as UTF-8 CSV with a fixed header and row order."""
    if not table:
        raise ValueError("refusing to write an empty table")
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    with fh:
        write_csv(table, fh)


def write_csv(table, fh) -> None:
    """Write the sorted table to an open text stream."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sort_rows(table):
        w.writerow([r.scenario, r.scheme, r.quality, r.metric, r.axis, _fmt(r.axis_value),
                    r.source, _fmt(r.value), r.flag])


# ---------------------------------------------------------------- presets

_CDF_TAUS = (0.75, 1.5, 2.0, 4.0)
_CODED_ETA = 0.75
_FOUR = (Scheme.alternating(), Scheme.replicated(), Scheme.split(), Scheme.coded(_CODED_ETA))
# the four panels used by the percentile-vs-period figures
_PANELS = (
    ("balanced", (1.0, 1.0), (0.0, 0.0)),
    ("balanced-err", (1.0, 1.0), (0.2, 0.2)),
    ("unbalanced", (1.0, 1.5), (0.0, 0.0)),
    ("unbalanced-err", (1.0, 1.0), (0.1, 0.2)),
)


def _log_grid(lo, hi, n):
    return tuple(float(x) for x in np.geomspace(lo, hi, n))


def _cdf_jobs(preset, metric, mu, eps, n_frames, seed):
    jobs = []
    for tau in _CDF_TAUS:
        for s in _FOUR:
            cfg = SystemConfig.make(s, tau, mu, eps)
            jobs.append(Scenario(f"{preset}:tau={tau:g}", cfg, n_frames, seed, (metric,)))
    return jobs


def _vs_tau_jobs(preset, metric, n_frames, seed, points):
    grid = _log_grid(0.6, 8.0, points)
    jobs = []
    for panel, mu, eps in _PANELS:
        schemes = list(_FOUR)
        if eps == (0.0, 0.0):
            schemes.append(Scheme.queue_based())
        for s in schemes:
            base = Scenario(f"{preset}:{panel}", SystemConfig.make(s, grid[0], mu, eps), n_frames, seed, (metric,))
            jobs.append(SweepSpec(base, "tau", grid))
    return jobs


def _eta_grid(points):
    return tuple(float(x) for x in np.linspace(0.5, 1.0, points))


def preset_jobs(name: str, n_frames: int = DEFAULT_FRAMES, seed: int = DEFAULT_SEED,
                grid_points: int | None = None) -> list:
    """Scenarios and sweeps reproducing one figure family."""
    if name == "lat-cdf-balanced":
        return _cdf_jobs(name, "latency_cdf", (1.0, 1.0), (0.0, 0.0), n_frames, seed)
    if name == "lat-cdf-unbalanced":
        return _cdf_jobs(name, "latency_cdf", (1.0, 1.5), (0.0, 0.0), n_frames, seed)
    if name == "lat-cdf-errors":
        return _cdf_jobs(name, "latency_cdf", (1.0, 1.0), (0.2, 0.2), n_frames, seed)
    if name == "paoi-cdf-balanced":
        return _cdf_jobs(name, "paoi_cdf", (1.0, 1.0), (0.0, 0.0), n_frames, seed)
    if name == "paoi-cdf-errors":
        return _cdf_jobs(name, "paoi_cdf", (1.0, 1.0), (0.2, 0.2), n_frames, seed)
    if name == "lat-eta":
        grid = _eta_grid(grid_points or 21)
        jobs = []
        for tau in _CDF_TAUS:
            for s in _FOUR:
                base = Scenario(f"{name}:tau={tau:g}", SystemConfig.make(s, tau), n_frames, seed, ("p99_latency",))
                jobs.append(SweepSpec(base, "eta", grid))
        return jobs
    if name == "err-prob":
        grid = tuple(round(0.05 * k, 2) for k in range(9))
        return [SweepSpec(Scenario(name, SystemConfig.make(s, 2.0), n_frames, seed, ("delivery_prob",)),
                          "epsilon", grid) for s in _FOUR]
    if name == "lat99-vs-tau":
        return _vs_tau_jobs(name, "p99_latency", n_frames, seed, grid_points or 25)
    if name == "paoi99-vs-tau":
        return _vs_tau_jobs(name, "p99_paoi", n_frames, seed, grid_points or 25)
    if name == "paoi99-vs-eta-optimized":
        grid = _eta_grid(grid_points or 11)
        jobs = []
        for panel, mu, eps in _PANELS:
            schemes = list(_FOUR)
            if eps == (0.0, 0.0):
                schemes.append(Scheme.queue_based())
            for s in schemes:
                base = Scenario(f"{name}:{panel}", SystemConfig.make(s, 2.0, mu, eps), n_frames, seed, ("p99_paoi",))
                jobs.append(SweepSpec(base, "eta", grid, optimize="minimize_p99_paoi"))
        return jobs
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")


PRESETS = {
    "lat-cdf-balanced": "latency cdf, error-free, mu=(1,1), tau in {0.75,1.5,2,4}",
    "lat-eta": "p99 latency vs coding rate eta, tau in {0.75,1.5,2,4}",
    "lat-cdf-unbalanced": "latency cdf, error-free, mu=(1,1.5)",
    "err-prob": "frame delivery probability vs eps (eps1=eps2)",
    "lat-cdf-errors": "latency cdf, mu=(1,1), eps=(0.2,0.2)",
    "lat99-vs-tau": "p99 latency vs tau on four parameter panels",
    "paoi-cdf-balanced": "PAoI cdf, error-free, mu=(1,1)",
    "paoi-cdf-errors": "PAoI cdf, mu=(1,1), eps=(0.2,0.2)",
    "paoi99-vs-tau": "p99 PAoI vs tau on four parameter panels",
    "paoi99-vs-eta-optimized": "p99 PAoI at the best tau vs coding rate eta",
}


def run_job(job, grid_points: int = 100) -> list[Row]:
    if isinstance(job, SweepSpec):
        return sweep(job, grid_points)
    return run_scenario(job, grid_points)


def run_preset(name: str, n_frames: int = DEFAULT_FRAMES, seed: int = DEFAULT_SEED,
               grid_points: int | None = None, workers: int = 1) -> list[Row]:
    """Run every job of a preset, optionally on a process pool; row order is fixed."""
    jobs = preset_jobs(name, n_frames, seed, grid_points)
    curve_points = grid_points or 100
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_job, jobs, [curve_points] * len(jobs)))
    else:
        parts = [run_job(j, curve_points) for j in jobs]
    return sort_rows(r for part in parts for r in part)


# ---------------------------------------------------------------- JSON config


def scheme_from_dict(d) -> Scheme:
    if isinstance(d, str):
        return Scheme.parse(d)
    return Scheme.parse(d.get("variant", d.get("kind")), d.get("eta"))


def config_from_dict(d) -> SystemConfig:
    paths = d.get("paths", [{}, {}])
    if len(paths) != 2:
        raise ValueError(f"exactly two paths are supported, got {len(paths)}")
    return SystemConfig.make(scheme_from_dict(d["scheme"]), float(d["tau"]),
                             [p.get("mu", 1.0) for p in paths], [p.get("epsilon", 0.0) for p in paths])


def scenario_from_dict(d) -> Scenario:
    known = {"name", "cfg", "n_frames", "seed", "metrics", "qualities"}
    extra = set(d) - known
    if extra:
        raise ValueError(f"unknown scenario fields {sorted(extra)}")
    return Scenario(
        name=d.get("name", "scenario"),
        cfg=config_from_dict(d["cfg"]),
        n_frames=int(d.get("n_frames", DEFAULT_FRAMES)),
        seed=int(d.get("seed", DEFAULT_SEED)),
        metrics=tuple(d.get("metrics", METRICS)),
        qualities=tuple(d["qualities"]) if d.get("qualities") else None,
    )


def sweep_from_dict(d) -> SweepSpec:
    extra = set(d) - {"base", "axis", "grid", "optimize"}
    if extra:
        raise ValueError(f"unknown sweep fields {sorted(extra)}")
    return SweepSpec(scenario_from_dict(d["base"]), d["axis"], tuple(d["grid"]), d.get("optimize"))


def with_overrides(scn: Scenario, n_frames=None, seed=None) -> Scenario:
    changes = {}
    if n_frames is not None:
        changes["n_frames"] = int(n_frames)
    if seed is not None:
        changes["seed"] = int(seed)
    return replace(scn, **changes) if changes else scn


def emit_gnuplot(table, path) -> None:
    """Write the table as gnuplot data blocks, one per curve.

    Blocks are separated by two blank lines so ``index N`` selects a curve;
    each block starts with a comment naming it and holds ``axis_value value``.
    """
    rows = sort_rows(table)
    if not rows:
        raise ValueError("refusing to write an empty table")
    blocks: dict[tuple, list[Row]] = {}
    for r in rows:
        blocks.setdefault((r.scenario, r.scheme, r.quality, r.metric, r.source, r.axis), []).append(r)
    try:
        fh = open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    with fh:
        for n, (key, block) in enumerate(blocks.items()):
            if n:
                fh.write("\n\n")
            fh.write("# index {} : {}\n".format(n, " ".join(key)))
            fh.write(f"# {key[5]} value flag\n")
            for r in block:
                fh.write(f"{_fmt(r.axis_value)} {_fmt(r.value)} {r.flag or '-'}\n")
