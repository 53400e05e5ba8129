"""Reproducible random scenarios and runtime scaling measurements.

Scenario generation is fully determined by its spec (including the seed);
the scaling harness times table construction, structure preprocessing and
the scheduling loop separately, records the operation counters, and fits
the log-log slope of total runtime against the task count.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from .edbf import EdbfRun, HeuristicConfig
from .geometry import GridSpec, enumerate_disks
from .radar import (
    RadarConfig,
    TrackTask,
    availability_arrays,
    build_availability_table,
    default_prf_set,
    default_radar_config,
)
from .sdbf import DiskHeuristicConfig, SdbfRun
from .structures import OpCounters


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything that determines a generated scenario."""

    n_tasks: int
    seed: int = 0
    range_bounds: tuple[float, float] = (20_000.0, 120_000.0)
    velocity_bounds: tuple[float, float] = (-300.0, 300.0)
    sigma_r_bounds: tuple[float, float] = (10.0, 50.0)
    sigma_f_bounds: tuple[float, float] = (10.0, 60.0)
    cluster_count: int = 0          # 0 draws scan points uniformly
    cluster_radius: float = 0.15
    scan_extent: float = 0.95       # radius of the populated scan-plane disk
    keep_unschedulable: bool = False

    def __post_init__(self):
        for lo, hi in (self.range_bounds, self.velocity_bounds,
                       self.sigma_r_bounds, self.sigma_f_bounds):
            if lo > hi:
                raise ValueError("scenario bounds must be ordered")
        if self.n_tasks < 0:
            raise ValueError("n_tasks must be nonnegative")


def _uniform_disk(rng, n, radius):
    rad = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    ang = rng.uniform(0.0, 2.0 * math.pi, n)
    return rad * np.cos(ang), rad * np.sin(ang)


def gen_scenario(spec: ScenarioSpec, cfg: RadarConfig | None = None,
                 prfs=None):
    """Draw tasks until the requested count is reached.

    Unless ``keep_unschedulable`` is set, draws trackable with no PRF are
    discarded and redrawn, so the emitted scenario has exactly ``n_tasks``
    schedulable tasks.  Identical spec and defaults give identical output.
    """
    cfg = cfg if cfg is not None else default_radar_config()
    prfs = tuple(prfs) if prfs is not None else default_prf_set()
    rng = np.random.default_rng(spec.seed)

    centers = None
    if spec.cluster_count > 0:
        cu, cv = _uniform_disk(rng, spec.cluster_count, 0.8 * spec.scan_extent)
        centers = np.stack([cu, cv], axis=1)

    rows = []
    while len(rows) < spec.n_tasks:
        m = max(2 * (spec.n_tasks - len(rows)), 64)
        r = rng.uniform(*spec.range_bounds, m)
        vt = rng.uniform(*spec.velocity_bounds, m)
        sr = rng.uniform(*spec.sigma_r_bounds, m)
        sf = rng.uniform(*spec.sigma_f_bounds, m)
        if centers is None:
            u, v = _uniform_disk(rng, m, spec.scan_extent)
        else:
            which = rng.integers(0, spec.cluster_count, m)
            du, dv = _uniform_disk(rng, m, spec.cluster_radius)
            u = centers[which, 0] + du
            v = centers[which, 1] + dv
        norm = np.sqrt(u * u + v * v)
        over = norm > 0.999
        if over.any():
            u = np.where(over, u * 0.999 / norm, u)
            v = np.where(over, v * 0.999 / norm, v)
        if spec.keep_unschedulable:
            ok = np.ones(m, dtype=bool)
        else:
            av = availability_arrays(r, sr, vt, sf, prfs, cfg)[0]
            ok = av.any(axis=1)
        for i in np.nonzero(ok)[0]:
            if len(rows) == spec.n_tasks:
                break
            rows.append((float(r[i]), float(sr[i]), float(vt[i]),
                         float(sf[i]), float(u[i]), float(v[i])))

    tasks = tuple(
        TrackTask(
            id=i + 1, range_m=row[0], sigma_r=row[1], velocity=row[2],
            sigma_f=row[3], u=row[4], v=row[5],
        )
        for i, row in enumerate(rows)
    )
    return cfg, prfs, tasks


def fit_complexity(sizes, times) -> tuple[float, float]:
    """Least-squares slope and R^2 of log(time) against log(size)."""
    if len(sizes) != len(times) or len(sizes) < 2:
        raise ValueError("need at least two (size, time) points")
    if any(t <= 0 for t in times) or any(s <= 0 for s in sizes):
        raise ValueError("sizes and times must be positive")
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(times, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


@dataclass
class ScalingRow:
    size: int
    prep_ms: float
    sched_ms: float
    total_ms: float
    backend_ops: int
    bi_iterations: int
    bi_max_iterations: int
    looks: int


@dataclass
class ScalingReport:
    mode: str
    backend: str
    rows: list[ScalingRow]
    exponent: float
    residual: float
    counter_exponent: float
    counter_residual: float

    def to_text(self) -> str:
        lines = [
            "pulseplan-scaling v1",
            f"mode={self.mode} backend={self.backend}",
            "size prep_ms sched_ms total_ms backend_ops bi_iterations bi_max looks",
        ]
        for row in self.rows:
            lines.append(
                f"{row.size} {row.prep_ms:.3f} {row.sched_ms:.3f} {row.total_ms:.3f} "
                f"{row.backend_ops} {row.bi_iterations} {row.bi_max_iterations} {row.looks}"
            )
        lines.append(
            f"fit exponent={self.exponent:.4f} r2={self.residual:.4f} "
            f"counter_exponent={self.counter_exponent:.4f} counter_r2={self.counter_residual:.4f}"
        )
        return "\n".join(lines) + "\n"


def _time_one(mode, backend, spec, cfg, prfs, grid, rules):
    """One generation + timed run; returns (prep_s, sched_s, counters, looks)."""
    cfg, prfs, tasks = gen_scenario(spec, cfg, prfs)
    counters = OpCounters()
    t0 = time.perf_counter()
    table = build_availability_table(tasks, prfs, cfg)
    if mode == "sdbf":
        catalog = enumerate_disks(table, grid)
        run = SdbfRun(
            catalog,
            DiskHeuristicConfig(backend=backend, seed=spec.seed, **rules),
            counters,
        )
    else:
        run = EdbfRun(
            table,
            HeuristicConfig(backend=backend, seed=spec.seed, **rules),
            counters,
        )
    t1 = time.perf_counter()
    schedule = run.run()
    t2 = time.perf_counter()
    return t1 - t0, t2 - t1, counters, schedule.n_looks_used()


def _time_one_star(args):
    return _time_one(*args)


def run_scaling(
    mode: str,
    backend: str,
    sizes,
    reps: int = 5,
    template: ScenarioSpec | None = None,
    cfg: RadarConfig | None = None,
    prfs=None,
    grid: GridSpec | None = None,
    rules: dict | None = None,
    workers: int = 1,
) -> ScalingReport:
    """Median-of-reps timings across strictly increasing sizes.

    Radar configuration, PRF set, interleaving capacity, and the grid stay
    fixed across sizes so only the task count scales.  Refuses to fit fewer
    than four sizes.  With ``workers`` above one, repetitions run in
    parallel processes; counters stay exact but co-scheduled timings are no
    longer exclusive, so keep workers at one for exponent measurements.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 4:
        raise ValueError("scaling runs need at least four sizes")
    if sorted(set(sizes)) != sizes:
        raise ValueError("sizes must be strictly increasing")
    if mode not in ("edbf", "sdbf"):
        raise ValueError("mode must be 'edbf' or 'sdbf'")
    template = template if template is not None else ScenarioSpec(n_tasks=0, seed=0)
    grid = grid if grid is not None else GridSpec()
    rules = dict(rules) if rules else {}

    pool = None
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        pool = ProcessPoolExecutor(max_workers=workers)
    try:
        rows = []
        for size in sizes:
            preps, scheds, totals, ops, iters, bi_max, looks = [], [], [], [], [], [], []
            specs = [
                replace(template, n_tasks=size, seed=template.seed + 1000 * rep)
                for rep in range(reps)
            ]
            jobs = [(mode, backend, spec, cfg, prfs, grid, rules) for spec in specs]
            if pool is not None:
                results = list(pool.map(_time_one_star, jobs))
            else:
                results = [_time_one(*job) for job in jobs]
            for prep_s, sched_s, counters, n_looks in results:
                preps.append(prep_s * 1e3)
                scheds.append(sched_s * 1e3)
                totals.append((prep_s + sched_s) * 1e3)
                ops.append(counters.total_backend_ops())
                iters.append(counters.bi_iterations)
                bi_max.append(counters.bi_max_iterations)
                looks.append(n_looks)
            rows.append(
                ScalingRow(
                    size=size,
                    prep_ms=statistics.median(preps),
                    sched_ms=statistics.median(scheds),
                    total_ms=statistics.median(totals),
                    backend_ops=int(statistics.median(ops)),
                    bi_iterations=int(statistics.median(iters)),
                    bi_max_iterations=max(bi_max),
                    looks=int(statistics.median(looks)),
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()

    exponent, residual = fit_complexity(
        [r.size for r in rows], [r.total_ms for r in rows]
    )
    counter_exponent, counter_residual = fit_complexity(
        [r.size for r in rows], [max(1, r.backend_ops) for r in rows]
    )
    return ScalingReport(
        mode=mode,
        backend=backend,
        rows=rows,
        exponent=exponent,
        residual=residual,
        counter_exponent=counter_exponent,
        counter_residual=counter_residual,
    )
