"""Scanning-plane geometry for subarray-level beamforming.

Targets are projected onto the normalized scanning plane (the unit disk of
direction cosines).  For each PRF, every grid point within the re-steering
radius of some trackable target becomes the center of a candidate disk; the
tasks enclosed by a disk may share an interleaved look.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InternalInvariantError, ScenarioError
from .radar import AvailabilityTable

# Worst-case grid points per task within radius r on an eps-grid is below
# pi*(r/eps + sqrt(2)/2)^2 <= 4*pi*(r/eps)^2 whenever eps <= r.
DISK_DENSITY_BOUND = 4.0 * math.pi


def project_to_scan_plane(azimuth: float, elevation: float) -> tuple[float, float]:
    """Project a front-hemisphere direction to direction cosines (u, v)."""
    if math.cos(elevation) * math.cos(azimuth) < 0.0:
        raise ScenarioError("direction lies in the rear hemisphere")
    u = math.cos(elevation) * math.sin(azimuth)
    v = math.sin(elevation)
    return (u, v)


@dataclass(frozen=True)
class GridSpec:
    """Grid spacing and re-steering disk radius, in direction-cosine units."""

    spacing: float = 0.02
    disk_radius: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.spacing <= self.disk_radius:
            raise ScenarioError("grid spacing must satisfy 0 < spacing <= disk_radius")
        if self.disk_radius >= 1.0:
            raise ScenarioError("disk radius must be below 1")


@dataclass
class Disk:
    """A grid-centered re-steering region and the task ids it encloses."""

    id: int
    prf_index: int
    gu: int                  # grid column index; center u = gu * spacing
    gv: int                  # grid row index; center v = gv * spacing
    tasks: list[int] = field(default_factory=list)
    weight: float = 0.0      # sum of 1/|available disks| over enclosed tasks

    def center(self, grid: GridSpec) -> tuple[float, float]:
        return (self.gu * grid.spacing, self.gv * grid.spacing)

    @property
    def cardinality(self) -> int:
        return len(self.tasks)


@dataclass
class DiskCatalog:
    """All candidate disks for all PRFs plus the per-task disk index.

    ``task_disks[task_id]`` lists the disk ids enclosing the task (its
    available-disk set); ``q_d`` is the total membership count.  The catalog
    is immutable once built; schedulers track consumption in their own
    structures.
    """

    grid: GridSpec
    table: AvailabilityTable
    disks: list[Disk]
    by_prf: list[list[int]]
    task_disks: dict[int, list[int]]

    @property
    def n_disks(self) -> int:
        return len(self.disks)

    def n_disks_for_prf(self, prf_index: int) -> int:
        return len(self.by_prf[prf_index])

    @property
    def q_d(self) -> int:
        return sum(len(d.tasks) for d in self.disks)

    def center(self, disk_id: int) -> tuple[float, float]:
        return self.disks[disk_id].center(self.grid)


def _grid_candidates(u: float, v: float, grid: GridSpec):
    """Integer grid points within disk_radius of (u, v).

    The integer box is padded by one cell and filtered with the exact
    Euclidean predicate, so float edge cases resolve identically everywhere.
    """
    eps, r = grid.spacing, grid.disk_radius
    r2 = r * r
    lo_u = math.floor((u - r) / eps) - 1
    hi_u = math.ceil((u + r) / eps) + 1
    lo_v = math.floor((v - r) / eps) - 1
    hi_v = math.ceil((v + r) / eps) + 1
    for gu in range(lo_u, hi_u + 1):
        du = gu * eps - u
        for gv in range(lo_v, hi_v + 1):
            dv = gv * eps - v
            if du * du + dv * dv <= r2:
                yield (gu, gv)


def enumerate_disks(table: AvailabilityTable, grid: GridSpec) -> DiskCatalog:
    """Build the disk catalog: per PRF, per trackable task, all enclosing
    grid points become disk centers and accumulate the task in their list.

    Every disk is nonempty by construction and no two disks share
    (PRF, center).  Disk ids are assigned in (PRF, first-touch) order, which
    is deterministic for a fixed table.
    """
    disks: list[Disk] = []
    by_prf: list[list[int]] = []
    task_disks: dict[int, list[int]] = {t.id: [] for t in table.tasks}
    for p in range(table.n_prfs):
        index: dict[tuple[int, int], int] = {}
        prf_disks: list[int] = []
        for row in table.task_sets[p]:
            task = table.tasks[row]
            tid = task.id
            for cell in _grid_candidates(task.u, task.v, grid):
                did = index.get(cell)
                if did is None:
                    did = len(disks)
                    index[cell] = did
                    disks.append(Disk(id=did, prf_index=p, gu=cell[0], gv=cell[1]))
                    prf_disks.append(did)
                disks[did].tasks.append(tid)
                task_disks[tid].append(did)
        by_prf.append(prf_disks)

    for disk in disks:
        disk.weight = sum(1.0 / len(task_disks[t]) for t in disk.tasks)

    catalog = DiskCatalog(
        grid=grid, table=table, disks=disks, by_prf=by_prf, task_disks=task_disks
    )
    _check_density_bound(catalog)
    return catalog


def _check_density_bound(catalog: DiskCatalog) -> None:
    ratio = catalog.grid.disk_radius / catalog.grid.spacing
    cap_per_task = DISK_DENSITY_BOUND * ratio * ratio
    for p, disk_ids in enumerate(catalog.by_prf):
        n_tasks = len(catalog.table.task_sets[p])
        if len(disk_ids) > cap_per_task * max(1, n_tasks):
            raise InternalInvariantError(
                f"disk count for PRF {p} exceeds the density bound"
            )


def dedup_disks(catalog: DiskCatalog) -> DiskCatalog:
    """Drop disks whose task list duplicates or is contained in another
    disk's list for the same PRF.  Exact-solver and export path only; the
    heuristics work on the full catalog.

    Among equal task lists the lowest disk id survives.  Survivors are
    renumbered contiguously in original-id order and membership indexes are
    rebuilt.
    """
    keep: list[Disk] = []
    for p, disk_ids in enumerate(catalog.by_prf):
        sets = {d: frozenset(catalog.disks[d].tasks) for d in disk_ids}
        ordered = sorted(disk_ids, key=lambda d: (-len(sets[d]), d))
        kept_sets: list[tuple[int, frozenset]] = []
        for d in ordered:
            s = sets[d]
            if any(s <= ks for _, ks in kept_sets):
                continue
            kept_sets.append((d, s))
        keep.extend(catalog.disks[d] for d, _ in sorted(kept_sets))

    keep.sort(key=lambda d: d.id)
    by_prf = [[] for _ in range(catalog.table.n_prfs)]
    task_disks: dict[int, list[int]] = {t.id: [] for t in catalog.table.tasks}
    disks: list[Disk] = []
    id_map = {}
    for disk in keep:
        id_map[disk.id] = len(disks)
        renumbered = Disk(
            id=len(disks),
            prf_index=disk.prf_index,
            gu=disk.gu,
            gv=disk.gv,
            tasks=list(disk.tasks),
            weight=disk.weight,
        )
        disks.append(renumbered)
        by_prf[disk.prf_index].append(renumbered.id)
        for t in renumbered.tasks:
            task_disks[t].append(renumbered.id)
    return DiskCatalog(
        grid=catalog.grid,
        table=catalog.table,
        disks=disks,
        by_prf=by_prf,
        task_disks=task_disks,
    )
