"""Grid enumeration of equilibria and empirical LPoA / LPoS.

Only the candidate profiles come from a grid.  Each one is judged against
exact best responses over the continuous bid space, so everything reported
is a genuine (theta-)equilibrium of the game.  The grid can miss equilibria,
so a reported LPoA is a lower bound on the game's value and a reported LPoS
an upper bound.
"""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np

from ..errors import NoEquilibriumFound, TooLarge
from ..mechanisms import FEASIBILITY_RTOL, Mechanism
from ..model import Assignment, Instance, MatrixBidProfile, ScalarBidProfile
from ..welfare import optimal_assignment
from .grid import GridSpec, egfp_strategies, scalar_levels
from .kernels import egfp_block, scalar_block
from .verify import EquilibriumReport, default_theta, verify_equilibrium

__all__ = [
    "EquilibriumScan",
    "LpoaReport",
    "scan_equilibria",
    "enumerate_equilibria",
    "lpoa_report",
    "write_equilibria_jsonl",
    "write_equilibria_csv",
    "MAX_SCALAR_N",
    "MAX_EGFP_N",
    "GRID_CAVEAT",
]

log = logging.getLogger(__name__)

MAX_SCALAR_N = 4
MAX_EGFP_N = 3
BLOCK_PROFILES = 100_000

GRID_CAVEAT = (
    "equilibria were searched on a finite grid; lpoa is a lower bound and "
    "lpos an upper bound on the values of the continuous game"
)


def default_jobs() -> int:
    env = os.environ.get("POSAUCTION_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EquilibriumScan:
    """Array-level result of a grid scan: one row per equilibrium found."""

    mechanism: Mechanism
    instance: Instance
    grid: GridSpec
    theta: float
    profiles: np.ndarray
    sigma: np.ndarray
    utilities: np.ndarray
    payments: np.ndarray
    lw: np.ndarray
    scanned: int

    def __len__(self) -> int:
        return len(self.lw)

    def profile(self, k: int) -> ScalarBidProfile | MatrixBidProfile:
        if self.mechanism.scalar:
            return ScalarBidProfile(self.profiles[k].tolist())
        return MatrixBidProfile(self.profiles[k].tolist())

    def assignments(self) -> set[tuple[int, ...]]:
        """Distinct 0-based sigmas among the equilibria."""
        return {tuple(int(x) for x in row) for row in self.sigma}


def _check_size(mech: Mechanism, n: int) -> None:
    limit = MAX_SCALAR_N if mech.scalar else MAX_EGFP_N
    if n > limit:
        raise TooLarge(f"{mech.value} enumeration supports n <= {limit}, got n={n}")


def _chunks(sizes: list[int]) -> list[tuple[int, int]]:
    rest = int(np.prod(sizes[1:])) if len(sizes) > 1 else 1
    step = max(1, BLOCK_PROFILES // max(rest, 1))
    return [(s, min(s + step, sizes[0])) for s in range(0, sizes[0], step)]


def _scan_chunk(mech_value: str, ctrs, vals, buds, axes, start, stop, theta, rtol):
    """Evaluate the product block where player 0 is restricted to ``axes[0][start:stop]``."""
    axes = [axes[0][start:stop]] + list(axes[1:])
    if mech_value == Mechanism.EGFP.value:
        idx = np.meshgrid(*[np.arange(len(a)) for a in axes], indexing="ij")
        B = np.stack([a[ix.ravel()] for a, ix in zip(axes, idx)], axis=1)
        is_eq, sigma, util, pay = egfp_block(ctrs, vals, buds, B, theta, rtol)
        P = B
    else:
        grids = np.meshgrid(*axes, indexing="ij")
        P = np.stack([g.ravel() for g in grids], axis=1)
        is_eq, sigma, util, pay = scalar_block(mech_value == Mechanism.GSP.value,
                                               ctrs, vals, buds, P, theta, rtol)
    return P[is_eq], sigma[is_eq], util[is_eq], pay[is_eq], len(P)


def scan_equilibria(mech, inst: Instance, grid: GridSpec, theta: Optional[float] = None,
                    jobs: int = 1, rtol: float = FEASIBILITY_RTOL) -> EquilibriumScan:
    """Scan every grid profile and keep the exact (theta-)equilibria.

    GSP/VCG: the product of :func:`.grid.scalar_levels` over players, minus
    profiles breaking no-over.  EGFP: the product of
    :func:`.grid.egfp_strategies`.  The product space is cut along player 1's
    levels into blocks; with ``jobs > 1`` the blocks run in worker processes.
    """
    mech = Mechanism.parse(mech)
    _check_size(mech, inst.n)
    if theta is None:
        theta = grid.theta if grid.theta is not None else default_theta(mech)
    m = grid.levels_per_player
    if mech.scalar:
        axes = [scalar_levels(inst, i, m) for i in range(inst.n)]
    else:
        axes = [egfp_strategies(inst, i, m, theta) for i in range(inst.n)]
    ctrs, vals, buds = inst.arrays()
    chunks = _chunks([len(a) for a in axes])
    args = [(mech.value, ctrs, vals, buds, axes, s, e, theta, rtol) for s, e in chunks]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(chunks))) as pool:
            parts = list(pool.map(_scan_chunk, *zip(*args)))
    else:
        parts = [_scan_chunk(*a) for a in args]

    profiles = np.concatenate([p[0] for p in parts])
    sigma = np.concatenate([p[1] for p in parts])
    util = np.concatenate([p[2] for p in parts])
    pay = np.concatenate([p[3] for p in parts])
    scanned = sum(p[4] for p in parts)

    # same accumulation order as welfare.liquid_welfare
    lw = np.zeros(len(sigma))
    for i in range(inst.n):
        lw = lw + np.minimum(ctrs[sigma[:, i]] * vals[i], buds[i])
    return EquilibriumScan(mech, inst, grid, theta, profiles, sigma, util, pay, lw, scanned)


def enumerate_equilibria(mech, inst: Instance, grid: GridSpec, theta: Optional[float] = None,
                         jobs: int = 1, rtol: float = FEASIBILITY_RTOL) -> list[EquilibriumReport]:
    """Grid equilibria as full reports, each re-checked by :func:`verify_equilibrium`."""
    scan = scan_equilibria(mech, inst, grid, theta, jobs, rtol)
    reports = []
    for k in range(len(scan)):
        rep = verify_equilibrium(scan.mechanism, inst, scan.profile(k), scan.theta, rtol)
        if rep.is_equilibrium:
            reports.append(rep)
        else:
            log.warning("scan kept profile %s but verification rejected it", scan.profile(k).to_json())
    return reports


@dataclass(frozen=True)
class LpoaReport:
    mechanism: Mechanism
    opt_lw: float
    opt_assignment: Assignment
    min_eq_lw: float
    max_eq_lw: float
    equilibria_found: int
    profiles_scanned: int
    grid: GridSpec
    theta: float
    worst_profile: list = field(default_factory=list)
    best_profile: list = field(default_factory=list)
    eq_assignments: tuple = ()

    @property
    def lpoa(self) -> float:
        return self.opt_lw / self.min_eq_lw

    @property
    def lpos(self) -> float:
        return self.opt_lw / self.max_eq_lw

    def to_json(self) -> dict:
        return {
            "mechanism": self.mechanism.value,
            "opt_lw": self.opt_lw,
            "opt_sigma": list(self.opt_assignment.one_based()),
            "min_eq_lw": self.min_eq_lw,
            "max_eq_lw": self.max_eq_lw,
            "lpoa": self.lpoa,
            "lpos": self.lpos,
            "equilibria_found": self.equilibria_found,
            "profiles_scanned": self.profiles_scanned,
            "eq_sigmas": [[j + 1 for j in s] for s in self.eq_assignments],
            "worst_profile": self.worst_profile,
            "best_profile": self.best_profile,
            "grid": self.grid.to_json(),
            "theta": self.theta,
            "caveat": GRID_CAVEAT,
        }


def report_from_scan(scan: EquilibriumScan) -> LpoaReport:
    if len(scan) == 0:
        raise NoEquilibriumFound(
            f"no {scan.mechanism.value} equilibrium on a grid of "
            f"{scan.grid.levels_per_player} levels ({scan.scanned} profiles scanned)"
        )
    opt, opt_lw = optimal_assignment(scan.instance)
    lo, hi = int(np.argmin(scan.lw)), int(np.argmax(scan.lw))
    return LpoaReport(
        mechanism=scan.mechanism,
        opt_lw=opt_lw,
        opt_assignment=opt,
        min_eq_lw=float(scan.lw[lo]),
        max_eq_lw=float(scan.lw[hi]),
        equilibria_found=len(scan),
        profiles_scanned=scan.scanned,
        grid=scan.grid,
        theta=scan.theta,
        worst_profile=scan.profiles[lo].tolist(),
        best_profile=scan.profiles[hi].tolist(),
        eq_assignments=tuple(sorted(scan.assignments())),
    )


def lpoa_report(mech, inst: Instance, grid: GridSpec, theta: Optional[float] = None,
                jobs: int = 1, rtol: float = FEASIBILITY_RTOL) -> LpoaReport:
    """Optimal liquid welfare over the worst and best equilibrium found on the grid."""
    return report_from_scan(scan_equilibria(mech, inst, grid, theta, jobs, rtol))


def write_equilibria_jsonl(reports: Iterable[EquilibriumReport], fp: IO[str]) -> int:
    count = 0
    for rep in reports:
        fp.write(json.dumps(rep.to_json()) + "\n")
        count += 1
    return count


def write_equilibria_csv(reports: Iterable[EquilibriumReport], fp: IO[str]) -> int:
    """Columns ``profile, lw, is_eq``; the profile cell holds the bids as JSON."""
    writer = csv.writer(fp)
    writer.writerow(["profile", "lw", "is_eq"])
    count = 0
    for rep in reports:
        writer.writerow([json.dumps(rep.profile.to_json()), repr(rep.lw), int(rep.is_equilibrium)])
        count += 1
    return count
