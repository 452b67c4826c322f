"""Liquid/social welfare and the liquid-welfare-optimal assignment.

The optimum is a maximum-weight perfect matching between players and
positions with weights ``min(ctr_j * v_i, c_i)``.  It is solved with a
shortest-augmenting-path Hungarian method (O(n^3)).  Among all optimal
assignments the lexicographically smallest ``sigma`` is returned, which
makes the result comparable one-to-one with the exhaustive oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooLarge
from .model import Assignment, Instance

__all__ = [
    "WelfareReport",
    "liquid_welfare",
    "social_welfare",
    "weight_matrix",
    "optimal_assignment",
    "optimal_assignment_bruteforce",
    "welfare_report",
    "BRUTEFORCE_MAX_N",
]

BRUTEFORCE_MAX_N = 8

# Two assignment values closer than this (relative to the largest weight) are ties.
TIE_RTOL = 1e-9


def liquid_welfare(inst: Instance, assignment: Assignment) -> float:
    """Sum over players of ``min(ctr * value, budget)`` at their assigned positions."""
    total = 0.0
    for i, j in enumerate(assignment.sigma):
        total += min(inst.ctrs[j] * inst.valuations[i], inst.budgets[i])
    return total


def social_welfare(inst: Instance, assignment: Assignment) -> float:
    total = 0.0
    for i, j in enumerate(assignment.sigma):
        total += inst.ctrs[j] * inst.valuations[i]
    return total


def weight_matrix(inst: Instance) -> np.ndarray:
    """``w[i, j]`` = capped value of player i in position j."""
    ctrs, vals, buds = inst.arrays()
    return np.minimum(vals[:, None] * ctrs[None, :], buds[:, None])


def _tie_tol(w: np.ndarray) -> float:
    return TIE_RTOL * max(1.0, float(np.max(np.abs(w))))


def _hungarian_min(cost: np.ndarray):
    """Min-cost perfect matching on a square matrix.

    Returns ``(row_to_col, u, v)`` where ``u``/``v`` are optimal dual
    potentials: ``cost[i, j] - u[i] - v[j] >= 0`` with equality on matched
    pairs.
    """
    n = cost.shape[0]
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = cost
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)  # p[j]: row matched to column j (0 = free)
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = a[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            cand = np.where(free, minv, np.inf)
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col, u[1:], v[1:]


def _lexmin_tight_matching(tight: np.ndarray, match: np.ndarray) -> list[int]:
    """Lexicographically smallest perfect matching inside the ``tight`` edge set.

    ``match`` must already be a perfect matching using tight edges only.
    Rows are fixed in order; row i moves to a smaller column j when the row
    currently holding j can be rerouted along an alternating path that ends
    in the column i gives up.
    """
    n = tight.shape[0]
    row_col = [int(x) for x in match]
    col_row = [0] * n
    for i, j in enumerate(row_col):
        col_row[j] = i
    frozen_cols: set[int] = set()

    def reroute(row: int, target: int, blocked: set[int], seen: set[int]):
        for c in range(n):
            if not tight[row, c] or c in blocked or c in seen:
                continue
            seen.add(c)
            if c == target:
                return [(row, c)]
            rest = reroute(col_row[c], target, blocked, seen)
            if rest is not None:
                return [(row, c)] + rest
        return None

    for i in range(n):
        current = row_col[i]
        for j in range(current):
            if j in frozen_cols or not tight[i, j]:
                continue
            k = col_row[j]
            path = reroute(k, current, frozen_cols | {j}, set())
            if path is None:
                continue
            row_col[i], col_row[j] = j, i
            for r, c in path:
                row_col[r], col_row[c] = c, r
            break
        frozen_cols.add(row_col[i])
    return row_col


def optimal_assignment(inst: Instance) -> tuple[Assignment, float]:
    """Assignment maximizing liquid welfare; ties go to the lexicographically smallest sigma."""
    w = weight_matrix(inst)
    n = inst.n
    # maximize w  <=>  minimize (offset - w) >= 0
    cost = float(w.max()) - w
    match, u, v = _hungarian_min(cost)
    reduced = cost - u[:, None] - v[None, :]
    tight = reduced <= _tie_tol(w) / n
    tight[np.arange(n), match] = True
    sigma = _lexmin_tight_matching(tight, match)
    a = Assignment.from_sigma(sigma)
    return a, liquid_welfare(inst, a)


def optimal_assignment_bruteforce(inst: Instance) -> tuple[Assignment, float]:
    """Exhaustive maximum over all n! assignments (n <= 8).

    Uses the same tie rule as :func:`optimal_assignment`: the first sigma in
    lexicographic order whose value is within the tie tolerance of the max.
    """
    n = inst.n
    if n > BRUTEFORCE_MAX_N:
        raise TooLarge(f"brute force limited to n <= {BRUTEFORCE_MAX_N}, got n={n}")
    w = weight_matrix(inst).tolist()
    perms = list(itertools.permutations(range(n)))
    values = []
    for sigma in perms:
        total = 0.0
        for i in range(n):
            total += w[i][sigma[i]]
        values.append(total)
    best = max(values)
    tol = _tie_tol(np.asarray(w))
    for sigma, val in zip(perms, values):
        if val >= best - tol:
            a = Assignment.from_sigma(sigma)
            return a, liquid_welfare(inst, a)
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class WelfareReport:
    lw: float
    sw: float
    opt_lw: float
    opt_assignment: Assignment

    @property
    def ratio(self) -> float:
        """``opt_lw / lw``; 1 for an optimal assignment."""
        return self.opt_lw / self.lw if self.lw > 0 else math.inf

    def to_json(self) -> dict:
        return {
            "lw": self.lw,
            "sw": self.sw,
            "opt_lw": self.opt_lw,
            "opt_sigma": list(self.opt_assignment.one_based()),
        }


def welfare_report(inst: Instance, assignment: Assignment) -> WelfareReport:
    opt, opt_lw = optimal_assignment(inst)
    return WelfareReport(liquid_welfare(inst, assignment), social_welfare(inst, assignment), opt_lw, opt)
