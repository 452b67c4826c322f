"""Allocation, payment and utility rules for GSP, VCG and EGFP.

Payments are totals (CTR times per-click price), since budgets cap totals.
A player whose payment exceeds their budget gets utility ``-inf``.

The small rank-level helpers (:func:`gsp_rank_payment`,
:func:`vcg_rank_payment`, :func:`rank_utility`) are shared with the
equilibrium code so that a player's current utility and the utility of a
deviation to the same rank come out bit-identical.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Sequence

import numpy as np

from .errors import LengthMismatch, ProfileShapeMismatch
from .model import (
    Assignment,
    Instance,
    MatrixBidProfile,
    Outcome,
    ScalarBidProfile,
    as_matrix_profile,
    as_scalar_profile,
    rank_by_bids,
)

__all__ = [
    "Mechanism",
    "FEASIBILITY_RTOL",
    "gsp_outcome",
    "vcg_outcome",
    "egfp_outcome",
    "outcome",
    "check_no_over",
    "gsp_click_prices",
]

# Relative slack on "payment <= budget" and on the no-over inequality; absorbs
# rounding in the VCG sum.
FEASIBILITY_RTOL = 1e-12


class Mechanism(str, enum.Enum):
    GSP = "GSP"
    VCG = "VCG"
    EGFP = "EGFP"

    @property
    def scalar(self) -> bool:
        return self is not Mechanism.EGFP

    @classmethod
    def parse(cls, name) -> "Mechanism":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValueError(f"unknown mechanism {name!r}; expected one of GSP, VCG, EGFP") from None

    def __str__(self) -> str:
        return self.value


def relaxed(limit: float, rtol: float = FEASIBILITY_RTOL) -> float:
    """``limit`` widened by the feasibility tolerance."""
    return limit + rtol * abs(limit)


def no_over_limit(alpha: float, value: float, budget: float, rtol: float = FEASIBILITY_RTOL) -> float:
    """Largest admissible total ``alpha * bid`` at a position with CTR ``alpha``."""
    return relaxed(min(alpha * value, budget), rtol)


def gsp_rank_payment(ctrs: Sequence[float], r: int, next_bid: float) -> float:
    return ctrs[r] * next_bid


def vcg_rank_payment(ctrs: Sequence[float], r: int, below: Sequence[float]) -> float:
    """Clarke payment at rank ``r``; ``below[k]`` is the bid ranked at ``r + 1 + k``."""
    pay = 0.0
    for k, b in enumerate(below):
        pay = pay + b * (ctrs[r + k] - ctrs[r + k + 1])
    return pay


def rank_utility(alpha: float, value: float, payment: float, budget: float,
                 rtol: float = FEASIBILITY_RTOL) -> float:
    if payment > relaxed(budget, rtol):
        return -math.inf
    return alpha * value - payment


def _check_len(inst: Instance, n: int) -> None:
    if n != inst.n:
        raise LengthMismatch(f"profile has {n} players but the instance has {inst.n}")


def _ndim(bids) -> int:
    try:
        return int(np.ndim(bids))
    except ValueError:  # ragged nesting
        return 2


def _scalar(bids) -> ScalarBidProfile:
    if isinstance(bids, MatrixBidProfile) or (
        not isinstance(bids, ScalarBidProfile) and _ndim(bids) != 1
    ):
        raise ProfileShapeMismatch("GSP/VCG take one scalar bid per player, got a bid matrix")
    return as_scalar_profile(bids)


def _matrix(bids) -> MatrixBidProfile:
    if isinstance(bids, ScalarBidProfile) or (
        not isinstance(bids, MatrixBidProfile) and _ndim(bids) != 2
    ):
        raise ProfileShapeMismatch("EGFP takes a bid vector per player, got scalar bids")
    return as_matrix_profile(bids)


def _finish(inst: Instance, assignment: Assignment, payments: list[float], rtol: float) -> Outcome:
    utils = [
        rank_utility(inst.ctrs[assignment.sigma[i]], inst.valuations[i], payments[i], inst.budgets[i], rtol)
        for i in range(inst.n)
    ]
    return Outcome(assignment, tuple(payments), tuple(utils))


def gsp_outcome(inst: Instance, bids, rtol: float = FEASIBILITY_RTOL) -> Outcome:
    """Rank by bid; the player at rank r pays ``ctrs[r]`` times the bid ranked just below."""
    b = _scalar(bids)
    _check_len(inst, b.n)
    a = rank_by_bids(b)
    n = inst.n
    payments = [0.0] * n
    for r, i in enumerate(a.pi):
        nxt = b[a.pi[r + 1]] if r + 1 < n else 0.0
        payments[i] = gsp_rank_payment(inst.ctrs, r, nxt)
    return _finish(inst, a, payments, rtol)


def vcg_outcome(inst: Instance, bids, rtol: float = FEASIBILITY_RTOL) -> Outcome:
    """Rank by bid; each player pays the welfare loss imposed on the players below."""
    b = _scalar(bids)
    _check_len(inst, b.n)
    a = rank_by_bids(b)
    sorted_bids = [b[i] for i in a.pi]
    payments = [0.0] * inst.n
    for r, i in enumerate(a.pi):
        payments[i] = vcg_rank_payment(inst.ctrs, r, sorted_bids[r + 1:])
    return _finish(inst, a, payments, rtol)


def egfp_outcome(inst: Instance, bids, rtol: float = FEASIBILITY_RTOL) -> Outcome:
    """Sequential first-price allocation of positions 1..n.

    Position j goes to the unassigned player with the highest bid for j
    (lowest index on ties), who pays that bid.
    """
    b = _matrix(bids)
    _check_len(inst, b.n)
    n = inst.n
    remaining = list(range(n))
    pi = []
    payments = [0.0] * n
    for j in range(n):
        winner = max(remaining, key=lambda i: (b[i][j], -i))
        remaining.remove(winner)
        pi.append(winner)
        payments[winner] = b[winner][j]
    return _finish(inst, Assignment.from_pi(pi), payments, rtol)


def outcome(mech, inst: Instance, bids, rtol: float = FEASIBILITY_RTOL) -> Outcome:
    mech = Mechanism.parse(mech)
    if mech is Mechanism.GSP:
        return gsp_outcome(inst, bids, rtol)
    if mech is Mechanism.VCG:
        return vcg_outcome(inst, bids, rtol)
    return egfp_outcome(inst, bids, rtol)


def check_no_over(inst: Instance, bids, rtol: float = FEASIBILITY_RTOL) -> tuple[bool, ...]:
    """Per-player test of ``ctr * bid <= min(ctr * value, budget)`` at the induced positions.

    Advisory only: non-compliant profiles still evaluate under every mechanism.
    """
    b = _scalar(bids)
    _check_len(inst, b.n)
    a = rank_by_bids(b)
    flags = []
    for i in range(inst.n):
        alpha = inst.ctrs[a.sigma[i]]
        flags.append(alpha * b[i] <= no_over_limit(alpha, inst.valuations[i], inst.budgets[i], rtol))
    return tuple(flags)


def gsp_click_prices(inst: Instance, bids) -> tuple[float, ...]:
    """Per-click GSP price of every player (the next-highest bid, 0 for the last rank)."""
    b = _scalar(bids)
    _check_len(inst, b.n)
    a = rank_by_bids(b)
    prices = [0.0] * inst.n
    for r, i in enumerate(a.pi[:-1]):
        prices[i] = b[a.pi[r + 1]]
    return tuple(prices)
