"""Exact unilateral deviations.

GSP/VCG
    With the opponents' bids fixed, the rank a bid lands on determines the
    deviator's payment completely: it only involves the bids ranked below
    the deviator.  So the utility of every bid in the interval of bids that reach rank
    r is the same number, and a best response is found by scanning the n
    ranks.  The interval is bounded by the opponents ranked r and r-1 (after
    removing the deviator), with each end open or closed according to the
    lower-index tie-break.  A rank is *feasible* when the interval contains a
    bid that respects no-over at that rank.

EGFP
    A deviator who wins position j must lose positions 1..j-1, so the
    opponents' winners there are the same whatever the deviator bids for
    them, and bids for lost positions change nothing.  Hence bidding only for
    j (and 0 elsewhere) reaches every (position, payment) pair any deviation
    can.  The price of position j is the best remaining opponent bid t_j;
    when the tie-break goes against the deviator the bid must be strictly
    higher, so the
    reported utility is a supremum.  A target is unreachable when, at an
    earlier step, every remaining opponent bids 0 and the deviator wins the
    tie even with a zero bid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..mechanisms import (
    FEASIBILITY_RTOL,
    Mechanism,
    _matrix,
    _scalar,
    gsp_rank_payment,
    no_over_limit,
    outcome,
    rank_utility,
    relaxed,
    vcg_rank_payment,
)
from ..model import Instance

__all__ = [
    "DeviationReport",
    "candidate_deviations_scalar",
    "candidate_deviations_egfp",
    "candidate_deviations",
    "best_deviation",
    "utility_gain",
]


def utility_gain(new: float, old: float) -> float:
    """``new - old`` on the extended reals, with ``-inf - -inf`` taken as 0."""
    if new == old:
        return 0.0
    return new - old


@dataclass(frozen=True)
class DeviationReport:
    """One targeted deviation of ``player`` to rank/position ``target`` (both 0-based).

    ``required_bid`` is the infimum bid reaching the target; ``strict`` says
    the deviator has to bid strictly above it.  ``witness`` is a concrete
    scalar bid attaining the target (GSP/VCG, feasible targets only).
    """

    player: int
    target: int
    required_bid: float
    strict: bool
    deviation_utility: float
    gain: float
    feasible: bool
    witness: Optional[float] = None

    def to_json(self) -> dict:
        def num(x):
            if x is None or math.isfinite(x):
                return x
            return "inf" if x > 0 else "-inf"

        return {
            "player": self.player + 1,
            "target": self.target + 1,
            "required_bid": num(self.required_bid),
            "strict": self.strict,
            "deviation_utility": num(self.deviation_utility),
            "gain": num(self.gain),
            "feasible": self.feasible,
            "witness": num(self.witness),
        }


def candidate_deviations_scalar(mech, inst: Instance, bids, player: int,
                                rtol: float = FEASIBILITY_RTOL) -> list[DeviationReport]:
    """One report per target rank for ``player`` under GSP or VCG."""
    mech = Mechanism.parse(mech)
    if not mech.scalar:
        raise ValueError("candidate_deviations_scalar handles GSP and VCG only")
    b = _scalar(bids)
    current = outcome(mech, inst, b, rtol).utilities[player]
    n = inst.n
    ctrs = inst.ctrs
    v, c = inst.valuations[player], inst.budgets[player]

    opponents = sorted((k for k in range(n) if k != player), key=lambda k: (-b[k], k))
    opp_bids = [b[k] for k in opponents]

    reports = []
    for r in range(n):
        if r < n - 1:
            lo, lo_closed = opp_bids[r], player < opponents[r]
        else:
            lo, lo_closed = 0.0, True
        if r > 0:
            hi, hi_closed = opp_bids[r - 1], opponents[r - 1] < player
        else:
            hi, hi_closed = math.inf, False
        nonempty = lo < hi or (lo == hi and lo_closed and hi_closed)
        limit = no_over_limit(ctrs[r], v, c, rtol)
        fits = ctrs[r] * lo <= limit if lo_closed else ctrs[r] * lo < limit
        feasible = nonempty and fits

        if mech is Mechanism.GSP:
            pay = gsp_rank_payment(ctrs, r, lo)
        else:
            pay = vcg_rank_payment(ctrs, r, opp_bids[r:])
        util = rank_utility(ctrs[r], v, pay, c, rtol)

        witness = None
        if feasible:
            if lo_closed:
                witness = lo
            else:
                top = min(hi, v, c / ctrs[r])
                mid = (lo + top) / 2
                witness = mid if mid > lo else math.nextafter(lo, math.inf)
        reports.append(DeviationReport(
            player=player, target=r, required_bid=lo, strict=not lo_closed,
            deviation_utility=util, gain=utility_gain(util, current),
            feasible=feasible, witness=witness,
        ))
    return reports


def candidate_deviations_egfp(inst: Instance, bids, player: int,
                              rtol: float = FEASIBILITY_RTOL) -> list[DeviationReport]:
    """One single-position deviation report per target position for ``player``."""
    b = _matrix(bids)
    current = outcome(Mechanism.EGFP, inst, b, rtol).utilities[player]
    n = inst.n
    v, c = inst.valuations[player], inst.budgets[player]
    cap = relaxed(c, rtol)

    remaining = [k for k in range(n) if k != player]
    reachable = True
    reports = []
    for j in range(n):
        if remaining:
            winner = max(remaining, key=lambda k: (b[k][j], -k))
            price, closed = b[winner][j], player < winner
        else:
            winner, price, closed = None, 0.0, True
        affordable = price <= cap if closed else price < cap
        feasible = reachable and affordable
        util = inst.ctrs[j] * v - price if affordable else -math.inf
        reports.append(DeviationReport(
            player=player, target=j, required_bid=price, strict=not closed,
            deviation_utility=util if reachable else -math.inf,
            gain=utility_gain(util if reachable else -math.inf, current),
            feasible=feasible,
        ))
        if winner is not None:
            # a zero bid would already win position j
            if price == 0.0 and closed:
                reachable = False
            remaining.remove(winner)
    return reports


def candidate_deviations(mech, inst: Instance, bids, player: int,
                         rtol: float = FEASIBILITY_RTOL) -> list[DeviationReport]:
    mech = Mechanism.parse(mech)
    if mech.scalar:
        return candidate_deviations_scalar(mech, inst, bids, player, rtol)
    return candidate_deviations_egfp(inst, bids, player, rtol)


def best_deviation(reports: list[DeviationReport]) -> Optional[DeviationReport]:
    """Feasible report with the largest gain (lowest target on ties), or None."""
    best = None
    for rep in reports:
        if rep.feasible and (best is None or rep.gain > best.gain):
            best = rep
    return best
