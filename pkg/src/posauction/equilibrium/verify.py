"""Pure-Nash (or theta-Nash) verification of a single bid profile."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..errors import ProfileNotNoOverCompliant
from ..mechanisms import (
    FEASIBILITY_RTOL,
    Mechanism,
    _matrix,
    _scalar,
    check_no_over,
    outcome,
)
from ..model import Instance, MatrixBidProfile, Outcome, ScalarBidProfile
from ..welfare import liquid_welfare
from .deviations import DeviationReport, best_deviation, candidate_deviations

__all__ = [
    "EquilibriumReport",
    "verify_equilibrium",
    "default_theta",
    "gain_accepted",
    "GAIN_RTOL",
    "EGFP_DEFAULT_THETA",
]

# First-price payments make EGFP best responses suprema, so EGFP is checked as
# a theta-equilibrium.
EGFP_DEFAULT_THETA = 1e-9

# Rounding slack on the gain test, relative to the size of the utilities.
GAIN_RTOL = 1e-12


def default_theta(mech) -> float:
    return 0.0 if Mechanism.parse(mech).scalar else EGFP_DEFAULT_THETA


def gain_accepted(gain: float, theta: float, scale: float) -> bool:
    """True when a deviation gain does not break a theta-equilibrium."""
    scale = abs(scale) if math.isfinite(scale) else 1.0
    return gain <= theta + GAIN_RTOL * max(1.0, scale)


def _json_num(x: float):
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


@dataclass(frozen=True)
class EquilibriumReport:
    mechanism: Mechanism
    profile: ScalarBidProfile | MatrixBidProfile
    outcome: Outcome
    is_equilibrium: bool
    theta: float
    best_deviations: tuple[Optional[DeviationReport], ...]
    lw: float

    @property
    def max_gain(self) -> float:
        gains = [d.gain for d in self.best_deviations if d is not None]
        return max(gains) if gains else -math.inf

    @property
    def violators(self) -> list[int]:
        return [
            d.player for d in self.best_deviations
            if d is not None and not gain_accepted(d.gain, self.theta, self.outcome.utilities[d.player])
        ]

    def to_json(self) -> dict:
        return {
            "mechanism": self.mechanism.value,
            "profile": self.profile.to_json(),
            "is_equilibrium": self.is_equilibrium,
            "theta": self.theta,
            "lw": self.lw,
            "max_gain": _json_num(self.max_gain),
            **self.outcome.to_json(),
            "best_deviations": [d.to_json() if d else None for d in self.best_deviations],
        }


def verify_equilibrium(mech, inst: Instance, bids, theta: Optional[float] = None,
                       rtol: float = FEASIBILITY_RTOL) -> EquilibriumReport:
    """Check every player's exact best deviation against the profile.

    GSP/VCG profiles must satisfy no-over for all players (the strategy space
    of the game); deviations that would break no-over are not available.
    ``theta`` defaults to 0 for GSP/VCG and :data:`EGFP_DEFAULT_THETA` for EGFP.
    """
    mech = Mechanism.parse(mech)
    if theta is None:
        theta = default_theta(mech)
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if mech.scalar:
        bids = _scalar(bids)
        flags = check_no_over(inst, bids, rtol)
        if not all(flags):
            bad = ", ".join(str(i + 1) for i, ok in enumerate(flags) if not ok)
            raise ProfileNotNoOverCompliant(f"no-over violated by player(s) {bad}")
    else:
        bids = _matrix(bids)

    out = outcome(mech, inst, bids, rtol)
    best = []
    ok = True
    for i in range(inst.n):
        dev = best_deviation(candidate_deviations(mech, inst, bids, i, rtol))
        best.append(dev)
        if dev is not None and not gain_accepted(dev.gain, theta, out.utilities[i]):
            ok = False
    return EquilibriumReport(
        mechanism=mech, profile=bids, outcome=out, is_equilibrium=ok,
        theta=theta, best_deviations=tuple(best), lw=liquid_welfare(inst, out.assignment),
    )
