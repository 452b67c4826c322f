"""Finite strategy grids used for equilibrium enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..model import Instance

__all__ = ["GridSpec", "scalar_levels", "egfp_strategies", "egfp_thresholds"]


@dataclass(frozen=True)
class GridSpec:
    """``levels_per_player`` evenly spaced bid levels, plus the instance's cap levels."""

    levels_per_player: int = 20
    theta: Optional[float] = None

    def __post_init__(self):
        if int(self.levels_per_player) < 2:
            raise ValueError("levels_per_player must be at least 2")
        object.__setattr__(self, "levels_per_player", int(self.levels_per_player))
        if self.theta is not None and self.theta < 0:
            raise ValueError("theta must be non-negative")

    def to_json(self) -> dict:
        return {"levels_per_player": self.levels_per_player, "theta": self.theta}

    @classmethod
    def from_json(cls, data: dict) -> "GridSpec":
        return cls(data["levels_per_player"], data.get("theta"))


def scalar_levels(inst: Instance, player: int, m: int) -> np.ndarray:
    """Bid levels for ``player`` under GSP/VCG.

    ``m`` points spanning ``[0, min(v, c / ctr_1)]`` (bids no-over compliant at
    every position), joined with every player's per-position cap
    ``min(v_k, c_k / ctr_j)`` that ``player`` could bid at some position.
    """
    ctrs, vals, buds = inst.arrays()
    v, c = vals[player], buds[player]
    top = min(v, c / ctrs[0])
    ceiling = min(v, c / ctrs[-1])
    caps = np.minimum(vals[:, None], buds[:, None] / ctrs[None, :]).ravel()
    levels = np.concatenate([np.linspace(0.0, top, m), caps[caps <= ceiling]])
    return np.unique(levels)


def egfp_thresholds(inst: Instance, position: int, theta: float = 0.0) -> np.ndarray:
    """Bids for ``position`` at which some player's best response can switch.

    For every player k: the value ``ctr_j * v_k``, the budget ``c_k`` and the
    marginal values ``(ctr_j - ctr_l) * v_k`` over each later position l.
    With ``theta > 0`` each level is repeated ``theta / 2`` higher, which is
    what a player losing the tie-break must pay to win at that price.
    """
    ctrs, vals, buds = inst.arrays()
    j = position
    parts = [ctrs[j] * vals, buds]
    for later in range(j + 1, inst.n):
        parts.append((ctrs[j] - ctrs[later]) * vals)
    levels = np.concatenate(parts)
    if theta > 0:
        levels = np.concatenate([levels, levels + theta / 2])
    return levels[levels > 0]


def egfp_strategies(inst: Instance, player: int, m: int, theta: float = 0.0) -> np.ndarray:
    """EGFP bid vectors for ``player`` with at most one positive entry.

    For position j the positive levels are ``m - 1`` evenly spaced points in
    ``(0, min(ctr_j * v, c)]`` plus :func:`egfp_thresholds`.  Row 0 is the
    all-zero vector.
    """
    ctrs, vals, buds = inst.arrays()
    n = inst.n
    v, c = vals[player], buds[player]
    rows = [np.zeros(n)]
    for j in range(n):
        own = np.linspace(0.0, min(ctrs[j] * v, c), m)[1:]
        levels = np.unique(np.concatenate([own, egfp_thresholds(inst, j, theta)]))
        block = np.zeros((len(levels), n))
        block[:, j] = levels
        rows.append(block)
    return np.vstack(rows)
