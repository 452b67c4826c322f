"""Core value types: instances, bid profiles, assignments and outcomes.

Players and positions are 0-indexed everywhere in the library.  Anything
printed for a human (CLI tables, JSON exports) is shifted to 1-indexing by
the caller through :meth:`Assignment.one_based`.
"""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    CtrsNotSorted,
    InvalidProfile,
    LengthMismatch,
    NonPositiveEntry,
    ValidationError,
)

__all__ = [
    "Instance",
    "ScalarBidProfile",
    "MatrixBidProfile",
    "Assignment",
    "Outcome",
    "validate_instance",
    "rank_by_bids",
    "as_scalar_profile",
    "as_matrix_profile",
]


def _floats(values, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in values)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: expected a sequence of numbers") from exc


@dataclass(frozen=True)
class Instance:
    """A position game: CTRs per position, per-click values and budgets per player."""

    ctrs: tuple[float, ...]
    valuations: tuple[float, ...]
    budgets: tuple[float, ...]

    def __post_init__(self):
        ctrs = _floats(self.ctrs, "ctrs")
        vals = _floats(self.valuations, "valuations")
        buds = _floats(self.budgets, "budgets")
        object.__setattr__(self, "ctrs", ctrs)
        object.__setattr__(self, "valuations", vals)
        object.__setattr__(self, "budgets", buds)

        n = len(ctrs)
        if n == 0:
            raise LengthMismatch("instance must have at least one position")
        if len(vals) != n or len(buds) != n:
            raise LengthMismatch(
                f"ctrs, valuations and budgets must share a length "
                f"(got {n}, {len(vals)}, {len(buds)})"
            )
        for name, arr in (("ctrs", ctrs), ("valuations", vals), ("budgets", buds)):
            for k, x in enumerate(arr):
                if not (math.isfinite(x) and x > 0):
                    raise NonPositiveEntry(f"{name}[{k + 1}] = {x!r} is not a positive finite number")
        for j in range(n - 1):
            if ctrs[j] < ctrs[j + 1]:
                raise CtrsNotSorted(
                    f"ctrs must be non-increasing: ctrs[{j + 1}]={ctrs[j]} < ctrs[{j + 2}]={ctrs[j + 1]}"
                )

    @property
    def n(self) -> int:
        return len(self.ctrs)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.asarray(self.ctrs, dtype=float),
            np.asarray(self.valuations, dtype=float),
            np.asarray(self.budgets, dtype=float),
        )

    def to_dict(self) -> dict:
        return {
            "ctrs": list(self.ctrs),
            "valuations": list(self.valuations),
            "budgets": list(self.budgets),
        }


def validate_instance(raw) -> Instance:
    """Build an :class:`Instance` from a mapping (the JSON schema) or pass one through.

    Values are stored exactly as given; nothing is normalized or re-sorted.
    """
    if isinstance(raw, Instance):
        return raw
    if not isinstance(raw, Mapping):
        raise ValidationError("instance must be a mapping with ctrs, valuations, budgets")
    missing = [k for k in ("ctrs", "valuations", "budgets") if k not in raw]
    if missing:
        raise ValidationError(f"instance is missing field(s): {', '.join(missing)}")
    return Instance(raw["ctrs"], raw["valuations"], raw["budgets"])


@dataclass(frozen=True)
class ScalarBidProfile:
    """One non-negative per-click bid per player (GSP and VCG)."""

    bids: tuple[float, ...]

    def __post_init__(self):
        bids = _floats(self.bids, "bids")
        for k, b in enumerate(bids):
            if not (math.isfinite(b) and b >= 0):
                raise InvalidProfile(f"bid of player {k + 1} = {b!r} is not a non-negative finite number")
        object.__setattr__(self, "bids", bids)

    @property
    def n(self) -> int:
        return len(self.bids)

    def __len__(self) -> int:
        return len(self.bids)

    def __getitem__(self, i: int) -> float:
        return self.bids[i]

    def replace(self, player: int, bid: float) -> "ScalarBidProfile":
        bids = list(self.bids)
        bids[player] = bid
        return ScalarBidProfile(bids)

    def to_json(self) -> list[float]:
        return list(self.bids)


@dataclass(frozen=True)
class MatrixBidProfile:
    """EGFP bids: row ``i`` holds player i's total bid for every position."""

    bids: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        try:
            rows = tuple(_floats(row, "bids") for row in self.bids)
        except TypeError as exc:
            raise InvalidProfile("matrix profile must be a sequence of rows") from exc
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise InvalidProfile(f"matrix profile must be square: row {i + 1} has {len(row)} entries, expected {n}")
            for j, b in enumerate(row):
                if not (math.isfinite(b) and b >= 0):
                    raise InvalidProfile(f"bid ({i + 1},{j + 1}) = {b!r} is not a non-negative finite number")
        object.__setattr__(self, "bids", rows)

    @property
    def n(self) -> int:
        return len(self.bids)

    def __len__(self) -> int:
        return len(self.bids)

    def __getitem__(self, i: int) -> tuple[float, ...]:
        return self.bids[i]

    def replace(self, player: int, row: Sequence[float]) -> "MatrixBidProfile":
        rows = list(self.bids)
        rows[player] = tuple(row)
        return MatrixBidProfile(rows)

    def to_json(self) -> list[list[float]]:
        return [list(r) for r in self.bids]


def as_scalar_profile(bids) -> ScalarBidProfile:
    if isinstance(bids, ScalarBidProfile):
        return bids
    return ScalarBidProfile(tuple(bids))


def as_matrix_profile(bids) -> MatrixBidProfile:
    if isinstance(bids, MatrixBidProfile):
        return bids
    return MatrixBidProfile(tuple(tuple(r) for r in bids))


@dataclass(frozen=True)
class Assignment:
    """``sigma[i]`` is player i's position, ``pi[j]`` the player in position j."""

    sigma: tuple[int, ...]
    pi: tuple[int, ...]

    def __post_init__(self):
        sigma = tuple(int(x) for x in self.sigma)
        pi = tuple(int(x) for x in self.pi)
        n = len(sigma)
        if sorted(sigma) != list(range(n)) or len(pi) != n:
            raise ValidationError(f"sigma {sigma} is not a permutation of 0..{n - 1}")
        if any(pi[sigma[i]] != i for i in range(n)):
            raise ValidationError("pi is not the inverse of sigma")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def from_sigma(cls, sigma: Sequence[int]) -> "Assignment":
        sigma = tuple(int(x) for x in sigma)
        pi = [0] * len(sigma)
        for i, j in enumerate(sigma):
            if not 0 <= j < len(sigma):
                raise ValidationError(f"position {j} out of range")
            pi[j] = i
        return cls(sigma, tuple(pi))

    @classmethod
    def from_pi(cls, pi: Sequence[int]) -> "Assignment":
        pi = tuple(int(x) for x in pi)
        sigma = [0] * len(pi)
        for j, i in enumerate(pi):
            if not 0 <= i < len(pi):
                raise ValidationError(f"player {i} out of range")
            sigma[i] = j
        return cls(tuple(sigma), pi)

    @property
    def n(self) -> int:
        return len(self.sigma)

    def one_based(self) -> tuple[int, ...]:
        """sigma with players and positions counted from 1."""
        return tuple(j + 1 for j in self.sigma)


@dataclass(frozen=True)
class Outcome:
    """Allocation plus total payments and (possibly ``-inf``) utilities."""

    assignment: Assignment
    payments: tuple[float, ...]
    utilities: tuple[float, ...]

    @property
    def sigma(self) -> tuple[int, ...]:
        return self.assignment.sigma

    def to_json(self) -> dict:
        return {
            "sigma": list(self.assignment.one_based()),
            "payments": list(self.payments),
            "utilities": [_render_utility(u) for u in self.utilities],
        }


def _render_utility(u: float):
    if u == -math.inf:
        return "-inf"
    return u


def rank_by_bids(bids) -> Assignment:
    """Sort players by bid, highest first; ties go to the lower player index."""
    b = as_scalar_profile(bids).bids
    pi = sorted(range(len(b)), key=lambda i: (-b[i], i))
    return Assignment.from_pi(pi)
