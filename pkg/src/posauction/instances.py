"""Instance families and JSON (de)serialization.

Two families:

* ``lower-bound``: the two-player game with values ``(lam, 1)``, budgets
  ``(1 + eps, 1)`` and CTRs ``(1, 1/lam)``.  Its best equilibrium reaches only
  ``((1 + eps) lam + 1) / lam`` of liquid welfare against an optimum of 2.
* ``random``: seeded draws whose budgets straddle the point where they start
  to bind, so both capped and uncapped players show up.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from .errors import ParamOutOfRange, ParseError
from .mechanisms import Mechanism
from .model import Instance, MatrixBidProfile, ScalarBidProfile, validate_instance

__all__ = [
    "LowerBoundParams",
    "gen_lower_bound",
    "lower_bound_profiles",
    "lower_bound_ratio",
    "gen_random",
    "load_instance",
    "save_instance",
    "load_manifest",
    "save_manifest",
    "instance_from_manifest",
    "FAMILIES",
]

FAMILIES = ("lower-bound", "random")

PathOrStream = Union[str, os.PathLike, IO[str]]


@dataclass(frozen=True)
class LowerBoundParams:
    lam: float
    eps: float

    def __post_init__(self):
        if not self.lam > 2:
            raise ParamOutOfRange(f"lam must be > 2, got {self.lam}")
        if not 0 < self.eps < 0.5:
            raise ParamOutOfRange(f"eps must lie in (0, 1/2), got {self.eps}")


def gen_lower_bound(params: LowerBoundParams) -> Instance:
    lam, eps = params.lam, params.eps
    return Instance(ctrs=(1.0, 1.0 / lam), valuations=(lam, 1.0), budgets=(1.0 + eps, 1.0))


def lower_bound_profiles(params: LowerBoundParams, delta: float = 1e-6) -> dict:
    """Reference equilibrium profiles inducing the sub-optimal assignment (1, 2).

    GSP and VCG: ``b = (1 + eps, 1)``.  EGFP: ``b_1 = (1 + delta, 0)``,
    ``b_2 = (1, 0)``, an equilibrium up to ``theta >= delta``.
    """
    if not delta > 0:
        raise ParamOutOfRange(f"delta must be positive, got {delta}")
    scalar = ScalarBidProfile((1.0 + params.eps, 1.0))
    return {
        Mechanism.GSP: scalar,
        Mechanism.VCG: scalar,
        Mechanism.EGFP: MatrixBidProfile(((1.0 + delta, 0.0), (1.0, 0.0))),
    }


def lower_bound_ratio(params: LowerBoundParams) -> float:
    """Closed-form optimum over equilibrium liquid welfare, ``2 lam / ((1 + eps) lam + 1)``."""
    return 2 * params.lam / ((1 + params.eps) * params.lam + 1)


def _uniform_open_closed(rng: np.random.Generator, lo, hi, size=None):
    # rng.random() is in [0, 1); flip it to land in (lo, hi]
    return hi - (hi - lo) * rng.random(size)


def gen_random(seed: int, n: int, ctr_range=(0.0, 1.0), value_range=(0.0, 10.0),
               budget_factor: float = 2.0) -> Instance:
    """Random instance, deterministic in ``seed``.

    CTRs ~ U(ctr_range] sorted non-increasing, values ~ U(value_range], and
    budget c_i ~ U(0, budget_factor * ctr_1 * v_i].
    """
    if n < 1:
        raise ParamOutOfRange("n must be at least 1")
    rng = np.random.default_rng(seed)
    ctrs = np.sort(_uniform_open_closed(rng, *ctr_range, size=n))[::-1]
    vals = _uniform_open_closed(rng, *value_range, size=n)
    buds = _uniform_open_closed(rng, 0.0, budget_factor * ctrs[0] * vals)
    return Instance(ctrs.tolist(), vals.tolist(), buds.tolist())


def _read_json(src: PathOrStream):
    try:
        if hasattr(src, "read"):
            return json.load(src)
        with open(src) as fp:
            return json.load(fp)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _write_json(data, dst: PathOrStream) -> None:
    if hasattr(dst, "write"):
        json.dump(data, dst, indent=2)
        dst.write("\n")
        return
    with open(dst, "w") as fp:
        json.dump(data, fp, indent=2)
        fp.write("\n")


def load_instance(src: PathOrStream) -> Instance:
    """Read ``{"ctrs": [...], "valuations": [...], "budgets": [...]}``."""
    return validate_instance(_read_json(src))


def save_instance(inst: Instance, dst: PathOrStream) -> None:
    _write_json(inst.to_dict(), dst)


def save_manifest(dst: PathOrStream, seed, family: str, params: dict) -> None:
    _write_json({"seed": seed, "family": family, "params": params}, dst)


def load_manifest(src: PathOrStream) -> dict:
    data = _read_json(src)
    if not isinstance(data, dict) or "family" not in data:
        raise ParseError("manifest must be an object with seed, family and params")
    return data


def instance_from_manifest(manifest: dict) -> Instance:
    family = manifest["family"]
    params = manifest.get("params", {})
    if family == "lower-bound":
        return gen_lower_bound(LowerBoundParams(params["lam"], params["eps"]))
    if family == "random":
        return gen_random(manifest["seed"], **params)
    raise ParseError(f"unknown family {family!r}")
