import math

import numpy as np
import pytest

from posauction.equilibrium import (
    best_deviation,
    candidate_deviations,
    candidate_deviations_egfp,
    candidate_deviations_scalar,
    utility_gain,
)
from posauction.mechanisms import Mechanism, check_no_over, outcome
from posauction.model import Instance

from conftest import random_instance, random_no_over_profile
from oracles import egfp_dense_levels, egfp_eval, egfp_single_position_scan, scalar_soundness


def test_utility_gain_extended():
    assert utility_gain(-math.inf, -math.inf) == 0.0
    assert utility_gain(1.0, -math.inf) == math.inf
    assert utility_gain(-math.inf, 1.0) == -math.inf
    assert utility_gain(3.0, 1.0) == 2.0


def test_gsp_rank_one_deviation(lb_inst):
    reps = candidate_deviations_scalar(Mechanism.GSP, lb_inst, [0.5, 1.0], 0)
    d = next(r for r in reps if r.target == 0)
    # player 1 wins the tie at 1.0, so the bound itself is attainable
    assert d.feasible and not d.strict
    assert d.required_bid == 1.0 and d.witness == 1.0
    assert d.deviation_utility == pytest.approx(99.0)
    assert d.gain == pytest.approx(98.0)
    assert best_deviation(reps) == d


def test_staying_put_gains_zero(lb_inst):
    for mech in (Mechanism.GSP, Mechanism.VCG):
        reps = candidate_deviations_scalar(mech, lb_inst, [1.01, 1.0], 1)
        stay = next(r for r in reps if r.target == 1)
        assert stay.gain == 0.0


def test_vcg_rank_one_deviation(lb_inst):
    for b1 in (0.0, 0.5, 0.99):
        reps = candidate_deviations_scalar(Mechanism.VCG, lb_inst, [b1, 1.0], 0)
        d = next(r for r in reps if r.target == 0)
        assert d.feasible
        assert d.deviation_utility >= 99.01 - 1e-12


def test_egfp_position_one_deviation(lb_inst):
    for t in (0.2, 1.0):
        reps = candidate_deviations_egfp(lb_inst, [[0.0, 0.0], [t, 0.0]], 0)
        d = next(r for r in reps if r.target == 0)
        assert d.required_bid == t
        assert not d.strict  # player 1 wins ties against player 2
        assert d.deviation_utility == pytest.approx(100.0 - t)
        assert d.gain >= 98.0 - 1e-12


def test_egfp_current_position_no_gain():
    rng = np.random.default_rng(5)
    for _ in range(200):
        inst = random_instance(rng, 3)
        B = rng.random((3, 3)) * 3
        out = outcome(Mechanism.EGFP, inst, B)
        for i in range(3):
            d = next(r for r in candidate_deviations_egfp(inst, B, i) if r.target == out.sigma[i])
            # the price of the held position never exceeds the player's own winning bid
            assert d.required_bid <= B[i, out.sigma[i]]
            assert d.gain >= 0.0


def test_egfp_current_position_gain_is_overbid(lb_inst):
    reps = candidate_deviations_egfp(lb_inst, [[1.001, 0.0], [1.0, 0.0]], 0)
    assert reps[0].gain == pytest.approx(0.001, abs=1e-12)
    reps = candidate_deviations_egfp(lb_inst, [[1.0, 0.0], [1.0, 0.0]], 0)
    assert reps[0].gain == 0.0


def test_egfp_zero_opponents():
    inst = Instance([1.0, 0.5], [3.0, 2.0], [5.0, 5.0])
    d = candidate_deviations_egfp(inst, [[0.0, 0.0], [0.0, 0.0]], 0)[0]
    assert d.target == 0 and d.required_bid == 0.0 and not d.strict
    assert d.deviation_utility == 3.0
    # player 2 loses zero-bid ties to player 1, so position 1 costs strictly more than 0
    reps = candidate_deviations_egfp(inst, [[0.0, 0.0], [0.0, 0.0]], 1)
    assert reps[0].required_bid == 0.0 and reps[0].strict


def test_egfp_unreachable_after_free_win():
    inst = Instance([1.0, 0.5], [3.0, 2.0], [5.0, 5.0])
    reps = candidate_deviations_egfp(inst, [[0.0, 0.0], [0.0, 7.0]], 0)
    # player 1 wins position 1 for free with a zero bid, so position 2 is out of reach
    assert reps[1].deviation_utility == -math.inf or not reps[1].feasible


def test_dispatch_matches():
    inst = Instance([1.0, 0.5], [3.0, 2.0], [5.0, 5.0])
    assert candidate_deviations("GSP", inst, [1.0, 0.5], 0) == \
        candidate_deviations_scalar(Mechanism.GSP, inst, [1.0, 0.5], 0)
    assert candidate_deviations("EGFP", inst, [[1, 0], [0, 1]], 1) == \
        candidate_deviations_egfp(inst, [[1, 0], [0, 1]], 1)


@pytest.mark.parametrize("mech", [Mechanism.GSP, Mechanism.VCG])
def test_scalar_soundness_against_scan(mech):
    rng = np.random.default_rng(100 + (mech == Mechanism.VCG))
    hits = 0
    for _ in range(150):
        inst = random_instance(rng, int(rng.integers(1, 6)))
        bids = random_no_over_profile(rng, inst)
        i = int(rng.integers(inst.n))
        reps = candidate_deviations_scalar(mech, inst, bids, i)
        res = scalar_soundness(mech == Mechanism.GSP, inst, bids, i, reps)
        hits += res["hit"]
    assert hits >= 140


@pytest.mark.parametrize("mech", [Mechanism.GSP, Mechanism.VCG])
def test_witness_attains_report(mech):
    rng = np.random.default_rng(7)
    for _ in range(300):
        inst = random_instance(rng, int(rng.integers(1, 5)))
        bids = random_no_over_profile(rng, inst, tie_prob=0.4)
        i = int(rng.integers(inst.n))
        for d in candidate_deviations_scalar(mech, inst, bids, i):
            if not d.feasible:
                continue
            dev = list(bids)
            dev[i] = d.witness
            out = outcome(mech, inst, dev)
            assert out.sigma[i] == d.target
            assert check_no_over(inst, dev)[i]
            assert out.utilities[i] == d.deviation_utility
            if d.strict:
                assert d.witness > d.required_bid
            else:
                assert d.witness >= d.required_bid


def test_egfp_soundness_dense_grid():
    rng = np.random.default_rng(21)
    for _ in range(60):
        n = int(rng.integers(2, 4))
        inst = random_instance(rng, n)
        B = rng.random((n, n)) * 2 * (rng.random((n, n)) < 0.6)
        i = int(rng.integers(n))
        reps = candidate_deviations_egfp(inst, B, i)
        sup = max((d.deviation_utility for d in reps if d.feasible), default=-math.inf)
        scan = egfp_single_position_scan(inst, B, i, egfp_dense_levels(inst, B, i, 400))
        assert scan <= sup + 1e-12 * max(1.0, abs(sup))
        if math.isfinite(sup):
            assert scan >= sup - 1e-9 * max(1.0, abs(sup))


def test_egfp_multi_position_never_beats_supremum():
    rng = np.random.default_rng(22)
    for _ in range(40):
        n = 3
        inst = random_instance(rng, n)
        B = rng.random((n, n)) * 2
        i = int(rng.integers(n))
        reps = candidate_deviations_egfp(inst, B, i)
        sup = max((d.deviation_utility for d in reps if d.feasible), default=-math.inf)
        Y = 2000
        D = np.tile(B, (Y, 1, 1))
        D[:, i, :] = rng.random((Y, n)) * 3 * (rng.random((Y, n)) < 0.7)
        pos, pay = egfp_eval(np.asarray(inst.ctrs), D)
        p = pay[:, i]
        u = np.where(p <= inst.budgets[i] * (1 + 1e-12),
                     np.asarray(inst.ctrs)[pos[:, i]] * inst.valuations[i] - p, -np.inf)
        assert u.max() <= sup + 1e-12 * max(1.0, abs(sup))
