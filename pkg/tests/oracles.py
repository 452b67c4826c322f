"""Independent brute-force evaluators used as test oracles.

Nothing here imports the package's ranking, payment or deviation code:
positions come from pairwise "who is ahead of whom" counts and VCG payments
from a reversed cumulative sum, so agreement with the library is evidence
rather than tautology.
"""
import itertools

import numpy as np

RTOL = 1e-12


def positions_pairwise(P):
    """P: (Y, n) scalar bids -> (Y, n) positions with lower-index tie-break."""
    n = P.shape[1]
    idx = np.arange(n)
    ahead = (P[:, :, None] > P[:, None, :]) | (
        (P[:, :, None] == P[:, None, :]) & (idx[:, None] < idx[None, :])
    )
    return ahead.sum(axis=1)


def scalar_payments(gsp, ctrs, P):
    """Total payment of every player for each row of P."""
    Y, n = P.shape
    pos = positions_pairwise(P)
    sb = np.zeros((Y, n + 1))
    sb[np.arange(Y)[:, None], pos] = P
    if gsp:
        pay_pos = ctrs[None, :] * sb[:, 1:]
    else:
        drops = np.zeros(n + 1)
        drops[1:n] = ctrs[:-1] - ctrs[1:]
        terms = sb * drops[None, :]
        tail = np.cumsum(terms[:, ::-1], axis=1)[:, ::-1]
        pay_pos = np.zeros((Y, n))
        pay_pos[:, : n - 1] = tail[:, 1:n]
    return pos, np.take_along_axis(pay_pos, pos, axis=1)


def scan_scalar_deviation(gsp, inst, bids, player, ys):
    """Deviator's position, utility and own no-over compliance for every bid in ys."""
    ctrs, vals, buds = (np.asarray(x, float) for x in (inst.ctrs, inst.valuations, inst.budgets))
    P = np.tile(np.asarray(bids, float), (len(ys), 1))
    P[:, player] = ys
    pos, pay = scalar_payments(gsp, ctrs, P)
    r = pos[:, player]
    p = pay[:, player]
    v, c = vals[player], buds[player]
    util = np.where(p <= c * (1 + RTOL), ctrs[r] * v - p, -np.inf)
    ok = ctrs[r] * ys <= np.minimum(ctrs[r] * v, c) * (1 + RTOL)
    return r, util, ok


def egfp_eval(ctrs, B):
    """B: (Y, n, n) -> (positions, payments), first-come lowest-index allocation."""
    Y, n, _ = B.shape
    rows = np.arange(Y)
    pos = np.full((Y, n), -1)
    pay = np.zeros((Y, n))
    taken = np.zeros((Y, n), dtype=bool)
    for j in range(n):
        col = np.where(taken, -1.0, B[:, :, j])  # bids are >= 0, so -1 never wins
        w = np.argmax(col, axis=1)  # first maximum = lowest index
        pos[rows, w] = j
        pay[rows, w] = B[rows, w, j]
        taken[rows, w] = True
    return pos, pay


def egfp_single_position_scan(inst, bids, player, levels_per_position):
    """Best utility over single-position deviations y = level * e_j."""
    n = inst.n
    ctrs = np.asarray(inst.ctrs)
    v, c = inst.valuations[player], inst.budgets[player]
    rows = []
    for j in range(n):
        for lv in levels_per_position:
            y = np.zeros(n)
            y[j] = lv
            rows.append(y)
    B = np.tile(np.asarray(bids, float), (len(rows), 1, 1))
    B[:, player, :] = np.asarray(rows)
    pos, pay = egfp_eval(ctrs, B)
    p = pay[:, player]
    u = np.where(p <= c * (1 + RTOL), ctrs[pos[:, player]] * v - p, -np.inf)
    return float(u.max())


def lw_all_assignments(inst):
    """(sigma, LW) for every permutation, in lexicographic order."""
    out = []
    for sigma in itertools.permutations(range(inst.n)):
        out.append((sigma, sum(min(inst.ctrs[j] * inst.valuations[i], inst.budgets[i])
                               for i, j in enumerate(sigma))))
    return out


def extended_gain(new, old):
    return 0.0 if new == old else new - old


def scalar_soundness(gsp, inst, bids, player, reports, points=10_000, tol=1e-9):
    """Compare structured rank reports with a dense bid scan.

    Returns a dict with the scan's best gain, the structured best gain, and
    whether the scan reached the structured best target.  Raises
    AssertionError when the structured result is contradicted.
    """
    ys = np.linspace(0.0, inst.valuations[player], points)
    r, util, ok = scan_scalar_deviation(gsp, inst, bids, player, ys)
    _, cur_util, _ = scan_scalar_deviation(gsp, inst, bids, player,
                                           np.array([bids[player]], float))
    cur = float(cur_util[0])
    by_target = {d.target: d for d in reports}
    for rank in np.unique(r[ok]):
        d = by_target[int(rank)]
        u = float(util[ok & (r == rank)][0])
        assert np.all(util[ok & (r == rank)] == u), "utility not constant on a rank"
        assert d.feasible, f"scan reached rank {rank} but report says infeasible"
        if np.isfinite(u) or np.isfinite(d.deviation_utility):
            assert abs(d.deviation_utility - u) <= tol * max(1.0, abs(u)), (d, u)
    scan_best = float(util[ok].max()) if ok.any() else -np.inf
    feas = [d for d in reports if d.feasible]
    best = max(feas, key=lambda d: d.deviation_utility) if feas else None
    struct_best = best.deviation_utility if best else -np.inf
    assert struct_best >= scan_best - tol * max(1.0, abs(scan_best)) or scan_best == -np.inf
    hit = best is not None and bool(np.any(ok & (r == best.target)))
    if hit:
        assert abs(extended_gain(struct_best, cur) - extended_gain(scan_best, cur)) <= tol * max(1.0, abs(scan_best)) \
            or struct_best == scan_best
    return {"scan_gain": extended_gain(scan_best, cur), "struct_gain": extended_gain(struct_best, cur),
            "hit": hit, "current": cur}


def egfp_dense_levels(inst, bids, player, points=2000):
    """Evenly spaced levels plus every opponent bid and its next float up."""
    B = np.asarray(bids, float)
    opp = np.delete(B, player, axis=0).ravel()
    top = max(inst.budgets[player], float(opp.max(initial=0.0))) * 1.01 + 1e-9
    extra = np.concatenate([opp, np.nextafter(opp, np.inf)])
    return np.unique(np.concatenate([np.linspace(0.0, top, points), extra]))
