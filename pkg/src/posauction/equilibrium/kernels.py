"""Vectorized equilibrium tests over blocks of bid profiles.

These mirror :mod:`.deviations` and :func:`.verify.verify_equilibrium` rank
for rank and use the same floating-point expressions, so a profile accepted
here is accepted there.  The test suite checks the two paths agree on whole
grids.
"""
from __future__ import annotations

import numpy as np

from .verify import GAIN_RTOL


def _relaxed(x, rtol):
    return x + rtol * np.abs(x)


def _accepted(gain, theta, current):
    scale = np.where(np.isfinite(current), np.abs(current), 1.0)
    return gain <= theta + GAIN_RTOL * np.maximum(1.0, scale)


def scalar_block(gsp: bool, ctrs, vals, buds, P, theta, rtol):
    """Evaluate GSP (``gsp=True``) or VCG on profiles ``P`` of shape (N, n).

    Returns ``(is_eq, sigma, utilities, payments)``; profiles breaking no-over
    are never equilibria.
    """
    N, n = P.shape
    rows = np.arange(N)[:, None]
    pi = np.argsort(-P, axis=1, kind="stable")
    sigma = np.argsort(pi, axis=1)
    sb = P[rows, pi]

    pay_pos = np.zeros((N, n))
    if gsp:
        for r in range(n):
            nxt = sb[:, r + 1] if r + 1 < n else np.zeros(N)
            pay_pos[:, r] = ctrs[r] * nxt
    else:
        for r in range(n):
            acc = np.zeros(N)
            for k in range(n - 1 - r):
                acc = acc + sb[:, r + 1 + k] * (ctrs[r + k] - ctrs[r + k + 1])
            pay_pos[:, r] = acc
    v_pos, c_pos = vals[pi], buds[pi]
    util_pos = np.where(pay_pos <= _relaxed(c_pos, rtol), ctrs * v_pos - pay_pos, -np.inf)
    limit_pos = _relaxed(np.minimum(ctrs * v_pos, c_pos), rtol)
    compliant = np.all(ctrs * sb <= limit_pos, axis=1)

    util = util_pos[rows, sigma]
    pay = pay_pos[rows, sigma]
    is_eq = compliant.copy()

    for i in range(n):
        others = np.array([k for k in range(n) if k != i], dtype=int)
        v, c = vals[i], buds[i]
        O = P[:, others]
        order = np.argsort(-O, axis=1, kind="stable")
        S = O[rows, order]
        idx = others[order]
        best = np.full(N, -np.inf)
        for r in range(n):
            if r < n - 1:
                lo, lo_closed = S[:, r], i < idx[:, r]
            else:
                lo, lo_closed = np.zeros(N), np.ones(N, dtype=bool)
            if r > 0:
                hi, hi_closed = S[:, r - 1], idx[:, r - 1] < i
            else:
                hi, hi_closed = np.full(N, np.inf), np.zeros(N, dtype=bool)
            nonempty = (lo < hi) | ((lo == hi) & lo_closed & hi_closed)
            limit = min(ctrs[r] * v, c)
            limit = limit + rtol * abs(limit)
            fits = np.where(lo_closed, ctrs[r] * lo <= limit, ctrs[r] * lo < limit)
            feasible = nonempty & fits
            if gsp:
                dev_pay = ctrs[r] * lo
            else:
                dev_pay = np.zeros(N)
                for k in range(n - 1 - r):
                    dev_pay = dev_pay + S[:, r + k] * (ctrs[r + k] - ctrs[r + k + 1])
            dev_util = np.where(dev_pay <= c + rtol * abs(c), ctrs[r] * v - dev_pay, -np.inf)
            best = np.where(feasible, np.maximum(best, dev_util), best)
        cur = util[:, i]
        with np.errstate(invalid="ignore"):
            gain = np.where(best == cur, 0.0, best - cur)
        is_eq &= _accepted(gain, theta, cur)
    return is_eq, sigma, util, pay


def egfp_block(ctrs, vals, buds, B, theta, rtol):
    """Evaluate EGFP on bid matrices ``B`` of shape (N, n, n); see :func:`scalar_block`."""
    N, n, _ = B.shape
    rows = np.arange(N)
    avail = np.ones((N, n), dtype=bool)
    sigma = np.empty((N, n), dtype=int)
    pay = np.zeros((N, n))
    for j in range(n):
        col = np.where(avail, B[:, :, j], -np.inf)
        w = np.argmax(col, axis=1)
        sigma[rows, w] = j
        pay[rows, w] = B[rows, w, j]
        avail[rows, w] = False
    util = np.where(pay <= _relaxed(buds, rtol), ctrs[sigma] * vals - pay, -np.inf)

    is_eq = np.ones(N, dtype=bool)
    for i in range(n):
        v, c = vals[i], buds[i]
        cap = c + rtol * abs(c)
        avail = np.ones((N, n), dtype=bool)
        avail[:, i] = False
        reachable = np.ones(N, dtype=bool)
        best = np.full(N, -np.inf)
        for j in range(n):
            if j < n - 1:
                col = np.where(avail, B[:, :, j], -np.inf)
                w = np.argmax(col, axis=1)
                price = col[rows, w]
                closed = i < w
            else:
                price = np.zeros(N)
                closed = np.ones(N, dtype=bool)
            affordable = np.where(closed, price <= cap, price < cap)
            best = np.where(reachable & affordable, np.maximum(best, ctrs[j] * v - price), best)
            if j < n - 1:
                reachable &= ~((price == 0.0) & closed)
                avail[rows, w] = False
        cur = util[:, i]
        with np.errstate(invalid="ignore"):
            gain = np.where(best == cur, 0.0, best - cur)
        is_eq &= _accepted(gain, theta, cur)
    return is_eq, sigma, util, pay
