import numpy as np
import pytest
from hypothesis import strategies as st

from posauction.instances import LowerBoundParams, gen_lower_bound
from posauction.model import Instance

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def lb_inst():
    return gen_lower_bound(LowerBoundParams(100.0, 0.01))


def random_instance(rng, n, tie_prob=0.0):
    ctrs = np.sort(1 - rng.random(n))[::-1]
    vals = 10 * (1 - rng.random(n))
    buds = 2 * ctrs[0] * vals * (1 - rng.random(n))
    if tie_prob and rng.random() < tie_prob:
        ctrs = np.sort(np.round(ctrs, 1) + 0.05)[::-1]
        buds = np.round(buds) + 0.5
    return Instance(ctrs.tolist(), vals.tolist(), buds.tolist())


def random_no_over_profile(rng, inst, tie_prob=0.1):
    """Scalar profile that passes no-over; sometimes with copied (tied) bids."""
    from posauction.mechanisms import check_no_over

    n = inst.n
    for _ in range(50):
        b = np.asarray(inst.valuations) * rng.random(n)
        if n > 1 and rng.random() < tie_prob:
            k, l = rng.choice(n, 2, replace=False)
            b[k] = b[l]
        if all(check_no_over(inst, b.tolist())):
            return b.tolist()
    caps = np.minimum(inst.valuations, np.asarray(inst.budgets) / inst.ctrs[0])
    return (caps * rng.random(n)).tolist()


@st.composite
def instances(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    pos = st.floats(0.01, 1.0, allow_nan=False)
    ctrs = sorted(draw(st.lists(pos, min_size=n, max_size=n)), reverse=True)
    vals = draw(st.lists(st.floats(0.1, 10.0), min_size=n, max_size=n))
    buds = draw(st.lists(st.floats(0.01, 20.0), min_size=n, max_size=n))
    return Instance(ctrs, vals, buds)


@st.composite
def instance_and_bids(draw, min_n=1, max_n=5):
    inst = draw(instances(min_n, max_n))
    levels = st.sampled_from([0.0, 0.5, 1.0, 2.0]) | st.floats(0.0, 12.0)
    bids = draw(st.lists(levels, min_size=inst.n, max_size=inst.n))
    return inst, bids
