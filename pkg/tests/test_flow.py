import itertools

import numpy as np
from hypothesis import given, strategies as st

from entassist.flow import max_flow


def min_cut_brute_force(cap, s, t):
    """Cheapest s-t cut over every subset of the inner nodes."""
    n = cap.shape[0]
    inner = [v for v in range(n) if v not in (s, t)]
    best = np.inf
    for r in range(len(inner) + 1):
        for side in itertools.combinations(inner, r):
            src = set(side) | {s}
            best = min(best, sum(cap[u, v] for u in src for v in range(n) if v not in src))
    return best


@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.floats(0.2, 0.9))
def test_max_flow_equals_min_cut(seed, n, density):
    rng = np.random.default_rng(seed)
    cap = rng.random((n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(cap, 0)
    value, flow, reachable = max_flow(cap, 0, n - 1)
    assert abs(value - min_cut_brute_force(cap, 0, n - 1)) <= 1e-9
    # feasibility and conservation
    assert np.all(flow <= cap + 1e-12)
    np.testing.assert_allclose(flow, -flow.T)
    for v in range(1, n - 1):
        assert abs(flow[v].sum()) <= 1e-12
    # the reachable set is a minimum cut
    cut = sum(cap[u, v] for u in range(n) for v in range(n) if reachable[u] and not reachable[v])
    assert reachable[0] and not reachable[n - 1]
    assert abs(cut - value) <= 1e-9


def test_disconnected_network():
    cap = np.zeros((3, 3))
    cap[0, 1] = 1.0
    value, _, reachable = max_flow(cap, 0, 2)
    assert value == 0.0 and list(reachable) == [True, True, False]
