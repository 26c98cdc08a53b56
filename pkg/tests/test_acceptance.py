"""The nine acceptance criteria at their stated tolerances and time budgets.

Each test records one PASS/FAIL line, printed in the "acceptance criteria"
section at the end of the pytest run.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from entassist import props, simulate, treasure
from entassist.channels import NonSignalingResource, expected_reward, is_nonsignaling
from entassist.membership import best_classical_value, enumerate_deterministic, in_cn_sr, verify_cn_sr_certificate
from entassist.quantum import realize_resource

QUANTUM_VALUE = (4 + math.sqrt(2)) / 6
MIXED_CONFIG = (2 + math.sqrt(2)) / 4


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def test_1_four_box_game_value(criterion):
    def evaluate():
        return [treasure.win_probability(c) for c in treasure.CONFIGS], treasure.overall_win_probability()

    (per, overall), secs = timed(evaluate)
    expect = [1, MIXED_CONFIG, MIXED_CONFIG, MIXED_CONFIG, MIXED_CONFIG, 1]
    per_err = max(abs(p - e) for p, e in zip(per, expect))
    ok = abs(overall - QUANTUM_VALUE) <= 1e-9 and per_err <= 1e-9 and secs < 0.1
    criterion(1, "four-box game value", ok,
              f"overall={overall:.12f}, per-config err={per_err:.1e}, {secs:.3f}s < 0.1s")
    assert ok


def test_2_classical_baseline(criterion):
    game = treasure.treasure_game(exact=True)
    (value, _), secs = timed(best_classical_value, game, 2)
    count = len(enumerate_deterministic(6, 4, 2))
    ok = value == Fraction(5, 6) and count == 376 and secs < 1.0
    criterion(2, "classical baseline", ok, f"value={value} over {count} strategies, {secs:.3f}s < 1s")
    assert ok


def test_3_separation(criterion):
    a = treasure.induced_channel()
    two = in_cn_sr(a, 2)
    four = in_cn_sr(a, 4)
    gap = expected_reward(two.witness, a) - float(best_classical_value(two.witness, 2)[0]) if not two else math.nan
    ok = (not two) and gap >= 0.069 and bool(four) and bool(verify_cn_sr_certificate(a, four.certificate, 4))
    criterion(3, "separation", ok, f"n=2 infeasible with witness gap={gap:.10f}; n=4 feasible={four.feasible}")
    assert ok


def test_4_theorem_reconstruction(criterion):
    inst = treasure.theorem_instance()
    dec, secs = timed(simulate.decompose_theorem, inst)
    wsum = abs(dec.weights.sum() - 1)
    stoch = max(float(np.max(np.abs(c.sum(axis=0) - 1))) for c in dec.components)
    err = dec.reconstruction_error(treasure.induced_channel())
    ok = wsum <= 1e-9 and stoch <= 1e-9 and dec.max_support() <= 4 and err <= 1e-8 and secs < 5
    criterion(4, "theorem reconstruction", ok,
              f"{len(dec)} components, max rows={dec.max_support()}, err={err:.1e}, {secs:.3f}s < 5s")
    assert ok


def test_5_randomized_theorem_suite(criterion):
    start = time.perf_counter()
    worst_err, worst_support, worst_hall = 0.0, 0, math.inf
    for seed in range(100):
        rng = np.random.default_rng([5, seed])
        k, l = int(rng.integers(2, 5)), int(rng.integers(2, 7))
        inst = simulate.random_theorem_instance(rng, 2, k, l)
        dec = simulate.decompose_theorem(inst)
        worst_err = max(worst_err, dec.reconstruction_error(inst.target))
        worst_support = max(worst_support, dec.max_support())
        # A_j(S) - P(S^4) for every nonempty S and column j
        p = simulate.p_measure(inst)
        for r in range(1, k + 1):
            for s in itertools.combinations(range(k), r):
                col_mass = inst.target.matrix[list(s), :].sum(axis=0)
                worst_hall = min(worst_hall, float(col_mass.min()) - p.mass(s))
    secs = time.perf_counter() - start
    ok = worst_err <= 1e-8 and worst_support <= 4 and worst_hall >= -1e-10 and secs < 60
    criterion(5, "randomized theorem suite", ok,
              f"max err={worst_err:.1e}, max rows={worst_support}, min Hall slack={worst_hall:.1e}, {secs:.1f}s < 60s")
    assert ok


def test_6_trace_inequality_suite(criterion):
    res, secs = timed(props.lemma2_suite, 10_000, 0)
    ok = res["min_slack"] >= -1e-10 and secs < 30
    criterion(6, "trace inequality suite", ok, f"10^4 trials, min slack={res['min_slack']:.1e}, {secs:.1f}s < 30s")
    assert ok


def test_7_right_inverse_suite(criterion):
    res, secs = timed(props.gamma_suite, 1000, 0)
    ok = (res["max_right_inverse_residual"] <= 1e-9 and res["max_unit_residual"] <= 1e-9
          and res["min_eigenvalue_psd_image"] >= -1e-9 and res["povm_failures"] == 0 and secs < 30)
    criterion(7, "right inverse suite", ok,
              f"residual={res['max_right_inverse_residual']:.1e}, unit={res['max_unit_residual']:.1e}, "
              f"min eig={res['min_eigenvalue_psd_image']:.1e}, POVM failures={res['povm_failures']}, {secs:.1f}s < 30s")
    assert ok


def test_8_nonsignaling(criterion):
    res = props.nonsignaling_suite(500, 0)
    p = treasure.protocol()
    four_box = is_nonsignaling(realize_resource(p.rho, list(p.alice), list(p.bob)), 1e-10)
    t = np.zeros((1, 2, 2, 1))
    t[0, 0, 0, 0] = t[0, 1, 1, 0] = 1.0
    signaling = is_nonsignaling(NonSignalingResource(t), 1e-10)
    ok = res["max_violation"] <= 1e-10 and bool(four_box) and not signaling and abs(signaling.max_violation - 1) < 1e-12
    criterion(8, "non-signaling", ok,
              f"500 quantum boxes max violation={res['max_violation']:.1e}; signaling box violation={signaling.max_violation}")
    assert ok


def test_9_bilinear_candidate_harness(criterion):
    res, secs = timed(props.remark_suite, 10_000, 0)
    zero = all(h == 0 for h in res["maximally_mixed"].values())
    reverified = all(hit is None or hit["recomputed"] < -simulate.VIOLATION_TOL for hit in res["skewed"].values())
    found = {c: (h["recomputed"] if h else None) for c, h in res["skewed"].items()}
    ok = zero and reverified
    criterion(9, "bilinear candidate harness", ok,
              f"hits on 1/d: {res['maximally_mixed']}; skewed diag(0.9,0.1) re-verified violations: {found}; {secs:.1f}s")
    assert ok
