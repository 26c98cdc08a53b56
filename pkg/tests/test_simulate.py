import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from entassist import qmat, sampling, treasure
from entassist.errors import DomainError, InfeasibleError, NormalizationError
from entassist.membership import verify_cn_sr_certificate
from entassist.simulate import (
    PMeasure, TheoremInstance, bilinear_d, check_trace_lemma, decompose_theorem, hall_condition,
    p_measure, random_theorem_instance, search_bilinear_counterexample, transport_solve,
)

I2 = np.eye(2)
O2 = np.zeros((2, 2))


# --- trace inequality ------------------------------------------------------

def test_trace_lemma_examples(rng):
    bp, bm = sampling.random_split(rng, sampling.random_density(rng, 3))
    assert check_trace_lemma(np.eye(3), np.eye(3), bp, bm) == pytest.approx(0.0, abs=1e-12)
    assert check_trace_lemma(np.eye(3), np.zeros((3, 3)), bp, bm) == pytest.approx(np.trace(bp).real, abs=1e-12)


def test_trace_lemma_random_d3(rng):
    for _ in range(500):
        rho = sampling.random_density(rng, 3)
        bp, bm = sampling.random_split(rng, rho)
        ep, em = sampling.random_contraction(rng, 3), sampling.random_projector(rng, 3)
        assert check_trace_lemma(ep, em, bp, bm) >= -1e-10


@pytest.mark.parametrize("bad, fragment", [
    (dict(ep=2 * I2), r"E\+ exceeds"),
    (dict(em=-I2), "E- is not positive"),
    (dict(bp=np.diag([1.0, -0.2]), bm=np.diag([0.0, 0.2])), r"beta\+ is not positive"),
    (dict(bp=I2, bm=O2), "trace"),
])
def test_trace_lemma_names_the_failed_condition(bad, fragment):
    args = dict(ep=I2 / 2, em=I2 / 2, bp=I2 / 4, bm=I2 / 4)
    args.update(bad)
    with pytest.raises(DomainError, match=fragment):
        check_trace_lemma(args["ep"], args["em"], args["bp"], args["bm"])


# --- p measure -------------------------------------------------------------

def test_single_outcome_instance_has_one_atom():
    inst = TheoremInstance.build(2, [I2], [I2], [(I2 / 4, I2 / 4)])
    assert p_measure(inst).atoms == {(0, 0, 0, 0): 1.0}


def test_four_box_atoms():
    p = p_measure(treasure.theorem_instance())
    plus, minus = {0, 1}, {2, 3}
    for i1, i2, i3, i4 in p.atoms:
        assert i1 in plus and i3 in plus and i2 in minus and i4 in minus
    assert len(p.atoms) == 16
    # tr(E+_1 E-_3) = 1/2 by Pauli expansion, so p = (1/2)^2 (1/2)^2 / 4
    assert p.atoms[(0, 2, 0, 2)] == pytest.approx(1 / 16, abs=1e-15)
    assert p.total() == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 4))
def test_p_measure_is_normalized(seed, k, l):
    inst = random_theorem_instance(np.random.default_rng(seed), 2, k, l)
    assert p_measure(inst).total() == pytest.approx(1.0, abs=1e-9)


# --- transport -------------------------------------------------------------

def transport_lp_feasible(p, a):
    """Independent oracle: is there a nonnegative plan on the edges i in I with the given marginals?"""
    edges = [(atom, i) for atom in sorted(p.atoms) for i in sorted(set(atom))]
    atoms = sorted(p.atoms)
    rows, b = [], []
    for atom in atoms:
        rows.append([1.0 if e[0] == atom else 0.0 for e in edges])
        b.append(p.atoms[atom])
    for i in range(p.k):
        rows.append([1.0 if e[1] == i else 0.0 for e in edges])
        b.append(a[i])
    res = linprog(np.zeros(len(edges)), A_eq=rows, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


def assert_plan_valid(p, a, plan):
    for (atom, i), m in plan.flows.items():
        assert i in atom and m >= 0
    rows = plan.row_marginals()
    for atom, mass in p.atoms.items():
        assert abs(rows.get(atom, 0.0) - mass) <= 1e-10
    assert np.max(np.abs(plan.column_marginals() - a)) <= 1e-10


def test_transport_single_atom():
    p = PMeasure(4, {(0, 2, 0, 2): 1.0})
    plan = transport_solve(p, [0.3, 0, 0.7, 0])
    assert plan.flows == pytest.approx({((0, 2, 0, 2), 0): 0.3, ((0, 2, 0, 2), 2): 0.7})


def test_transport_symmetric():
    p = PMeasure(4, {(0, 1, 0, 1): 0.5, (2, 3, 2, 3): 0.5})
    a = np.full(4, 0.25)
    plan = transport_solve(p, a)
    assert_plan_valid(p, a, plan)
    assert all(m == pytest.approx(0.25) for m in plan.flows.values())


def test_transport_four_box_columns():
    inst = treasure.theorem_instance()
    p = p_measure(inst)
    for j in range(inst.l):
        a = inst.target.matrix[:, j]
        assert_plan_valid(p, a, transport_solve(p, a))


def test_transport_infeasible_gives_hall_witness():
    p = PMeasure(3, {(0, 0, 0, 0): 0.5, (1, 2, 1, 2): 0.5})
    a = np.array([0.2, 0.4, 0.4])
    with pytest.raises(InfeasibleError) as info:
        transport_solve(p, a)
    s = set(info.value.witness)
    assert p.mass(s) > a[list(s)].sum() + 1e-9
    assert info.value.deficit == pytest.approx(0.3)
    assert not transport_lp_feasible(p, a)


@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_transport_agrees_with_lp_oracle(seed, k):
    rng = np.random.default_rng(seed)
    atoms = {}
    for _ in range(int(rng.integers(1, 5))):
        atom = tuple(int(v) for v in rng.integers(0, k, 4))
        atoms[atom] = atoms.get(atom, 0.0) + float(rng.random())
    total = sum(atoms.values())
    p = PMeasure(k, {atom: v / total for atom, v in atoms.items()})
    a = rng.dirichlet(np.ones(k))
    try:
        plan = transport_solve(p, a)
    except InfeasibleError as exc:
        assert not transport_lp_feasible(p, a)
        s = set(exc.witness)
        assert p.mass(s) > a[list(s)].sum()
    else:
        assert_plan_valid(p, a, plan)


def test_transport_rejects_unnormalized():
    with pytest.raises(NormalizationError):
        transport_solve(PMeasure(2, {(0, 0, 0, 0): 1.0}), [0.5, 0.2])


# --- decomposition ---------------------------------------------------------

def assert_decomposition_valid(inst, dec):
    assert dec.weights.sum() == pytest.approx(1.0, abs=1e-9)
    assert dec.reconstruction_error(inst.target) <= 1e-8
    for atom, c in zip(dec.atom_index, dec.components):
        np.testing.assert_allclose(c.sum(axis=0), 1.0, atol=1e-9)
        rows = set(np.nonzero(np.any(c > 1e-12, axis=1))[0])
        assert rows <= set(atom)
    assert dec.max_support() <= 4


def test_trivial_decomposition():
    inst = TheoremInstance.build(2, [I2], [I2], [(I2 / 4, I2 / 4)])
    dec = decompose_theorem(inst)
    np.testing.assert_array_equal(dec.weights, [1.0])
    np.testing.assert_array_equal(dec.components, [[[1.0]]])


def test_four_box_decomposition():
    inst = treasure.theorem_instance()
    dec = decompose_theorem(inst)
    assert_decomposition_valid(inst, dec)
    assert dec.max_support() == 4
    assert verify_cn_sr_certificate(inst.target, dec, 4)


@pytest.mark.parametrize("seed", range(20))
def test_random_decompositions(seed):
    rng = np.random.default_rng(seed)
    k, l = int(rng.integers(2, 7)), int(rng.integers(1, 7))
    inst = random_theorem_instance(rng, 2, k, l)
    dec = decompose_theorem(inst)
    assert_decomposition_valid(inst, dec)
    assert verify_cn_sr_certificate(inst.target, dec, 4)


def test_random_decomposition_in_dimension_three():
    inst = random_theorem_instance(np.random.default_rng(3), 3, 4, 5)
    assert_decomposition_valid(inst, decompose_theorem(inst))


def test_hall_condition_matches_direct_sum():
    inst = random_theorem_instance(np.random.default_rng(7), 2, 4, 3)
    p = p_measure(inst)
    worst = min(
        inst.target.matrix[list(s), j].sum() - p.mass(s)
        for r in range(1, 5) for s in itertools.combinations(range(4), r) for j in range(3)
    )
    assert hall_condition(inst).min_slack == pytest.approx(worst, abs=1e-12)
    assert worst >= -1e-10


# --- bilinear candidates ---------------------------------------------------

def test_candidates_agree_with_proof_form_on_maximally_mixed(rng):
    for d in (2, 3):
        z1, z2 = sampling.random_contraction(rng, d), sampling.random_contraction(rng, d)
        expect = np.trace(z1 @ z2).real / d
        for cand in ("symmetrized", "sqrt_sandwich"):
            assert bilinear_d(cand, z1, z2, np.eye(d) / d) == pytest.approx(expect, abs=1e-12)


@pytest.mark.parametrize("cand", ["symmetrized", "sqrt_sandwich"])
def test_no_violation_on_maximally_mixed(cand):
    for d in (2, 3):
        assert search_bilinear_counterexample(np.eye(d) / d, cand, 600, seed=1) is None


@pytest.mark.parametrize("cand", ["symmetrized", "sqrt_sandwich"])
def test_skewed_violations_are_genuine(cand):
    rho_b = np.diag([0.9, 0.1]).astype(complex)
    hit = search_bilinear_counterexample(rho_b, cand, 3000, seed=0)
    assert hit is not None
    assert hit.recomputed < -1e-9
    assert hit.value == pytest.approx(hit.recomputed, abs=1e-12)
    if cand == "symmetrized":
        z1, z2 = hit.ops
        assert qmat.is_psd(z1) and qmat.is_psd(z2)
        # independent evaluation with numpy
        assert np.real(np.trace(z1 @ z2 @ rho_b)) < 0
    else:
        ep, em, bp, bm = hit.ops
        np.testing.assert_allclose(bp + bm, rho_b, atol=1e-12)
        h = np.diag(np.sqrt([0.9, 0.1]))
        d = np.real(np.trace(ep @ h @ em @ h))
        rhs = np.real(np.trace(ep @ bp) + np.trace(em @ bm))
        assert rhs - d * d < 0


def test_search_validates_input():
    with pytest.raises(DomainError):
        search_bilinear_counterexample(np.eye(2), "symmetrized", 1)
    with pytest.raises(ValueError):
        search_bilinear_counterexample(np.eye(2) / 2, "other", 1)
