"""Seeded randomized property suites.

Each suite returns a plain dict of summary statistics so the CLI can report
it and the tests can assert on it. Trial ``t`` of a suite draws only from
``default_rng([seed, t])``, so any trial can be replayed on its own.
"""

from __future__ import annotations

import numpy as np

from . import qmat, sampling
from .errors import EntAssistError, UsageError
from .quantum import DensityOperator, GammaMap, Povm, PositiveDecomposition, phi_rho, povm_from_decomposition, pure_state, realize_resource
from .channels import is_nonsignaling
from .simulate import CANDIDATES, check_trace_lemma, search_bilinear_counterexample

SUITES = ("lemma2", "gamma", "nonsignaling", "remark")


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _effect(rng, d):
    u = rng.random()
    if u < 0.3:
        return sampling.random_projector(rng, d)
    if u < 0.4:
        return np.eye(d) * float(rng.integers(0, 2))
    return sampling.random_contraction(rng, d)


def lemma2_suite(trials: int, seed: int = 0, dims=(2, 3, 4)) -> dict:
    """Minimum slack of the trace inequality over random effects and splits.

    Every other trial uses the split of rho_B that minimizes the right-hand
    side for the sampled effects, which is where the inequality is tight.
    """
    min_slack, worst = np.inf, -1
    for t in range(trials):
        rng = _rng(seed, t)
        d = dims[t % len(dims)]
        rank = int(rng.integers(1, d + 1))
        rho = sampling.random_density(rng, d, rank)
        e_plus, e_minus = _effect(rng, d), _effect(rng, d)
        w = None
        if t % 2:
            half = qmat.psd_sqrt(rho)
            vals, vecs = qmat.jacobi_eigh(half @ (e_plus - e_minus) @ half)
            neg = vecs[:, vals < 0]
            w = neg @ qmat.dagger(neg)
        beta_plus, beta_minus = sampling.random_split(rng, rho, w)
        slack = check_trace_lemma(e_plus, e_minus, beta_plus, beta_minus)
        if slack < min_slack:
            min_slack, worst = slack, t
    return {"trials": trials, "min_slack": float(min_slack), "worst_trial": worst}


def _random_pure(rng, d):
    # a third of the states have deficient Schmidt rank so the 1 - Q_A term matters
    if d > 1 and rng.random() < 1 / 3:
        r = int(rng.integers(1, d))
        a = sampling.random_unitary(rng, d)[:, :r]
        b = sampling.random_unitary(rng, d)[:, :r]
        lam = rng.uniform(0.2, 1.0, r)
        lam /= np.linalg.norm(lam)
        psi = sum(lam[n] * np.kron(a[:, n], b[:, n]) for n in range(r))
    else:
        psi = sampling.random_unit_vector(rng, d * d)
    return pure_state(psi / np.linalg.norm(psi), d, d)


def gamma_suite(trials: int, seed: int = 0, dims=(2, 3, 4)) -> dict:
    """Right-inverse, unit and positivity properties of the Gamma map on random pure states."""
    out = {"trials": trials, "max_right_inverse_residual": 0.0, "max_unit_residual": 0.0,
           "min_eigenvalue_psd_image": np.inf, "povm_failures": 0}
    for t in range(trials):
        rng = _rng(seed, t)
        d = dims[t % len(dims)]
        rho = _random_pure(rng, d)
        gamma = GammaMap(rho)
        half = gamma._sqrt_rho_b
        rho_b = rho.rho_b

        k = half @ sampling.ginibre(rng, d) @ half
        res = np.linalg.norm(phi_rho(rho, gamma(k)) - k)
        out["max_right_inverse_residual"] = max(out["max_right_inverse_residual"], float(res))

        unit = np.linalg.norm(gamma(rho_b) - np.eye(d))
        out["max_unit_residual"] = max(out["max_unit_residual"], float(unit))

        # low-rank Z puts Gamma(K) on the boundary of the PSD cone
        g = sampling.ginibre(rng, d, int(rng.integers(1, d + 1)))
        z = g @ qmat.dagger(g)
        k_psd = half @ (z / np.trace(z).real) @ half
        low = qmat.min_eigenvalue_hermitian(gamma(k_psd))
        out["min_eigenvalue_psd_image"] = min(out["min_eigenvalue_psd_image"], low)

        parts = sampling.random_decomposition(rng, rho_b, int(rng.integers(2, 5)))
        try:
            povm = povm_from_decomposition(rho, PositiveDecomposition(rho_b, tuple(parts)))
            back = max(float(np.max(np.abs(phi_rho(rho, f) - b))) for f, b in zip(povm, parts))
            if back > 1e-9:
                out["povm_failures"] += 1
        except EntAssistError:
            out["povm_failures"] += 1
    return out


def nonsignaling_suite(trials: int, seed: int = 0, dims=(2, 3)) -> dict:
    """Largest marginal violation over random quantum-realized boxes."""
    worst = 0.0
    for t in range(trials):
        rng = _rng(seed, t)
        da, db = dims[t % len(dims)], dims[(t // len(dims)) % len(dims)]
        rho_m = sampling.random_density(rng, da * db, int(rng.integers(1, da * db + 1)))
        rho = DensityOperator(da, db, rho_m)
        n_ya, n_yb = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        alice = [Povm.of(sampling.random_povm_elements(rng, da, n_ya)) for _ in range(int(rng.integers(1, 4)))]
        bob = [Povm.of(sampling.random_povm_elements(rng, db, n_yb)) for _ in range(int(rng.integers(1, 4)))]
        w = realize_resource(rho, alice, bob)
        worst = max(worst, is_nonsignaling(w, 1e-10).max_violation)
    return {"trials": trials, "max_violation": worst}


def remark_suite(trials: int, seed: int = 0, dims=(2, 3), skewed=(0.9, 0.1)) -> dict:
    """Both bilinear candidates on maximally mixed rho_B, plus a skewed rho_B for exploration."""
    out = {"trials": trials, "maximally_mixed": {}, "skewed": {}}
    for cand in CANDIDATES:
        hits = 0
        for d in dims:
            hit = search_bilinear_counterexample(np.eye(d) / d, cand, trials, seed)
            hits += hit is not None
        out["maximally_mixed"][cand] = hits
        hit = search_bilinear_counterexample(np.diag(skewed).astype(complex), cand, trials, seed)
        out["skewed"][cand] = None if hit is None else {
            "trial": hit.trial, "value": hit.value, "recomputed": hit.recomputed,
        }
    return out


def run_suite(name: str, trials: int, seed: int = 0) -> dict:
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if trials < 1:
        raise UsageError("trials must be at least 1")
    return {
        "lemma2": lemma2_suite,
        "gamma": gamma_suite,
        "nonsignaling": nonsignaling_suite,
        "remark": remark_suite,
    }[name](trials, seed)
