"""Seeded random generators for states, effects, POVMs and decompositions."""

from __future__ import annotations

import numpy as np

from . import qmat


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, d))
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = ginibre(rng, n, 1).reshape(n)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    g = ginibre(rng, d, d if rank is None else rank)
    m = g @ qmat.dagger(g)
    return m / np.trace(m).real


def random_contraction(rng: np.random.Generator, d: int) -> np.ndarray:
    """Hermitian W with 0 <= W <= 1: Haar eigenbasis, uniform eigenvalues."""
    u = random_unitary(rng, d)
    return (u * rng.uniform(0.0, 1.0, d)) @ qmat.dagger(u)


def random_projector(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    rank = int(rng.integers(0, d + 1)) if rank is None else rank
    u = random_unitary(rng, d)[:, :rank]
    return u @ qmat.dagger(u)


def random_povm_elements(rng: np.random.Generator, d: int, k: int) -> list:
    """E_i = S^{-1/2} G_i^* G_i S^{-1/2} with S = sum_i G_i^* G_i."""
    blocks = [ginibre(rng, d) for _ in range(k)]
    gram = [qmat.dagger(g) @ g for g in blocks]
    s_inv = qmat.psd_inv_sqrt(sum(gram))
    elems = [qmat.hermitian_part(s_inv @ m @ s_inv) for m in gram]
    # absorb rounding so the elements sum to the identity to machine precision
    elems[-1] = np.eye(d) - sum(elems[:-1])
    return elems


def random_split(rng: np.random.Generator, rho: np.ndarray, w: np.ndarray | None = None):
    """Two-part positive decomposition rho^{1/2} W rho^{1/2} + rho^{1/2} (1 - W) rho^{1/2}."""
    d = rho.shape[0]
    w = random_contraction(rng, d) if w is None else w
    half = qmat.psd_sqrt(rho)
    plus = qmat.hermitian_part(half @ w @ half)
    return plus, qmat.hermitian_part(rho - plus)


def random_decomposition(rng: np.random.Generator, rho: np.ndarray, parts: int) -> list:
    """``parts`` PSD operators summing to rho, via a random POVM sandwiched by rho^{1/2}."""
    half = qmat.psd_sqrt(rho)
    elems = random_povm_elements(rng, rho.shape[0], parts)
    out = [qmat.hermitian_part(half @ e @ half) for e in elems]
    out[-1] = qmat.hermitian_part(rho - sum(out[:-1]))
    return out
