"""Membership in C_n^SR: convex combinations of channels with at most n output symbols.

The extreme points of C_n^SR(X -> Y) are the deterministic maps [l] -> [k]
whose image has at most n elements, so membership is an LP over their
mixtures and the best classical value of any game is attained at one of
them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import lp
from .channels import ClassicalChannel, Game
from .errors import DimensionError, NumericalError, ResourceError
from .simulate import ConvexDecomposition

ENUMERATION_CAP = 10**7
LP_TOL = 1e-9


@dataclass(frozen=True, order=True)
class DeterministicChannel:
    assignment: tuple  # assignment[x] = y, 0-based

    def image(self) -> frozenset:
        return frozenset(self.assignment)

    def matrix(self, k: int) -> np.ndarray:
        m = np.zeros((k, len(self.assignment)))
        m[list(self.assignment), np.arange(len(self.assignment))] = 1.0
        return m


@dataclass(frozen=True)
class MembershipResult:
    feasible: bool
    n: int
    certificate: Optional[ConvexDecomposition] = None
    witness: Optional[Game] = None
    gap: Optional[float] = None  # witness value on the query minus its best classical value
    residual: float = 0.0

    def __bool__(self):
        return self.feasible


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    diagnostic: str = ""

    def __bool__(self):
        return self.ok


def _assignments(l: int, k: int, n: int, cap: int) -> np.ndarray:
    if min(l, k, n) < 1:
        raise DimensionError("l, k and n must be positive")
    if k**l > cap:
        raise ResourceError(f"{k}^{l} deterministic maps exceed the enumeration cap {cap}")
    allm = np.array(list(itertools.product(range(k), repeat=l)), dtype=np.int64).reshape(-1, l)
    if n >= min(k, l):
        return allm
    srt = np.sort(allm, axis=1)
    distinct = 1 + np.count_nonzero(np.diff(srt, axis=1), axis=1)
    return allm[distinct <= n]


def enumerate_deterministic(l: int, k: int, n: int, cap: int = ENUMERATION_CAP) -> list:
    """Deterministic maps [l] -> [k] with image size <= n, in lexicographic order."""
    return [DeterministicChannel(tuple(int(v) for v in row)) for row in _assignments(l, k, n, cap)]


def _extreme_matrix(assign: np.ndarray, k: int) -> np.ndarray:
    """Column m is vec(D_m) (row-major over (y, x)) for every assignment row."""
    count, l = assign.shape
    out = np.zeros((k * l, count))
    cols = np.arange(count)
    for x in range(l):
        out[assign[:, x] * l + x, cols] = 1.0
    return out


def game_values(g: Game, assign: np.ndarray):
    """Expected reward of every deterministic strategy (row of ``assign``)."""
    picked = g.reward[np.arange(assign.shape[1])[None, :], assign]
    return (picked * g.q[None, :]).sum(axis=1)


def best_classical_value(g: Game, n: int, cap: int = ENUMERATION_CAP):
    """(max expected reward over C_n^SR, the first deterministic maximizer)."""
    l, k = g.reward.shape
    assign = _assignments(l, k, n, cap)
    values = game_values(g, assign)
    best = max(range(len(values)), key=lambda m: (values[m], -m))
    return values[best], DeterministicChannel(tuple(int(v) for v in assign[best]))


def lp_classical_value(g: Game, n: int, cap: int = ENUMERATION_CAP) -> float:
    """The same optimum as ``best_classical_value`` via an LP over mixtures."""
    l, k = g.reward.shape
    assign = _assignments(l, k, n, cap)
    values = np.asarray(game_values(g, assign), dtype=float)
    res = lp.simplex(-values, np.ones((1, len(values))), [1.0])
    return -res.value


def _witness(a: np.ndarray, assign: np.ndarray) -> tuple:
    """Game with uniform q and rewards in [0, 1] maximizing value(a) - max_D value(D).

    Variables (R, t, slacks): minimize t - <R, a>/l subject to
    <R, D>/l - t <= 0 for every extreme D and R <= 1.
    """
    k, l = a.shape
    nr = k * l
    ext = _extreme_matrix(assign, k) / l  # (nr, m)
    m = ext.shape[1]
    rows = m + nr
    cols = nr + 1 + rows
    amat = np.zeros((rows, cols))
    amat[:m, :nr] = ext.T
    amat[:m, nr] = -1.0
    amat[m:, :nr] = np.eye(nr)
    amat[:, nr + 1:] = np.eye(rows)
    b = np.concatenate([np.zeros(m), np.ones(nr)])
    c = np.zeros(cols)
    c[:nr] = -a.reshape(nr) / l
    c[nr] = 1.0
    res = lp.simplex(c, amat, b, basis=list(range(nr + 1, cols)))
    if res.status != lp.OPTIMAL:
        raise NumericalError(f"witness LP ended with status {res.status}")
    reward = np.clip(res.x[:nr].reshape(k, l).T, 0.0, 1.0)
    game = Game(np.full(l, 1.0 / l), reward)
    return game, -res.value


def in_cn_sr(a, n: int, tol: float = LP_TOL, cap: int = ENUMERATION_CAP) -> MembershipResult:
    """Decide whether ``a`` is a mixture of channels using at most ``n`` output symbols."""
    a = a if isinstance(a, ClassicalChannel) else ClassicalChannel(a)
    k, l = a.shape
    assign = _assignments(l, k, n, cap)
    ext = _extreme_matrix(assign, k)
    a_eq = np.vstack([ext, np.ones((1, ext.shape[1]))])
    b_eq = np.concatenate([a.matrix.reshape(k * l), [1.0]])
    res = lp.simplex(np.zeros(ext.shape[1]), a_eq, b_eq, feas_tol=tol)
    if res.status == lp.OPTIMAL:
        lam = res.x
        keep = np.nonzero(lam > 1e-15)[0]
        weights = lam[keep] / lam[keep].sum()
        comps = np.stack([DeterministicChannel(tuple(assign[m])).matrix(k) for m in keep])
        cert = ConvexDecomposition(weights, comps)
        return MembershipResult(True, n, certificate=cert, residual=res.phase1_residual)
    game, gap = _witness(a.matrix, assign)
    return MembershipResult(False, n, witness=game, gap=gap, residual=res.phase1_residual)


def verify_cn_sr_certificate(a, cert: ConvexDecomposition, n: int, tol: float = 1e-8) -> CertificateCheck:
    """Check weights, stochasticity, row support <= n and reconstruction, reporting the first failure."""
    a = a if isinstance(a, ClassicalChannel) else ClassicalChannel(a)
    w, comps = cert.weights, cert.components
    if comps.shape[1:] != a.shape:
        return CertificateCheck(False, f"shape: components are {comps.shape[1:]}, channel is {a.shape}")
    if np.any(w < -tol) or abs(w.sum() - 1.0) > tol:
        return CertificateCheck(False, "weights: not a probability vector")
    for m, c in enumerate(comps):
        if np.any(c < -tol) or np.max(np.abs(c.sum(axis=0) - 1.0)) > tol:
            return CertificateCheck(False, f"stochastic: component {m} is not column-stochastic")
        rows = int(np.sum(np.any(c > 1e-12, axis=1)))
        if rows > n:
            return CertificateCheck(False, f"row-support: component {m} uses {rows} > {n} rows")
    err = cert.reconstruction_error(a)
    if err > tol:
        return CertificateCheck(False, f"reconstruction: error {err:.3e} exceeds {tol:.1e}")
    return CertificateCheck(True)
