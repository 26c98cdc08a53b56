"""Classical channels, non-signaling resources and one-way games.

Channels are stored as column-stochastic matrices: entry ``[y, x]`` is the
probability of output ``y`` given input ``x``. Channels whose input is a
pair (x, y1) flatten it x-major, y1-minor, i.e. column ``x * n_y1 + y1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import qmat
from .errors import DimensionError, DomainError, NormalizationError

if TYPE_CHECKING:
    from .quantum import DensityOperator, Povm

NS_TOL_MEASURED = 1e-8
NS_TOL_EXACT = 1e-10


@dataclass(frozen=True)
class ClassicalChannel:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or 0 in m.shape:
            raise DimensionError(f"channel matrix must be a non-empty 2-d array, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("channel has non-finite entries")
        if m.min() < -1e-12 or m.max() > 1 + 1e-12:
            raise DomainError("channel entries must lie in [0, 1]")
        sums = m.sum(axis=0)
        err = float(np.max(np.abs(sums - 1.0)))
        if err > 1e-9:
            raise NormalizationError(f"channel columns sum to 1 only within {err:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_inputs(self) -> int:
        return self.matrix.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def shape(self):
        return self.matrix.shape

    @classmethod
    def identity(cls, n: int) -> "ClassicalChannel":
        return cls(np.eye(n))

    @classmethod
    def deterministic(cls, assignment: Sequence[int], n_outputs: int) -> "ClassicalChannel":
        m = np.zeros((n_outputs, len(assignment)))
        m[list(assignment), np.arange(len(assignment))] = 1.0
        return cls(m)

    def nonzero_rows(self, tol: float = 1e-12) -> int:
        return int(np.sum(np.any(self.matrix > tol, axis=1)))


@dataclass(frozen=True)
class NonSignalingReport:
    ok: bool
    max_violation: float
    tol: float

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class NonSignalingResource:
    """A two-party box omega(y1, y2 | x1, x2), stored as ``table[y1, y2, x1, x2]``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 4 or 0 in t.shape:
            raise DimensionError(f"resource table must be 4-d and non-empty, got shape {t.shape}")
        if t.min() < -1e-12:
            raise DomainError("resource has negative probabilities")
        err = float(np.max(np.abs(t.sum(axis=(0, 1)) - 1.0)))
        if err > 1e-9:
            raise NormalizationError(f"resource is normalized only within {err:.3e}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def sizes(self):
        """(|X1|, |X2|, |Y1|, |Y2|)."""
        ny1, ny2, nx1, nx2 = self.table.shape
        return nx1, nx2, ny1, ny2

    @classmethod
    def shared_randomness(cls, probs, f, g, n_y1: int, n_y2: int) -> "NonSignalingResource":
        """sum_s p(s) [y1 = f(s)] [y2 = g(s)] with single inputs on both sides."""
        t = np.zeros((n_y1, n_y2, 1, 1))
        for s, p in enumerate(probs):
            t[f[s], g[s], 0, 0] += p
        return cls(t)

    @classmethod
    def trivial(cls) -> "NonSignalingResource":
        return cls(np.ones((1, 1, 1, 1)))


@dataclass(frozen=True)
class Game:
    """Input distribution ``q`` over X and reward ``reward[x, y]``."""

    q: np.ndarray
    reward: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q)
        r = np.asarray(self.reward)
        if q.ndim != 1 or r.ndim != 2 or r.shape[0] != q.shape[0]:
            raise DimensionError(f"game shapes q{q.shape} and R{r.shape} are inconsistent")
        if np.any(q < 0) or abs(float(sum(q)) - 1.0) > 1e-12:
            raise NormalizationError("input distribution must be a probability vector")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "reward", r)

    @property
    def n_inputs(self) -> int:
        return self.reward.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.reward.shape[1]


@dataclass(frozen=True)
class AssistedQuantumProtocol:
    """Alice measures ``alice[x]`` (n outcomes) and sends the outcome r; Bob measures ``bob[r]``."""

    rho: "DensityOperator"
    alice: tuple
    bob: tuple

    def __post_init__(self):
        alice, bob = tuple(self.alice), tuple(self.bob)
        n = len(bob)
        if any(len(f) != n for f in alice):
            raise DimensionError(f"every Alice POVM needs exactly {n} outcomes, one per letter")
        if len({len(e) for e in bob}) > 1:
            raise DimensionError("Bob's POVMs must share one output alphabet")
        if any(f.dim != self.rho.dim_a for f in alice) or any(e.dim != self.rho.dim_b for e in bob):
            raise DimensionError("POVM dimensions do not match the shared state")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @property
    def n_letters(self) -> int:
        return len(self.bob)


def _as_channel(c) -> ClassicalChannel:
    return c if isinstance(c, ClassicalChannel) else ClassicalChannel(c)


def compose_noiseless(enc, dec) -> ClassicalChannel:
    """N(y|x) = sum_r dec(y|r) enc(r|x)."""
    enc, dec = _as_channel(enc), _as_channel(dec)
    if enc.n_outputs != dec.n_inputs:
        raise DimensionError(f"encoder has {enc.n_outputs} letters, decoder reads {dec.n_inputs}")
    return ClassicalChannel(dec.matrix @ enc.matrix)


def mix(channels: Sequence, weights) -> ClassicalChannel:
    channels = [_as_channel(c) for c in channels]
    w = np.asarray(weights, dtype=float)
    if len(channels) == 0 or w.shape != (len(channels),):
        raise DimensionError("one weight per channel required")
    if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-9:
        raise NormalizationError("mixing weights must form a probability vector")
    shape = channels[0].shape
    if any(c.shape != shape for c in channels):
        raise DimensionError("all mixed channels must have the same shape")
    return ClassicalChannel(np.einsum("s,syx->yx", w, np.stack([c.matrix for c in channels])))


def is_nonsignaling(w: NonSignalingResource, tol: float = NS_TOL_MEASURED) -> NonSignalingReport:
    """Check that neither party's input moves the other party's output marginal."""
    t = w.table
    bob_marg = t.sum(axis=0)  # [y2, x1, x2]
    alice_marg = t.sum(axis=1)  # [y1, x1, x2]
    v2 = float(np.max(bob_marg.max(axis=1) - bob_marg.min(axis=1)))
    v1 = float(np.max(alice_marg.max(axis=2) - alice_marg.min(axis=2)))
    worst = max(v1, v2)
    return NonSignalingReport(worst <= tol, worst, tol)


def assisted_channel_classical(w: NonSignalingResource, in1, enc, in2, dec,
                               ns_tol: float = NS_TOL_MEASURED) -> ClassicalChannel:
    """Channel realized by one use of an n-letter channel assisted by the box ``w``.

    in1: X -> X1, enc: X x Y1 -> [n], in2: [n] -> X2, dec: [n] x Y2 -> Y.
    """
    in1, enc, in2, dec = (_as_channel(c) for c in (in1, enc, in2, dec))
    nx1, nx2, ny1, ny2 = w.sizes
    nx = in1.n_inputs
    n = enc.n_outputs
    if in1.n_outputs != nx1:
        raise DimensionError(f"in1 selects among {in1.n_outputs} inputs, resource has {nx1}")
    if enc.n_inputs != nx * ny1:
        raise DimensionError(f"encoder must read |X|*|Y1| = {nx * ny1} columns, has {enc.n_inputs}")
    if in2.shape != (nx2, n):
        raise DimensionError(f"in2 must map {n} letters to {nx2} inputs, has shape {in2.shape}")
    if dec.n_inputs != n * ny2:
        raise DimensionError(f"decoder must read n*|Y2| = {n * ny2} columns, has {dec.n_inputs}")
    report = is_nonsignaling(w, ns_tol)
    if not report:
        raise DomainError(f"resource signals (violation {report.max_violation:.3e})")
    e = enc.matrix.reshape(n, nx, ny1)
    dd = dec.matrix.reshape(dec.n_outputs, n, ny2)
    m = np.einsum("yrb,er,rxa,abde,dx->yx", dd, in2.matrix, e, w.table, in1.matrix)
    return ClassicalChannel(m)


def assisted_channel_quantum(p: AssistedQuantumProtocol) -> ClassicalChannel:
    """N(y|x) = sum_r tr rho (F^{x}_r (x) E^{r}_y)."""
    k = len(p.bob[0])
    m = np.zeros((k, len(p.alice)))
    for x, f_x in enumerate(p.alice):
        for r, f in enumerate(f_x):
            for y, e in enumerate(p.bob[r]):
                m[y, x] += p.rho.expectation(qmat.kron(f, e)).real
    return ClassicalChannel(m)


def expected_reward(g: Game, n) -> float:
    """sum_{x,y} R(x, y) N(y|x) q(x)."""
    n = _as_channel(n)
    if g.reward.shape != (n.n_inputs, n.n_outputs):
        raise DimensionError(f"game reward {g.reward.shape} does not fit channel {n.shape}")
    return float(np.einsum("xy,yx,x->", g.reward.astype(float), n.matrix, g.q.astype(float)))
