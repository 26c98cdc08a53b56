"""States, measurements and the conditional-state map of a bipartite system.

``phi_rho`` sends an operator Z on Alice's space to tr_A[rho (Z (x) 1)] on
Bob's space. For a pure ``rho`` the map has a positive right inverse
(``GammaMap``) which turns any positive decomposition of rho_B back into a
POVM on Alice's side; this is what lets a Bob-side description of a
protocol be realized physically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmat
from .errors import DimensionError, DomainError, NormalizationError, PurityError

PURITY_TOL = 1e-9
SCHMIDT_CUTOFF = 1e-12
MEMBERSHIP_TOL = 1e-8


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityOperator:
    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.dim_a * self.dim_b
        m = qmat.as_matrix(self.matrix)
        if m.shape != (n, n):
            raise DimensionError(f"density matrix shape {m.shape} does not match dims ({self.dim_a}, {self.dim_b})")
        if abs(np.trace(m) - 1.0) > 1e-10:
            raise NormalizationError(f"trace of density operator is {np.trace(m).real:.3e}, not 1")
        if not qmat.is_psd(m, 1e-10):
            raise DomainError("density operator is not positive semidefinite")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def rho_a(self) -> np.ndarray:
        return qmat.partial_trace(self.matrix, "B", self.dim_a, self.dim_b)

    @property
    def rho_b(self) -> np.ndarray:
        return qmat.partial_trace(self.matrix, "A", self.dim_a, self.dim_b)

    def purity(self) -> float:
        return float(qmat.trace_product(self.matrix, self.matrix).real)

    def expectation(self, op) -> complex:
        return qmat.trace_product(self.matrix, op)


@dataclass(frozen=True)
class Povm:
    """A partition of unity. Zero elements are legitimate outcomes that never fire."""

    dim: int
    elements: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        elems = tuple(_freeze(qmat.as_matrix(e)) for e in self.elements)
        if not elems:
            raise DimensionError("a POVM needs at least one element")
        for e in elems:
            if e.shape != (self.dim, self.dim):
                raise DimensionError(f"POVM element of shape {e.shape} on a {self.dim}-dimensional space")
        labels = tuple(self.labels) if self.labels else tuple(range(len(elems)))
        if len(labels) != len(elems):
            raise DimensionError("one label per POVM element required")
        for i, e in enumerate(elems):
            if not qmat.is_psd(e, 1e-10):
                raise DomainError(f"POVM element {labels[i]!r} is not positive semidefinite")
        total = sum(elems)
        err = float(np.max(np.abs(total - np.eye(self.dim))))
        if err > 1e-9:
            raise NormalizationError(f"POVM elements sum to identity only within {err:.3e}")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, elements, labels=()) -> "Povm":
        elements = [qmat.as_matrix(e) for e in elements]
        return cls(elements[0].shape[0], tuple(elements), tuple(labels))

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class PositiveDecomposition:
    target: np.ndarray
    parts: tuple

    def __post_init__(self):
        target = _freeze(qmat.as_matrix(self.target))
        parts = tuple(_freeze(qmat.as_matrix(p)) for p in self.parts)
        for p in parts:
            if p.shape != target.shape:
                raise DimensionError(f"part of shape {p.shape} does not match target {target.shape}")
            if not qmat.is_psd(p, 1e-10):
                raise DomainError("decomposition part is not positive semidefinite")
        err = float(np.max(np.abs(sum(parts) - target))) if parts else float(np.max(np.abs(target)))
        if err > 1e-9:
            raise NormalizationError(f"parts sum to the target only within {err:.3e}")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "parts", parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]


@dataclass(frozen=True)
class SchmidtData:
    """psi = sum_n coefficients[n] * basis_a[:, n] (x) basis_b[:, n]."""

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def vector(self) -> np.ndarray:
        return sum(
            c * np.kron(self.basis_a[:, n], self.basis_b[:, n]) for n, c in enumerate(self.coefficients)
        )


def maximally_entangled(d: int) -> DensityOperator:
    """|Psi><Psi| with Psi = d^{-1/2} sum_n e_n (x) e_n."""
    if d < 1:
        raise DimensionError("dimension must be at least 1")
    psi = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    return DensityOperator(d, d, qmat.projector(psi))


def singlet() -> DensityOperator:
    psi = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    return DensityOperator(2, 2, qmat.projector(psi))


def pure_state(psi, dim_a: int, dim_b: int) -> DensityOperator:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dim_a * dim_b:
        raise DimensionError(f"vector of length {psi.size} for dims ({dim_a}, {dim_b})")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"state vector has norm {norm}")
    return DensityOperator(dim_a, dim_b, qmat.projector(psi))


def phi_rho(rho: DensityOperator, z) -> np.ndarray:
    """tr_A[rho (z (x) 1)], the (subnormalized) state Bob holds when Alice's effect z fires."""
    z = qmat.as_matrix(z)
    if z.shape != (rho.dim_a, rho.dim_a):
        raise DimensionError(f"operator of shape {z.shape} does not act on a {rho.dim_a}-dimensional space")
    t = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    # sum over a, a': rho[(a,b),(a',b')] z[a',a]
    return np.einsum("abcd,ca->bd", t, z)


def schmidt(psi, dA: int, dB: int, cutoff: float = SCHMIDT_CUTOFF) -> SchmidtData:
    """Schmidt decomposition from the SVD of the dA x dB coefficient matrix."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dA * dB:
        raise DimensionError(f"vector of length {psi.size} for dims ({dA}, {dB})")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"state vector has norm {norm}")
    u, s, vh = np.linalg.svd(psi.reshape(dA, dB))
    r = int(np.sum(s > cutoff))
    return SchmidtData(
        coefficients=_freeze(s[:r].copy()),
        basis_a=_freeze(u[:, :r].copy()),
        basis_b=_freeze(vh[:r, :].T.copy()),
    )


def state_vector(rho: DensityOperator) -> np.ndarray:
    """The unit vector of a pure state, up to phase; PurityError otherwise."""
    w, v = qmat.jacobi_eigh(rho.matrix)
    if len(w) > 1 and w[-2] > PURITY_TOL:
        raise PurityError(f"state is not pure: second eigenvalue {w[-2]:.3e}")
    psi = v[:, -1]
    return psi / np.linalg.norm(psi)


def _complete_basis(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a unitary whose first columns are ``cols``."""
    d, r = cols.shape
    if r == d:
        return cols
    w, v = qmat.jacobi_eigh(np.eye(d) - cols @ qmat.dagger(cols))
    return np.hstack([cols, v[:, r:]])


def antiunitary_conjugate(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """J x J for J = complex conjugation of coordinates in the unitary ``basis``."""
    return basis @ np.conj(qmat.dagger(basis) @ x @ basis) @ qmat.dagger(basis)


class GammaMap:
    """Positive right inverse of ``phi_rho`` for a pure state.

    Built once per state; calling it on K = rho_B^{1/2} Z rho_B^{1/2} returns
    J V Z* V* J + tr(K) (1 - Q_A), where V maps Bob's Schmidt vectors onto
    Alice's, Q_A = V V* and J conjugates coordinates in Alice's Schmidt basis.
    """

    def __init__(self, rho: DensityOperator):
        self.rho = rho
        self.schmidt = schmidt(state_vector(rho), rho.dim_a, rho.dim_b)
        ea, eb = self.schmidt.basis_a, self.schmidt.basis_b
        self.v = ea @ qmat.dagger(eb)
        self.q_a = self.v @ qmat.dagger(self.v)
        self.q_b = qmat.dagger(self.v) @ self.v
        self.j_basis = _complete_basis(ea)
        lam = self.schmidt.coefficients
        self._lam_outer = np.outer(lam, lam)
        self._sqrt_rho_b = (eb * lam) @ qmat.dagger(eb)

    def solve(self, k) -> np.ndarray:
        """Z supported on supp(rho_B) with rho_B^{1/2} Z rho_B^{1/2} = k (DomainError if none)."""
        k = qmat.as_matrix(k)
        if k.shape != (self.rho.dim_b, self.rho.dim_b):
            raise DimensionError(f"operator of shape {k.shape} does not act on Bob's space")
        eb = self.schmidt.basis_b
        z = eb @ ((qmat.dagger(eb) @ k @ eb) / self._lam_outer) @ qmat.dagger(eb)
        residual = np.linalg.norm(self._sqrt_rho_b @ z @ self._sqrt_rho_b - k)
        if residual > MEMBERSHIP_TOL * max(1.0, np.linalg.norm(k)):
            raise DomainError(f"operator is not supported on supp(rho_B): residual {residual:.3e}")
        return z

    def __call__(self, k) -> np.ndarray:
        z = self.solve(k)
        z_tilde = antiunitary_conjugate(self.v @ qmat.dagger(z) @ qmat.dagger(self.v), self.j_basis)
        return z_tilde + np.trace(qmat.as_matrix(k)) * (np.eye(self.rho.dim_a) - self.q_a)


def gamma_rho(rho: DensityOperator, k) -> np.ndarray:
    return GammaMap(rho)(k)


def povm_from_decomposition(rho: DensityOperator, dec: PositiveDecomposition) -> Povm:
    """Alice's POVM (F_y) with phi_rho(F_y) = beta_y for every part of ``dec``."""
    rho_b = rho.rho_b
    if dec.target.shape != rho_b.shape:
        raise DimensionError("decomposition target does not act on Bob's space")
    err = float(np.max(np.abs(dec.target - rho_b)))
    if err > 1e-9:
        raise DomainError(f"decomposition target differs from rho_B by {err:.3e}")
    gamma = GammaMap(rho)
    elements = [qmat.hermitian_part(gamma(beta)) for beta in dec.parts]
    return Povm(rho.dim_a, tuple(elements))


def conditional_states(rho: DensityOperator, alice_povm: Povm) -> PositiveDecomposition:
    if alice_povm.dim != rho.dim_a:
        raise DimensionError(f"POVM on dimension {alice_povm.dim}, Alice holds {rho.dim_a}")
    return PositiveDecomposition(rho.rho_b, tuple(phi_rho(rho, f) for f in alice_povm))


def realize_resource(rho: DensityOperator, alice: Sequence[Povm], bob: Sequence[Povm]):
    """omega(ya, yb | xa, xb) = tr rho (F^{xa}_{ya} (x) E^{xb}_{yb})."""
    from .channels import NonSignalingResource

    if not alice or not bob:
        raise DimensionError("each party needs at least one measurement")
    n_ya, n_yb = len(alice[0]), len(bob[0])
    for p in alice:
        if p.dim != rho.dim_a or len(p) != n_ya:
            raise DimensionError("Alice's POVMs must act on H_A and share one outcome set")
    for p in bob:
        if p.dim != rho.dim_b or len(p) != n_yb:
            raise DimensionError("Bob's POVMs must act on H_B and share one outcome set")
    table = np.empty((n_ya, n_yb, len(alice), len(bob)))
    for xa, fa in enumerate(alice):
        for ya, f in enumerate(fa):
            for xb, eb in enumerate(bob):
                for yb, e in enumerate(eb):
                    table[ya, yb, xa, xb] = rho.expectation(qmat.kron(f, e)).real
    return NonSignalingResource(table)
