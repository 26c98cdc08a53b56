"""Dense complex-matrix kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; every
function here is pure and returns fresh arrays. Bipartite operators use the
(A-index major, B-index minor) ordering, so ``kron(F, E)`` puts Alice first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionError, DomainError

PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class HermitianCheckReport:
    max_asymmetry: float
    min_eigenvalue: float


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-d complex array."""
    a = np.array(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def _require_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def zeros(d: int) -> np.ndarray:
    return np.zeros((d, d), dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def kron(a, b, *more) -> np.ndarray:
    """Kronecker product; entry ((i1,i2),(j1,j2)) is a[i1,j1]*b[i2,j2]."""
    mats = [as_matrix(a), as_matrix(b)] + [as_matrix(m) for m in more]
    return reduce(np.kron, mats)


def partial_trace(m, side: str, dA: int, dB: int) -> np.ndarray:
    """Trace out subsystem ``side`` ('A' or 'B') of an operator on C^dA (x) C^dB."""
    m = np.asarray(m, dtype=complex)
    n = dA * dB
    if m.shape != (n, n):
        raise DimensionError(f"operator of shape {m.shape} is not {n}x{n} for dims ({dA}, {dB})")
    t = m.reshape(dA, dB, dA, dB)
    side = side.upper()
    if side == "A":
        return np.einsum("abad->bd", t)
    if side == "B":
        return np.einsum("abcb->ac", t)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def max_asymmetry(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def jacobi_eigh(m, tol: float = 1e-15, max_sweeps: int = 64):
    """Eigen-decomposition of the Hermitian part of ``m`` by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ascending eigenvalues ``w`` and orthonormal
    eigenvectors in the columns of ``v``. The sweep runs on Python lists: for
    the 2..16 dimensional operators used here that beats per-rotation numpy
    calls by an order of magnitude.
    """
    h = hermitian_part(as_matrix(m))
    _require_square(h)
    n = h.shape[0]
    # exact power-of-two scaling to unit size keeps the rotations clear of overflow and underflow
    peak = float(np.max(np.abs(h))) if h.size else 0.0
    exp = math.frexp(peak)[1] if peak > 0.0 and math.isfinite(peak) else 0
    h = np.ldexp(h.real, -exp) + 1j * np.ldexp(h.imag, -exp)
    a = h.tolist()
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    sqrt = math.sqrt
    # the Frobenius norm is invariant under the rotations, so one absolute floor serves every sweep
    floor = 1e-3 * tol * float(np.linalg.norm(h))
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r <= floor:
                    continue
                rotated = True
                app = a[p][p].real
                aqq = a[q][q].real
                ph = (apq / r).conjugate()
                # real symmetric 2x2 problem after removing the phase of a[p][q]
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                # g = [[c, s], [-s*ph, c*ph]]; a <- g^H a g, v <- v g
                g10 = -s * ph
                g11 = c * ph
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = x * c + y * g10
                    row[q] = x * s + y * g11
                rp, rq = a[p], a[q]
                cg10, cg11 = g10.conjugate(), g11.conjugate()
                for k in range(n):
                    x, y = rp[k], rq[k]
                    rp[k] = c * x + cg10 * y
                    rq[k] = s * x + cg11 * y
                rp[q] = rq[p] = 0j
                rp[p] = complex(rp[p].real, 0.0)
                rq[q] = complex(rq[q].real, 0.0)
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = x * c + y * g10
                    row[q] = x * s + y * g11
        if not rotated:
            break
    w = np.ldexp(np.array([a[i][i].real for i in range(n)]), exp)
    vec = np.array(v, dtype=complex).reshape(n, n)
    order = np.argsort(w, kind="stable")
    return w[order], vec[:, order]


def eigvalsh(m) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian part of ``m``."""
    return jacobi_eigh(m)[0]


def min_eigenvalue_hermitian(m) -> float:
    """Smallest eigenvalue of (m + m^dagger)/2."""
    m = as_matrix(m)
    _require_square(m)
    return float(eigvalsh(m)[0])


def hermitian_check(m) -> HermitianCheckReport:
    m = as_matrix(m)
    _require_square(m)
    return HermitianCheckReport(max_asymmetry(m), min_eigenvalue_hermitian(m))


def is_psd(m, tol: float = PSD_TOL, herm_tol: float | None = None) -> bool:
    """Hermitian within ``herm_tol`` (default ``max(tol, 1e-9)``) and no eigenvalue below ``-tol``."""
    m = as_matrix(m)
    _require_square(m)
    if herm_tol is None:
        herm_tol = max(tol, HERMITIAN_TOL)
    if max_asymmetry(m) > herm_tol:
        return False
    return min_eigenvalue_hermitian(m) >= -tol


def trace_product(a, b) -> complex:
    """tr(a @ b) without forming the product."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0] or b.shape[1] != a.shape[0]:
        raise DimensionError(f"tr(ab) undefined for shapes {a.shape} and {b.shape}")
    return complex(np.sum(a * b.T))


def psd_sqrt(m, cutoff: float = 1e-14) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues below ``cutoff`` times the largest one are treated as zero:
    the square root would otherwise turn 1e-17 rounding noise into 3e-9.
    """
    w, v = jacobi_eigh(m)
    w = np.where(w > cutoff * max(w[-1], 0.0), w, 0.0)
    return (v * np.sqrt(w)) @ dagger(v)


def psd_inv_sqrt(m, cutoff: float = 1e-14) -> np.ndarray:
    """Pseudo-inverse square root of a PSD matrix (eigenvalues below ``cutoff`` ignored)."""
    w, v = jacobi_eigh(m)
    inv = np.zeros_like(w)
    keep = w > cutoff
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ dagger(v)


def projector(vec) -> np.ndarray:
    """|v><v| for a (not necessarily normalized) vector."""
    v = np.asarray(vec, dtype=complex).reshape(-1, 1)
    return v @ dagger(v)
