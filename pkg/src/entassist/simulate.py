"""Simulating an entanglement-assisted bit by two classical bits.

Given Bob's two POVMs E^+ and E^- (k outcomes each) and, for every input j,
a split beta_+^(j) + beta_-^(j) = 1/d, the channel

    a_ij = tr E^+_i beta_+^(j) + tr E^-_i beta_-^(j)

is rewritten as sum_I p_I B(I) where I ranges over [k]^4,

    p_I = d^-2 tr(E^+_{i1} E^-_{i2}) tr(E^+_{i3} E^-_{i4}),

and each B(I) is stochastic and supported on the (at most four) indices
occurring in I. The column B(I)[:, j] comes from a transportation plan
between P and the j-th column of the channel along the edges "i occurs in
I"; the trace inequality in ``check_trace_lemma`` is exactly Hall's
condition for that plan to exist.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import qmat, sampling
from .channels import ClassicalChannel
from .errors import DimensionError, DomainError, InfeasibleError, NormalizationError, NumericalError
from .flow import max_flow

ATOM_CUTOFF = 1e-12
UNMET_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-8
VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class TheoremInstance:
    d: int
    e_plus: tuple
    e_minus: tuple
    betas: tuple  # ((beta_plus, beta_minus), ...) one pair per input j
    target: ClassicalChannel

    def __post_init__(self):
        d = self.d
        e_plus = tuple(qmat.as_matrix(e) for e in self.e_plus)
        e_minus = tuple(qmat.as_matrix(e) for e in self.e_minus)
        betas = tuple((qmat.as_matrix(bp), qmat.as_matrix(bm)) for bp, bm in self.betas)
        if len(e_plus) != len(e_minus) or not e_plus:
            raise DimensionError("E+ and E- must have the same, positive number of elements")
        for name, fam in (("E+", e_plus), ("E-", e_minus)):
            if any(e.shape != (d, d) for e in fam):
                raise DimensionError(f"{name} elements must be {d}x{d}")
            err = float(np.max(np.abs(sum(fam) - np.eye(d))))
            if err > 1e-9:
                raise NormalizationError(f"{name} sums to the identity only within {err:.3e}")
        for j, (bp, bm) in enumerate(betas):
            if bp.shape != (d, d) or bm.shape != (d, d):
                raise DimensionError(f"beta pair {j} must be {d}x{d}")
            err = float(np.max(np.abs(bp + bm - np.eye(d) / d)))
            if err > 1e-9:
                raise NormalizationError(f"beta pair {j} sums to 1/d only within {err:.3e}")
        if self.target.shape != (len(e_plus), len(betas)):
            raise DimensionError(f"target shape {self.target.shape} is not k x l = {(len(e_plus), len(betas))}")
        object.__setattr__(self, "e_plus", e_plus)
        object.__setattr__(self, "e_minus", e_minus)
        object.__setattr__(self, "betas", betas)

    @classmethod
    def build(cls, d: int, e_plus, e_minus, betas) -> "TheoremInstance":
        """Compute the target channel a_ij from its ingredients."""
        return cls(d, tuple(e_plus), tuple(e_minus), tuple(betas), ClassicalChannel(target_matrix(e_plus, e_minus, betas)))

    @property
    def k(self) -> int:
        return len(self.e_plus)

    @property
    def l(self) -> int:
        return len(self.betas)


def target_matrix(e_plus, e_minus, betas) -> np.ndarray:
    a = np.empty((len(e_plus), len(betas)))
    for j, (bp, bm) in enumerate(betas):
        for i in range(len(e_plus)):
            a[i, j] = (qmat.trace_product(e_plus[i], bp) + qmat.trace_product(e_minus[i], bm)).real
    # rounding may leave entries at -1e-17
    return np.clip(a, 0.0, None)


@dataclass(frozen=True)
class PMeasure:
    k: int
    atoms: dict  # (i1, i2, i3, i4) -> p_I > 0, 0-based indices

    def total(self) -> float:
        return math.fsum(self.atoms.values())

    def mass(self, subset) -> float:
        """P(S^4)."""
        s = set(subset)
        return math.fsum(p for idx, p in self.atoms.items() if s.issuperset(idx))


@dataclass(frozen=True)
class TransportPlan:
    k: int
    flows: dict  # (I, i) -> mass, only on edges with i in I

    def row_marginals(self) -> dict:
        out = {}
        for (atom, _), m in self.flows.items():
            out[atom] = out.get(atom, 0.0) + m
        return out

    def column_marginals(self) -> np.ndarray:
        out = np.zeros(self.k)
        for (_, i), m in self.flows.items():
            out[i] += m
        return out


@dataclass(frozen=True)
class ConvexDecomposition:
    """sum_m weights[m] * components[m]; components are k x l stochastic matrices."""

    weights: np.ndarray
    components: np.ndarray
    atom_index: Optional[tuple] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        c = np.asarray(self.components, dtype=float)
        if c.ndim != 3 or w.shape != (c.shape[0],):
            raise DimensionError(f"need one weight per k x l component, got {w.shape} and {c.shape}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", c)

    def __len__(self):
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("m,myx->yx", self.weights, self.components)

    def reconstruction_error(self, target) -> float:
        t = target.matrix if isinstance(target, ClassicalChannel) else np.asarray(target)
        return float(np.max(np.abs(self.reconstruct() - t)))

    def row_supports(self, tol: float = 1e-12) -> list:
        return [int(np.sum(np.any(c > tol, axis=1))) for c in self.components]

    def max_support(self, tol: float = 1e-12) -> int:
        return max(self.row_supports(tol), default=0)


def p_measure(instance: TheoremInstance, cutoff: float = ATOM_CUTOFF) -> PMeasure:
    """Atoms p_I above ``cutoff``, rescaled so the kept mass is exactly 1."""
    k, d = instance.k, instance.d
    cross = np.array([[qmat.trace_product(ep, em).real for em in instance.e_minus] for ep in instance.e_plus])
    p = np.einsum("ab,ce->abce", cross, cross) / d**2
    if p.min() < -cutoff:
        raise NumericalError(f"negative atom {p.min():.3e}: E+ or E- is not positive semidefinite")
    keep = np.argwhere(p > cutoff)
    total = math.fsum(p[tuple(idx)] for idx in keep)
    if abs(total - 1.0) > 1e-9:
        raise NumericalError(f"p-measure has total mass {total!r}")
    atoms = {tuple(int(i) for i in idx): float(p[tuple(idx)] / total) for idx in keep}
    return PMeasure(k, atoms)


def transport_solve(p: PMeasure, column, floor: float = 1e-12) -> TransportPlan:
    """A joint law of (I, i) with marginals P and ``column``, carried by the edges i in I.

    Atoms with the same index set are interchangeable, so the flow problem is
    solved between index sets and split back onto atoms in proportion to p_I.
    """
    a = np.asarray(column, dtype=float)
    if a.shape != (p.k,):
        raise DimensionError(f"column has shape {a.shape}, expected ({p.k},)")
    if abs(a.sum() - 1.0) > 1e-9 or abs(p.total() - 1.0) > 1e-9:
        raise NormalizationError("both marginals must be probability measures")

    groups: dict = {}
    for atom in sorted(p.atoms):
        groups.setdefault(frozenset(atom), []).append(atom)
    keys = list(groups)
    supply = [math.fsum(p.atoms[atom] for atom in groups[s]) for s in keys]
    ng, k = len(keys), p.k
    source, sink = 0, ng + k + 1
    cap = np.zeros((ng + k + 2, ng + k + 2))
    for g, s in enumerate(keys):
        cap[source, 1 + g] = supply[g]
        for i in sorted(s):
            # uncapacitated middle edges keep the minimum cut a Hall witness
            cap[1 + g, 1 + ng + i] = 2.0
    cap[1 + ng: 1 + ng + k, sink] = a
    value, flow, reachable = max_flow(cap, source, sink, floor=floor)

    unmet = math.fsum(supply) - value
    if unmet > UNMET_TOL:
        hidden = [s for g, s in enumerate(keys) if reachable[1 + g]]
        witness = set().union(*hidden)
        raise InfeasibleError(
            f"transport infeasible: {unmet:.3e} of supply cannot be routed", witness=witness, deficit=unmet
        )

    flows = {}
    for g, s in enumerate(keys):
        for i in sorted(s):
            f = flow[1 + g, 1 + ng + i]
            if f <= 0.0:
                continue
            for atom in groups[s]:
                flows[(atom, i)] = p.atoms[atom] * f / supply[g]
    return TransportPlan(k, flows)


def decompose_theorem(instance: TheoremInstance) -> ConvexDecomposition:
    """Weights p_I and stochastic B(I), each supported on the indices of I, with sum p_I B(I) = A."""
    p = p_measure(instance)
    atoms = sorted(p.atoms)
    pos = {atom: m for m, atom in enumerate(atoms)}
    k, l = instance.k, instance.l
    comps = np.zeros((len(atoms), k, l))
    target = instance.target.matrix
    for j in range(l):
        plan = transport_solve(p, target[:, j])
        for (atom, i), f in plan.flows.items():
            comps[pos[atom], i, j] += f
        sums = comps[:, :, j].sum(axis=1)
        for m, atom in enumerate(atoms):
            if sums[m] > 0.0:
                comps[m, :, j] /= sums[m]
            else:
                # an atom left entirely below the augmentation floor; any index of I keeps the support
                comps[m, atom[0], j] = 1.0
    dec = ConvexDecomposition(np.array([p.atoms[a] for a in atoms]), comps, tuple(atoms))
    err = dec.reconstruction_error(target)
    if err > RECONSTRUCTION_TOL:
        raise NumericalError(f"decomposition reconstructs the channel only within {err:.3e}")
    return dec


@dataclass(frozen=True)
class HallReport:
    min_slack: float
    worst_set: tuple
    worst_column: int


def hall_condition(instance: TheoremInstance) -> HallReport:
    """min over S and j of A_j(S) - P(S^4), with P(S^4) = d^-2 (tr E+_S E-_S)^2."""
    k, d = instance.k, instance.d
    a = instance.target.matrix
    best = (math.inf, (), -1)
    for r in range(1, k + 1):
        for s in itertools.combinations(range(k), r):
            ep = sum(instance.e_plus[i] for i in s)
            em = sum(instance.e_minus[i] for i in s)
            ps4 = qmat.trace_product(ep, em).real ** 2 / d**2
            col = a[list(s), :].sum(axis=0)
            j = int(np.argmin(col))
            slack = float(col[j] - ps4)
            if slack < best[0]:
                best = (slack, s, j)
    return HallReport(*best)


def _check_effect(name: str, e: np.ndarray, tol: float = 1e-9) -> None:
    if not qmat.is_psd(e, tol):
        raise DomainError(f"{name} is not positive semidefinite")
    if not qmat.is_psd(np.eye(e.shape[0]) - e, tol):
        raise DomainError(f"{name} exceeds the identity")


def check_trace_lemma(e_plus, e_minus, beta_plus, beta_minus) -> float:
    """(tr E+ b+ + tr E- b-) - |tr E+ E- rho_B|^2 for rho_B = b+ + b-; nonnegative in exact arithmetic."""
    e_plus, e_minus = qmat.as_matrix(e_plus), qmat.as_matrix(e_minus)
    beta_plus, beta_minus = qmat.as_matrix(beta_plus), qmat.as_matrix(beta_minus)
    shape = e_plus.shape
    if any(m.shape != shape for m in (e_minus, beta_plus, beta_minus)) or shape[0] != shape[1]:
        raise DimensionError("all four operators must be square of the same size")
    _check_effect("E+", e_plus)
    _check_effect("E-", e_minus)
    if not qmat.is_psd(beta_plus, 1e-10):
        raise DomainError("beta+ is not positive semidefinite")
    if not qmat.is_psd(beta_minus, 1e-10):
        raise DomainError("beta- is not positive semidefinite")
    rho_b = beta_plus + beta_minus
    if abs(np.trace(rho_b) - 1.0) > 1e-9:
        raise DomainError(f"beta+ + beta- has trace {np.trace(rho_b).real!r}, not 1")
    rhs = (qmat.trace_product(e_plus, beta_plus) + qmat.trace_product(e_minus, beta_minus)).real
    lhs = abs(qmat.trace_product(e_plus @ e_minus, rho_b)) ** 2
    return float(rhs - lhs)


CANDIDATES = ("symmetrized", "sqrt_sandwich")


@dataclass(frozen=True)
class BilinearViolation:
    """A random instance on which a bilinear candidate breaks a requirement.

    For ``symmetrized`` ``value`` is D(Z1, Z2) < 0 on PSD Z1 = ``ops[0]``,
    Z2 = ``ops[1]``. For ``sqrt_sandwich`` it is the slack
    tr E+ b+ + tr E- b- - |D(E+, E-)|^2 < 0 with ``ops`` = (E+, E-, b+, b-).
    ``recomputed`` is the same quantity re-evaluated with compensated sums.
    """

    candidate: str
    trial: int
    value: float
    recomputed: float
    ops: tuple


def _fsum_trace(a: np.ndarray, b: np.ndarray) -> complex:
    """tr(ab) with compensated summation."""
    prods = (a * b.T).ravel()
    return complex(math.fsum(prods.real), math.fsum(prods.imag))


def _fsum_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[1]
    out = np.empty((n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            prods = a[i, :] * b[:, j]
            out[i, j] = complex(math.fsum(prods.real), math.fsum(prods.imag))
    return out


def bilinear_d(candidate: str, z1, z2, rho_b, sqrt_rho=None) -> float:
    if candidate == "symmetrized":
        return float(qmat.trace_product(z1 @ z2, rho_b).real)
    if candidate == "sqrt_sandwich":
        h = qmat.psd_sqrt(rho_b) if sqrt_rho is None else sqrt_rho
        return float(qmat.trace_product(z1 @ h, z2 @ h).real)
    raise ValueError(f"unknown candidate {candidate!r}; expected one of {CANDIDATES}")


def _recompute(candidate: str, ops: tuple, rho_b: np.ndarray, sqrt_rho: np.ndarray) -> float:
    if candidate == "symmetrized":
        z1, z2 = ops
        return _fsum_trace(_fsum_matmul(z1, z2), rho_b).real
    e_plus, e_minus, beta_plus, beta_minus = ops
    dval = _fsum_trace(_fsum_matmul(e_plus, sqrt_rho), _fsum_matmul(e_minus, sqrt_rho)).real
    rhs = math.fsum([_fsum_trace(e_plus, beta_plus).real, _fsum_trace(e_minus, beta_minus).real])
    return rhs - dval * dval


def _sample_psd_effect(rng: np.random.Generator, d: int) -> np.ndarray:
    # extreme effects (projectors) are where violations live; mix in interior ones
    if rng.random() < 0.5:
        return sampling.random_projector(rng, d)
    return sampling.random_contraction(rng, d)


def search_bilinear_counterexample(rho_b, candidate: str, trials: int, seed: int = 0,
                                   tol: float = VIOLATION_TOL) -> Optional[BilinearViolation]:
    """Random search for a requirement violated by a bilinear replacement of tr(Z1 Z2)/d.

    ``symmetrized``: D = Re tr Z1 Z2 rho_B, searched for D < 0 on PSD pairs.
    ``sqrt_sandwich``: D = tr Z1 rho^{1/2} Z2 rho^{1/2}, searched for
    |D(E+, E-)|^2 > tr E+ b+ + tr E- b-. Two thirds of the trials use the
    split of rho_B that minimizes the right-hand side for the sampled effects,
    and of those half take E- as the mirror image of a rank-one projector E+
    under sign flips in the eigenbasis of rho_B, which is where violations
    concentrate. Returns the first hit that survives recomputation, or None.
    """
    if candidate not in CANDIDATES:
        raise ValueError(f"unknown candidate {candidate!r}; expected one of {CANDIDATES}")
    rho_b = qmat.as_matrix(rho_b)
    if not qmat.is_psd(rho_b, 1e-10) or abs(np.trace(rho_b) - 1.0) > 1e-9:
        raise DomainError("rho_B must be a density operator")
    d = rho_b.shape[0]
    rng = np.random.default_rng(seed)
    sqrt_rho = qmat.psd_sqrt(rho_b)
    _, rho_basis = qmat.jacobi_eigh(rho_b)
    for t in range(trials):
        if candidate == "symmetrized":
            ops = (_sample_psd_effect(rng, d), _sample_psd_effect(rng, d))
            value = bilinear_d(candidate, *ops, rho_b)
        else:
            mode = t % 3
            if mode == 2:
                e_plus = sampling.random_projector(rng, d, 1)
                flip = rho_basis @ np.diag(rng.choice([-1.0, 1.0], d)) @ qmat.dagger(rho_basis)
                e_minus = flip @ e_plus @ flip
            else:
                e_plus, e_minus = _sample_psd_effect(rng, d), _sample_psd_effect(rng, d)
            if mode:
                # W = projector on the negative part of rho^{1/2} (E+ - E-) rho^{1/2}
                w_eig, w_vec = qmat.jacobi_eigh(sqrt_rho @ (e_plus - e_minus) @ sqrt_rho)
                neg = w_vec[:, w_eig < 0]
                w = neg @ qmat.dagger(neg)
            else:
                w = None
            beta_plus, beta_minus = sampling.random_split(rng, rho_b, w)
            ops = (e_plus, e_minus, beta_plus, beta_minus)
            dval = bilinear_d(candidate, e_plus, e_minus, rho_b, sqrt_rho)
            rhs = (qmat.trace_product(e_plus, beta_plus) + qmat.trace_product(e_minus, beta_minus)).real
            value = float(rhs - dval * dval)
        if value < -tol:
            again = _recompute(candidate, ops, rho_b, sqrt_rho)
            if again < -tol:
                return BilinearViolation(candidate, t, value, again, ops)
    return None


def random_theorem_instance(rng: np.random.Generator, d: int, k: int, l: int) -> TheoremInstance:
    """E+- as normalized G^*G POVMs; beta_+ = (1/d)^{1/2} W (1/d)^{1/2} for a random contraction W."""
    e_plus = sampling.random_povm_elements(rng, d, k)
    e_minus = sampling.random_povm_elements(rng, d, k)
    betas = []
    for _ in range(l):
        w = sampling.random_contraction(rng, d)
        betas.append((w / d, (np.eye(d) - w) / d))
    return TheoremInstance.build(d, e_plus, e_minus, betas)
