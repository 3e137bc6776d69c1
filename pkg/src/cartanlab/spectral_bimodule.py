"""Spectral sets, the join-span lattice, the correspondence with diagonal
bimodules of the generated algebra, intermediate algebras, and the
classification of maximal subdiagonal/triangular subalgebras.

A spectral set is modeled as a frozenset of monoid elements containing the
zero map, downward closed, and closed under orthogonal joins.  Closure in
the matrix picture is a no-op here (every linear subspace of a finite
matrix space is closed in all the relevant topologies), which reports note
explicitly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvariantViolation, SizeGuardError
from .extension import Extension, Section
from .kernel_rep import DEFAULT_TOL, RBasis, RepSpace
from .semigroup_core import (
    FiniteInverseMonoid,
    PartialBijection,
    are_orthogonal,
    compose,
    dagger,
    natural_leq,
    orthogonal_join,
)
from .vn_oracle import (
    MatrixAlgebra,
    _nullspace_dimension,
    _pattern_intersection,
    _pattern_positions,
    contains_matrix,
    subspace_basis,
)

__all__ = [
    "SPECTRAL_GUARD",
    "Bimodule",
    "is_spectral_set",
    "spectral_closure",
    "join_span",
    "enumerate_spectral_sets",
    "psi",
    "theta",
    "theta_gn",
    "full_submonoids",
    "aoi_correspondence",
    "intermediate_algebra_check",
    "msd",
    "mtr",
    "verify_subdiagonal",
]

SPECTRAL_GUARD = 25

CLOSURE_NOTE = "finite dimension: linear subspaces are closed in every relevant topology"


def is_spectral_set(S: FiniteInverseMonoid, A) -> bool:
    """Contains 0, downward closed, closed under orthogonal joins."""
    A = frozenset(A)
    if S.zero not in A:
        return False
    for s in A:
        for t in S:
            if natural_leq(t, s) and t not in A:
                return False
    for s, t in itertools.combinations(A, 2):
        if are_orthogonal(s, t):
            if orthogonal_join([s, t]) not in A:
                return False
    return True


def spectral_closure(S: FiniteInverseMonoid, gen) -> frozenset:
    """Least spectral set containing the generators."""
    cur = set(gen) | {S.zero}
    while True:
        new = set()
        for s in cur:
            for t in S:
                if natural_leq(t, s) and t not in cur:
                    new.add(t)
        for s, t in itertools.combinations(cur, 2):
            if are_orthogonal(s, t):
                join = orthogonal_join([s, t])
                if join not in S:
                    raise DomainError("orthogonal join escapes the monoid; S is not complete")
                if join not in cur:
                    new.add(join)
        if not new:
            return frozenset(cur)
        cur |= new


def join_span(S: FiniteInverseMonoid, A1, A2) -> frozenset:
    """Smallest spectral set containing both operands.

    Computed twice: as the spectral closure of the union, and directly as
    the orthogonal-split set {s = s1 v s2 : s1 in A1, s2 in A2, s1 _|_ s2}.
    The two must agree; disagreement raises.
    """
    A1, A2 = frozenset(A1), frozenset(A2)
    closure = spectral_closure(S, A1 | A2)
    direct = set()
    for s in S:
        for s1 in A1:
            if not natural_leq(s1, s):
                continue
            s2 = s.restrict(s.domain & ~s1.domain)
            if s2 in A2:
                direct.add(s)
                break
    if frozenset(direct) != closure:
        raise InvariantViolation("join span formula disagrees with spectral closure")
    return closure


def minimal_nonzero_elements(S: FiniteInverseMonoid) -> list[PartialBijection]:
    out = []
    for s in S:
        if s.is_zero():
            continue
        if not any(
            not t.is_zero() and t != s and natural_leq(t, s) for t in S
        ):
            out.append(s)
    return out


def enumerate_spectral_sets(S: FiniteInverseMonoid, guard: int = SPECTRAL_GUARD) -> list[frozenset]:
    """All spectral sets, indexed by their trace on the minimal elements.

    A spectral set is determined by which minimal nonzero elements it
    contains (downward closure recovers the trace, join closure recovers
    the set), so enumeration walks the 2^m subsets of minimals.  Every
    candidate is validated before being returned.
    """
    minimals = minimal_nonzero_elements(S)
    if len(minimals) > guard:
        raise SizeGuardError(2 ** len(minimals), 2**guard, "spectral set enumeration")
    out = []
    for r in range(len(minimals) + 1):
        for combo in itertools.combinations(minimals, r):
            A = spectral_closure(S, combo)
            if not is_spectral_set(S, A):
                raise InvariantViolation(f"closure of {combo} is not spectral")
            out.append(A)
    if len(set(out)) != len(out):
        raise InvariantViolation("distinct minimal traces produced equal spectral sets")
    return out


@dataclass
class Bimodule:
    """A diagonal-invariant subspace of the generated matrix algebra."""

    basis: list
    rbasis: RBasis
    closure_note: str = CLOSURE_NOTE
    left_invariant: bool = True
    right_invariant: bool = True

    @property
    def dimension(self):
        return len(self.basis)

    def contains(self, M, tol: float = DEFAULT_TOL) -> bool:
        return contains_matrix(self.basis, M, tol)


def psi(rs: RepSpace, A, tol: float = DEFAULT_TOL) -> Bimodule:
    """Linear span of the represented section over a spectral set.

    The result is automatically invariant under both diagonal actions;
    invariance is verified, not assumed.
    """
    mats = [rs.lam_of(s) for s in sorted(A, key=lambda s: (s.domain, s.image))]
    basis = subspace_basis(mats, tol)
    d_basis = [rs.lam(p) for p in rs.ext.phased_identities]
    left = all(contains_matrix(basis, d @ b, tol) for d in d_basis for b in basis)
    right = all(contains_matrix(basis, b @ d, tol) for d in d_basis for b in basis)
    if not (left and right):
        raise InvariantViolation("span of a spectral set is not diagonal-invariant")
    return Bimodule(basis, rs.rbasis, CLOSURE_NOTE, left, right)


def theta(rs: RepSpace, B: Bimodule, tol: float = DEFAULT_TOL, check_gn: bool = True) -> frozenset:
    """Elements of S whose represented section lies in the bimodule.

    Phase absorption makes this independent of the section; when check_gn
    is set, the normalizer-based reading (graphs implemented by unimodular
    elements of B) is computed as well and must agree.
    """
    members = frozenset(s for s in rs.ext.S if B.contains(rs.lam_of(s), tol))
    if check_gn:
        gn = theta_gn(rs, B, tol)
        if gn != members:
            raise InvariantViolation("section-based and normalizer-based readings differ")
    return members


def theta_gn(rs: RepSpace, B: Bimodule, tol: float = DEFAULT_TOL) -> frozenset:
    """Normalizer-based reading: s is included iff B contains an element
    supported exactly on the transport pattern of s with unimodular entries."""
    rbasis = rs.rbasis
    alg = MatrixAlgebra(B.basis, rbasis)
    out = set()
    for s in rs.ext.S:
        if s.is_zero():
            out.add(s)
            continue
        positions = _pattern_positions(rbasis, s)
        inter = _pattern_intersection(alg, positions, tol)
        if len(inter) != s.domain.bit_count():
            continue
        ok = True
        for x, y in s.pairs():
            grp = [(r, c) for (r, c) in positions if rbasis.pairs[c][0] == y]
            sub = PartialBijection(rbasis.atom_count, 1 << y, (x,))
            pg = _pattern_positions(rbasis, sub)
            gi = _pattern_intersection(alg, pg, tol)
            if len(gi) != 1:
                ok = False
                break
            vals = np.array([gi[0][r, c] for r, c in pg])
            mods = np.abs(vals)
            if mods.min() <= tol or mods.max() - mods.min() > 1e-6 * mods.max():
                ok = False
                break
        if ok:
            out.add(s)
    return frozenset(out)


def full_submonoids(S: FiniteInverseMonoid, guard: int = SPECTRAL_GUARD) -> list[frozenset]:
    """Spectral sets that are dagger-closed submonoids containing all
    idempotents (full Cartan inverse submonoids)."""
    idem = set(S.idempotents())
    out = []
    for A in enumerate_spectral_sets(S, guard):
        if not idem <= A:
            continue
        if any(dagger(s) not in A for s in A):
            continue
        if any(compose(s, t) not in A for s in A for t in A):
            continue
        out.append(A)
    return out


@dataclass
class AoiReport:
    submonoid_count: int
    algebra_dims: list
    bijective: bool
    closure_note: str = CLOSURE_NOTE

    def to_lines(self):
        return [
            f"full_submonoids: {self.submonoid_count}",
            f"intermediate_algebra_dims: {self.algebra_dims}",
            f"bijective: {'pass' if self.bijective else 'FAIL'}",
            f"note: {self.closure_note}",
        ]


def intermediate_algebra_check(rs: RepSpace, T, tol: float = DEFAULT_TOL) -> Bimodule:
    """Check that the span of one full submonoid is an intermediate algebra:
    unital, self-adjoint, product closed, containing the diagonal."""
    B = psi(rs, T, tol)
    dim = len(rs.rbasis)
    if not B.contains(np.eye(dim, dtype=complex), tol):
        raise InvariantViolation("intermediate span is not unital")
    for b in B.basis:
        if not B.contains(b.conj().T, tol):
            raise InvariantViolation("intermediate span is not self-adjoint")
    for a in B.basis:
        for b in B.basis:
            if not B.contains(a @ b, tol):
                raise InvariantViolation("intermediate span is not product closed")
    for p in rs.ext.phased_identities:
        if not B.contains(rs.lam(p), tol):
            raise InvariantViolation("intermediate span does not contain the diagonal")
    return B


def aoi_correspondence(rs: RepSpace, guard: int = SPECTRAL_GUARD, tol: float = DEFAULT_TOL) -> AoiReport:
    """Full submonoids against the algebra side, both directions.

    Forward: each full submonoid spans an intermediate algebra.  Backward:
    every spectral set whose span is a unital self-adjoint product-closed
    algebra containing the diagonal arises this way, and theta returns the
    submonoid it came from.
    """
    S = rs.ext.S
    monoids = full_submonoids(S, guard)
    algebras = []
    for T in monoids:
        B = intermediate_algebra_check(rs, T, tol)
        if theta(rs, B, tol) != T:
            raise InvariantViolation("theta does not invert psi on a full submonoid")
        algebras.append(B)

    dim = len(rs.rbasis)
    eye = np.eye(dim, dtype=complex)
    algebra_like = 0
    for A in enumerate_spectral_sets(S, guard):
        B = psi(rs, A, tol)
        if not B.contains(eye, tol):
            continue
        if any(not B.contains(b.conj().T, tol) for b in B.basis):
            continue
        if any(not B.contains(a @ b, tol) for a in B.basis for b in B.basis):
            continue
        if any(not B.contains(rs.lam(p), tol) for p in rs.ext.phased_identities):
            continue
        algebra_like += 1
    bijective = algebra_like == len(monoids)
    return AoiReport(len(monoids), sorted(b.dimension for b in algebras), bijective)


def _is_spectral_monoid(S: FiniteInverseMonoid, A) -> bool:
    idem = set(S.idempotents())
    if not idem <= A:
        return False
    return all(compose(s, t) in A for s in A for t in A)


def msd(S: FiniteInverseMonoid, guard: int = SPECTRAL_GUARD) -> list[frozenset]:
    """Spectral monoids containing all idempotents whose join span with
    their dagger recovers the whole monoid."""
    full = frozenset(S.elements)
    out = []
    for A in enumerate_spectral_sets(S, guard):
        if not _is_spectral_monoid(S, A):
            continue
        if join_span(S, A, frozenset(dagger(s) for s in A)) == full:
            out.append(A)
    return out


def mtr(S: FiniteInverseMonoid, guard: int = SPECTRAL_GUARD) -> list[frozenset]:
    """Members of msd whose self-adjoint part is exactly the idempotents."""
    idem = frozenset(S.idempotents())
    out = []
    for A in msd(S, guard):
        if A & frozenset(dagger(s) for s in A) == idem:
            out.append(A)
    return out


@dataclass
class SubdiagonalReport:
    dim_algebra: int
    dim_selfadjoint_part: int
    multiplicative: bool
    dense: bool
    expectation_unital: bool
    expectation_bimodular: bool
    maximal: bool
    max_deviation: float
    closure_note: str = CLOSURE_NOTE

    @property
    def passed(self):
        return (
            self.multiplicative
            and self.dense
            and self.expectation_unital
            and self.expectation_bimodular
            and self.maximal
        )

    def to_lines(self):
        flag = lambda b: "pass" if b else "FAIL"
        return [
            f"dim_algebra: {self.dim_algebra}",
            f"dim_selfadjoint_part: {self.dim_selfadjoint_part}",
            f"phi_multiplicative: {flag(self.multiplicative)}",
            f"density: {flag(self.dense)}",
            f"phi_unital: {flag(self.expectation_unital)}",
            f"phi_bimodular: {flag(self.expectation_bimodular)}",
            f"maximal: {flag(self.maximal)}",
            f"max_deviation: {self.max_deviation:.3e}",
            f"note: {self.closure_note}",
        ]


def _subspace_intersection(basis_a, basis_b, tol: float):
    if not basis_a or not basis_b:
        return []
    A = np.stack([m.ravel() for m in basis_a], axis=1)
    B = np.stack([m.ravel() for m in basis_b], axis=1)
    _, null = _nullspace_dimension(np.hstack([A, -B]), tol)
    shape = basis_a[0].shape
    out = [(A @ coeffs[: A.shape[1]]).reshape(shape) for coeffs in null]
    return subspace_basis(out, tol)


def _hs_projection(basis, M):
    out = np.zeros_like(M)
    for b in basis:
        out += np.vdot(b, M) * b
    return out


def verify_subdiagonal(rs: RepSpace, A, guard: int = SPECTRAL_GUARD, tol: float = DEFAULT_TOL) -> SubdiagonalReport:
    """Verify that a spectral monoid spans a maximal subdiagonal algebra.

    The expectation onto the self-adjoint part N is realized as the
    orthogonal (Hilbert-Schmidt) projection; its unitality and
    N-bimodularity are verified rather than assumed.  Maximality is checked
    against the other enumerated spectral-monoid candidates with the same
    self-adjoint part, which is exactly what the classification licenses.
    """
    S = rs.ext.S
    A = frozenset(A)
    if not _is_spectral_monoid(S, A) or not is_spectral_set(S, A):
        raise DomainError("input is not a spectral monoid containing the idempotents")
    alg = psi(rs, A, tol)
    adj = [b.conj().T for b in alg.basis]
    N = _subspace_intersection(alg.basis, adj, tol)

    dim = len(rs.rbasis)
    eye = np.eye(dim, dtype=complex)
    unital = bool(np.abs(_hs_projection(N, eye) - eye).max() <= tol)

    gens = [rs.lam_of(s) for s in sorted(A, key=lambda s: (s.domain, s.image))]
    dev = 0.0
    for X in gens:
        for Y in gens:
            lhs = _hs_projection(N, X @ Y)
            rhs = _hs_projection(N, X) @ _hs_projection(N, Y)
            dev = max(dev, float(np.abs(lhs - rhs).max()))
    multiplicative = dev <= tol

    bimodular = True
    for n1 in N:
        for X in gens:
            if np.abs(_hs_projection(N, n1 @ X) - n1 @ _hs_projection(N, X)).max() > tol:
                bimodular = False
            if np.abs(_hs_projection(N, X @ n1) - _hs_projection(N, X) @ n1).max() > tol:
                bimodular = False

    M_dim = len(subspace_basis([rs.lam(v) for v in rs.ext.elements], tol))
    dense = len(subspace_basis(alg.basis + adj, tol)) == M_dim

    maximal = True
    n_dim = len(N)
    for A2 in enumerate_spectral_sets(S, guard):
        if A2 == A or not (A < A2) or not _is_spectral_monoid(S, A2):
            continue
        alg2 = psi(rs, A2, tol)
        adj2 = [b.conj().T for b in alg2.basis]
        N2 = _subspace_intersection(alg2.basis, adj2, tol)
        if len(N2) != n_dim:
            continue
        if all(contains_matrix(N, m, tol) for m in N2):
            # same self-adjoint part but strictly larger subdiagonal candidate
            gens2 = [rs.lam_of(s) for s in A2]
            dev2 = max(
                float(np.abs(_hs_projection(N2, X @ Y) - _hs_projection(N2, X) @ _hs_projection(N2, Y)).max())
                for X in gens2
                for Y in gens2
            )
            dense2 = len(subspace_basis(alg2.basis + adj2, tol)) == M_dim
            if dev2 <= tol and dense2:
                maximal = False
    return SubdiagonalReport(
        dim_algebra=alg.dimension,
        dim_selfadjoint_part=len(N),
        multiplicative=multiplicative,
        dense=dense,
        expectation_unital=unital,
        expectation_bimodular=bimodular,
        maximal=maximal,
        max_deviation=dev,
    )
