"""Brute-force finite-dimensional operator-algebra verification.

Everything here treats matrices on the relation space as opaque numerical
objects: spans via Gram-Schmidt in the Hilbert-Schmidt inner product,
commutants via nullspace solves, expectations via entry compression.  The
point is to confirm the structural theorems against plain linear algebra
rather than against the semigroup machinery that produced the matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvariantViolation, SizeGuardError
from .extension import Extension, Section, delta
from .kernel_rep import DEFAULT_TOL, RBasis, RepSpace, expectation
from .semigroup_core import (
    FiniteInverseMonoid,
    PartialBijection,
    compose,
    dagger,
    mask_of,
)

__all__ = [
    "MatrixAlgebra",
    "span_basis",
    "commutant_dimension",
    "relative_commutant",
    "masa_check",
    "expectation_properties",
    "recover_extension",
    "cartan_report",
    "hs_inner",
    "subspace_basis",
    "contains_matrix",
    "RECOVER_GUARD",
]

RECOVER_GUARD = 40


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    return complex(np.vdot(A, B))


def subspace_basis(matrices, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis (Hilbert-Schmidt) of the linear span, by modified
    Gram-Schmidt in input order; deterministic."""
    basis: list[np.ndarray] = []
    for M in matrices:
        v = M.astype(complex).copy()
        for _ in range(2):  # re-orthogonalize for stability
            for b in basis:
                v -= hs_inner(b, v) * b
        norm = np.sqrt(abs(hs_inner(v, v)))
        if norm > tol:
            basis.append(v / norm)
    return basis


def contains_matrix(basis, M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    v = M.astype(complex).copy()
    for b in basis:
        v -= hs_inner(b, v) * b
    return bool(np.sqrt(abs(hs_inner(v, v))) <= tol)


@dataclass
class MatrixAlgebra:
    """An orthonormal spanning basis of a self-adjoint unital matrix algebra."""

    basis: list
    rbasis: RBasis
    product_closed: bool = True
    adjoint_closed: bool = True
    has_identity: bool = True

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        return contains_matrix(self.basis, M, tol)


def span_basis(matrices, rbasis: RBasis, tol: float = DEFAULT_TOL) -> MatrixAlgebra:
    """Span of the given matrices with closure verification.

    The span is computed by Gram-Schmidt; closure of the span under products
    and adjoints (and membership of the identity) is verified and reported
    in the returned flags, not enforced.
    """
    mats = list(matrices)
    if not mats:
        raise DomainError("span_basis needs a nonempty matrix list")
    basis = subspace_basis(mats, tol)
    dim = mats[0].shape[0]
    product_closed = all(
        contains_matrix(basis, a @ b, tol) for a in basis for b in basis
    )
    adjoint_closed = all(contains_matrix(basis, a.conj().T, tol) for a in basis)
    has_identity = contains_matrix(basis, np.eye(dim, dtype=complex), tol)
    return MatrixAlgebra(basis, rbasis, product_closed, adjoint_closed, has_identity)


def _nullspace_dimension(A: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    """(dimension, orthonormal nullspace basis as rows) via SVD."""
    if A.size == 0:
        n = A.shape[1]
        return n, np.eye(n, dtype=complex)
    _, svals, vh = np.linalg.svd(A)
    rank = int(np.sum(svals > tol))
    return A.shape[1] - rank, vh[rank:].conj()


def relative_commutant(M: MatrixAlgebra, D: MatrixAlgebra, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of {x in span(M) : xd = dx for all d in basis(D)}."""
    m = M.dimension
    rows = []
    for d in D.basis:
        block = np.stack([(b @ d - d @ b).ravel() for b in M.basis], axis=1)
        rows.append(block)
    A = np.vstack(rows) if rows else np.zeros((0, m))
    _, null = _nullspace_dimension(A, tol)
    out = []
    for coeffs in null:
        X = sum(c * b for c, b in zip(coeffs, M.basis))
        out.append(X)
    return subspace_basis(out, tol)


def commutant_dimension(basis, ambient_dim: int, tol: float = DEFAULT_TOL) -> tuple[int, list[np.ndarray]]:
    """Commutant of a matrix family inside the full matrix algebra."""
    eye = np.eye(ambient_dim, dtype=complex)
    # unknown X (dim^2 coords): constraints B X - X B = 0 for each basis B
    cols = []
    for a in range(ambient_dim):
        for b in range(ambient_dim):
            E = np.outer(eye[:, a], eye[b, :])
            cols.append(np.concatenate([(B @ E - E @ B).ravel() for B in basis]))
    A = np.stack(cols, axis=1)
    dim, null = _nullspace_dimension(A, tol)
    mats = [coeffs.reshape(ambient_dim, ambient_dim) for coeffs in null]
    return dim, subspace_basis(mats, tol)


@dataclass
class MasaReport:
    dim_algebra: int
    dim_subalgebra: int
    dim_relative_commutant: int
    center_dimension: int
    is_masa: bool

    def to_lines(self):
        return [
            f"dim_M: {self.dim_algebra}",
            f"dim_D: {self.dim_subalgebra}",
            f"dim_relative_commutant: {self.dim_relative_commutant}",
            f"center_dimension: {self.center_dimension}",
            f"masa: {'pass' if self.is_masa else 'FAIL'}",
        ]


def masa_check(M: MatrixAlgebra, D: MatrixAlgebra, tol: float = DEFAULT_TOL) -> MasaReport:
    """D is maximal abelian in M iff its relative commutant is itself."""
    for d in D.basis:
        if not M.contains(d, tol):
            raise DomainError("D is not contained in M")
    comm = relative_commutant(M, D, tol)
    center = relative_commutant(M, M, tol)
    return MasaReport(
        dim_algebra=M.dimension,
        dim_subalgebra=D.dimension,
        dim_relative_commutant=len(comm),
        center_dimension=len(center),
        is_masa=len(comm) == D.dimension,
    )


@dataclass
class ExpectationReport:
    matches_diagonal_part: bool
    idempotent: bool
    unital: bool
    positive: bool
    faithful: bool
    bimodular: bool
    max_deviation: float

    @property
    def passed(self):
        return (
            self.matches_diagonal_part
            and self.idempotent
            and self.unital
            and self.positive
            and self.faithful
            and self.bimodular
        )

    def to_lines(self):
        flag = lambda b: "pass" if b else "FAIL"
        return [
            f"expectation_matches_diagonal_part: {flag(self.matches_diagonal_part)}",
            f"expectation_idempotent: {flag(self.idempotent)}",
            f"expectation_unital: {flag(self.unital)}",
            f"expectation_positive: {flag(self.positive)}",
            f"expectation_faithful: {flag(self.faithful)}",
            f"expectation_bimodular: {flag(self.bimodular)}",
            f"expectation_max_deviation: {self.max_deviation:.3e}",
        ]


def expectation_properties(ext: Extension, j: Section | None = None, tol: float = DEFAULT_TOL, samples: int = 100) -> ExpectationReport:
    """Verify the compression expectation on the generated algebra.

    (i) it sends each represented element to its represented diagonal part;
    (ii) idempotent, unital, positive on sampled x*x; (iii) faithful, via
    injectivity (rank) of x -> columns of x at the diagonal pairs on the
    span; (iv) bimodular over the diagonal subalgebra on a spanning set.
    """
    rs = RepSpace(ext, j, tol)
    rbasis = rs.rbasis
    G = ext.elements
    lams = {v: rs.lam(v) for v in G}

    dev = 0.0
    for v in G:
        dev = max(dev, float(np.abs(rs.expectation(lams[v]) - rs.lam(delta(ext, rs.j, v))).max()))
    matches = dev <= tol

    M_basis = subspace_basis(list(lams.values()), tol)
    dim = len(rbasis)
    rng = np.random.default_rng(0)

    idempotent = True
    positive = True
    unital = bool(np.abs(rs.expectation(np.eye(dim, dtype=complex)) - np.eye(dim)).max() <= tol)
    for _ in range(samples):
        coeffs = rng.normal(size=len(M_basis)) + 1j * rng.normal(size=len(M_basis))
        x = sum(c * b for c, b in zip(coeffs, M_basis))
        Ex = rs.expectation(x)
        if np.abs(rs.expectation(Ex) - Ex).max() > tol:
            idempotent = False
        Exx = rs.expectation(x.conj().T @ x)
        eigs = np.linalg.eigvalsh((Exx + Exx.conj().T) / 2)
        if eigs.min() < -tol:
            positive = False

    diag_cols = rbasis.diagonal_indices()
    F = np.stack([b[:, diag_cols].ravel() for b in M_basis], axis=1)
    faithful = int(np.linalg.matrix_rank(F, tol=tol)) == len(M_basis)

    bimodular = True
    d_basis = [rs.lam(p) for p in ext.phased_identities]
    for d in d_basis[: min(len(d_basis), 8)]:
        for b in M_basis[: min(len(M_basis), 12)]:
            lhs = rs.expectation(d @ b)
            rhs = d @ rs.expectation(b)
            lhs2 = rs.expectation(b @ d)
            rhs2 = rs.expectation(b) @ d
            if np.abs(lhs - rhs).max() > tol or np.abs(lhs2 - rhs2).max() > tol:
                bimodular = False

    return ExpectationReport(matches, idempotent, unital, positive, faithful, bimodular, dev)


def _pattern_positions(rbasis: RBasis, g: PartialBijection):
    """Matrix positions of the transport of g: ((g(x), y), (x, y)) over pairs."""
    pos = []
    for col, (x, y) in enumerate(rbasis.pairs):
        if (g.domain >> x) & 1:
            pos.append((rbasis.index[(g.apply(x), y)], col))
    return pos


def _pattern_intersection(M: MatrixAlgebra, positions, tol: float):
    """Basis of the elements of span(M) supported exactly within positions."""
    if not M.basis:
        return []
    dim = len(M.rbasis)
    mask = np.zeros((dim, dim), dtype=bool)
    for r, c in positions:
        mask[r, c] = True
    outside = ~mask
    rows = np.stack([b[outside].ravel() for b in M.basis], axis=1)
    _, null = _nullspace_dimension(rows, tol)
    out = []
    for coeffs in null:
        X = sum(cf * b for cf, b in zip(coeffs, M.basis))
        out.append(X)
    return subspace_basis(out, tol)


def _point_accepted(M: MatrixAlgebra, x: int, y: int, tol: float) -> bool:
    """Whether the one-point map y -> x is implemented by a normalizer in M.

    Its pattern is a single column group, so acceptance means: the elements
    of span(M) supported on the group form a one-dimensional space spanned
    by a vector with constant nonzero modulus across the whole group (the
    unimodular rephasing of the 0/1 transport matrix).
    """
    rbasis = M.rbasis
    g = PartialBijection(rbasis.atom_count, 1 << y, (x,))
    positions = _pattern_positions(rbasis, g)
    inter = _pattern_intersection(M, positions, tol)
    if len(inter) != 1:
        return False
    vals = np.array([inter[0][r, c] for r, c in positions])
    mods = np.abs(vals)
    return bool(mods.min() > tol and mods.max() - mods.min() <= 1e-6 * mods.max())


def recover_extension(M: MatrixAlgebra, D: MatrixAlgebra, S: FiniteInverseMonoid, tol: float = DEFAULT_TOL, guard: int = RECOVER_GUARD):
    """Recover the base monoid from the generated pair and match it to S.

    Candidates are partial bijections of atoms with graph inside the
    relation; a candidate g survives iff span(M) contains an element
    supported exactly on the transport pattern of g with unimodular entries
    (a groupoid normalizer implementing g).  Acceptance splits over graph
    points because the pattern's column groups are separated by right
    multiplication with D-projections; each surviving multi-point graph is
    still cross-checked by its full-pattern intersection dimension.  The
    survivors form S', returned with an isomorphism witness onto S (atom
    permutation search, deterministic first match) or None.
    """
    rbasis = M.rbasis
    n = rbasis.atom_count
    if n > guard:
        raise SizeGuardError(n, guard, "atom count for recovery")
    for d in D.basis:
        if not M.contains(d, tol):
            raise DomainError("D is not contained in M")

    accepted_points = {
        (x, y) for (x, y) in rbasis.pairs if _point_accepted(M, x, y, tol)
    }

    import itertools

    accepted = []
    atoms = range(n)
    for d in range(n + 1):
        for dom in itertools.combinations(atoms, d):
            for image in itertools.permutations(atoms, d):
                if any((x, y) not in accepted_points for x, y in zip(image, dom)):
                    continue
                g = PartialBijection(n, mask_of(dom), tuple(image))
                if not g.is_zero():
                    inter = _pattern_intersection(M, _pattern_positions(rbasis, g), tol)
                    if len(inter) != g.domain.bit_count():
                        continue
                accepted.append(g)

    S_prime = FiniteInverseMonoid(n, accepted)
    witness = S_prime.closure_witness()
    if witness is not None:
        raise InvariantViolation(f"recovered set is not closed: {witness}")

    iso = None
    for perm in itertools.permutations(range(n)):
        mapped = set()
        ok = True
        for s in S_prime:
            pairs = sorted((perm[y], perm[x]) for x, y in s.pairs())
            dom_mask = mask_of(y for y, _ in pairs)
            img = tuple(x for _, x in pairs)
            t = PartialBijection(n, dom_mask, img)
            if t not in S:
                ok = False
                break
            mapped.add(t)
        if ok and mapped == set(S.elements):
            iso = perm
            break
    return S_prime, iso


@dataclass
class CartanReport:
    dim_M: int
    dim_D: int
    dim_R: int
    atom_count: int
    masa: MasaReport
    expectation: ExpectationReport
    double_commutant_ok: bool
    regularity_ok: bool
    recovered_size: int
    recovery_iso: object
    closure_flags: tuple

    @property
    def passed(self):
        return (
            self.dim_M == self.dim_R
            and self.dim_D == self.atom_count
            and self.masa.is_masa
            and self.expectation.passed
            and self.double_commutant_ok
            and self.regularity_ok
            and self.recovery_iso is not None
            and all(self.closure_flags)
        )

    def to_lines(self):
        lines = [
            f"dim_M: {self.dim_M} (expected {self.dim_R})",
            f"dim_D: {self.dim_D} (expected {self.atom_count})",
            f"span_closure: {'pass' if all(self.closure_flags) else 'FAIL'}",
            f"double_commutant: {'pass' if self.double_commutant_ok else 'FAIL'}",
            f"regularity: {'pass' if self.regularity_ok else 'FAIL'}",
        ]
        lines += self.masa.to_lines()
        lines += self.expectation.to_lines()
        lines.append(f"recovered_monoid_size: {self.recovered_size}")
        lines.append(f"recovery_isomorphism: {self.recovery_iso}")
        lines.append(f"cartan_pair: {'pass' if self.passed else 'FAIL'}")
        return lines


def cartan_report(ext: Extension, j: Section | None = None, tol: float = DEFAULT_TOL) -> CartanReport:
    """Run the whole oracle battery for one extension."""
    rs = RepSpace(ext, j, tol)
    rbasis = rs.rbasis
    lams = rs.all_lambdas()
    M = span_basis(lams, rbasis, tol)
    D = span_basis(rs.diagonal_lambdas(), rbasis, tol)

    masa = masa_check(M, D, tol)
    exp_rep = expectation_properties(ext, rs.j, tol)

    # von Neumann check: the span must equal its double commutant
    dim = len(rbasis)
    _, comm = commutant_dimension(M.basis, dim, tol)
    dc_dim, _ = commutant_dimension(comm, dim, tol)
    double_ok = dc_dim == M.dimension

    regularity = True
    for v in ext.elements:
        lam = rs.lam(v)
        for d in D.basis:
            if not D.contains(lam @ d @ lam.conj().T, tol):
                regularity = False
                break
        if not regularity:
            break

    S_prime, iso = recover_extension(M, D, ext.S, tol)

    return CartanReport(
        dim_M=M.dimension,
        dim_D=D.dimension,
        dim_R=len(rbasis),
        atom_count=rbasis.atom_count,
        masa=masa,
        expectation=exp_rep,
        double_commutant_ok=double_ok,
        regularity_ok=regularity,
        recovered_size=len(S_prime),
        recovery_iso=iso,
        closure_flags=(M.product_closed, M.adjoint_closed, M.has_identity,
                       D.product_closed, D.adjoint_closed),
    )
