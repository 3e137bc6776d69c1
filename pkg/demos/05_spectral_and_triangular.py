#!/usr/bin/env python3
"""Spectral sets, the bimodule correspondence, and triangular algebras.

Downward-closed, join-closed subsets of the monoid index the
diagonal-invariant subspaces of the generated algebra.  The correspondence
is a lattice isomorphism; its restriction to dagger-closed submonoids
enumerates the intermediate algebras, and its restriction to "one-sided"
monoids classifies the maximal subdiagonal and triangular subalgebras.
"""

from cartanlab import (
    Extension,
    RepSpace,
    aoi_correspondence,
    enumerate_spectral_sets,
    join_span,
    msd,
    mtr,
    psi,
    rook_monoid,
    spectral_closure,
    theta,
    verify_subdiagonal,
)
from cartanlab.semigroup_core import singleton

I2 = rook_monoid(2)
rs = RepSpace(Extension(I2, 2))

sets2 = enumerate_spectral_sets(I2)
print(f"spectral sets of the 2-atom rook monoid: {len(sets2)} (= 2^|R|)")

t01 = singleton(2, 0, 1)
A = spectral_closure(I2, [t01])
print("closure of the one-point map 0->1:", sorted(A))
B = psi(rs, A)
print("its bimodule has dimension", B.dimension)
print("theta recovers the set:", theta(rs, B) == A)

A2 = spectral_closure(I2, [singleton(2, 1, 0)])
print("join span with the mirror set has size", len(join_span(I2, A, A2)))

print("\nround trip over every spectral set:")
print("  theta . psi = identity:", all(theta(rs, psi(rs, S)) == S for S in sets2))

print("\nintermediate algebras via full submonoids:")
rep = aoi_correspondence(rs)
for line in rep.to_lines():
    print("  " + line)

print("\nmaximal subdiagonal and triangular classification:")
m, t = msd(I2), mtr(I2)
print(f"  |msd| = {len(m)}, |mtr| = {len(t)}")
for A in m:
    r = verify_subdiagonal(rs, A)
    kind = "triangular" if A in t else ("whole algebra" if len(A) == len(I2) else "subdiagonal")
    print(f"  member of size {len(A)} ({kind}): passed={r.passed}, "
          f"dim {r.dim_algebra}, self-adjoint part {r.dim_selfadjoint_part}")
