#!/usr/bin/env python3
"""Tour of exact partial-bijection arithmetic on the rook monoid.

Every element of the monoids in this package is a partial injective map on
a finite atom set.  This script walks through products, inverses, the
natural (restriction) order, meets, orthogonal joins, the chop refinement,
and the axiom checker.
"""

from cartanlab import (
    PartialBijection,
    check_axioms,
    chop,
    classify,
    compose,
    dagger,
    groupoid_relation,
    identity_map,
    meet,
    natural_leq,
    orthogonal_join,
    partial_identity,
    rook_monoid,
    singleton,
)

I2 = rook_monoid(2)
print(f"rook monoid on 2 atoms: {len(I2)} elements")
for s in I2:
    print("  ", s)

t01 = singleton(2, 0, 1)   # the one-point map 0 -> 1
t10 = singleton(2, 1, 0)
swap = PartialBijection(2, 0b11, (1, 0))
one = identity_map(2)

print("\nproducts compose right-to-left, like functions:")
print("  t01 . t10 =", compose(t01, t10), " (partial identity on atom 1)")
print("  t01 . t01 =", compose(t01, t01), " (empty: range misses the domain)")
print("  dagger(t01) =", dagger(t01))

print("\nthe natural order is restriction:")
print("  t01 <= swap:", natural_leq(t01, swap))
print("  swap <= t01:", natural_leq(swap, t01))

print("\nmeets restrict to the agreement set:")
print("  swap ^ 1 =", meet(swap, one), " (no fixed points)")
print("  t01 ^ swap =", meet(t01, swap))

print("\northogonal joins are union maps:")
print("  t01 v t10 =", orthogonal_join([t01, t10]), " (= swap)")

print("\nchop refines a family into meet-orthogonal pieces:")
e0 = partial_identity(2, 0b01)
pieces = chop([one, e0])
print("  chop([1, e0]) ->", sorted(pieces))
pieces = chop([swap, one])
print("  chop([swap, 1]) ->", sorted(pieces), " (already meet-orthogonal)")

print("\nclassification and axiom report:")
rep = classify(I2)
print("  fundamental:", rep.fundamental, " clifford:", rep.clifford)
ax = check_axioms(I2)
for line in ax.to_lines():
    print("  " + line)

rel = groupoid_relation(I2)
print(f"\nthe union of graphs is an equivalence relation with {len(rel)} pairs")
print("  blocks:", rel.blocks)
