#!/usr/bin/env python3
"""The brute-force operator-algebra oracle.

The represented extension generates a matrix algebra; plain linear algebra
confirms its structure: the span has dimension |R|, the diagonal subalgebra
is maximal abelian, the expectation is faithful, the representation images
normalize the diagonal, and the base monoid can be recovered from the pair
alone.  Nothing here consults the semigroup machinery that produced the
matrices, which is the point.
"""

import random

from cartanlab import Extension, cartan_report, eqrel_monoid, point_coboundary_table, rook_monoid

for label, S in (("rook(3)", rook_monoid(3)), ("two-block {0,1}{2}", eqrel_monoid([(0, 1), (2,)]))):
    for k in (1, 2):
        rng = random.Random(7)
        points = sorted({(x, y) for s in S for x, y in s.pairs() if x != y})
        table = (
            point_coboundary_table(S, k, {p: rng.randrange(k) for p in points})
            if k > 1
            else None
        )
        rep = cartan_report(Extension(S, k, table))
        print(f"=== {label}, k={k}{', perturbed cocycle' if table else ''} ===")
        for line in rep.to_lines():
            print("  " + line)
        print()
