"""Toric test configurations: DF invariants, norms and Chow weights.

A configuration is a piecewise-linear convex function on the polytope;
affine functions are the product configurations.  The invariant chain
pinned by the blowup expansions is

    df(product of beta) = F(beta),      df(twist by beta) = df + F(beta),
    chow(p) = phi(p) - mean_w(phi),     chow_T = chow + orthogonal correction,

and chow_T evaluates the affine-orthogonal part of phi at the vertex, which
is why a non-product configuration always destabilises some vertex.
"""

from fractions import Fraction

import numpy as np

from toricstab import (PLConvex, ToricTC, associated_product, builtin,
                       catalog, chow_T, destabilizing_vertex, df, df_T,
                       futaki, l1_norm, orthogonal_part, twist)

P = catalog.load("cp2")
W = builtin("cscK", 2)

# A hinge over the diagonal: max(0, x + y - 1/2).
tc = ToricTC(P, W, PLConvex.make([((0, 0), 0), ((1, 1), Fraction(-1, 2))]))
print("df      =", df(tc))
print("df_T    =", df_T(tc))
print("l1 norm =", l1_norm(tc))

# Product identity and the twist law.
beta = np.array([0.3, -0.8])
print("\ndf(product) - F(beta) =",
      df(associated_product(P, W, beta)) - futaki(P, W, beta))
print("df(twist) - df - F    =",
      df(twist(tc, beta)) - df(tc) - futaki(P, W, beta))
print("df_T(twist) - df_T    =", df_T(twist(tc, beta)) - df_T(tc))

# The Chow table and the destabilising vertex.  For this hinge the corner at
# the origin carries the positive torus-orthogonal Chow weight.
print("\nchow_T per vertex:")
for v in P.vertices:
    print("  ", tuple(map(str, v)), "->", chow_T(tc, v))
dv = destabilizing_vertex(tc)
print("destabilizing vertex:", tuple(map(str, dv.vertex)),
      " chow_T =", dv.chow_t, " ratio =", dv.ratio)

# chow_T is the orthogonal part of phi at the vertex.
perp, norm = orthogonal_part(tc)
pt = np.array([[0.0, 0.0]])
print("\northogonal part at the origin:", float(perp.value(pt)[0]),
      " (matches chow_T above); norm =", norm)

# On the cscK plane every convex configuration has df >= 0.
rng = np.random.default_rng(0)
vals = []
for _ in range(200):
    pieces = [(tuple(Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
                     for _ in range(2)),
               Fraction(int(rng.integers(-2, 3)), int(rng.integers(1, 4))))
              for _ in range(3)]
    vals.append(df(ToricTC(P, W, PLConvex.make(pieces))))
print("\nmin df over 200 random convex PL on cp2:", min(vals))
