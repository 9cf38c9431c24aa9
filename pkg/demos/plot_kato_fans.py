"""
Kato fans of toric monoids
==========================

Spectra of small monoids, glued fans of projective spaces and the strata of
their extended cone complexes.
"""

# %%
# The spectrum of a monoid has one point per prime ideal.  For ``N^2`` these
# are the four faces of the quadrant, ordered as a diamond.
from collections import Counter

from katofan.complex import extended_complex
from katofan.fan import builtin_fan, builtin_toric, fans_isomorphic, spec
from katofan.monoid import AffineMonoid

N2 = AffineMonoid.free(2)
F = spec(N2)
for x, p in sorted(F.points.items(), key=lambda kv: kv[1].rank):
    print(x, "stalk", p.stalk.label())
print("cover relations:", F.cover_edges())

# %%
# The monoid of the cone spanned by ``(1,0)`` and ``(1,2)`` has three
# Hilbert basis elements ``p, q, r`` with ``p + r = 2q``.  Its spectrum also
# has four points, and both middle stalks are ``N``.
PQR = AffineMonoid(2, [(1, 0), (1, 1), (1, 2)])
G = spec(PQR)
print(sorted(p.stalk.label() for p in G.points.values()))

# %%
# Gluing three copies of ``Spec N^2`` along their coordinate localizations
# gives the fan of the projective plane.  The toric fan of the same variety
# produces an isomorphic Kato fan.
P2 = builtin_fan("P2")
print(len(P2), "points;", "isomorphic to toric:", fans_isomorphic(P2, builtin_toric("P2").fan) is not None)
print(P2.to_dot())

# %%
# Each fan point carries a stratum of the extended cone complex.
for name in ("A2", "P2", "P1xP1"):
    strata = extended_complex(builtin_fan(name)).strata
    print(name, dict(Counter(s.label for s in strata)))
