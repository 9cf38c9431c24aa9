"""
The tropical line on the affine and projective planes
=====================================================

Computes the extended tropicalization of ``x + y + 1`` stratum by stratum
and checks it against series solutions of the equation.
"""

# %%
# On the torus the corner locus of ``min(u1, u2, 0)`` restricted to the
# quadrant is the union of the two boundary rays.  Each boundary orbit meets
# the curve in one point, and the fixed point misses it.
import json
import random

from katofan.fan import builtin_toric
from katofan.series import TruncatedSeries
from katofan.trop import (
    LaurentPolynomial,
    SeriesPoint,
    stratum_coordinates,
    trop_membership,
    trop_series_point,
    tropical_hypersurface,
)

line = LaurentPolynomial({(1, 0): 1, (0, 1): 1, (0, 0): 1})
A2 = builtin_toric("A2")
print(json.dumps(tropical_hypersurface(A2, line).to_json()["strata"], indent=1))

# %%
# On the projective plane the torus part is the tropical line with three
# rays, and every invariant line contributes one boundary point.
P2 = builtin_toric("P2")
H = tropical_hypersurface(P2, line)
for tau, s in sorted(H.strata.items()):
    print(tau, [c.rays for c in s.cones])

# %%
# A series solution ``x = t``, ``y = -1 - t`` tropicalizes to ``(1, 0)``,
# which lies on the horizontal ray.
x = SeriesPoint("C{0,1}", [TruncatedSeries.monomial(1), TruncatedSeries({0: -1, 1: -1})])
print(stratum_coordinates(A2, trop_series_point(A2.fan, x)), trop_membership(A2, line, x))

# %%
# Random solutions on the three affine charts all land in the computed set.
rng = random.Random(0)
inside = 0
for _ in range(30):
    chart = rng.choice(P2.maximal_cones())
    s = TruncatedSeries({k: rng.randint(-2, 2) for k in range(rng.randint(0, 3), 5)})
    # on every smooth chart of P2 the local equation is 1 + a + b in the two generators
    x = SeriesPoint(chart, [s, TruncatedSeries.constant(-1) - s])
    inside += trop_membership(P2, line, x, H)
print(inside, "of 30 sampled solutions lie on the tropical line")
