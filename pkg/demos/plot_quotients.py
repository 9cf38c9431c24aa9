"""
Quotients of extended cone complexes and dual complexes
=======================================================

Two descent diagrams of fans, and the dual complexes of two boundary
divisors.
"""

# %%
# The involution of ``Spec N^2`` exchanging the coordinates identifies the
# points ``(1,2)`` and ``(2,1)`` of the extended quadrant.
from katofan.complex import quotient_points_equal
from katofan.dualcx import dual_complex_from_json
from katofan.trop import MonomialPoint, generalized_trop, nodal_cubic_quotient, swap_quotient, trop_monomial_point

G = swap_quotient()


def pt(*v):
    return trop_monomial_point(G.base, MonomialPoint("U", list(v)))


print("(1,2) ~ (2,1):", quotient_points_equal(G, pt(1, 2), pt(2, 1)))
print("(1,2) ~ (1,3):", quotient_points_equal(G, pt(1, 2), pt(1, 3)))
print("class of the apex:", generalized_trop(G, pt(0, 0)))

# %%
# For the nodal cubic the cover has two charts whose coordinates are swapped
# by the second arrow, so ``(1,2)`` on one chart meets ``(2,1)`` on the other.
N = nodal_cubic_quotient()
u = trop_monomial_point(N.base, MonomialPoint("U", [1, 2]))
v = trop_monomial_point(N.base, MonomialPoint("V", [2, 1]))
print(len(N.base), "fan points;", "same class:", generalized_trop(N, u) == generalized_trop(N, v))

# %%
# Two conics meeting transversally in four points give two vertices joined
# by four edges.
conics = {"components": ["C1", "C2"], "strata": [{"label": f"p{i}", "divisors": ["C1", "C2"]} for i in range(4)]}
cx = dual_complex_from_json(conics)
print(cx.counts(), "Euler characteristic", cx.euler_characteristic())
