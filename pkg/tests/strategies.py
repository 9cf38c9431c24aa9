"""Hypothesis strategies shared by the test modules."""

from hypothesis import assume
from hypothesis import strategies as st

from katofan import lattice as la
from katofan.cone import Cone, hilbert_basis_of_cone
from katofan.monoid import AffineMonoid


@st.composite
def full_cones(draw, dims=(2, 3), bound=4, nonneg=True, max_gens=4):
    """Full-dimensional strictly convex cones given by small generators."""
    n = draw(st.sampled_from(dims))
    lo = 0 if nonneg else -bound
    vec = st.tuples(*[st.integers(lo, bound)] * n).filter(any)
    gens = draw(st.lists(vec, min_size=n, max_size=max(n, max_gens)))
    assume(la.rank(gens, n) == n)
    sigma = Cone.from_generators(gens, n)
    assume(not sigma.lineality)
    return sigma


@st.composite
def sharp_monoids(draw, max_rank=3):
    """Sharp saturated full-rank monoids: Hilbert bases of random cones."""
    sigma = draw(full_cones(dims=tuple(range(1, max_rank + 1)), nonneg=False, bound=3))
    return AffineMonoid(sigma.lattice_rank, hilbert_basis_of_cone(sigma))
