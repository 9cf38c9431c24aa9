from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from katofan import lattice as la
from katofan.cone import cone_of_monoid, faces
from katofan.monoid import (
    AffineMonoid,
    MonoidError,
    MonoidHom,
    PrimeIdeal,
    decompose_sharp,
    find_isomorphism,
    hilbert_basis,
    is_local_hom,
    localize,
    primes,
    prime_leq,
    saturate,
    stalk,
)

from oracles import brute_member
from strategies import sharp_monoids

N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)
PQR = AffineMonoid(2, [(1, 0), (1, 1), (1, 2)])  # p + r = 2q
NUM23 = AffineMonoid(1, [(2,), (3,)])


def test_generator_order_puts_standard_basis_first():
    assert N2.generators == ((1, 0), (0, 1))


def test_contains_examples():
    assert N2.contains((3, 5))
    assert not PQR.contains((1, 3))
    assert not NUM23.contains((1,))
    assert NUM23.contains((5,)) and NUM23.contains((0,))


def test_contains_agrees_with_enumeration():
    for v in product(range(0, 5), range(-2, 9)):
        assert PQR.contains(v) == brute_member(PQR.generators, v, 8)


def test_hilbert_basis_examples():
    assert hilbert_basis(saturate(NUM23)) == [(1,)]
    assert set(hilbert_basis(PQR)) == {(1, 0), (1, 1), (1, 2)}
    assert hilbert_basis(N2) == [(1, 0), (0, 1)]
    assert hilbert_basis(NUM23) == [(3,), (2,)]


def test_hilbert_basis_rejects_units():
    with pytest.raises(MonoidError):
        hilbert_basis(AffineMonoid(2, [(1, 0), (0, 1), (0, -1)]))


def test_saturate_examples():
    assert saturate(NUM23).generators == ((1,),)
    assert saturate(N2).generators == N2.generators
    P = AffineMonoid(2, [(1, 0), (1, 2)])
    # inside P^gp = {(a, b): b even} the monoid is already saturated
    assert set(saturate(P).generators) == {(1, 0), (1, 2)}
    # inside Z^2 the lattice point (1, 1) of the cone is added
    assert set(saturate(P, ambient=True).generators) == {(1, 0), (1, 1), (1, 2)}


def test_decompose_examples():
    d = decompose_sharp(AffineMonoid(2, [(1, 0), (0, 1), (0, -1)]))
    assert d.sharp.generators == ((1,),) and d.unit_rank == 1 and d.torsion == ()
    d = decompose_sharp(N2)
    assert d.sharp.generators == N2.generators and d.unit_rank == 0
    d = decompose_sharp(AffineMonoid(1, [(1,)], torsion=(2,)))
    assert d.sharp.generators == ((1,),) and d.unit_rank == 0 and d.torsion == (2,)


def test_decompose_rejects_unsaturated():
    with pytest.raises(MonoidError):
        decompose_sharp(NUM23)


def test_localize_examples():
    # face <e1>: invert e1, leaving N generated by e2
    s = stalk(N2, PrimeIdeal({0}))
    assert s.sharp.generators == ((1,),)
    s = stalk(N2, PrimeIdeal({0, 1}))
    assert s.sharp.rank == 0 and s.unit_rank == 2
    i = PQR.generators.index((1, 0))
    assert stalk(PQR, PrimeIdeal({i})).sharp.generators == ((1,),)
    Pp, phi = localize(N2, PrimeIdeal({0}))
    assert Pp.contains((-4, 1)) and phi((1, 1)) == (1, 1)


def test_localize_rejects_non_primes():
    with pytest.raises(MonoidError):
        localize(PQR, PrimeIdeal({PQR.generators.index((1, 1))}))


def test_prime_counts():
    assert len(primes(N1)) == 2
    assert len(primes(N2)) == 4
    assert len(primes(PQR)) == 4


def test_primes_of_n2_form_a_diamond():
    ps = primes(N2)
    less = {(a, b) for a in range(4) for b in range(4) if a != b and prime_leq(ps[a], ps[b])}
    assert len(less) == 5  # bottom < 2 middles < top, plus bottom < top


def test_local_hom_examples():
    assert is_local_hom(MonoidHom(N1, N1, [[1]]))
    assert is_local_hom(MonoidHom(N1, N2, [[1], [1]]))
    assert not is_local_hom(MonoidHom(N2, N1, [[1, 0]]))


def test_non_hom_is_rejected():
    with pytest.raises(MonoidError):
        is_local_hom(MonoidHom(N1, NUM23, [[1]]))


def test_json_round_trip():
    P = AffineMonoid(2, [(1, 0), (0, 1), (0, -1)], torsion=(2,))
    assert AffineMonoid.from_json(P.to_json()) == P


small_monoids = st.integers(1, 2).flatmap(
    lambda n: st.lists(st.tuples(*[st.integers(-2, 4)] * n), min_size=1, max_size=3).map(lambda g: AffineMonoid(n, g))
)


@given(small_monoids)
def test_saturate_is_extensive_and_idempotent(P):
    S = saturate(P)
    assert saturate(S) == S
    box = product(range(-5, 6), repeat=P.rank)
    for v in box:
        if P.contains(v):
            assert S.contains(v)


@given(sharp_monoids())
def test_hilbert_basis_is_minimal(P):
    hb = hilbert_basis(P)
    for i, h in enumerate(hb):
        rest = hb[:i] + hb[i + 1 :]
        assert not AffineMonoid(P.rank, rest).contains(h)


@given(sharp_monoids(), st.integers(0, 3))
def test_decompose_round_trip(P, extra_units):
    # P + Z^u, split again, recovers P up to isomorphism and u units
    n = P.rank
    gens = [tuple(g) + (0,) * extra_units for g in P.generators]
    for i in range(extra_units):
        e = tuple(int(j == n + i) for j in range(n + extra_units))
        gens += [e, tuple(-x for x in e)]
    d = decompose_sharp(AffineMonoid(n + extra_units, gens))
    assert d.unit_rank == extra_units
    assert find_isomorphism(d.sharp, P) is not None


@given(sharp_monoids())
def test_primes_are_dual_to_faces_of_the_cone(P):
    sigma = cone_of_monoid(P)
    fl = faces(sigma)
    ps = primes(P)
    assert len(ps) == len(fl.faces)
    # face dimension of the prime (as a face of cone(P)) + dual face dimension = rank
    dims_p = sorted(la.rank([P.generators[i] for i in p.face], P.rank) if p.face else 0 for p in ps)
    assert dims_p == sorted(P.rank - d for d in fl.dims)
