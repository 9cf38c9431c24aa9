from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from katofan.complex import (
    INF,
    ComplexError,
    evaluate,
    ext,
    extended_complex,
    map_point,
    point_from_hom,
    point_from_json,
    reduction,
    structure_point,
)
from katofan.fan import FanMorphism, builtin_fan, builtin_toric, spec, toric_morphism
from katofan.monoid import AffineMonoid
from katofan.trop import chart_value

N2 = AffineMonoid.free(2)
A2 = spec(N2)
CLOSED = "U0:{}"

ext_values = st.one_of(st.fractions(min_value=0, max_value=20, max_denominator=6), st.just(INF))


def test_extended_arithmetic():
    assert INF + Fraction(3) is INF and Fraction(3) + INF is INF
    assert 0 * INF == 0 and 2 * INF is INF
    assert Fraction(5) < INF and not INF < INF
    with pytest.raises(ComplexError):
        ext(-1)


def test_point_examples_on_n2():
    u = point_from_hom(A2, CLOSED, [2, "inf"])
    assert structure_point(u) == "U0:{0}"  # only e2 is infinite; e1 is inverted there
    assert reduction(u) == CLOSED
    apex = point_from_hom(A2, CLOSED, [0, 0])
    assert reduction(apex) == structure_point(apex) == "U0:{0,1}"
    assert reduction(point_from_hom(A2, CLOSED, [1, 0])) == "U0:{1}"
    assert structure_point(point_from_hom(A2, CLOSED, ["inf", "inf"])) == CLOSED


def test_additivity_on_pqr():
    F = spec(AffineMonoid(2, [(1, 0), (1, 1), (1, 2)]))
    hb = F.points[CLOSED].basis
    vals = {(1, 0): 4, (1, 1): 3, (1, 2): 2}
    u = point_from_hom(F, CLOSED, [vals[h] for h in hb])
    assert evaluate(u, (2, 2)) == 6
    bad = {(1, 0): 4, (1, 1): 3, (1, 2): 3}
    with pytest.raises(ComplexError, match="relation"):
        point_from_hom(F, CLOSED, [bad[h] for h in hb])


def test_finite_values_must_sit_on_a_face():
    F = spec(AffineMonoid(2, [(1, 0), (1, 1), (1, 2)]))
    hb = F.points[CLOSED].basis
    vals = {(1, 0): 1, (1, 1): "inf", (1, 2): 1}
    with pytest.raises(ComplexError):
        point_from_hom(F, CLOSED, [vals[h] for h in hb])


@pytest.mark.parametrize(
    "name,expected",
    [
        ("A1", {"R>=0": 1, "point": 1}),
        ("A2", {"R>=0^2": 1, "R>=0": 2, "point": 1}),
        ("P2", {"R^2": 1, "R": 3, "point": 3}),
        ("P1xP1", {"R^2": 1, "R": 4, "point": 4}),
    ],
)
def test_strata_types(name, expected):
    strata = extended_complex(builtin_fan(name)).strata
    assert Counter(s.label for s in strata) == expected


def test_strata_of_pqr():
    F = spec(AffineMonoid(2, [(1, 0), (1, 1), (1, 2)]))
    strata = extended_complex(F).strata
    assert Counter(s.label for s in strata) == {"cone": 1, "R>=0": 2, "point": 1}
    (open_stratum,) = [s for s in strata if s.label == "cone"]
    top = max(open_stratum.pieces, key=lambda c: c.cone.dim)
    assert set(top.cone.rays) == {(0, 1), (2, -1)}


def test_map_point_examples():
    F = builtin_fan("P2")
    u = point_from_hom(F, "U0:{}", [1, 2])
    assert map_point(FanMorphism.identity(F), u) == u
    U = spec(AffineMonoid(2, [(1, 0), (-1, 0), (0, 1)]), "V")
    f = FanMorphism.from_affine(U, A2, [[1, 0], [0, 1]])
    v = point_from_hom(U, "V:{}", [3])
    w = map_point(f, v)
    # e1 is a unit upstairs, so it takes the value 0; e2 takes the value 3
    assert w.open == "U0:{0}" and w.values == (3,)
    assert chart_value(w, (1, 0)) == 0 and chart_value(w, (0, 1)) == 3
    S, T = builtin_toric("P1xP1"), builtin_toric("P1")
    proj = toric_morphism(S, T, [[1, 0]])
    x = point_from_hom(S.fan, "C{0,1}", [3, 5])
    y = map_point(proj, x)
    assert y.values == (3,) or y.values == (5,)
    assert y.fan is T.fan


def test_point_json_round_trip():
    u = point_from_hom(A2, CLOSED, [Fraction(5, 2), "inf"])
    d = u.to_json()
    assert d["values"] == {"0": "5/2", "1": "inf"} or d["values"] == {"0": "5/2"}
    assert point_from_json(A2, d) == u


def _random_point(F, data):
    x = data.draw(st.sampled_from(sorted(F.points)))
    p = F.points[x]
    vals = [data.draw(ext_values) for _ in p.basis]
    try:
        return point_from_hom(F, x, vals)
    except ComplexError:
        return None


@given(st.data(), st.sampled_from(["A2", "A3", "P2", "P1xP1"]))
def test_reduction_and_structure_formulas(data, name):
    F = builtin_fan(name)
    u = _random_point(F, data)
    if u is None:
        return
    r, rho = reduction(u), structure_point(u)
    p = F.points[u.open]
    # at r(u) every Hilbert basis element is positive; at rho(u) it is finite exactly on the face
    for j, h in enumerate(p.basis):
        v = evaluate(u, h)
        assert v > 0
        assert (v is not INF) == (j in p.generizations[rho])
    assert rho in F.points[r].generizations
    # the stratum containing u is the one of its structure point
    C = extended_complex(F)
    assert C.stratum_of(u).point == rho


@given(st.data())
def test_map_point_is_functorial(data):
    A, B, C = builtin_toric("A2"), builtin_toric("A2"), builtin_toric("A1")
    f = toric_morphism(A, B, [[1, 1], [0, 1]])
    g = toric_morphism(B, C, [[1, 0]])
    u = _random_point(A.fan, data)
    if u is None:
        return
    assert map_point(g, map_point(f, u)) == map_point(f.compose(g), u)
    # squares with r and rho
    assert reduction(map_point(f, u)) == f(reduction(u))
    assert structure_point(map_point(f, u)) == f(structure_point(u))


@given(st.lists(st.fractions(min_value=0, max_value=9, max_denominator=4), min_size=2, max_size=2))
def test_finite_locus_of_affine_fan_is_the_cone(vals):
    F = spec(AffineMonoid(2, [(1, 0), (1, 1), (1, 2)]))
    hb = F.points[CLOSED].basis
    # values given by a functional l: u(h) = <l, h>
    l = vals
    u_vals = [sum(a * b for a, b in zip(l, h)) for h in hb]
    if any(v < 0 for v in u_vals):
        with pytest.raises(ComplexError):
            point_from_hom(F, CLOSED, u_vals)
        return
    u = point_from_hom(F, CLOSED, u_vals)
    assert F.points[structure_point(u)].rank == 0
    sigma = max((c.cone for c in extended_complex(F).strata[0].pieces), key=lambda c: c.dim)
    assert sigma.contains(l)
