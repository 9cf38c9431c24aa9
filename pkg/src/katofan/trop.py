"""Tropicalization of valued points into extended cone complexes.

The base field is trivially valued, so a point of the analytic space is seen
only through the valuations of monomials.  Two kinds of points are supported:
:class:`MonomialPoint` records those valuations directly, and
:class:`SeriesPoint` assigns truncated power series to the chart generators,
from which valuations are computed as orders of vanishing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple, Sequence

from katofan import lattice as la
from katofan.complex import (
    INF,
    ComplexPoint,
    GeneralizedComplex,
    evaluate,
    ext,
    ext_min,
    ext_str,
    point_from_hom,
    quotient_class,
    structure_point,
)
from katofan.cone import Cone, dual_cone
from katofan.fan import (
    ChartData,
    FanMorphism,
    KatoFan,
    Overlap,
    ToricFan,
    check_fine_saturated,
    disjoint_union,
    glue,
    is_strict,
    spec,
)
from katofan.monoid import AffineMonoid, face_sets
from katofan.series import DEFAULT_TRUNCATION, TruncatedSeries

Vec = tuple[int, ...]


class TropError(ValueError):
    pass


# -- characteristic fans ---------------------------------------------------------------


@dataclass
class LogAtlas:
    """Charts ``(id, P_i)`` and identifications of their localizations."""

    charts: list[tuple[str, AffineMonoid]]
    overlaps: list[Overlap] = field(default_factory=list)
    name: str = ""


def characteristic_fan(atlas: LogAtlas) -> tuple[KatoFan, dict[str, FanMorphism]]:
    """Glue ``Spec P_i`` into the fan of the atlas; return it with the chart maps.

    Each chart map ``Spec P_i -> F`` is checked to be a strict morphism.
    """
    pieces = [spec(P, cid) for cid, P in atlas.charts]
    F = glue(pieces, atlas.overlaps, atlas.name)
    if not check_fine_saturated(F):
        raise TropError("glued fan is not fine and saturated")
    maps = {}
    for piece, (cid, _) in zip(pieces, atlas.charts):
        glued = F.charts[cid]
        own = piece.charts[cid]
        pm, lh = {}, {}
        for y in piece.points:
            ry = F.resolve(y)
            proj_y, _ = own.maps[y]
            _, sec = glued.maps[ry]
            k = piece.points[y].rank
            pm[y] = ry
            lh[y] = la.matmul(proj_y, sec) if k else []
            lh[y] = [[int(v) for v in row] for row in lh[y]]
        f = FanMorphism(piece, F, pm, lh)
        f.check()
        if not is_strict(f):
            raise TropError(f"chart map of {cid} is not strict")
        maps[cid] = f
    return F, maps


# -- functionals on chart monoids ---------------------------------------------------


def _chart(F: KatoFan, chart: str) -> ChartData:
    try:
        return F.charts[chart]
    except KeyError:
        raise TropError(f"fan has no chart {chart!r}") from None


class _MonoidValuation:
    """An additive ``P -> Q>=0 + {inf}`` given by values on the generators of ``P``."""

    def __init__(self, P: AffineMonoid, values: Sequence):
        self.P = P
        self.values = tuple(ext(v) for v in values)
        if len(self.values) != len(P.generators):
            raise TropError(f"expected {len(P.generators)} values, got {len(self.values)}")
        for g, v in zip(P.generators, self.values):
            if g in P.unit_generators and v != 0:
                raise TropError(f"unit generator {list(g)} must have value 0, got {ext_str(v)}")
        finite = frozenset(i for i, v in enumerate(self.values) if v is not INF)
        if finite not in set(face_sets(P)):
            raise TropError("finite values are not supported on a face of the chart monoid")
        rows = [P.generators[i] for i in sorted(finite)]
        self.face_rows = rows
        sol = la.solve_rational(rows, [self.values[i] for i in sorted(finite)]) if rows else [Fraction(0)] * P.rank
        if sol is None:
            raise TropError("values are not additive on the chart monoid")
        self.ell = sol
        self.finite = finite

    def __call__(self, m: Sequence[int]):
        if not self.face_rows:
            return Fraction(0) if not any(m) else INF
        if la.rank(self.face_rows + [tuple(m)], self.P.rank) == la.rank(self.face_rows, self.P.rank):
            return Fraction(la.dot(self.ell, m))
        return INF


# -- monomial points -------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialPoint:
    """Valuations ``-log|chi^g|`` of the chart generators ``g``, in generator order."""

    chart: str
    values: tuple

    def __init__(self, chart: str, values: Iterable):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "values", tuple(ext(v) for v in values))

    def to_json(self) -> dict:
        return {"chart": self.chart, "values": [ext_str(v) for v in self.values]}


def trop_monomial_point(F: KatoFan, x: MonomialPoint) -> ComplexPoint:
    """The point ``s -> -log|chi^s|_x`` of the extended complex."""
    cd = _chart(F, x.chart)
    u = _MonoidValuation(cd.monoid, x.values)
    c = cd.closed_point
    _, sec = cd.maps[c]
    basis = F.points[c].basis
    vals = [u(la.matvec(sec, h)) for h in basis] if basis else []
    return point_from_hom(F, c, vals)


def _chart_open(F: KatoFan, u: ComplexPoint, chart: str | None) -> str:
    if chart is not None:
        if u.open not in _chart(F, chart).maps:
            raise TropError(f"point lies outside the chart {chart!r}")
        return chart
    for c in sorted(F.charts):
        if u.open in F.charts[c].maps:
            return c
    raise TropError("no chart contains the point")


def chart_value(u: ComplexPoint, m: Sequence[int], chart: str | None = None):
    """``u(chi^m)`` for ``m`` in the chart monoid."""
    F = u.fan
    c = _chart_open(F, u, chart)
    cd = F.charts[c]
    if not cd.monoid.contains(m):
        raise TropError(f"exponent {list(m)} is not in the chart monoid of {c}")
    proj, _ = cd.maps[u.open]
    k = F.points[u.open].rank
    image = la.matvec(proj, m) if k else ()
    return evaluate(u, [int(t) for t in image])


# -- Laurent polynomials and the Gauss section ----------------------------------------------


@dataclass(frozen=True)
class LaurentPolynomial:
    """``sum a_p chi^p`` with distinct exponents and nonzero rational coefficients."""

    terms: tuple

    def __init__(self, terms: Mapping | Iterable):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Vec, Fraction] = {}
        for p, a in items:
            p = tuple(int(t) for t in p)
            acc[p] = acc.get(p, Fraction(0)) + Fraction(a)
        object.__setattr__(self, "terms", tuple(sorted((p, a) for p, a in acc.items() if a != 0)))

    @property
    def support(self) -> list[Vec]:
        return [p for p, _ in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    @classmethod
    def monomial(cls, p: Sequence[int], a=1) -> "LaurentPolynomial":
        return cls({tuple(p): a})

    def to_json(self) -> dict:
        return {"terms": [[list(p), str(a)] for p, a in self.terms]}

    @classmethod
    def from_json(cls, d) -> "LaurentPolynomial":
        return cls([(tuple(p), Fraction(a)) for p, a in d["terms"]])


def gauss_seminorm(u: ComplexPoint, f: LaurentPolynomial, chart: str | None = None):
    """Additive value of ``max |a_p| e^{-u(p)}``: the minimum of ``u(p)`` over the support.

    With trivial absolute values every nonzero coefficient has norm one.
    """
    if f.is_zero():
        return INF
    return ext_min(chart_value(u, p, chart) for p in f.support)


def gauss_point(u: ComplexPoint, chart: str | None = None) -> MonomialPoint:
    """``J(u)`` seen on the chart generators."""
    F = u.fan
    c = _chart_open(F, u, chart)
    P = F.charts[c].monoid
    return MonomialPoint(c, [gauss_seminorm(u, LaurentPolynomial.monomial(g), c) for g in P.generators])


# -- series points ----------------------------------------------------------------------------


@dataclass
class SeriesPoint:
    """Power series assigned to the chart generators (in generator order).

    The assignment has to respect every relation among the generators on the
    range of ``t``-exponents where both sides are known.
    """

    chart: str
    series: tuple
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        self.series = tuple(s if isinstance(s, TruncatedSeries) else TruncatedSeries.from_json(s) for s in self.series)

    def to_json(self) -> dict:
        return {"chart": self.chart, "series": [s.to_json() for s in self.series], "truncation": self.truncation}


def _check_relations(P: AffineMonoid, x: SeriesPoint) -> None:
    gens = P.generators
    if len(x.series) != len(gens):
        raise TropError(f"expected {len(gens)} series on chart {x.chart}, got {len(x.series)}")
    for g, s in zip(gens, x.series):
        if g in P.unit_generators and not s.coeffs.get(0):
            raise TropError(f"unit generator {list(g)} must be sent to a unit series")
    rels = la.kernel_basis(la.transpose(list(gens), P.rank), len(gens)) if gens else []
    for rel in rels:
        lhs = TruncatedSeries.constant(1)
        rhs = TruncatedSeries.constant(1)
        for c, s in zip(rel, x.series):
            if c > 0:
                lhs = lhs * s**c
            elif c < 0:
                rhs = rhs * s ** (-c)
        if not lhs.agrees_with(rhs):
            raise TropError(f"series assignment violates the relation {list(rel)} among generators")


def monomial_series(F: KatoFan, x: SeriesPoint, m: Sequence[int]) -> TruncatedSeries:
    """The series ``chi^m(x)`` for ``m`` in the chart monoid."""
    P = _chart(F, x.chart).monoid
    coeffs = P.express(m)
    if coeffs is None:
        raise TropError(f"exponent {list(m)} is not in the chart monoid of {x.chart}")
    out = TruncatedSeries.constant(1)
    for i, c in sorted(coeffs.items()):
        s = x.series[i]
        if c < 0:
            s = s.inverse(x.truncation)
            c = -c
        out = out * s**c
    return out


def _order(s: TruncatedSeries):
    o = s.order()
    return INF if o is None else Fraction(o)


def series_orders(F: KatoFan, x: SeriesPoint) -> MonomialPoint:
    """Orders of the assigned series; raises :class:`IndeterminateOrder` when not certified."""
    _check_relations(_chart(F, x.chart).monoid, x)
    return MonomialPoint(x.chart, [_order(s) for s in x.series])


def trop_series_point(F: KatoFan, x: SeriesPoint) -> ComplexPoint:
    return trop_monomial_point(F, series_orders(F, x))


def retract_series_point(F: KatoFan, x: SeriesPoint, f: LaurentPolynomial):
    """``min_p ord chi^p(x)`` over the support of ``f``, straight from the series."""
    _check_relations(_chart(F, x.chart).monoid, x)
    if f.is_zero():
        return INF
    return ext_min(_order(monomial_series(F, x, p)) for p in f.support)


def evaluate_polynomial(F: KatoFan, x: SeriesPoint, f: LaurentPolynomial) -> TruncatedSeries:
    out = TruncatedSeries.zero()
    for p, a in f.terms:
        out = out + monomial_series(F, x, p) * a
    return out


def series_reduction(F: KatoFan, x: SeriesPoint) -> frozenset:
    """Generators whose series has positive order (the prime ``r(x)`` on the chart)."""
    return frozenset(i for i, v in enumerate(series_orders(F, x).values) if v != 0)


def series_structure(F: KatoFan, x: SeriesPoint) -> frozenset:
    """Generators sent to zero (the prime ``rho(x)`` on the chart)."""
    return frozenset(i for i, v in enumerate(series_orders(F, x).values) if v is INF)


def chart_point_of_prime(F: KatoFan, chart: str, prime: frozenset) -> str:
    """Fan point of the chart whose prime is generated by the given generator indices."""
    cd = _chart(F, chart)
    P = cd.monoid
    face = frozenset(range(len(P.generators))) - prime
    if face not in set(face_sets(P)):
        raise TropError("generator set is not the complement of a face")
    c = cd.closed_point
    _, sec = cd.maps[c]
    span = [P.generators[i] for i in face]
    r = la.rank(span, P.rank) if span else 0
    # a stalk basis element becomes a unit exactly when its lift lies in the face
    zero_face = [
        j
        for j, h in enumerate(F.points[c].basis)
        if span and la.rank(span + [tuple(la.matvec(sec, h))], P.rank) == r
    ]
    return F.generization_with_face(c, zero_face)


# -- toric tropical hypersurfaces ---------------------------------------------------------


class StratumCones(NamedTuple):
    """Cones of the hypersurface inside the stratum of ``tau``, in ``N / N_tau`` coordinates."""

    tau: str
    proj: list
    meets: bool
    cones: tuple


@dataclass
class Hypersurface:
    toric: ToricFan
    f: LaurentPolynomial
    strata: dict

    def contains(self, tau: str, w: Sequence) -> bool:
        s = self.strata[tau]
        return any(c.contains(w) for c in s.cones)

    def to_json(self) -> dict:
        return {
            "schema": "katofan/1",
            "kind": "hypersurface",
            "polynomial": self.f.to_json(),
            "strata": [
                {
                    "fan_point": t,
                    "meets_orbit": s.meets,
                    "cones": [_cone_json(c) for c in s.cones],
                }
                for t, s in sorted(self.strata.items(), key=lambda kv: (len(self.toric.cones[kv[0]].rays), kv[0]))
            ],
        }


def _cone_json(c: Cone) -> dict:
    d = {"rays": [list(r) for r in c.rays]}
    if c.lineality:
        d["lineality"] = [list(l) for l in c.lineality]
    return d


def stratum_projection(T: ToricFan, tau: str) -> tuple[list, list]:
    """``N -> N / N_tau`` and a section, where ``N_tau`` is the span of ``tau``."""
    rays = T.cones[tau].rays
    sub = la.saturation_basis(rays, T.lattice_rank) if rays else []
    return la.quotient_map(sub, T.lattice_rank)


def _local_exponent(T: ToricFan, sigma: str, supp: Sequence[Vec]) -> Vec:
    dual = dual_cone(T.cones[sigma])
    for m in supp:
        if all(dual.contains([a - b for a, b in zip(p, m)]) for p in supp):
            return m
    raise TropError(
        f"no monomial of the support divides the others on the chart {sigma}; "
        "the closure is not cut out by one shifted equation there"
    )


def _maximal_cones(cones: list[Cone]) -> tuple:
    uniq = []
    for c in cones:
        if c not in uniq:
            uniq.append(c)
    keep = []
    for c in uniq:
        bigger = any(d != c and _cone_le(c, d) for d in uniq)
        if not bigger:
            keep.append(c)
    return tuple(sorted(keep, key=lambda c: (c.dim, c.rays, c.lineality)))


def _cone_le(a: Cone, b: Cone) -> bool:
    gens = list(a.rays) + list(a.lineality) + [tuple(-x for x in l) for l in a.lineality]
    return all(b.contains(g) for g in gens)


def _stratum_cones(T: ToricFan, tau: str, supp: list[Vec]) -> StratumCones:
    n = T.lattice_rank
    tcone = T.cones[tau]
    proj, _ = stratum_projection(T, tau)
    q = len(proj)
    restricted = None
    pieces: list[Cone] = []
    for sigma in T.containing(tau):
        scone = T.cones[sigma]
        m = _local_exponent(T, sigma, supp)
        R = [p for p in supp if all(la.dot([a - b for a, b in zip(p, m)], r) == 0 for r in tcone.rays)]
        restricted = R
        for p1, p2 in combinations(R, 2):
            diff = tuple(a - b for a, b in zip(p1, p2))
            ineq = list(scone.inequalities) + [tuple(a - b for a, b in zip(p, p1)) for p in R]
            eqs = list(scone.equations) + [diff]
            piece = Cone.from_inequalities(ineq, n, eqs)
            gens = [la.matvec(proj, r) for r in piece.rays]
            for l in piece.lineality:
                v = la.matvec(proj, l)
                gens += [v, tuple(-x for x in v)]
            pieces.append(Cone.from_generators(gens, q) if q else Cone(0, ()))
    meets = restricted is not None and len(restricted) >= 2
    return StratumCones(tau, proj, meets, _maximal_cones(pieces) if meets else ())


def tropical_hypersurface(T: ToricFan, f: LaurentPolynomial, jobs: int = 1) -> Hypersurface:
    """Corner locus of ``f`` on every stratum of the extended complex of a toric fan.

    On the chart of ``sigma`` the closure of ``V(f)`` is cut out by
    ``chi^{-m} f`` for a support exponent ``m`` dividing all others.  Its
    restriction to the orbit of ``tau`` keeps the exponents ``p`` with
    ``p - m`` in ``tau^perp``.  The piece inside ``sigma / tau`` is where the
    minimum of ``<v, p>`` over those exponents is attained at least twice.
    """
    if f.is_zero():
        raise TropError("the zero polynomial has no hypersurface")
    n = T.lattice_rank
    supp = f.support
    for p in supp:
        if len(p) != n:
            raise TropError(f"exponent {list(p)} does not live in M of rank {n}")
    taus = sorted(T.cones, key=lambda t: (len(T.cones[t].rays), t))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(lambda t: _stratum_cones(T, t, supp), taus))
    else:
        done = [_stratum_cones(T, t, supp) for t in taus]
    strata = {s.tau: s for s in done}
    return Hypersurface(T, f, strata)


def local_equation(T: ToricFan, chart: str, f: LaurentPolynomial) -> LaurentPolynomial:
    """``chi^{-m} f`` with ``m`` the support exponent dividing all others on the chart."""
    if chart not in T.cones:
        raise TropError(f"{chart!r} is not a cone of the toric fan")
    m = _local_exponent(T, chart, f.support)
    return LaurentPolynomial({tuple(a - b for a, b in zip(p, m)): c for p, c in f.terms})


def stratum_coordinates(T: ToricFan, u: ComplexPoint) -> tuple[str, tuple]:
    """``(tau, w)`` with ``tau = rho(u)`` and ``w`` in ``N / N_tau`` tensor Q."""
    tau = structure_point(u)
    n = T.lattice_rank
    perp = la.kernel_basis(list(T.cones[tau].rays), n) if T.cones[tau].rays else [tuple(r) for r in la.identity(n)]
    a = u.open
    cd = T.fan.charts[a]
    proj_a, _ = cd.maps[a]
    k = T.fan.points[a].rank
    vals = []
    for b in perp:
        image = la.matvec(proj_a, b) if k else ()
        vals.append(evaluate(u, [int(t) for t in image]))
    if any(v is INF for v in vals):
        raise TropError("finite part of the point does not cover the orbit lattice")
    v = la.solve_rational(perp, vals) if perp else []
    proj, _ = stratum_projection(T, tau)
    w = tuple(la.matvec(proj, v)) if proj else ()
    return tau, w


def trop_membership(T: ToricFan, f: LaurentPolynomial, x: SeriesPoint, H: Hypersurface | None = None) -> bool:
    """Whether the tropicalization of a point of ``V(f)`` lies in the computed hypersurface.

    The point must satisfy the local equation ``chi^{-m} f = 0`` of the
    closure on its chart, on the known range of exponents.
    """
    value = evaluate_polynomial(T.fan, x, local_equation(T, x.chart, f))
    if not value.is_zero_to_precision():
        raise TropError(f"f does not vanish at the series point: f(x) = {value!r}")
    H = H or tropical_hypersurface(T, f)
    u = trop_series_point(T.fan, x)
    tau, w = stratum_coordinates(T, u)
    return H.contains(tau, w)


# -- generalized complexes ---------------------------------------------------------------


def generalized_trop(G: GeneralizedComplex, x: MonomialPoint | ComplexPoint) -> frozenset:
    """The class of ``trop(x)`` in the quotient of ``Sigma(base)``."""
    u = x if isinstance(x, ComplexPoint) else trop_monomial_point(G.base, x)
    return quotient_class(G, u)



# -- worked descent diagrams ----------------------------------------------------------------

_SWAP = [[0, 1], [1, 0]]
_ID2 = [[1, 0], [0, 1]]


def nodal_cubic_atlas(prefix: str = "") -> LogAtlas:
    """Two copies of ``N^2`` glued over both coordinate localizations.

    This is the fan of the pullback of a nodal cubic along an etale double
    cover on which its two branches become distinct components.
    """
    u, v = f"{prefix}U", f"{prefix}V"
    N2 = AffineMonoid.free(2)
    overlaps = [Overlap(f"{u}:{{0}}", f"{v}:{{0}}", [[1]]), Overlap(f"{u}:{{1}}", f"{v}:{{1}}", [[1]])]
    return LogAtlas([(u, N2), (v, N2)], overlaps, f"{prefix}nodal")


def nodal_cubic_quotient() -> GeneralizedComplex:
    """``F' x_F F' => F'`` for the nodal cubic: the identity and the swap of the two charts."""
    base, _ = characteristic_fan(nodal_cubic_atlas())
    a, _ = characteristic_fan(nodal_cubic_atlas("A"))
    b, _ = characteristic_fan(nodal_cubic_atlas("B"))
    cover = disjoint_union([a, b], "nodal x nodal")
    s = FanMorphism.from_charts(cover, base, {"AU": ("U", _ID2), "AV": ("V", _ID2), "BU": ("U", _ID2), "BV": ("V", _ID2)})
    t = FanMorphism.from_charts(cover, base, {"AU": ("U", _ID2), "AV": ("V", _ID2), "BU": ("V", _SWAP), "BV": ("U", _SWAP)})
    return GeneralizedComplex(base, cover, s, t)


def swap_quotient() -> GeneralizedComplex:
    """``Spec N^2`` modulo the involution exchanging the two coordinates."""
    N2 = AffineMonoid.free(2)
    base = spec(N2, "U")
    cover = disjoint_union([spec(N2, "A"), spec(N2, "B")], "U x U")
    s = FanMorphism.from_charts(cover, base, {"A": ("U", _ID2), "B": ("U", _ID2)})
    t = FanMorphism.from_charts(cover, base, {"A": ("U", _ID2), "B": ("U", _SWAP)})
    return GeneralizedComplex(base, cover, s, t)
