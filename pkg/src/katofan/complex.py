"""Extended cone complexes of Kato fans.

A point of the extended complex is an additive map ``u: P -> Q>=0 + {inf}``
on the stalk ``P`` of some point of the fan.  Points are stored canonically
at their reduction point ``r(u)``, where ``u`` is positive on every nonzero
element; then two points are equal exactly when their records agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from katofan import lattice as la
from katofan.cone import Cone, cone_of_monoid
from katofan.fan import FanMorphism, KatoFan, is_strict
from katofan.monoid import AffineMonoid, face_sets


class ComplexError(ValueError):
    pass


# -- extended values ------------------------------------------------------------------


class _Infinity:
    """The point at infinity of ``R>=0``; absorbs addition, ``0 * inf = 0``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, k):
        if k == 0:
            return Fraction(0)
        if k < 0:
            raise ComplexError("negative multiple of infinity")
        return self

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("katofan-inf")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True


INF = _Infinity()
ExtendedValue = Union[Fraction, _Infinity]


def ext(x) -> ExtendedValue:
    """Parse ``'inf'``, ``'p/q'``, ints or Fractions into an extended value."""
    if x is INF or (isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo")):
        return INF
    if isinstance(x, float):
        if x == float("inf"):
            return INF
        raise ComplexError("floats are not accepted; pass 'p/q' strings or Fractions")
    v = Fraction(x)
    if v < 0:
        raise ComplexError(f"extended values are nonnegative, got {v}")
    return v


def ext_str(v) -> str:
    return "inf" if v is INF else str(Fraction(v))


def ext_min(values: Iterable) -> ExtendedValue:
    best = INF
    for v in values:
        if v is not INF and (best is INF or v < best):
            best = v
    return best


# -- points ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplexPoint:
    """``u`` on the stalk at ``open``, recorded on its Hilbert basis.

    Built by :func:`point_from_hom`, which guarantees the canonical form:
    ``open`` is the reduction point and every value is positive.
    """

    fan: KatoFan = field(repr=False)
    open: str
    values: tuple

    def key(self) -> tuple:
        return (self.open, tuple(ext_str(v) for v in self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexPoint):
            return NotImplemented
        return self.fan is other.fan and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    @cached_property
    def finite_face(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.values) if v is not INF)

    @cached_property
    def functional(self) -> list[Fraction]:
        """A rational covector agreeing with ``u`` on the finite face."""
        return _solve_functional(self.fan.points[self.open].basis, self.values, self.finite_face)

    def to_json(self) -> dict:
        return {
            "schema": "katofan/1",
            "kind": "point",
            "fan": self.fan.name,
            "open": self.open,
            "values": {str(j): ext_str(v) for j, v in enumerate(self.values)},
        }

    def __repr__(self) -> str:
        return f"ComplexPoint({self.open}, ({', '.join(ext_str(v) for v in self.values)}))"


def _solve_functional(basis, values, face) -> list[Fraction]:
    n = len(basis[0]) if basis else 0
    rows = [basis[j] for j in sorted(face)]
    if not rows:
        return [Fraction(0)] * n
    sol = la.solve_rational(rows, [values[j] for j in sorted(face)])
    if sol is None:
        # find a witness relation among the finite basis elements
        for rel in la.kernel_basis(la.transpose(rows, n), len(rows)):
            total = sum(c * values[j] for c, j in zip(rel, sorted(face)))
            if total:
                terms = " + ".join(f"{c}*h{j}" for c, j in zip(rel, sorted(face)) if c)
                raise ComplexError(f"values are not additive: relation {terms} = 0 but values give {total}")
        raise ComplexError("values are not additive")
    return sol


def point_from_hom(F: KatoFan, open: str, values: Sequence) -> ComplexPoint:
    """The point given by values on the Hilbert basis of ``stalk_open``.

    Checks that the values extend additively: the finite ones must be
    supported on a face and fit a linear functional there.  The result is
    moved to its reduction point.
    """
    p = F.point(open)
    vals = [ext(v) for v in values]
    if len(vals) != len(p.basis):
        raise ComplexError(f"expected {len(p.basis)} values on the Hilbert basis of {open}, got {len(vals)}")
    faces = set(face_sets(p.stalk))
    finite = frozenset(j for j, v in enumerate(vals) if v is not INF)
    if finite not in faces:
        raise ComplexError(
            f"finite values on {_fmt(finite)} are not supported on a face; a sum of finite elements "
            "would have to take the value inf"
        )
    _solve_functional(p.basis, vals, finite)
    zero = frozenset(j for j in finite if vals[j] == 0)
    if zero not in faces:
        raise ComplexError(f"zero set {_fmt(zero)} is not a face")
    x = F.generization_with_face(open, zero)
    L = p.localizations[x]
    px = F.points[x]
    new = []
    for h in px.basis:
        j = next(j for j, g in enumerate(p.basis) if tuple(la.matvec(L, g)) == h)
        new.append(vals[j])
    return ComplexPoint(F, x, tuple(new))


def _fmt(face) -> str:
    return "{" + ",".join(map(str, sorted(face))) + "}"


def evaluate(x: ComplexPoint, m: Sequence[int]):
    """``u(m)`` for ``m`` in the stalk at ``x.open`` (or in the span of its finite face)."""
    F = x.fan
    p = F.points[x.open]
    m = tuple(int(t) for t in m)
    if len(m) != p.rank:
        raise ComplexError(f"element {list(m)} does not live in the stalk at {x.open}")
    rho = structure_point(x)
    L = p.localizations[rho]
    in_face = F.points[rho].rank == 0 or not any(la.matvec(L, m))
    if in_face:
        return Fraction(la.dot(x.functional, m))
    if p.stalk.contains(m):
        return INF
    raise ComplexError(f"{list(m)} is neither in the stalk nor in the span of the finite face")


def reduction(x: ComplexPoint) -> str:
    """``r(u)``: the prime where ``u`` is positive."""
    return x.open


def structure_point(x: ComplexPoint) -> str:
    """``rho(u)``: the prime where ``u`` is infinite."""
    return x.fan.generization_with_face(x.open, x.finite_face)


def values_on(x: ComplexPoint, z: str) -> tuple:
    """``u`` written on the Hilbert basis of ``stalk_z`` for a specialization ``z`` of ``r(u)``."""
    F = x.fan
    pz = F.point(z)
    if x.open not in pz.generizations:
        raise ComplexError(f"{x.open} is not a generization of {z}; the point is outside that affine open")
    L = pz.localizations[x.open]
    face = pz.generizations[x.open]
    out = []
    for j, h in enumerate(pz.basis):
        out.append(Fraction(0) if j in face else evaluate(x, la.matvec(L, h)))
    return tuple(out)


def map_point(f: FanMorphism, x: ComplexPoint) -> ComplexPoint:
    """``u -> u o f^#`` at ``f(r(u))``."""
    if x.fan is not f.source:
        raise ComplexError("point does not lie on the source fan of the morphism")
    a = x.open
    b = f(a)
    phi = f.local_homs[a]
    rank_a = f.source.points[a].rank
    vals = []
    for h in f.target.points[b].basis:
        m = la.matvec(phi, h) if rank_a else ()
        vals.append(evaluate(x, m))
    return point_from_hom(f.target, b, vals)


def point_from_json(F: KatoFan, d: Mapping) -> ComplexPoint:
    p = F.point(d["open"])
    vals = d["values"]
    if isinstance(vals, Mapping):
        seq = [vals[str(j)] for j in range(len(p.basis))]
    else:
        seq = list(vals)
    return point_from_hom(F, d["open"], seq)


# -- strata ------------------------------------------------------------------------------


class StratumPiece(NamedTuple):
    chart: str
    cone: Cone


class Stratum(NamedTuple):
    """``rho^-1(point)``: pieces ``Hom(face, R>=0)`` over every specialization."""

    point: str
    dim: int
    label: str
    pieces: tuple


@dataclass
class ExtendedComplex:
    fan: KatoFan
    strata: list

    def stratum(self, x: str) -> Stratum:
        for s in self.strata:
            if s.point == x:
                return s
        raise ComplexError(f"no stratum for {x!r}")

    def stratum_of(self, u: ComplexPoint) -> Stratum:
        return self.stratum(structure_point(u))

    def to_json(self) -> dict:
        return {
            "schema": "katofan/1",
            "kind": "strata",
            "fan": self.fan.name,
            "strata": [
                {
                    "fan_point": s.point,
                    "dim": s.dim,
                    "type": s.label,
                    "pieces": [{"chart": c.chart, "rays": [list(r) for r in c.cone.rays]} for c in s.pieces],
                }
                for s in self.strata
            ],
        }


def _label(dim: int, boundaryless: bool, single_free: bool) -> str:
    if dim == 0:
        return "point"
    power = "" if dim == 1 else f"^{dim}"
    if boundaryless:
        return "R" + power
    if single_free:
        return "R>=0" + power
    return "cone" if dim else "point"


def extended_complex(F: KatoFan) -> ExtendedComplex:
    """Enumerate the strata ``rho^-1(x)``, one per fan point.

    The stratum of ``x`` is glued from ``Hom(G, R>=0)`` where ``G`` runs over
    the faces of ``stalk_z`` inverted at ``x``, for specializations ``z`` of
    ``x``.  Labels: ``point``; ``R^k`` when every facet of a maximal piece is
    shared by two maximal pieces; ``R>=0^k`` for a single free piece;
    ``cone`` otherwise.
    """
    strata = []
    for x in sorted(F.points, key=lambda x: (F.points[x].rank, x)):
        over = [z for z in F.points if x in F.points[z].generizations]
        pieces = []
        dims = {}
        for z in sorted(over):
            pz = F.points[z]
            G = pz.generizations[x]
            face = AffineMonoid(pz.rank, [pz.basis[j] for j in G])
            pieces.append(StratumPiece(z, cone_of_monoid(face)))
            dims[z] = pz.rank - F.points[x].rank
        dim = max(dims.values())
        maximal = [z for z in over if not any(z2 != z and z in F.points[z2].generizations for z2 in over)]
        boundaryless = True
        for z in maximal:
            for w in F.points[z].generizations:
                if w in over and dims[w] == dims[z] - 1:
                    shared = sum(1 for z2 in maximal if w in F.points[z2].generizations)
                    if shared < 2:
                        boundaryless = False
        if dim == 0:
            boundaryless = False
        single_free = len(maximal) == 1 and len(F.points[maximal[0]].generizations[x]) == dim
        strata.append(Stratum(x, dim, _label(dim, boundaryless and len(maximal) > 1, single_free), tuple(pieces)))
    return ExtendedComplex(F, strata)


# -- generalized complexes ---------------------------------------------------------------


class QuotientError(ComplexError):
    pass


@dataclass
class GeneralizedComplex:
    """Colimit of ``Sigma(cover) => Sigma(base)`` along two strict morphisms."""

    base: KatoFan
    cover: KatoFan
    s: FanMorphism
    t: FanMorphism
    depth: int = 16

    def __post_init__(self):
        for name, f in (("first", self.s), ("second", self.t)):
            if f.source is not self.cover or f.target is not self.base:
                raise QuotientError(f"{name} arrow must go from the cover fan to the base fan")
            f.check()
            if not is_strict(f):
                raise QuotientError(f"{name} arrow is not strict")
            if set(f.point_map.values()) != set(self.base.points):
                raise QuotientError(f"{name} arrow is not surjective on points")


def _preimages(f: FanMorphism, x: ComplexPoint) -> list[ComplexPoint]:
    out = []
    for c, pc in f.source.points.items():
        if f(c) != x.open:
            continue
        phi = f.local_homs[c]
        n = pc.rank
        inv = la.inverse_unimodular(phi) if n else []
        vals = [evaluate(x, la.matvec(inv, h) if n else ()) for h in pc.basis]
        out.append(point_from_hom(f.source, c, vals))
    return out


def quotient_class(G: GeneralizedComplex, x: ComplexPoint) -> frozenset:
    """The equivalence class of ``x`` under the relation generated by ``s(z) ~ t(z)``."""
    if x.fan is not G.base:
        raise QuotientError("point does not lie on the base complex")
    seen = {x}
    frontier = [x]
    for _ in range(G.depth):
        nxt = []
        for p in frontier:
            for a, b in ((G.s, G.t), (G.t, G.s)):
                for z in _preimages(a, p):
                    q = map_point(b, z)
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
        if not nxt:
            return frozenset(seen)
        frontier = nxt
    raise QuotientError(f"orbit closure did not stabilize within {G.depth} steps; descent data looks invalid")


def quotient_points_equal(G: GeneralizedComplex, x: ComplexPoint, y: ComplexPoint) -> bool:
    if y.fan is not G.base:
        raise QuotientError("point does not lie on the base complex")
    return y in quotient_class(G, x)
