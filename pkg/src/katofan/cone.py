"""Rational polyhedral cones.

A cone lives in ``N_R`` for ``N = Z^n`` and is stored as primitive rays plus a
lattice basis of its lineality space.  Strictly convex cones have empty
lineality.  The inequality description is computed on demand by the double
description method and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, NamedTuple, Sequence

from katofan import lattice as la

Vec = tuple[int, ...]


# -- double description ---------------------------------------------------------


def _canonical_rays(rays: Iterable[Sequence], lin: Sequence[Vec], n: int) -> tuple[Vec, ...]:
    """Project rays off the lineality space, make them primitive, sort, dedupe."""
    out = set()
    for r in rays:
        v = la.orthogonal_projection(lin, r) if lin else r
        if any(v):
            out.add(la.integral_primitive(v))
    return tuple(sorted(out))


def double_description(constraints: Sequence[Sequence[int]], n: int) -> tuple[list[Vec], list[Vec]]:
    """Generators of ``{x in R^n : c.x >= 0 for all c}``.

    Returns ``(rays, lineality)``: extreme rays (modulo lineality) and a
    lattice basis of the lineality space.  Constraints are added one at a
    time; ray pairs across a new hyperplane are combined only when adjacent,
    by the algebraic rank test.
    """
    lin: list[Vec] = [tuple(r) for r in la.identity(n)]
    rays: list[Vec] = []
    done: list[Vec] = []
    for c in constraints:
        c = tuple(c)
        if not any(c):
            continue
        j = next((j for j, l in enumerate(lin) if la.dot(c, l)), None)
        if j is not None:
            hit = lin[j]
            s = la.dot(c, hit)
            if s < 0:
                hit, s = tuple(-x for x in hit), -s
            rest = [la.primitive([s * a - la.dot(c, l) * b for a, b in zip(l, hit)]) for l in lin[:j] + lin[j + 1 :]]
            lin = la.saturation_basis(rest, n) if any(any(l) for l in rest) else []
            rays = [la.primitive([s * a - la.dot(c, r) * b for a, b in zip(r, hit)]) for r in rays]
            rays.append(hit)
            done.append(c)
            continue
        pos, neg, zero = [], [], []
        for r in rays:
            v = la.dot(c, r)
            (pos if v > 0 else neg if v < 0 else zero).append(r)
        if not neg:
            done.append(c)
            continue
        rank_all = la.rank(done, n)
        tight = {r: [d for d in done if la.dot(d, r) == 0] for r in pos + neg}
        new = list(pos) + list(zero)
        for p in pos:
            tp = set(tight[p])
            for q in neg:
                common = [d for d in tight[q] if d in tp]
                if (la.rank(common, n) if common else 0) != rank_all - 2:
                    continue
                a, b = la.dot(c, p), -la.dot(c, q)
                new.append(la.primitive([b * x + a * y for x, y in zip(p, q)]))
        done.append(c)
        rays = new
    return rays, [tuple(l) for l in lin]


# -- cones --------------------------------------------------------------------


class FaceLattice(NamedTuple):
    """Faces as frozensets of ray indices, sorted by dimension then indices."""

    faces: tuple[frozenset, ...]
    dims: tuple[int, ...]

    def leq(self, a: frozenset, b: frozenset) -> bool:
        return a <= b

    def covers(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` with face i a facet of face j."""
        out = []
        for j, b in enumerate(self.faces):
            for i, a in enumerate(self.faces):
                if a < b and self.dims[i] == self.dims[j] - 1:
                    out.append((i, j))
        return out


@dataclass(frozen=True, eq=False)
class Cone:
    """A rational polyhedral cone ``cone(rays) + span(lineality)`` in ``R^n``.

    Construct with :meth:`from_generators` or :meth:`from_inequalities` to get
    the canonical form; the raw constructor trusts its arguments.
    """

    lattice_rank: int
    rays: tuple[Vec, ...]
    lineality: tuple[Vec, ...] = ()

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], n: int) -> "Cone":
        gens = [tuple(g) for g in gens if any(g)]
        if not gens:
            return cls(n, (), ())
        ineq, eqs = double_description(gens, n)
        return cls.from_inequalities(ineq, n, eqs)

    @classmethod
    def from_inequalities(
        cls, inequalities: Iterable[Sequence[int]], n: int, equations: Iterable[Sequence[int]] = ()
    ) -> "Cone":
        ineq = [tuple(c) for c in inequalities]
        eqs = [tuple(e) for e in equations]
        cons = ineq + eqs + [tuple(-x for x in e) for e in eqs]
        rays, lin = double_description(cons, n)
        lin = la.hermite_normal_form(lin, n)
        return cls(n, _canonical_rays(rays, lin, n), tuple(lin))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cone):
            return NotImplemented
        return (self.lattice_rank, self.rays, self.lineality) == (
            other.lattice_rank,
            other.rays,
            other.lineality,
        )

    def __hash__(self) -> int:
        return hash((self.lattice_rank, self.rays, self.lineality))

    @cached_property
    def _dual_data(self) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
        lin = list(self.lineality)
        cons = list(self.rays) + lin + [tuple(-x for x in l) for l in lin]
        rays, dlin = double_description(cons, self.lattice_rank)
        dlin = la.hermite_normal_form(dlin, self.lattice_rank)
        return _canonical_rays(rays, dlin, self.lattice_rank), tuple(dlin)

    @property
    def inequalities(self) -> tuple[Vec, ...]:
        """Facet normals: ``c.x >= 0`` on the cone, irredundant."""
        return self._dual_data[0]

    @property
    def equations(self) -> tuple[Vec, ...]:
        """Basis of the covectors vanishing on the cone."""
        return self._dual_data[1]

    @property
    def dim(self) -> int:
        return la.rank(list(self.rays) + list(self.lineality), self.lattice_rank) if (
            self.rays or self.lineality
        ) else 0

    @property
    def is_strictly_convex(self) -> bool:
        return not self.lineality

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    def contains(self, v: Sequence) -> bool:
        if any(la.dot(e, v) for e in self.equations):
            return False
        return all(la.dot(c, v) >= 0 for c in self.inequalities)

    def in_relative_interior(self, v: Sequence) -> bool:
        return self.contains(v) and all(la.dot(c, v) > 0 for c in self.inequalities)

    def ray_indices_on(self, covector: Sequence) -> frozenset:
        return frozenset(i for i, r in enumerate(self.rays) if la.dot(covector, r) == 0)

    def face(self, indices: Iterable[int]) -> "Cone":
        idx = sorted(indices)
        return Cone(self.lattice_rank, tuple(self.rays[i] for i in idx), self.lineality)

    def relative_interior_point(self) -> Vec:
        return tuple(sum(col) for col in zip(*self.rays)) if self.rays else (0,) * self.lattice_rank

    def to_json(self) -> dict:
        d = {"lattice_rank": self.lattice_rank, "rays": [list(r) for r in self.rays]}
        if self.lineality:
            d["lineality"] = [list(l) for l in self.lineality]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Cone":
        n = int(d["lattice_rank"])
        lin = [tuple(l) for l in d.get("lineality", [])]
        gens = [tuple(r) for r in d["rays"]] + lin + [tuple(-x for x in l) for l in lin]
        for g in gens:
            if len(g) != n:
                raise ValueError(f"ray {list(g)} has length {len(g)}, expected {n}")
        return cls.from_generators(gens, n)

    def __repr__(self) -> str:
        lin = f", lineality={list(map(list, self.lineality))}" if self.lineality else ""
        return f"Cone(rays={list(map(list, self.rays))}{lin})"


def dual_cone(sigma: Cone) -> Cone:
    """``sigma^vee = {m : <m, v> >= 0 for v in sigma}`` in ``M = Hom(N, Z)``.

    >>> dual_cone(Cone.from_generators([(1, 0), (1, 2)], 2)).rays
    ((0, 1), (2, -1))
    """
    return Cone(sigma.lattice_rank, sigma.inequalities, sigma.equations)


def faces(sigma: Cone) -> FaceLattice:
    """All faces, as index sets into ``sigma.rays``.

    Faces are the intersections of facets, together with the whole cone.  The
    minimal face (the lineality space, or the origin) is the empty set.
    """
    found = {frozenset(range(len(sigma.rays)))}
    frontier = set(found)
    facets = {sigma.ray_indices_on(c) for c in sigma.inequalities}
    while frontier:
        nxt = set()
        for f in frontier:
            for g in facets:
                h = f & g
                if h not in found:
                    found.add(h)
                    nxt.add(h)
        frontier = nxt
    lin_rank = len(sigma.lineality)
    dims = {
        f: lin_rank + (la.rank([sigma.rays[i] for i in f], sigma.lattice_rank) if f else 0) for f in found
    }
    # lineality may be linearly dependent with rays only when both are present,
    # which the canonical projection rules out
    order = sorted(found, key=lambda f: (dims[f], sorted(f)))
    return FaceLattice(tuple(order), tuple(dims[f] for f in order))


def supporting_faces_bruteforce(sigma: Cone) -> set[frozenset]:
    """Faces found by scanning hyperplanes through ``dim - 1`` rays.

    Independent of the double description: every ``dim - 1`` subset of rays
    spanning a hyperplane of ``span(sigma)`` gives a candidate normal, kept
    when one of its signs is nonnegative on all rays.  Faces are then the
    intersections of those facets.  Used as a test oracle.
    """
    n = sigma.lattice_rank
    rays = list(sigma.rays)
    top = frozenset(range(len(rays)))
    if not rays:
        return {top}
    if sigma.lineality:
        proj, _ = la.quotient_map(sigma.lineality, n)
        rays = [la.matvec(proj, r) for r in rays]
        n = len(proj)
    basis = la.saturation_basis(rays, n)
    coords = [la.coordinates(basis, r) for r in rays]
    k = len(basis)
    facets = set()
    for sub in combinations(range(len(rays)), k - 1):
        rows = [coords[i] for i in sub]
        if k > 1 and la.rank(rows, k) != k - 1:
            continue
        normal = la.kernel_basis(rows, k) if rows else [(1,)]
        (v,) = normal
        vals = [la.dot(v, c) for c in coords]
        if all(x >= 0 for x in vals) or all(x <= 0 for x in vals):
            facets.add(frozenset(i for i, x in enumerate(vals) if x == 0))
    found = {top}
    frontier = {top}
    while frontier:
        nxt = {f & g for f in frontier for g in facets} - found
        found |= nxt
        frontier = nxt
    return found


# -- lattice points -----------------------------------------------------------


def grading(sigma: Cone) -> Vec:
    """An integral covector positive on ``sigma`` minus its lineality.

    The sum of facet normals works: it vanishes only where every facet
    inequality is tight.
    """
    ineq = sigma.inequalities
    if not ineq:
        return (0,) * sigma.lattice_rank
    return tuple(sum(col) for col in zip(*ineq))


def triangulate(sigma: Cone) -> list[tuple[int, ...]]:
    """Pulling triangulation of a strictly convex cone into simplicial cones.

    Simplices are sorted tuples of ray indices.
    """
    lat = faces(sigma)
    dims = dict(zip(lat.faces, lat.dims))
    memo: dict[frozenset, list[tuple[int, ...]]] = {}

    def tri(f: frozenset) -> list[tuple[int, ...]]:
        if f in memo:
            return memo[f]
        if len(f) == dims[f]:
            res = [tuple(sorted(f))]
        else:
            v = min(f)
            res = []
            for g in lat.faces:
                if g < f and dims[g] == dims[f] - 1 and v not in g:
                    res.extend(tuple(sorted(s + (v,))) for s in tri(g))
        memo[f] = res
        return res

    top = frozenset(range(len(sigma.rays)))
    return tri(top) if sigma.rays else []


def _span_frame(sigma: Cone) -> tuple[list[Vec], list[list[int]]]:
    """Lattice basis of ``span(sigma) & N`` and ray coordinates in it."""
    n = sigma.lattice_rank
    basis = la.saturation_basis(list(sigma.rays), n)
    coords = [la.coordinates(basis, r) for r in sigma.rays]
    if any(c is None for c in coords):
        # rays lie in a saturated span, so integer coordinates always exist
        raise AssertionError("ray outside its own span lattice")
    return basis, [list(c) for c in coords]


def _fundamental_points(simplex: list[list[int]]) -> list[Vec]:
    """Lattice points ``sum lambda_i r_i`` with ``0 <= lambda_i < 1``, full rank."""
    k = len(simplex)
    R = la.transpose(simplex, k)  # columns are rays
    snf = la.smith_normal_form(R, k)
    Linv = la.inverse_unimodular(snf.left)
    inv = la.rational_inverse(R)
    pts = []
    for digits in product(*[range(d) for d in snf.diag]):
        x = la.matvec(Linv, digits)
        lam = la.matvec(inv, x)
        frac = [l - (l.numerator // l.denominator) for l in lam]
        y = la.matvec(R, frac)
        pts.append(tuple(int(t) for t in y))
    return pts


def hilbert_basis_of_cone(sigma: Cone) -> list[Vec]:
    """Hilbert basis of ``sigma & N`` for a strictly convex cone.

    Candidates are the rays and the fundamental parallelepiped points of each
    simplicial cone in a triangulation; every irreducible element is among
    them.  The sieve walks candidates by increasing degree and keeps ``x``
    unless ``x - h`` is in the cone for an earlier irreducible ``h``.
    """
    if sigma.lineality:
        raise ValueError("cone contains a line; split off the lineality first")
    if not sigma.rays:
        return []
    n = sigma.lattice_rank
    basis, coords = _span_frame(sigma)
    k = len(basis)
    local = Cone.from_generators(coords, k)
    w = grading(local)
    cand = {tuple(c) for c in coords}
    for simplex in triangulate(local):
        for p in _fundamental_points([list(local.rays[i]) for i in simplex]):
            if any(p):
                cand.add(p)
    irreducible: list[Vec] = []
    for x in sorted(cand, key=lambda v: (la.dot(w, v), v)):
        if not any(local.contains([a - b for a, b in zip(x, h)]) for h in irreducible):
            irreducible.append(x)
    lifted = [tuple(sum(c * b[i] for c, b in zip(x, basis)) for i in range(n)) for x in irreducible]
    return sorted(lifted)


# -- the Sigma / S_sigma correspondence -------------------------------------------


def cone_of_monoid(P) -> Cone:
    """``Hom(P, R>=0)`` inside ``N_P = Hom(P^gp, Z)``.

    Coordinates on ``N_P`` are dual to :meth:`AffineMonoid.gp_basis` followed
    by the free unit coordinates; torsion has no nonzero real-valued homs.
    """
    frame = P.gp_frame
    k = len(frame.basis)
    u = P.unit_rank
    ineq = [tuple(g) + (0,) * u for g in frame.coords]
    eqs = [tuple(int(i == j) for j in range(k + u)) for i in range(k, k + u)]
    return Cone.from_inequalities(ineq, k + u, eqs)


def monoid_of_cone(sigma: Cone):
    """``S_sigma = sigma^vee & M`` presented by Hilbert basis plus unit generators."""
    from katofan.monoid import AffineMonoid  # monoid imports this module

    dual = dual_cone(sigma)
    n = sigma.lattice_rank
    gens = sharp_generators(dual)
    for l in dual.lineality:
        gens.append(tuple(l))
        gens.append(tuple(-x for x in l))
    return AffineMonoid(n, gens)


def sharp_generators(sigma: Cone) -> list[Vec]:
    """Generators of ``sigma & N`` modulo its lineality lattice, lifted back to ``N``.

    For a strictly convex cone this is the Hilbert basis.
    """
    n = sigma.lattice_rank
    if not sigma.lineality:
        return hilbert_basis_of_cone(sigma)
    proj, section = la.quotient_map(sigma.lineality, n)
    q = n - len(sigma.lineality)
    image = Cone.from_generators([la.matvec(proj, r) for r in sigma.rays], q)
    return sorted(tuple(la.matvec(section, h)) for h in hilbert_basis_of_cone(image))


class SharpDual(NamedTuple):
    """Sharp quotient ``S_sigma / S_sigma^*`` in coordinates of ``M / (sigma^perp & M)``."""

    monoid: object
    proj: la.Matrix
    section: la.Matrix


def sharp_dual_monoid(sigma: Cone) -> SharpDual:
    """The stalk monoid of a toric fan at ``sigma``.

    ``proj`` maps ``M`` onto ``M / sigma^perp``; it is the identity when
    ``sigma`` is full dimensional.
    """
    from katofan.monoid import AffineMonoid  # monoid imports this module

    n = sigma.lattice_rank
    perp = list(sigma.equations)
    proj, section = la.quotient_map(perp, n)
    q = len(proj)
    dual = dual_cone(sigma)
    image = Cone.from_generators([la.matvec(proj, r) for r in dual.rays], q)
    gens = hilbert_basis_of_cone(image)
    return SharpDual(AffineMonoid(q, gens), proj, section)


