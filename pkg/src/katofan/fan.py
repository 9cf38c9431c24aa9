"""Kato fans.

A fan is stored pointwise.  Each point carries its stalk (a sharp toric
monoid in full-rank coordinates, generated by its Hilbert basis) and the data
of its minimal affine open: for every generization ``y`` the face of the stalk
inverted at ``y`` and the localization matrix ``stalk_x -> stalk_y``.  The
point itself appears among its generizations with the empty face.

Charts remember how a presenting monoid ``P`` maps onto every stalk of
``Spec P``, which is what tropicalization needs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx

from katofan import lattice as la
from katofan.cone import Cone, faces, monoid_of_cone, sharp_dual_monoid
from katofan.monoid import (
    AffineMonoid,
    MonoidError,
    MonoidHom,
    decompose_sharp,
    face_sets,
    hilbert_basis,
    is_local_hom,
    is_saturated,
)

Matrix = list[list[int]]


class FanError(ValueError):
    pass


class GluingError(FanError):
    pass


def _face_label(face: Iterable[int]) -> str:
    return "{" + ",".join(map(str, sorted(face))) + "}"


def _mat(M) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in M)


def _apply(M, v: Sequence[int], rows: int) -> tuple:
    if rows == 0:
        return ()
    return tuple(la.matvec(M, v))


def _compose(A, B, rows: int, inner: int, cols: int) -> Matrix:
    """``A @ B`` with explicit shapes so empty matrices behave."""
    if rows == 0:
        return []
    if inner == 0:
        return la.zeros(rows, cols)
    return la.matmul(A, B, inner=inner)


@dataclass
class FanPoint:
    id: str
    stalk: AffineMonoid
    generizations: dict[str, frozenset] = field(default_factory=dict)
    localizations: dict[str, Matrix] = field(default_factory=dict)
    chart: str = ""

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        """Hilbert basis of the stalk, in index order."""
        return self.stalk.generators

    @property
    def rank(self) -> int:
        return self.stalk.rank


class ChartData(NamedTuple):
    """A presentation ``Spec P`` of an affine open.

    ``maps[x] = (proj, section)``: ``proj`` sends the lattice of ``P`` onto
    the coordinates of ``stalk_x`` (integral on ``P^gp``) and ``section`` is an
    integral right inverse.
    """

    monoid: AffineMonoid
    closed_point: str
    maps: dict


@dataclass
class KatoFan:
    points: dict[str, FanPoint]
    charts: dict[str, ChartData] = field(default_factory=dict)
    name: str = ""
    # original point id -> id of the point it was glued into
    aliases: dict[str, str] = field(default_factory=dict)

    def resolve(self, x: str) -> str:
        """Current id of a point, following gluing aliases."""
        return self.aliases.get(x, x)

    # -- order -------------------------------------------------------------

    def point(self, x: str) -> FanPoint:
        try:
            return self.points[self.resolve(x)]
        except KeyError:
            raise FanError(f"unknown fan point {x!r}") from None

    def generizations(self, x: str) -> list[str]:
        return sorted(self.point(x).generizations)

    def specializations(self, x: str) -> list[str]:
        return sorted(y for y, p in self.points.items() if x in p.generizations)

    def face(self, x: str, y: str) -> frozenset:
        """Face of ``stalk_x`` inverted at the generization ``y``."""
        try:
            return self.point(x).generizations[y]
        except KeyError:
            raise FanError(f"{y!r} is not a generization of {x!r}") from None

    def localization(self, x: str, y: str) -> Matrix:
        self.face(x, y)
        return self.points[x].localizations[y]

    def generization_with_face(self, x: str, face: Iterable[int]) -> str:
        face = frozenset(face)
        for y, f in self.point(x).generizations.items():
            if f == face:
                return y
        raise FanError(f"no generization of {x!r} has face {_face_label(face)}")

    def cover_edges(self) -> list[tuple[str, str]]:
        """Pairs ``(generic, special)`` with nothing strictly in between."""
        edges = []
        for x, p in self.points.items():
            gens = [y for y in p.generizations if y != x]
            for y in gens:
                between = any(z != y and y in self.points[z].generizations for z in gens)
                if not between:
                    edges.append((y, x))
        return sorted(edges)

    def closed_points(self) -> list[str]:
        return sorted(x for x in self.points if not [y for y in self.specializations(x) if y != x])

    def __len__(self) -> int:
        return len(self.points)

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        pts = []
        for x in sorted(self.points):
            p = self.points[x]
            pts.append(
                {
                    "id": x,
                    "stalk": p.stalk.to_json(),
                    "specializes_to": [y for y in self.specializations(x) if y != x],
                    "generizations": {y: sorted(f) for y, f in sorted(p.generizations.items())},
                    "localizations": {y: [list(r) for r in m] for y, m in sorted(p.localizations.items())},
                    "chart": p.chart,
                }
            )
        charts = []
        for c in sorted(self.charts):
            d = self.charts[c]
            charts.append(
                {
                    "id": c,
                    "monoid": d.monoid.to_json(),
                    "closed_point": d.closed_point,
                    "maps": {
                        y: {"proj": _json_matrix(pr), "section": _json_matrix(se)}
                        for y, (pr, se) in sorted(d.maps.items())
                    },
                }
            )
        out = {"schema": "katofan/1", "kind": "fan", "name": self.name, "points": pts, "charts": charts}
        if self.aliases:
            out["aliases"] = dict(sorted(self.aliases.items()))
        return out

    @classmethod
    def from_json(cls, d: Mapping) -> "KatoFan":
        from fractions import Fraction

        def mat(m):
            return [[Fraction(x) if isinstance(x, str) else int(x) for x in row] for row in m]

        points = {}
        for e in d["points"]:
            points[e["id"]] = FanPoint(
                e["id"],
                AffineMonoid.from_json(e["stalk"]),
                {y: frozenset(f) for y, f in e.get("generizations", {}).items()},
                {y: mat(m) for y, m in e.get("localizations", {}).items()},
                e.get("chart", ""),
            )
        charts = {}
        for c in d.get("charts", []):
            charts[c["id"]] = ChartData(
                AffineMonoid.from_json(c["monoid"]),
                c["closed_point"],
                {y: (mat(v["proj"]), mat(v["section"])) for y, v in c.get("maps", {}).items()},
            )
        fan = cls(points, charts, d.get("name", ""), dict(d.get("aliases", {})))
        fan.validate()
        return fan

    def to_dot(self) -> str:
        """Specialization diagram: one node per point, arrows from generic to special."""
        lines = [f'digraph "{self.name or "fan"}" {{', "  rankdir=LR;"]
        for x in sorted(self.points):
            lines.append(f'  "{x}" [label="{x}\\n{self.points[x].stalk.label()}"];')
        for a, b in self.cover_edges():
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def validate(self) -> None:
        """Structural checks: reflexive, transitive generization data with matching shapes."""
        for x, p in self.points.items():
            if p.generizations.get(x) != frozenset():
                raise FanError(f"point {x!r} must list itself with the empty face")
            for y, f in p.generizations.items():
                if y not in self.points:
                    raise FanError(f"point {x!r} refers to unknown generization {y!r}")
                L = p.localizations.get(y)
                if L is None:
                    raise FanError(f"missing localization {x!r} -> {y!r}")
                q = self.points[y].rank
                if len(L) != q or any(len(r) != p.rank for r in L):
                    raise FanError(f"localization {x!r} -> {y!r} has the wrong shape")
                for z in self.points[y].generizations:
                    if z not in p.generizations:
                        raise FanError(f"generization is not transitive at {x!r}, {y!r}, {z!r}")


def _json_matrix(M) -> list:
    from fractions import Fraction

    return [[str(x) if isinstance(x, Fraction) and x.denominator != 1 else int(x) for x in row] for row in M]


# -- affine fans -------------------------------------------------------------------


def _localize_sharp(S: AffineMonoid, face: frozenset) -> tuple[AffineMonoid, Matrix, Matrix]:
    """``S_F / S_F^*`` for a face ``F`` of a full-rank sharp saturated ``S``."""
    k = S.rank
    sub = [S.generators[i] for i in face]
    proj, section = la.quotient_map(sub, k)
    q = len(proj)
    gens = [_apply(proj, g, q) for g in S.generators]
    local = AffineMonoid(q, gens)
    return AffineMonoid(q, hilbert_basis(local)), proj, section


def spec(P: AffineMonoid, chart: str = "U0") -> KatoFan:
    """``Spec P`` of a fine saturated monoid: one point per prime.

    Point ids are ``chart:{...}`` listing the Hilbert-basis indices of the
    sharp part that are inverted at the point; ``chart:{}`` is closed.
    """
    if not is_saturated(P):
        raise FanError("Spec needs a fine saturated monoid")
    d = decompose_sharp(P)
    S = d.sharp
    k = S.rank
    fs = face_sets(S)
    data = {}
    for f in fs:
        stalk, proj, section = _localize_sharp(S, f)
        data[f] = (f"{chart}:{_face_label(f)}", stalk, proj, section)
    points: dict[str, FanPoint] = {}
    maps = {}
    for f, (pid, stalk, proj, section) in data.items():
        gz, loc = {}, {}
        for g, (gid, gstalk, gproj, _) in data.items():
            if not f <= g:
                continue
            L = _compose(gproj, section, gstalk.rank, k, stalk.rank)
            gz[gid] = frozenset(j for j, h in enumerate(stalk.generators) if not any(_apply(L, h, gstalk.rank)))
            loc[gid] = L
        points[pid] = FanPoint(pid, stalk, gz, loc, chart)
        full_proj = _compose(proj, d.proj, stalk.rank, k, P.rank)
        full_section = _compose(d.section, section, P.rank, k, stalk.rank)
        maps[pid] = (full_proj, full_section)
    closed = data[min(fs, key=len)][0]
    return KatoFan(points, {chart: ChartData(P, closed, maps)}, chart)


# -- gluing -------------------------------------------------------------------------


class Overlap(NamedTuple):
    """Identify the minimal open of ``a`` with that of ``b`` via a stalk iso ``stalk_a -> stalk_b``."""

    a: str
    b: str
    iso: Matrix


def _check_iso(M, P: AffineMonoid, Q: AffineMonoid, what: str) -> None:
    if P.rank != Q.rank or len(M) != Q.rank or any(len(r) != P.rank for r in M):
        raise GluingError(f"{what}: stalk ranks differ or matrix has the wrong shape")
    if P.rank and abs(la.determinant(M)) != 1:
        raise GluingError(f"{what}: matrix is not unimodular")
    if {_apply(M, h, Q.rank) for h in P.generators} != set(Q.generators):
        raise GluingError(f"{what}: matrix does not carry Hilbert basis onto Hilbert basis, not strict")


def _inverse(M, n: int) -> Matrix:
    return la.inverse_unimodular(M) if n else []


def disjoint_union(fans: Sequence[KatoFan], name: str = "") -> KatoFan:
    points: dict[str, FanPoint] = {}
    charts: dict[str, ChartData] = {}
    for F in fans:
        for x, p in F.points.items():
            if x in points:
                raise GluingError(f"point id {x!r} occurs in two pieces")
            points[x] = FanPoint(x, p.stalk, dict(p.generizations), dict(p.localizations), p.chart)
        for c, d in F.charts.items():
            if c in charts:
                raise GluingError(f"chart id {c!r} occurs in two pieces")
            charts[c] = d
    return KatoFan(points, charts, name)


def glue(pieces: Sequence[KatoFan], overlaps: Sequence[Overlap], name: str = "") -> KatoFan:
    """Colimit of fans along isomorphisms of minimal affine opens.

    Each overlap is propagated to all generizations.  Identifications are
    merged with union-find, the cocycle condition is checked around every
    cycle, and two points of the same chart are never identified.
    """
    base = disjoint_union(pieces, name)
    P = base.points
    edges: list[tuple[str, str, Matrix]] = []
    for ov in overlaps:
        a, b = base.point(ov.a), base.point(ov.b)
        _check_iso(ov.iso, a.stalk, b.stalk, f"overlap {ov.a} ~ {ov.b}")
        index_b = {h: j for j, h in enumerate(b.basis)}
        for y, fa in a.generizations.items():
            fb = frozenset(index_b[_apply(ov.iso, a.basis[i], b.rank)] for i in fa)
            y2 = base.generization_with_face(ov.b, fb)
            La = a.localizations[y]
            Lb = b.localizations[y2]
            ry, rb = P[y].rank, P[y2].rank
            sec = la.right_inverse(La, a.rank) if ry else la.zeros(a.rank, 0)
            psi = _compose(Lb, _compose(ov.iso, sec, b.rank, a.rank, ry), rb, b.rank, ry)
            edges.append((y, y2, psi))

    parent = {x: x for x in P}
    order = {x: i for i, x in enumerate(P)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            if order[rv] < order[ru]:
                ru, rv = rv, ru
            parent[rv] = ru

    classes: dict[str, list[str]] = {}
    for x in P:
        classes.setdefault(find(x), []).append(x)
    for rep, members in classes.items():
        charts_seen: dict[str, str] = {}
        for m in members:
            c = P[m].chart
            if c in charts_seen:
                raise GluingError(f"gluing identifies {charts_seen[c]!r} and {m!r} of the same chart")
            charts_seen[c] = m

    # transfer isomorphisms rep -> member along a spanning tree, then check every edge
    adj: dict[str, list[tuple[str, Matrix, bool]]] = {x: [] for x in P}
    for u, v, psi in edges:
        adj[u].append((v, psi, True))
        adj[v].append((u, psi, False))
    T: dict[str, Matrix] = {}
    for rep in classes:
        n = P[rep].rank
        T[rep] = la.identity(n)
        queue = deque([rep])
        while queue:
            u = queue.popleft()
            for v, psi, forward in adj[u]:
                if v in T:
                    continue
                step = psi if forward else _inverse(psi, n)
                T[v] = _compose(step, T[u], n, n, n)
                queue.append(v)
    for u, v, psi in edges:
        n = P[u].rank
        if n and _mat(la.matmul(psi, T[u])) != _mat(T[v]):
            raise GluingError(f"cocycle condition fails for the identification {u} ~ {v}")

    def rep_of(x: str) -> str:
        return find(x)

    new_points: dict[str, FanPoint] = {}
    for rep, members in classes.items():
        x = P[rep]
        n = x.rank
        gz: dict[str, frozenset] = {}
        loc: dict[str, Matrix] = {}
        for m in members:
            pm = P[m]
            Tm_inv = _inverse(T[m], n)
            index_x = {h: j for j, h in enumerate(x.basis)}
            for y, f in pm.generizations.items():
                ry = rep_of(y)
                k = P[ry].rank
                face = frozenset(index_x[_apply(Tm_inv, pm.basis[i], n)] for i in f)
                Ty_inv = _inverse(T[y], k)
                L = _compose(Ty_inv, _compose(pm.localizations[y], T[m], k, n, n), k, k, n)
                if ry in gz and (gz[ry] != face or _mat(loc[ry]) != _mat(L)):
                    raise GluingError(f"glued fan is not separated at {rep!r} and {ry!r}")
                gz[ry] = face
                loc[ry] = L
        new_points[rep] = FanPoint(rep, x.stalk, gz, loc, x.chart)

    charts = {}
    for c, d in base.charts.items():
        maps = {}
        for y, (pr, se) in d.maps.items():
            ry = rep_of(y)
            k = P[ry].rank
            Ty_inv = _inverse(T[y], k)
            maps[ry] = (
                _compose(Ty_inv, pr, k, k, d.monoid.rank),
                _compose(se, T[y], d.monoid.rank, k, k),
            )
        charts[c] = ChartData(d.monoid, rep_of(d.closed_point), maps)
    aliases = {x: rep_of(x) for x in P if rep_of(x) != x}
    for F in pieces:
        for old, new in F.aliases.items():
            aliases[old] = rep_of(new)
    fan = KatoFan(new_points, charts, name, aliases)
    fan.validate()
    return fan


# -- built-in examples -------------------------------------------------------------


def _n2(chart: str) -> KatoFan:
    return spec(AffineMonoid.free(2), chart)


def builtin_fan(name: str) -> KatoFan:
    """``A1``, ``A2``, ``A3``, ``P1``, ``P2`` or ``P1xP1``, glued as in the classical examples."""
    key = name.strip().upper().replace("×", "X")
    if key in ("A1", "A2", "A3"):
        F = spec(AffineMonoid.free(int(key[1])), "U0")
        F.name = key
        return F
    one = [[1]]
    if key == "P1":
        pieces = [spec(AffineMonoid.free(1), "U0"), spec(AffineMonoid.free(1), "U1")]
        return glue(pieces, [Overlap("U0:{0}", "U1:{0}", [])], "P1")
    if key == "P2":
        # D(p_i) in U_i matches D(q_{i+1}) in U_{i+1}; coordinate 0 is p, 1 is q
        pieces = [_n2(f"U{i}") for i in range(3)]
        ov = [Overlap(f"U{i}:{{0}}", f"U{(i + 1) % 3}:{{1}}", one) for i in range(3)]
        return glue(pieces, ov, "P2")
    if key == "P1XP1":
        pieces = [_n2(f"U{i}") for i in range(1, 5)]
        ov = [Overlap(f"U{i}:{{0}}", f"U{i % 4 + 1}:{{1}}", one) for i in range(1, 5)]
        return glue(pieces, ov, "P1xP1")
    raise FanError(f"unknown built-in fan {name!r}; expected one of A1, A2, A3, P1, P2, P1xP1")


BUILTIN_NAMES = ("A1", "A2", "A3", "P1", "P2", "P1xP1")


# -- toric fans -----------------------------------------------------------------------


@dataclass
class ToricFan:
    """A polyhedral fan in ``N_R`` together with its Kato fan.

    Every cone is a chart ``Spec S_sigma`` whose monoid lives in ``M``, so
    monomials of Laurent polynomials can be fed to any chart directly.
    """

    lattice_rank: int
    rays: tuple[tuple[int, ...], ...]
    cones: dict[str, Cone]
    fan: KatoFan

    def cone_id(self, sigma: Cone) -> str:
        idx = [self.rays.index(r) for r in sigma.rays]
        return "C" + _face_label(idx)

    def maximal_cones(self) -> list[str]:
        return sorted(
            c
            for c, s in self.cones.items()
            if not any(set(s.rays) < set(t.rays) for t in self.cones.values())
        )

    def containing(self, tau: str) -> list[str]:
        rays = set(self.cones[tau].rays)
        return sorted(c for c, s in self.cones.items() if rays <= set(s.rays))

    def to_json(self) -> dict:
        return {
            "schema": "katofan/1",
            "kind": "toric_fan",
            "lattice_rank": self.lattice_rank,
            "cones": [[list(r) for r in self.cones[c].rays] for c in sorted(self.cones, key=_cone_sort_key(self))],
        }


def _cone_sort_key(T: ToricFan):
    return lambda c: (len(T.cones[c].rays), c)


def fan_from_polyhedral_fan(cones: Sequence[Cone], name: str = "") -> ToricFan:
    """The Kato fan of a rational polyhedral fan: one point per cone.

    The stalk at ``sigma`` is ``S_sigma / S_sigma^*`` and the zero cone is
    the generic point.  The input must be closed under faces; the zero cone
    is added if missing.
    """
    if not cones:
        raise FanError("empty fan")
    n = cones[0].lattice_rank
    uniq: list[Cone] = []
    for s in cones:
        if s.lattice_rank != n:
            raise FanError("cones live in lattices of different rank")
        if s.lineality:
            raise FanError("fan cones must be strictly convex")
        if s not in uniq:
            uniq.append(s)
    zero = Cone(n, ())
    if zero not in uniq:
        uniq.append(zero)
    for s in uniq:
        for f in faces(s).faces:
            if s.face(f) not in uniq:
                raise FanError(f"fan is not closed under faces: {s!r} has face {s.face(f)!r} missing")
    for s in uniq:
        for t in uniq:
            meet = Cone.from_inequalities(
                list(s.inequalities) + list(t.inequalities),
                n,
                list(s.equations) + list(t.equations),
            )
            common = set(s.rays) & set(t.rays)
            if set(meet.rays) != common or meet.lineality:
                raise FanError(f"cones {s!r} and {t!r} do not meet in a common face")
    rays = tuple(sorted({r for s in uniq for r in s.rays}))
    T = ToricFan(n, rays, {}, KatoFan({}, {}, name))
    for s in uniq:
        T.cones[T.cone_id(s)] = s
    dual = {c: sharp_dual_monoid(s) for c, s in T.cones.items()}
    points: dict[str, FanPoint] = {}
    charts: dict[str, ChartData] = {}
    for c, s in T.cones.items():
        stalk, proj, section = dual[c]
        gz, loc = {}, {}
        for t_id, t in T.cones.items():
            if not set(t.rays) <= set(s.rays):
                continue
            tstalk, tproj, _ = dual[t_id]
            L = _compose(tproj, section, tstalk.rank, n, stalk.rank)
            gz[t_id] = frozenset(j for j, h in enumerate(stalk.generators) if not any(_apply(L, h, tstalk.rank)))
            loc[t_id] = L
        points[c] = FanPoint(c, stalk, gz, loc, c)
    for c, s in T.cones.items():
        P = monoid_of_cone(s)
        maps = {t: (dual[t].proj, dual[t].section) for t in points[c].generizations}
        charts[c] = ChartData(P, c, maps)
    T.fan = KatoFan(points, charts, name)
    T.fan.validate()
    return T


def toric_fan_from_rays(n: int, maximal: Sequence[Sequence[Sequence[int]]], name: str = "") -> ToricFan:
    """Build a fan from its maximal cones given by generators, adding all faces."""
    cones = []
    for gens in maximal:
        s = Cone.from_generators(gens, n)
        for f in faces(s).faces:
            cones.append(s.face(f))
    return fan_from_polyhedral_fan(cones, name)


def builtin_toric(name: str) -> ToricFan:
    """The toric fans matching :func:`builtin_fan`."""
    key = name.strip().upper().replace("×", "X")
    table = {
        "A1": (1, [[(1,)]]),
        "A2": (2, [[(1, 0), (0, 1)]]),
        "A3": (3, [[(1, 0, 0), (0, 1, 0), (0, 0, 1)]]),
        "P1": (1, [[(1,)], [(-1,)]]),
        "P2": (2, [[(1, 0), (0, 1)], [(0, 1), (-1, -1)], [(-1, -1), (1, 0)]]),
        "P1XP1": (2, [[(1, 0), (0, 1)], [(0, 1), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]]),
    }
    if key not in table:
        raise FanError(f"unknown toric fan {name!r}")
    n, maximal = table[key]
    return toric_fan_from_rays(n, maximal, {"P1XP1": "P1xP1"}.get(key, key))


# -- morphisms ---------------------------------------------------------------------------


@dataclass
class FanMorphism:
    """``f: source -> target`` with ``local_homs[x]: stalk_{f(x)} -> stalk_x``."""

    source: KatoFan
    target: KatoFan
    point_map: dict[str, str]
    local_homs: dict[str, Matrix]

    def __call__(self, x: str) -> str:
        try:
            return self.point_map[x]
        except KeyError:
            raise FanError(f"{x!r} is not a point of the source fan") from None

    def check(self) -> None:
        """Raise unless this is a morphism of locally monoidal spaces."""
        S, T = self.source, self.target
        if set(self.point_map) != set(S.points):
            raise FanError("point map must be defined on every source point")
        for x, px in S.points.items():
            fx = self(x)
            qx = T.point(fx)
            phi = self.local_homs[x]
            try:
                hom = MonoidHom(qx.stalk, px.stalk, phi if px.rank else [])
                if not is_local_hom(hom):
                    raise FanError(f"local homomorphism at {x!r} is not local")
            except MonoidError as e:
                raise FanError(f"local homomorphism at {x!r}: {e}") from None
            for y, fy_face in px.generizations.items():
                fy = self(y)
                if fy not in qx.generizations:
                    raise FanError(f"{x!r} -> {fx!r} does not preserve the generization {y!r}")
                # the prime at f(y) is the preimage of the prime at y
                L = px.localizations[y]
                ry = S.points[y].rank
                expect = frozenset(
                    j
                    for j, h in enumerate(qx.basis)
                    if not any(_apply(L, _apply(phi, h, px.rank), ry))
                )
                if qx.generizations[fy] != expect:
                    raise FanError(f"point map at {y!r} disagrees with the local homomorphism at {x!r}")
                lhs = _compose(L, phi, ry, px.rank, qx.rank)
                rhs = _compose(self.local_homs[y], T.points[fx].localizations[fy], ry, T.points[fy].rank, qx.rank)
                if _mat(lhs) != _mat(rhs):
                    raise FanError(f"localization square fails at {x!r} -> {y!r}")

    @classmethod
    def identity(cls, F: KatoFan) -> "FanMorphism":
        return cls(F, F, {x: x for x in F.points}, {x: la.identity(p.rank) for x, p in F.points.items()})

    def compose(self, g: "FanMorphism") -> "FanMorphism":
        """``g o self``."""
        pm, lh = {}, {}
        for x, px in self.source.points.items():
            fx = self(x)
            gfx = g(fx)
            pm[x] = gfx
            lh[x] = _compose(
                self.local_homs[x],
                g.local_homs[fx],
                px.rank,
                self.target.points[fx].rank,
                g.target.points[gfx].rank,
            )
        return FanMorphism(self.source, g.target, pm, lh)

    @classmethod
    def from_affine(cls, source: KatoFan, target: KatoFan, phi: Sequence[Sequence[int]]) -> "FanMorphism":
        """``Spec P -> Spec Q`` induced by ``phi: Q -> P`` on presenting lattices.

        ``phi`` has shape ``P.rank x Q.rank``; both fans must carry a single chart.
        """
        (cs,) = source.charts
        (ct,) = target.charts
        return cls.from_charts(source, target, {cs: (ct, phi)})

    @classmethod
    def from_charts(cls, source: KatoFan, target: KatoFan, chart_maps: Mapping[str, tuple[str, Sequence[Sequence[int]]]]) -> "FanMorphism":
        """Morphism given chart by chart: ``{source chart: (target chart, phi)}``.

        ``phi: Q -> P`` maps the target chart monoid into the source chart
        monoid.  Points lying on several source charts are mapped from the
        first one listed; :meth:`check` then catches disagreements.
        """
        pm, lh = {}, {}
        for c, (d, phi) in chart_maps.items():
            cs, ct = source.charts[c], target.charts[d]
            P, Q = cs.monoid, ct.monoid
            MonoidHom(Q, P, phi).check()
            closed_t = target.point(ct.closed_point)
            for x in cs.maps:
                if x in pm:
                    continue
                px = source.points[x]
                proj_x, _ = cs.maps[x]
                face = []
                for j, h in enumerate(closed_t.basis):
                    lift = _apply(ct.maps[ct.closed_point][1], h, Q.rank)
                    if not any(_apply(proj_x, _apply(phi, lift, P.rank), px.rank)):
                        face.append(j)
                y = target.generization_with_face(ct.closed_point, face)
                _, sec_y = ct.maps[y]
                qy = target.points[y].rank
                M = _compose(proj_x, _compose(phi, sec_y, P.rank, Q.rank, qy), px.rank, P.rank, qy)
                pm[x] = y
                lh[x] = [[int(v) for v in row] for row in M]
        f = cls(source, target, pm, lh)
        f.check()
        return f


def toric_morphism(S: ToricFan, T: ToricFan, A: Sequence[Sequence[int]]) -> FanMorphism:
    """Morphism of Kato fans from a lattice map ``A: N_S -> N_T`` compatible with the fans."""
    n1, n2 = S.lattice_rank, T.lattice_rank
    if len(A) != n2 or any(len(r) != n1 for r in A):
        raise FanError("lattice map has the wrong shape")
    At = la.transpose(A, n1) if n2 else la.zeros(n1, 0)
    pm, lh = {}, {}
    for c, s in S.cones.items():
        images = [_apply(A, r, n2) for r in s.rays]
        hits = [t for t, tc in T.cones.items() if all(tc.contains(v) for v in images)]
        if not hits:
            raise FanError(f"image of cone {c} lies in no cone of the target fan")
        t = min(hits, key=lambda t: (len(T.cones[t].rays), t))
        src = sharp_dual_monoid(s)
        tgt = sharp_dual_monoid(T.cones[t])
        q1, q2 = src.monoid.rank, tgt.monoid.rank
        M = _compose(src.proj, _compose(At, tgt.section, n1, n2, q2), q1, n1, q2)
        pm[c] = t
        lh[c] = M
    f = FanMorphism(S.fan, T.fan, pm, lh)
    f.check()
    return f


def is_strict(f: FanMorphism) -> bool:
    """Every local homomorphism is an isomorphism of stalks."""
    for x, px in f.source.points.items():
        qx = f.target.points[f(x)]
        if px.rank != qx.rank:
            return False
        M = f.local_homs[x]
        if px.rank and abs(la.determinant(M)) != 1:
            return False
        if {_apply(M, h, px.rank) for h in qx.basis} != set(px.basis):
            return False
    return True


def check_fine_saturated(F: KatoFan) -> bool:
    """Finite, every stalk sharp, saturated and presented in full-rank coordinates."""
    for p in F.points.values():
        S = p.stalk
        if S.torsion or S.unit_rank or S.cone.lineality:
            return False
        if la.rank(S.generators, S.rank) != S.rank if S.generators else S.rank != 0:
            return False
        if not is_saturated(S):
            return False
    return True


# -- isomorphism ---------------------------------------------------------------------------


def _order_graph(F: KatoFan) -> nx.DiGraph:
    G = nx.DiGraph()
    for x, p in F.points.items():
        G.add_node(x, shape=(p.rank, len(p.basis)))
    for x, p in F.points.items():
        for y in p.generizations:
            if y != x:
                G.add_edge(y, x)
    return G


def _stalk_isos(P: AffineMonoid, Q: AffineMonoid):
    from itertools import permutations

    from katofan.monoid import _independent_subset

    n = P.rank
    if n != Q.rank or len(P.generators) != len(Q.generators):
        return
    if n == 0:
        yield []
        return
    hp, hq = list(P.generators), list(Q.generators)
    idx = _independent_subset(hp, n)
    inv = la.rational_inverse(la.transpose([hp[i] for i in idx], n))
    target = set(hq)
    for image in permutations(range(len(hq)), n):
        M = la.matmul(la.transpose([hq[j] for j in image], n), inv)
        if any(x.denominator != 1 for row in M for x in row):
            continue
        M = [[int(x) for x in row] for row in M]
        if abs(la.determinant(M)) == 1 and {tuple(la.matvec(M, h)) for h in hp} == target:
            yield M


def fans_isomorphic(F: KatoFan, G: KatoFan) -> dict[str, str] | None:
    """A point bijection extending to an isomorphism of Kato fans, or None.

    Candidates are order isomorphisms from a graph matcher; each is accepted
    when every stalk admits an isomorphism carrying the face of each
    generization to the face of its image.
    """
    if len(F) != len(G):
        return None
    matcher = nx.algorithms.isomorphism.DiGraphMatcher(
        _order_graph(F), _order_graph(G), node_match=lambda a, b: a["shape"] == b["shape"]
    )
    for mapping in matcher.isomorphisms_iter():
        ok = True
        for x, px in F.points.items():
            gx = G.points[mapping[x]]
            found = False
            for M in _stalk_isos(px.stalk, gx.stalk):
                index = {h: j for j, h in enumerate(gx.basis)}
                if all(
                    frozenset(index[_apply(M, px.basis[i], gx.rank)] for i in f) == gx.generizations[mapping[y]]
                    for y, f in px.generizations.items()
                ):
                    found = True
                    break
            if not found:
                ok = False
                break
        if ok:
            return dict(mapping)
    return None


def hand_built_fan(stalk: AffineMonoid, name: str = "X") -> KatoFan:
    """One-point fan with an arbitrary stalk, for exercising the checks."""
    return KatoFan({name: FanPoint(name, stalk, {name: frozenset()}, {name: la.identity(stalk.rank)}, name)}, {}, name)
