"""Fine monoids presented by lattice generators.

An :class:`AffineMonoid` is ``P_lat + Z^unit_rank + T`` where ``P_lat`` is the
submonoid of ``Z^rank`` generated by ``generators`` and ``T`` is a finite
abelian group given by invariant factors.  Elements of ``P_lat`` are plain
integer tuples.  The lattice part may itself contain units; use
:func:`decompose_sharp` to split them off.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Iterable, NamedTuple, Sequence

from katofan import lattice as la
from katofan.cone import Cone, faces, hilbert_basis_of_cone, sharp_generators

Vec = tuple[int, ...]


class MonoidError(ValueError):
    pass


class GpFrame(NamedTuple):
    """A basis of ``P_lat^gp`` (rows) and the generators in those coordinates."""

    basis: list[Vec]
    coords: list[Vec]


@dataclass(frozen=True)
class AffineMonoid:
    """Generators are deduplicated and sorted in decreasing lexicographic
    order, so the standard basis of ``N^k`` comes out as ``e1, ..., ek``.
    """

    rank: int
    generators: tuple[Vec, ...]
    torsion: tuple[int, ...] = ()
    unit_rank: int = 0

    def __init__(self, rank: int, generators: Iterable[Sequence[int]], torsion=(), unit_rank: int = 0):
        gens = set()
        for g in generators:
            g = tuple(int(x) for x in g)
            if len(g) != rank:
                raise MonoidError(f"generator {list(g)} has length {len(g)}, expected {rank}")
            if any(g):
                gens.add(g)
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "generators", tuple(sorted(gens, reverse=True)))
        object.__setattr__(self, "torsion", tuple(int(d) for d in torsion if int(d) > 1))
        object.__setattr__(self, "unit_rank", int(unit_rank))

    @classmethod
    def free(cls, k: int) -> "AffineMonoid":
        """``N^k``."""
        return cls(k, la.identity(k))

    # -- derived structure ---------------------------------------------------

    @cached_property
    def cone(self) -> Cone:
        """The real cone spanned by the lattice generators."""
        return Cone.from_generators(self.generators, self.rank)

    @cached_property
    def gp_frame(self) -> GpFrame:
        basis = la.lattice_basis(self.generators, self.rank)
        coords = [la.coordinates(basis, g) for g in self.generators]
        return GpFrame(basis, coords)

    @property
    def gp_rank(self) -> int:
        """Rank of the free part of ``P^gp``."""
        return len(self.gp_frame.basis) + self.unit_rank

    @cached_property
    def unit_generators(self) -> tuple[Vec, ...]:
        """Generators lying in the lineality space; they generate the unit group of ``P_lat``."""
        lin = self.cone.lineality
        if not lin:
            return ()
        eqs = la.kernel_basis(lin, self.rank)
        return tuple(g for g in self.generators if not any(la.dot(e, g) for e in eqs))

    @property
    def is_sharp(self) -> bool:
        return not self.torsion and self.unit_rank == 0 and not self.cone.lineality

    @cached_property
    def _grading(self) -> Vec:
        # sum of facet normals: zero on units, positive on the other generators
        ineq = self.cone.inequalities
        return tuple(sum(col) for col in zip(*ineq)) if ineq else (0,) * self.rank

    # -- membership ----------------------------------------------------------

    def contains(self, v: Sequence[int]) -> bool:
        return self.express(v) is not None

    def express(self, v: Sequence[int]) -> dict[int, int] | None:
        """Coefficients on ``generators`` summing to ``v``, or None if ``v`` is not in ``P``.

        Non-unit generators get nonnegative coefficients.  Unit generators may
        get negative ones, which is harmless since their inverses lie in
        ``P``.  Search is a depth-first descent on a grading that vanishes
        exactly on the units; the unit remainder is a lattice problem.
        """
        v = tuple(int(x) for x in v)
        if len(v) != self.rank:
            raise MonoidError(f"vector {list(v)} has length {len(v)}, expected {self.rank}")
        units = self.unit_generators
        others = [i for i, g in enumerate(self.generators) if g not in units]
        index = {g: i for i, g in enumerate(self.generators)}
        w = self._grading
        cone = self.cone
        failed: set[tuple[Vec, int]] = set()

        def unit_part(x: Vec) -> dict[int, int] | None:
            # units form the group spanned by the unit generators
            c = la.coordinates(list(units), x) if units else (None if any(x) else ())
            if c is None:
                return None
            return {index[u]: k for u, k in zip(units, c) if k}

        def dfs(x: Vec, start: int) -> dict[int, int] | None:
            if la.dot(w, x) == 0:
                return unit_part(x) if cone.contains(x) else None
            if (x, start) in failed or not cone.contains(x):
                return None
            for pos in range(start, len(others)):
                i = others[pos]
                y = tuple(a - b for a, b in zip(x, self.generators[i]))
                if la.dot(w, y) < 0:
                    continue
                sol = dfs(y, pos)
                if sol is not None:
                    sol[i] = sol.get(i, 0) + 1
                    return sol
            failed.add((x, start))
            return None

        return dfs(v, 0)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "generators": [list(g) for g in self.generators],
            "torsion": list(self.torsion),
            "unit_rank": self.unit_rank,
        }

    @classmethod
    def from_json(cls, d: dict) -> "AffineMonoid":
        return cls(int(d["rank"]), d.get("generators", []), d.get("torsion", ()), int(d.get("unit_rank", 0)))

    def label(self) -> str:
        """Short human label: ``0``, ``N``, ``N^2``, or the generator list."""
        parts = []
        if self.is_sharp and self.gp_rank == len(self.generators):
            k = len(self.generators)
            parts.append("0" if k == 0 else "N" if k == 1 else f"N^{k}")
        else:
            parts.append("<" + ",".join("(" + ",".join(map(str, g)) + ")" for g in self.generators) + ">")
        if self.unit_rank:
            parts.append("Z" if self.unit_rank == 1 else f"Z^{self.unit_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts)


# -- Hilbert basis, saturation, splitting ---------------------------------------


def hilbert_basis(P: AffineMonoid) -> list[Vec]:
    """Unique minimal generating set of a sharp lattice part, in generator order.

    A generator is kept unless it is ``h + (rest)`` for another generator
    ``h`` with the rest in ``P``.
    """
    if P.cone.lineality:
        raise MonoidError("monoid contains a line; split off the units with decompose_sharp first")
    gens = list(P.generators)
    keep = []
    for g in gens:
        reducible = False
        for h in gens:
            if h != g:
                rest = tuple(a - b for a, b in zip(g, h))
                if P.contains(rest):
                    reducible = True
                    break
        if not reducible:
            keep.append(g)
    return sorted(keep, reverse=True)


def saturate(P: AffineMonoid, ambient: bool = False) -> AffineMonoid:
    """Saturation ``{p in P^gp : n p in P for some n > 0}``.

    With ``ambient=True`` the saturation is taken inside ``Z^rank`` instead of
    ``P^gp``, i.e. all lattice points of the cone.
    """
    n = P.rank
    if not P.generators:
        return P
    basis = la.saturation_basis(P.generators, n) if ambient else P.gp_frame.basis
    coords = [la.coordinates(basis, g) for g in P.generators]
    k = len(basis)
    local = Cone.from_generators(coords, k)
    gens = list(sharp_generators(local))
    for l in local.lineality:
        gens += [tuple(l), tuple(-x for x in l)]
    lifted = [tuple(sum(c * b[i] for c, b in zip(x, basis)) for i in range(n)) for x in gens]
    return AffineMonoid(n, lifted, P.torsion, P.unit_rank)


def is_saturated(P: AffineMonoid) -> bool:
    return all(P.contains(g) for g in saturate(P).generators)


class SharpDecomposition(NamedTuple):
    """``P = sharp + Z^unit_rank + torsion``.

    ``proj`` maps ``Z^P.rank`` to the sharp coordinates.  It has rational
    entries in general but is integral on ``P_lat^gp``, the only place it is
    meant to be applied.  ``section`` is an integral right inverse.
    """

    sharp: AffineMonoid
    unit_rank: int
    torsion: tuple[int, ...]
    proj: list
    section: la.Matrix


def decompose_sharp(P: AffineMonoid) -> SharpDecomposition:
    """Split a fine saturated monoid as a sharp monoid plus its units.

    The sharp part is returned in full-rank coordinates of ``P_lat^gp / P_lat^*``.

    >>> d = decompose_sharp(AffineMonoid(2, [(1, 0), (0, 1), (0, -1)]))
    >>> d.sharp.generators, d.unit_rank
    (((1,),), 1)
    """
    if not is_saturated(P):
        raise MonoidError("decompose_sharp needs a saturated monoid; the unit splitting may not exist")
    frame = P.gp_frame
    k = len(frame.basis)
    units = [la.coordinates(frame.basis, u) for u in P.unit_generators]
    unit_lat = la.lattice_basis(units, k)
    q_proj, q_section = la.quotient_map(unit_lat, k)
    q = k - len(unit_lat)
    if q == 0:
        proj, section = [], [[] for _ in range(P.rank)]
    else:
        proj = la.matmul(q_proj, _coordinate_matrix(frame.basis, P.rank), inner=k)
        section = la.matmul(la.transpose(frame.basis, P.rank), q_section, inner=k)
    sharp = AffineMonoid(q, [la.matvec(q_proj, c) for c in frame.coords] if q else [])
    sharp = AffineMonoid(q, hilbert_basis(sharp))
    return SharpDecomposition(sharp, P.unit_rank + len(unit_lat), P.torsion, proj, section)


def _coordinate_matrix(basis: Sequence[Vec], n: int) -> list:
    """Rational ``C`` (k x n) returning coordinates in ``basis`` for vectors of its span."""
    from fractions import Fraction

    k = len(basis)
    # basis^T = L^-1 D R^-1, so on the span: coords = R D^-1 (L x)[:k]
    snf = la.smith_normal_form(la.transpose(basis, n), k)
    M = [[Fraction(snf.left[i][j], snf.diag[i]) for j in range(n)] for i in range(k)]
    C = la.matmul(snf.right, M, inner=k)
    if all(x.denominator == 1 for row in C for x in row):
        return [[int(x) for x in row] for row in C]
    return C


def to_sharp_coordinates(d: SharpDecomposition, v: Sequence[int]) -> Vec:
    """Image of a vector of ``P_lat^gp`` in the sharp coordinates of ``d``."""
    x = la.matvec(d.proj, v) if d.proj else ()
    if any(getattr(t, "denominator", 1) != 1 for t in x):
        raise MonoidError(f"{list(v)} is not in the groupification")
    return tuple(int(t) for t in x)


# -- ideals and localization ----------------------------------------------------


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime ideal stored by its complementary face (indices into ``generators``)."""

    face: frozenset

    def __init__(self, face: Iterable[int]):
        object.__setattr__(self, "face", frozenset(face))

    def __repr__(self) -> str:
        return "PrimeIdeal(face={" + ",".join(map(str, sorted(self.face))) + "})"


def face_sets(P: AffineMonoid) -> list[frozenset]:
    """Faces of ``cone(P)`` as sets of generator indices, minimal face first."""
    cone = P.cone
    out = []
    for f in faces(cone).faces:
        tight = [c for c in cone.inequalities if all(la.dot(c, cone.rays[i]) == 0 for i in f)]
        out.append(frozenset(i for i, g in enumerate(P.generators) if all(la.dot(c, g) == 0 for c in tight)))
    return out


def is_prime(P: AffineMonoid, p: PrimeIdeal) -> bool:
    return p.face in set(face_sets(P))


def primes(P: AffineMonoid) -> list[PrimeIdeal]:
    """All primes, from the generic point ``face = everything`` down to the maximal ideal.

    The order is by decreasing face size, a linear extension of prime inclusion.
    """
    fs = face_sets(P)
    return [PrimeIdeal(f) for f in sorted(fs, key=lambda f: (-len(f), sorted(f)))]


def prime_leq(p: PrimeIdeal, q: PrimeIdeal) -> bool:
    """``p`` contained in ``q`` (reverse inclusion of faces)."""
    return q.face <= p.face


def maximal_ideal(P: AffineMonoid) -> PrimeIdeal:
    return PrimeIdeal(i for i, g in enumerate(P.generators) if g in P.unit_generators)


def localize(P: AffineMonoid, p: PrimeIdeal) -> tuple[AffineMonoid, "MonoidHom"]:
    """``P_p``: invert the generators of the face complementary to ``p``."""
    if not is_prime(P, p):
        raise MonoidError(f"{p!r} is not a prime of the monoid")
    extra = [tuple(-x for x in P.generators[i]) for i in p.face]
    Pp = AffineMonoid(P.rank, list(P.generators) + extra, P.torsion, P.unit_rank)
    return Pp, MonoidHom(P, Pp, la.identity(P.rank))


def stalk(P: AffineMonoid, p: PrimeIdeal) -> SharpDecomposition:
    """``P_p / P_p^*`` with its projection from the lattice of ``P``."""
    Pp, _ = localize(P, p)
    return decompose_sharp(Pp)


# -- homomorphisms ---------------------------------------------------------------


@dataclass(frozen=True)
class MonoidHom:
    """A homomorphism given by an integer matrix on lattice parts.

    ``matrix`` has shape ``target.rank x source.rank``.  Unit and torsion parts
    are carried as optional matrices; the stalk monoids used by fans are sharp
    and torsion free so these are usually absent.
    """

    source: AffineMonoid
    target: AffineMonoid
    matrix: tuple[tuple[int, ...], ...]
    unit_map: tuple | None = None
    torsion_map: tuple | None = None

    def __init__(self, source, target, matrix, unit_map=None, torsion_map=None):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", tuple(tuple(int(x) for x in row) for row in matrix))
        object.__setattr__(self, "unit_map", unit_map)
        object.__setattr__(self, "torsion_map", torsion_map)
        if len(self.matrix) != target.rank or any(len(r) != source.rank for r in self.matrix):
            raise MonoidError("matrix shape does not match source and target ranks")

    @property
    def lattice_map(self):
        return self.matrix

    def __call__(self, v: Sequence[int]) -> Vec:
        if self.target.rank == 0:
            return ()
        return tuple(la.matvec(self.matrix, v))

    def check(self) -> None:
        for g in self.source.generators:
            if not self.target.contains(self(g)):
                raise MonoidError(f"generator {list(g)} maps to {list(self(g))}, outside the target")


def is_local_hom(phi: MonoidHom) -> bool:
    """``phi(m_source)`` lies in ``m_target``: non-units go to non-units.

    It suffices to test generators, since a sum is a unit only when every
    summand is.
    """
    phi.check()
    src_units = set(phi.source.unit_generators)
    tgt = phi.target
    lin_eqs = la.kernel_basis(tgt.cone.lineality, tgt.rank) if tgt.cone.lineality else None
    for g in phi.source.generators:
        if g in src_units:
            continue
        image = phi(g)
        if not any(image):
            return False
        # elements of P in the lineality space are exactly the units
        if lin_eqs is not None and not any(la.dot(e, image) for e in lin_eqs):
            return False
    return True


def find_isomorphism(P: AffineMonoid, Q: AffineMonoid) -> la.Matrix | None:
    """A unimodular matrix carrying the sharp monoid ``P`` onto ``Q``.

    Both must be sharp and given in full-rank coordinates (generators span a
    finite-index sublattice of ``Z^rank``).  The search tries bijections of
    Hilbert bases fixed on a linearly independent subset.
    """
    if P.rank != Q.rank:
        return None
    hp, hq = hilbert_basis(P), hilbert_basis(Q)
    if len(hp) != len(hq):
        return None
    n = P.rank
    if n == 0:
        return []
    if la.rank(hp, n) != n or la.rank(hq, n) != n:
        raise MonoidError("find_isomorphism expects full-rank sharp monoids")
    idx = _independent_subset(hp, n)
    src = [hp[i] for i in idx]
    src_inv = la.rational_inverse(la.transpose(src, n))
    target_set = set(hq)
    for image in permutations(range(len(hq)), n):
        T = la.transpose([hq[j] for j in image], n)
        M = la.matmul(T, src_inv)
        if any(x.denominator != 1 for row in M for x in row):
            continue
        M = [[int(x) for x in row] for row in M]
        if abs(la.determinant(M)) != 1:
            continue
        if {tuple(la.matvec(M, h)) for h in hp} == target_set:
            return M
    return None


def _independent_subset(vectors: Sequence[Vec], n: int) -> list[int]:
    chosen: list[int] = []
    for i, v in enumerate(vectors):
        if la.rank([vectors[j] for j in chosen] + [v], n) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == n:
            break
    return chosen


def cone_hilbert_basis(P: AffineMonoid) -> list[Vec]:
    """Hilbert basis of the saturation of a sharp ``P`` computed through its cone."""
    return hilbert_basis_of_cone(P.cone)
