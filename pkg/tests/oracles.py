"""Independent brute-force oracles.

None of these call the double description, Hilbert basis or hypersurface
code under test.  They work by enumeration in small boxes and only support
the low dimensions the tests need.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product


def facet_normals(gens, n):
    """Inward facet normals of a full-dimensional cone in dimension 2 or 3."""
    gens = [tuple(g) for g in gens if any(g)]
    normals = set()
    for sub in combinations(gens, n - 1):
        if n == 2:
            (a,) = sub
            cand = (-a[1], a[0])
        elif n == 3:
            a, b = sub
            cand = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        else:
            raise NotImplementedError(n)
        if not any(cand):
            continue
        for sign in (1, -1):
            c = tuple(sign * x for x in cand)
            if all(sum(x * y for x, y in zip(c, g)) >= 0 for g in gens):
                normals.add(c)
    return normals


def in_cone(normals, v) -> bool:
    return all(sum(x * y for x, y in zip(c, v)) >= 0 for c in normals)


def brute_hilbert_basis(gens, n, bound=12):
    """Irreducible lattice points of a cone inside the nonnegative orthant.

    Every summand of a point of the orthant is bounded by that point, so
    enumeration in ``[0, bound]^n`` is exact for all points in the box.
    """
    normals = facet_normals(gens, n)
    pts = [v for v in product(range(bound + 1), repeat=n) if any(v) and in_cone(normals, v)]
    pset = set(pts)
    irreducible = []
    for v in pts:
        if not any(tuple(a - b for a, b in zip(v, w)) in pset for w in pts if w != v):
            irreducible.append(v)
    return sorted(irreducible)


def brute_member(gens, v, bound=8) -> bool:
    """``v`` is a nonnegative integer combination of ``gens`` with coefficients up to ``bound``."""
    gens = list(gens)
    for coeffs in product(range(bound + 1), repeat=len(gens)):
        if all(sum(c * g[i] for c, g in zip(coeffs, gens)) == v[i] for i in range(len(v))):
            return True
    return False


def brute_faces(gens, n):
    """Faces of a full-dimensional cone as sets of generator indices, from supporting normals."""
    gens = [tuple(g) for g in gens]
    normals = facet_normals(gens, n)
    faces = {frozenset(range(len(gens)))}
    for c in normals:
        faces.add(frozenset(i for i, g in enumerate(gens) if sum(x * y for x, y in zip(c, g)) == 0))
    changed = True
    while changed:
        changed = False
        for a, b in combinations(list(faces), 2):
            if a & b not in faces:
                faces.add(a & b)
                changed = True
    return faces


def grid(radius=8, step=Fraction(1, 4), dim=2):
    k = int(radius / step)
    axis = [i * step for i in range(-k, k + 1)]
    return product(axis, repeat=dim)


def corner_locus_at(support, fan_cones, tau_rays, lift, n) -> bool | None:
    """Whether the stratum point with lift ``lift`` lies on the extended corner locus.

    The stratum point is the limit of ``lift + lam * v`` for ``v`` in the
    relative interior of ``tau``.  Returns ``None`` when that ray eventually
    leaves the support of the fan, i.e. the grid point is outside the stratum.
    ``fan_cones`` lists ``(rays, normals)`` of the maximal cones.
    """
    v = tuple(sum(r[i] for r in tau_rays) for i in range(n)) if tau_rays else (0,) * n
    inside = False
    for rays, normals in fan_cones:
        if not all(r in rays for r in tau_rays):
            continue
        ok = True
        for c in normals:
            cv = sum(x * y for x, y in zip(c, v))
            cl = sum(x * y for x, y in zip(c, lift))
            if cv < 0 or (cv == 0 and cl < 0):
                ok = False
                break
        if ok:
            inside = True
            break
    if not inside:
        return None
    # as lam grows, <lift + lam v, p> is ordered lexicographically by (<v,p>, <lift,p>)
    keys = [(sum(x * y for x, y in zip(v, p)), sum(x * y for x, y in zip(lift, p))) for p in support]
    best = min(keys)
    return keys.count(best) >= 2
