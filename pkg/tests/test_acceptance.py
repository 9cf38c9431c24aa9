"""The ten acceptance criteria, each timed against its limit.

Every test prints one ``ACCEPTANCE <n> PASS|FAIL`` line, also when run
without ``-s``, and then asserts both the check and the time limit.
"""

import random
import time
from collections import Counter
from fractions import Fraction

from katofan import lattice as la
from katofan.complex import extended_complex, map_point, quotient_points_equal, reduction, structure_point
from katofan.cone import Cone, cone_of_monoid, hilbert_basis_of_cone, monoid_of_cone
from katofan.dualcx import dual_complex_from_json
from katofan.fan import builtin_fan, builtin_toric, fans_isomorphic, spec, toric_morphism
from katofan.monoid import AffineMonoid, find_isomorphism
from katofan.trop import (
    LaurentPolynomial,
    MonomialPoint,
    chart_point_of_prime,
    gauss_point,
    gauss_seminorm,
    generalized_trop,
    nodal_cubic_quotient,
    retract_series_point,
    series_reduction,
    series_structure,
    stratum_projection,
    swap_quotient,
    trop_membership,
    trop_monomial_point,
    trop_series_point,
    tropical_hypersurface,
)

from oracles import brute_hilbert_basis, corner_locus_at, facet_normals, grid
from sampling import polynomial, pushforward, solve_on_chart, toric_series_point

SEED = 20240601
N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)
PQR = AffineMonoid(2, [(1, 0), (1, 1), (1, 2)])
LINE = LaurentPolynomial({(1, 0): 1, (0, 1): 1, (0, 0): 1})


def accept(capsys, n, limit, body):
    """Run ``body() -> (ok, detail)``, print the verdict line, then assert."""
    start = time.perf_counter()
    try:
        ok, detail = body()
    except Exception as e:  # reported as a failure line before pytest shows the traceback
        ok, detail = False, f"raised {type(e).__name__}: {e}"
        raise_later = e
    else:
        raise_later = None
    elapsed = time.perf_counter() - start
    in_time = elapsed < limit
    verdict = "PASS" if ok and in_time else "FAIL"
    with capsys.disabled():
        print(f"\nACCEPTANCE {n} {verdict} ({elapsed:.2f}s / {limit}s) {detail}")
    if raise_later is not None:
        raise raise_later
    assert ok, detail
    assert in_time, f"took {elapsed:.2f}s, limit {limit}s"


def test_criterion_1_spec_point_counts(capsys):
    def body():
        A, B, C = spec(N1), spec(N2), spec(PQR)
        shapes = {
            "N": (len(A), A.cover_edges() == [("U0:{0}", "U0:{}")]),
            "N2": (len(B), len(B.cover_edges()) == 4),
            "pqr": (len(C), len(C.cover_edges()) == 4),
        }
        middle_b = sorted(p.stalk.label() for p in B.points.values() if p.rank == 1)
        middle_c = sorted(p.stalk.label() for p in C.points.values() if p.rank == 1)
        ok = (
            [v[0] for v in shapes.values()] == [2, 4, 4]
            and all(v[1] for v in shapes.values())
            and middle_b == middle_c == ["N", "N"]
        )
        return ok, f"counts {[v[0] for v in shapes.values()]}, middle stalks {middle_c}"

    accept(capsys, 1, 1, body)


def test_criterion_2_glued_fans(capsys):
    def body():
        counts, iso = {}, {}
        for name in ("P1", "P2", "P1xP1"):
            F = builtin_fan(name)
            counts[name] = len(F)
            iso[name] = fans_isomorphic(F, builtin_toric(name).fan) is not None
        return counts == {"P1": 3, "P2": 7, "P1xP1": 9} and all(iso.values()), f"counts {counts}, isomorphic {iso}"

    accept(capsys, 2, 5, body)


def test_criterion_3_strata(capsys):
    expected = {
        "A1": {"R>=0": 1, "point": 1},
        "A2": {"R>=0^2": 1, "R>=0": 2, "point": 1},
        "pqr": {"cone": 1, "R>=0": 2, "point": 1},
        "P2": {"R^2": 1, "R": 3, "point": 3},
        "P1xP1": {"R^2": 1, "R": 4, "point": 4},
    }

    def body():
        got = {}
        for name in expected:
            F = spec(PQR) if name == "pqr" else builtin_fan(name)
            got[name] = dict(Counter(s.label for s in extended_complex(F).strata))
        cx = extended_complex(spec(PQR))
        (open_stratum,) = [s for s in cx.strata if s.label == "cone"]
        top = max(open_stratum.pieces, key=lambda p: p.cone.dim).cone
        # the open cone must be GL2(Z)-equivalent to cone((1,0),(1,2)): same determinant, same Hilbert basis size
        same = abs(la.determinant([list(r) for r in top.rays])) == 2 and len(hilbert_basis_of_cone(top)) == 3
        counts = {k: sum(v.values()) for k, v in got.items()}
        return got == expected and same, f"strata counts {counts}"

    accept(capsys, 3, 5, body)


def _random_cone(rng, n, bound, nonneg, max_gens):
    while True:
        lo = 0 if nonneg else -bound
        gens = []
        while len(gens) < rng.randint(n, max_gens):
            v = tuple(rng.randint(lo, bound) for _ in range(n))
            if any(v):
                gens.append(v)
        if la.rank(gens, n) < n:
            continue
        sigma = Cone.from_generators(gens, n)
        if not sigma.lineality:
            return sigma


def test_criterion_4_round_trip(capsys):
    def body():
        rng = random.Random(SEED)
        bad = 0
        for _ in range(50):
            n = rng.randint(1, 3)
            sigma = _random_cone(rng, n, 3, False, 4)
            P = AffineMonoid(n, hilbert_basis_of_cone(sigma))
            back = monoid_of_cone(cone_of_monoid(P))
            bad += find_isomorphism(P, back) is None
        return bad == 0, f"50 monoids, {bad} mismatches"

    accept(capsys, 4, 30, body)


def test_criterion_5_hilbert_oracle(capsys):
    def body():
        rng = random.Random(SEED + 5)
        bad = 0
        for i in range(20):
            n = 2 + i % 2
            sigma = _random_cone(rng, n, 4, True, 3)
            assert facet_normals(sigma.rays, n)
            ours = sorted(hilbert_basis_of_cone(sigma))
            theirs = brute_hilbert_basis(sigma.rays, n, bound=12)
            bad += ours != theirs
        return bad == 0, f"20 cones, {bad} mismatches"

    accept(capsys, 5, 60, body)


def test_criterion_6_section_and_retraction(capsys):
    def body():
        rng = random.Random(SEED + 6)
        section_bad = section_n = 0
        for name in ("A1", "A2", "P1", "P2", "P1xP1"):
            F = builtin_fan(name)
            for c in sorted(F.charts):
                P = F.charts[c].monoid
                for _ in range(100):
                    vals = ["inf" if rng.random() < 0.15 else Fraction(rng.randint(0, 24), rng.randint(1, 6)) for _ in P.generators]
                    u = trop_monomial_point(F, MonomialPoint(c, vals))
                    section_bad += trop_monomial_point(F, gauss_point(u, c)) != u
                    section_n += 1
        retract_bad = 0
        for _ in range(200):
            T = builtin_toric(rng.choice(["A2", "P2", "P1xP1"]))
            chart = rng.choice(T.maximal_cones())
            x, _, _ = toric_series_point(rng, T, chart)
            gens = T.fan.charts[chart].monoid.generators
            f = polynomial(rng, len(gens))
            f = LaurentPolynomial({tuple(sum(k * g[i] for k, g in zip(p, gens)) for i in range(2)): a for p, a in f.terms})
            retract_bad += retract_series_point(T.fan, x, f) != gauss_seminorm(trop_series_point(T.fan, x), f, chart)
        ok = section_bad == 0 and retract_bad == 0
        return ok, f"section {section_n} points/{section_bad} bad, retraction 200 pairs/{retract_bad} bad"

    accept(capsys, 6, 30, body)


def test_criterion_7_functoriality(capsys):
    morphisms = [("P1xP1", "P1", [[1, 0]]), ("A2", "A1", [[1, 0]]), ("A1", "A2", [[1], [1]])]

    def body():
        rng = random.Random(SEED + 7)
        bad = checked = 0
        for src, tgt, A in morphisms:
            S, T = builtin_toric(src), builtin_toric(tgt)
            f = toric_morphism(S, T, A)
            for _ in range(40):
                x, _, _ = toric_series_point(rng, S, rng.choice(sorted(S.cones)))
                u = trop_series_point(S.fan, x)
                F = S.fan
                r_ok = F.resolve(chart_point_of_prime(F, x.chart, series_reduction(F, x))) == F.resolve(reduction(u))
                rho_ok = F.resolve(chart_point_of_prime(F, x.chart, series_structure(F, x))) == F.resolve(structure_point(u))
                f_ok = trop_series_point(T.fan, pushforward(S, T, A, x)) == map_point(f, u)
                bad += not (r_ok and rho_ok and f_ok)
                checked += 1
        return bad == 0, f"{checked} series points over 3 morphisms, {bad} failing squares"

    accept(capsys, 7, 30, body)


def _oracle_mismatches(T, H):
    n = T.lattice_rank
    maximal = [T.cones[c] for c in T.maximal_cones()]
    fan_cones = [(set(s.rays), facet_normals(s.rays, n)) for s in maximal]
    supp = LINE.support
    mism = checked = hits = 0
    projections = {tau: stratum_projection(T, tau)[0] for tau in T.cones}
    for lift in grid(8, Fraction(1, 4), n):
        for tau, cone in T.cones.items():
            expected = corner_locus_at(supp, fan_cones, list(cone.rays), lift, n)
            if expected is None:
                continue
            w = la.matvec(projections[tau], lift) if projections[tau] else ()
            checked += 1
            hits += expected
            mism += H.contains(tau, w) != expected
    return mism, checked, hits


def test_criterion_8_toric_comparison(capsys):
    def body():
        rng = random.Random(SEED + 8)
        details, ok = [], True
        for name in ("A2", "P2"):
            T = builtin_toric(name)
            H = tropical_hypersurface(T, LINE)
            mism, checked, hits = _oracle_mismatches(T, H)
            members = 0
            for _ in range(50):
                x = solve_on_chart(rng, T, rng.choice(T.maximal_cones()), LINE)
                members += trop_membership(T, LINE, x, H)
            ok = ok and mism == 0 and hits > 0 and members == 50
            details.append(f"{name}: {checked} grid checks ({hits} on the locus)/{mism} mismatches, {members}/50 certified points inside")
        return ok, "; ".join(details)

    accept(capsys, 8, 30, body)


def test_criterion_9_quotients(capsys):
    def body():
        G = swap_quotient()
        F = G.base

        def p(*v):
            return trop_monomial_point(F, MonomialPoint("U", list(v)))

        table = [
            quotient_points_equal(G, p(1, 2), p(2, 1)),
            generalized_trop(G, p(0, 0)) == frozenset({p(0, 0)}),
            not quotient_points_equal(G, p(1, 2), p(1, 3)),
        ]
        N = nodal_cubic_quotient()
        B = N.base
        u12 = trop_monomial_point(B, MonomialPoint("U", [1, 2]))
        v21 = trop_monomial_point(B, MonomialPoint("V", [2, 1]))
        v12 = trop_monomial_point(B, MonomialPoint("V", [1, 2]))
        nodal = [len(B) == 5, generalized_trop(N, u12) == generalized_trop(N, v21), not quotient_points_equal(N, u12, v12)]
        return all(table) and all(nodal), f"swap table {table}, nodal checks {nodal}"

    accept(capsys, 9, 5, body)


def test_criterion_10_dual_complexes(capsys):
    two_conics = {"components": ["C1", "C2"], "strata": [{"label": f"p{i}", "divisors": ["C1", "C2"]} for i in range(4)]}
    blowup = {
        "components": ["D1", "D2", "D3", "D4", "E"],
        "strata": [
            {"label": "D1.D2", "divisors": ["D1", "D2"]},
            {"label": "D1.D4", "divisors": ["D1", "D4"]},
            {"label": "D2.D3", "divisors": ["D2", "D3"]},
            {"label": "D3.D4", "divisors": ["D3", "D4"]},
            {"label": "D3.E", "divisors": ["D3", "E"]},
        ],
    }

    def body():
        a = dual_complex_from_json(two_conics).counts()
        b = dual_complex_from_json(blowup).counts()
        # hand enumeration: 2 curves and 4 points; 5 curves and 5 pairwise intersection points
        return a == [2, 4] and b == [5, 5], f"two conics {a}, blow-up {b}"

    accept(capsys, 10, 1, body)

