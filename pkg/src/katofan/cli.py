"""Command-line front end: ``katofan <group> <action> [--in FILE] [--out FILE]``.

Every report is JSON with a top-level ``"schema": "katofan/1"``.  Exit status
is 0 on success, 1 on a mathematical error (with an error report on stdout
or ``--out``) and 2 when the input does not parse or fails its schema.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from fractions import Fraction
from typing import Any

import jsonschema

from katofan import schemas
from katofan.complex import extended_complex, point_from_json
from katofan.cone import Cone, cone_of_monoid, dual_cone, faces, hilbert_basis_of_cone, monoid_of_cone
from katofan.dualcx import dual_complex_from_json
from katofan.fan import (
    BUILTIN_NAMES,
    KatoFan,
    Overlap,
    ToricFan,
    builtin_fan,
    builtin_toric,
    fan_from_polyhedral_fan,
    spec,
)
from katofan.monoid import AffineMonoid, decompose_sharp, face_sets, hilbert_basis, primes, saturate
from katofan.series import DEFAULT_TRUNCATION, TruncatedSeries
from katofan.trop import (
    LaurentPolynomial,
    LogAtlas,
    MonomialPoint,
    SeriesPoint,
    TropError,
    characteristic_fan,
    gauss_point,
    gauss_seminorm,
    retract_series_point,
    series_orders,
    trop_membership,
    trop_monomial_point,
    tropical_hypersurface,
)

log = logging.getLogger("katofan")

DEFAULT_SEED = 20240601
# every library error derives from ValueError, except IndeterminateOrder
DOMAIN_ERRORS = (ValueError, ArithmeticError)


class SchemaError(Exception):
    pass


# -- input helpers ----------------------------------------------------------------------


def _read(args) -> Any:
    if not args.input:
        raise SchemaError("this action needs --in FILE")
    try:
        if args.input == "-":
            return json.load(sys.stdin)
        with open(args.input) as fh:
            return json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read {args.input}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{args.input} is not valid JSON: {e}") from None


def _validate(doc: Any, schema: dict, what: str) -> Any:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "(top level)"
        raise SchemaError(f"{what} input fails its schema at {where}: {e.message}") from None
    return doc


def _toric(doc: dict) -> ToricFan:
    n = int(doc["lattice_rank"])
    cones = [Cone.from_generators(rays, n) if rays else Cone(n, ()) for rays in doc["cones"]]
    closed = []
    for s in cones:
        closed.extend(s.face(f) for f in faces(s).faces)
    return fan_from_polyhedral_fan(closed, doc.get("name", ""))


def _atlas(doc: dict) -> LogAtlas:
    charts = [(c["id"], AffineMonoid.from_json(c["monoid"])) for c in doc["charts"]]
    overlaps = [Overlap(o["a"], o["b"], o["iso"]) for o in doc.get("overlaps", [])]
    return LogAtlas(charts, overlaps, doc.get("name", ""))


def load_fan(ref) -> tuple[KatoFan, ToricFan | None]:
    """Resolve a fan reference: builtin name, toric fan, glued fan, or atlas."""
    if isinstance(ref, str):
        ref = {"builtin": ref}
    if "builtin" in ref:
        return builtin_fan(ref["builtin"]), None
    if "toric" in ref:
        T = builtin_toric(ref["toric"])
        return T.fan, T
    kind = ref.get("kind")
    if kind == "fan":
        return KatoFan.from_json(ref), None
    if kind == "atlas":
        return characteristic_fan(_atlas(ref))[0], None
    T = _toric(ref)
    return T.fan, T


def load_toric(ref) -> ToricFan:
    if isinstance(ref, str):
        return builtin_toric(ref)
    if "toric" in ref:
        return builtin_toric(ref["toric"])
    if "builtin" in ref:
        return builtin_toric(ref["builtin"])
    if ref.get("kind") in ("fan", "atlas"):
        raise SchemaError("hypersurfaces need a toric fan (lattice_rank and cones)")
    return _toric(ref)


def _ext_json(v) -> str:
    return str(v)


def _report(kind: str, **body) -> dict:
    return {"schema": schemas.SCHEMA_VERSION, "kind": kind, **body}


# -- actions ---------------------------------------------------------------------------------


def cmd_monoid(args) -> dict:
    P = AffineMonoid.from_json(_validate(_read(args), schemas.MONOID, "monoid"))
    if args.action == "primes":
        fs = face_sets(P)
        out = []
        for p in primes(P):
            out.append(
                {
                    "face": [list(P.generators[i]) for i in sorted(p.face)],
                    "generators": [list(g) for i, g in enumerate(P.generators) if i not in p.face],
                }
            )
        log.info("%d faces, %d primes", len(fs), len(out))
        return _report("primes", monoid=P.to_json(), count=len(out), primes=out)
    if args.action == "hilbert":
        return _report("hilbert_basis", monoid=P.to_json(), hilbert_basis=[list(g) for g in hilbert_basis(P)])
    if args.action == "saturate":
        return _report("monoid", **saturate(P, ambient=args.ambient).to_json())
    if args.action == "decompose":
        d = decompose_sharp(P)
        return _report(
            "sharp_decomposition",
            sharp=d.sharp.to_json(),
            unit_rank=d.unit_rank,
            torsion=list(d.torsion),
            label=P.label(),
        )
    if args.action == "cone":
        return _report("cone", **cone_of_monoid(P).to_json())
    if args.action == "spec":
        F = spec(P, args.chart)
        return F.to_json()
    raise SchemaError(f"unknown monoid action {args.action!r}")


def cmd_cone(args) -> dict:
    sigma = Cone.from_json(_validate(_read(args), schemas.CONE, "cone"))
    if args.action == "dual":
        return _report("cone", **dual_cone(sigma).to_json())
    if args.action == "faces":
        fl = faces(sigma)
        items = sorted(zip(fl.faces, fl.dims), key=lambda fd: (fd[1], sorted(fd[0])))
        return _report(
            "face_lattice",
            cone=sigma.to_json(),
            count=len(items),
            faces=[{"dim": d, "rays": [list(sigma.rays[i]) for i in sorted(f)]} for f, d in items],
        )
    if args.action == "hilbert":
        return _report("hilbert_basis", cone=sigma.to_json(), hilbert_basis=[list(v) for v in hilbert_basis_of_cone(sigma)])
    if args.action == "monoid":
        return _report("monoid", **monoid_of_cone(sigma).to_json())
    raise SchemaError(f"unknown cone action {args.action!r}")


def cmd_fan(args) -> dict:
    if args.action == "builtin":
        if not args.name:
            raise SchemaError(f"fan builtin needs a name: one of {', '.join(BUILTIN_NAMES)}")
        F = builtin_fan(args.name)
    elif args.action == "toric":
        ref = args.name or _validate(_read(args), schemas.TORIC_FAN, "toric fan")
        F = load_toric(ref).fan
    elif args.action == "atlas":
        F, _ = characteristic_fan(_atlas(_validate(_read(args), schemas.ATLAS, "atlas")))
    elif args.action == "validate":
        F = KatoFan.from_json(_validate(_read(args), schemas.KATO_FAN, "fan"))
    else:
        raise SchemaError(f"unknown fan action {args.action!r}")
    return F.to_json()


def cmd_complex(args) -> dict:
    if args.action == "strata":
        ref = args.name or _validate(_read(args), schemas.FAN_REF, "fan")
        F, _ = load_fan(ref)
        return extended_complex(F).to_json()
    if args.action == "point":
        doc = _validate(_read(args), schemas.POINT, "point")
        F, _ = load_fan(doc["fan"])
        return point_from_json(F, doc).to_json()
    raise SchemaError(f"unknown complex action {args.action!r}")


def cmd_trop(args) -> dict:
    if args.action == "hypersurface":
        doc = _validate(_read(args), schemas.HYPERSURFACE_INPUT, "hypersurface")
        T = load_toric(doc["fan"])
        f = LaurentPolynomial.from_json(doc["polynomial"])
        return tropical_hypersurface(T, f, jobs=args.jobs).to_json()
    if args.action in ("point", "membership"):
        doc = _validate(_read(args), schemas.TROP_POINT_INPUT, "tropicalization")
        if args.action == "membership":
            T = load_toric(doc["fan"])
            F = T.fan
        else:
            F, T = load_fan(doc["fan"])
        if "values" in doc:
            if args.action == "membership":
                raise SchemaError("membership needs series, not values")
            x = MonomialPoint(doc["chart"], doc["values"])
            u = trop_monomial_point(F, x)
            out = _report("trop", point=u.to_json(), orders=[_ext_json(v) for v in x.values])
        else:
            series = [TruncatedSeries.from_json(s) for s in doc["series"]]
            x = SeriesPoint(doc["chart"], series, args.truncation)
            if args.action == "membership":
                f = LaurentPolynomial.from_json(doc["polynomial"])
                return _report("membership", member=trop_membership(T, f, x), point=trop_monomial_point(F, series_orders(F, x)).to_json())
            m = series_orders(F, x)
            u = trop_monomial_point(F, m)
            out = _report("trop", point=u.to_json(), orders=[_ext_json(v) for v in m.values])
        if "polynomial" in doc:
            f = LaurentPolynomial.from_json(doc["polynomial"])
            out["gauss_seminorm"] = _ext_json(gauss_seminorm(u, f, doc["chart"]))
            if isinstance(x, SeriesPoint):
                out["retraction"] = _ext_json(retract_series_point(F, x, f))
        return out
    if args.action == "section":
        return _section_report(args)
    raise SchemaError(f"unknown trop action {args.action!r}")


def _section_report(args) -> dict:
    """Seeded check that ``trop o J`` is the identity on random points of a builtin fan."""
    name = args.name or "P2"
    F = builtin_fan(name)
    rng = random.Random(args.seed)
    checked = failed = 0
    for c in sorted(F.charts):
        P = F.charts[c].monoid
        for _ in range(args.count):
            vals = [Fraction(rng.randint(0, 24), rng.randint(1, 6)) if g not in P.unit_generators else 0 for g in P.generators]
            if rng.random() < 0.2 and P.generators:
                vals[rng.randrange(len(vals))] = "inf"
            try:
                u = trop_monomial_point(F, MonomialPoint(c, vals))
            except TropError:
                continue
            v = trop_monomial_point(F, gauss_point(u, c))
            checked += 1
            failed += v != u
    return _report("section_check", fan=name, seed=args.seed, checked=checked, failed=failed)


def cmd_dualcx(args) -> dict:
    doc = _validate(_read(args), schemas.DUALCX_INPUT, "dual complex")
    return dual_complex_from_json(doc).to_json()


COMMANDS = {
    "monoid": (cmd_monoid, ["primes", "hilbert", "saturate", "decompose", "cone", "spec"]),
    "cone": (cmd_cone, ["dual", "faces", "hilbert", "monoid"]),
    "fan": (cmd_fan, ["builtin", "toric", "atlas", "validate"]),
    "complex": (cmd_complex, ["strata", "point"]),
    "trop": (cmd_trop, ["hypersurface", "point", "membership", "section"]),
    "dualcx": (cmd_dualcx, ["build"]),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="katofan", description="Kato fans, extended cone complexes and tropicalization.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, actions) in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("action", choices=actions, nargs="?" if name == "dualcx" else None, default=actions[0])
        p.add_argument("name", nargs="?", help="builtin fan name where applicable")
        p.add_argument("--in", dest="input", help="input JSON file, '-' for stdin")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--dot", nargs="?", const="-", help="also write a DOT diagram (fan actions); '-' prints it instead of JSON")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION)
        p.add_argument("--count", type=int, default=100, help="samples per chart for 'trop section'")
        p.add_argument("--chart", default="U0", help="chart id for 'monoid spec'")
        p.add_argument("--ambient", action="store_true", help="saturate inside the ambient lattice")
    return ap


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("KATOFAN_LOG", "WARNING").upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    handler, _ = COMMANDS[args.command]
    try:
        report = handler(args)
    except SchemaError as e:
        _emit(dumps(_report("error", error="schema", message=str(e))), args.out)
        return 2
    except DOMAIN_ERRORS as e:
        log.debug("domain error", exc_info=True)
        _emit(dumps(_report("error", error=type(e).__name__, message=str(e))), args.out)
        return 1
    if args.dot is not None:
        if report.get("kind") != "fan":
            _emit(dumps(_report("error", error="schema", message="--dot applies to fan reports only")), args.out)
            return 2
        dot = KatoFan.from_json(report).to_dot()
        if args.dot == "-":
            _emit(dot, args.out)
            return 0
        _emit(dot, args.dot)
    _emit(dumps(report), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
