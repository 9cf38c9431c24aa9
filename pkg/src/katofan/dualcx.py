"""Dual complexes of simple normal crossing divisors.

The input lists the irreducible components ``D_1, ..., D_l`` and, for each
set of at least two of them, the irreducible components of their
intersection.  Each such component of a ``(k+1)``-fold intersection becomes
a ``k``-simplex whose faces are the components of the ``k``-fold
intersections containing it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence


class DualComplexError(ValueError):
    pass


@dataclass(frozen=True)
class StratumComponent:
    """An irreducible component of ``D_{i_0} cap ... cap D_{i_k}``.

    ``contained_in`` maps each omitted divisor to the label of the component
    of the smaller intersection that contains this one.  It may be left out
    when that smaller intersection is irreducible.
    """

    label: str
    divisors: tuple[str, ...]
    contained_in: Mapping[str, str]


@dataclass
class Simplex:
    label: str
    divisors: tuple[str, ...]
    faces: tuple[str, ...]  # face j omits divisors[j]

    @property
    def dim(self) -> int:
        return len(self.divisors) - 1


@dataclass
class DualComplex:
    simplices: dict[int, list[Simplex]]

    def counts(self) -> list[int]:
        top = max(self.simplices, default=-1)
        return [len(self.simplices.get(k, [])) for k in range(top + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts()))

    def to_json(self) -> dict:
        return {
            "schema": "katofan/1",
            "kind": "dual_complex",
            "counts": self.counts(),
            "simplices": [
                {"dim": k, "label": s.label, "divisors": list(s.divisors), "faces": list(s.faces)}
                for k in sorted(self.simplices)
                for s in self.simplices[k]
            ],
        }


def parse_input(d: Mapping) -> tuple[list[str], list[StratumComponent]]:
    comps = [str(c) for c in d["components"]]
    strata = [
        StratumComponent(
            str(s["label"]),
            tuple(str(x) for x in s["divisors"]),
            {str(k): str(v) for k, v in s.get("contained_in", {}).items()},
        )
        for s in d.get("strata", [])
    ]
    return comps, strata


def dual_complex(components: Sequence[str], strata: Sequence[StratumComponent]) -> DualComplex:
    """Build ``Delta(D)`` and check that every face has its attaching target.

    Raises:
        DualComplexError: on unknown divisors, repeated labels, or a face whose
            target component is missing or ambiguous.
    """
    order = {c: i for i, c in enumerate(components)}
    if len(order) != len(components):
        raise DualComplexError("component labels must be distinct")
    # labels of the components of each intersection, keyed by sorted divisor tuple
    by_set: dict[tuple[str, ...], list[str]] = {(c,): [c] for c in components}
    labels = set(components)
    items = []
    for s in strata:
        for x in s.divisors:
            if x not in order:
                raise DualComplexError(f"stratum {s.label!r} refers to unknown divisor {x!r}")
        divs = tuple(sorted(set(s.divisors), key=order.__getitem__))
        if len(divs) < 2 or len(divs) != len(s.divisors):
            raise DualComplexError(f"stratum {s.label!r} must lie on at least two distinct divisors")
        if s.label in labels:
            raise DualComplexError(f"label {s.label!r} is used twice")
        labels.add(s.label)
        by_set.setdefault(divs, []).append(s.label)
        items.append((divs, s))

    simplices: dict[int, list[Simplex]] = {0: [Simplex(c, (c,), ()) for c in components]}
    for divs, s in sorted(items, key=lambda it: (len(it[0]), [order[x] for x in it[0]], it[1].label)):
        faces = []
        for j, omit in enumerate(divs):
            sub = divs[:j] + divs[j + 1 :]
            targets = by_set.get(sub, [])
            target = s.contained_in.get(omit)
            if target is None:
                if len(targets) != 1:
                    raise DualComplexError(
                        f"face of {s.label!r} without {omit!r}: expected one component of "
                        f"{' cap '.join(sub)}, found {len(targets)}; give contained_in"
                    )
                target = targets[0]
            elif target not in targets:
                raise DualComplexError(f"face of {s.label!r} attaches to missing component {target!r}")
            faces.append(target)
        simplices.setdefault(len(divs) - 1, []).append(Simplex(s.label, divs, tuple(faces)))
    _check_face_identities(simplices)
    return DualComplex(simplices)


def _check_face_identities(simplices: dict[int, list[Simplex]]) -> None:
    # d_i d_j = d_{j-1} d_i for i < j
    by_label = {s.label: s for ss in simplices.values() for s in ss}
    for k, ss in simplices.items():
        if k < 2:
            continue
        for s in ss:
            for j in range(k + 1):
                for i in range(j):
                    a = by_label[by_label[s.faces[j]].faces[i]]
                    b = by_label[by_label[s.faces[i]].faces[j - 1]]
                    if a is not b:
                        raise DualComplexError(f"faces of {s.label!r} are attached inconsistently")


def dual_complex_from_json(d: Mapping) -> DualComplex:
    return dual_complex(*parse_input(d))
