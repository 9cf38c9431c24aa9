import pytest

from katofan.dualcx import DualComplexError, StratumComponent, dual_complex, dual_complex_from_json

# blow-up of P1 x P1 at a point of D3 away from the corners: the square of
# boundary curves keeps its four corners and E meets only D3
BLOWUP = {
    "components": ["D1", "D2", "D3", "D4", "E"],
    "strata": [
        {"label": "D1.D2", "divisors": ["D1", "D2"]},
        {"label": "D1.D4", "divisors": ["D1", "D4"]},
        {"label": "D2.D3", "divisors": ["D2", "D3"]},
        {"label": "D3.D4", "divisors": ["D3", "D4"]},
        {"label": "D3.E", "divisors": ["D3", "E"]},
    ],
}

TWO_CONICS = {
    "components": ["C1", "C2"],
    "strata": [{"label": f"p{i}", "divisors": ["C1", "C2"]} for i in range(4)],
}


def test_two_conics():
    cx = dual_complex_from_json(TWO_CONICS)
    assert cx.counts() == [2, 4]
    assert cx.euler_characteristic() == -2
    # face j omits the j-th divisor
    assert all(s.faces == ("C2", "C1") for s in cx.simplices[1])


def test_blowup_counts():
    cx = dual_complex_from_json(BLOWUP)
    assert cx.counts() == [5, 5]
    assert cx.euler_characteristic() == 0


def test_single_component():
    cx = dual_complex(["D"], [])
    assert cx.counts() == [1]


def test_triangle_with_two_simplex():
    comps = ["A", "B", "C"]
    strata = [
        StratumComponent("AB", ("A", "B"), {}),
        StratumComponent("AC", ("A", "C"), {}),
        StratumComponent("BC", ("B", "C"), {}),
        StratumComponent("ABC", ("A", "B", "C"), {}),
    ]
    cx = dual_complex(comps, strata)
    assert cx.counts() == [3, 3, 1]
    (top,) = cx.simplices[2]
    assert top.faces == ("BC", "AC", "AB")


def test_missing_face_target_is_an_error():
    with pytest.raises(DualComplexError):
        dual_complex(["A", "B", "C"], [StratumComponent("ABC", ("A", "B", "C"), {})])


def test_ambiguous_face_needs_contained_in():
    comps = ["A", "B", "C"]
    strata = [
        StratumComponent("AB1", ("A", "B"), {}),
        StratumComponent("AB2", ("A", "B"), {}),
        StratumComponent("AC", ("A", "C"), {}),
        StratumComponent("BC", ("B", "C"), {}),
    ]
    with pytest.raises(DualComplexError):
        dual_complex(comps, strata + [StratumComponent("ABC", ("A", "B", "C"), {})])
    cx = dual_complex(comps, strata + [StratumComponent("ABC", ("A", "B", "C"), {"C": "AB2"})])
    assert cx.simplices[2][0].faces[2] == "AB2"


def test_attaching_to_a_wrong_label_is_an_error():
    strata = [StratumComponent("AB", ("A", "B"), {}), StratumComponent("X", ("A", "B", "C"), {"C": "nope"})]
    with pytest.raises(DualComplexError):
        dual_complex(["A", "B", "C"], strata)


@pytest.mark.parametrize(
    "comps,strata",
    [
        (["A", "A"], []),
        (["A"], [StratumComponent("x", ("A", "Z"), {})]),
        (["A", "B"], [StratumComponent("A", ("A", "B"), {})]),
        (["A", "B"], [StratumComponent("x", ("A",), {})]),
    ],
)
def test_malformed_inputs(comps, strata):
    with pytest.raises(DualComplexError):
        dual_complex(comps, strata)


def test_json_report():
    d = dual_complex_from_json(TWO_CONICS).to_json()
    assert d["kind"] == "dual_complex" and d["counts"] == [2, 4]
    assert len(d["simplices"]) == 6
