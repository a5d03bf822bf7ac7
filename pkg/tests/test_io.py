import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgekit.corpus import ladder, tensor
from hodgekit.io import (
    RecordError,
    Structure,
    load_json,
    matrix_from_json,
    matrix_to_json,
    scan_to_csv,
    scan_to_json,
    scenario_from_json,
    scenario_to_json,
    structure_from_json,
    structure_to_json,
)
from hodgekit.linalg import Matrix
from hodgekit.orbits import OrbitScenario, ScanResult, ScanRow
from hodgekit.scalars import EXACT, QI


def structure_of(inst):
    return Structure(inst.dim, inst.w, inst.f, inst.pol, inst.n_op)


def scenario_of(inst, **kw):
    kw.setdefault("samples", [Fraction(1, 4), Fraction(1, 16)])
    kw.setdefault("sample_kind", "s_abs")
    return OrbitScenario(
        name=kw.pop("name", "t"),
        f=inst.f,
        w=inst.w,
        pol=inst.pol,
        n_op=inst.n_op,
        **kw,
    )


# ---------------------------------------------------------------------------
# round trips


def test_structure_round_trip_through_json_text():
    inst = ladder(2, QI(Fraction(1, 3), 2))
    st = structure_of(inst)
    record = json.loads(json.dumps(structure_to_json(st)))
    back = structure_from_json(record)
    assert back.dimension == st.dimension
    assert back.w == st.w
    assert back.f == st.f
    assert back.n_op == st.n_op
    assert back.pol.forms == st.pol.forms
    assert back.pol.hodge_numbers == st.pol.hodge_numbers


def test_structure_round_trip_tensor_instance():
    inst = tensor(ladder(2), ladder(2))
    st = structure_of(inst)
    back = structure_from_json(json.loads(json.dumps(structure_to_json(st))))
    assert back.w == st.w and back.f == st.f and back.n_op == st.n_op


def test_scenario_round_trip():
    inst = ladder(2, QI(0, Fraction(1, 3)))
    sc = scenario_of(inst, gamma=[inst.n_op], compare_split=True, name="shear")
    back = scenario_from_json(json.loads(json.dumps(scenario_to_json(sc))))
    assert back.name == "shear"
    assert back.f == sc.f and back.w == sc.w
    assert back.gamma == sc.gamma
    assert back.samples == sc.samples
    assert back.sample_kind == "s_abs"
    assert back.compare_split


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.lists(
            st.builds(
                QI,
                st.fractions(min_value=-30, max_value=30, max_denominator=9),
                st.fractions(min_value=-30, max_value=30, max_denominator=9),
            ),
            min_size=3,
            max_size=3,
        ),
        min_size=2,
        max_size=2,
    )
)
def test_matrix_round_trip(rows):
    m = Matrix(rows, EXACT)
    assert matrix_from_json(matrix_to_json(m)) == m


# ---------------------------------------------------------------------------
# malformed records


def base_record():
    return structure_to_json(structure_of(ladder(2)))


@pytest.mark.parametrize(
    "mangle",
    [
        lambda r: r.pop("dimension"),
        lambda r: r.pop("weight_filtration"),
        lambda r: r.pop("hodge_filtration"),
        lambda r: r.update(dimension="two"),
        lambda r: r["weight_filtration"].update({"x": []}),
        lambda r: r["hodge_filtration"]["1"].append(["1"]),  # wrong vector length
        lambda r: r["hodge_filtration"]["1"].__setitem__(0, ["1", "oops"]),
        lambda r: r.pop("graded_lifts"),  # polarizations left behind
        lambda r: r["polarizations"].update({"0": [["1", "0"], ["1"]]}),
        lambda r: r.update(hodge_numbers={"1": 1}),
        lambda r: r.update(nilpotent=[["0"]]),  # wrong size
    ],
)
def test_malformed_structure_records(mangle):
    record = base_record()
    mangle(record)
    with pytest.raises(RecordError):
        structure_from_json(record)


def test_structure_record_must_be_object():
    with pytest.raises(RecordError):
        structure_from_json([1, 2])


def test_non_nested_weight_steps_rejected():
    record = base_record()
    # swap the two weight steps so the smaller index holds the bigger space
    record["weight_filtration"] = {
        "0": [["1", "0"], ["0", "1"]],
        "2": [["1", "0"]],
    }
    with pytest.raises(RecordError):
        structure_from_json(record)


@pytest.mark.parametrize(
    "mangle",
    [
        lambda r: r.pop("nilpotent"),
        lambda r: r.pop("polarizations"),
        lambda r: r.update(samples=["1/4"]),
        lambda r: r.update(samples={"kind": "weird", "values": []}),
        lambda r: r.update(samples={"kind": "y", "values": ["pi"]}),
    ],
)
def test_malformed_scenario_records(mangle):
    record = scenario_to_json(scenario_of(ladder(2), gamma=[]))
    mangle(record)
    with pytest.raises(RecordError):
        scenario_from_json(record)


# ---------------------------------------------------------------------------
# scan emission


def sample_result():
    rows = [
        ScanRow(y=1.0, s_abs=0.25, dist=0.25, log_dist=-1.3862943611198906, dist_sq_exact=Fraction(1, 16)),
        ScanRow(y=2.0, s_abs=0.0625, dist=0.0625, log_dist=-2.772588722239781, dist_sq_exact=Fraction(1, 256)),
        ScanRow(y=3.0, s_abs=float("nan"), dist=float("nan"), log_dist=float("nan"), skipped=True, reason="out of chart"),
    ]
    return ScanResult(rows=rows, slope=-2.0, log_coeff=0.0, intercept=0.5)


def test_csv_header_and_exact_column():
    text = scan_to_csv(sample_result(), exact=True)
    lines = text.splitlines()
    assert lines[0] == "y,s_abs,dist,log_dist,dist_sq_exact"
    assert lines[1].endswith(",1/16")
    assert "nan" in lines[3]


def test_csv_header_without_exact_column():
    text = scan_to_csv(sample_result(), exact=False)
    assert text.splitlines()[0] == "y,s_abs,dist,log_dist"


def test_csv_deterministic_17_digits():
    r = sample_result()
    assert scan_to_csv(r, exact=True) == scan_to_csv(r, exact=True)
    assert "1.3862943611198906" in scan_to_csv(r, exact=True)


def test_scan_json_marks_skipped_rows():
    payload = scan_to_json(sample_result(), exact=True)
    assert payload["fit"]["slope"] == -2.0
    assert payload["rows"][0]["dist_sq_exact"] == "1/16"
    assert payload["rows"][2]["skipped"] and payload["rows"][2]["reason"] == "out of chart"
    # the whole payload must be JSON serializable
    json.dumps(payload)


def test_load_json_errors(tmp_path):
    with pytest.raises(RecordError):
        load_json(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(RecordError):
        load_json(str(bad))
