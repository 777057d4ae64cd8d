import json
import math

from hypothesis import given, settings
from hypothesis import strategies as st

from hyperpsi.report import (ResidualReport, records_from_json, records_to_csv, records_to_json,
                             report_emit, sort_records)


def _rec(suite="theta", identity="parity", res=1e-13, tol=1e-10, inputs=None):
    return ResidualReport.gate(suite, identity, "Eq. 2-1", inputs or {"seed": 1}, res, tol)


def test_empty_report():
    assert json.loads(records_to_json([])) == []


def test_verdicts():
    assert _rec().verdict == "pass"
    assert _rec(res=1.0).verdict == "fail"
    assert _rec(res=float("nan")).verdict == "fail"
    d = ResidualReport.diagnostic("x", "y", "", {}, 1.0, 1e-3)
    assert d.verdict == "diagnostic" and not d.gating


def test_sorted_by_suite_identity_inputs():
    recs = [_rec("z", "a"), _rec("a", "b", inputs={"seed": 2}), _rec("a", "b", inputs={"seed": 1})]
    out = sort_records(recs)
    assert [(r.suite, r.inputs["seed"]) for r in out] == [("a", 1), ("a", 2), ("z", 1)]


def test_csv_has_header_plus_rows():
    recs = [_rec(inputs={"seed": s}) for s in range(5)]
    lines = records_to_csv(recs).splitlines()
    assert len(lines) == 6 and lines[0].startswith("suite,identity")


def test_non_finite_residual_roundtrip():
    back = records_from_json(records_to_json([_rec(res=float("inf"))]))
    assert math.isinf(back[0].residual) and back[0].verdict == "fail"


def test_emit_writes_both_files(tmp_path):
    recs = [_rec(), _rec("kleinian")]
    report_emit(recs, str(tmp_path / "r.json"), str(tmp_path / "r.csv"))
    assert len(json.loads((tmp_path / "r.json").read_text())) == 2
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 3
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".report-")] == []


_finite = st.floats(min_value=0, max_value=1e300, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["periods", "theta", "psi"]), st.text(max_size=8),
                          _finite, _finite, st.integers(0, 99)), max_size=10))
def test_json_roundtrip(rows):
    recs = [_rec(s, i, r, t, {"seed": k}) for s, i, r, t, k in rows]
    back = records_from_json(records_to_json(recs))
    assert len(back) == len(recs)
    for a, b in zip(sort_records(recs), back):
        assert a == b
        assert a.residual == 0 or abs(a.residual - b.residual) <= 1e-15 * a.residual
