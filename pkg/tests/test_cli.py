import json
import os

import pytest

from hyperpsi.cli import MAX_M_HINT, ConfigError, SuiteConfig, main
from hyperpsi.curve import Curve

FAST = ["--seeds", "1", "--points", "1", "--max-m", "4"]


@pytest.fixture(autouse=True)
def quiet(monkeypatch):
    monkeypatch.setenv("VERIFY_LOG", "quiet")


def _run(tmp_path, *extra, name="r.json"):
    out = tmp_path / name
    code = main(["run", *FAST, "--out", str(out), *extra])
    return code, out


def test_passing_suites_exit_zero(tmp_path):
    code, out = _run(tmp_path, "--suites", "periods,theta,elliptic")
    assert code == 0
    recs = json.loads(out.read_text())
    assert recs and {r["suite"] for r in recs} == {"periods", "theta", "elliptic"}
    assert all(r["wall_time_ms"] == 0 for r in recs)


def test_tight_tolerance_exit_one(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"theta": 0.0}}))
    code, _ = _run(tmp_path, "--suites", "theta", "--config", str(cfg))
    assert code == 1


@pytest.mark.parametrize("args", [["--suites", "nope"], ["--max-m", "1"], ["--points", "0"],
                                  ["--seeds", "a,b"], ["--bogus"]])
def test_bad_config_exit_two(tmp_path, args):
    assert main(["run", "--out", str(tmp_path / "r.json"), *args]) == 2


def test_bad_log_level_exit_two(tmp_path, monkeypatch):
    monkeypatch.setenv("VERIFY_LOG", "loud")
    assert _run(tmp_path, "--suites", "periods")[0] == 2


def test_unknown_config_key(tmp_path):
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"colour": 1})
    cfg = tmp_path / "c.json"
    cfg.write_text("[1, 2]")
    assert main(["run", "--config", str(cfg)]) == 2


def test_degenerate_curve_exit_three(tmp_path):
    bad = tmp_path / "bad.json"
    # repeated root: x^5 - 2x^4 + x^3 = x^3 (x - 1)^2
    bad.write_text(json.dumps({"genus": 2, "lambdas": [[0, 0], [0, 0], [0, 0], [1, 0], [-2, 0], [1, 0]]}))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seeds": [], "curves": [str(bad)], "suites": ["periods"]}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 3


def test_unwritable_output_exit_four(tmp_path):
    code = main(["run", *FAST, "--suites", "periods", "--out", str(tmp_path / "missing" / "r.json")])
    assert code == 4


def test_curve_command_roundtrip(tmp_path):
    path = tmp_path / "c.json"
    assert main(["curve", "--seed", "4", "--out", str(path)]) == 0
    curve = Curve.from_json(path.read_text())
    assert curve.genus == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seeds": [], "curves": [str(path)], "suites": ["periods", "theta"],
                               "points_per_curve": 1}))
    out = tmp_path / "r.json"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    labels = {r["inputs"].get("curve") for r in json.loads(out.read_text())}
    assert "file:c.json" in labels and not any(str(l).startswith("seed:") for l in labels)


def test_deterministic_with_csv_and_cache(tmp_path):
    cache = str(tmp_path / "periods.json")
    a = _run(tmp_path, "--suites", "periods,kleinian,recursion-g2", "--csv", str(tmp_path / "a.csv"),
             "--cache-periods", cache, name="a.json")[1]
    b = _run(tmp_path, "--suites", "periods,kleinian,recursion-g2", "--cache-periods", cache,
             name="b.json")[1]
    assert a.read_bytes() == b.read_bytes()
    n = len(json.loads(a.read_text()))
    assert len((tmp_path / "a.csv").read_text().splitlines()) == n + 1
    assert os.path.exists(cache)


def test_timings_recorded(tmp_path):
    code, out = _run(tmp_path, "--suites", "periods", "--timings")
    assert code == 0
    assert any(r["wall_time_ms"] > 0 for r in json.loads(out.read_text()))


def test_hint_only_on_recursion_records(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"recursion-g2": 0.0}}))
    _, out = _run(tmp_path, "--suites", "theta,kleinian,recursion-g2", "--config", str(cfg))
    recs = json.loads(out.read_text())
    hinted = [r for r in recs if r.get("note") == MAX_M_HINT]
    assert hinted and all(r["identity"] == "determinant_recursion" for r in hinted)
