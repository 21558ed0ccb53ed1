import csv
import io
import json

import pytest

from qmeas import MeasureSum, PointMass, Scaled, ThreePoint, unit_square
from qmeas.errors import ConfigInvalid, UnknownScenario
from qmeas.lab import cli
from qmeas.lab.config import DEFAULTS, build_measure, merge, validate
from qmeas.lab.report import Report, to_csv, to_json, to_table
from qmeas.lab.scenarios import REGISTRY, effective_config, list_scenarios, run_scenario

G = unit_square(32)


def _invalid_path(cfg):
    with pytest.raises(ConfigInvalid) as err:
        validate(cfg)
    return err.value.path


def test_validation_points_at_the_bad_key():
    assert _invalid_path({"grid": {"n": 4}}) == "grid.n"
    assert _invalid_path({"thresholds": {"k": "many"}}) == "thresholds.k"
    assert _invalid_path({"colour": 1}) == ""
    assert _invalid_path({"measures": {"x": {"variant": "scaled", "params": {"c": -1,
                          "inner": {"variant": "lebesgue"}}}}}) == "measures.x.params.c"
    assert _invalid_path({"measures": {"x": {"variant": "point-mass",
                                             "params": {"location": [0.5]}}}}) == \
        "measures.x.params.location"


def test_merge_replaces_measures_wholesale():
    base = merge(DEFAULTS, {"measures": {"a": {"variant": "lebesgue"}, "b": {"variant": "lebesgue"}}})
    out = merge(base, {"grid": {"n": 64}, "measures": {"c": {"variant": "three-point"}}})
    assert out["grid"] == {"n": 64, "product_n": 32}
    assert list(out["measures"]) == ["c"]


def test_build_every_variant():
    spec = {"variant": "sum", "params": {"terms": [
        {"variant": "scaled", "params": {"c": 2, "inner": {"variant": "three-point"}}},
        {"variant": "point-mass", "params": {"location": [0.1, 0.9], "weight": 0.5}},
    ]}}
    m = build_measure(validate({"measures": {"x": spec}})["measures"]["x"], G)
    assert isinstance(m, MeasureSum)
    assert isinstance(m.terms[0], Scaled) and isinstance(m.terms[0].inner, ThreePoint)
    assert isinstance(m.terms[1], PointMass) and m.total == pytest.approx(2.5)
    with pytest.raises(ConfigInvalid) as err:
        build_measure({"variant": "corrupted", "params": {"cell": [99, 0]}}, G, "measures.y")
    assert err.value.path == "measures.y.params.cell"


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        effective_config("nope", {})


def test_scenario_filter():
    assert [s.name for s in list_scenarios("fub")] == ["fubini-failure"]
    assert len(list_scenarios("")) == len(REGISTRY) == 14


def _report():
    rep = Report("demo", {"seed": 1}, 1)
    rep.check("close enough", 1.0, 1.0 + 1e-13, 1e-12)
    rep.check("labels", "Simple", "Simple")
    rep.wall_time = 0.5
    return rep


def test_report_renderings():
    rep = _report()
    assert rep.passed and [r.passed for r in rep.rows] == [True, True]
    one = json.loads(to_json([rep]))
    assert isinstance(one, dict) and "wall_time" not in one and one["rows"][0]["pass"] is True
    assert isinstance(json.loads(to_json([rep, rep])), list)
    assert json.loads(to_json([rep], timing=True))["wall_time"] == 0.5
    rows = list(csv.reader(io.StringIO(to_csv([rep], timing=True))))
    assert rows[0] == ["scenario", "description", "expected", "actual", "tolerance", "pass", "wall_time"]
    assert rows[1][5] == "true"
    assert "1 scenario(s), 2 check(s), 0 failed" in to_table([rep])
    rep.check("wrong", 0.0, 1.0)
    assert not rep.passed


def test_rerun_is_bit_identical():
    a = to_json([run_scenario("rectangle-family", {})])
    b = to_json([run_scenario("rectangle-family", {})])
    assert a == b


def test_cli_run_and_formats(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["run", "rectangle-family", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["scenario"] == "rectangle-family" and doc["pass"] and doc["seed"] == 7
    assert cli.main(["run", "rectangle-family", "--format", "csv", "--seed", "3"]) == 0
    assert capsys.readouterr().out.startswith("scenario,description")


def test_cli_list(capsys):
    assert cli.main(["list", "fub"]) == 0
    assert capsys.readouterr().out.split()[0] == "fubini-failure"


def test_cli_usage_errors(tmp_path, capsys):
    assert cli.main(["run", "no-such-scenario"]) == 2
    assert cli.main(["frobnicate"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"grid": {"n": 2}}')
    assert cli.main(["run", "axioms", "--config", str(bad)]) == 2
    assert "grid.n" in capsys.readouterr().err
    bad.write_text("{not json")
    assert cli.main(["run", "axioms", "--config", str(bad)]) == 2
    # three points crowded into one cell on a coarse grid
    crowded = tmp_path / "crowded.json"
    crowded.write_text(json.dumps({"grid": {"n": 8}, "measures": {"x": {
        "variant": "three-point", "params": {"points": [[0.5, 0.5], [0.51, 0.5], [0.52, 0.5]]}}}}))
    assert cli.main(["run", "axioms", "--config", str(crowded)]) == 2


def test_cli_reports_failed_checks(tmp_path):
    cfg = tmp_path / "corrupt.json"
    cfg.write_text(json.dumps({"grid": {"n": 32}, "trials": 10,
                               "measures": {"bad": {"variant": "corrupted"}}}))
    out = tmp_path / "r.json"
    assert cli.main(["run", "axioms", "--config", str(cfg), "--out", str(out)]) == 1
    rows = json.loads(out.read_text())["rows"]
    assert rows[0]["actual"].startswith("Fail")


def test_parallel_matches_serial(tmp_path):
    cfg = tmp_path / "small.json"
    cfg.write_text(json.dumps({"grid": {"n": 32, "product_n": 16}, "thresholds": {"k": 64}, "trials": 10}))
    serial, parallel = tmp_path / "s.json", tmp_path / "p.json"
    for path, extra in ((serial, []), (parallel, ["--parallel"])):
        cli.main(["run", "all", "--config", str(cfg), "--out", str(path)] + extra)
    assert serial.read_bytes() == parallel.read_bytes()
