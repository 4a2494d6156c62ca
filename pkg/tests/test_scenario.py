"""Scenario files, deterministic reports, the command-line interface."""

import json
import os
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from transverse import (
    AffineSet,
    Ball,
    Epigraph,
    Polyhedron,
    PreconditionError,
    ProductSet,
    ScenarioFormatError,
    Translate,
    UnionSet,
    hilbert_cube_scaling,
    indicator_fn,
    linear_fn,
    maxlin_fn,
    parse_scenario,
    run_corpus,
    run_scenario,
    set_from_payload,
    set_to_payload,
)
from transverse.cli import main
from transverse.scenario import canonical_value, dump_report, scenario_from_dict

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def minimal_scenario(**overrides) -> dict:
    doc = {
        "version": 1,
        "id": "test-pair",
        "seed": 0,
        "pair": {
            "a": {"variant": "polyhedron", "a": [[0.0, 1.0]], "b": [0.0]},
            "b": {"variant": "polyhedron", "a": [[0.0, -1.0]], "b": [0.0]},
            "x0": [0.0, 0.0],
        },
        "analyses": [
            {"name": "subtransversality", "params": {"delta": 0.5, "budget": 60}}
        ],
    }
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------------------
# canonical values
# ---------------------------------------------------------------------------


def test_canonical_value_rounds_floats_to_12_significant_digits():
    assert canonical_value(0.1 + 0.2) == 0.3
    assert canonical_value(1.0 / 3.0) == 0.333333333333
    assert canonical_value(float("inf")) == "inf"
    assert canonical_value(float("nan")) == "nan"


def test_canonical_value_normalizes_numpy_and_fractions():
    out = canonical_value(
        {
            "i": np.int64(3),
            "f": np.float64(2.5),
            "b": np.bool_(True),
            "arr": np.array([1.0, 2.0]),
            "frac": Fraction(1, 3),
            "nested": [(1, 2), {"k": np.float32(1.0)}],
        }
    )
    assert out == {
        "i": 3,
        "f": 2.5,
        "b": True,
        "arr": [1.0, 2.0],
        "frac": "1/3",
        "nested": [[1, 2], {"k": 1.0}],
    }
    assert isinstance(out["i"], int) and isinstance(out["b"], bool)


def test_dump_report_is_sorted_and_newline_terminated():
    text = dump_report({"b": 1, "a": [2.0]})
    assert text == '{\n  "a": [\n    2.0\n  ],\n  "b": 1\n}\n'


# ---------------------------------------------------------------------------
# set payload codec
# ---------------------------------------------------------------------------


def codec_cases():
    box = Polyhedron(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
    return [
        box,
        Ball([1.0, 0.0], 2.0),
        AffineSet([0.0, 0.0], [[1.0, 1.0]]),
        Translate(inner=box, shift=[0.5, -0.5]),
        ProductSet(blocks=(Ball([0.0], 1.0), box)),
        UnionSet(members=(box, Ball([3.0, 3.0], 1.0))),
        Epigraph(func=linear_fn([1.0, -1.0], d=0.25)),
        Epigraph(func=maxlin_fn([[1.0, 0.0], [-1.0, 0.5]])),
        Epigraph(func=indicator_fn(box)),
    ]


@pytest.mark.parametrize("s", codec_cases(), ids=lambda s: type(s).__name__)
def test_set_payload_roundtrip_preserves_oracles(s):
    payload = set_to_payload(s)
    back = set_from_payload(payload)
    assert type(back) is type(s) and back.dim == s.dim
    # identical payload after a second trip: the codec is canonical
    assert canonical_value(set_to_payload(back)) == canonical_value(payload)
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = rng.standard_normal(s.dim) * 2.0
        assert s.member(x) == back.member(x)
        np.testing.assert_allclose(back.project(x), s.project(x), atol=1e-9)


def test_unknown_payload_tag_is_a_format_error():
    with pytest.raises(ScenarioFormatError, match="mystery"):
        set_from_payload({"variant": "mystery"})


def test_raw_callable_epigraph_is_unserializable():
    epi = Epigraph(f=lambda x: float(x @ x), base_dim=1)
    with pytest.raises(ScenarioFormatError):
        set_to_payload(epi)


# ---------------------------------------------------------------------------
# scenario parsing
# ---------------------------------------------------------------------------


def test_scenario_roundtrip_is_canonical(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(minimal_scenario()))
    sc = parse_scenario(str(path))
    once = sc.serialize()
    again = scenario_from_dict(once).serialize()
    assert once == again


def test_parse_reports_json_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "version": 1,\n  "id": oops\n}\n')
    with pytest.raises(ScenarioFormatError, match=r"line 3"):
        parse_scenario(str(path))


def test_seed_is_mandatory_and_integer():
    doc = minimal_scenario()
    del doc["seed"]
    with pytest.raises(ScenarioFormatError, match="seed"):
        scenario_from_dict(doc)
    with pytest.raises(ScenarioFormatError, match="seed"):
        scenario_from_dict(minimal_scenario(seed=True))
    with pytest.raises(ScenarioFormatError, match="seed"):
        scenario_from_dict(minimal_scenario(seed="7"))


def test_unknown_fields_and_analyses_are_rejected():
    with pytest.raises(ScenarioFormatError, match="unknown"):
        scenario_from_dict(minimal_scenario(extra=1))
    doc = minimal_scenario()
    doc["analyses"] = [{"name": "definitely_not_an_analysis"}]
    with pytest.raises(ScenarioFormatError, match="definitely_not_an_analysis"):
        scenario_from_dict(doc)
    doc["analyses"] = [{"name": "subtransversality", "params": {"bogus": 1}}]
    with pytest.raises(ScenarioFormatError, match="bogus"):
        scenario_from_dict(doc)


def test_budget_validation():
    with pytest.raises(ScenarioFormatError, match="budget"):
        scenario_from_dict(minimal_scenario(budgets={"budget": -3}))
    with pytest.raises(ScenarioFormatError):
        scenario_from_dict(minimal_scenario(budgets={"mystery": 1}))


def test_version_must_be_one():
    with pytest.raises(ScenarioFormatError, match="version"):
        scenario_from_dict(minimal_scenario(version=2))


# ---------------------------------------------------------------------------
# report determinism and schema
# ---------------------------------------------------------------------------


def test_run_scenario_is_deterministic():
    sc = scenario_from_dict(minimal_scenario())
    a = dump_report(run_scenario(sc))
    b = dump_report(run_scenario(sc))
    assert a == b


def test_report_against_bundled_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema_path = (
        Path(__file__).resolve().parent.parent
        / "src" / "transverse" / "schemas" / "report-v1.json"
    )
    schema = json.loads(schema_path.read_text())
    sc = scenario_from_dict(minimal_scenario())
    report = run_scenario(sc)
    jsonschema.validate(canonical_value(report), schema)


def test_seed_override_changes_the_report():
    sc = scenario_from_dict(minimal_scenario())
    base = run_scenario(sc)
    other = run_scenario(sc, seed=123)
    assert base["seed"] == 0 and other["seed"] == 123


def test_analysis_errors_are_recorded_not_raised():
    doc = minimal_scenario()
    # x0 outside both sets: the analysis raises inside, the report records it
    doc["pair"]["x0"] = [5.0, 5.0]
    sc = scenario_from_dict(doc)
    report = run_scenario(sc)
    entry = report["analyses"][0]
    assert "error" in entry["result"]
    assert entry["result"]["error"]["type"] == "PreconditionError"
    assert report["discrepancies"] == []


# ---------------------------------------------------------------------------
# bundled corpus
# ---------------------------------------------------------------------------


def test_bundled_corpus_has_no_discrepancies(tmp_path):
    out = run_corpus(str(SCENARIO_DIR), workers=4)
    assert not out["any_discrepancy"]
    names = [r["scenario"] for r in out["rows"]]
    assert "crossing-lines-60" in names and "tangent-disks" in names
    assert all(r["errors"] == "" for r in out["rows"])


def test_corpus_reruns_byte_identically(tmp_path):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    run_corpus(str(SCENARIO_DIR), str(d1), workers=4)
    run_corpus(str(SCENARIO_DIR), str(d2), workers=4)
    files1 = sorted(p.name for p in d1.iterdir())
    files2 = sorted(p.name for p in d2.iterdir())
    assert files1 == files2 and files1
    for name in files1:
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


# ---------------------------------------------------------------------------
# dimensional scaling study
# ---------------------------------------------------------------------------


def test_hilbert_scaling_small_run_matches_probe():
    out = hilbert_cube_scaling(2, budget=40, seed=0)
    assert [r["n"] for r in out["rows"]] == [1, 2]
    for row in out["rows"]:
        assert row["status"] == "CERTIFIED" and row["flag"] == ""
        assert row["khat"] == pytest.approx(row["probe_khat"], abs=1e-4)
    assert out["csv"].splitlines()[0] == "n,khat,probe_khat,status,flag"


def test_hilbert_scaling_enforces_dimension_cap():
    with pytest.raises(PreconditionError):
        hilbert_cube_scaling(0)
    with pytest.raises(PreconditionError):
        hilbert_cube_scaling(13)


# ---------------------------------------------------------------------------
# command-line interface
# ---------------------------------------------------------------------------


def write_scenario(tmp_path, name="s.json", **overrides):
    path = tmp_path / name
    path.write_text(json.dumps(minimal_scenario(**overrides)))
    return path


def test_cli_run_writes_report_and_exits_zero(tmp_path, capsys):
    path = write_scenario(tmp_path)
    out_dir = tmp_path / "out"
    code = main(["run", str(path), "--out", str(out_dir)])
    captured = capsys.readouterr()
    assert code == 0
    report_path = out_dir / "test-pair.report.json"
    assert report_path.exists()
    assert captured.out == report_path.read_text()


def test_cli_out_dir_from_environment(tmp_path, capsys, monkeypatch):
    path = write_scenario(tmp_path)
    env_dir = tmp_path / "envout"
    monkeypatch.setenv("TRANSVERSE_OUT_DIR", str(env_dir))
    assert main(["run", str(path)]) == 0
    capsys.readouterr()
    assert (env_dir / "test-pair.report.json").exists()


def test_cli_rejects_unknown_report_format(tmp_path, capsys):
    path = write_scenario(tmp_path)
    assert main(["run", str(path), "--format", "2"]) == 2
    assert "format" in capsys.readouterr().err


def test_cli_reports_parse_errors_on_stderr(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["run", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line" in err


def test_cli_missing_file_is_a_config_error(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.json")]) == 2
    assert capsys.readouterr().err


def test_cli_corpus_runs_bundled_scenarios(capsys, tmp_path):
    code = main(["corpus", str(SCENARIO_DIR), "--out", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == 0
    assert "crossing-lines-60" in captured.out
    assert (tmp_path / "out" / "corpus_summary.csv").exists()


def test_cli_corpus_empty_directory_is_clean(tmp_path, capsys):
    assert main(["corpus", str(tmp_path)]) == 0
    capsys.readouterr()


def test_cli_corpus_validates_workers(tmp_path, capsys):
    assert main(["corpus", str(tmp_path), "--workers", "0"]) == 2
    assert "workers" in capsys.readouterr().err


def test_cli_hilbert_prints_csv(capsys):
    assert main(["hilbert", "2", "--budget", "40"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "n,khat,probe_khat,status,flag"
    assert main(["hilbert", "20"]) == 2


def test_cli_exit_one_on_discrepancy(tmp_path, capsys, monkeypatch):
    # no honest scenario produces a discrepancy (that would be a toolkit
    # bug), so exercise the exit-code contract by stubbing one runner
    from transverse import scenario as scenario_mod

    spec = scenario_mod.ANALYSES["subtransversality"]
    forced = type(spec)(
        payload=spec.payload, required=spec.required, optional=spec.optional,
        run=lambda ctx, p: {"has_discrepancy": True, "status": "forced"},
    )
    monkeypatch.setitem(scenario_mod.ANALYSES, "subtransversality", forced)
    path = write_scenario(tmp_path, "d.json", id="discrepant")
    code = main(["run", str(path)])
    out = capsys.readouterr().out
    assert code == 1
    report = json.loads(out)
    assert report["discrepancies"] == ["subtransversality"]
