import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from shapekit.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def runner():
    return CliRunner()


def test_infer_people(runner):
    result = runner.invoke(main, ["infer", str(FIXTURES / "people.json")])
    assert result.exit_code == 0, result.output
    assert "age: nullable<float>" in result.output
    assert "name: string" in result.output


def test_infer_requires_samples(runner):
    result = runner.invoke(main, ["infer"])
    assert result.exit_code == 2


def test_infer_writes_shape_file(runner, tmp_path):
    out = tmp_path / "people.shape"
    result = runner.invoke(main, ["infer", str(FIXTURES / "people.json"), "--out", str(out)])
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["format_version"] == 1
    assert doc["shape"]["kind"] == "collection"


def test_infer_malformed_exits_2(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    result = runner.invoke(main, ["infer", str(bad)])
    assert result.exit_code == 2


def test_infer_unknown_extension_requires_format(runner, tmp_path):
    f = tmp_path / "data.txt"
    f.write_text("{}")
    result = runner.invoke(main, ["infer", str(f)])
    assert result.exit_code == 2
    result = runner.invoke(main, ["infer", "--format", "json", str(f)])
    assert result.exit_code == 0


def test_codegen_root_xml(runner, tmp_path):
    out = tmp_path / "root.shape"
    assert runner.invoke(main, ["infer", str(FIXTURES / "root.xml"), "--out", str(out)]).exit_code == 0
    result = runner.invoke(main, ["codegen", str(out)])
    assert result.exit_code == 0
    assert "type Root = member Id : int, member Item : string" in result.output
    assert "convField" in result.output  # class listing included


def test_codegen_rejects_bad_file(runner, tmp_path):
    bad = tmp_path / "x.shape"
    bad.write_text("{}")
    assert runner.invoke(main, ["codegen", str(bad)]).exit_code == 2


def test_validate_subshape(runner, tmp_path):
    shape_file = tmp_path / "people.shape"
    runner.invoke(main, ["infer", str(FIXTURES / "people.json"), "--out", str(shape_file)])
    ok = tmp_path / "eva.json"
    ok.write_text('[{"name":"Eva"}]')
    result = runner.invoke(main, ["validate", str(shape_file), str(ok)])
    assert result.exit_code == 0
    assert "subshape" in result.output


def test_validate_rejects_wrong_primitive(runner, tmp_path):
    shape_file = tmp_path / "people.shape"
    runner.invoke(main, ["infer", str(FIXTURES / "people.json"), "--out", str(shape_file)])
    bad = tmp_path / "bad.json"
    bad.write_text('[{"name": 1}]')
    result = runner.invoke(main, ["validate", str(shape_file), str(bad)])
    assert result.exit_code == 1
    assert "int ⋢ string" in result.output
    assert ".name" in result.output


def test_validate_parse_error_exits_2(runner, tmp_path):
    shape_file = tmp_path / "people.shape"
    runner.invoke(main, ["infer", str(FIXTURES / "people.json"), "--out", str(shape_file)])
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert runner.invoke(main, ["validate", str(shape_file), str(bad)]).exit_code == 2


def test_eval_weather_paths(runner):
    weather = str(FIXTURES / "weather.json")
    result = runner.invoke(main, ["eval", weather, "-i", weather, "-p", "Main.Temp"])
    assert result.exit_code == 0 and result.output.strip() == "5"
    result = runner.invoke(main, ["eval", weather, "-i", weather, "-p", "Wind.Speed"])
    assert result.exit_code == 0 and result.output.strip() == "1.5"
    result = runner.invoke(main, ["eval", weather, "-i", weather, "-p", "Sys.Country"])
    assert result.exit_code == 0 and result.output.strip() == '"CZ"'


def test_eval_people_missing_age(runner):
    people = str(FIXTURES / "people.json")
    result = runner.invoke(main, ["eval", people, "-i", people, "-p", "[1].Age"])
    assert result.exit_code == 0 and result.output.strip() == "None"
    result = runner.invoke(main, ["eval", people, "-i", people, "-p", "[0].Age"])
    assert result.output.strip() == "Some(25.0)"


def test_eval_unknown_member_suggests(runner):
    weather = str(FIXTURES / "weather.json")
    result = runner.invoke(main, ["eval", weather, "-i", weather, "-p", "Main.Nope"])
    assert result.exit_code == 1
    assert "unknown member" in result.output
    assert "Temp" in result.output


def test_eval_xml_doc_open_world(runner):
    doc = str(FIXTURES / "doc.xml")
    table = str(FIXTURES / "doc_with_table.xml")
    result = runner.invoke(
        main, ["eval", doc, "--no-hetero", "-i", table, "-p", "Value[2].Heading"]
    )
    assert result.exit_code == 0
    assert result.output.strip() == "None"
    result = runner.invoke(
        main, ["eval", doc, "--no-hetero", "-i", table, "-p", "Value[0].Heading"]
    )
    assert result.output.strip() == 'Some("Working with tables")'


def test_check_tiny_run_writes_reports(runner, tmp_path):
    report_dir = tmp_path / "report"
    result = runner.invoke(
        main,
        [
            "check", "--suite", "safety", "--suite", "stability",
            "--trials", "10", "--stability-trials", "5",
            "--seed", "1", "--report-dir", str(report_dir),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (report_dir / "report.json").exists()
    assert (report_dir / "report.csv").exists()
    assert (report_dir / "report.png").exists()
    doc = json.loads((report_dir / "report.json").read_text())
    assert doc["passed"] is True
    names = [s["suite"] for s in doc["suites"]]
    assert names == ["safety", "stability"]
    csv_text = (report_dir / "report.csv").read_text()
    assert "suite,trials,failures,duration_s,status" in csv_text


def test_check_replays_deterministically(runner):
    args = ["check", "--suite", "safety", "--trials", "15", "--seed", "42"]
    a = CliRunner().invoke(main, args)
    b = CliRunner().invoke(main, args)
    sanitize = lambda out: [l.split("(")[0] for l in out.splitlines()]
    assert sanitize(a.output) == sanitize(b.output)
