"""
Suite of tests for the console commands and their exit codes.
"""

# General imports
import json

from click.testing import CliRunner
# Module imports
from pyrangeclust.main import CSV_FIELDS, cli

ENV = {"RC_LOG_LEVEL": "ERROR", "RC_THREADS": "2"}


def _invoke(*args):
    return CliRunner().invoke(cli, [str(a) for a in args], env=ENV)


def _json_lines(output: str):
    return [json.loads(line) for line in output.splitlines() if line.startswith("{")]


def _bundle(tmp_path):
    dataset = tmp_path / "points.csv"
    bundle = tmp_path / "points.rcidx"
    result = _invoke("gen", dataset, "-n", 150, "-d", 2, "--mixture", "gaussians",
                     "-m", 3, "--seed", 4)
    assert result.exit_code == 0
    result = _invoke("build", dataset, bundle, "--k-max", 4)
    assert result.exit_code == 0
    return bundle


def test_gen_and_build(tmp_path):
    """
    Test that generated datasets are reproducible and build into a bundle.
    """
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _invoke("gen", first, "-n", 40, "-d", 3, "--seed", 9).exit_code == 0
    assert _invoke("gen", second, "-n", 40, "-d", 3, "--seed", 9).exit_code == 0
    assert first.read_text() == second.read_text()
    assert len(first.read_text().strip().splitlines()) == 41
    assert _bundle(tmp_path).exists()


def test_query_formats(tmp_path):
    """
    Test single queries in both output formats.
    """
    bundle = _bundle(tmp_path)
    result = _invoke("query", bundle, "--type", "kmedian", "--range", "0,0x1,1", "-k", 3,
                     "--eps", 0.3, "--no-timing", "--with-coreset")
    assert result.exit_code == 0
    answer = _json_lines(result.output)[0]
    assert answer["type"] == "kmedian" and answer["schema"] == 1
    assert 1 <= len(answer["centers"]) <= 3
    assert answer["wall_ms"] == 0.0
    assert len(answer["coreset"]) == answer["coreset_size"]

    result = _invoke("query", bundle, "--type", "diameter", "--range", "0,0x1,1",
                     "--format", "csv", "--no-timing")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    header = lines.index(",".join(CSV_FIELDS))
    row = lines[header + 1].split(",")
    assert row[0] == "diameter" and row[1] == ""
    assert float(row[3]) > 0


def test_range_file_and_batch(tmp_path):
    """
    Test queries read from files.
    """
    bundle = _bundle(tmp_path)
    box = tmp_path / "box.json"
    box.write_text(json.dumps({"lo": [0.2, 0.2], "hi": [0.9, 0.8]}))
    result = _invoke("query", bundle, "--type", "radius", "--range-file", box)
    assert result.exit_code == 0
    assert len(_json_lines(result.output)[0]["centers"]) <= 1

    batch = tmp_path / "batch.json"
    batch.write_text(json.dumps([
        {"type": "kcenter", "lo": [0, 0], "hi": [1, 1], "k": 2, "eps": 0.2},
        {"type": "kmeans", "lo": [0, 0], "hi": [0.5, 0.5], "k": 1, "eps": 0.2},
    ]))
    result = _invoke("query", bundle, "--batch", batch, "--no-timing")
    assert result.exit_code == 0
    assert [a["type"] for a in _json_lines(result.output)] == ["kcenter", "kmeans"]


def test_usage_errors(tmp_path):
    """
    Test that malformed requests exit with 1.
    """
    bundle = _bundle(tmp_path)
    box = tmp_path / "box.json"
    box.write_text(json.dumps({"lo": [0, 0], "hi": [1, 1]}))
    assert _invoke("query", bundle, "--range", "0,0x1,1", "-k", 2).exit_code == 1
    assert _invoke("query", bundle, "--type", "kmeans", "--range", "0,0x1,1",
                   "--range-file", box, "-k", 2).exit_code == 1
    assert _invoke("query", bundle, "--type", "kmeans", "--range", "0,0,0x1,1,1",
                   "-k", 2).exit_code == 1
    assert _invoke("query", bundle, "--type", "kmeans", "--range", "0,0x1,1",
                   "-k", 151).exit_code == 1
    assert _invoke("query", bundle, "--type", "kmeans", "--range", "1,1x0,0",
                   "-k", 2).exit_code == 1
    params = tmp_path / "params.yaml"
    params.write_text("delta: 0.1\nbucket: 3\n")
    assert _invoke("build", tmp_path / "points.csv", tmp_path / "other.rcidx",
                   "--params", params).exit_code == 1


def test_data_errors(tmp_path):
    """
    Test that unreadable or malformed inputs exit with 2.
    """
    assert _invoke("build", tmp_path / "missing.csv", tmp_path / "x.rcidx").exit_code == 2
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1.0,2.0\n3.0,4.0,5.0\n")
    assert _invoke("build", ragged, tmp_path / "x.rcidx").exit_code == 2
    assert _invoke("query", tmp_path / "missing.rcidx", "--type", "diameter",
                   "--range", "0,0x1,1").exit_code == 2


def test_validate_command(tmp_path):
    """
    Test the validation report in CSV form.
    """
    bundle = _bundle(tmp_path)
    result = _invoke("validate", bundle, "--suite", "structures", "--budget", 3,
                     "--format", "csv")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    start = lines.index("suite,name,passed,checks,violations,worst_slack,detail")
    rows = [line for line in lines[start + 1:] if line.startswith("structures,")]
    assert rows
