import csv
import io
import json
import subprocess
import sys

import pytest

from twcut.cli import run_cli
from twcut.graph import read_graph
from twcut.treedecomp import parse_td, validate

P3_GR = "p 3 2\ne 1 2\ne 2 3\n"
P3_TD = "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n"


@pytest.fixture
def p3_files(tmp_path):
    gr, td = tmp_path / "p3.gr", tmp_path / "p3.td"
    gr.write_text(P3_GR)
    td.write_text(P3_TD)
    return str(gr), str(td)


def run(argv, capsys):
    code = run_cli(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_max_cut_witness(p3_files, capsys):
    gr, td = p3_files
    code, out, _ = run(["solve", "--problem", "max-cut", "--graph", gr, "--td", td, "--undirected", "--witness"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["value"] == "2"
    assert report["witness"] == [2]
    assert report["width_source"] == "given"
    for key in ("problem", "n", "m", "width", "nodes", "value", "count", "stats"):
        assert key in report
    assert report["count"] == 1


def test_solve_sparsest_cut(p3_files, capsys):
    gr, td = p3_files
    code, out, _ = run(["solve", "--problem", "sparsest-cut", "--graph", gr, "--td", td, "--undirected"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["value"] == "1/2"
    assert "witness" not in report


def test_solve_without_td_is_heuristic(p3_files, capsys):
    gr, _ = p3_files
    code, out, _ = run(["solve", "--problem", "max-bisection", "--graph", gr, "--oracle-check"], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["width_source"] == "heuristic"
    assert report["value"] == report["oracle"] == "2"


def test_solve_text_format(p3_files, capsys):
    gr, td = p3_files
    code, out, _ = run(["solve", "--problem", "max-cut", "--graph", gr, "--td", td, "--format", "text"], capsys)
    assert code == 0
    assert "value: 2" in out.splitlines()


def test_infeasible_exit_code(p3_files, capsys):
    gr, td = p3_files
    code, out, _ = run(["solve", "--problem", "balanced-min-cut", "--beta", "1/2", "--graph", gr, "--td", td], capsys)
    assert code == 2
    assert json.loads(out)["value"] == "infeasible"


def test_validate_ok_and_missing_edge(p3_files, tmp_path, capsys):
    gr, td = p3_files
    assert run(["validate", "--graph", gr, "--td", td], capsys)[0] == 0
    bad = tmp_path / "bad.td"
    bad.write_text("s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n2 3\n")
    code, out, _ = run(["validate", "--graph", gr, "--td", str(bad)], capsys)
    assert code == 1
    assert "EdgeNotCovered" in out


def test_solve_rejects_invalid_td(p3_files, tmp_path, capsys):
    gr, _ = p3_files
    bad = tmp_path / "bad.td"
    bad.write_text("s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n2 3\n")
    code, _, err = run(["solve", "--problem", "max-cut", "--graph", gr, "--td", str(bad)], capsys)
    assert code == 1 and "EdgeNotCovered" in err


@pytest.mark.parametrize(
    "text",
    ["p 3 2\ne 1 2\ne 2 9\n", "p 3 1\ne 1 2 0.5\n", "nonsense\n"],
)
def test_parse_errors_exit_1(text, tmp_path, capsys):
    gr = tmp_path / "g.gr"
    gr.write_text(text)
    code, _, err = run(["solve", "--problem", "max-cut", "--graph", str(gr)], capsys)
    assert code == 1 and "error" in err


def test_usage_errors_exit_1(p3_files, capsys):
    gr, _ = p3_files
    with pytest.raises(SystemExit) as info:
        run_cli(["solve", "--problem", "min-cut", "--graph", gr])
    assert info.value.code == 1
    assert run(["solve", "--problem", "max-cut", "--beta", "1/3", "--graph", gr], capsys)[0] == 1
    assert run(["solve", "--problem", "max-cut", "--graph", "/nonexistent.gr"], capsys)[0] == 1


def test_oracle_command(p3_files, capsys):
    gr, _ = p3_files
    code, out, _ = run(["oracle", "--problem", "max-cut", "--graph", gr], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["value"] == "2"
    assert sorted(report["witnesses"]) == [[1, 3], [2]]


def test_nicify_output_parses_back(p3_files, capsys):
    gr, td = p3_files
    code, out, _ = run(["nicify", "--graph", gr, "--td", td], capsys)
    assert code == 0
    assert [line for line in out.splitlines() if line.startswith("c ")] == ["c leaf", "c forget 3", "c introduce 1"]
    D = parse_td(out, n=3, root=3)
    assert validate(read_graph(gr), D) is None


def test_gen_then_solve_with_oracle(tmp_path, capsys):
    prefix = str(tmp_path / "inst")
    for directed in (False, True):
        flag = ["--directed"] if directed else []
        code, _, _ = run(["gen", "--seed", "4", "--n", "10", "--width", "3", "--weights=-2:3", "--out", prefix, *flag], capsys)
        assert code == 0
        for problem in ("max-cut", "min-edge-expansion"):
            code, out, _ = run(
                ["solve", "--problem", problem, "--graph", prefix + ".gr", "--td", prefix + ".td", "--oracle-check", *flag],
                capsys,
            )
            assert code == 0
            report = json.loads(out)
            assert report["value"] == report["oracle"]


def test_gen_bad_weights(tmp_path, capsys):
    code, _, _ = run(["gen", "--n", "4", "--width", "1", "--weights", "x", "--out", str(tmp_path / "g")], capsys)
    assert code == 1


def test_bench_csv(capsys):
    code, out, _ = run(["bench", "--sizes", "20,40", "--widths", "1,3", "--seeds", "0,1"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    for row in rows:
        n = int(row["n"])
        assert int(row["join_pair_sum"]) <= n * n
        assert int(row["nodes"]) <= 4 * n
        assert float(row["elapsed"]) >= 0


def test_bench_parallel_matches_serial(capsys):
    argv = ["bench", "--sizes", "30", "--widths", "2", "--seeds", "0,1,2"]
    serial = run(argv, capsys)[1]
    parallel = run(argv + ["--jobs", "2"], capsys)[1]
    strip = lambda text: [r[:-1] for r in csv.reader(io.StringIO(text))]
    assert strip(serial) == strip(parallel)


def test_module_entry_point(p3_files):
    gr, td = p3_files
    proc = subprocess.run(
        [sys.executable, "-m", "twcut", "solve", "--problem", "max-cut", "--graph", gr, "--td", td],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == "2"
