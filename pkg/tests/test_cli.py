import io
import json
import subprocess
import sys

import pytest

from rewritelen.cli import EXIT_FOUND, EXIT_LIMIT, EXIT_RESOURCE, EXIT_USAGE, main, parse_group_spec


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run_cli(*argv)
    return code, json.loads(text)


def test_cyclic_is_p2():
    code, data = run_json("--group", "cyclic:12", "--limit", "5")
    assert code == EXIT_FOUND
    assert data["result"] == 2 and data["counts"] == {"2": 0}


@pytest.mark.parametrize("n", range(2, 13))
def test_cyclic_family(n):
    code, data = run_json("--group", f"cyclic:{n}")
    assert code == 0 and data["result"] == 2


def test_report_fields():
    code, data = run_json("--group", "sym:4", "--limit", "10", "--mode", "seq")
    assert code == 0
    assert data["group"] == "sym:4"
    assert data["order"] == 24 and data["aut_size"] == 24
    assert data["counts"] == {"2": 22, "3": 236, "4": 860, "5": 24, "6": 0}
    assert data["result"] == 6 and data["status"] == "found"
    assert data["mode"] == "sequential"
    assert data["fingerprint"].startswith("24:")
    assert isinstance(data["wall_time_ms"], float)
    assert "parallel" not in data


def test_json_roundtrip():
    _, text = run_cli("--group", "sym:4", "--mode", "par", "--workers", "2", "--start-depth", "3")
    assert json.dumps(json.loads(text), indent=2) + "\n" == text


def test_parallel_report():
    _, seq = run_json("--group", "sym:4")
    code, par = run_json("--group", "sym:4", "--mode", "par", "--workers", "3", "--start-depth", "4")
    assert code == 0
    assert par["counts"] == seq["counts"] and par["result"] == seq["result"]
    assert par["parallel"]["workers"] == 3
    assert sum(par["parallel"]["worker_tasks"]) == par["parallel"]["tasks"] == 236


def test_limit_exit_code():
    code, data = run_json("--group", "sym:4", "--limit", "4")
    assert code == EXIT_LIMIT
    assert data["result"] is None and data["status"] == "limit_reached"
    code, _ = run_json("--group", "sym:4", "--limit", "4", "--mode", "par", "--start-depth", "3")
    assert code == EXIT_LIMIT


@pytest.mark.parametrize(
    "argv",
    [["--group", "nonsense"], ["--group", "alt:x"], ["--group", "dihedral:2"], ["--group", "sym:3", "--limit", "1"],
     ["--group", "sym:3", "--mode", "par", "--start-depth", "20"], ["--group", "file:/nonexistent"],
     ["--group", "sym:3", "--bogus"], []],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        code, _ = run_cli(*argv)
        raise SystemExit(code)
    assert info.value.code == EXIT_USAGE


def test_resource_errors():
    code, _ = run_cli("--group", "sym:4", "--max-frontier", "50")
    assert code == EXIT_RESOURCE
    code, _ = run_cli("--group", "sym:6", "--order-cap", "100")
    assert code == EXIT_RESOURCE


def test_table_format():
    code, text = run_cli("--group", "sym:3", "--format", "table")
    assert code == 0
    lines = text.splitlines()
    assert "Started enumeration of NRW of length 2" in lines
    assert "3 NRW of length 2 constructed" in lines
    assert "0 NRW of length 4 constructed" in lines
    assert "result: 4" in lines
    assert any(line.startswith("time: 0h 0m") for line in lines)


def test_table_format_failure_and_scaling():
    code, text = run_cli("--group", "sym:4", "--limit", "4", "--format", "table",
                         "--mode", "par", "--start-depth", "3", "--scaling", "1,2")
    assert code == EXIT_LIMIT
    assert "result: fail (limit 4 reached)" in text
    assert "efficiency" in text


def test_scaling_json():
    code, data = run_json("--group", "sym:4", "--mode", "par", "--scaling", "1,2", "--baseline-ms", "100")
    assert code == 0
    assert [row["workers"] for row in data["scaling"]] == [1, 2]
    for row in data["scaling"]:
        assert row["efficiency"] == pytest.approx(row["speedup"] / row["workers"], rel=1e-3)


def test_file_group(tmp_path):
    path = tmp_path / "gens.txt"
    path.write_text("# A4 on four points\n(1,2,3)\n(2,3,4)\n")
    code, data = run_json("--group", f"file:{path}")
    _, builtin = run_json("--group", "alt:4")
    assert code == 0
    assert data["order"] == 12 and data["counts"] == builtin["counts"]


def test_q8_spec():
    assert parse_group_spec("q8").order == 8
    assert parse_group_spec("dihedral:5").order == 10


@pytest.mark.parametrize("mode", ["seq", "par"])
def test_checkpoint_resume(tmp_path, mode):
    _, full = run_json("--group", "sym:3")
    for stop in (2, 3, 4):
        cp = tmp_path / f"cp{stop}.txt"
        run_cli("--group", "sym:3", "--limit", str(stop), "--checkpoint", str(cp))
        code, resumed = run_json("--group", "sym:3", "--resume", str(cp), "--mode", mode, "--start-depth", "2")
        assert code == 0
        assert resumed["counts"] == full["counts"] and resumed["result"] == full["result"]


def test_checkpoint_mismatch(tmp_path):
    cp = tmp_path / "cp.txt"
    run_cli("--group", "sym:4", "--limit", "3", "--checkpoint", str(cp))
    code, _ = run_cli("--group", "alt:4", "--resume", str(cp))
    assert code == EXIT_USAGE


def test_entry_point_and_verbosity():
    proc = subprocess.run(
        [sys.executable, "-m", "rewritelen", "--group", "sym:3", "-v"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"] == 4
    assert "2 NRW of length 3 constructed" in proc.stderr
