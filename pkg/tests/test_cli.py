import json
import subprocess
import sys

import pytest

from klsym.cli import main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_compute_cell(capsys):
    code, out, _ = run_cli(capsys, ["compute", "--p", "5", "--k", "3"])
    assert code == 0
    record = json.loads(out)
    assert record["coeffs"] == ["1", "25"]
    assert record["c_computed"] == "25" == record["c_closed"]
    assert record["delta"] == 1
    assert record["ok"] is True
    expected = {"integrality", "truncation_or_fe", "functional_equation",
                "c_squared", "c_closed_form", "purity"}
    assert set(record["checks"]) == expected
    assert all(c["pass"] for c in record["checks"].values())


def test_compute_trivial_cell(capsys):
    code, out, _ = run_cli(capsys, ["compute", "--p", "3", "--k", "1"])
    assert code == 0
    record = json.loads(out)
    assert record["coeffs"] == ["1"]
    assert record["c_computed"] == "1"


def test_compute_rejects_even_characteristic(capsys):
    code, out, err = run_cli(capsys, ["compute", "--p", "2", "--k", "3"])
    assert code == 2
    assert out == ""
    assert "odd prime" in err


def test_compute_output_is_deterministic(capsys):
    _, first, _ = run_cli(capsys, ["compute", "--p", "5", "--k", "5"])
    _, second, _ = run_cli(capsys, ["compute", "--p", "5", "--k", "5"])
    assert first == second


def test_verify_identities_small(capsys):
    code, out, _ = run_cli(capsys, ["verify", "--identities",
                                    "--pmax", "13", "--kmax", "8"])
    assert code == 0
    summary = json.loads(out)
    assert summary["mode"] == "identities"
    assert summary["failures"] == []
    assert summary["cells"] == 5 * 8


def test_verify_full_small(capsys):
    code, out, _ = run_cli(capsys, ["verify", "--full", "--pset", "3,5",
                                    "--kmax", "4"])
    assert code == 0
    summary = json.loads(out)
    assert summary["failures"] == []
    assert summary["cells"] == 8
    for rec in summary["records"]:
        assert rec["ok"] is True


def test_verify_full_filters_cells_over_budget(capsys):
    # the guard rule wants depth 2 for delta 0 cells at p = 3, so a pair
    # budget of 50 leaves nothing runnable
    code, out, _ = run_cli(capsys, ["verify", "--full", "--pset", "3",
                                    "--kmax", "2", "--budget", "50"])
    assert code == 0
    assert json.loads(out)["cells"] == 0


def test_compute_explicit_guard_over_budget(capsys):
    code, _, err = run_cli(capsys, ["compute", "--p", "13", "--k", "7",
                                    "--guard", "4", "--budget", "1000"])
    assert code == 2
    assert "budget" in err


def test_compute_guard_zero_uses_functional_equation_certificate(capsys):
    code, out, _ = run_cli(capsys, ["compute", "--p", "5", "--k", "3",
                                    "--guard", "0"])
    assert code == 0
    record = json.loads(out)
    assert "functional equation" in record["checks"]["truncation_or_fe"]["detail"]


def test_verify_rejects_composite_pset(capsys):
    code, _, err = run_cli(capsys, ["verify", "--full", "--pset", "4"])
    assert code == 2
    assert "odd primes" in err


def test_verify_needs_a_mode(capsys):
    code, _, _ = run_cli(capsys, ["verify"])
    assert code == 2


def test_scan_small(capsys):
    code, out, _ = run_cli(capsys, ["scan", "--k", "7", "--pmax", "13"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "p,delta,c,sign_c,evans_sign,match,a_p"
    assert len(lines) == 3
    assert lines[1].startswith("11,3,3138428376721,1,1,true,")
    assert lines[2].startswith("13,3,-23298085122481,-1,-1,true,")


def test_scan_json_emission(capsys):
    code, out, _ = run_cli(capsys, ["scan", "--k", "7", "--pmax", "11",
                                    "--emit", "json"])
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["p"] == 11 and rows[0]["match"] is True


def test_scan_rejects_other_k(capsys):
    code, _, err = run_cli(capsys, ["scan", "--k", "5", "--pmax", "20"])
    assert code == 2
    assert "k in (7, 11)" in err


def test_scan_resource_exit_without_slow(capsys):
    # k = 11 rows are beyond the standard budget tier
    code, out, _ = run_cli(capsys, ["scan", "--k", "11", "--pmax", "13"])
    assert code == 2
    lines = out.strip().split("\n")
    assert lines[1].startswith("13,5,,")  # row recorded without values


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "klsym.cli", "compute", "--p", "3", "--k", "2"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["coeffs"] == ["1"]


@pytest.mark.parametrize("argv", [["compute", "--p", "7"], ["nonsense"]])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
