import csv
import json
import subprocess
import sys

import pytest

from tfdw_lattice.cli import main
from tfdw_lattice.grids import load_field
from tfdw_lattice.drops import load_drop
from tfdw_lattice.lattice import DistanceKind


def run_cli(args):
    """In-process invocation; returns the exit code."""
    return main(list(args))


def test_no_command_prints_help(capsys):
    assert run_cli([]) == 2
    assert "tfdw-lattice" in capsys.readouterr().out


def test_unknown_flag_is_usage_error():
    proc = subprocess.run(
        [sys.executable, "-m", "tfdw_lattice.cli", "psi-decay", "--bogus", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 2


def test_verify_lemmas_clean(tmp_path, capsys):
    out = tmp_path / "v"
    code = run_cli(["verify-lemmas", "--radius-max", "8", "--lp-instances", "300",
                    "--hls-instances", "300", "--trunc-instances", "30",
                    "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "lemmas.csv")))
    assert [r["check"] for r in rows] == [
        "ball-volume-formula", "lp_monotonicity", "hls_euclidean", "truncation"]
    assert all(r["violations"] == "0" for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "verify-lemmas"
    assert manifest["params"]["radius_max"] == 8


def test_verify_lemmas_graph_kind(tmp_path):
    out = tmp_path / "vg"
    code = run_cli(["verify-lemmas", "--kind", "graph", "--radius-max", "5",
                    "--lp-instances", "100", "--hls-instances", "100",
                    "--trunc-instances", "20", "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "lemmas.csv")))
    assert any(r["check"] == "hls_graph" for r in rows)


def test_verify_lemmas_fault_injection(tmp_path, capsys):
    out = tmp_path / "vf"
    code = run_cli(["verify-lemmas", "--radius-max", "5", "--lp-instances", "10",
                    "--hls-instances", "10", "--trunc-instances", "5",
                    "--inject-fault", "ball-volume-formula", "--out-dir", str(out)])
    assert code == 1
    err = capsys.readouterr().err
    assert "ball-volume-formula" in err


def test_psi_decay_run(tmp_path):
    out = tmp_path / "p"
    code = run_cli(["psi-decay", "--n-max", "8", "--mass", "10", "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "psi_decay.csv")))
    assert len(rows) == 8
    assert list(rows[0]) == ["n", "kinetic", "tf", "dirac", "coulomb", "total",
                             "a_over_b", "e_over_b"]
    assert (out / "psi_decay.png").exists()


def test_psi_decay_short_table_no_trend(tmp_path):
    out = tmp_path / "p2"
    assert run_cli(["psi-decay", "--n-max", "2", "--mass", "1",
                    "--out-dir", str(out)]) == 0
    assert len(list(csv.DictReader(open(out / "psi_decay.csv")))) == 2


def test_psi_decay_usage_errors(tmp_path, capsys):
    assert run_cli(["psi-decay", "--n-max", "5", "--mass", "0",
                    "--out-dir", str(tmp_path / "x")]) == 2
    assert "--mass" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        run_cli(["psi-decay", "--mass", "1"])  # missing --n-max
    assert exc.value.code == 2


def test_tfdw_run_outputs(tmp_path):
    out = tmp_path / "t"
    code = run_cli(["tfdw", "--mass", "0.4", "--box", "4", "--out-dir", str(out)])
    assert code == 0
    field, kind = load_field(out / "final_field.txt")
    assert kind is DistanceKind.EUCLIDEAN
    assert field.mass == pytest.approx(0.4, rel=1e-10)
    rows = list(csv.DictReader(open(out / "trajectory.csv")))
    assert list(rows[0]) == ["iter", "total", "kinetic", "tf", "dirac",
                             "coulomb", "step", "residual"]
    totals = [float(r["total"]) for r in rows]
    assert all(b <= a + 1e-12 for a, b in zip(totals, totals[1:]))
    diag = {r["key"]: r["value"] for r in csv.DictReader(open(out / "diagnostics.csv"))}
    assert diag["termination"] == "converged"


def test_tfdw_deterministic_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_cli(["tfdw", "--mass", "0.3", "--box", "3",
                        "--out-dir", str(out)]) == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert (a / "final_field.txt").read_bytes() == (b / "final_field.txt").read_bytes()


def test_tfdw_manifest_round_trip(tmp_path):
    first = tmp_path / "f"
    assert run_cli(["tfdw", "--mass", "0.3", "--box", "3", "--out-dir", str(first)]) == 0
    second = tmp_path / "s"
    assert run_cli(["tfdw", "--mass", "0.3", "--box", "3",
                    "--config", str(first / "manifest.json"),
                    "--out-dir", str(second)]) == 0
    assert (first / "trajectory.csv").read_bytes() == (second / "trajectory.csv").read_bytes()


def test_tfdw_scan_outputs(tmp_path):
    out = tmp_path / "scan"
    code = run_cli(["tfdw-scan", "--masses", "0.1,0.3", "--splits", "0.1",
                    "--box", "4", "--separation", "4", "--max-iters", "800",
                    "--tol-residual", "1e-4", "--out-dir", str(out)])
    assert code == 0
    sub = list(csv.DictReader(open(out / "subadditivity.csv")))
    assert len(sub) == 1 and float(sub[0]["m1"]) == 0.1
    split = list(csv.DictReader(open(out / "splitting.csv")))
    assert [float(r["mass"]) for r in split] == [0.1, 0.3]
    assert (out / "splitting_advantage.png").exists()


def test_tfdw_scan_mass_grid_syntax(tmp_path):
    out = tmp_path / "grid"
    code = run_cli(["tfdw-scan", "--masses", "0.1:0.4:3", "--box", "3",
                    "--separation", "3", "--max-iters", "400",
                    "--tol-residual", "1e-3", "--out-dir", str(out)])
    assert code == 0
    split = list(csv.DictReader(open(out / "splitting.csv")))
    assert len(split) == 3


def test_tfdw_usage_errors(tmp_path):
    assert run_cli(["tfdw", "--mass", "-1", "--box", "4",
                    "--out-dir", str(tmp_path / "x")]) == 2
    assert run_cli(["tfdw-scan", "--masses", "0,1", "--box", "4",
                    "--out-dir", str(tmp_path / "y")]) == 2


def test_drop_matches_oracle(tmp_path):
    out = tmp_path / "d"
    code = run_cli(["drop", "--volume", "5", "--out-dir", str(out)])
    assert code == 0
    cells, kind = load_drop(out / "best_drop.txt")
    assert len(cells) == 5
    rows = list(csv.DictReader(open(out / "energy.csv")))
    assert float(rows[0]["total"]) == pytest.approx(17.833333333333332)


def test_drop_usage_error(tmp_path):
    assert run_cli(["drop", "--volume", "0", "--out-dir", str(tmp_path / "x")]) == 2


def test_drop_scaling_outputs(tmp_path):
    out = tmp_path / "ds"
    code = run_cli(["drop-scaling", "--volumes", "8,16", "--sweeps", "60",
                    "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "drop_scaling.csv")))
    assert [r["V"] for r in rows] == ["8", "16"]
    assert all(r["connected"] == "true" for r in rows)
    assert (out / "drop_scaling.png").exists()
    assert (out / "subadditivity.csv").exists()


def test_console_script_installed():
    proc = subprocess.run(["tfdw-lattice", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "drop-scaling" in proc.stdout
