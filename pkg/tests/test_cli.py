import json

import numpy as np
import pytest

from pencilkit import Diagonal, Identity, L2N, Pencil, WeightRule, save_pencil
from pencilkit.cli import EXIT_INPUT, EXIT_OK, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def pencil_file(tmp_path):
    p = Pencil(E=Identity(L2N), A=Diagonal(L2N, WeightRule("reciprocal_index")))
    path = tmp_path / "pencil.json"
    save_pencil(p, str(path))
    return str(path)


def test_examples_list(capsys):
    code, out, _ = _run(capsys, "examples", "list")
    assert code == EXIT_OK
    assert "kronecker_L" in out and "caveat-only" in out


def test_examples_run_single(capsys):
    code, out, _ = _run(capsys, "examples", "run", "kronecker_L")
    assert code == EXIT_OK
    assert "overall: pass" in out and "[pass]" in out


def test_examples_run_unknown_fixture(capsys):
    code, _, err = _run(capsys, "examples", "run", "nope")
    assert code == EXIT_INPUT and "unknown fixture" in err


def test_missing_file_is_input_error(capsys):
    code, _, err = _run(capsys, "analyze", "/does/not/exist.json")
    assert code == EXIT_INPUT and "file not found" in err


def test_analyze_pencil_file(capsys, pencil_file):
    code, out, _ = _run(capsys, "analyze", pencil_file, "--n", "4")
    assert code == EXIT_OK
    assert "lambda=0+0i" in out and "verdict=" in out
    assert "stacked sigma_min certificate" in out


def test_analyze_caveat_only_fixture_rejected(capsys):
    code, _, err = _run(capsys, "analyze", "--fixture", "symmetric_not_sa_note")
    assert code == EXIT_INPUT and "caveat-only" in err


def test_spectra_csv(capsys, pencil_file):
    code, out, _ = _run(
        capsys, "spectra", pencil_file, "--rect=0,1,0,1", "--steps", "2,2", "--n", "3"
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "re,im,sigma_min,sigma_min_adjoint,verdict"
    assert len(lines) == 5
    # lam = 1 is an eigenvalue of diag(1/j) with E = I
    row = dict(zip(lines[0].split(","), lines[3].split(",")))
    assert row["re"] == "1" and row["verdict"] == "point_singular"


def test_chains_json(capsys):
    code, out, _ = _run(capsys, "chains", "--fixture", "kronecker_L", "--n", "4")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["right"]["minimal_index"] == 2
    assert rep["left"] is None
    assert rep["right"]["verify_residual"] <= 1e-12


def test_approx_csv(capsys):
    code, out, _ = _run(
        capsys, "approx", "--fixture", "approxchain", "--n-values", "1,2", "--probes", "0,1"
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("n,probe_re,probe_im,fwd_residual")
    assert len(lines) == 5


def test_distance_csv_with_caveat_notes(capsys):
    code, out, _ = _run(
        capsys, "distance", "--fixture", "bilateral_weighted", "--sections", "2,4"
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("# note:")
    assert "n,stacked_sigma_min,witness_support_center" in lines


def test_distance_values(capsys):
    code, out, _ = _run(
        capsys, "distance", "--fixture", "diag_reciprocal", "--sections", "2,4"
    )
    lines = out.strip().splitlines()
    vals = {int(r.split(",")[0]): float(r.split(",")[1]) for r in lines[1:]}
    assert vals[2] == pytest.approx(np.sqrt(2) / 2, abs=1e-13)
    assert vals[4] == pytest.approx(np.sqrt(2) / 4, abs=1e-13)


def test_dh_check_table(capsys):
    code, out, _ = _run(capsys, "dh-check", "--fixture", "stokes_skeleton")
    assert code == EXIT_OK
    assert "structure: ok" in out
    assert "classification: point_singular" in out


def test_dh_check_requires_metadata(capsys, pencil_file):
    code, _, err = _run(capsys, "dh-check", pencil_file)
    assert code == EXIT_INPUT and "no dissipative-Hamiltonian metadata" in err


def test_simulate_series_fixture(capsys):
    code, out, _ = _run(
        capsys, "simulate", "--fixture", "shift_identity", "--order", "8",
        "--samples", "3", "--window", "2",
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("t,x1_re,x2_re")
    assert len(lines) == 4


def test_simulate_unsupported_fixture(capsys):
    code, _, err = _run(capsys, "simulate", "--fixture", "kronecker_L")
    assert code == EXIT_INPUT and "no simulation recipe" in err


def test_bad_arguments_exit_2(capsys):
    assert main(["spectra", "--steps"]) == EXIT_INPUT
    assert main(["no-such-command"]) == EXIT_INPUT


def test_output_file_option(tmp_path, capsys):
    target = tmp_path / "out.txt"
    code, out, _ = _run(capsys, "examples", "list", "--out", str(target))
    assert code == EXIT_OK and out == ""
    assert "kronecker_L" in target.read_text()


def test_repeated_invocations_are_byte_identical(capsys):
    _, out1, _ = _run(capsys, "examples", "run", "poroelasticity_template")
    _, out2, _ = _run(capsys, "examples", "run", "poroelasticity_template")
    assert out1 == out2
