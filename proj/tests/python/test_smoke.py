import json
import os
import subprocess

import numpy as np
import pytest

import covsep


def test_bell_is_detected_everywhere():
    bell = covsep.maximally_entangled(2)
    assert covsep.ppt_test(bell).details["min_eigenvalue"] == pytest.approx(-0.5, abs=1e-12)
    assert covsep.ccnr_test(bell).detected
    assert covsep.prop4_test(bell).detected
    assert covsep.prop3_test(bell).left == pytest.approx(3.0, abs=1e-10)
    fnf = covsep.to_fnf(bell)
    np.testing.assert_allclose(fnf.xi, [2.0, 2.0, 2.0], atol=1e-10)
    assert covsep.prop6_test(fnf).detected
    assert covsep.qubit_cmc_feasibility(bell).verdict.detected


def test_density_matrix_from_numpy_validates():
    with pytest.raises(covsep.ValidationError):
        covsep.DensityMatrix(2, 2, np.eye(4, dtype=complex))
    rho = covsep.DensityMatrix(2, 2, np.eye(4, dtype=complex) / 4)
    assert not covsep.ppt_test(rho).detected


def test_realignment_singular_values_sum_to_ccnr_left():
    rho = covsep.random_density_matrix(2, 3, 6, 11)
    s = np.linalg.svd(covsep.realign(rho), compute_uv=False)
    assert covsep.ccnr_test(rho).left == pytest.approx(s.sum(), abs=1e-10)


def test_lur_extraction_round_trip():
    rho = covsep.werner_state(0.9)
    feas = covsep.qubit_cmc_feasibility(rho)
    lur = covsep.extract_lur_witness(rho, feas)
    assert lur is not None and lur.certified
    lhs, rhs = covsep.lur_violation(rho, lur)
    assert lhs < rhs - 1e-9


def test_state_text_round_trip():
    rho = covsep.random_density_matrix(3, 3, 9, 5)
    text = covsep.format_state(rho)
    assert covsep.format_state(covsep.parse_state(text)) == text


def test_analyze_report():
    report = covsep.analyze(covsep.werner_state(0.2), "ppt,prop6")
    assert report["schema_version"] == 1
    assert [v["detected"] for v in report["verdicts"]] == [False, False]


def test_singular_reduction_raises():
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1
    with pytest.raises(covsep.SingularReducedState):
        covsep.to_fnf(covsep.DensityMatrix(2, 2, np.outer(psi, psi.conj())))


@pytest.mark.skipif("COVSEP_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["COVSEP_CLI"]
    path = tmp_path / "mm.json"
    path.write_text(covsep.format_state(covsep.maximally_mixed(3, 3)))
    bad = subprocess.run([cli, "analyze", "--state", str(path), "--criteria", "cmc-sdp"],
                         capture_output=True, text=True)
    assert bad.returncode == 1
    assert "cmc-sdp requires 2x2" in bad.stderr
    ok = subprocess.run([cli, "analyze", "--state", str(path), "--json"],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    assert not any(v["detected"] for v in json.loads(ok.stdout)["verdicts"])
