"""End-to-end checks of the batch CLI: exit codes, envelopes, determinism."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from mmqo import detection, gaussian, modal, sources
from mmqo.cli import main
from mmqo.serialize import state_to_json


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def epr_state(sigma2=0.25):
    cov0 = np.diag([sigma2, 1.0 / sigma2, 1.0 / sigma2, sigma2])
    st = gaussian.GaussianState(np.zeros(4), cov0)
    u = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    return gaussian.apply_symplectic(st, modal.unitary_to_orthogonal(u))


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# Success paths
# ---------------------------------------------------------------------------

def test_decompose_reports_all_factorizations(tmp_path, capsys):
    path = write_json(tmp_path / "epr.json", state_to_json(epr_state()))
    code, out, err = run_cli(capsys, ["decompose", "--in", path])
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert payload["n_modes"] == 2
    assert payload["purity"] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(payload["WilliamsonFactors"]["kappas"], [1.0, 1.0])
    # one squeeze factor >= 1 per mode; both EPR arms carry r = ln 2
    k = np.array(payload["BlochMessiahFactors"]["K"])
    assert np.allclose(k, [2.0, 2.0], atol=1e-9)
    assert "IntrinsicSeparation" in payload


def test_hom_values(capsys):
    code, out, _ = run_cli(capsys, ["detect", "hom", "--overlap", "1.0",
                                    "--phi", "0.0"])
    assert code == 0
    assert json.loads(out)["g2"] == pytest.approx(0.0, abs=1e-15)
    code, out, _ = run_cli(capsys, ["detect", "hom", "--overlap", "0.0"])
    assert json.loads(out)["g2"] == pytest.approx(0.5, abs=1e-15)
    code, out, _ = run_cli(capsys, ["detect", "hom", "--overlap", "1.0",
                                    "--phi", "0.3", "--coherent"])
    assert json.loads(out)["g2"] == pytest.approx(
        detection.hom_coherent(1.0, 0.3), abs=1e-15)


def test_channel_writes_state_to_file(tmp_path, capsys):
    src = write_json(tmp_path / "vac.json",
                     state_to_json(gaussian.standard_state("vacuum", 1)))
    dst = tmp_path / "out.json"
    code, out, err = run_cli(capsys, ["channel", "--in", src, "--gain", "0.5",
                                      "--out", str(dst)])
    assert code == 0 and out == "" and err == ""
    payload = json.loads(dst.read_text())
    assert np.allclose(payload["cov"], np.eye(2))
    assert np.allclose(payload["mean"], 0.0)


def test_source_spopo_defaults_to_csv(capsys):
    code, out, _ = run_cli(capsys, ["source", "spopo", "--lambdas", "1.0,0.5",
                                    "--r", "0.5"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,lambda,delta_x2"
    assert len(lines) == 3
    expected = sources.spopo_squeezing(np.array([1.0, 0.5]), 0.5)
    got = [float(line.split(",")[2]) for line in lines[1:]]
    assert np.allclose(got, expected, rtol=1e-15)


def test_source_pdc_from_file(tmp_path, capsys):
    path = write_json(tmp_path / "g.json", {"g": [[0.0, 0.3], [0.3, 0.0]]})
    code, out, _ = run_cli(capsys, ["source", "pdc", "--g", path,
                                    "--gain", "1.0"])
    assert code == 0
    payload = json.loads(out)
    assert np.allclose(payload["lambdas"], [0.3, 0.3])
    assert payload["state"]["n_modes"] == 2


def test_degauss_negativity(tmp_path, capsys):
    path = write_json(tmp_path / "vac.json",
                      state_to_json(gaussian.standard_state("vacuum", 1)))
    code, out, _ = run_cli(capsys, ["degauss", "--in", path, "--sign", "add",
                                    "--mode", "[1.0]", "--negativity"])
    assert code == 0
    payload = json.loads(out)
    assert payload["value_at_origin"] == pytest.approx(-1.0 / (2 * np.pi),
                                                       abs=1e-12)
    assert payload["origin_sign"] == "negative"
    assert payload["log_negativity"] == pytest.approx(
        math.log(4.0 * math.exp(-0.5) - 1.0), abs=1e-3)


def test_metrology_squeezed_improvement(capsys):
    code, out, _ = run_cli(capsys, ["metrology", "--model", "mz",
                                    "--photons", "100", "--squeeze-db", "10"])
    assert code == 0
    payload = json.loads(out)
    assert payload["a0"] == pytest.approx(2.0, abs=1e-9)
    assert payload["bound_coherent"] == pytest.approx(0.1, abs=1e-10)
    assert payload["improvement"] == pytest.approx(10.0 ** 0.5, rel=1e-10)


def chain_v(n):
    v = np.zeros((n, n))
    for i in range(n - 1):
        v[i, i + 1] = v[i + 1, i] = 1.0
    return v


def test_cluster_nullifiers_and_loss(tmp_path, capsys):
    path = write_json(tmp_path / "v.json", {"v": chain_v(4).tolist()})
    sigma = repr(math.sqrt(10.0))
    code, out, _ = run_cli(capsys, ["cluster", "--v", path, "--sigma", sigma])
    assert code == 0
    payload = json.loads(out)
    assert np.allclose(payload["nullifier_variances"], 0.1, atol=1e-10)
    assert payload["unitary_residual"] < 1e-10

    code, out, _ = run_cli(capsys, ["cluster", "--v", path, "--sigma", sigma,
                                    "--loss", "0.5"])
    payload = json.loads(out)
    # survival 0.5: 0.5/sigma^2 + 0.5 * diag(I + V V^T)
    degree = np.array([1.0, 2.0, 2.0, 1.0])
    assert np.allclose(payload["nullifier_variances"],
                       0.05 + 0.5 * (1.0 + degree), atol=1e-10)


# ---------------------------------------------------------------------------
# Schedule / reconstruct round trip through the table format
# ---------------------------------------------------------------------------

def schedule_table(st):
    variances = {}
    for label, lo, phi in detection.homodyne_schedule(st.n_modes):
        deg = int(round(math.degrees(phi)))
        if label[0] == "m":
            key = "m:%d:%d" % (label[1], deg)
        else:
            key = "%s:%d,%d:%d" % (label[0], label[1], label[2], deg)
        variances[key] = detection.homodyne_variance(st, lo, phi)
    return {"n_modes": st.n_modes, "variances": variances}


def test_schedule_lists_table_keys(capsys):
    code, out, _ = run_cli(capsys, ["detect", "schedule", "--modes", "2"])
    assert code == 0
    payload = json.loads(out)
    assert payload["n_modes"] == 2
    assert len(payload["keys"]) == 2 * (2 * 2 + 1)
    assert "m:0:0" in payload["keys"]
    assert "s:0,1:0" in payload["keys"]
    assert "i:0,1:90" in payload["keys"]


def test_reconstruct_from_measured_table(tmp_path, capsys):
    st = epr_state()
    path = write_json(tmp_path / "table.json", schedule_table(st))
    code, out, _ = run_cli(capsys, ["detect", "reconstruct",
                                    "--table", path])
    assert code == 0
    cov = np.array(json.loads(out)["cov"])
    assert np.max(np.abs(cov - st.cov)) < 1e-10


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def test_sweep_duan_gain_csv(capsys):
    code, out, _ = run_cli(capsys, ["sweep", "--scenario", "duan-gain",
                                    "--start", "0.5", "--stop", "1.0",
                                    "--step", "0.25", "--sigma2", "0.25"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "gain,duan_product,entangled"
    assert len(lines) == 4
    last = lines[-1].split(",")
    # lossless EPR probe: product sigma^4, clearly entangled
    assert float(last[1]) == pytest.approx(0.25 ** 2, rel=1e-12)
    assert last[2] == "true"


def test_sweep_json_envelope(capsys):
    code, out, _ = run_cli(capsys, ["sweep", "--scenario", "hom-phi",
                                    "--start", "0.0", "--stop", "1.5708",
                                    "--step", "0.7854", "--overlap", "1.0",
                                    "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["header"] == ["phi", "g2"]
    assert len(payload["rows"]) == 3
    assert payload["rows"][0][1] == pytest.approx(0.0, abs=1e-12)


def test_sweep_qcr_budget_monotone(capsys):
    code, out, _ = run_cli(capsys, ["sweep", "--scenario", "qcr-budget",
                                    "--start", "1", "--stop", "3",
                                    "--step", "1"])
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    bounds = [float(r[2]) for r in rows]
    assert bounds == sorted(bounds, reverse=True)
    # splitting the budget must beat spending it all on the mean field
    for n, _, b in (map(float, r) for r in rows):
        assert b < 2.0 / (2.0 * math.sqrt(n))


# ---------------------------------------------------------------------------
# Failure envelopes and determinism
# ---------------------------------------------------------------------------

def test_domain_error_exit_code(tmp_path, capsys):
    path = write_json(tmp_path / "vac.json",
                      state_to_json(gaussian.standard_state("vacuum", 1)))
    code, out, err = run_cli(capsys, ["channel", "--in", path,
                                      "--gain", "-1.0"])
    assert code == 1 and out == ""
    envelope = json.loads(err)
    assert envelope["code"] == "InvalidGain"
    assert set(envelope) == {"code", "message", "context"}


def test_usage_error_exit_code(tmp_path, capsys):
    code, _, err = run_cli(capsys, ["detect", "hom"])
    assert code == 2
    assert json.loads(err)["code"] == "UsageError"
    code, _, err = run_cli(capsys, ["decompose", "--in",
                                    str(tmp_path / "missing.json")])
    assert code == 2


def test_argparse_rejects_unknown_command(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_output_is_byte_identical_across_runs(tmp_path, capsys):
    path = write_json(tmp_path / "epr.json", state_to_json(epr_state()))
    _, first, _ = run_cli(capsys, ["decompose", "--in", path])
    _, second, _ = run_cli(capsys, ["decompose", "--in", path])
    assert first == second


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "mmqo.cli", "detect", "hom",
         "--overlap", "0.5", "--phi", "0.0"],
        capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    g2 = json.loads(proc.stdout)["g2"]
    assert g2 == pytest.approx(detection.hom_single_photon(0.5, 0.0),
                               abs=1e-15)
