import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from hofa import io
from hofa.cli import main
from hofa.fourier_ops import apply_K_eps
from hofa.gowers import uk_norm_direct
from hofa.group import GroupSpec

from conftest import bounded_function, quadratic_phase


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 else None), out.err


@pytest.fixture
def phase_csv(tmp_path):
    path = tmp_path / "f.csv"
    io.write_function_csv(path, quadratic_phase(64))
    return path


def test_gowers_and_oracle_agree(tmp_path, capsys, rng):
    g = GroupSpec((10,))
    f = bounded_function(g, rng)
    path = tmp_path / "f.csv"
    io.write_function_csv(path, f)
    code, fast, _ = run(capsys, "gowers", "--in", str(path), "--group", "Z10", "--k", "3")
    code2, slow, _ = run(capsys, "oracle", "--in", str(path), "--group", "Z10", "--k", "3")
    assert code == code2 == 0
    assert abs(fast["result"]["norm"] - slow["result"]["norm"]) <= 1e-9
    assert abs(slow["result"]["norm"] - uk_norm_direct(f, 3)) <= 1e-12


def test_character_u2_is_one(tmp_path, capsys):
    path = tmp_path / "chi.csv"
    io.write_function_csv(path, GroupSpec((2, 4)).character(3))
    code, rep, _ = run(capsys, "gowers", "--in", str(path), "--group", "Z2xZ4", "--k", "2")
    assert code == 0 and abs(rep["result"]["norm"] - 1) < 1e-12
    assert rep["group"] == "Z2xZ4" and rep["tool"] == "hofa"


def test_transform_parseval(tmp_path, capsys, phase_csv):
    out = tmp_path / "c.csv"
    code, rep, _ = run(capsys, "transform", "--in", str(phase_csv), "--group", "Z64", "--out", str(out))
    assert code == 0 and abs(rep["result"]["parseval_l2"] - 1) < 1e-12
    coeffs = io.read_function_csv(out, GroupSpec((64,)))
    np.testing.assert_allclose(coeffs.values, np.fft.fft(quadratic_phase(64).values) / 64, atol=1e-14)


def test_denoise_and_spectrum(tmp_path, capsys, phase_csv):
    out = tmp_path / "g.csv"
    code, rep, _ = run(capsys, "denoise", "--in", str(phase_csv), "--group", "Z64", "--eps", "0.1", "--out", str(out))
    expected = apply_K_eps(quadratic_phase(64), 0.1)
    assert code == 0 and abs(rep["result"]["output_l2"] - expected.norm()) < 1e-12
    assert io.read_function_csv(out, GroupSpec((64,))).allclose(expected, atol=1e-15)
    npz = tmp_path / "eig.npz"
    code, rep, _ = run(capsys, "spectrum", "--in", str(phase_csv), "--group", "Z64", "--eps", "0.1",
                       "--top", "3", "--save", str(npz))
    assert code == 0 and abs(rep["result"]["top_eigenvalues"][0] - 0.9) < 1e-10
    assert io.load_decomposition(npz).eigenvalues.size == 64


def test_regularize_and_certify(tmp_path, capsys, phase_csv):
    out = tmp_path / "r.csv"
    report = tmp_path / "rep.json"
    code, rep, _ = run(capsys, "--report", str(report), "regularize", "--in", str(phase_csv), "--group", "Z64",
                       "--eps", "0.1", "--rho", "0.5", "--out", str(out))
    assert code == 0 and rep["result"]["kept_count"] == 1
    assert json.loads(report.read_text()) == rep
    code, rep, _ = run(capsys, "certify", "--in", str(out), "--group", "Z64", "--order", "2", "--R", "1")
    assert code == 0 and rep["result"]["delta"] < 1e-9
    code, rep, _ = run(capsys, "certify", "--in", str(phase_csv), "--group", "Z64", "--order", "1")
    c = np.sort(np.abs(np.fft.fft(quadratic_phase(64).values) / 64) ** 2)
    assert code == 0 and abs(rep["result"]["delta"] - np.sqrt(c[:-1].sum())) < 1e-12


def test_qchar_writes_vectors(tmp_path, capsys, phase_csv):
    out = tmp_path / "v.csv"
    code, rep, _ = run(capsys, "qchar", "--in", str(phase_csv), "--group", "Z64", "--eps", "0.05", "--rho", "0.2",
                       "--delta", "0.05", "--seed", "1", "--out", str(out))
    assert code == 0 and rep["result"]["success"] and rep["seed"] == 1
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "v1_re", "v1_im"] and len(rows) == 65


def test_demo_denoise_small(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    code, rep, _ = run(capsys, "demo-denoise", "--n", "64", "--out", str(out))
    assert code == 0 and rep["result"]["rows"] == 64
    assert len(out.read_text().splitlines()) == 65


@pytest.mark.parametrize("argv", [
    ["gowers", "--in", "{f}", "--group", "Z8"],                     # row count mismatch
    ["gowers", "--in", "{f}", "--group", "Zq"],                     # bad group
    ["gowers", "--in", "/nonexistent.csv", "--group", "Z64"],
    ["gowers", "--in", "{f}", "--group", "Z64", "--k", "0"],
    ["denoise", "--in", "{f}", "--group", "Z64", "--eps", "-1", "--out", "x.csv"],
    ["regularize", "--in", "{f}", "--group", "Z64", "--eps", "0.1", "--rho", "2"],
    ["--threads", "0", "gowers", "--in", "{f}", "--group", "Z64"],
])
def test_invalid_input_exit_code(capsys, phase_csv, argv):
    argv = [a.replace("{f}", str(phase_csv)) for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_certify_order2_bad_r(capsys, phase_csv):
    code, _, _ = run(capsys, "certify", "--in", str(phase_csv), "--group", "Z64", "--order", "2", "--R", "-1")
    assert code == 2


def test_module_entry_point(tmp_path, phase_csv):
    proc = subprocess.run([sys.executable, "-m", "hofa", "--threads", "1", "gowers", "--in", str(phase_csv),
                           "--group", "Z64", "--k", "3"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert abs(json.loads(proc.stdout)["result"]["norm"] - 1) < 1e-12
