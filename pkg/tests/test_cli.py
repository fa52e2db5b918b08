import json
import math
import subprocess
import sys

import pytest

from nonrecip.cli import main
from nonrecip.scattering import dispersion, k_grid


def run(tmp_path, *argv):
    out = tmp_path / "artifact"
    code = main([*argv, "--out", str(out)])
    return code, out


def test_dynamics_row_count(tmp_path):
    code, out = run(tmp_path, "dynamics", "--phi", "1.5707963267948966", "--t-max", "2", "--steps", "401")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "axis,t_ab,t_ba,isolation"
    assert len(lines) == 402


def test_dynamics_json_and_effective(tmp_path):
    code, out = run(tmp_path, "dynamics", "--phi-over-pi", "-0.5", "--steps", "11", "--format", "json",
                    "--model", "effective")
    assert code == 0
    d = json.loads(out.read_text())
    assert d["model"] == "effective" and len(d["points"]) == 11


def test_dynamics_params_inline(tmp_path):
    params = json.dumps({"omega_ab": 0.5, "gamma_c": 50.0})
    code, out = run(tmp_path, "dynamics", "--params", params, "--steps", "5")
    assert code == 0
    params_file = tmp_path / "p.json"
    params_file.write_text(params)
    code, out2 = run(tmp_path, "dynamics", "--params", str(params_file), "--steps", "5")
    assert code == 0 and out.read_text() == out2.read_text()


def test_sweep_flux(tmp_path):
    code, out = run(tmp_path, "sweep-flux", "--count", "73")
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 74
    assert float(lines[1].split(",")[0]) == -math.pi


def test_scattering(tmp_path):
    code, out = run(tmp_path, "scattering", "--k-count", "199")
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 199
    assert max(float(r.split(",")[3]) for r in rows) >= 0.999


def test_scattering_verbose_json(tmp_path):
    code, out = run(tmp_path, "scattering", "--k-count", "5", "--format", "json", "-v", "--incident", "b")
    assert code == 0
    d = json.loads(out.read_text())
    assert d["incident"] == "b" and "scattering" in d["rows"][0]


def test_fwhm(tmp_path):
    code, out = run(tmp_path, "fwhm", "--eta", "0.5")
    assert code == 0
    d = json.loads(out.read_text())
    assert abs(d["delta_k_over_pi"] - 0.81) <= 0.005
    assert abs(d["delta_k"] - d["delta_k_numeric"]) < 1e-10


def test_verify(tmp_path, capsys):
    code, out = run(tmp_path, "verify")
    assert code == 0
    d = json.loads(out.read_text())
    assert d["all_pass"] and len(d["checks"]) >= 8
    assert "PASS" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["dynamics", "--steps", "1"],
    ["dynamics", "--t-max", "-1"],
    ["dynamics", "--params", '{"nu": 1}'],
    ["dynamics", "--params", "{broken"],
    ["dynamics", "--params", "/nonexistent/file.json"],
    ["dynamics", "--phi", "1", "--phi-over-pi", "1"],
    ["sweep-flux", "--count", "2"],
    ["scattering", "--k-count", "2"],
    ["scattering", "--eta", "-1"],
    ["fwhm", "--eta", "0"],
    ["dynamics", "--format", "xml"],
    ["teleport"],
])
def test_invalid_config_exits_2(tmp_path, argv):
    code, out = run(tmp_path, *argv)
    assert code == 2
    assert not out.exists()


def test_bad_thread_env_exits_2(tmp_path, monkeypatch):
    monkeypatch.setenv("NONRECIP_THREADS", "lots")
    code, _ = run(tmp_path, "fwhm")
    assert code == 2


def test_numeric_failure_exits_3(tmp_path):
    # lossless atom resonant exactly at the first grid energy
    energy = dispersion(k_grid(3)[0], 1.0, 0.0)
    params = json.dumps({"xi_a": 1.0, "xi_b": 1.0, "g_a": 0.5, "g_b": 0.5,
                         "atom": {"delta_a": energy, "delta_b": energy}})
    code, out = run(tmp_path, "scattering", "--params", params, "--k-count", "3")
    assert code == 3
    assert not out.exists()


def test_byte_identical_reruns(tmp_path, monkeypatch):
    texts = []
    for threads in ("1", "4", "4"):
        monkeypatch.setenv("NONRECIP_THREADS", threads)
        code, out = run(tmp_path, "sweep-flux", "--count", "61", "--t", "0.7")
        assert code == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_console_entry_point(tmp_path):
    out = tmp_path / "f.json"
    proc = subprocess.run([sys.executable, "-m", "nonrecip", "fwhm", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "delta_k/pi=0.807" in proc.stdout
    assert out.exists()
