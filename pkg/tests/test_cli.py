"""Batch front end: outputs, manifests, config handling, determinism."""

import json
import os

import numpy as np
import pytest

from iontrap_lab.cli import dispatch


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return header, rows


class TestStability:
    def test_grid_output(self, tmp_path):
        out = tmp_path / "stability.csv"
        code = dispatch([
            "stability", "--a-min", "-0.2", "--a-max", "0.2", "--q-min", "0",
            "--q-max", "1", "--grid", "20", "--mode", "linear3d",
            "--output", str(out),
        ])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["a", "q", "stable"]
        assert len(rows) == 400
        manifest = json.loads((tmp_path / "stability.csv.manifest.json").read_text())
        assert manifest["subcommand"] == "stability"
        assert str(out) in manifest["outputs"]

    def test_byte_identical_reruns(self, tmp_path):
        args = ["stability", "--grid", "12", "--output"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert dispatch(args + [str(out1)]) == 0
        assert dispatch(args + [str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestTrajectory:
    def test_columns(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = dispatch([
            "trajectory", "--a", "-0.01", "--q", "0.3", "--xi-max", "30",
            "--output", str(out),
        ])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["xi", "x", "v"]
        assert len(rows) > 100
        xi = np.array([float(r[0]) for r in rows])
        assert (np.diff(xi) > 0).all()


class TestBands:
    def test_band_report(self, tmp_path):
        out = tmp_path / "bands.csv"
        assert dispatch(["bands", "--s", "4.0", "--e-min", "0", "--e-max", "10",
                         "--grid", "150", "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["e", "allowed"]
        report = json.loads((tmp_path / "bands.csv.bands.json").read_text())
        assert len(report["bands"]) >= 2
        assert len(report["gaps"]) >= 1


class TestModes:
    def test_three_ion_spectrum(self, tmp_path):
        out = tmp_path / "modes.csv"
        assert dispatch(["modes", "--n", "3", "--omega-z", "5e5", "--beta", "0.1",
                         "--output", str(out)]) == 0
        report = json.loads((tmp_path / "modes.csv.spectrum.json").read_text())
        assert report["gamma_z"] == pytest.approx([1.0, 3.0, 5.8], abs=1e-9)
        header, rows = read_csv(out)
        assert header == ["ion", "mode", "b"]
        assert len(rows) == 9


class TestJij:
    def test_fit_report(self, tmp_path):
        out = tmp_path / "jij.csv"
        assert dispatch(["jij", "--n", "6", "--omega-z", "5e5", "--beta", "0.03",
                         "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["j", "k", "J_hz"]
        assert len(rows) == 15
        fit = json.loads((tmp_path / "jij.csv.fit.json").read_text())
        assert 0 < fit["p"] < 3.2
        assert fit["J0_hz"] > 0


class TestGate:
    def test_population_csv(self, tmp_path):
        out = tmp_path / "gate.csv"
        assert dispatch(["gate", "--ions", "2", "--delta-hz", "20e3", "--n-max", "12",
                         "--n-grid", "41", "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "P_dd", "P_ud_du", "P_uu"]
        final = [float(x) for x in rows[-1][1:]]
        assert final[0] == pytest.approx(0.5, abs=1e-4)
        assert final[2] == pytest.approx(0.5, abs=1e-4)
        report = json.loads((tmp_path / "gate.csv.gate.json").read_text())
        assert report["phase_error"] < 1e-8

    def test_rejects_three_ions(self, tmp_path):
        assert dispatch(["gate", "--ions", "3", "--output", str(tmp_path / "g.csv")]) == 2


class TestConfigHandling:
    def test_missing_section_is_config_error(self, tmp_path):
        cfg = tmp_path / "et.ini"
        cfg.write_text("[system]\nv_x = 0.05\n")
        code = dispatch(["et-scan", "--config", str(cfg), "--output", str(tmp_path / "o.csv")])
        assert code == 2

    def test_unknown_key_is_config_error(self, tmp_path):
        cfg = tmp_path / "et.ini"
        cfg.write_text("[system]\nv_x = 0.05\nbogus = 1\n[bath]\ngamma = 0.1\n")
        code = dispatch(["et-scan", "--config", str(cfg), "--output", str(tmp_path / "o.csv")])
        assert code == 2

    def test_missing_file_is_config_error(self, tmp_path):
        code = dispatch(["et-scan", "--config", str(tmp_path / "nope.ini"),
                         "--output", str(tmp_path / "o.csv")])
        assert code == 2

    def test_et_scan_with_config(self, tmp_path):
        cfg = tmp_path / "et.ini"
        cfg.write_text(
            "[system]\nv_x = 0.05\ndelta_e = 1.0\ng = 0.9\nomega = 1.0\n"
            "[bath]\ngamma = 0.15\nn_bar = 0.02\n"
            "[scan]\ndelta_e_min = 0.8\ndelta_e_max = 1.2\nsteps = 5\n"
            "[run]\nn_max = 10\nhorizon = 60.0\nn_grid = 80\n"
        )
        out = tmp_path / "et.csv"
        assert dispatch(["et-scan", "--config", str(cfg), "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["delta_e", "k_T"]
        assert len(rows) == 5
        des = [float(r[0]) for r in rows]
        assert des == sorted(des)


class TestSeedHandling:
    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("IONTRAP_LAB_SEED", "1234")
        out = tmp_path / "vaet.csv"
        assert dispatch(["vaet", "--mode", "lindblad", "--output", str(out)]) == 0
        manifest = json.loads((tmp_path / "vaet.csv.manifest.json").read_text())
        assert manifest["seed"] == 1234

    def test_flag_overrides_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("IONTRAP_LAB_SEED", "1234")
        out = tmp_path / "vaet.csv"
        assert dispatch(["vaet", "--mode", "lindblad", "--seed", "7", "--output", str(out)]) == 0
        manifest = json.loads((tmp_path / "vaet.csv.manifest.json").read_text())
        assert manifest["seed"] == 7


class TestExperimentCommands:
    def test_vaet_trace(self, tmp_path):
        out = tmp_path / "vaet.csv"
        assert dispatch(["vaet", "--mode", "lindblad", "--gamma", "3.0",
                         "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t_ps", "P_D"]
        assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-9)
        # companion spectral-density table appears once dephasing is on
        assert (tmp_path / "vaet.csv.spectral_density.csv").exists()

    def test_pyrazine_trace(self, tmp_path):
        out = tmp_path / "pyr.csv"
        assert dispatch(["pyrazine", "--gamma", "0.4", "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "P_up"]
        assert float(rows[-1][1]) == pytest.approx(0.5, abs=0.02)

    def test_lindblad_reference_run(self, tmp_path):
        out = tmp_path / "lb.csv"
        assert dispatch(["lindblad", "--gamma", "0.2", "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "n_expect", "trace", "coherence"]
        n0 = float(rows[0][1])
        n_end = float(rows[-1][1])
        assert n_end < n0
        traces = [float(r[2]) for r in rows]
        assert max(abs(tr - 1) for tr in traces) < 1e-9

    def test_enaqt_small_run(self, tmp_path):
        out = tmp_path / "enaqt.csv"
        assert dispatch(["enaqt", "--n-sites", "4", "--b-max", "2.0", "--gamma", "1.0",
                         "--noise", "lindblad", "--n-disorder", "3", "--seed", "5",
                         "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header[0] == "t" and len(header) == 5
        eta = json.loads((tmp_path / "enaqt.csv.eta.json").read_text())
        assert len(eta["eta"]) == 4
        total = sum(float(x) for x in rows[-1][1:])
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_determinism_with_seed(self, tmp_path):
        outs = []
        for name in ("r1.csv", "r2.csv"):
            out = tmp_path / name
            assert dispatch(["enaqt", "--n-sites", "3", "--b-max", "1.0", "--gamma", "0.5",
                             "--noise", "telegraph", "--n-disorder", "2", "--n-traj", "10",
                             "--seed", "9", "--output", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
