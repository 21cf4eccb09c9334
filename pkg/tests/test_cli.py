import csv
import io
import json
import math

import numpy as np
import pytest

from schauder_relu.cli import main
from schauder_relu.figures import PANELS

FIXTURE_RESIDUAL_SUP = 0.37642554886052104


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestCoeffs:
    def test_parabola_json(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--fn", "x*(1-x)", "--level", "1")
        assert code == 0
        data = json.loads(out)
        assert data["alpha0"] == 0 and data["alpha1"] == 0
        assert data["levels"] == [[0.5], [0.125, 0.125]]

    def test_constant(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--fn", "0.7", "--level", "0")
        assert code == 0
        assert json.loads(out) == {"alpha0": 0.7, "alpha1": 0.0, "levels": [[0.0]]}

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--fn", "x*(1-x)", "--level", "1", "--format", "csv")
        assert code == 0
        table = rows(out)
        assert table[0] == ["n", "k", "alpha"]
        assert table[3] == ["0", "0", "0.5"]

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "coeffs", "--fn", "x*(", "--level", "1")
        assert code == 2
        assert "byte 3" in err

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "coeffs", "--fn", "ln(x)", "--level", "1")
        assert code == 3
        assert "ln" in err

    def test_missing_fn(self, capsys):
        assert run(capsys, "coeffs", "--level", "1")[0] == 4

    def test_writes_file(self, capsys, tmp_path):
        out = tmp_path / "c.json"
        assert run(capsys, "coeffs", "--fn", "x", "--level", "2", "--out", str(out))[0] == 0
        assert json.loads(out.read_text())["alpha1"] == 1.0

    def test_unwritable(self, capsys, tmp_path):
        code, _, _ = run(capsys, "coeffs", "--fn", "x", "--out", str(tmp_path / "missing" / "c.json"))
        assert code == 5


class TestApproximate:
    def test_sweep_to_files(self, capsys, tmp_path):
        out = tmp_path / "rate.csv"
        code, _, _ = run(
            capsys, "approximate", "--fn", "x*(1-x)", "--lipschitz", "1", "--pmax", "6",
            "--scheme", "dyadic", "--out", str(out),
        )
        assert code == 0
        table = rows(out.read_text())
        assert table[0] == ["N", "sup_error"]
        assert len(table) == 8
        side = json.loads(out.with_suffix(".json").read_text())
        assert side["scheme"] == "dyadic"
        assert side["slope"] == pytest.approx(-2.0, abs=0.1)
        for p, (n, err) in enumerate(table[1:]):
            assert int(n) == 4 * 2**p
            assert float(err) <= 2 / 2**p

    def test_abs_peaks_example(self, capsys):
        # The literal single-level scheme: every error is 1/2 from p = 1 on,
        # so neither the 2c/P bound nor a slope near -1 is reached.
        code, out, err = run(capsys, "approximate", "--fn", "abs(x-0.5)", "--lipschitz", "1", "--pmax", "8")
        assert code == 0
        errors = [float(e) for _, e in rows(out)[1:]]
        assert errors[1:] == [0.5] * 8
        assert json.loads(err)["scheme"] == "peaks"

    def test_affine_slope_null(self, capsys):
        code, _, err = run(capsys, "approximate", "--fn", "x", "--lipschitz", "1", "--pmax", "5")
        assert code == 0
        assert json.loads(err)["slope"] is None

    def test_pmax_cap(self, capsys):
        assert run(capsys, "approximate", "--fn", "x", "--lipschitz", "1", "--pmax", "13")[0] == 4

    def test_missing_lipschitz(self, capsys):
        code, _, err = run(capsys, "approximate", "--fn", "x")
        assert code == 4
        assert "lipschitz" in err


class TestPerturb:
    def test_level_three(self, capsys):
        code, out, _ = run(capsys, "perturb", "--K", "1", "--level", "3")
        assert code == 0
        table = rows(out)
        assert table[0] == ["n", "k", "a", "gap", "bound"]
        body, total = table[1:-1], table[-1]
        assert len(body) == 15
        assert all(float(r[3]) <= float(r[4]) for r in body)
        assert total[0] == "total"
        assert float(total[3]) < float(total[4]) == 0.5

    def test_level_zero(self, capsys):
        code, out, _ = run(capsys, "perturb", "--K", "1", "--level", "0")
        assert code == 0
        body = rows(out)[1:-1]
        assert len(body) == 1
        assert float(body[0][4]) == pytest.approx(0.125, rel=1e-15)
        assert float(body[0][2]) == pytest.approx(32 * math.log(2), rel=1e-15)

    @pytest.mark.parametrize("K", ["0", "-1", "nan"])
    def test_bad_K(self, capsys, K):
        assert run(capsys, "perturb", "--K", K)[0] == 4

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "perturb", "--level", "0")
        a = rows(out)[1][2]
        assert float(a) == 32 * math.log(2)


class TestFigures:
    def test_all_panels(self, capsys, tmp_path):
        assert run(capsys, "figures", "--outdir", str(tmp_path))[0] == 0
        for name in PANELS:
            assert (tmp_path / f"{name}.csv").exists()

    def test_panel_values(self, capsys, tmp_path):
        run(capsys, "figures", "--outdir", str(tmp_path))
        sp = np.loadtxt(tmp_path / "softplus-hat.csv", delimiter=",", skiprows=1)
        assert np.max(np.abs(sp[:, 1] - sp[:, 2])) <= 4 * math.log(2) / 10
        g = rows((tmp_path / "g-shifted.csv").read_text())
        header = g[0]
        data = np.array(g[1:], dtype=float)
        col = header.index("g_plus_half_n0_k0")
        assert data[data[:, 0] == 0.5, col][0] == 1.0
        pyr = np.loadtxt(tmp_path / "pyramid.csv", delimiter=",", skiprows=1)
        peak = pyr[(pyr[:, 0] == 0.5) & (pyr[:, 1] == 0.5)]
        assert peak[0, 2] == 1.0

    def test_unwritable_outdir(self, capsys, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert run(capsys, "figures", "--outdir", str(blocker / "sub"))[0] == 5


class TestPyramidFit:
    def test_no_planes(self, capsys):
        code, out, _ = run(capsys, "pyramid-fit", "--N", "0", "--grid", "21")
        assert code == 0
        assert float(out) == 1.0

    def test_fixture(self, capsys, tmp_path):
        report = tmp_path / "fit.json"
        code, out, _ = run(
            capsys, "pyramid-fit", "--N", "64", "--seed", "42", "--grid", "101", "--out", str(report)
        )
        assert code == 0
        assert abs(float(out) - FIXTURE_RESIDUAL_SUP) <= 1e-9
        data = json.loads(report.read_text())
        assert data["seed"] == 42 and data["N"] == 64

    def test_other_seed(self, capsys):
        code, out, _ = run(capsys, "pyramid-fit", "--N", "64", "--seed", "43")
        assert code == 0 and float(out) > 0

    @pytest.mark.parametrize("flags", [["--N", "257"], ["--grid", "202"], ["--N", "-1"]])
    def test_caps(self, capsys, flags):
        assert run(capsys, "pyramid-fit", *flags)[0] == 4


class TestFrameCheck:
    def test_exact_frames(self, capsys):
        code, out, _ = run(capsys, "frame-check", "--fn", "sin(pi*x)", "--level", "6", "--kinds", "Hat,SigmoidalDiff")
        assert code == 0
        data = json.loads(out)
        assert data["bound"] is None
        assert data["max_abs_diff"] <= 1e-12

    def test_softplus_frame(self, capsys):
        code, out, _ = run(capsys, "frame-check", "--fn", "sin(pi*x)", "--level", "5", "--kinds", "Hat,SoftplusPair")
        assert code == 0
        data = json.loads(out)
        assert data["within_bound"] and data["bound"] > 0

    @pytest.mark.parametrize("kinds", ["Hat", "Hat,Haar", "Hat,CounterexampleG", "Hat,ReluPair,SigmoidalDiff"])
    def test_bad_kinds(self, capsys, kinds):
        assert run(capsys, "frame-check", "--fn", "x", "--kinds", kinds)[0] == 4


class TestGeneral:
    def test_no_subcommand(self, capsys):
        assert run(capsys)[0] == 4

    def test_unknown_flag(self, capsys):
        assert run(capsys, "coeffs", "--fn", "x", "--bogus")[0] == 4

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"fn": "x*(1-x)", "level": 1}))
        code, out, _ = run(capsys, "coeffs", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["levels"] == [[0.5], [0.125, 0.125]]

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"fn": "x*(1-x)", "level": 1}))
        _, out, _ = run(capsys, "coeffs", "--config", str(cfg), "--level", "0")
        assert json.loads(out)["levels"] == [[0.5]]

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"colour": "red"}))
        assert run(capsys, "coeffs", "--config", str(cfg))[0] == 4
        assert run(capsys, "coeffs", "--config", str(tmp_path / "none.json"))[0] == 4

    def test_grid_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("SCHAUDER_GRID_BITS", "6")
        code, out, _ = run(capsys, "frame-check", "--fn", "x*(1-x)", "--level", "2")
        assert code == 0
        monkeypatch.setenv("SCHAUDER_GRID_BITS", "99")
        assert run(capsys, "frame-check", "--fn", "x*(1-x)", "--level", "2")[0] == 4
