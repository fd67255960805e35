import json
import math

import numpy as np
import pytest

from stochastic_billiards.cli import main

CIRCLE = json.dumps({"type": "ball", "dim": 2, "center": [0.0, 0.0], "radius": 1.0})
CAPSULE8 = json.dumps({"type": "capsule", "dim": 8, "half_length": 4.0, "radius": 1.0})
ELL3 = json.dumps({"type": "ellipsoid", "dim": 3, "semi_axes": [2.0, 1.0, 1.0]})


def _read_csv(path):
    rows = path.read_text().strip().split("\n")
    return rows[0].split(","), [r.split(",") for r in rows[1:]]


class TestRunCommand:
    def test_row_count_and_schema(self, tmp_path):
        out = tmp_path / "d"
        rc = main(["run", "--body", CIRCLE, "--steps", "1000", "--seed", "7",
                   "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "trajectory.csv")
        assert header == ["replica", "k", "x_1", "x_2", "chord", "cos_out", "cos_in"]
        assert len(rows) == 1000
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["params"]["seed"] == 7
        assert manifest["command"] == "run"

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["run", "--body", CIRCLE, "--steps", "500", "--seed", "3",
                         "--out", str(out)]) == 0
        assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()

    def test_body_from_file(self, tmp_path):
        body_file = tmp_path / "circle.json"
        body_file.write_text(CIRCLE)
        assert main(["run", "--body", str(body_file), "--steps", "10",
                     "--out", str(tmp_path / "o")]) == 0


class TestSpectralCommand:
    def test_eigs_and_summary(self, tmp_path):
        out = tmp_path / "sp"
        rc = main(["spectral", "--body", CIRCLE, "--bins", "512", "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "eigs.csv")
        assert header == ["k", "lambda_k"]
        assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-9)
        assert float(rows[1][1]) == pytest.approx(-1.0 / 3.0, abs=1e-3)
        summary = json.loads((out / "summary.json").read_text())
        assert summary["spectral_gap"] == pytest.approx(2.0 / 3.0, abs=1e-3)
        assert (out / "sweep.csv").exists()

    def test_matrix_dump(self, tmp_path):
        out = tmp_path / "sp"
        rc = main(["spectral", "--body", CIRCLE, "--bins", "64", "--dump-matrix",
                   "--out", str(out)])
        assert rc == 0
        _, rows = _read_csv(out / "matrix.csv")
        assert len(rows) == 64

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["spectral", "--body", CIRCLE, "--bins", "64",
                         "--out", str(out)]) == 0
        assert (a / "eigs.csv").read_bytes() == (b / "eigs.csv").read_bytes()


class TestValidateCommand:
    def test_capsule_constants(self, capsys):
        assert main(["validate", "--body", CAPSULE8]) == 0
        out = capsys.readouterr().out
        assert "curvature bound C: 1" in out
        assert "diameter D: 10" in out
        assert "curvature witness (1000 points): pass" in out
        assert "pass" in out and "FAIL" not in out

    def test_ellipsoid_constants(self, capsys):
        assert main(["validate", "--body", ELL3]) == 0
        out = capsys.readouterr().out
        assert "curvature bound C: 2" in out
        assert "diameter D: 4" in out

    def test_ball_constants(self, capsys):
        ball = json.dumps({"type": "ball", "dim": 3, "center": [0, 0, 0], "radius": 2.0})
        assert main(["validate", "--body", ball]) == 0
        out = capsys.readouterr().out
        assert "curvature bound C: 0.5" in out
        assert "diameter D: 4" in out


class TestSmallCommands:
    def test_f_quantile(self, tmp_path):
        out = tmp_path / "f"
        rc = main(["f-quantile", "--body", CIRCLE, "--samples", "50000",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "fquant.csv")
        assert header == ["body", "n", "level", "F", "ci_lo", "ci_hi"]
        assert float(rows[0][3]) == pytest.approx(2 * math.sqrt(255) / 128, abs=0.02)

    def test_s_gamma(self, tmp_path):
        out = tmp_path / "s"
        rc = main(["s-gamma", "--body", CIRCLE, "--gamma", "0.25", "0.4",
                   "--mc-points", "20000", "--seed", "1", "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "sgamma.csv")
        assert header == ["gamma", "t", "g_t", "se"]
        assert len(rows) == 2
        assert float(rows[0][1]) > float(rows[1][1])

    def test_overlap(self, tmp_path):
        out = tmp_path / "o"
        rc = main(["overlap", "--body", CIRCLE, "--samples", "20000",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "overlap.csv")
        assert [r[0] for r in rows] == ["near", "antipodal"]
        assert float(rows[0][2]) < float(rows[1][2])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["extras"]["tv_threshold"] == 0.9
        assert manifest["extras"]["near_below_threshold"] is True

    def test_mixing(self, tmp_path):
        out = tmp_path / "m"
        rc = main(["mixing", "--body", CIRCLE, "--replicas", "2000",
                   "--checkpoints", "0,1,4", "--bins", "16", "--seed", "1",
                   "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "mixing.csv")
        assert header == ["k", "tv", "se"]
        assert float(rows[0][1]) == pytest.approx(1 - 1 / 16, abs=1e-12)

    def test_capsule(self, tmp_path):
        out = tmp_path / "c"
        rc = main(["capsule", "--dim", "8", "16", "--replicas", "5000",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(out / "capsule.csv")
        assert header == ["n", "L", "var_z1_hat", "var_z1_quad", "tau_median"]
        assert len(rows) == 2

    def test_fraction(self, tmp_path):
        out = tmp_path / "fr"
        rc = main(["fraction", "--body", CIRCLE, "--steps", "50000",
                   "--burn-in", "100", "--coord", "2", "--threshold", "0.0",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        _, rows = _read_csv(out / "fraction.csv")
        assert float(rows[0][2]) == pytest.approx(0.5, abs=0.02)


class TestErrors:
    def test_missing_body_file(self, tmp_path):
        assert main(["run", "--body", str(tmp_path / "nope.json"), "--steps", "10",
                     "--out", str(tmp_path / "o")]) == 2

    def test_malformed_body(self, tmp_path):
        assert main(["run", "--body", '{"type": "torus"}', "--steps", "10",
                     "--out", str(tmp_path / "o")]) == 2

    def test_spectral_on_3d_body(self, tmp_path):
        assert main(["spectral", "--body", ELL3, "--out", str(tmp_path / "o")]) == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 2

    def test_inputs_not_mutated(self, tmp_path):
        body_file = tmp_path / "circle.json"
        body_file.write_text(CIRCLE)
        before = body_file.read_bytes()
        main(["run", "--body", str(body_file), "--steps", "10", "--out", str(tmp_path / "o")])
        assert body_file.read_bytes() == before
