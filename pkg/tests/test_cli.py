import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from t1helix.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, SWEEP_COLUMNS, run, sweep_rows

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _cfg(name):
    return str(CONFIGS / name)


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestVerify:
    def test_passing_suite(self):
        code, out = run(["verify", "--suite", "theorem7"])
        assert code == EXIT_OK
        assert out.splitlines()[-1].startswith("theorem7: ")
        assert "FAIL" not in out

    def test_failing_suite_exit_code(self):
        code, out = run(["verify", "--suite", "theorem4"])
        assert code == EXIT_FAIL and "FAIL" in out

    def test_json_is_deterministic_across_threads(self, monkeypatch):
        outs = []
        for threads in ("1", "4"):
            monkeypatch.setenv("T1HELIX_THREADS", threads)
            code, out = run(["verify", "--suite", "theorem2", "--json"])
            assert code == EXIT_OK
            outs.append(out)
        assert outs[0] == outs[1]
        body = json.loads(outs[0])
        assert body["suite"] == "theorem2" and all(c["pass"] for c in body["checks"])
        assert "runtime" not in json.dumps(body)

    def test_timing_flag(self):
        _, out = run(["verify", "--suite", "theorem2", "--json", "--timing"])
        assert all(c["runtime"] >= 0 for c in json.loads(out)["checks"])

    def test_unknown_suite(self):
        assert run(["verify", "--suite", "theorem9"])[0] == EXIT_CONFIG

    @pytest.mark.parametrize("scale", ["0", "-1", "nan"])
    def test_bad_tol_scale(self, scale):
        assert run(["verify", "--suite", "theorem2", "--tol-scale", scale])[0] == EXIT_CONFIG


class TestCurve:
    def test_fig2_csv(self):
        code, out = run(["curve", "--config", _cfg("fig2.ini")])
        assert code == EXIT_OK
        rows = _rows(out)
        assert list(rows[0]) == ["t", "x0", "x1", "V0", "V1", "eps_lambda", "sigma", "theta"]
        assert len(rows) == 256
        assert all(abs(float(r["theta"]) - math.sqrt(2)) < 1e-12 for r in rows)
        assert {r["eps_lambda"] for r in rows} == {"1"}

    def test_line_endings_and_determinism(self):
        first = run(["curve", "--spec", _cfg("fig2.ini")])[1]
        assert "\r" not in first and first.endswith("\n")
        assert run(["curve", "--spec", _cfg("fig2.ini")])[1] == first

    def test_embedding_columns_on_sphere(self):
        rows = _rows(run(["curve", "--config", _cfg("fig2.ini"), "--embed"])[1])
        for r in rows[::17]:
            e = [float(r[k]) for k in ("e0", "e1", "e2")]
            assert abs(sum(v * v for v in e) - 1.0) < 1e-12

    def test_out_file(self, tmp_path):
        target = tmp_path / "fig1.csv"
        code, out = run(["curve", "--config", _cfg("fig1.ini"), "--out", str(target)])
        assert code == EXIT_OK and out == ""
        assert len(target.read_text().splitlines()) == 202

    def test_missing_curve_section(self, tmp_path):
        p = tmp_path / "empty.ini"
        p.write_text("[tol]\nmatch = 1e-4\n")
        assert run(["curve", "--config", str(p)])[0] == EXIT_CONFIG

    def test_missing_file(self):
        assert run(["curve", "--config", "no/such/file.ini"])[0] == EXIT_CONFIG

    def test_empty_window(self, tmp_path, capsys):
        p = tmp_path / "bad.ini"
        p.write_text("[curve]\nfixture = fig2-oblique\nwindow = 2, 1\n")
        assert run(["curve", "--config", str(p)])[0] == EXIT_CONFIG
        assert f"{p}:3: [curve] window" in capsys.readouterr().err


class TestClassify:
    @pytest.mark.parametrize("config,theorem", [("fig1.ini", "Geod"), ("fig2.ini", "OblT"),
                                                ("fig2-perturbed.ini", "None"),
                                                ("null-oblique.ini", "NullObl"),
                                                ("vertical.ini", "None")])
    def test_matched_theorem(self, config, theorem):
        code, out = run(["classify", "--config", _cfg(config), "--json"])
        assert code == EXIT_OK
        assert json.loads(out)["matched_theorem"] == theorem

    def test_fig2_json(self):
        body = json.loads(run(["classify", "--config", _cfg("fig2.ini"), "--json"])[1])
        assert body["measured"]["kappa"] == pytest.approx(0.6, abs=1e-9)
        assert body["measured"]["tau"] == pytest.approx(-0.2, abs=1e-9)
        assert body["params"] == {"a": 1, "c": 0, "d": 3, "alpha": 1, "phi": 4, "epsilon": 1}
        assert body["surface"] == {"kind": "Sphere", "curvature": 1.0}

    def test_perturbed_is_not_a_helix(self):
        body = json.loads(run(["classify", "--config", _cfg("fig2-perturbed.ini"), "--json"])[1])
        assert body["helix"] is False

    def test_vertical(self):
        body = json.loads(run(["classify", "--config", _cfg("vertical.ini"), "--json"])[1])
        assert body["family"] == "Vertical" and body["helix"] is True

    def test_table(self):
        code, out = run(["classify", "--config", _cfg("fig2.ini")])
        assert code == EXIT_OK
        assert any(line.split()[:2] == ["matched_theorem", "OblT"] for line in out.splitlines())

    def test_json_is_deterministic(self):
        argv = ["classify", "--config", _cfg("null-oblique.ini"), "--json"]
        assert run(argv)[1] == run(argv)[1]


class TestSweep:
    def _one(self, a, c, d, kappa=1.0, base="riemannian"):
        (row,) = sweep_rows([a], [c], [d], [kappa], [base])
        return row

    def test_contact_example(self):
        row = self._one(1.0, 0.0, 3.0)
        assert row["structure_class"] == "ContactPseudoMetric"
        assert row["k_contact"] is True and row["Obl0_admissible"] is True
        assert row["kaluza_klein"] is False

    def test_kaluza_klein_example(self):
        row = self._one(1.0, 0.0, 0.0)
        assert row["kaluza_klein"] is True and row["HorT_admissible"] is False
        assert row["k_contact"] is None

    def test_twisted_horizontal_needs_alpha_phi_positive(self):
        row = self._one(1.0, 0.0, -5.0)
        assert row["alpha"] * row["phi"] < 0 and row["HorT_admissible"] is False

    def test_k_contact_depends_on_curvature(self):
        assert self._one(1.0, 0.0, 3.0, kappa=2.0)["k_contact"] is False

    def test_degenerate_row(self):
        row = self._one(1.0, -1.0, 3.0)
        assert row["nondegenerate"] is False and "signature" not in row

    def test_config_grid(self):
        code, out = run(["sweep", "--config", _cfg("sweep.ini"), "--format", "csv"])
        assert code == EXIT_OK
        rows = _rows(out)
        assert list(rows[0]) == SWEEP_COLUMNS
        assert len(rows) == 2 * 2 * 3 * 2

    def test_flags_override_config(self):
        code, out = run(["sweep", "--config", _cfg("sweep.ini"), "--a", "1", "--c", "0", "--d", "3",
                         "--base", "riemannian", "--format", "csv"])
        (row,) = _rows(out)
        assert (row["signature"], row["structure_class"], row["k_contact"]) == ("(3,0)", "ContactPseudoMetric", "true")

    def test_json(self):
        code, out = run(["sweep", "--a", "1", "--d", "0,3", "--json"])
        assert code == EXIT_OK and len(json.loads(out)["rows"]) == 2

    def test_table(self):
        code, out = run(["sweep", "--a", "1", "--d", "3"])
        assert code == EXIT_OK and out.splitlines()[0].split()[0] == "a"

    @pytest.mark.parametrize("argv", [["--a", "x"], ["--d", ","], ["--kappa", "inf"]])
    def test_bad_grid(self, argv):
        assert run(["sweep"] + argv)[0] == EXIT_CONFIG


class TestEntryPoint:
    def test_module_help(self):
        res = subprocess.run([sys.executable, "-m", "t1helix.cli", "--help"], capture_output=True, text=True)
        assert res.returncode == 0 and "verify" in res.stdout

    def test_no_command(self):
        assert run([])[0] == EXIT_CONFIG
