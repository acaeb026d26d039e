import json
import subprocess
import sys

import numpy as np
import pytest

from siis._io import read_csv_body
from siis.cli import GeneratorSpec, build_parser, main, resolve
from siis.errors import ValidationError


def body(path):
    return [ln for ln in open(path) if not ln.startswith("#")]


@pytest.fixture
def moon_csv(tmp_path):
    out = tmp_path / "dm.csv"
    assert main(["generate", "--generate", "double-moon", "--seed", "0",
                 "--out", str(out)]) == 0
    return out


class TestGenerate:
    def test_rows_and_sidecar(self, moon_csv):
        rows = read_csv_body(moon_csv)
        assert rows[0] == ["x1", "x2", "label"] and len(rows) == 641
        assert sum(1 for r in rows[1:] if r[2] != "") == 6
        truth = read_csv_body(moon_csv.with_name("dm.truth.csv"))
        assert truth[0] == ["row", "truth", "flipped"]
        assert sum(int(r[2]) for r in truth[1:]) == 2
        assert open(moon_csv).readline().startswith("# siis generated")

    def test_seed_repeat_identical(self, moon_csv, tmp_path):
        again = tmp_path / "again.csv"
        main(["generate", "--generate", "double-moon", "--seed", "0", "--out", str(again)])
        assert body(again) == body(moon_csv)

    def test_odd_n(self, tmp_path, capsys):
        code = main(["generate", "--generate", "double-moon:n=641",
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "error [bench]" in capsys.readouterr().err

    def test_blobs_with_noise(self, tmp_path):
        out = tmp_path / "b.csv"
        assert main(["generate", "--generate", "blobs:n=100,classes=4", "--labeled",
                     "5", "--noise", "0.4", "--out", str(out)]) == 0
        truth = read_csv_body(tmp_path / "b.truth.csv")[1:]
        assert sum(int(r[2]) for r in truth) == 8


class TestTrain:
    def test_double_moon_perfect(self, moon_csv, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["train", "--dataset", str(moon_csv), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        res = summary["results"][0]
        assert res["method"] == "siis" and res["acc_unlabeled"] == 1.0
        pred = read_csv_body(out / "predictions_siis.csv")
        assert pred[0] == ["row", "label", "f0", "f1"] and len(pred) == 641
        assert [int(r[0]) for r in pred[1:]] == list(range(640))
        trace = read_csv_body(out / "trace_siis.csv")
        assert trace[0] == ["iter", "relative_change", "objective", "mu"]

    def test_all_methods(self, moon_csv, tmp_path):
        out = tmp_path / "run"
        assert main(["train", "--dataset", str(moon_csv), "--methods",
                     "siis,gfhf,l2l1,gtf", "--out", str(out)]) == 0
        for m in ("siis", "gfhf", "l2l1", "gtf"):
            assert (out / f"predictions_{m}.csv").exists()
        res = json.loads((out / "summary.json").read_text())["results"]
        gf = next(r for r in res if r["method"] == "gfhf")
        assert gf["correction_rate"] == 0.0

    def test_generated_source(self, tmp_path):
        assert main(["train", "--generate", "double-moon", "--out",
                     str(tmp_path / "r")]) == 0

    def test_deterministic_bodies(self, moon_csv, tmp_path):
        for d in ("a", "b"):
            main(["train", "--dataset", str(moon_csv), "--out", str(tmp_path / d)])
        for f in ("predictions_siis.csv", "trace_siis.csv"):
            assert body(tmp_path / "a" / f) == body(tmp_path / "b" / f)

    def test_missing_file(self, tmp_path):
        assert main(["train", "--dataset", str(tmp_path / "no.csv"),
                     "--out", str(tmp_path)]) == 4

    def test_m_too_large(self, moon_csv, tmp_path):
        assert main(["train", "--dataset", str(moon_csv), "--m", "700",
                     "--out", str(tmp_path / "r")]) == 2

    def test_config_file(self, moon_csv, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[siis]\nk = 12\nalpha = 5\n\n[solver]\nmax_iter = 3\n")
        out = tmp_path / "r"
        assert main(["train", "--dataset", str(moon_csv), "--config", str(cfg),
                     "--alpha", "7", "--out", str(out)]) == 0
        s = json.loads((out / "summary.json").read_text())
        assert s["config"]["k"] == 12 and s["config"]["alpha"] == 7.0
        assert s["results"][0]["iterations"] == 3

    def test_bad_config_key(self, moon_csv, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[siis]\nbogus = 1\n")
        assert main(["train", "--dataset", str(moon_csv), "--config", str(cfg),
                     "--out", str(tmp_path)]) == 2


class TestBench:
    def test_full_matrix(self, tmp_path):
        out = tmp_path / "b"
        assert main(["bench", "--generate", "blobs:n=120", "--methods",
                     "siis,gfhf,l2l1,gtf", "--runs", "10", "--labeled", "5",
                     "--m", "10", "--out", str(out)]) == 0
        rows = read_csv_body(out / "report.csv")
        assert len(rows) == 1 + 160
        s = json.loads((out / "summary.json").read_text())
        assert len(s["summary"]) == 16 and s["params"]["seed"] == 0

    def test_single_cell_deterministic(self, tmp_path, monkeypatch):
        args = ["bench", "--generate", "blobs:n=120", "--noise", "0.2",
                "--labeled", "5", "--m", "10"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        monkeypatch.setenv("SIIS_THREADS", "2")
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        a = body(tmp_path / "a" / "report.csv")
        assert len(a) == 11 and a == body(tmp_path / "b" / "report.csv")

    def test_unknown_method(self, tmp_path, capsys):
        assert main(["bench", "--generate", "blobs", "--methods", "svm",
                     "--out", str(tmp_path)]) == 2
        assert "unknown method" in capsys.readouterr().err

    def test_dataset_needs_truth(self, moon_csv, tmp_path):
        assert main(["bench", "--dataset", str(moon_csv), "--out", str(tmp_path)]) == 2


class TestSweep:
    def test_grid(self, tmp_path):
        out = tmp_path / "s"
        assert main(["sweep", "--generate", "blobs:n=120", "--noise", "0.4",
                     "--runs", "2", "--labeled", "5", "--m", "10",
                     "--out", str(out)]) == 0
        rows = read_csv_body(out / "sweep.csv")
        assert len(rows) == 17
        assert {float(r[0]) for r in rows[1:]} == {1, 10, 100, 1000}

    def test_empty_grid(self, tmp_path):
        assert main(["sweep", "--generate", "blobs", "--noise", "0.4",
                     "--alphas", "", "--out", str(tmp_path)]) == 2

    def test_one_point_matches_bench(self, tmp_path):
        common = ["--generate", "blobs:n=120", "--noise", "0.4", "--runs", "2",
                  "--labeled", "5", "--m", "10", "--alpha", "10", "--beta", "1"]
        main(["sweep", *common, "--alphas", "10", "--betas", "1",
              "--out", str(tmp_path / "s")])
        main(["bench", *common, "--out", str(tmp_path / "b")])
        sw = read_csv_body(tmp_path / "s" / "sweep.csv")[1]
        s = json.loads((tmp_path / "b" / "summary.json").read_text())["summary"][0]
        assert float(sw[4]) == pytest.approx(s["acc_unlabeled"]["mean"])


class TestSpectrum:
    def test_chain(self, tmp_path):
        assert main(["spectrum", "--generate", "chain:n=10", "--out", str(tmp_path)]) == 0
        vals = np.array([float(r[1]) for r in read_csv_body(tmp_path / "spectrum.csv")[1:]])
        np.testing.assert_allclose(vals, 2 - 2 * np.cos(np.arange(10) * np.pi / 10),
                                   atol=1e-10)
        assert len(read_csv_body(tmp_path / "eigenvectors.csv")) == 11
        assert len((tmp_path / "edges.txt").read_text().splitlines()) == 9

    def test_m1(self, tmp_path):
        assert main(["spectrum", "--generate", "chain", "--m", "1",
                     "--out", str(tmp_path)]) == 0
        rows = read_csv_body(tmp_path / "spectrum.csv")
        assert len(rows) == 2 and abs(float(rows[1][1])) < 1e-10

    def test_disconnected_warning(self, tmp_path, capsys):
        f = tmp_path / "two.csv"
        f.write_text("0,0\n0.1,\n0.2,\n9,1\n9.1,\n9.2,\n")
        assert main(["spectrum", "--dataset", str(f), "--k", "2", "--m", "3",
                     "--out", str(tmp_path / "s")]) == 0
        assert "warning" in capsys.readouterr().err

    def test_m_too_large(self, tmp_path):
        assert main(["spectrum", "--generate", "chain", "--m", "11",
                     "--out", str(tmp_path)]) == 2


class TestSettings:
    def test_generator_spec(self):
        g = GeneratorSpec.parse("double-moon:n=100,std=0.2")
        assert g.name == "double-moon" and g.options == {"n": 100, "std": 0.2}
        for bad in ("moons", "double-moon:size=3", "blobs:n=x"):
            with pytest.raises(ValidationError):
                GeneratorSpec.parse(bad)

    def test_precedence(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[siis]\nm = 5\nxi = 0.7\n")
        args = build_parser().parse_args(
            ["train", "--generate", "double-moon", "--config", str(cfg), "--m", "3"])
        rc = resolve(args)
        # flag > file > preset > default
        assert (rc.m, rc.xi, rc.k, rc.alpha) == (3, 0.7, 10, 100.0)

    @pytest.mark.parametrize("argv", [["--k", "0"], ["--xi", "-1"], ["--noise", "1.5"],
                                      ["--runs", "0"]])
    def test_validation_up_front(self, argv):
        args = build_parser().parse_args(["bench", "--generate", "blobs", *argv])
        with pytest.raises(ValidationError):
            resolve(args)


def test_console_script_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "siis.cli", "train", "--dataset",
                           str(tmp_path / "none.csv"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 4
    assert "error" in proc.stderr
