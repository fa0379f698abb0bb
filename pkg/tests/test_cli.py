"""End-to-end checks of the command-line interface.

Everything drives netdim.cli.main() in-process with argv lists; a couple of
tests read stdout through capsys, the rest round-trip files under tmp_path.
"""

import json
import math

import numpy as np
import pytest

from netdim.cli import main
from netdim.graph import load_edge_list
from netdim.graphlets import count_graphlets_exact


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def graph_file(workdir):
    path = workdir / "g.txt"
    code = main(
        [
            "generate", "--n", "400", "--m", "2", "--alpha", "0.5",
            "--beta", "0.15", "--p", "0.5", "--seed", "42",
            "--out", str(path),
        ]
    )
    assert code == 0
    return path


class TestGenerate:
    def test_writes_parseable_edge_list(self, graph_file):
        g = load_edge_list(graph_file)
        assert g.n == 400
        assert g.edge_count > 0

    def test_same_seed_same_bytes(self, workdir):
        argv = [
            "generate", "--n", "150", "--m", "3", "--alpha", "0.6",
            "--beta", "0.1", "--p", "0.8", "--seed", "9",
        ]
        a = workdir / "rep_a.txt"
        b = workdir / "rep_b.txt"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_when_no_out(self, capsys):
        assert main(
            [
                "generate", "--n", "60", "--m", "2", "--alpha", "0.5",
                "--beta", "0.2", "--p", "1.0", "--seed", "1",
            ]
        ) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        u, v = lines[0].split()
        assert int(u) != int(v)

    def test_positions_tsv(self, workdir):
        edge = workdir / "pos_g.txt"
        pos = workdir / "pos.tsv"
        assert main(
            [
                "generate", "--n", "80", "--m", "3", "--alpha", "0.5",
                "--beta", "0.2", "--p", "1.0", "--seed", "4",
                "--out", str(edge), "--positions", str(pos),
            ]
        ) == 0
        rows = pos.read_text().strip().splitlines()
        assert len(rows) == 80
        cells = rows[0].split("\t")
        assert len(cells) == 2 + 3
        ids = [int(r.split("\t")[0]) for r in rows]
        assert ids == list(range(80))
        ranks = sorted(int(r.split("\t")[1]) for r in rows)
        assert ranks == list(range(1, 81))
        assert all(0.0 <= float(c) < 1.0 for c in cells[2:])

    def test_invalid_alpha_is_input_error(self):
        assert main(
            [
                "generate", "--n", "50", "--m", "2", "--alpha", "1.5",
                "--beta", "0.2", "--p", "1.0", "--seed", "1",
            ]
        ) == 2


class TestParams:
    def test_json_fields(self, graph_file, capsys):
        assert main(["params", "--graph", str(graph_file), "--seed", "3"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {
            "n", "edges", "rho", "eta", "x_min", "eta_raw", "alpha",
            "beta", "clamped", "eff_diameter", "m_model", "lcc_n",
        }
        assert doc["n"] == 400
        assert doc["alpha"] == pytest.approx(1.0 / (doc["eta"] - 1.0))
        assert doc["alpha"] + doc["beta"] == pytest.approx(
            1.0 - math.log(doc["rho"]) / math.log(doc["n"])
        )

    def test_missing_file_exits_2(self, capsys):
        assert main(["params", "--graph", "/no/such/file.txt"]) == 2
        assert "not found" in capsys.readouterr().err


class TestGraphlets:
    def test_exact_matches_library(self, graph_file, capsys):
        assert main(["graphlets", "--graph", str(graph_file), "--exact"]) == 0
        doc = json.loads(capsys.readouterr().out)
        vec = count_graphlets_exact(load_edge_list(graph_file))
        assert doc["counts"] == [int(c) for c in vec.counts]
        assert doc["sampled"] is False
        assert doc["q"] == 1.0
        assert doc["edge_count"] == vec.edge_count
        assert len(doc["names"]) == 8
        assert doc["features"] == pytest.approx(
            [math.log10(c + 1.0) for c in vec.counts]
        )

    def test_default_is_auto_sampling(self, graph_file, capsys):
        assert main(["graphlets", "--graph", str(graph_file), "--seed", "5"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["sampled"] is True
        assert doc["q"] == pytest.approx(10.0 / 400.0)

    def test_explicit_prob(self, graph_file, capsys):
        assert main(
            ["graphlets", "--graph", str(graph_file), "--prob", "0.2", "--seed", "5"]
        ) == 0
        assert json.loads(capsys.readouterr().out)["q"] == 0.2

    def test_exact_and_prob_conflict(self, graph_file):
        with pytest.raises(SystemExit):
            main(["graphlets", "--graph", str(graph_file), "--exact", "--prob", "0.5"])


class TestSpectrum:
    def test_csv_shape(self, graph_file, workdir):
        out = workdir / "spec.csv"
        assert main(["spectrum", "--graph", str(graph_file), "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "bin_lo,bin_hi,count,probability"
        assert len(lines) == 1 + 201
        first = lines[1].split(",")
        last = lines[-1].split(",")
        assert float(first[0]) == 0.0
        assert float(last[1]) == pytest.approx(2.0)
        counts = [int(row.split(",")[2]) for row in lines[1:]]
        probs = [float(row.split(",")[3]) for row in lines[1:]]
        assert sum(counts) == 400
        assert sum(probs) == pytest.approx(1.0)

    def test_cap_refusal_exits_2(self, graph_file, capsys):
        assert main(
            ["spectrum", "--graph", str(graph_file), "--cap", "10"]
        ) == 2
        assert "eigensolver" in capsys.readouterr().err


@pytest.fixture(scope="module")
def trained(workdir):
    rng = np.random.default_rng(0)
    rows = []
    for label, center in ((2, 0.0), (7, 4.0)):
        for pt in rng.normal(center, 0.4, size=(25, 3)):
            rows.append(f"{label}," + ",".join(f"{x:.6f}" for x in pt))
    feats = workdir / "train.csv"
    feats.write_text("\n".join(rows) + "\n")
    model = workdir / "model.json"
    assert main(["svm-train", "--features", str(feats), "--out", str(model)]) == 0
    return model


class TestSvmCommands:
    def test_model_schema(self, trained):
        doc = json.loads(trained.read_text())
        assert doc["labels"] == [2, 7]
        assert set(doc["standardization"]) == {"mean", "std", "kept"}
        assert len(doc["pairs"]) == 1
        assert set(doc["pairs"][0]) == {"a", "b", "weights", "bias"}

    def test_predict_json_and_csv(self, trained, workdir, capsys):
        q = workdir / "query.csv"
        q.write_text("0.1,0.2,-0.1\n4.2,3.9,4.1\n0.0,0.3,0.2\n")
        assert main(["svm-predict", "--model", str(trained), "--features", str(q)]) == 0
        assert json.loads(capsys.readouterr().out)["predictions"] == [2, 7, 2]
        assert main(
            ["svm-predict", "--model", str(trained), "--features", str(q),
             "--format", "csv"]
        ) == 0
        assert capsys.readouterr().out.strip().splitlines() == ["2", "7", "2"]

    def test_train_needs_label_column(self, workdir, capsys):
        bad = workdir / "onecol.csv"
        bad.write_text("1.0\n2.0\n")
        assert main(["svm-train", "--features", str(bad)]) == 2
        assert "label column" in capsys.readouterr().err

    def test_missing_model_exits_2(self, workdir):
        q = workdir / "query.csv"
        assert main(
            ["svm-predict", "--model", str(workdir / "ghost.json"),
             "--features", str(q)]
        ) == 2


class TestFit:
    def test_graphlet_fit_json(self, graph_file, workdir):
        out = workdir / "fit_g.json"
        assert main(
            [
                "fit", "--graph", str(graph_file), "--method", "graphlets",
                "--dims", "2,3,4", "--samples-per-dim", "6",
                "--seed", "11", "--out", str(out),
            ]
        ) == 0
        doc = json.loads(out.read_text())
        assert doc["method"] == "graphlets"
        assert doc["fitted_m"] in (2, 3, 4)
        assert list(doc["scores"]) == ["2", "3", "4"]
        assert doc["params_used"]["n"] == 400

    def test_spectral_fit_with_range_dims(self, graph_file, capsys):
        assert main(
            [
                "fit", "--graph", str(graph_file), "--method", "spectral",
                "--dims", "2-4", "--seed", "12",
            ]
        ) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["method"] == "spectral"
        assert doc["fitted_m"] in (2, 3, 4)
        assert doc["interval"][0] <= doc["fitted_m"] <= doc["interval"][1]

    def test_threads_do_not_change_output(self, graph_file, capsys):
        argv = [
            "fit", "--graph", str(graph_file), "--method", "graphlets",
            "--dims", "2,3", "--samples-per-dim", "5", "--seed", "8",
        ]
        assert main(argv + ["--threads", "1"]) == 0
        one = capsys.readouterr().out
        assert main(argv + ["--threads", "3"]) == 0
        assert capsys.readouterr().out == one

    def test_bad_dims_exit_2(self, graph_file):
        assert main(
            ["fit", "--graph", str(graph_file), "--method", "spectral",
             "--dims", "4-2"]
        ) == 2
        assert main(
            ["fit", "--graph", str(graph_file), "--method", "spectral",
             "--dims", "abc"]
        ) == 2


class TestNullmodel:
    def test_er_matches_edge_count_in_expectation(self, graph_file, workdir):
        out = workdir / "er.txt"
        assert main(
            ["nullmodel", "--type", "er", "--graph", str(graph_file),
             "--seed", "3", "--out", str(out)]
        ) == 0
        g = load_edge_list(graph_file)
        h = load_edge_list(out)
        assert h.n == g.n
        # expected count is matched; the realized count is binomial
        assert abs(h.edge_count - g.edge_count) < 0.1 * g.edge_count

    def test_rewire_preserves_degrees(self, graph_file, workdir):
        out = workdir / "rw.txt"
        assert main(
            ["nullmodel", "--type", "rewire", "--graph", str(graph_file),
             "--swaps-per-edge", "2", "--seed", "5", "--out", str(out)]
        ) == 0
        g = load_edge_list(graph_file)
        h = load_edge_list(out)
        assert np.array_equal(np.sort(g.degrees), np.sort(h.degrees))

    def test_percolate_requires_fraction(self, graph_file, capsys):
        assert main(
            ["nullmodel", "--type", "percolate", "--graph", str(graph_file)]
        ) == 2
        assert "--fraction" in capsys.readouterr().err

    def test_percolate_keeps_edge_count(self, graph_file, workdir):
        out = workdir / "pc.txt"
        assert main(
            ["nullmodel", "--type", "percolate", "--graph", str(graph_file),
             "--fraction", "0.1", "--seed", "7", "--out", str(out)]
        ) == 0
        assert load_edge_list(out).edge_count == load_edge_list(graph_file).edge_count


class TestSensitivity:
    def test_csv_output(self, graph_file, capsys):
        assert main(
            [
                "sensitivity", "--graph", str(graph_file), "--study", "percolation",
                "--levels", "0,0.05", "--trials", "1", "--dims", "2,3",
                "--samples-per-dim", "5", "--seed", "21",
            ]
        ) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("# baseline_m=")
        assert lines[1] == "study,level,trial,fitted_m"
        assert len(lines) == 2 + 2
        assert lines[2].startswith("percolation,0,0,")

    def test_json_output(self, graph_file, capsys):
        assert main(
            [
                "sensitivity", "--graph", str(graph_file), "--study", "rewire",
                "--levels", "1.0", "--trials", "1", "--dims", "2,3",
                "--samples-per-dim", "5", "--seed", "22", "--format", "json",
            ]
        ) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["study"] == "rewire"
        assert doc["nullmodel"] == "swap"
        assert len(doc["rows"]) == 1
        assert doc["rows"][0][:3] == ["rewire", 1.0, 0]


@pytest.fixture(scope="module")
def fit_dir(workdir):
    d = workdir / "fits"
    d.mkdir()
    for i, (n, m) in enumerate([(100, 3), (1000, 5), (10000, 7), (100000, 9)]):
        (d / f"f{i}.json").write_text(
            json.dumps(
                {
                    "method": "spectral",
                    "fitted_m": m,
                    "params_used": {"n": n, "m_model": float(m)},
                }
            )
        )
    (d / "junk.json").write_text("[1, 2]")
    (d / "notes.json").write_text(json.dumps({"comment": "not a fit"}))
    return d


class TestReport:
    def test_regression_over_directory(self, fit_dir, capsys):
        assert main(["report", "--dir", str(fit_dir)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert list(doc) == ["spectral"]
        rep = doc["spectral"]
        assert rep["slope"] == pytest.approx(2.0)
        assert rep["intercept"] == pytest.approx(-1.0)
        assert rep["r_squared"] == pytest.approx(1.0)
        assert len(rep["points"]) == 4
        assert rep["reference_slopes"]["spectral"] == 1.21

    def test_too_few_fits_exit_2(self, workdir, capsys):
        d = workdir / "two_fits"
        d.mkdir()
        for i, n in enumerate([100, 1000]):
            (d / f"f{i}.json").write_text(
                json.dumps(
                    {"method": "spectral", "fitted_m": 4,
                     "params_used": {"n": n, "m_model": 4.0}}
                )
            )
        assert main(["report", "--dir", str(d)]) == 2
        assert "3 or more" in capsys.readouterr().err

    def test_missing_dir_exit_2(self):
        assert main(["report", "--dir", "/no/such/dir"]) == 2
