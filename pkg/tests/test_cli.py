import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from qdetect.cli import main
from qdetect.core import BernoulliPair, fidelity
from qdetect.corpus import topic_error_curves

CRIME = ["--p1-m0", str(223 / 1234), "--p1-m1", str(65 / 474)]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def key_values(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestDetect:
    def test_worked_example(self, capsys):
        code, out, _ = run(capsys, "detect", "0.8", "1.0", "0.5")
        kv = key_values(out)
        assert code == 0
        assert kv["P_e"] == "0.400000"
        assert kv["Q_e"] == "0.276393"
        assert kv["region"] == "{1}"
        assert kv["fidelity"] == "0.800000"
        assert kv["eigenvalue1"] == f"{math.sqrt(5) / 5:.6f}"
        assert {"gamma", "theta", "mu0", "mu1", "P_c", "Q_c"} <= kv.keys()

    def test_equality_case(self, capsys):
        _, out, _ = run(capsys, "detect", "0.5", "0.5", "0.3")
        kv = key_values(out)
        assert kv["P_e"] == kv["Q_e"] == "0.300000"

    def test_boundary_prints_no_basis(self, capsys):
        _, out, _ = run(capsys, "detect", "0.3", "0.6", "1")
        kv = key_values(out)
        assert kv["basis"] == "none" and kv["lambda"] == "inf"
        assert kv["P_e"] == kv["Q_e"] == "0.000000"

    def test_explicit_lambda(self, capsys):
        _, out, _ = run(capsys, "detect", "0.8", "1.0", "0.3", "--lambda", "1")
        assert key_values(out)["lambda"] == "1.000000"

    @pytest.mark.parametrize("argv", [["1.2", "0.5", "0.5"], ["0.5", "0.5", "-0.1"], ["0.5", "0.5", "0.5", "--lambda", "-2"]])
    def test_invalid_input(self, capsys, argv):
        code, out, err = run(capsys, "detect", *argv)
        assert code == 2 and out == ""
        assert "error" in err

    def test_out_of_range_message(self, capsys):
        _, _, err = run(capsys, "detect", "1.2", "0.5", "0.5")
        assert "probability out of range" in err


class TestSweep:
    def test_crime_curve(self, capsys):
        code, out, _ = run(capsys, "sweep", *CRIME)
        assert code == 0
        assert out.splitlines()[0] == "xi,pe,qe,fidelity"
        data = rows(out)
        assert len(data) == 101
        xi = np.array([float(r["xi"]) for r in data])
        pe = np.array([float(r["pe"]) for r in data])
        qe = np.array([float(r["qe"]) for r in data])
        assert np.all(np.diff(xi) > 0)
        assert np.all(qe <= pe + 1e-9)
        for r in data:
            assert all(len(v.split(".")[1]) == 6 for v in r.values())
        lam = fidelity(BernoulliPair(223 / 1234, 65 / 474))
        gap = pe - qe
        assert abs(xi[np.argmax(gap)] - 0.5) <= 0.1
        assert gap.max() <= (1 - math.sqrt(1 - lam)) / 2 + 1e-6
        mid = np.argmin(abs(xi - 0.5))
        assert gap[mid] < 0.01

    def test_two_steps(self, capsys):
        _, out, _ = run(capsys, "sweep", *CRIME, "--steps", "2")
        data = rows(out)
        assert [r["xi"] for r in data] == ["0.000000", "1.000000"]
        assert all(r["pe"] == r["qe"] == "0.000000" for r in data)

    def test_pseudo_model(self, capsys):
        _, out, _ = run(capsys, "sweep", "--pseudo", "10", "100", "--steps", "3")
        assert rows(out)[1]["fidelity"] == "0.805209"

    def test_topic_average(self, capsys, mini, mini_paths):
        docs, topics, qrels = map(str, mini_paths)
        _, out, _ = run(capsys, "sweep", "--docs", docs, "--topics", topics, "--qrels", qrels, "--topic", "103", "--steps", "11")
        expected = topic_error_curves(mini, "103", np.linspace(0, 1, 11)).average
        data = rows(out)
        np.testing.assert_allclose([float(r["pe"]) for r in data], expected.pe, atol=5e-7)
        np.testing.assert_allclose([float(r["qe"]) for r in data], expected.qe, atol=5e-7)

    def test_single_term(self, capsys, mini_paths):
        docs, topics, qrels = map(str, mini_paths)
        code, out, _ = run(capsys, "sweep", "--docs", docs, "--topics", topics, "--qrels", qrels,
                           "--topic", "101", "--term", "energy", "--steps", "5")
        assert code == 0 and len(rows(out)) == 5

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["--p1-m0", "0.3"],
            [*CRIME, "--pseudo", "1", "10"],
            [*CRIME, "--steps", "1"],
            [*CRIME, "--xi-min", "0.7", "--xi-max", "0.2"],
            ["--topic", "101"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, _ = run(capsys, "sweep", *argv)
        assert code == 2 and out == ""

    def test_unknown_topic(self, capsys, mini_paths):
        docs, topics, qrels = map(str, mini_paths)
        code, _, err = run(capsys, "sweep", "--docs", docs, "--topics", topics, "--qrels", qrels, "--topic", "999")
        assert code == 2 and "999" in err

    def test_writes_file_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", *CRIME, "--out", str(a)]) == 0
        assert main(["sweep", *CRIME, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()
        assert capsys.readouterr().out == ""

    def test_unwritable_path(self, capsys, tmp_path):
        code, _, err = run(capsys, "sweep", *CRIME, "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 3 and "I/O" in err


@pytest.fixture(scope="module")
def surface():
    buf = io.StringIO()
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(sys, "stdout", buf)
        assert main(["surface", "--steps", "11"]) == 0
    return rows(buf.getvalue())


class TestSurface:
    def test_shape_and_header(self, surface):
        assert len(surface) == 11 * 99
        assert list(surface[0]) == ["xi", "p1_m0", "pe", "qe"]
        assert all(float(r["qe"]) <= float(r["pe"]) + 1e-9 for r in surface)

    def test_high_prior_high_frequency_point(self, surface):
        (r,) = [r for r in surface if r["xi"] == "0.900000" and r["p1_m0"] == "0.900000"]
        assert float(r["qe"]) / float(r["pe"]) < 0.8

    def test_error_grows_with_frequency_below_half(self, surface):
        # P_e is symmetric about p1_m0 = 1/2, so it only grows up to there
        pe = [float(r["pe"]) for r in surface if r["xi"] == "0.500000" and float(r["p1_m0"]) <= 0.5]
        assert pe == sorted(pe)

    def test_small_frequency(self, surface):
        r = [r for r in surface if r["xi"] == "0.500000"][0]
        assert r["p1_m0"] == "0.010000"
        assert float(r["qe"]) <= float(r["pe"])

    def test_rejects_closed_interval(self, capsys):
        code, _, _ = run(capsys, "surface", "--p-min", "0")
        assert code == 2


class TestTopics:
    def test_fixture(self, capsys, mini_paths):
        docs, topics, qrels = map(str, mini_paths)
        code, out, _ = run(capsys, "topics", "--docs", docs, "--topics", topics, "--qrels", qrels)
        assert code == 0
        assert out == "topic_id,avg_relative_frequency\n101,0.1500\n102,0.2000\n103,0.1750\n"

    def test_unseen_term(self, capsys, tmp_path):
        (tmp_path / "d.jsonl").write_text('{"doc_id": "a", "text": "hello"}\n')
        (tmp_path / "t.tsv").write_text("7\tabsent\n")
        (tmp_path / "q.txt").write_text("")
        _, out, _ = run(capsys, "topics", "--docs", str(tmp_path / "d.jsonl"), "--topics", str(tmp_path / "t.tsv"),
                        "--qrels", str(tmp_path / "q.txt"))
        assert out.splitlines()[1] == "7,0.0000"

    def test_parse_error_reports_location(self, capsys, tmp_path, mini_paths):
        bad = tmp_path / "docs.jsonl"
        bad.write_text('{"doc_id": "a", "text": "x"}\n{oops\n')
        code, _, err = run(capsys, "topics", "--docs", str(bad), "--topics", str(mini_paths[1]), "--qrels", str(mini_paths[2]))
        assert code == 2 and "docs.jsonl:2:" in err

    def test_missing_file(self, capsys, tmp_path, mini_paths):
        code, _, _ = run(capsys, "topics", "--docs", str(tmp_path / "nope"), "--topics", str(mini_paths[1]),
                         "--qrels", str(mini_paths[2]))
        assert code == 3

    def test_missing_flags(self, capsys):
        assert run(capsys, "topics")[0] == 2


class TestSimulate:
    def test_quantum_example(self, capsys):
        code, out, _ = run(capsys, "simulate", "0.8", "1.0", "--trials", "1000000", "--seed", "7")
        kv = key_values(out)
        assert code == 0
        assert abs(float(kv["empirical_error"]) - 0.2764) < 0.002
        assert kv["analytic_error"] == "0.276393"

    def test_classical_perfect_feature(self, capsys):
        code, out, _ = run(capsys, "simulate", "0", "1", "--channel", "classical", "--xi", "0.3")
        assert code == 0 and key_values(out)["errors"] == "0"

    def test_repeatable_bytes(self, capsys):
        argv = ["simulate", "0.2", "0.6", "--xi", "0.4", "--seed", "0xdeadbeef", "--trials", "200000"]
        first = run(capsys, *argv)[1]
        assert run(capsys, *argv)[1] == first
        assert run(capsys, *argv, "--workers", "4")[1] == first

    def test_statistical_failure_exit_code(self, capsys, monkeypatch):
        import qdetect.cli as cli
        from qdetect.simulator import SimResult

        monkeypatch.setattr(cli, "simulate_quantum", lambda cfg, workers: SimResult(0.5, 0.1, 10, 5, 0.01, 40.0))
        code, _, err = run(capsys, "simulate", "0.8", "1.0")
        assert code == 1 and "standard errors" in err

    def test_degenerate_explicit_lambda(self, capsys):
        assert run(capsys, "simulate", "0.4", "0.4", "--lambda", "1")[0] == 2

    @pytest.mark.parametrize("argv", [["--trials", "0"], ["--seed", "-1"], ["--channel", "other"]])
    def test_invalid_flags(self, capsys, argv):
        with pytest.raises(SystemExit) as info:
            main(["simulate", "0.5", "0.5", *argv])
        assert info.value.code == 2


class TestLatticeDemo:
    def test_default(self, capsys):
        code, out, _ = run(capsys, "lattice-demo")
        assert code == 0
        assert "left  a ^ (b v c): rank 1 basis [(0.000000, 1.000000, 0.000000)]" in out
        assert "right (a ^ b) v (a ^ c): rank 0 (null subspace)" in out
        assert "distributive: false" in out
        assert "distributive: true" in out
        assert "expressible from occurrence subspaces: false" in out
        assert run(capsys, "lattice-demo")[1] == out

    def test_orthogonal(self, capsys):
        _, out, _ = run(capsys, "lattice-demo", "--orthogonal")
        assert "distributive: true" in out and "false" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qdetect", "detect", "0.8", "1", "0.5"],
                          capture_output=True, text=True, check=True)
    assert "Q_e=0.276393" in proc.stdout


def test_log_level_from_environment(capsys, monkeypatch, tmp_path, mini_paths):
    monkeypatch.setenv("QDETECT_LOG", "info")
    (tmp_path / "q.txt").write_text("")
    docs, topics, _ = map(str, mini_paths)
    code, out, err = run(capsys, "sweep", "--docs", docs, "--topics", topics, "--qrels", str(tmp_path / "q.txt"),
                         "--topic", "101", "--term", "solar", "--steps", "2")
    assert code == 0
    assert "pseudo_relevance" in err
    assert "pseudo" not in out
