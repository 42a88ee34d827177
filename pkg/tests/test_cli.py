import json

import pytest

from dyckrnn.cli import main
from dyckrnn.verify import check_generation_equivalence
from dyckrnn.weightio import load_weights


def run_cli(*argv):
    return main(list(argv))


class TestBuild:
    def test_lstm_binary_unit_count(self, tmp_path, capsys):
        out = tmp_path / "w.json"
        assert run_cli("build", "--arch", "lstm", "--enc", "binary",
                       "-k", "128", "-m", "5", "-o", str(out)) == 0
        assert "hidden_units: 100" in capsys.readouterr().out
        assert load_weights(str(out)).hidden_size == 100

    def test_simple_default_unit_count(self, tmp_path, capsys):
        out = tmp_path / "w.json"
        assert run_cli("build", "--arch", "simple", "-k", "2", "-m", "3",
                       "-o", str(out)) == 0
        assert "hidden_units: 12" in capsys.readouterr().out

    def test_binary_k1_refused(self, tmp_path, capsys):
        code = run_cli("build", "--arch", "simple", "--enc", "binary",
                       "-k", "1", "-m", "2", "-o", str(tmp_path / "w.json"))
        assert code == 2
        assert "k > 1" in capsys.readouterr().err

    def test_invalid_numeric_override_refused(self, tmp_path, capsys):
        code = run_cli("build", "-k", "2", "-m", "2", "--zeta", "1.0",
                       "-o", str(tmp_path / "w.json"))
        assert code == 2
        assert "zeta" in capsys.readouterr().err

    def test_naive_budget_guard(self, tmp_path, capsys):
        code = run_cli("build", "--arch", "naive", "-k", "4", "-m", "4",
                       "-o", str(tmp_path / "w.json"))
        assert code == 2
        assert "budget" in capsys.readouterr().err

    def test_naive_with_encoding_refused(self, tmp_path, capsys):
        code = run_cli("build", "--arch", "naive", "--enc", "binary",
                       "-k", "2", "-m", "2", "-o", str(tmp_path / "w.json"))
        assert code == 2
        assert "no slot encoding" in capsys.readouterr().err


class TestSample:
    def test_deterministic_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for path in (a, b):
            assert run_cli("sample", "-k", "2", "-m", "3", "--tokens", "2000",
                           "--seed", "7", "-o", str(path)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_default_window_m3(self, tmp_path):
        path = tmp_path / "c.txt"
        run_cli("sample", "-k", "2", "-m", "3", "--tokens", "100",
                "--seed", "1", "-o", str(path))
        assert "min_len=1 max_len=84" in path.read_text().splitlines()[0]

    def test_default_window_m5(self, tmp_path):
        path = tmp_path / "c.txt"
        run_cli("sample", "-k", "2", "-m", "5", "--tokens", "100",
                "--seed", "1", "-o", str(path))
        assert "min_len=1 max_len=180" in path.read_text().splitlines()[0]


class TestCheck:
    def test_member(self, capsys):
        assert run_cli("check", "-k", "1", "-m", "1", "(1 )1 $") == 0
        assert capsys.readouterr().out.strip() == "true"

    def test_depth_bound_position(self, capsys):
        assert run_cli("check", "-k", "1", "-m", "1", "(1 (1 )1 )1 $") == 1
        assert "false at position 2" in capsys.readouterr().out

    def test_mismatch_position(self, capsys):
        assert run_cli("check", "-k", "2", "-m", "2", "(1 )2 $") == 1
        assert "false at position 2" in capsys.readouterr().out

    def test_missing_end(self, capsys):
        assert run_cli("check", "-k", "1", "-m", "1", "(1 )1") == 1
        assert "no end-of-string" in capsys.readouterr().out

    def test_parse_error(self, capsys):
        assert run_cli("check", "-k", "1", "-m", "1", "(1 huh $") == 2
        assert "position 2" in capsys.readouterr().err


class TestVerify:
    def test_full_suite_all_constructions(self, tmp_path, capsys):
        text = tmp_path / "report.txt"
        js = tmp_path / "report.json"
        code = run_cli("verify", "-k", "2", "-m", "2", "--strings", "60",
                       "--text-report", str(text), "--json-report", str(js))
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
        reports = json.loads(js.read_text())
        assert all(r["passed"] for r in reports)
        assert text.read_text().count("PASS") == len(reports)

    def test_collision_suite(self, tmp_path, capsys):
        js = tmp_path / "report.json"
        code = run_cli("verify", "--suite", "collide", "-d", "1", "-p", "1",
                       "-k", "2", "-m", "2", "--json-report", str(js))
        assert code == 0
        (report,) = json.loads(js.read_text())
        assert report["details"]["collision"] is not None

    def test_corrupted_weight_file_fails(self, tmp_path, capsys):
        path = tmp_path / "w.json"
        assert run_cli("build", "--arch", "simple", "-k", "2", "-m", "2",
                       "-o", str(path)) == 0
        doc = json.loads(path.read_text())
        # zero the close-bracket readout rows
        V = doc["matrices"]["V"]
        rows, cols = V["shape"]
        for r in range(2, 4):
            for c in range(cols):
                V["data"][r * cols + c] = 0.0
        path.write_text(json.dumps(doc))
        code = run_cli("verify", "-k", "2", "-m", "2", "--weights", str(path),
                       "--suite", "equivalence", "--strings", "20")
        assert code == 1
        assert "counterexample" in capsys.readouterr().out

    def test_round_trip_matches_in_memory(self, tmp_path):
        from dyckrnn.automaton import DyckParams
        from dyckrnn.builders import build_simple_rnn
        path = tmp_path / "w.json"
        assert run_cli("build", "--arch", "simple", "-k", "2", "-m", "2",
                       "-o", str(path)) == 0
        in_memory = check_generation_equivalence(
            build_simple_rnn(DyckParams(2, 2)), max_len=8)
        from_file = check_generation_equivalence(load_weights(str(path)),
                                                 max_len=8)
        assert in_memory.passed == from_file.passed
        assert in_memory.details == from_file.details


class TestMetric:
    @pytest.fixture
    def weights_and_corpus(self, tmp_path):
        w = tmp_path / "w.json"
        c = tmp_path / "c.txt"
        assert run_cli("build", "--arch", "lstm", "--enc", "binary",
                       "-k", "8", "-m", "3", "-o", str(w)) == 0
        assert run_cli("sample", "-k", "8", "-m", "3", "--tokens", "3000",
                       "--seed", "5", "-o", str(c)) == 0
        return w, c

    def test_constructed_network_scores_one(self, weights_and_corpus, capsys):
        w, c = weights_and_corpus
        assert run_cli("metric", "--weights", str(w), "--corpus", str(c)) == 0
        out = capsys.readouterr().out
        assert "mean_p: 1.0" in out
        assert "separation" in out

    def test_uniform_baseline_scores_zero(self, weights_and_corpus, capsys):
        w, c = weights_and_corpus
        assert run_cli("metric", "--weights", str(w), "--corpus", str(c),
                       "--uniform-baseline") == 0
        assert "mean_p: 0.0" in capsys.readouterr().out

    def test_mismatched_corpus_refused(self, tmp_path, weights_and_corpus, capsys):
        w, _ = weights_and_corpus
        other = tmp_path / "other.txt"
        run_cli("sample", "-k", "2", "-m", "3", "--tokens", "200",
                "--seed", "1", "-o", str(other))
        assert run_cli("metric", "--weights", str(w),
                       "--corpus", str(other)) == 2
