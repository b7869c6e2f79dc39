from __future__ import annotations

import json
import subprocess
import sys

import pytest

from negforge.cli import run

GOLDEN_INPUT = "I will be there.\n"


def run_capture(capsys, argv):
    status = run(argv)
    captured = capsys.readouterr()
    return status, captured.out, captured.err


class TestNegateCommand:
    def test_stdin_stdout_golden_row(self, toy_adapter_path):
        process = subprocess.run(
            [sys.executable, "-m", "negforge.cli", "negate",
             "--prefer-contractions"],
            input=GOLDEN_INPUT, capture_output=True, text=True,
        )
        assert process.returncode == 0
        assert process.stdout == "I won't be there.\n"

    def test_file_to_file(self, tmp_path, capsys):
        source = tmp_path / "in.txt"
        source.write_text("I will be there.\nShe knows the answer.\n",
                          encoding="utf-8")
        target = tmp_path / "out.txt"
        status, _, _ = run_capture(capsys, [
            "negate", "--no-contractions",
            "--input", str(source), "--output", str(target),
        ])
        assert status == 0
        assert target.read_text(encoding="utf-8") == \
            "I will not be there.\nShe does not know the answer.\n"

    def test_error_marker_per_line_non_strict(self, tmp_path, capsys):
        source = tmp_path / "in.txt"
        source.write_text("I will be there.\nWow !\nHe does not run.\n",
                          encoding="utf-8")
        status, out, err = run_capture(capsys, ["negate", "--input", str(source)])
        assert status == 0
        lines = out.splitlines()
        assert len(lines) == 3
        assert lines[0] == "I won't be there."
        assert lines[1].startswith("ERROR:")
        assert lines[2] == "He runs."
        assert "1 line(s) failed" in err

    def test_strict_mode_exits_two(self, tmp_path, capsys):
        source = tmp_path / "in.txt"
        source.write_text("Wow !\n", encoding="utf-8")
        status, _, err = run_capture(
            capsys, ["negate", "--strict", "--input", str(source)],
        )
        assert status == 2

    def test_jobs_preserve_order(self, tmp_path, capsys):
        sentences = [f"I will take the w{i} book." for i in range(24)]
        source = tmp_path / "in.txt"
        source.write_text("".join(s + "\n" for s in sentences), encoding="utf-8")
        status, out, _ = run_capture(capsys, [
            "negate", "--jobs", "4", "--input", str(source),
        ])
        assert status == 0
        lines = out.splitlines()
        assert lines == [f"I won't take the w{i} book." for i in range(24)]

    def test_conllu_parser_mode(self, tmp_path, capsys):
        block = (
            "1\tI\ti\tPRON\tPRP\t_\t3\tnsubj\t_\t_\n"
            "2\twill\twill\tAUX\tMD\t_\t3\taux\t_\t_\n"
            "3\tbe\tbe\tAUX\tVB\t_\t0\troot\t_\t_\n"
            "4\tthere\tthere\tADV\tRB\t_\t3\tadvmod\t_\tSpaceAfter=No\n"
            "5\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\tSpaceAfter=No\n\n"
        )
        source = tmp_path / "in.conllu"
        source.write_text(block, encoding="utf-8")
        status, out, _ = run_capture(capsys, [
            "negate", "--parser", "conllu", "--input", str(source),
        ])
        assert status == 0
        assert out == "I won't be there.\n"

    def test_external_parser_command(self, tmp_path, capsys, toy_parser_path):
        source = tmp_path / "in.txt"
        source.write_text("I enjoyed it so much.\n", encoding="utf-8")
        status, out, _ = run_capture(capsys, [
            "negate", "--parser", "external-cmd",
            "--external-parser-cmd", f"{sys.executable} {toy_parser_path}",
            "--no-contractions", "--input", str(source),
        ])
        assert status == 0
        assert out == "I did not enjoy it so much.\n"

    def test_external_without_command_is_usage_error(self, capsys):
        status, _, _ = run_capture(capsys, ["negate", "--parser", "external-cmd"])
        assert status == 1


class TestUsageErrors:
    def test_unknown_flag(self, capsys):
        status, _, err = run_capture(capsys, ["negate", "--bogus"])
        assert status == 1
        assert "usage" in err.lower()

    def test_unknown_subcommand(self, capsys):
        status, _, _ = run_capture(capsys, ["frobnicate"])
        assert status == 1

    def test_metric_flags_are_exclusive(self, tmp_path, capsys):
        dataset = tmp_path / "d.tsv"
        dataset.write_text("reference\tcandidate\tscore\na\tb\t0.5\n",
                           encoding="utf-8")
        status, _, _ = run_capture(capsys, [
            "evaluate", str(dataset), "--metric", "exact",
            "--metric-cmd", "cat",
        ])
        assert status == 1

    def test_metric_required(self, tmp_path, capsys):
        dataset = tmp_path / "d.tsv"
        dataset.write_text("reference\tcandidate\tscore\na\tb\t0.5\n",
                           encoding="utf-8")
        status, _, _ = run_capture(capsys, ["evaluate", str(dataset)])
        assert status == 1


class TestBuildAndSplit:
    def make_config(self, tmp_path):
        (tmp_path / "reviews.txt").write_text(
            "".join(f"I will take the w{i} book.\n" for i in range(10)),
            encoding="utf-8",
        )
        rows = ["reference\tparaphrase"] + [
            f"I will take the w{i} book.\tI am taking the w{i} book."
            for i in range(10)
        ]
        (tmp_path / "para.tsv").write_text("".join(r + "\n" for r in rows),
                                           encoding="utf-8")
        config = {
            "seed": 0,
            "sources": [
                {"name": "sentiment", "kind": "negation_source",
                 "path": "reviews.txt", "format": "txt",
                 "paraphrases": "para.tsv"},
            ],
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        return path

    def test_build_dataset(self, tmp_path, capsys):
        config = self.make_config(tmp_path)
        out_dir = tmp_path / "out"
        status, _, err = run_capture(capsys, [
            "build-dataset", "--config", str(config), "--output", str(out_dir),
        ])
        assert status == 0
        assert (out_dir / "train.tsv").exists()
        report = json.loads((out_dir / "report.json").read_text())
        assert report["negation_pairs_after_swap"] == 40
        sizes = report["split_sizes"]
        assert sizes == {"train": 32, "dev": 4, "test": 4}

    def test_missing_config_is_data_error(self, tmp_path, capsys):
        status, _, _ = run_capture(capsys, [
            "build-dataset", "--config", str(tmp_path / "nope.json"),
        ])
        assert status == 2

    def test_split_deterministic(self, tmp_path, capsys):
        config = self.make_config(tmp_path)
        out_dir = tmp_path / "out"
        assert run([
            "build-dataset", "--config", str(config), "--output", str(out_dir),
        ]) == 0
        capsys.readouterr()
        for target in ("s1", "s2"):
            status, _, _ = run_capture(capsys, [
                "split", "--input", str(out_dir / "train.tsv"),
                "--seed", "7", "--output", str(tmp_path / target),
            ])
            assert status == 0
        assert (tmp_path / "s1" / "train.tsv").read_text() \
            == (tmp_path / "s2" / "train.tsv").read_text()


class TestEvaluateAndSensitivity:
    def test_evaluate_builtin_jaccard(self, tmp_path, capsys):
        dataset = tmp_path / "d.tsv"
        rows = [
            ("the cat sat", "the cat sat", 1.0),
            ("the cat sat", "the cat ran", 0.6),
            ("a b c d", "a b x y", 0.4),
            ("p q r", "x y z", 0.0),
        ]
        dataset.write_text(
            "reference\tcandidate\tscore\n"
            + "".join(f"{r}\t{c}\t{s}\n" for r, c, s in rows),
            encoding="utf-8",
        )
        status, out, _ = run_capture(capsys, [
            "evaluate", str(dataset), "--metric", "jaccard",
        ])
        assert status == 0
        assert out.strip() == "1.000000"

    def test_evaluate_with_external_adapter(self, tmp_path, capsys, toy_adapter_path):
        dataset = tmp_path / "d.tsv"
        dataset.write_text(
            "reference\tcandidate\tscore\n"
            "a a\ta a\t1.0\n"
            "b b\tb x\t0.5\n"
            "c c\tz z\t0.0\n",
            encoding="utf-8",
        )
        status, out, _ = run_capture(capsys, [
            "evaluate", str(dataset),
            "--metric-cmd", f"{sys.executable} {toy_adapter_path} --mode jaccard",
        ])
        assert status == 0
        assert float(out.strip()) == pytest.approx(1.0)

    def test_sensitivity_csv(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.tsv"
        corpus.write_text(
            "reference\tcandidate\n"
            "I will be there.\tI will be there.\n"
            "She knows the answer.\tShe knows the answer.\n",
            encoding="utf-8",
        )
        target = tmp_path / "report.csv"
        status, _, err = run_capture(capsys, [
            "sensitivity", str(corpus), "--metric", "exact",
            "--perturbation", "word_drop", "--perturbation", "negation",
            "--degrees", "1,2", "--output", str(target),
        ])
        assert status == 0
        lines = target.read_text(encoding="utf-8").strip().splitlines()
        assert lines[0].startswith("kind,degree")
        assert len(lines) == 4  # word_drop x2 degrees + negation x1 + header
        for line in lines[1:]:
            assert line.split(",")[3] == "1"

    def test_adapter_failure_exit_code(self, tmp_path, capsys):
        dataset = tmp_path / "d.tsv"
        dataset.write_text("reference\tcandidate\tscore\na\tb\t0.5\nc\td\t0.6\n",
                           encoding="utf-8")
        status, _, err = run_capture(capsys, [
            "evaluate", str(dataset),
            "--metric-cmd", f"{sys.executable} -c \"import time; time.sleep(30)\"",
            "--timeout", "1",
        ])
        assert status == 3


class TestLexiconOverride:
    def test_env_var_changes_lexicon(self, tmp_path):
        import os
        import shutil
        from negforge.resources import lexicon_dir

        custom = tmp_path / "lexicons"
        shutil.copytree(lexicon_dir(), custom)
        contractions = custom / "contractions.tsv"
        # drop the won't row: the negator must fall back to "will not"
        kept = [line for line in contractions.read_text().splitlines()
                if not line.startswith("will\t")]
        contractions.write_text("".join(line + "\n" for line in kept))

        env = dict(os.environ, NEGFORGE_LEXICON_DIR=str(custom))
        process = subprocess.run(
            [sys.executable, "-m", "negforge.cli", "negate",
             "--prefer-contractions"],
            input="I will be there.\n", capture_output=True, text=True, env=env,
        )
        assert process.returncode == 0
        assert process.stdout == "I will not be there.\n"

    def test_jobs_flag_on_evaluate(self, tmp_path, capsys, toy_adapter_path):
        dataset = tmp_path / "d.tsv"
        dataset.write_text(
            "reference\tcandidate\tscore\n"
            + "".join(f"r{i} z\tr{i} z\t{1 - i / 10}\n" for i in range(5))
            + "".join(f"q{i} z\tx{i} y\t{i / 100}\n" for i in range(5)),
            encoding="utf-8",
        )
        status, out, _ = run_capture(capsys, [
            "evaluate", str(dataset), "--jobs", "2",
            "--metric-cmd", f"{sys.executable} {toy_adapter_path} --mode exact",
        ])
        assert status == 0
        assert float(out.strip()) != 0.0


class TestDataErrors:
    def test_too_small_dataset_is_data_error(self, tmp_path, capsys):
        dataset = tmp_path / "tiny.tsv"
        dataset.write_text("reference\tcandidate\tscore\na\tb\t0.5\n",
                           encoding="utf-8")
        status, _, err = run_capture(capsys, [
            "evaluate", str(dataset), "--metric", "jaccard",
        ])
        assert status == 2
        assert "negforge:" in err


class TestCsvFormat:
    def test_build_dataset_csv(self, tmp_path, capsys):
        (tmp_path / "reviews.txt").write_text(
            "I will stay here.\nShe can keep the change.\n", encoding="utf-8",
        )
        (tmp_path / "para.tsv").write_text(
            "reference\tparaphrase\n"
            "I will stay here.\tI am staying here.\n"
            "She can keep the change.\tShe may keep the change.\n",
            encoding="utf-8",
        )
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "seed": 1,
            "sources": [{"name": "sentiment", "kind": "negation_source",
                         "path": "reviews.txt", "format": "txt",
                         "paraphrases": "para.tsv"}],
        }), encoding="utf-8")
        out_dir = tmp_path / "out"
        status, _, _ = run_capture(capsys, [
            "build-dataset", "--config", str(config),
            "--output", str(out_dir), "--format", "csv",
        ])
        assert status == 0
        header = (out_dir / "train.csv").read_text().splitlines()[0]
        assert header == "reference,candidate,score,source,split"
