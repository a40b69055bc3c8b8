from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from assaykg.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    shutil.copy(FIXTURES / "corpus_3assays.jsonl", tmp_path / "corpus.jsonl")
    shutil.copy(FIXTURES / "train_corpus6.jsonl", tmp_path / "train.jsonl")
    return tmp_path


def run(runner, *args, expect_exit=0):
    result = runner.invoke(main, ["--store", "store.json", *args], catch_exceptions=False)
    assert result.exit_code == expect_exit, result.output
    return result


class TestIngestAndStats:
    def test_stats_after_ingesting_fixture(self, runner, workdir):
        run(runner, "ingest", "corpus.jsonl")
        result = run(runner, "stats")
        assert "statements min: 5" in result.output
        assert "statements max: 92" in result.output
        assert "statements mean: 50.0" in result.output

    def test_stats_on_empty_store(self, runner, workdir):
        result = run(runner, "stats")
        assert "assays: 0" in result.output

    def test_ingest_reports_warnings(self, runner, workdir):
        bad = workdir / "bad.jsonl"
        bad.write_text('{"id": "X", "text": "", "statements": []}\n')
        result = runner.invoke(main, ["--store", "store.json", "ingest", str(bad)])
        assert result.exit_code == 0
        assert "1 warnings" in result.output


class TestTrainSemantifyCurate:
    def test_train_writes_model(self, runner, workdir):
        run(runner, "ingest", "train.jsonl")
        result = run(runner, "train", "--seed", "7", "--calibration-split", "0")
        assert "model saved to" in result.output
        assert Path("store.json.model.json").exists()

    def test_semantify_then_curate_then_finalize(self, runner, workdir):
        run(runner, "ingest", "train.jsonl")
        run(runner, "train", "--seed", "7", "--calibration-split", "0")
        text_file = workdir / "new_assay.txt"
        text_file.write_text("Luciferase reporter gene assay; luminescence readout.")
        result = run(runner, "semantify", "--text-file", str(text_file), "--title", "New assay")
        body = json.loads(result.output)
        assert body["proposals"]
        session = body["session_id"]
        decisions = workdir / "decisions.jsonl"
        lines = [
            json.dumps({"proposal_id": p["proposal_id"], "decision": "accepted"})
            for p in body["proposals"]
        ]
        lines.append(json.dumps({"manual": {"property": "has significant direction", "value": "increase"}}))
        decisions.write_text("\n".join(lines) + "\n")
        result = run(
            runner, "curate", session, "--decisions", str(decisions), "--finalize",
            "--paper-title", "CLI paper",
        )
        assert "finalized as C" in result.output

    def test_semantify_auto_accept(self, runner, workdir):
        run(runner, "ingest", "train.jsonl")
        run(runner, "train", "--seed", "7", "--calibration-split", "0")
        text_file = workdir / "auto.txt"
        text_file.write_text("Fluorescence polarization kinase binding assay.")
        result = run(runner, "semantify", "--text-file", str(text_file), "--auto-accept")
        body = json.loads(result.output)
        assert body["contribution_id"].startswith("C")

    def test_semantify_without_model_fails(self, runner, workdir):
        text_file = workdir / "t.txt"
        text_file.write_text("some text")
        result = runner.invoke(main, ["--store", "store.json", "semantify", "--text-file", str(text_file)])
        assert result.exit_code == 1
        assert "error: ModelUnavailable" in result.output


class TestCompareSimilar:
    @pytest.fixture(autouse=True)
    def ingested(self, runner, workdir):
        run(runner, "ingest", "corpus.jsonl")

    def test_compare_csv_header(self, runner, workdir):
        result = run(runner, "compare", "C1", "C2", "C3", "--format", "csv")
        assert result.output.splitlines()[0] == "property,C1,C2,C3"

    def test_compare_text_and_json(self, runner, workdir):
        text = run(runner, "compare", "C1", "C2", "--format", "text").output
        assert text.splitlines()[0].startswith("property")
        doc = json.loads(run(runner, "compare", "C1", "C2", "--format", "json").output)
        assert [c["contribution"] for c in doc["columns"]] == ["C1", "C2"]

    def test_similar_output(self, runner, workdir):
        result = run(runner, "similar", "C2", "-k", "2")
        lines = result.output.splitlines()
        assert len(lines) == 2
        assert lines[0].split("\t")[0] in {"C1", "C3"}

    def test_unknown_contribution_errors(self, runner, workdir):
        result = runner.invoke(main, ["--store", "store.json", "compare", "C404"])
        assert result.exit_code == 1
        assert "error: UnknownContribution" in result.output


class TestExportImportSaveLoad:
    def test_export_import_round_trip(self, runner, workdir):
        run(runner, "ingest", "corpus.jsonl")
        run(runner, "export", "--ntriples", "out.nt")
        exported = Path("out.nt").read_text()
        assert exported
        result = run(runner, "import", "--ntriples", "out.nt")
        assert "imported 0 statements" in result.output
        assert f"{len(exported.splitlines())} duplicates" in result.output

    def test_save_and_load_snapshot(self, runner, workdir):
        run(runner, "ingest", "corpus.jsonl")
        run(runner, "save", "backup.json")
        assert Path("backup.json.manifest.json").exists()
        Path("store.json").unlink()
        run(runner, "load", "backup.json")
        result = run(runner, "stats")
        assert "assays: 3" in result.output


class TestEval:
    def test_eval_deterministic(self, runner, workdir):
        run(runner, "ingest", "train.jsonl")
        first = run(runner, "eval", "--split", "0.2", "--seed", "42").output
        second = run(runner, "eval", "--split", "0.2", "--seed", "42").output
        assert first == second
        assert "micro recall" in first

    def test_eval_without_corpus(self, runner, workdir):
        result = runner.invoke(main, ["--store", "store.json", "eval"])
        assert result.exit_code == 1
        assert "error: EmptyCorpus" in result.output
