"""CLI behaviour: scripted creation, validation, interchange, search."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from framesmith.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
SCRIPT = FIXTURES / "brazilian_way.script"
FML = FIXTURES / "brazilian_way.fml"


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCreateScript:
    def test_walkthrough_script_commits_both_frames(self, tmp_path, capsys):
        store = str(tmp_path / "frames.db")
        code, out, err = run(capsys, "--store", store, "create", "--script", str(SCRIPT))
        assert code == 0, err
        assert "committed Attempting_and_resolving_scenario" in out
        assert "committed Brazilian_way" in out

    def test_search_finds_committed_frame(self, tmp_path, capsys):
        store = str(tmp_path / "frames.db")
        run(capsys, "--store", store, "create", "--script", str(SCRIPT))
        code, out, _ = run(
            capsys, "--store", store, "search", "jeitinho", "--pos", "n", "--lang", "pt-BR"
        )
        assert code == 0
        assert "Brazilian_way" in out

    def test_rejected_step_fails_with_findings_on_stderr(self, tmp_path, capsys):
        script = tmp_path / "bad.script"
        script.write_text(
            '{"op": "start", "flow": "non_lexical"}\n'
            '{"op": "step", "step": "type_selection", "payload": {"frame_type": "event"}}\n',
            encoding="utf-8",
        )
        store = str(tmp_path / "frames.db")
        code, _, err = run(capsys, "--store", store, "create", "--script", str(script))
        assert code == 1
        assert "NONLEXICAL_NO_LANGUAGE" in err


class TestValidate:
    def test_walkthrough_fixture_passes(self, tmp_path, capsys):
        code, out, _ = run(capsys, "--store", str(tmp_path / "s.db"), "validate", str(FML))
        assert code == 0
        assert "Brazilian_way: Pass" in out

    def test_invalid_document_fails(self, tmp_path, capsys):
        doc = json.loads(FML.read_text(encoding="utf-8"))
        for frame in doc["frames"]:
            if frame["name"] == "Brazilian_way":
                frame["fes"] = []
        bad = tmp_path / "bad.fml"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run(capsys, "--store", str(tmp_path / "s.db"), "validate", str(bad))
        assert code == 1
        assert "Brazilian_way: Fail" in out
        assert "NO_FES" in out


class TestIngest:
    def test_empty_source_exits_one(self, tmp_path, capsys):
        empty = tmp_path / "empty.tsv"
        empty.write_text("", encoding="utf-8")
        code, _, err = run(capsys, "--store", str(tmp_path / "s.db"), "ingest-lexicon", str(empty))
        assert code == 1
        assert "EMPTY_SOURCE" in err

    def test_ingest_merges_into_configured_lexicon(self, tmp_path, capsys):
        lexicon_file = tmp_path / "lexicon.tsv"
        extra = tmp_path / "extra.tsv"
        extra.write_text("s1\ten\tn\tpurchase\ns1\ten\tn\tbuy\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            "--store", str(tmp_path / "s.db"),
            "--lexicon", str(lexicon_file),
            "ingest-lexicon", str(extra),
        )
        assert code == 0
        assert "ingested 1 synsets, 2 lemmas" in out
        assert lexicon_file.exists()
        # merging the same file again adds nothing and keeps the file identical
        before = lexicon_file.read_text(encoding="utf-8")
        code, out, _ = run(
            capsys,
            "--store", str(tmp_path / "s.db"),
            "--lexicon", str(lexicon_file),
            "ingest-lexicon", str(extra),
        )
        assert "ingested 0 synsets, 0 lemmas" in out
        assert lexicon_file.read_text(encoding="utf-8") == before


class TestInterchangeCommands:
    def test_export_is_byte_identical_across_runs(self, tmp_path, capsys):
        store = str(tmp_path / "frames.db")
        run(capsys, "--store", store, "create", "--script", str(SCRIPT))
        out1 = tmp_path / "one.fml"
        out2 = tmp_path / "two.fml"
        assert run(capsys, "--store", store, "export", str(out1))[0] == 0
        assert run(capsys, "--store", store, "export", str(out2))[0] == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_import_then_search(self, tmp_path, capsys):
        store = str(tmp_path / "frames.db")
        code, out, err = run(capsys, "--store", store, "import", str(FML))
        assert code == 0, err
        assert "imported 2 frames, skipped 0" in out
        code, out, _ = run(
            capsys, "--store", store, "search", "jeitinho", "--pos", "n", "--lang", "pt-BR"
        )
        assert "Brazilian_way" in out

    def test_import_strict_conflict_exits_one(self, tmp_path, capsys):
        store = str(tmp_path / "frames.db")
        run(capsys, "--store", store, "import", str(FML))
        code, _, err = run(capsys, "--store", store, "import", str(FML), "--strict")
        assert code == 1
        assert "CONFLICT" in err

    def test_export_to_stdout(self, tmp_path, capsys):
        store = str(tmp_path / "frames.db")
        run(capsys, "--store", store, "import", str(FML))
        code, out, _ = run(capsys, "--store", store, "export")
        assert code == 0
        assert json.loads(out)["schema_version"] == 1


class TestUsage:
    def test_missing_subcommand_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["search", "--frobnicate"])
        assert exc.value.code == 2

    def test_missing_file_is_operation_failure(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "--store", str(tmp_path / "s.db"), "import", str(tmp_path / "none.fml")
        )
        assert code == 1
        assert err
