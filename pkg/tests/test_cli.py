"""End-to-end command-line behavior: exit codes, output, results dirs."""
import json
import os
import shutil
import subprocess

import pytest

from mvl.cli import (
    EXIT_NO_PATCHES, EXIT_NONCONFORMING, EXIT_OK, EXIT_USAGE, run,
)

from conftest import CORPUS, TESTS_DIR

CANONICAL = str(CORPUS / "find_first_odd.mvl")
REPAIRED = str(CORPUS / "find_first_odd_repaired.mvl")
ALL_EVEN = str(TESTS_DIR / "all_even.mvl")

EXPECTED_PANEL = (
    "line 2: Error 1: index out of range.\n"
    "line 3: Error 2: index out of range.\n"
    "line 4: Error 3: A postcondition might not hold on this path.\n"
    "line 2: This is the postcondition that might not hold.\n"
    "3 errors\n"
)

NO_PATCH_PROGRAM = ("method N(x: int) returns (y: bool)\n"
                    "  ensures {:trusted} y\n{\n  y := false;\n}\n")


class TestVerify:
    def test_nonconforming_panel_and_exit(self, capsys):
        assert run(["verify", CANONICAL]) == EXIT_NONCONFORMING
        assert capsys.readouterr().out == EXPECTED_PANEL + "\n"

    def test_conforming_input(self, capsys):
        assert run(["verify", REPAIRED]) == EXIT_OK
        assert capsys.readouterr().out.endswith("0 errors\n\n")

    def test_json_payload(self, capsys):
        assert run(["verify", CANONICAL, "--json"]) == EXIT_NONCONFORMING
        data = json.loads(capsys.readouterr().out)
        assert data["file"] == CANONICAL
        assert data["holds"] is False
        assert data["errors"] == 3
        assert [t["kind"] for t in data["traces"]] == [
            "signature_wf", "signature_wf", "postcondition"]

    def test_missing_file(self, capsys):
        assert run(["verify", "no-such-file.mvl"]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err


class TestExplain:
    def test_report_text(self, capsys):
        assert run(["explain", CANONICAL]) == EXIT_NONCONFORMING
        out = capsys.readouterr().out
        assert "partitions: 20 conforming, 3 nonconforming" in out

    def test_json_payload(self, capsys):
        assert run(["explain", CANONICAL, "--json"]) == EXIT_NONCONFORMING
        data = json.loads(capsys.readouterr().out)
        assert len(data["hard"]) == 25
        assert len(data["soft"]) == 10
        assert data["unknown_partitions"] == []


class TestRepair:
    def test_running_example(self, tmp_path, capsys):
        out_dir = str(tmp_path / "results")
        code = run(["repair", CANONICAL, "--seed", "7", "--out", out_dir])
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "status: conforming" in stdout
        summary = (tmp_path / "results" / "summary.txt").read_text()
        assert summary.splitlines()[:4] == [
            "status: conforming", "campaigns: 2", "candidates: 1",
            "elapsed_ms: 0"]
        assert "candidate-001: 2 patches" in summary
        cand = tmp_path / "results" / "candidate-001"
        patched = (cand / "patched.mvl").read_text()
        assert ("ensures 0 <= odd && odd < arr.Length ==> arr[odd] % 2 != 0"
                " // pr {:trusted}") in patched
        patches = (cand / "patches.txt").read_text()
        assert "# campaign 1 synthesizer=" in patches
        assert "# modification 1" in patches
        log_lines = (cand / "run.log").read_text().splitlines()
        events = [json.loads(line) for line in log_lines]
        assert all(e["elapsed_ms"] == 0 for e in events)
        assert [e["event"] for e in events[:1]] == ["campaign_start"]

    def test_json_summary_matches_stdout(self, tmp_path, capsys):
        out_dir = str(tmp_path / "results")
        code = run(["repair", CANONICAL, "--seed", "7", "--out", out_dir,
                    "--json"])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        on_disk = json.loads((tmp_path / "results" / "summary.json")
                             .read_text())
        # The file copy omits out_dir so results directories stay
        # byte-reproducible across machines.
        assert printed.pop("out_dir") == out_dir
        assert printed == on_disk
        assert on_disk["status"] == "conforming"
        assert on_disk["campaigns"] == 2
        assert on_disk["tests"] == []

    def test_zero_campaign_budget(self, tmp_path, capsys):
        out_dir = str(tmp_path / "results")
        code = run(["repair", CANONICAL, "--max-campaigns", "0",
                    "--out", out_dir])
        assert code == EXIT_NONCONFORMING
        assert "status: budget_exhausted" in capsys.readouterr().out

    def test_no_patches_exit_code(self, tmp_path, capsys):
        src = tmp_path / "n.mvl"
        src.write_text(NO_PATCH_PROGRAM)
        code = run(["repair", str(src), "--out", str(tmp_path / "r")])
        assert code == EXIT_NO_PATCHES
        capsys.readouterr()

    def test_default_out_dir_from_filename(self, tmp_path, capsys,
                                           monkeypatch):
        monkeypatch.chdir(tmp_path)
        shutil.copy(REPAIRED, tmp_path / "ok.mvl")
        assert run(["repair", "ok.mvl"]) == EXIT_OK
        assert (tmp_path / "ok-repair" / "summary.txt").exists()
        capsys.readouterr()


class TestAlign:
    def test_single_test_alignment(self, tmp_path, capsys):
        out_dir = str(tmp_path / "results")
        code = run(["align", REPAIRED, "--tests", ALL_EVEN, "--out", out_dir])
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "status: conforming" in stdout
        assert "triples: 1" in stdout
        summary = (tmp_path / "results" / "summary.txt").read_text()
        assert "tests: AllEven" in summary
        patched = (tmp_path / "results" / "candidate-001" /
                   "patched.mvl").read_text()
        assert ("ensures (forall i :: 0 <= i < arr.Length ==> "
                "arr[i] % 2 == 0) ==> odd == -1 // pr {:trusted}") in patched

    def test_tests_directory_is_globbed(self, tmp_path, capsys):
        tdir = tmp_path / "tests"
        tdir.mkdir()
        shutil.copy(ALL_EVEN, tdir / "all_even.mvl")
        (tdir / "notes.txt").write_text("not a test\n")
        code = run(["align", REPAIRED, "--tests", str(tdir),
                    "--out", str(tmp_path / "r")])
        assert code == EXIT_OK
        assert "tests: AllEven" in (tmp_path / "r" / "summary.txt").read_text()
        capsys.readouterr()

    def test_without_tests_acts_like_repair(self, tmp_path, capsys):
        out_dir = str(tmp_path / "results")
        code = run(["align", REPAIRED, "--out", out_dir])
        assert code == EXIT_OK
        summary = (tmp_path / "results" / "summary.txt").read_text()
        assert "tests:" not in summary
        assert "candidates: 1" in summary
        capsys.readouterr()


class TestScore:
    def test_requires_tests(self, capsys):
        assert run(["score", REPAIRED]) == EXIT_USAGE
        assert "no tests given" in capsys.readouterr().err

    def test_report_output(self, capsys):
        assert run(["score", REPAIRED, "--tests", ALL_EVEN]) == EXIT_OK
        assert "score: 0.4000 (8/20 killed)" in capsys.readouterr().out

    def test_json_output(self, capsys):
        code = run(["score", REPAIRED, "--tests", ALL_EVEN, "--json"])
        assert code == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["method"] == "FindFirstOdd"
        assert data["score"] == pytest.approx(0.4)
        assert (data["killed"], data["total_mutations"]) == (8, 20)
        assert len(data["per_mutation"]) == 20
        assert set(data["per_mutation"][0]) == {"oracle", "inconsistent"}


class TestConfig:
    def test_domain_from_config_changes_the_verdict(self, tmp_path, capsys):
        src = tmp_path / "m.mvl"
        src.write_text("method M(x: int) returns (y: int)\n"
                       "  ensures y <= 4\n{\n  y := x;\n}\n")
        assert run(["verify", str(src)]) == EXIT_OK
        cfg = tmp_path / "wide.cfg"
        cfg.write_text("domain.int_hi = 6\n")
        assert run(["verify", str(src), "--config", str(cfg)]) == \
            EXIT_NONCONFORMING
        capsys.readouterr()

    def test_synth_flag_overrides_config_command(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("synth.cmd = /no/such/synthesizer\n")
        out_dir = str(tmp_path / "r")
        code = run(["repair", CANONICAL, "--seed", "7", "--config", str(cfg),
                    "--synth", "enumerative", "--out", out_dir])
        assert code == EXIT_OK
        capsys.readouterr()

    def test_broken_external_synthesizer_fails_campaigns(self, tmp_path,
                                                         capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("synth.cmd = /no/such/synthesizer\n")
        code = run(["repair", CANONICAL, "--config", str(cfg),
                    "--max-campaigns", "1", "--out", str(tmp_path / "r")])
        assert code == EXIT_NONCONFORMING
        capsys.readouterr()

    def test_bad_config_is_a_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("nope = 1\n")
        assert run(["verify", CANONICAL, "--config", str(cfg)]) == EXIT_USAGE
        assert "unknown config key" in capsys.readouterr().err


class TestResultsDirSafety:
    def test_refuses_to_clobber_foreign_directories(self, tmp_path, capsys):
        out_dir = tmp_path / "precious"
        out_dir.mkdir()
        (out_dir / "thesis.tex").write_text("irreplaceable\n")
        code = run(["repair", CANONICAL, "--out", str(out_dir)])
        assert code == EXIT_USAGE
        assert "refusing to overwrite" in capsys.readouterr().err
        assert (out_dir / "thesis.tex").exists()

    def test_reuses_prior_results_directories(self, tmp_path, capsys):
        out_dir = str(tmp_path / "results")
        assert run(["repair", CANONICAL, "--seed", "7",
                    "--out", out_dir]) == EXIT_OK
        stale = tmp_path / "results" / "candidate-999"
        stale.mkdir()
        assert run(["repair", CANONICAL, "--seed", "7",
                    "--out", out_dir]) == EXIT_OK
        assert not stale.exists()
        capsys.readouterr()


class TestConsoleScript:
    def test_installed_entry_point(self):
        exe = shutil.which("mvl")
        assert exe, "console script not on PATH"
        proc = subprocess.run([exe, "verify", REPAIRED],
                              capture_output=True, text=True)
        assert proc.returncode == EXIT_OK
        assert proc.stdout.endswith("0 errors\n\n")
