from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from bdlab.cli import main
from bdlab.serialize import stable_json
from conftest import micro_config


@pytest.fixture()
def micro_path(tmp_path):
    path = tmp_path / "micro.json"
    path.write_text(stable_json(micro_config(horizon=3).to_json_dict()))
    return str(path)


@pytest.fixture()
def failing_path(tmp_path):
    path = tmp_path / "tiny-cap.json"
    path.write_text(stable_json(micro_config(horizon=3, level_cap=1).to_json_dict()))
    return str(path)


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_enumerate_text_dump(capsys, micro_path):
    code, out, _ = run_cli(capsys, "enumerate", "--config", micro_path)
    assert code == 0
    assert out.splitlines()[0] == "# bdlab universe dump v1"


def test_enumerate_json_payload(capsys, micro_path):
    code, out, _ = run_cli(
        capsys, "enumerate", "--config", micro_path, "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "bdlab.enumerate/1"
    assert payload["element_count"] == 46
    assert len(payload["elements"]) == 46
    base = payload["elements"][0]
    assert base["kind"] == "base" and base["rank"] == 1 and base["sigma"] == 2


def test_json_output_is_byte_identical_across_runs(capsys, micro_path):
    _, first, _ = run_cli(capsys, "verify", "--config", micro_path, "--format", "json")
    _, second, _ = run_cli(capsys, "verify", "--config", micro_path, "--format", "json")
    assert first == second


def test_verify_strict_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--config", "desk-strict")
    assert code == 0
    assert out.rstrip().splitlines()[-1] == "result: PASS"


def test_verify_reports_failure_with_exit_1(capsys, failing_path):
    code, out, _ = run_cli(capsys, "verify", "--config", failing_path)
    assert code == 1
    assert out.rstrip().splitlines()[-1] == "result: FAIL"


def test_verify_suites_filter(capsys, micro_path):
    code, out, _ = run_cli(
        capsys,
        "verify",
        "--config",
        micro_path,
        "--suites",
        "functional,gamma",
        "--format",
        "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert [s["name"] for s in payload["suites"]] == ["gamma", "functional"]


def test_verify_unknown_suite_exits_2(capsys, micro_path):
    code, _, err = run_cli(
        capsys, "verify", "--config", micro_path, "--suites", "bogus"
    )
    assert code == 2
    assert "unknown suites: bogus" in err


def test_missing_config_exits_2(capsys):
    code, _, err = run_cli(capsys, "verify", "--config", "/no/such/file.json")
    assert code == 2
    assert "error" in err


def test_malformed_config_exits_2(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"k\": 3}\n")
    code, _, err = run_cli(capsys, "verify", "--config", str(path))
    assert code == 2
    assert "config error" in err


def test_timing_is_opt_in(capsys, micro_path):
    _, plain, _ = run_cli(capsys, "verify", "--config", micro_path, "--format", "json")
    _, timed, _ = run_cli(
        capsys, "verify", "--config", micro_path, "--format", "json", "--timing"
    )
    assert "timings" not in json.loads(plain)
    assert set(json.loads(timed)["timings"]) == {"gamma", "functional", "shift", "sequence"}


def test_horizon_env_override(capsys, monkeypatch):
    monkeypatch.setenv("BDLAB_HORIZON", "3")
    code, out, _ = run_cli(
        capsys, "enumerate", "--config", "desk-strict", "--format", "json"
    )
    assert code == 0
    assert json.loads(out)["element_count"] == 34  # levels 3+7+24

    monkeypatch.setenv("BDLAB_HORIZON", "soon")
    code, _, err = run_cli(capsys, "enumerate", "--config", "desk-strict")
    assert code == 2
    assert "BDLAB_HORIZON must be an integer" in err


def test_out_writes_file_instead_of_stdout(capsys, micro_path, tmp_path):
    target = tmp_path / "dump.json"
    code, out, _ = run_cli(
        capsys,
        "enumerate",
        "--config",
        micro_path,
        "--format",
        "json",
        "--out",
        str(target),
    )
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["schema"] == "bdlab.enumerate/1"


def test_pair_certificate(capsys):
    code, out, _ = run_cli(
        capsys, "pair", "--config", "desk-strict", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "bdlab.pair/1"
    assert payload["certifies_at_minimal"] is True
    construction = payload["construction"]
    assert all(c["status"] == "PASS" for c in construction["clauses"])
    assert construction["pair_report"]["certifies"] is True


def test_pair_text_lines(capsys):
    code, out, _ = run_cli(capsys, "pair", "--config", "desk-strict", "--count", "1")
    assert code == 0
    lines = out.rstrip().splitlines()
    assert lines[-1] == "result: PASS"
    assert any(line.startswith("minimal certifying constant:") for line in lines)


def test_depseq_certificate(capsys):
    code, out, _ = run_cli(
        capsys, "depseq", "--config", "desk-strict", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "bdlab.depseq/1"
    certificate = payload["certificate"]
    assert certificate["xi_chain"] and certificate["eta_seq"]
    identity = [c for c in certificate["clauses"] if c["kind"] == "identity"]
    assert identity and all(c["status"] == "PASS" for c in identity)


def test_report_document(capsys):
    code, out, _ = run_cli(
        capsys, "report", "--config", "desk-strict", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "bdlab.report/1"
    assert payload["result"] == "PASS"
    assert payload["verification"]["result"] == "PASS"
    assert payload["pair"]["pair_report"]["certifies"] is True
    assert "unsatisfiable" not in payload["chain"]
    assert payload["chain"]["xi_chain"]


def test_console_script_is_installed(micro_path):
    exe = shutil.which("bdlab")
    assert exe, "console script not on PATH"
    proc = subprocess.run(
        [exe, "enumerate", "--config", micro_path, "--format", "json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema"] == "bdlab.enumerate/1"
