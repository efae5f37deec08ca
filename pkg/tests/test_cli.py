import json

import pytest

from nctrace import cli
from nctrace.battery import Settings
from nctrace.zetatrace import ModelContractViolation


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_default_config_file_matches_builtin_defaults():
    st, report = cli.load_config("configs/default.toml")
    assert st.to_dict() == Settings().to_dict()
    assert report == "nctrace-report.json"


def test_unknown_key_exits_2_and_names_it(tmp_path, capsys):
    cfg = write(tmp_path, "[model]\nmode_cutof = 3\n")
    assert cli.run(["verify-model", "--config", cfg, "--report", str(tmp_path / "r.json")]) == 2
    assert "model.mode_cutof" in capsys.readouterr().err
    assert not (tmp_path / "r.json").exists()


@pytest.mark.parametrize(
    "text, key",
    [
        ("[mystery]\nx = 1\n", "[mystery]"),
        ("[model]\nbackend = 'fuzzy'\n", "backend"),
        ("[calculus]\nN = 0\n", "N"),
        ("[tolerances]\nrel_tol = -1.0\n", "rel_tol"),
        ("[model]\nem_depth = true\n", "em_depth"),
        ("[battery\nseed = 1\n", "cannot parse"),
    ],
)
def test_malformed_configs_exit_2(tmp_path, capsys, text, key):
    cfg = write(tmp_path, text)
    assert cli.run(["verify-model", "--config", cfg]) == 2
    assert key in capsys.readouterr().err


def test_zero_tolerance_forces_failures_and_still_writes_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.run(["verify-model", "--tol", "0", "--report", str(out), "--jobs", "1"])
    assert code == 1
    report = json.loads(out.read_text())
    assert report["summary"]["failed"] > 0
    assert report["config"]["rel_tol"] == 0.0
    lines = [l for l in capsys.readouterr().out.splitlines() if l[:4] in ("PASS", "FAIL", "SKIP")]
    assert len(lines) == report["summary"]["total"]


def test_report_schema_and_summary_tallies(tmp_path):
    out = tmp_path / "r.json"
    assert cli.run(["verify-residue-theorem", "--report", str(out), "--seed", "7"]) == 0
    r = json.loads(out.read_text())
    assert r["schema_version"] == cli.SCHEMA_VERSION
    assert r["config"]["seed"] == 7
    assert r["summary"]["total"] == len(r["checks"])
    assert r["summary"]["passed"] == sum(c["pass"] and not c["skipped"] for c in r["checks"])
    assert set(r["timestamp"]) == {"started_utc", "wall_times_s", "total_s"}
    assert all(c["anchor"] for c in r["checks"])


def test_config_output_path_and_backend_flag(tmp_path):
    out = tmp_path / "from-config.json"
    cfg = write(tmp_path, f"[output]\nreport = {json.dumps(str(out))}\n[battery]\nfamilies = 12\n")
    assert cli.run(["verify-residue-theorem", "--config", cfg, "--backend", "exact"]) == 0
    r = json.loads(out.read_text())
    assert r["config"]["backend"] == "exact" and r["config"]["families"] == 12


def test_contract_violation_exits_3(tmp_path, monkeypatch, capsys):
    def broken(suite, st):
        raise ModelContractViolation("pole of order 3 at 1 exceeds multiplicity bound 1")

    monkeypatch.setattr(cli, "run_suite", broken)
    out = tmp_path / "r.json"
    assert cli.run(["verify-model", "--report", str(out), "--jobs", "1"]) == 3
    assert "multiplicity bound" in capsys.readouterr().err
    assert json.loads(out.read_text())["errors"][0]["kind"] == "contract"


def test_exit_status_is_a_function_of_the_summary():
    base = {"errors": [], "summary": {"failed": 0}}
    assert cli.exit_status(base) == 0
    assert cli.exit_status({**base, "summary": {"failed": 2}}) == 1
    assert cli.exit_status({"errors": [{"kind": "bounds"}], "summary": {"failed": 0}}) == 2
    assert cli.exit_status({"errors": [{"kind": "contract"}], "summary": {"failed": 1}}) == 3


def test_pool_and_serial_runs_agree():
    st = Settings(seed=11)
    suites = ("residue-theorem", "model")
    serial = cli.execute(suites, st, jobs=1)
    pooled = cli.execute(suites, st, jobs=2)
    assert list(pooled) == list(suites)
    for s in suites:
        assert serial[s][:2] == pooled[s][:2]
