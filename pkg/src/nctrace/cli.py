"""Command-line runner: read a TOML config, run batteries, write a JSON report.

Exit status is 0 when every check passes, 1 when any check fails, 2 for a
bad configuration (or truncation bounds too small for it) and 3 when the
trace model breaks its own contract.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from datetime import datetime, timezone

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .battery import SUITES, Settings, run_suite
from .circle import InsufficientDepth
from .ncalg import AlgebraBoundError
from .symbols import InsufficientTruncation
from .zetatrace import ModelContractViolation

SCHEMA_VERSION = 1

COMMANDS = {
    "verify-residue-theorem": ("residue-theorem",),
    "verify-weight-discrepancy": ("weight-discrepancy",),
    "verify-commutator-discrepancy": ("commutator-discrepancy",),
    "verify-canonical-trace": ("canonical-trace",),
    "verify-model": ("model",),
    "all": SUITES,
}

SECTIONS = {
    "model": ("mode_cutoff", "asym_order", "em_depth", "head_cutoff", "oracle_cutoff", "backend"),
    "calculus": ("N", "commutator_N", "M_ch", "pole_bound"),
    "battery": ("seed", "families"),
    "tolerances": ("rel_tol", "abs_tol", "invariance_tol", "oracle_tol", "consistency_tol"),
    "output": ("report",),
}

TOLERANCES = SECTIONS["tolerances"]
DEFAULT_REPORT = "nctrace-report.json"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONTRACT = 0, 1, 2, 3


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def validate(st: Settings):
    for key in ("mode_cutoff", "asym_order", "em_depth", "head_cutoff", "oracle_cutoff", "N", "commutator_N", "M_ch", "families"):
        v = getattr(st, key)
        if not _is_int(v) or v <= 0:
            raise ConfigError(f"{key}: expected a positive integer, got {v!r}")
    if not _is_int(st.pole_bound) or st.pole_bound < 0:
        raise ConfigError(f"pole_bound: expected a nonnegative integer, got {st.pole_bound!r}")
    if not _is_int(st.seed):
        raise ConfigError(f"seed: expected an integer, got {st.seed!r}")
    if st.backend not in ("exact", "float"):
        raise ConfigError(f"backend: expected 'exact' or 'float', got {st.backend!r}")
    for key in TOLERANCES:
        v = getattr(st, key)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
            raise ConfigError(f"{key}: expected a finite tolerance >= 0, got {v!r}")
        setattr(st, key, float(v))
    return st


def load_config(path: str | None) -> tuple[Settings, str]:
    """Parse a config file into settings and a report path."""
    values = {}
    report = DEFAULT_REPORT
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except OSError as ex:
            raise ConfigError(f"cannot read config {path!r}: {ex.strerror}") from ex
        except tomllib.TOMLDecodeError as ex:
            raise ConfigError(f"cannot parse config {path!r}: {ex}") from ex
        for section, body in doc.items():
            if section not in SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            if not isinstance(body, dict):
                raise ConfigError(f"[{section}] must be a table")
            for key, v in body.items():
                if key not in SECTIONS[section]:
                    raise ConfigError(f"unknown config key {section}.{key}")
                if section == "output":
                    if not isinstance(v, str) or not v:
                        raise ConfigError(f"output.report: expected a path, got {v!r}")
                    report = v
                else:
                    values[key] = v
    known = {f.name for f in fields(Settings)}
    st = Settings(**{k: v for k, v in values.items() if k in known})
    return validate(st), report


def _run_suite_worker(suite: str, settings: dict):
    # top level so a process pool can pickle it
    st = Settings(**settings)
    t0 = time.perf_counter()
    try:
        reports = run_suite(suite, st)
    except ModelContractViolation as ex:
        return suite, "contract", str(ex), time.perf_counter() - t0
    except (InsufficientTruncation, InsufficientDepth, AlgebraBoundError) as ex:
        return suite, "bounds", f"{type(ex).__name__}: {ex}", time.perf_counter() - t0
    return suite, "ok", [r.to_dict() for r in reports], time.perf_counter() - t0


def execute(suites, st: Settings, jobs: int):
    """Run suites, returning results keyed by suite name in suite order."""
    settings = st.to_dict()
    if jobs <= 1 or len(suites) == 1:
        done = [_run_suite_worker(s, settings) for s in suites]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(suites))) as pool:
            futures = [pool.submit(_run_suite_worker, s, settings) for s in suites]
            done = [f.result() for f in futures]
    by_name = {name: (status, payload, wall) for name, status, payload, wall in done}
    return {s: by_name[s] for s in suites}


def build_report(command, st, results, started):
    checks, errors, walls = [], [], {}
    for suite, (status, payload, wall) in results.items():
        walls[suite] = round(wall, 3)
        if status == "ok":
            for i, d in enumerate(payload):
                checks.append({"suite": suite, "index": i, **d})
        else:
            errors.append({"suite": suite, "kind": status, "message": payload})
    checks.sort(key=lambda c: (SUITES.index(c["suite"]), c["index"]))
    per_suite = {}
    for suite in results:
        mine = [c for c in checks if c["suite"] == suite]
        per_suite[suite] = {
            "total": len(mine),
            "passed": sum(c["pass"] and not c["skipped"] for c in mine),
            "failed": sum(not c["pass"] for c in mine),
            "skipped": sum(c["skipped"] for c in mine),
        }
    summary = {k: sum(v[k] for v in per_suite.values()) for k in ("total", "passed", "failed", "skipped")}
    summary["errors"] = len(errors)
    summary["suites"] = per_suite
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": st.to_dict(),
        "checks": checks,
        "errors": errors,
        "summary": summary,
        "timestamp": {
            "started_utc": started,
            "wall_times_s": walls,
            "total_s": round(sum(walls.values()), 3),
        },
    }


def exit_status(report) -> int:
    """Exit code as a function of the report's summary and errors."""
    kinds = {e["kind"] for e in report["errors"]}
    if "contract" in kinds:
        return EXIT_CONTRACT
    if "bounds" in kinds:
        return EXIT_CONFIG
    return EXIT_FAIL if report["summary"]["failed"] else EXIT_OK


def _progress_line(c):
    tag = "SKIP" if c["skipped"] else ("PASS" if c["pass"] else "FAIL")
    return f"{tag}  {c['suite']:<22} {c['check_name']}  abs_err={c['abs_err']}  rel_err={c['rel_err']}"


def build_parser():
    p = argparse.ArgumentParser(prog="nctrace", description="Verify residue-trace identities on the circle spectral triple.")
    p.add_argument("command", choices=list(COMMANDS), help="battery to run")
    p.add_argument("--config", help="TOML config file (defaults apply when omitted)")
    p.add_argument("--tol", type=float, help="override every tolerance in the config")
    p.add_argument("--seed", type=int, help="override the battery seed")
    p.add_argument("--report", help="where to write the JSON report")
    p.add_argument("--backend", choices=("exact", "float"), help="scalar backend")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (default: all CPUs)")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        st, report_path = load_config(args.config)
        if args.tol is not None:
            for key in TOLERANCES:
                setattr(st, key, args.tol)
        if args.seed is not None:
            st.seed = args.seed
        if args.backend is not None:
            st.backend = args.backend
        if args.report is not None:
            report_path = args.report
        if args.jobs < 1:
            raise ConfigError(f"jobs: expected a positive integer, got {args.jobs}")
        validate(st)
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return EXIT_CONFIG

    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    results = execute(COMMANDS[args.command], st, args.jobs)
    report = build_report(args.command, st, results, started)
    for c in report["checks"]:
        print(_progress_line(c))
    for e in report["errors"]:
        label = "model contract violated" if e["kind"] == "contract" else "truncation bounds too small"
        print(f"ERROR {e['suite']}: {label}: {e['message']}", file=sys.stderr)
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    s = report["summary"]
    print(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped, {s['errors']} errors; report: {report_path}")
    return exit_status(report)


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
