"""Acceptance criteria, one test each; a pass/fail line per criterion is printed."""
import subprocess
import sys
import time

import pytest

from spinor_spectra import verify

CLI = [sys.executable, "-m", "spinor_spectra"]


def record(log, key, name, passed, detail, seconds):
    line = verify.CheckResult(key, name, passed, detail, seconds).line()
    log.append(line)
    print(line)


@pytest.mark.parametrize("criterion", verify.CRITERIA, ids=lambda c: c.key)
def test_criterion(criterion, acceptance_log):
    result = verify.run_check(criterion)
    record(acceptance_log, result.key, result.name, result.passed, result.detail, result.seconds)
    assert result.passed, result.detail


def run_cli(*argv, timeout=400):
    return subprocess.run(CLI + list(argv), capture_output=True, timeout=timeout)


def test_c11_cli_determinism(acceptance_log):
    start = time.perf_counter()
    problems = []
    commands = [
        ("spectrum", "--radial", "coulomb", "--v0lambda", "0.2", "--angular", "f1"),
        ("spectrum", "--radial", "oscillator", "--k", "0.5", "--angular", "f3",
         "--alpha", "0.05", "--beta", "0.02"),
        ("wavefunction", "--factor", "radial", "--samples", "50", "--angular", "f2",
         "--alpha", "0.5", "--beta", "0.1", "--gamma", "0.3", "--m", "1"),
        ("wavefunction", "--factor", "angular", "--samples", "50", "--angular", "f3",
         "--alpha", "0.0625", "--beta", "0.2", "--eta", "1"),
        ("wavefunction", "--factor", "azimuthal", "--samples", "50", "--m", "2"),
    ]
    for argv in commands:
        first, second = run_cli(*argv), run_cli(*argv)
        if first.returncode != 0 or first.stdout != second.stdout or not first.stdout:
            problems.append(" ".join(argv[:3]))
    t0 = time.perf_counter()
    suite = run_cli("verify", "--suite", "all")
    suite_seconds = time.perf_counter() - t0
    if suite.returncode != 0:
        problems.append("verify --suite all exit " + str(suite.returncode))
    if suite_seconds > 300:
        problems.append(f"verify took {suite_seconds:.0f}s")
    detail = ("; ".join(problems) if problems else
              f"{len(commands)} commands byte-identical; verify --suite all exit 0 "
              f"in {suite_seconds:.1f}s")
    record(acceptance_log, "C11", "CLI determinism", not problems, detail,
           time.perf_counter() - start)
    assert not problems, detail + "\n" + suite.stdout.decode()
