import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gompsnr.signal_io import write_wav  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def speechlike(rng, n, sr=22050):
    """Harmonic tone with a slow amplitude envelope plus a little noise."""
    t = np.arange(n) / sr
    f0 = rng.uniform(100, 220)
    x = sum(rng.uniform(0.2, 1.0) / h * np.sin(2 * np.pi * f0 * h * t + rng.uniform(0, 2 * np.pi)) for h in range(1, 8))
    env = 0.6 + 0.4 * np.sin(2 * np.pi * rng.uniform(1, 4) * t)
    x = x * env + 0.01 * rng.standard_normal(n)
    return 0.5 * x / np.max(np.abs(x))


@pytest.fixture
def corpus(tmp_path):
    """Ten generated pairs on disk plus a manifest; returns the manifest path."""
    r = np.random.default_rng(7)
    lines = ["id,ref_path,est_path"]
    for j in range(10):
        ref = speechlike(r, 6000)
        est = ref + (0.002 * (j + 1)) * r.standard_normal(ref.size)
        write_wav(tmp_path / f"ref{j}.wav", ref, 22050)
        write_wav(tmp_path / f"est{j}.wav", est, 22050)
        lines.append(f"u{j},ref{j}.wav,est{j}.wav")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _ACCEPTANCE:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name[5:]}  ({duration:.2f}s)")
