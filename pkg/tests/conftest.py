import re
import time

import pytest

from honeyrg.cutoffs import SliceConfig
from honeyrg.perturbation import sunshine_self_energy_scan

LAM = 0.01


@pytest.fixture(scope="session")
def shallow_scan():
    """gamma = 4, T = 0.01 on a 256^2 box, r = 1..3, with the r = 3 kernel kept (a few seconds)."""
    return sunshine_self_energy_scan(LAM, [1, 2, 3], SliceConfig(gamma=4, T=0.01), L=256, moments=True,
                                     keep_kernel=3)


@pytest.fixture(scope="session")
def deep_scan():
    """gamma = 4, T = 0.0025 on a 512^2 box, r = 2..4 (about two minutes)."""
    t = time.perf_counter()
    scan = sunshine_self_energy_scan(LAM, [2, 3, 4], SliceConfig(gamma=4, T=0.0025), L=512, moments=True)
    scan.meta["elapsed"] = time.perf_counter() - t
    return scan


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    status = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            m = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+)", getattr(rep, "nodeid", ""))
            if not m:
                continue
            cid = (int(m.group(1)), m.group(2))
            ok = rep.passed and rep.when == "call"
            if not rep.passed or rep.when == "call":
                status[cid] = status.get(cid, True) and ok
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for (i, name), ok in sorted(status.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {i:2d}  {name}")
