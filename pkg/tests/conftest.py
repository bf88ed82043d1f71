import os

import numpy as np
import pytest

from symzeta.combined import FuncId
from symzeta.potential import load_zeta_zeros
from symzeta.zeros import scan

DATA = os.path.join(os.path.dirname(__file__), "data")
ORDINATES = os.path.join(DATA, "zeta_ordinates.txt")


@pytest.fixture(scope="session")
def zeta_table():
    """First 1518 zeta ordinates (independently computed with mpmath.zetazero)."""
    return load_zeta_zeros(ORDINATES)


@pytest.fixture(scope="session")
def scans_1000():
    """Critical-line zeros of the four tabulated functions on (0, 1000]."""
    funcs = (FuncId.C01, FuncId.TMinus, FuncId.TPlus, FuncId.ZetaShift)
    return {f: scan(f, 0.0, 1000.0, 0.05) for f in funcs}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --------------------------------------------------------------------------- acceptance summary

_ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


class AcceptanceRecorder:
    def __init__(self, store):
        self.store = store

    def check(self, number: int, label: str, ok: bool, detail: str = "") -> None:
        self.store.setdefault(number, []).append((label, bool(ok), detail))
        print(f"criterion {number:2d} {label}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, f"criterion {number} {label}: {detail}"


@pytest.fixture
def acceptance():
    return AcceptanceRecorder(_ACCEPTANCE)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[number]
        ok = all(c[1] for c in checks)
        failed = [f"{label} ({detail})" for label, passed, detail in checks if not passed]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += " - failing: " + "; ".join(failed)
        terminalreporter.write_line(line)
