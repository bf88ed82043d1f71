"""End-to-end acceptance checks, one test (or parametrized family) per criterion.

Each check is reported through the ``acceptance`` fixture, which prints a
PASS/FAIL line and feeds the per-criterion summary at the end of the run.
"""
import numpy as np
import pytest

from symzeta.combined import (
    FuncId,
    ModifiedSpec,
    f1_fn,
    kober_identity_residual,
    u_fn,
    v_fn,
    xi1,
)
from symzeta.potential import (
    EMConfig,
    expansion_report,
    first_pole_threshold,
    half_plane_sign_check,
    sigma_derivative_fd,
    sigma_derivative_on_line,
    sigma_derivative_root,
)
from symzeta.zeros import (
    EventKind,
    count_table,
    counterexample,
    decade_intervals,
    event_counts,
    gap_stats,
    interleaving_events,
    ordering_statistics,
)

DECADE_COUNTS = {  # reference decade counts on (0, 300]
    FuncId.C01: [1, 5, 7, 7, 10, 8, 10, 10, 11, 10, 11, 12, 12, 12, 11, 13, 13, 14, 13, 12,
                 14, 13, 14, 14, 14, 14, 14, 14, 14, 14],
    FuncId.TMinus: [1, 5, 7, 7, 9, 9, 9, 11, 10, 11, 11, 11, 12, 12, 12, 13, 12, 13, 13, 13,
                    13, 14, 14, 14, 13, 14, 14, 15, 14, 14],
    FuncId.TPlus: [1, 5, 7, 8, 8, 9, 10, 10, 11, 10, 11, 12, 12, 12, 12, 12, 13, 13, 13, 13,
                   13, 14, 13, 14, 13, 15, 14, 14, 14, 15],
    FuncId.ZetaShift: [1, 5, 7, 8, 8, 9, 10, 10, 11, 10, 11, 12, 12, 12, 12, 12, 13, 13, 13, 13,
                       13, 14, 13, 14, 13, 14, 14, 15, 14, 15],
}
DECADE_TOTALS = {FuncId.C01: 342, FuncId.TMinus: 340, FuncId.TPlus: 341, FuncId.ZetaShift: 341}

CENTURY_COUNTS = {  # reference century counts on (0, 1000]
    FuncId.C01: [79, 122, 140, 150, 157, 166, 168, 176, 178, 181],
    FuncId.ZetaShift: [79, 123, 139, 150, 158, 164, 170, 174, 178, 182],
    FuncId.TMinus: [79, 122, 139, 150, 158, 165, 169, 175, 178, 182],
    FuncId.TPlus: [79, 123, 139, 150, 158, 164, 170, 174, 178, 182],
}

N_COMPARED = 1517


# --------------------------------------------------------------------------- 1, 2: zero counts


@pytest.mark.parametrize("func", list(DECADE_COUNTS), ids=lambda f: f.value)
def test_criterion_01_decade_counts(acceptance, scans_1000, func):
    table = count_table([func], decade_intervals(300.0, 10.0), scans=scans_1000)
    ours = table.counts[func]
    rows = [f"{10 * k}-{10 * k + 10}: {a} vs {b}" for k, (a, b) in enumerate(zip(ours, DECADE_COUNTS[func])) if a != b]
    total = table.totals()[func]
    ok = ours == DECADE_COUNTS[func] and total == DECADE_TOTALS[func]
    detail = f"total {total} vs {DECADE_TOTALS[func]}" + (f"; differing rows {rows}" if rows else "")
    acceptance.check(1, f"decade counts {func.value}", ok, detail)


@pytest.mark.parametrize("func", list(CENTURY_COUNTS), ids=lambda f: f.value)
def test_criterion_02_century_counts(acceptance, scans_1000, func):
    table = count_table([func], decade_intervals(1000.0, 100.0), scans=scans_1000)
    ours = table.counts[func]
    ok = ours == CENTURY_COUNTS[func] and table.totals()[func] == 1517
    acceptance.check(2, f"century counts {func.value}", ok, f"counts {ours}, total {table.totals()[func]}")


# --------------------------------------------------------------------------- 3, 4: identities


def test_criterion_03_functional_equations(acceptance):
    rng = np.random.default_rng(20240611)
    s = rng.uniform(-2.0, 3.0, 200) + 1j * rng.uniform(1.0, 500.0, 200)
    r = 1 - s
    errs = {
        "U(s)U(1-s)=1": np.max(np.abs(u_fn(s) * u_fn(r) - 1)),
        "xi1(s)=xi1(1-s)": np.max(np.abs(xi1(s) - xi1(r)) / np.abs(xi1(s))),
        "F1(s)F1(1-s)=1": np.max(np.abs(f1_fn(s) * f1_fn(r) - 1)),
        "V(1-s)=-V(s)": np.max(np.abs(v_fn(s) + v_fn(r)) / np.abs(v_fn(s))),
    }
    for label, err in errs.items():
        acceptance.check(3, label, err <= 1e-9, f"max rel err {err:.2e}")


def test_criterion_04_kober_identity(acceptance):
    rng = np.random.default_rng(4)
    s = rng.uniform(0.2, 0.8, 20) + 1j * rng.uniform(2.0, 50.0, 20)
    worst = max(kober_identity_residual(x) for x in s)
    acceptance.check(4, "Kober identity residual", worst <= 1e-8, f"max residual {worst:.2e}")


# --------------------------------------------------------------------------- 5, 6, 7: potential


def test_criterion_05_pole_expansion_with_tail(acceptance, zeta_table):
    report = expansion_report(0.4, np.linspace(0.0, 100.0, 200), zeta_table, EMConfig(1000, 0))
    err = report.max_abs_err
    acceptance.check(5, "expansion with tail, L=1000 q=0 sigma=0.4", err <= 7.8e-5, f"max abs err {err:.4e}")


def test_criterion_06_sigma_derivative(acceptance, zeta_table):
    t = np.linspace(3.5, 100.0, 25)
    formula = sigma_derivative_on_line(t, zeta_table, 1000, tail=True)
    fd = np.array([float(sigma_derivative_fd(x)) for x in t])
    mismatch = np.max(np.abs(formula - fd))
    acceptance.check(6, "formula vs finite differences", mismatch <= 1e-4, f"max diff {mismatch:.2e}")

    root = sigma_derivative_root(zeta_table, 1000, tail=True)
    acceptance.check(6, "sign change location", abs(root - 2.94334) <= 2e-3, f"root {root:.6f}")

    grid = np.round(np.arange(3.1, 100.0 - 1e-9, 0.1), 10)
    values = sigma_derivative_on_line(grid, zeta_table, 1000, tail=True)
    acceptance.check(6, "strictly negative on (3, 100)", bool(np.all(values < 0)), f"max {values.max():.4f}")


def test_criterion_07_first_pole_threshold(acceptance):
    value = first_pole_threshold(7.06736, 0.5)
    acceptance.check(7, "threshold at sigma=1/2", abs(value - 4.07268) <= 5e-5, f"{value:.7f}")
    sigmas = np.linspace(-0.5, 1.5, 201)
    values = np.array([first_pole_threshold(7.06736, x) for x in sigmas])
    lo, hi = values.min(), values.max()
    # the range endpoints are quoted to four decimals, so they carry the same 5e-5 tolerance
    ok = lo >= 4.0727 - 5e-5 and hi <= 4.1134 + 5e-5
    acceptance.check(7, "range over sigma in [-0.5, 1.5]", ok, f"[{lo:.7f}, {hi:.7f}]")


# --------------------------------------------------------------------------- 8, 9: statistics


@pytest.mark.parametrize("func,expected_std", [(FuncId.TMinus, 0.304), (FuncId.TPlus, 0.348),
                                               (FuncId.ZetaShift, 0.655)], ids=lambda x: getattr(x, "value", x))
def test_criterion_08_gap_statistics(acceptance, scans_1000, func, expected_std):
    g = gap_stats(scans_1000[func])
    acceptance.check(8, f"mean gap {func.value}", abs(g.mean_gap - 0.655) <= 0.005, f"{g.mean_gap:.5f}")
    acceptance.check(8, f"normalized std {func.value}", abs(g.normalized_std - expected_std) <= 0.01,
                     f"{g.normalized_std:.4f} vs {expected_std}")


def test_criterion_09_ordering_statistics(acceptance, scans_1000):
    a = ordering_statistics(scans_1000[FuncId.TMinus], scans_1000[FuncId.ZetaShift], N_COMPARED)
    acceptance.check(9, "TMinus before ZetaShift", a == 4, f"{a}")
    b = ordering_statistics(scans_1000[FuncId.ZetaShift], scans_1000[FuncId.TPlus], N_COMPARED)
    acceptance.check(9, "ZetaShift before TPlus", b == 235, f"{b}")


# --------------------------------------------------------------------------- 10, 11: theorems


def test_criterion_10_interleaving(acceptance, scans_1000):
    # check=True raises OrderViolation on the first out-of-order event
    events = interleaving_events(3.0, 1000.0, 0.01, check=True)
    counts = event_counts(events)
    acceptance.check(10, "no order violations on (3, 1000)", True, f"{len(events)} events")
    t_minus = scans_1000[FuncId.TMinus].t
    t_plus = scans_1000[FuncId.TPlus].t
    n_minus = int(np.count_nonzero(t_minus > 3.0))
    n_plus = int(np.count_nonzero(t_plus > 3.0))
    acceptance.check(10, "TMinus sign changes = V pole crossings", n_minus == counts[EventKind.PoleV],
                     f"{n_minus} vs {counts[EventKind.PoleV]}")
    acceptance.check(10, "TPlus sign changes = V zero crossings", n_plus == counts[EventKind.ZeroV],
                     f"{n_plus} vs {counts[EventKind.ZeroV]}")


def test_criterion_11_half_plane_sign(acceptance):
    report = half_plane_sign_check(500, t_range=(3.0, 300.0), strict=False)
    acceptance.check(11, "sign of log|U| off the line", report.ok and not report.violations,
                     f"{len(report.violations)} violations in {report.samples} samples (seed {report.seed})")


# --------------------------------------------------------------------------- 12: counterexamples


def _alternates(events):
    kinds = [e.kind for e in events if e.kind in (EventKind.PoleV, EventKind.ZeroV)]
    return all(a is not b for a, b in zip(kinds, kinds[1:]))


def test_criterion_12_counterexamples(acceptance, zeta_table):
    double = counterexample(ModifiedSpec("DoubleAll"), zeta_table, 2.0)
    base, mod = double.counts("baseline"), double.counts("modified")
    acceptance.check(12, "DoubleAll doubles every event count", all(mod[k] == 2 * base[k] for k in EventKind),
                     f"baseline {base[EventKind.PoleV]} poles, modified {mod[EventKind.PoleV]}")

    split = counterexample(ModifiedSpec("SplitPair", 98, 0.05), zeta_table, 2.0)
    poles = [e.t for e in split.modified if e.kind is EventKind.PoleV]
    zeros_v = np.array([e.t for e in split.modified if e.kind is EventKind.ZeroV])
    per_gap = [int(np.count_nonzero((zeros_v > a) & (zeros_v < b))) for a, b in zip(poles, poles[1:])]
    ok = bool(per_gap) and all(n == 1 for n in per_gap) and _alternates(split.modified)
    acceptance.check(12, "SplitPair keeps one zero per pole gap", ok, f"zeros per gap {per_gap}")
