import csv
import io
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symzeta.combined import FuncId, ModifiedSpec
from symzeta.errors import CountMismatch, DomainError, InsufficientData, MonotonicityViolation, OrderViolation
from symzeta.zeros import (
    CountBranch,
    EventKind,
    ZeroList,
    ZeroRecord,
    bin_counts,
    count_asymptotic,
    count_table,
    counterexample,
    decade_intervals,
    derivative_zero,
    event_counts,
    gap_stats,
    interleaving_events,
    merge_scans,
    monotonicity_check,
    ordering_statistics,
    phase_events,
    scan,
    surrogate,
    theta_unwrapped,
)

@pytest.fixture(autouse=True, scope="module")
def _mp_precision():
    # module-level precision; a global assignment would leak across test modules
    with mp.workdps(25):
        yield


# --------------------------------------------------------------------------- surrogates


def test_surrogate_tminus_centre():
    assert surrogate("TMinus", 0.0) == -math.inf


def test_surrogate_bracket_first_tplus_zero():
    first = scan("TPlus", 0, 10, 0.05)
    assert len(first) == 1
    t1 = first[0].t_star
    assert np.sign(surrogate("TPlus", 1.0)) != np.sign(surrogate("TPlus", t1 + 0.1))


def test_surrogate_zeta_shift_first_zero():
    assert np.sign(surrogate("ZetaShift", 7.0)) != np.sign(surrogate("ZetaShift", 7.1))


def test_surrogate_no_u():
    with pytest.raises(DomainError):
        surrogate("U", 3.0)
    with pytest.raises(DomainError):
        surrogate("TPlus", -1.0)


def test_surrogates_track_true_functions():
    # sign of the surrogate equals the sign of the (real) on-line combination
    for t in (4.3, 12.9, 33.3):
        s = 0.5 + 1j * t
        xi = mp.gamma(s) * mp.zeta(2 * s) * mp.pi ** (-s)
        assert np.sign(surrogate("TPlus", t)) == np.sign(float(mp.re(xi)))
        assert np.sign(surrogate("TMinus", t)) == np.sign(float(mp.im(xi)))
        assert np.sign(surrogate("ZetaShift", t)) == np.sign(float(mp.siegelz(2 * t)))


# --------------------------------------------------------------------------- scanning


def test_scan_examples():
    assert len(scan("TMinus", 0, 100, 0.05)) == 79
    assert len(scan("TPlus", 10, 20, 0.05)) == 5
    z = scan("ZetaShift", 0, 10, 0.05)
    assert len(z) == 1 and z[0].t_star == pytest.approx(7.0674, abs=1e-4)


def test_scan_matches_mpmath_zeta_zeros():
    z = scan("ZetaShift", 0, 60, 0.05)
    oracle = [float(mp.zetazero(n).imag) / 2 for n in range(1, len(z) + 1)]
    assert np.max(np.abs(z.t - oracle)) < 1e-8
    assert float(mp.zetazero(len(z) + 1).imag) / 2 > 60


def test_scan_record_invariants():
    cfg_tol = 1e-10
    z = scan("C01", 0, 60, 0.05)
    t = z.t
    assert np.all(np.diff(t) > 0)
    for k, r in enumerate(z, start=1):
        assert r.index == k
        assert r.t_lo <= r.t_star <= r.t_hi
        assert r.t_hi - r.t_lo <= 2 * cfg_tol
        assert r.residual <= 1e-8


def test_scan_finds_close_pairs():
    # zeta and L_-4 zeros only 0.015 apart near t = 178.37
    z = scan("C01", 178.0, 178.6, 0.05)
    close = [r.t_star for r in z if 178.3 < r.t_star < 178.4]
    assert len(close) == 2 and close[1] - close[0] < 0.02


def test_partition_independence():
    whole = scan("TPlus", 0, 100, 0.05)
    parts = merge_scans([scan("TPlus", 10 * k, 10 * (k + 1), 0.05) for k in range(10)])
    assert len(whole) == len(parts)
    assert np.max(np.abs(whole.t - parts.t)) <= 2e-10


def test_merge_rejects_overlap():
    a = scan("TPlus", 0, 20, 0.05)
    with pytest.raises(OrderViolation):
        merge_scans([a, a])


def test_scan_domain():
    with pytest.raises(DomainError):
        scan("TPlus", 10, 5, 0.05)
    with pytest.raises(DomainError):
        scan("TPlus", 0, 5, 0.0)
    assert len(scan("TPlus", 0, 1, 0.05)) == 0


def test_csv_export():
    z = scan("TMinus", 0, 12, 0.05)
    rows = list(csv.reader(io.StringIO(z.to_csv())))
    assert rows[0] == ["func", "index", "t_star", "residual"]
    assert rows[1][0] == "TMinus" and rows[1][1] == "1"
    assert len(rows[1][2].replace(".", "").lstrip("0")) <= 12
    assert float(rows[1][2]) == pytest.approx(z[0].t_star, rel=1e-11)


# --------------------------------------------------------------------------- counting


def test_count_table_small():
    table = count_table(["C01", "TMinus"], [(40, 50)])
    assert table.counts[FuncId.C01] == [10]
    assert table.counts[FuncId.TMinus] == [9]


def test_count_table_first_row_all_one():
    funcs = ["C01", "TMinus", "TPlus", "ZetaShift"]
    table = count_table(funcs, [(0, 10)])
    assert all(c == [1] for c in table.counts.values())
    assert table.to_csv().splitlines()[0] == "t_min,t_max,C01,TMinus,TPlus,ZetaShift"


def test_count_table_rejects_gaps():
    with pytest.raises(DomainError):
        count_table(["TPlus"], [(0, 10), (20, 30)])


def test_count_consistency_with_theta_crossings():
    # TMinus zeros are where theta = arg xi1(1 + 2it) passes a multiple of pi
    zeros = scan("TMinus", 3, 150, 0.05)
    events = interleaving_events(3, 150, 0.01)
    poles = [e.t for e in events if e.kind is EventKind.PoleV]
    assert len(poles) == len(zeros)
    assert np.max(np.abs(np.array(poles) - zeros.t)) < 1e-8


def test_bin_counts_half_open():
    assert bin_counts([10.0, 10.5, 20.0], [(0, 10), (10, 20)]) == [1, 2]


def test_count_asymptotic():
    assert count_asymptotic(100) == pytest.approx(100 / math.pi * (math.log(100) - 1 - math.log(math.pi)))
    assert count_asymptotic(100) == pytest.approx(78.3, abs=0.05)
    oracle = float(1000 / mp.pi * (mp.log(1000) - 1 - mp.log(mp.pi)))
    assert count_asymptotic(1000) == pytest.approx(oracle, rel=1e-14)
    assert count_asymptotic(1000) == pytest.approx(1516.12, abs=0.01)
    with pytest.raises(DomainError):
        count_asymptotic(2.0)


@given(st.floats(3, 1e5))
@settings(max_examples=50)
def test_count_asymptotic_branches_agree(t):
    assert count_asymptotic(t, CountBranch.ZetaOf2t) == pytest.approx(count_asymptotic(t, CountBranch.C01),
                                                                     rel=1e-12, abs=1e-9)


# --------------------------------------------------------------------------- events and monotonicity


def test_interleaving_pattern():
    events = interleaving_events(3, 50, 0.01)
    order = [EventKind.PoleV, EventKind.PoleF1, EventKind.ZeroV, EventKind.ZeroF1]
    kinds = [e.kind for e in events]
    start = order.index(kinds[0])
    assert kinds == [order[(start + k) % 4] for k in range(len(kinds))]
    assert all(b.t > a.t for a, b in zip(events, events[1:]))


def test_interleaving_counts_balanced():
    counts = event_counts(interleaving_events(3, 100, 0.01))
    assert max(counts.values()) - min(counts.values()) <= 1


def test_interleaving_v_alternates():
    events = [e for e in interleaving_events(3, 100, 0.01) if e.kind in (EventKind.PoleV, EventKind.ZeroV)]
    poles = [k for k, e in enumerate(events) if e.kind is EventKind.PoleV]
    for a, b in zip(poles, poles[1:]):
        between = [e for e in events[a + 1:b] if e.kind is EventKind.ZeroV]
        assert len(between) == 1


def test_one_cycle_per_gap_near_t98():
    zeros = scan("TMinus", 3, 130, 0.05)
    events = interleaving_events(113, 119, 0.01)
    for a, b in zip(zeros.t, zeros.t[1:]):
        if 113 < a and b < 119:
            inside = [e.kind for e in events if a + 1e-6 < e.t < b - 1e-6]
            assert sorted(k.value for k in inside) == sorted(["PoleF1", "ZeroV", "ZeroF1"])


def test_interleaving_detects_broken_order():
    # a phase that turns back produces an out-of-order event
    def phase(t):
        return np.where(t < 1.0, 2.0 * t, 2.0 - 0.5 * (t - 1.0))

    with pytest.raises(OrderViolation):
        phase_events(phase, 0.0, 3.0, 0.01)


def test_interleaving_requires_t_above_3():
    with pytest.raises(DomainError):
        interleaving_events(1, 10, 0.01)


def test_first_pole_events():
    events = interleaving_events(3, 10, 0.01)
    first_pole = next(e.t for e in events if e.kind is EventKind.PoleV)
    first_tminus = scan("TMinus", 0, 10, 0.05)[0].t_star
    assert first_pole == pytest.approx(first_tminus, abs=1e-8)
    # the first pole of U itself sits at 1/4 + i t1 with t1 = gamma_1 / 2
    assert scan("ZetaShift", 0, 10, 0.05)[0].t_star == pytest.approx(7.06736, abs=1e-4)


def test_monotonicity():
    report = monotonicity_check(3, 100, 0.005)
    assert report.ok and report.min_increment > 0
    low = monotonicity_check(0.1, 2.9, 0.005)
    assert not low.ok


def test_monotonicity_strict_raises():
    with pytest.raises(MonotonicityViolation) as info:
        monotonicity_check(0.1, 2.9, 0.005, strict=True)
    assert info.value.t is not None


def test_derivative_zero():
    root = derivative_zero()
    assert root == pytest.approx(2.94334, abs=1e-3)


def test_derivative_zero_against_mpmath():
    def dtheta(t):
        return mp.diff(lambda x: mp.arg(mp.gamma(0.5 + 1j * x) * mp.zeta(1 + 2j * x) * mp.pi ** (-0.5 - 1j * x)), t)

    oracle = float(mp.findroot(dtheta, 2.94))
    assert derivative_zero() == pytest.approx(oracle, abs=1e-7)


def test_theta_unwrapped_increasing_above_threshold():
    t = np.linspace(3, 40, 3000)
    assert np.all(np.diff(theta_unwrapped(t)) > 0)


# --------------------------------------------------------------------------- statistics


def test_gap_stats_simple():
    g = gap_stats([0.0, 1.0, 3.0])
    assert g.mean_gap == pytest.approx(1.5)
    assert g.std_gap == pytest.approx(0.5)
    assert g.normalized_std == pytest.approx(1 / 3)
    with pytest.raises(InsufficientData):
        gap_stats([1.0])


@given(st.lists(st.floats(0, 1000), min_size=2, max_size=50, unique=True))
@settings(max_examples=50)
def test_gap_stats_properties(values):
    g = gap_stats(values)
    assert g.mean_gap > 0 and g.normalized_std >= 0


def test_ordering_statistics():
    a = scan("TMinus", 0, 50, 0.05)
    assert ordering_statistics(a, a) == 0
    with pytest.raises(CountMismatch):
        ordering_statistics([1.0, 2.0], [1.5])
    with pytest.raises(CountMismatch):
        ordering_statistics([1.0], [1.5], n=2)
    assert ordering_statistics([1.0, 3.0], [2.0, 2.5]) == 1


# --------------------------------------------------------------------------- modified functions


@pytest.fixture(scope="module")
def zeros_200():
    from symzeta.potential import compute_zeta_zeros

    return compute_zeta_zeros(200.0)


def test_double_all_doubles(zeros_200):
    r = counterexample(ModifiedSpec("DoubleAll"), zeros_200, 2.0)
    base, mod = r.counts("baseline"), r.counts("modified")
    assert all(mod[k] == 2 * base[k] for k in EventKind)


@pytest.mark.parametrize("variant", ["DoubleOne", "SplitPair"])
def test_single_insertions_add_one_pair(zeros_200, variant):
    r = counterexample(ModifiedSpec(variant), zeros_200, 2.0)
    gained = r.gained()
    assert gained[EventKind.ZeroV] == 1 and gained[EventKind.PoleV] == 1


def test_counterexample_csv(zeros_200):
    r = counterexample(ModifiedSpec("SplitPair"), zeros_200, 0.5)
    lines = r.to_csv().splitlines()
    assert lines[0] == "series,kind,t"
    assert any(line.startswith("modified,ZeroV,") for line in lines)
