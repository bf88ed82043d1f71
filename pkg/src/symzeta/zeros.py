"""Critical-line zero scanning, counting and the phase-ordering checks.

Every on-line zero is located as a sign change of a real "surrogate":

* TPlus / V zeros: Re w(t), TMinus / V poles: Im w(t), with
  w(t) = xi1(1 + 2it) sqrt(pi) / |Gamma(1/2 + it)| (same phase as xi1(1 + 2it)).
* ZetaShift: Hardy's Z at 2t, proportional to xi1(1/2 + 2it).
* C01: Z(t) times the completed L_-4 function on the line; scanned factor
  by factor so coincident zeros of the two factors cannot hide each other.
* Xi1Shift: Hardy's Z at t (zeros of xi1(1/2 + it)).
* F1 zeros: sin(theta + pi/4) with theta = arg xi1(1 + 2it).
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .combined import FuncId
from .errors import CountMismatch, DomainError, InsufficientData, MonotonicityViolation, OrderViolation
from .special import DEFAULT_CONFIG, LOG_PI, EvalConfig, dirichlet_L4, log_gamma, zeta

T_EXCEPTIONAL = 2.94334
T_CLAMP = 1e-7
MAX_BISECT = 60
LOG_4_OVER_PI = math.log(4.0 / math.pi)


# --------------------------------------------------------------------------- phase of xi1(1+2it)


def xi1_line_scaled(t, config: EvalConfig = DEFAULT_CONFIG):
    """xi1(1 + 2it) divided by the positive factor |Gamma(1/2 + it)| / sqrt(pi)."""
    t = np.asarray(t, dtype=float)
    phase = log_gamma(0.5 + 1j * t).imag - t * LOG_PI
    return np.exp(1j * phase) * zeta(1.0 + 2j * t, config)


def theta_raw(t, config: EvalConfig = DEFAULT_CONFIG):
    """arg xi1(1 + 2it) up to a multiple of 2 pi (continuous apart from arg zeta jumps)."""
    t = np.asarray(t, dtype=float)
    phase = log_gamma(0.5 + 1j * t).imag - t * LOG_PI
    return phase + np.angle(zeta(1.0 + 2j * t, config))


def theta_unwrapped(t, config: EvalConfig = DEFAULT_CONFIG):
    """arg xi1(1 + 2it) on an increasing grid, unwrapped to a continuous function.

    The grid must be fine enough that theta moves by less than pi per step.
    """
    return np.unwrap(theta_raw(t, config))


def _branch_near(raw, reference, period=2.0 * np.pi):
    return raw + period * np.round((reference - raw) / period)


# --------------------------------------------------------------------------- surrogates


def hardy_z(t, config: EvalConfig = DEFAULT_CONFIG):
    """Hardy's Z(t) = exp(i vartheta(t)) zeta(1/2 + it), real for real t."""
    t = np.asarray(t, dtype=float)
    vartheta = log_gamma(0.25 + 0.5j * t).imag - 0.5 * t * LOG_PI
    return (np.exp(1j * vartheta) * zeta(0.5 + 1j * t, config)).real


def completed_l4_line(t, config: EvalConfig = DEFAULT_CONFIG):
    """Real-valued phase-corrected L_-4(1/2 + it) from the completed L-function."""
    t = np.asarray(t, dtype=float)
    vartheta = log_gamma(0.75 + 0.5j * t).imag + 0.5 * t * LOG_4_OVER_PI
    return (np.exp(1j * vartheta) * dirichlet_L4(0.5 + 1j * t, config)).real


def _factor_surrogates(func: FuncId):
    """Real factors whose zero sets together give the zeros of func on the line."""
    if func in (FuncId.TPlus, FuncId.V):
        return [lambda t, c: xi1_line_scaled(np.maximum(t, T_CLAMP), c).real]
    if func is FuncId.TMinus:
        return [lambda t, c: xi1_line_scaled(np.maximum(t, T_CLAMP), c).imag]
    if func is FuncId.F1:
        def f1_zero(t, c):
            w = xi1_line_scaled(np.maximum(t, T_CLAMP), c)
            return (w * np.exp(1j * np.pi / 4)).imag
        return [f1_zero]
    if func is FuncId.ZetaShift:
        return [lambda t, c: hardy_z(2.0 * np.asarray(t, dtype=float), c)]
    if func is FuncId.Xi1Shift:
        return [hardy_z]
    if func is FuncId.C01:
        return [hardy_z, completed_l4_line]
    raise DomainError(f"{func.value} has no critical-line zeros to scan")


def surrogate(func, t, config: EvalConfig = DEFAULT_CONFIG):
    """Real critical-line detector whose sign changes are the zeros of func.

    TMinus at t = 0 sits on the pole of T- at s = 1/2 and returns -inf.
    """
    func = FuncId(func)
    scalar = np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise DomainError("surrogates are defined for t >= 0")
    factors = _factor_surrogates(func)
    out = np.ones_like(t_arr)
    for factor in factors:
        out = out * factor(t_arr, config)
    if func is FuncId.TMinus:
        out[t_arr == 0] = -np.inf
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------- scanning


@dataclass(frozen=True)
class ZeroRecord:
    func: FuncId
    index: int
    t_lo: float
    t_hi: float
    t_star: float
    residual: float


@dataclass
class ZeroList:
    func: FuncId
    records: list[ZeroRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, item):
        return self.records[item]

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t_star for r in self.records], dtype=float)

    def to_csv(self, handle=None) -> str:
        buffer = handle if handle is not None else io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["func", "index", "t_star", "residual"])
        for r in self.records:
            writer.writerow([r.func.value, r.index, f"{r.t_star:.12g}", f"{r.residual:.12g}"])
        return buffer.getvalue() if handle is None else ""


def _grid(t_min, t_max, step):
    n = max(1, int(math.ceil((t_max - t_min) / step - 1e-9)))
    return np.linspace(t_min, t_max, n + 1)


def _bisect_brackets(fn, lo, hi, f_lo, tol):
    """Vectorised bisection on many brackets at once."""
    lo = lo.copy()
    hi = hi.copy()
    f_lo = f_lo.copy()
    for _ in range(MAX_BISECT):
        active = (hi - lo) > tol
        if not np.any(active):
            break
        mid = 0.5 * (lo[active] + hi[active])
        f_mid = fn(mid)
        same = np.sign(f_mid) == np.sign(f_lo[active])
        idx = np.flatnonzero(active)
        lo[idx[same]] = mid[same]
        f_lo[idx[same]] = f_mid[same]
        hi[idx[~same]] = mid[~same]
    return lo, hi


def _golden_extremum(fn, a, b, sign, iters=40):
    """Locate the extremum of sign * f on [a, b] (vectorised golden section)."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a = a.copy()
    b = b.copy()
    for _ in range(iters):
        c = b - g * (b - a)
        d = a + g * (b - a)
        fc = sign * fn(c)
        fd = sign * fn(d)
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    x = 0.5 * (a + b)
    return x, fn(x)


def _scan_factor(fn, t_min, t_max, step, tol):
    """Brackets of sign changes of one real factor on [t_min, t_max]."""
    grid = _grid(t_min, t_max, step)
    values = fn(grid)
    lo_list, hi_list = [], []
    sign = np.sign(values)
    change = sign[:-1] * sign[1:] < 0
    lo_list.append(grid[:-1][change])
    hi_list.append(grid[1:][change])
    # exact zeros on grid points are bracketed by their neighbourhood
    exact = np.flatnonzero(values[1:-1] == 0) + 1
    for k in exact:
        lo_list.append(np.array([0.5 * (grid[k - 1] + grid[k])]))
        hi_list.append(np.array([0.5 * (grid[k] + grid[k + 1])]))
    # close pairs hiding inside one cell: |f| dips without a sign change
    mag = np.abs(values)
    interior = np.arange(1, len(grid) - 1)
    dip = (mag[interior] < mag[interior - 1]) & (mag[interior] < mag[interior + 1])
    dip &= sign[interior - 1] == sign[interior]
    dip &= sign[interior + 1] == sign[interior]
    candidates = interior[dip]
    if candidates.size:
        s = sign[candidates]
        a = grid[candidates - 1]
        b = grid[candidates + 1]
        # minimise s * f: an opposite-signed minimum means two hidden zeros
        x, fx = _golden_extremum(fn, a, b, s)
        hidden = np.sign(fx) == -s
        for k in np.flatnonzero(hidden):
            lo_list += [np.array([a[k]]), np.array([x[k]])]
            hi_list += [np.array([x[k]]), np.array([b[k]])]
    lo = np.concatenate(lo_list)
    hi = np.concatenate(hi_list)
    if lo.size == 0:
        return lo, hi
    order = np.argsort(lo)
    lo, hi = lo[order], hi[order]
    lo, hi = _bisect_brackets(fn, lo, hi, fn(lo), tol)
    return lo, hi


def scan(func, t_min: float, t_max: float, step: float = 0.05,
         config: EvalConfig = DEFAULT_CONFIG) -> ZeroList:
    """Zeros of func on s = 1/2 + it, t_min < t <= t_max, refined by bisection."""
    func = FuncId(func)
    if not 0 <= t_min < t_max:
        raise DomainError("need 0 <= t_min < t_max")
    if step <= 0:
        raise DomainError("step must be positive")
    factors = _factor_surrogates(func)
    los, his = [], []
    for factor in factors:
        lo, hi = _scan_factor(lambda t, f=factor: f(t, config), t_min, t_max, step, config.bisect_tol)
        los.append(lo)
        his.append(hi)
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    star = 0.5 * (lo + hi)
    keep = (star > t_min) & (star <= t_max)
    lo, hi, star = lo[keep], hi[keep], star[keep]
    order = np.argsort(star)
    lo, hi, star = lo[order], hi[order], star[order]
    residual = np.abs(surrogate(func, star, config)) if star.size else star
    records = [ZeroRecord(func, k + 1, float(a), float(b), float(c), float(r))
               for k, (a, b, c, r) in enumerate(zip(lo, hi, star, residual))]
    return ZeroList(func, records)


def merge_scans(parts: Sequence[ZeroList]) -> ZeroList:
    """Concatenate scans of disjoint, increasing t-ranges and renumber."""
    if not parts:
        raise InsufficientData("nothing to merge")
    func = parts[0].func
    records: list[ZeroRecord] = []
    last = -math.inf
    for part in parts:
        if part.func is not func:
            raise DomainError("cannot merge scans of different functions")
        for r in part:
            if r.t_star <= last:
                raise OrderViolation("merged scans overlap or are out of order", r.t_star)
            last = r.t_star
            records.append(ZeroRecord(func, len(records) + 1, r.t_lo, r.t_hi, r.t_star, r.residual))
    return ZeroList(func, records)


# --------------------------------------------------------------------------- counting


@dataclass
class CountTable:
    intervals: list[tuple[float, float]]
    counts: dict[FuncId, list[int]]

    def totals(self) -> dict[FuncId, int]:
        return {f: int(sum(c)) for f, c in self.counts.items()}

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        funcs = list(self.counts)
        writer.writerow(["t_min", "t_max"] + [f.value for f in funcs])
        for k, (a, b) in enumerate(self.intervals):
            writer.writerow([f"{a:g}", f"{b:g}"] + [self.counts[f][k] for f in funcs])
        writer.writerow(["total", ""] + [self.totals()[f] for f in funcs])
        return buffer.getvalue()


def decade_intervals(t_max: float, width: float) -> list[tuple[float, float]]:
    n = int(round(t_max / width))
    return [(k * width, (k + 1) * width) for k in range(n)]


def bin_counts(t_values: Iterable[float], intervals: Sequence[tuple[float, float]]) -> list[int]:
    t_values = np.asarray(list(t_values), dtype=float)
    return [int(np.count_nonzero((t_values > a) & (t_values <= b))) for a, b in intervals]


def count_table(funcs: Sequence, intervals: Sequence[tuple[float, float]], step: float = 0.05,
                config: EvalConfig = DEFAULT_CONFIG, scans: dict | None = None) -> CountTable:
    """Zero counts per interval (t_lo, t_hi] for each function."""
    intervals = [(float(a), float(b)) for a, b in intervals]
    for (a0, b0), (a1, _) in zip(intervals, intervals[1:]):
        if a1 != b0:
            raise DomainError("intervals must be contiguous and ordered")
    if any(b <= a for a, b in intervals):
        raise DomainError("intervals must be ordered")
    counts = {}
    for f in funcs:
        f = FuncId(f)
        zeros = scans[f] if scans and f in scans else scan(f, intervals[0][0], intervals[-1][1], step, config)
        counts[f] = bin_counts(zeros.t, intervals)
    return CountTable(intervals, counts)


class CountBranch(str, enum.Enum):
    ZetaOf2t = "ZetaOf2t"
    C01 = "C01"


def count_asymptotic(t: float, which=CountBranch.C01) -> float:
    """Leading terms of the zero-counting function up to height t."""
    which = CountBranch(which)
    if t <= math.e:
        raise DomainError("count_asymptotic needs t > e")
    if which is CountBranch.C01:
        return t / math.pi * math.log(t) - t / math.pi * (1.0 + LOG_PI)
    tau = 2.0 * t
    return tau / (2 * math.pi) * math.log(tau) - tau / (2 * math.pi) * (1.0 + math.log(2 * math.pi))


# --------------------------------------------------------------------------- phase events


class EventKind(str, enum.Enum):
    PoleV = "PoleV"
    PoleF1 = "PoleF1"
    ZeroV = "ZeroV"
    ZeroF1 = "ZeroF1"


# theta = arg xi1(1+2it) crosses k pi/4; k mod 4 names the event
_LEVEL_KIND = (EventKind.PoleV, EventKind.PoleF1, EventKind.ZeroV, EventKind.ZeroF1)


@dataclass(frozen=True)
class EventRecord:
    kind: EventKind
    t: float


def _refine_crossings(phase, lo, hi, th_lo, th_hi, level, period, tol):
    lo, hi, th_lo, th_hi = lo.copy(), hi.copy(), th_lo.copy(), th_hi.copy()
    for _ in range(MAX_BISECT):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        ref = 0.5 * (th_lo + th_hi)
        th_mid = _branch_near(phase(mid), ref, period)
        below = (th_mid - level) * (th_lo - level) > 0
        lo = np.where(below, mid, lo)
        th_lo = np.where(below, th_mid, th_lo)
        hi = np.where(below, hi, mid)
        th_hi = np.where(below, th_hi, th_mid)
    return 0.5 * (lo + hi)


def phase_events(phase, t_min: float, t_max: float, step: float, period: float = 2.0 * np.pi,
                 tol: float = DEFAULT_CONFIG.bisect_tol, check: bool = True) -> list[EventRecord]:
    """Crossings of a phase function through k pi/4, named by k mod 4.

    ``phase`` returns the phase up to multiples of ``period``; the grid must
    resolve it (less than period/2 change per step).
    """
    grid = _grid(t_min, t_max, step)
    theta = np.unwrap(phase(grid), period=period)
    q = np.pi / 4
    k_lo = np.floor(theta[:-1] / q)
    k_hi = np.floor(theta[1:] / q)
    cells, levels = [], []
    for cell in np.flatnonzero(k_lo != k_hi):
        lo_k, hi_k = int(k_lo[cell]), int(k_hi[cell])
        ks = range(lo_k + 1, hi_k + 1) if hi_k > lo_k else range(lo_k, hi_k, -1)
        for k in ks:
            cells.append(cell)
            levels.append(k)
    if not cells:
        return []
    cells = np.asarray(cells, dtype=int)
    levels = np.asarray(levels, dtype=int)
    t_star = _refine_crossings(phase, grid[cells], grid[cells + 1], theta[cells], theta[cells + 1],
                               levels * q, period, tol)
    events = sorted(zip(t_star.tolist(), levels.tolist()))
    if check:
        for (_, k0), (t1, k1) in zip(events, events[1:]):
            if k1 != k0 + 1:
                kind = _LEVEL_KIND[k1 % 4]
                raise OrderViolation(f"{kind.value} at t={t1:.6f} breaks the cyclic order", t1)
    return [EventRecord(_LEVEL_KIND[k % 4], t) for t, k in events]


def interleaving_events(t_min: float, t_max: float, step: float = 0.01,
                        config: EvalConfig = DEFAULT_CONFIG, check: bool = True) -> list[EventRecord]:
    """Poles and zeros of V and F1 on the line as crossings of theta through k pi/4.

    With ``check`` the sequence must cycle PoleV -> PoleF1 -> ZeroV -> ZeroF1;
    any other successor raises OrderViolation.
    """
    if t_min < 3.0 and check:
        raise DomainError("ordering is only asserted for t_min >= 3")
    return phase_events(lambda t: theta_raw(t, config), t_min, t_max, step,
                        tol=config.bisect_tol, check=check)


def modified_theta(spec, zeros, config: EvalConfig = DEFAULT_CONFIG):
    """Phase function -arg(U~(1/2 + it))/2, defined modulo pi."""
    from .combined import modified_u_raw

    def phase(t):
        return -0.5 * np.angle(modified_u_raw(spec, zeros, 0.5 + 1j * np.asarray(t, dtype=float), config))

    return phase


def modified_events(spec, zeros, t_min: float, t_max: float, step: float = 0.002,
                    config: EvalConfig = DEFAULT_CONFIG, check: bool = True) -> list[EventRecord]:
    """On-line zeros and poles of the modified V (and F1) built from U~."""
    return phase_events(modified_theta(spec, zeros, config), t_min, t_max, step, period=np.pi,
                        tol=config.bisect_tol, check=check)


def event_counts(events: Sequence[EventRecord]) -> dict[EventKind, int]:
    return {kind: sum(1 for e in events if e.kind is kind) for kind in EventKind}


@dataclass
class MonotonicityReport:
    t_min: float
    t_max: float
    step: float
    min_increment: float
    violations: list[float]

    @property
    def ok(self) -> bool:
        return not self.violations


def monotonicity_check(t_min: float, t_max: float, step: float = 0.005,
                       config: EvalConfig = DEFAULT_CONFIG, strict: bool | None = None) -> MonotonicityReport:
    """Check that theta(t) = arg xi1(1 + 2it) is nondecreasing on the grid.

    ``strict`` (default: t_min > 2.94334) raises on the first decrease;
    otherwise decreases are only reported.
    """
    if strict is None:
        strict = t_min > T_EXCEPTIONAL
    grid = _grid(t_min, t_max, step)
    theta = theta_unwrapped(grid, config)
    inc = np.diff(theta)
    bad = np.flatnonzero(inc < 0)
    violations = [float(grid[k + 1]) for k in bad]
    if strict and violations:
        raise MonotonicityViolation(f"theta decreases near t={violations[0]:.6f}", violations[0])
    return MonotonicityReport(t_min, t_max, step, float(inc.min()), violations)


def theta_derivative(t, h: float = 1e-5, config: EvalConfig = DEFAULT_CONFIG):
    """d theta / dt by central differences (theta = arg xi1(1 + 2it))."""
    t = np.asarray(t, dtype=float)
    up = theta_raw(t + h, config)
    down = _branch_near(theta_raw(t - h, config), up)
    return (up - down) / (2.0 * h)


def derivative_zero(t_lo: float = 2.9, t_hi: float = 3.0, config: EvalConfig = DEFAULT_CONFIG) -> float:
    """The t where d/dt Im V(1/2 + it) vanishes, i.e. theta'(t) = 0."""
    from scipy.optimize import brentq

    return brentq(lambda x: float(theta_derivative(x, config=config)), t_lo, t_hi, xtol=1e-10)


# --------------------------------------------------------------------------- gap statistics


@dataclass(frozen=True)
class GapStats:
    mean_gap: float
    std_gap: float
    normalized_std: float
    count: int


def gap_stats(zeros) -> GapStats:
    """Mean and (population) standard deviation of consecutive zero spacings."""
    t = np.asarray(zeros.t if hasattr(zeros, "t") else zeros, dtype=float)
    if t.size < 2:
        raise InsufficientData("gap statistics need at least two zeros")
    gaps = np.diff(np.sort(t))
    mean = float(gaps.mean())
    std = float(gaps.std())
    return GapStats(mean, std, std / mean, int(t.size))


def ordering_statistics(zeros_a, zeros_b, n: int | None = None) -> int:
    """Number of indices k with a_k < b_k (strictly), over the first n zeros."""
    a = np.asarray(zeros_a.t if hasattr(zeros_a, "t") else zeros_a, dtype=float)
    b = np.asarray(zeros_b.t if hasattr(zeros_b, "t") else zeros_b, dtype=float)
    if n is not None:
        if a.size < n or b.size < n:
            raise CountMismatch(f"need {n} zeros in each list, have {a.size} and {b.size}")
        a, b = a[:n], b[:n]
    elif a.size != b.size:
        raise CountMismatch(f"zero lists differ in length: {a.size} vs {b.size}")
    return int(np.count_nonzero(a < b))


# --------------------------------------------------------------------------- modified functions


@dataclass
class CounterexampleReport:
    spec: object
    t_n: float
    window: tuple[float, float]
    baseline: list[EventRecord]
    modified: list[EventRecord]

    def counts(self, which: str = "modified") -> dict[EventKind, int]:
        return event_counts(self.modified if which == "modified" else self.baseline)

    def gained(self) -> dict[EventKind, int]:
        base, mod = self.counts("baseline"), self.counts("modified")
        return {k: mod[k] - base[k] for k in EventKind}

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["series", "kind", "t"])
        for name, events in (("baseline", self.baseline), ("modified", self.modified)):
            for e in events:
                writer.writerow([name, e.kind.value, f"{e.t:.12g}"])
        return buffer.getvalue()


def counterexample(spec, zeros, half_width: float = 2.0, step: float = 0.002,
                   config: EvalConfig = DEFAULT_CONFIG) -> CounterexampleReport:
    """Compare on-line V/F1 events of U~ with those of U around t_N.

    The window edges are snapped outward to baseline ZeroF1 events so that
    both counts cover whole phase cycles of the baseline.
    """
    t_n = float(zeros.t[spec.index_N - 1])
    lo, hi = t_n - half_width, t_n + half_width
    if lo < 3.0:
        raise DomainError("window must stay above t = 3")
    probe = interleaving_events(max(3.0, lo - 2.0), hi + 2.0, 0.01, config)
    left = [e.t for e in probe if e.kind is EventKind.ZeroF1 and e.t <= lo]
    right = [e.t for e in probe if e.kind is EventKind.ZeroF1 and e.t >= hi]
    if not left or not right:
        raise InsufficientData("could not place window edges on baseline events")
    # nudge past the edge events: both series are counted on (a, b]
    a, b = left[-1] + 1e-6, right[0] + 1e-6
    baseline = interleaving_events(a, b, step, config)
    modified = modified_events(spec, zeros, a, b, step, config)
    return CounterexampleReport(spec, t_n, (a, b), baseline, modified)
