"""Logarithmic-potential representation of log|U| built from the zeros of zeta.

U(s) has poles at s_p = sigma_p + i t_p (2 t_p a zeta ordinate, sigma_p = 1/4 on
RH) with partner zeros at s_p + 1/2, mirrored in the lower half plane, plus the
exceptional zero at s = 0 and pole at s = 1.  Summing the resulting
log-modulus contributions gives log|U| exactly on the critical line and to
good accuracy elsewhere; the truncated tail is estimated by Euler-Maclaurin
with the zero density log(t/pi)/pi.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .combined import u_fn
from .errors import DomainError, OrderError, ParseError, PoleError, SignViolation
from .special import BERNOULLI_2K, DEFAULT_CONFIG, EvalConfig

T_EXCEPTIONAL = 2.94334
DEFAULT_SEED = 20240611


class ZeroSource(str, enum.Enum):
    File = "File"
    Computed = "Computed"


@dataclass
class ZetaZeroList:
    """Poles s_p = sigma_p + i t_p of U with multiplicities m_p."""

    t: np.ndarray
    sigma: np.ndarray
    m: np.ndarray
    source: ZeroSource = ZeroSource.File

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float).reshape(-1)
        self.sigma = np.asarray(self.sigma, dtype=float).reshape(-1)
        self.m = np.asarray(self.m, dtype=int).reshape(-1)
        if not (self.t.size == self.sigma.size == self.m.size):
            raise DomainError("t, sigma and m must have equal length")
        if self.t.size and np.any(np.diff(self.t) <= 0):
            raise OrderError("pole heights must be strictly increasing")
        if np.any(self.t <= 0):
            raise DomainError("pole heights must be positive")
        if np.any((self.sigma <= 0) | (self.sigma >= 0.5)):
            raise DomainError("sigma_p must lie in (0, 1/2)")
        if np.any(self.m < 1):
            raise DomainError("multiplicities must be >= 1")
        self.source = ZeroSource(self.source)

    @classmethod
    def from_heights(cls, t, source=ZeroSource.File) -> "ZetaZeroList":
        t = np.asarray(t, dtype=float)
        return cls(t, np.full(t.shape, 0.25), np.ones(t.shape, dtype=int), source)

    def __len__(self):
        return int(self.t.size)

    def head(self, n: int) -> "ZetaZeroList":
        if n > len(self):
            raise DomainError(f"requested {n} poles, only {len(self)} available")
        return ZetaZeroList(self.t[:n], self.sigma[:n], self.m[:n], self.source)


def parse_zeta_ordinates(lines: Iterable[str], origin: str = "<input>") -> ZetaZeroList:
    """Parse zeta ordinates gamma_p (one per line, '#' comments) into t_p = gamma_p / 2."""
    values: list[float] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            gamma = float(text)
        except ValueError:
            raise ParseError(f"{origin}:{lineno}: not a number: {text!r}") from None
        if not math.isfinite(gamma) or gamma <= 0:
            raise ParseError(f"{origin}:{lineno}: ordinate must be positive and finite")
        if values and gamma <= values[-1]:
            raise OrderError(f"{origin}:{lineno}: ordinates must increase ({gamma} after {values[-1]})")
        values.append(gamma)
    return ZetaZeroList.from_heights(np.array(values) / 2.0, ZeroSource.File)


def load_zeta_zeros(path: str | os.PathLike) -> ZetaZeroList:
    with open(path, encoding="utf-8") as handle:
        return parse_zeta_ordinates(handle, str(path))


def write_zeta_ordinates(zeros: ZetaZeroList, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# zeta ordinates gamma_p = 2 t_p\n")
        for t in zeros.t:
            handle.write(f"{2.0 * t:.12f}\n")


def compute_zeta_zeros(t_max: float, step: float = 0.05, config: EvalConfig = DEFAULT_CONFIG) -> ZetaZeroList:
    """Poles of U up to height t_max found by scanning zeta(1/2 + 2it)."""
    from .zeros import scan

    if t_max > 1000:
        raise DomainError("compute_zeta_zeros supports t_max <= 1000; load a table for more")
    if t_max <= 0:
        return ZetaZeroList.from_heights([], ZeroSource.Computed)
    zeros = scan("ZetaShift", 0.0, t_max, step, config)
    return ZetaZeroList.from_heights(zeros.t, ZeroSource.Computed)


# --------------------------------------------------------------------------- expansion


def _log_ratio_abs(num, den):
    return np.log(np.abs(num)) - np.log(np.abs(den))


def log_abs_u_expansion(s, zeros: ZetaZeroList, P: int | None = None):
    """log|U(s)| from the exceptional pair and the first P pole/zero quartets."""
    P = len(zeros) if P is None else P
    if P > len(zeros):
        raise DomainError(f"P={P} exceeds the {len(zeros)} available poles")
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    sp = (zeros.sigma[:P] + 1j * zeros.t[:P])[None, :]
    m = zeros.m[:P][None, :]
    z = s_arr[:, None]
    factors = (z - sp, z - 0.5 - sp, z - np.conj(sp), z - 0.5 - np.conj(sp))
    if np.any(s_arr == 0) or np.any(s_arr == 1) or any(np.any(f == 0) for f in factors):
        raise PoleError("s coincides with a zero or pole of a retained factor")
    with np.errstate(divide="ignore"):
        head = _log_ratio_abs(s_arr, s_arr - 1.0)
        body = (m * (_log_ratio_abs(factors[0], factors[1]) + _log_ratio_abs(factors[2], factors[3]))).sum(axis=1)
    out = head - body
    return float(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))


@dataclass(frozen=True)
class EMConfig:
    L: int = 1000
    q: int = 0

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 10:
            raise DomainError("L must be an integer >= 10")
        if int(self.q) != self.q or not 0 <= self.q <= 6:
            raise DomainError("q must be an integer in [0, 6]")


def em_tail(sigma: float, L: int) -> float:
    """Integral of the leading tail term against the zero density from t = L + 1."""
    if L < 10:
        raise DomainError("L must be >= 10")
    x = L + 1.0
    return (1.0 - 2.0 * sigma) / (2.0 * x * math.pi) * (1.0 + math.log(x / math.pi))


def _tail_integrand_derivative(sigma: float, x: float, n: int) -> float:
    """n-th derivative of c log(x/pi) / (pi x^2), the density-weighted tail term."""
    c = 0.5 * (1.0 - 2.0 * sigma)  # (1 - 2 sigma_p)(1 - 2 sigma) with sigma_p = 1/4
    harmonic = sum(1.0 / j for j in range(2, n + 2))
    return (c / math.pi) * (-1) ** n * math.factorial(n + 1) * x ** (-2 - n) * (
        math.log(x / math.pi) - harmonic)


def em_correction(sigma: float, em: EMConfig) -> float:
    """Integral term plus -B1 f(0) and the Bernoulli derivative terms up to order q."""
    x = em.L + 1.0
    total = em_tail(sigma, em.L) + 0.5 * _tail_integrand_derivative(sigma, x, 0)
    for k in range(1, em.q + 1):
        b2k = float(BERNOULLI_2K[k - 1])
        total -= b2k / math.factorial(2 * k) * _tail_integrand_derivative(sigma, x, 2 * k - 1)
    return total


def expansion_with_tail(s, zeros: ZetaZeroList, em: EMConfig = EMConfig()):
    """Direct sum over the first L poles plus the Euler-Maclaurin tail estimate."""
    if em.L > len(zeros):
        raise DomainError(f"L={em.L} exceeds the {len(zeros)} available poles")
    direct = log_abs_u_expansion(s, zeros, em.L)
    sigma = np.real(np.asarray(s, dtype=complex))
    tail = np.vectorize(lambda x: em_correction(float(x), em), otypes=[float])(sigma)
    out = direct + tail
    return float(out) if np.ndim(s) == 0 else out


def direct_log_abs_u(s, config: EvalConfig = DEFAULT_CONFIG):
    return np.log(np.abs(u_fn(s, config)))


@dataclass
class ExpansionReport:
    t: np.ndarray
    expansion: np.ndarray
    direct: np.ndarray

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.expansion - self.direct)

    @property
    def max_abs_err(self) -> float:
        return float(self.abs_err.max())

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["t", "expansion", "direct", "abs_err"])
        for row in zip(self.t, self.expansion, self.direct, self.abs_err):
            writer.writerow([f"{v:.12g}" for v in row])
        return buffer.getvalue()


def expansion_report(sigma: float, t_values: Sequence[float], zeros: ZetaZeroList,
                     em: EMConfig = EMConfig(), config: EvalConfig = DEFAULT_CONFIG) -> ExpansionReport:
    t = np.asarray(t_values, dtype=float)
    s = sigma + 1j * t
    return ExpansionReport(t, expansion_with_tail(s, zeros, em), direct_log_abs_u(s, config))


# --------------------------------------------------------------------------- derivative on the line


def _derivative_terms(t, tp, sp):
    gap = (1.0 - 2.0 * sp) ** 2
    num = 8.0 * (2.0 * sp - 1.0) * (4.0 * t ** 2 + 4.0 * tp ** 2 + 4.0 * sp * (sp - 1.0) + 1.0)
    den = (gap + 4.0 * (t - tp) ** 2) * (gap + 4.0 * (t + tp) ** 2)
    return num / den


def zero_density(x):
    """Mean number of poles of U per unit height near t_p = x."""
    return np.log(x / np.pi) / np.pi


def sigma_derivative_tail(t, zeros: ZetaZeroList, P: int | None = None):
    """Estimate of the omitted poles p > P, integrated against the zero density.

    The integral starts halfway between t_P and t_{P+1} (midpoint rule for the
    unit-spaced index), with sigma_p = 1/4 and m_p = 1 beyond the table.
    """
    from scipy.integrate import quad

    P = len(zeros) if P is None else P
    if P < 1:
        raise DomainError("the tail estimate needs at least one tabulated pole")
    last = zeros.t[P - 1]
    start = 0.5 * (last + zeros.t[P]) if P < len(zeros) else last + 0.5 / zero_density(last)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([
        quad(lambda x, tt=tt: _derivative_terms(tt, x, 0.25) * zero_density(x), start, np.inf,
             epsabs=1e-13, epsrel=1e-10, limit=200)[0]
        for tt in t_arr
    ])
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def sigma_derivative_on_line(t, zeros: ZetaZeroList, P: int | None = None, tail: bool = False):
    """d log|U| / d sigma at sigma = 1/2 from the pole expansion.

    The bare sum over P poles falls short of the true derivative by roughly
    (1 + log(t_P/pi)) / (pi t_P); ``tail=True`` adds the integral estimate
    of the remainder.
    """
    P = len(zeros) if P is None else P
    if P > len(zeros):
        raise DomainError(f"P={P} exceeds the {len(zeros)} available poles")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise DomainError("t must be >= 0")
    tp = zeros.t[:P][None, :]
    sp = zeros.sigma[:P][None, :]
    m = zeros.m[:P][None, :]
    out = 1.0 / (t_arr ** 2 + 0.25) + (m * _derivative_terms(t_arr[:, None], tp, sp)).sum(axis=1)
    if tail:
        out = out + sigma_derivative_tail(t_arr, zeros, P)
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def sigma_derivative_fd(t, h: float = 1e-5, config: EvalConfig = DEFAULT_CONFIG):
    """Centered difference of log|U(sigma + it)| across the critical line."""
    t = np.asarray(t, dtype=float)
    return (direct_log_abs_u(0.5 + h + 1j * t, config) - direct_log_abs_u(0.5 - h + 1j * t, config)) / (2.0 * h)


def sigma_derivative_root(zeros: ZetaZeroList, P: int | None = None, lo: float = 2.9, hi: float = 3.0,
                          tail: bool = False) -> float:
    """Height where the exceptional term is first outweighed by the pole sum."""
    from scipy.optimize import brentq

    return brentq(lambda x: sigma_derivative_on_line(x, zeros, P, tail), lo, hi, xtol=1e-12)


def first_pole_threshold(t1: float, sigma: float) -> float:
    """Height where the exceptional pair and the first quartet balance in modulus."""
    radicand = t1 * t1 - 3.0 / 16.0 + (sigma - 0.5) ** 2
    if radicand < 0:
        raise DomainError("t1^2 - 3/16 + (sigma - 1/2)^2 must be nonnegative")
    return math.sqrt(radicand) / math.sqrt(3.0)


# --------------------------------------------------------------------------- half-plane sign


@dataclass
class SignReport:
    seed: int
    samples: int
    points: np.ndarray
    values: np.ndarray
    violations: list[complex] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def half_plane_sign_check(samples: int = 500, t_range: tuple[float, float] = (3.0, 300.0),
                          seed: int = DEFAULT_SEED, strict: bool = True,
                          config: EvalConfig = DEFAULT_CONFIG,
                          zeros: ZetaZeroList | None = None) -> SignReport:
    """Sample log|U| on both sides of the critical line and check its sign.

    Half of the points fall in 1/2 < sigma < 3 (expect log|U| < 0), half in
    -2 < sigma < 1/2 (expect > 0).  With ``zeros`` the pole expansion is used
    instead of direct evaluation.  ``strict`` raises SignViolation at the
    first offending point; otherwise violations are only collected.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n_right = (samples + 1) // 2
    t = rng.uniform(t_range[0], t_range[1], samples)
    sigma = np.concatenate([rng.uniform(0.5, 3.0, n_right), rng.uniform(-2.0, 0.5, samples - n_right)])
    sigma[sigma == 0.5] = np.nextafter(0.5, 1.0)
    points = sigma + 1j * t
    values = log_abs_u_expansion(points, zeros) if zeros is not None else direct_log_abs_u(points, config)
    expected = np.where(sigma > 0.5, -1.0, 1.0)
    bad = np.flatnonzero(np.sign(values) != expected)
    violations = [complex(points[k]) for k in bad]
    if strict and violations:
        raise SignViolation(f"log|U| has the wrong sign at s={violations[0]}", violations[0])
    return SignReport(seed, samples, points, values, violations)
