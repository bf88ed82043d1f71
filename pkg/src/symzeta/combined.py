"""Composite functions built from the symmetrised zeta function xi1.

Conventions: ``xi1(s) = Gamma(s/2) zeta(s) / pi^(s/2)``,
``T+-(s) = [xi1(2s) +- xi1(2s-1)] / 4``, ``U = xi1(2s-1) / xi1(2s)``,
``V = T+ / T- = (1 + U) / (1 - U)`` and ``F1 = (V - i) / (V + i)``.

U, V and F1 are evaluated through the log-Gamma ratio so that they stay
representable at large heights where xi1 itself underflows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, PoleError
from .special import DEFAULT_CONFIG, LOG_PI, EvalConfig, bessel_k, dirichlet_L4, log_gamma, zeta

if TYPE_CHECKING:
    from .potential import ZetaZeroList

POLE_RTOL = 1e-13
HALF_LIMIT_STEP = 1e-6


class FuncId(str, enum.Enum):
    TPlus = "TPlus"
    TMinus = "TMinus"
    U = "U"
    V = "V"
    F1 = "F1"
    C01 = "C01"
    ZetaShift = "ZetaShift"
    Xi1Shift = "Xi1Shift"

    @classmethod
    def parse(cls, name: str) -> "FuncId":
        lookup = {m.value.lower(): m for m in cls}
        aliases = {"t+": cls.TPlus, "t-": cls.TMinus, "tplus": cls.TPlus, "tminus": cls.TMinus,
                   "zeta2s": cls.ZetaShift, "c": cls.C01}
        key = name.strip().lower()
        if key in lookup:
            return lookup[key]
        if key in aliases:
            return aliases[key]
        raise DomainError(f"unknown function {name!r}")


def _scalar_in(values, scalar):
    return complex(values[0]) if scalar else values


def _prep(s):
    scalar = np.ndim(s) == 0
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if not np.all(np.isfinite(arr)):
        raise DomainError("arguments must be finite")
    return arr, scalar


def _is_real_point(s, value):
    return (s.imag == 0) & (s.real == value)


# --------------------------------------------------------------------------- xi1


def log_xi1_prefactor(s):
    """log of Gamma(s/2) pi^(-s/2)."""
    s = np.asarray(s, dtype=complex)
    return log_gamma(0.5 * s) - 0.5 * s * LOG_PI


def xi1(s, config: EvalConfig = DEFAULT_CONFIG):
    """Gamma(s/2) zeta(s) / pi^(s/2); poles at s = 0 and s = 1."""
    arr, scalar = _prep(s)
    if np.any(_is_real_point(arr, 0.0) | _is_real_point(arr, 1.0)):
        raise PoleError("xi1 has poles at s = 0 and s = 1")
    # Gamma(s/2) has poles at the trivial zeros of zeta; use the reflection there
    trivial = (arr.imag == 0) & (arr.real < 0) & (np.mod(arr.real, 2.0) == 0)
    w = np.where(trivial, 1.0 - arr, arr)
    out = np.exp(log_xi1_prefactor(w)) * zeta(w, config)
    return _scalar_in(out, scalar)


# --------------------------------------------------------------------------- T+-


def _t_pair(s, config):
    a = xi1(2.0 * s, config)
    b = xi1(2.0 * s - 1.0, config)
    return a, b


def t_plus(s, config: EvalConfig = DEFAULT_CONFIG):
    """T+(s) = [xi1(2s) + xi1(2s-1)] / 4, even under s -> 1 - s."""
    arr, scalar = _prep(s)
    if np.any(_is_real_point(arr, 0.0) | _is_real_point(arr, 1.0)):
        raise PoleError("T+ has poles at s = 0 and s = 1")
    centre = _is_real_point(arr, 0.5)
    w = np.where(centre, 0.5 + HALF_LIMIT_STEP, arr)
    a, b = _t_pair(w, config)
    out = 0.25 * (a + b)
    if np.any(centre):
        # finite limit: xi1(2s) and xi1(2s-1) have cancelling poles at s = 1/2
        a2, b2 = _t_pair(np.full(np.count_nonzero(centre), 0.5 - HALF_LIMIT_STEP), config)
        out[centre] = 0.5 * (out[centre] + 0.25 * (a2 + b2))
    return _scalar_in(out, scalar)


def t_minus(s, config: EvalConfig = DEFAULT_CONFIG):
    """T-(s) = [xi1(2s) - xi1(2s-1)] / 4, odd under s -> 1 - s.

    Besides the poles at 0 and 1 this has a pole at s = 1/2, where the two
    xi1 poles add rather than cancel.
    """
    arr, scalar = _prep(s)
    if np.any(_is_real_point(arr, 0.0) | _is_real_point(arr, 1.0) | _is_real_point(arr, 0.5)):
        raise PoleError("T- has poles at s = 0, 1/2 and 1")
    a, b = _t_pair(arr, config)
    return _scalar_in(0.25 * (a - b), scalar)


# --------------------------------------------------------------------------- U, V, F1


def _u_raw(s, config):
    """U on an array; returns inf at poles instead of raising."""
    out = np.empty_like(s)
    at_zero = _is_real_point(s, 0.0)
    at_one = _is_real_point(s, 1.0)
    at_half = _is_real_point(s, 0.5)
    # other non-positive integers and half-integers are removable 0/0 points
    real_left = (s.imag == 0) & (s.real < 0.5) & (np.mod(2.0 * s.real, 1.0) == 0)
    reflect = real_left & ~at_zero & ~at_half
    direct = ~(at_zero | at_one | at_half | reflect)
    out[at_zero] = 0.0
    out[at_one] = np.inf
    out[at_half] = -1.0
    if np.any(direct):
        w = s[direct]
        num, den = _u_parts(w, config)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = num / den
        vals[np.abs(den) < POLE_RTOL * (1.0 + np.abs(num))] = np.inf
        out[direct] = vals
    if np.any(reflect):
        inv = _u_raw(1.0 - s[reflect], config)
        with np.errstate(divide="ignore"):
            out[reflect] = 1.0 / inv
    return out


def _u_parts(w, config):
    """Numerator sqrt(pi) Gamma(s-1/2)/Gamma(s) zeta(2s-1) and denominator zeta(2s)."""
    log_ratio = log_gamma(w - 0.5) - log_gamma(w) + 0.5 * LOG_PI
    num = np.exp(log_ratio) * zeta(2.0 * w - 1.0, config)
    den = zeta(2.0 * w, config)
    return num, den


def u_fn(s, config: EvalConfig = DEFAULT_CONFIG):
    """U(s) = xi1(2s-1)/xi1(2s); satisfies U(s) U(1-s) = 1."""
    arr, scalar = _prep(s)
    out = _u_raw(arr, config)
    if not np.all(np.isfinite(out)):
        raise PoleError("U has a pole here (s = 1 or a zero of zeta(2s))")
    return _scalar_in(out, scalar)


def _v_from_u(u):
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (1.0 + u) / (1.0 - u)
    v[np.isinf(u)] = -1.0
    v[np.abs(1.0 - u) < POLE_RTOL * (1.0 + np.abs(1.0 + u))] = np.inf
    return v


def _f1_from_u(u):
    with np.errstate(divide="ignore", invalid="ignore"):
        f = 1j * (u - 1j) / (u + 1j)
    f[np.isinf(u)] = 1j
    f[np.abs(u + 1j) < POLE_RTOL * (1.0 + np.abs(u - 1j))] = np.inf
    return f


def v_fn(s, config: EvalConfig = DEFAULT_CONFIG):
    """V(s) = T+(s)/T-(s) = (1 + U)/(1 - U); odd under s -> 1 - s."""
    arr, scalar = _prep(s)
    out = _v_from_u(_u_raw(arr, config))
    if not np.all(np.isfinite(out)):
        raise PoleError("V has a pole here (a zero of T-)")
    return _scalar_in(out, scalar)


def f1_fn(s, config: EvalConfig = DEFAULT_CONFIG):
    """F1(s) = (V - i)/(V + i) = i (U - i)/(U + i)."""
    arr, scalar = _prep(s)
    out = _f1_from_u(_u_raw(arr, config))
    if not np.all(np.isfinite(out)):
        raise PoleError("F1 has a pole here (U = -i)")
    return _scalar_in(out, scalar)


def evaluate(func: FuncId, s, config: EvalConfig = DEFAULT_CONFIG):
    """Dispatch by FuncId; ZetaShift is zeta(2s - 1/2) and Xi1Shift is xi1(2s)."""
    func = FuncId(func)
    table = {
        FuncId.TPlus: t_plus,
        FuncId.TMinus: t_minus,
        FuncId.U: u_fn,
        FuncId.V: v_fn,
        FuncId.F1: f1_fn,
        FuncId.C01: c01,
        FuncId.ZetaShift: lambda x, c: zeta(2.0 * np.asarray(x) - 0.5, c),
        FuncId.Xi1Shift: lambda x, c: xi1(2.0 * np.asarray(x), c),
    }
    result = table[func](s, config)
    return complex(result) if np.ndim(s) == 0 else result


def evaluate_raw(func: FuncId, s, config: EvalConfig = DEFAULT_CONFIG):
    """Array evaluation of U, V or F1 that marks poles with inf instead of raising."""
    func = FuncId(func)
    arr = np.asarray(s, dtype=complex)
    u = _u_raw(arr.ravel(), config)
    if func is FuncId.U:
        out = u
    elif func is FuncId.V:
        out = _v_from_u(u)
    elif func is FuncId.F1:
        out = _f1_from_u(u)
    else:
        raise DomainError(f"raw evaluation only supports U, V and F1, not {func.value}")
    return out.reshape(arr.shape)


# --------------------------------------------------------------------------- asymptotics


def _euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def u_asymptotic(s, n_zeta_terms: int = 8):
    """sqrt(pi/s) (1 + 3/(8s)) sum_n phi(n) n^(-2s), valid for Re s > 1.

    The Dirichlet series is zeta(2s-1)/zeta(2s) = 1 + 4^-s + 2 9^-s + ...
    """
    s = complex(s)
    if s.real <= 1.0:
        raise DomainError("u_asymptotic requires Re s > 1")
    series = sum(_euler_phi(n) * n ** (-2.0 * s) for n in range(1, n_zeta_terms + 1))
    return complex(np.sqrt(np.pi / s) * (1.0 + 3.0 / (8.0 * s)) * series)


def f1_asymptotic(s) -> complex:
    """Large-t expansion of F1(sigma + i t), valid for t >> sigma >> 1."""
    sigma, t = s.real, s.imag
    root = math.sqrt(2.0 * math.pi / t)
    return complex(-1j + (1 - 1j) * root + 2.0 * math.pi / t
                   + (1 + 1j) * (math.pi + sigma / 2.0) * root / t)


def real_axis_poles_of_v(config: EvalConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Real zeros of T- (poles of V) to the right and left of the strip."""

    def t_minus_real(x):
        return t_minus(complex(x), config).real

    right = brentq(t_minus_real, 3.5, 4.5, xtol=1e-13)
    left = brentq(t_minus_real, -3.5, -2.5, xtol=1e-13)
    return right, left


# --------------------------------------------------------------------------- lattice sums


def c01(s, config: EvalConfig = DEFAULT_CONFIG):
    """Square-lattice sum C(0,1;s) = 4 zeta(s) L_-4(s)."""
    arr, scalar = _prep(s)
    if np.any(_is_real_point(arr, 1.0)):
        raise PoleError("C(0,1;s) has a pole at s = 1")
    return _scalar_in(4.0 * zeta(arr, config) * dirichlet_L4(arr, config), scalar)


@dataclass(frozen=True)
class MacdonaldSumSpec:
    n: int = 0
    m: int = 0
    p_max: int = 8

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise DomainError("n and m must be non-negative")
        if self.p_max < 2:
            raise DomainError("p_max must be at least 2")


def _macdonald_term(spec, s, p1, p2, k_value):
    return (p2 / p1) ** (s - 0.5) * (p1 * p2 * math.pi) ** spec.n * k_value


def macdonald_sum(spec: MacdonaldSumSpec, s, config: EvalConfig = DEFAULT_CONFIG,
                  rel_tail: float = 1e-14) -> complex:
    """K(n,m;s) = sum (p2/p1)^(s-1/2) (p1 p2 pi)^n K_{m+s-1/2}(2 pi p1 p2), truncated at p_max."""
    s = complex(s)
    nu = spec.m + s - 0.5
    cache: dict[int, complex] = {}

    def k_of(q):
        if q not in cache:
            cache[q] = bessel_k(nu, 2.0 * math.pi * q, config)
        return cache[q]

    total = 0j
    for p1 in range(1, spec.p_max + 1):
        for p2 in range(1, spec.p_max + 1):
            total += _macdonald_term(spec, s, p1, p2, k_of(p1 * p2))
    edge = spec.p_max + 1
    omitted = max(abs(_macdonald_term(spec, s, 1, edge, k_of(edge))),
                  abs(_macdonald_term(spec, s, edge, 1, k_of(edge))))
    if omitted >= rel_tail * abs(total):
        raise ConvergenceError(
            f"first omitted term {omitted:.3e} exceeds {rel_tail:g} of the partial sum {abs(total):.3e}")
    return total


def kober_rhs(s, config: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Gamma(s) C(0,1;s) / (8 pi^s) - T+(s), the closed form of K(0,0;s)."""
    s = complex(s)
    lattice = complex(np.exp(log_gamma(s) - s * LOG_PI)) * c01(s, config) / 8.0
    return lattice - t_plus(s, config)


def converged_macdonald_sum(n: int, m: int, s, config: EvalConfig = DEFAULT_CONFIG,
                            p_start: int = 8, p_limit: int = 128) -> complex:
    """macdonald_sum with p_max doubled until the tail criterion holds.

    Large |Im s| puts K_{m+s-1/2}(2 pi q) in its oscillatory regime for
    q < |Im s| / (2 pi), so the default truncation is not always enough.
    """
    p_max = p_start
    while True:
        try:
            return macdonald_sum(MacdonaldSumSpec(n, m, p_max), s, config)
        except ConvergenceError:
            if p_max >= p_limit:
                raise
            p_max = min(2 * p_max, p_limit)


def kober_identity_residual(s, config: EvalConfig = DEFAULT_CONFIG) -> float:
    s = complex(s)
    if s in (0j, 0.5 + 0j, 1 + 0j):
        raise PoleError("the identity is not evaluated at s = 0, 1/2, 1")
    lhs = converged_macdonald_sum(0, 0, s, config)
    return abs(lhs - kober_rhs(s, config)) / (1.0 + abs(t_plus(s, config)))


# --------------------------------------------------------------------------- modified U


class ModifiedVariant(str, enum.Enum):
    DoubleOne = "DoubleOne"
    DoubleAll = "DoubleAll"
    SplitPair = "SplitPair"


@dataclass(frozen=True)
class ModifiedSpec:
    variant: ModifiedVariant
    index_N: int = 98
    delta: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "variant", ModifiedVariant(self.variant))
        if self.index_N < 1:
            raise DomainError("index_N is 1-based")
        if self.variant is ModifiedVariant.SplitPair and not 0.0 < self.delta < 0.25:
            raise DomainError("delta must lie in (0, 1/4)")


def modified_factor(spec: ModifiedSpec, t_n: float, s):
    """Rational factor multiplying U for DoubleOne / SplitPair (1 for DoubleAll).

    Returns (numerator, denominator) so callers can detect inserted poles.
    """
    s = np.asarray(s, dtype=complex)
    if spec.variant is ModifiedVariant.DoubleAll:
        return np.ones_like(s), np.ones_like(s)
    if spec.variant is ModifiedVariant.DoubleOne:
        zeros = [0.75 + 1j * t_n, 0.75 - 1j * t_n]
        poles = [0.25 + 1j * t_n, 0.25 - 1j * t_n]
    else:
        d = spec.delta
        zeros, poles = [], []
        for height in (t_n, -t_n):
            # replace the zero at 3/4 and pole at 1/4 by pairs offset by +-delta
            zeros += [0.75 - d + 1j * height, 0.75 + d + 1j * height, 0.25 + 1j * height]
            poles += [0.25 - d + 1j * height, 0.25 + d + 1j * height, 0.75 + 1j * height]
    num = np.ones_like(s)
    den = np.ones_like(s)
    for z in zeros:
        num = num * (s - z)
    for p in poles:
        den = den * (s - p)
    return num, den


def _zero_height(zeros: "ZetaZeroList", index_n: int) -> float:
    if not 1 <= index_n <= len(zeros):
        raise IndexError(f"zero index {index_n} outside 1..{len(zeros)}")
    return float(zeros.t[index_n - 1])


def modified_u_raw(spec: ModifiedSpec, zeros: "ZetaZeroList", s, config: EvalConfig = DEFAULT_CONFIG):
    arr = np.asarray(s, dtype=complex)
    u = _u_raw(arr.ravel(), config)
    if spec.variant is ModifiedVariant.DoubleAll:
        return (u * u).reshape(arr.shape)
    t_n = _zero_height(zeros, spec.index_N)
    num, den = modified_factor(spec, t_n, arr.ravel())
    with np.errstate(divide="ignore", invalid="ignore"):
        out = u * num / den
    out[np.abs(den) < POLE_RTOL * (1.0 + np.abs(num))] = np.inf
    return out.reshape(arr.shape)


def modified_u(spec: ModifiedSpec, zeros: "ZetaZeroList", s, config: EvalConfig = DEFAULT_CONFIG):
    """U multiplied by the rational pole-moving factor, or squared for DoubleAll."""
    scalar = np.ndim(s) == 0
    out = np.atleast_1d(modified_u_raw(spec, zeros, s, config))
    if not np.all(np.isfinite(out)):
        raise PoleError("modified U has a pole here")
    return complex(out[0]) if scalar else out


def modified_v(spec: ModifiedSpec, zeros: "ZetaZeroList", s, config: EvalConfig = DEFAULT_CONFIG):
    """(1 + U~)/(1 - U~)."""
    scalar = np.ndim(s) == 0
    u = np.atleast_1d(modified_u_raw(spec, zeros, s, config))
    out = _v_from_u(u.ravel()).reshape(u.shape)
    if not np.all(np.isfinite(out)):
        raise PoleError("modified V has a pole here")
    return complex(out[0]) if scalar else out
