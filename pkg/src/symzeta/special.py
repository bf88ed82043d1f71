"""Complex-argument special functions in double precision.

Every evaluator accepts a Python number or a numpy array and returns the same
shape.  ``gamma`` and ``log_gamma`` use Stirling's series after a shift,
with reflection for ``Re s < 1/2``.  ``zeta``, ``hurwitz_zeta`` and
``dirichlet_L4`` use Euler-Maclaurin summation, so they continue analytically
to the whole plane.  ``bessel_k`` integrates the Macdonald integral with the
trapezoid rule along a contour shifted towards the saddle point, which keeps
imaginary orders free of catastrophic cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .errors import DomainError, PoleError

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EvalConfig:
    """Truncation and tolerance knobs shared by all evaluators.

    ``zeta_em_terms`` is the minimum Euler-Maclaurin direct-sum length; the
    actual length grows as ``zeta_terms_per_height * |Im s|``.
    ``quad_upper`` is the exponent at which the Macdonald integrand is
    considered negligible (truncation where ``z cosh u`` reaches it) and
    ``quad_step`` is the starting trapezoid step, halved until converged.
    """

    zeta_em_terms: int = 32
    zeta_em_order: int = 12
    zeta_terms_per_height: float = 1.3
    quad_upper: float = 46.0
    quad_step: float = 0.1
    bisect_tol: float = 1e-10
    target_rel_err: float = 1e-10

    def __post_init__(self):
        if self.zeta_em_terms < 16:
            raise DomainError("zeta_em_terms must be >= 16")
        if not 1 <= self.zeta_em_order <= len(BERNOULLI_2K):
            raise DomainError(f"zeta_em_order must lie in [1, {len(BERNOULLI_2K)}]")
        if self.bisect_tol <= 0:
            raise DomainError("bisect_tol must be positive")
        if not 0 < self.target_rel_err <= 1e-6:
            raise DomainError("target_rel_err must lie in (0, 1e-6]")
        if self.quad_step <= 0 or self.quad_upper <= 0:
            raise DomainError("quadrature parameters must be positive")

    def with_(self, **changes) -> "EvalConfig":
        return replace(self, **changes)

    @classmethod
    def from_mapping(cls, mapping) -> "EvalConfig":
        kwargs = {}
        for key, value in mapping.items():
            if key not in cls.__dataclass_fields__:
                raise DomainError(f"unknown EvalConfig key: {key!r}")
            field_type = cls.__dataclass_fields__[key].type
            kwargs[key] = int(value) if field_type == "int" else float(value)
        return cls(**kwargs)


def _bernoulli(n_max: int) -> list[Fraction]:
    b = [Fraction(0)] * (n_max + 1)
    b[0] = Fraction(1)
    for m in range(1, n_max + 1):
        b[m] = -sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return b


_B = _bernoulli(40)
# B_2, B_4, ..., B_40 as exact rationals
BERNOULLI_2K = tuple(_B[2 * k] for k in range(1, 21))

_STIRLING = np.array([float(BERNOULLI_2K[k - 1] / (2 * k * (2 * k - 1))) for k in range(1, 11)])
# B_{2k} / (2k)!
_EM_COEF = np.array([float(BERNOULLI_2K[k - 1] / math.factorial(2 * k)) for k in range(1, 21)])

DEFAULT_CONFIG = EvalConfig()


def _as_complex(s):
    arr = np.asarray(s, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("arguments must be finite")
    return arr


def _finish(arr, scalar):
    return complex(np.asarray(arr).reshape(-1)[0]) if scalar else arr


def _is_nonpositive_integer(s):
    return (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))


# --------------------------------------------------------------------------- Gamma


def _loggamma_right(z):
    """log Gamma(z) for Re z >= 1/2 (continuous branch)."""
    z = z.copy()
    acc = np.zeros_like(z)
    small = np.abs(z) < 12.0
    if np.any(small):
        for _ in range(12):
            acc[small] += np.log(z[small])
            z[small] += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    series *= inv
    return (z - 0.5) * np.log(z) - z + 0.5 * LOG_2PI + series - acc


def _log_sin_pi(z):
    """log sin(pi z), stable for large |Im z| and near integers (branch irrelevant)."""
    n = np.round(z.real)
    r = z - n  # sin(pi z) = (-1)^n sin(pi r)
    sign_term = np.where(np.mod(n, 2.0) == 1.0, 1j * np.pi, 0.0)
    upper = r.imag >= 0
    w = np.where(upper, r, np.conj(r))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        far = -1j * np.pi * w + np.log(0.5j) + np.log1p(-np.exp(2j * np.pi * w))
        near = np.log(np.sin(np.pi * w))
    val = np.where(w.imag > 1.0, far, near)
    return np.where(upper, val, np.conj(val)) + sign_term


def log_gamma(s):
    """Complex log Gamma.  The imaginary part is continuous on Re s >= 1/2."""
    scalar = np.ndim(s) == 0
    s = _as_complex(s)
    if np.any(_is_nonpositive_integer(s)):
        raise PoleError("Gamma has a pole at a non-positive integer")
    s1 = np.atleast_1d(s)
    out = np.empty_like(s1)
    left = s1.real < 0.5
    if np.any(~left):
        out[~left] = _loggamma_right(s1[~left])
    if np.any(left):
        z = s1[left]
        out[left] = LOG_PI - _log_sin_pi(z) - _loggamma_right(1.0 - z)
    return _finish(out.reshape(np.shape(s)), scalar)


def gamma(s, config: EvalConfig = DEFAULT_CONFIG):
    """Gamma(s) for complex s; raises PoleError at 0, -1, -2, ..."""
    return np.exp(log_gamma(s)) if np.ndim(s) else complex(np.exp(log_gamma(s)))


# --------------------------------------------------------------------------- zeta


def _em_length(s, config):
    height = np.max(np.abs(s.imag)) if s.size else 0.0
    return max(config.zeta_em_terms, int(math.ceil(config.zeta_terms_per_height * height)))


def _chunks(s, config):
    """Yield index blocks sorted by height, grouping points whose sum lengths agree within 1.5x.

    A shared length keeps the cancellation in the direct sum (|n^{-s}| grows
    like n^{-sigma}) at the level of each point's own length.
    """
    order = np.argsort(np.abs(s.imag), kind="stable")
    lengths = np.maximum(config.zeta_em_terms,
                         np.ceil(config.zeta_terms_per_height * np.abs(s.imag[order]))).astype(int)
    start = 0
    while start < order.size:
        stop = int(np.searchsorted(lengths, 1.5 * lengths[start], side="right"))
        n_terms = int(lengths[stop - 1])
        stop = min(stop, start + max(1, 2_000_000 // n_terms))
        block = order[start:stop]
        yield block, int(lengths[stop - 1])
        start = stop


def _em_corrections(s, x, order):
    """Bernoulli corrections sum_k B2k/(2k)! (s)_{2k-1} x^{-s-2k+1}."""
    log_x = math.log(x)
    base = np.exp(-s * log_x) / x  # x^{-s-1}
    rising = s.copy()  # (s)_1
    total = _EM_COEF[0] * rising * base
    for k in range(2, order + 1):
        rising = rising * (s + 2 * k - 3) * (s + 2 * k - 2)
        base = base / (x * x)
        total = total + _EM_COEF[k - 1] * rising * base
    return total


def _hurwitz_block(s, a, n_terms, order):
    logs = np.log(np.arange(n_terms, dtype=float) + a)
    direct = np.exp(-np.outer(s, logs)).sum(axis=1)
    x = n_terms + a
    x_pow = np.exp(-s * math.log(x))  # x^{-s}
    tail = x * x_pow / (s - 1.0) + 0.5 * x_pow + _em_corrections(s, x, order)
    return direct + tail


def hurwitz_zeta(s, a: float, config: EvalConfig = DEFAULT_CONFIG):
    """Hurwitz zeta(s, a) for 0 < a <= 1, continued to all s != 1."""
    if not 0.0 < a <= 1.0:
        raise DomainError("hurwitz_zeta requires 0 < a <= 1")
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(_as_complex(s))
    if np.any(s == 1.0):
        raise PoleError("zeta(s, a) has a pole at s = 1")
    out = np.empty_like(s)
    for block, n_terms in _chunks(s, config):
        out[block] = _hurwitz_block(s[block], a, n_terms, config.zeta_em_order)
    return _finish(out, scalar) if scalar else out


def zeta(s, config: EvalConfig = DEFAULT_CONFIG):
    """Riemann zeta(s) for all s != 1.

    Direct Euler-Maclaurin summation loses digits to cancellation left of
    Re s = -1, so there the functional equation maps back to Re s > 2.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(_as_complex(s))
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    out = np.empty_like(s)
    far_left = s.real < -1.0
    if np.any(~far_left):
        out[~far_left] = hurwitz_zeta(s[~far_left], 1.0, config)
    if np.any(far_left):
        w = s[far_left]
        with np.errstate(divide="ignore"):
            log_factor = w * math.log(2.0) + (w - 1.0) * LOG_PI + _log_sin_pi(0.5 * w) + log_gamma(1.0 - w)
        out[far_left] = np.exp(log_factor) * hurwitz_zeta(1.0 - w, 1.0, config)
    return _finish(out, scalar) if scalar else out


def _exprel(w):
    small = np.abs(w) < 1e-8
    safe = np.where(small, 1.0, w)
    return np.where(small, 1.0 + 0.5 * w, np.expm1(safe) / safe)


def dirichlet_L4(s, config: EvalConfig = DEFAULT_CONFIG):
    """L(s, chi_-4) = 4^-s [zeta(s, 1/4) - zeta(s, 3/4)], entire."""
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(_as_complex(s))
    out = np.empty_like(s)
    for block, n_terms in _chunks(s, config):
        sb = s[block]
        direct = np.zeros_like(sb)
        logs1 = np.log(np.arange(n_terms, dtype=float) + 0.25)
        logs3 = np.log(np.arange(n_terms, dtype=float) + 0.75)
        direct = np.exp(-np.outer(sb, logs1)).sum(axis=1) - np.exp(-np.outer(sb, logs3)).sum(axis=1)
        x1, x3 = n_terms + 0.25, n_terms + 0.75
        ratio_log = math.log(x3 / x1)
        p1 = np.exp(-sb * math.log(x1))
        p3 = np.exp(-sb * math.log(x3))
        # (x1^{1-s} - x3^{1-s}) / (s - 1), regular at s = 1
        pole_diff = x1 * p1 * ratio_log * _exprel((1.0 - sb) * ratio_log)
        tail = pole_diff + 0.5 * (p1 - p3)
        tail += _em_corrections(sb, x1, config.zeta_em_order)
        tail -= _em_corrections(sb, x3, config.zeta_em_order)
        out[block] = np.exp(-sb * math.log(4.0)) * (direct + tail)
    return _finish(out, scalar) if scalar else out


# --------------------------------------------------------------------------- Macdonald


def _trapezoid_k(nu: complex, z: float, phi: float, upper: float, step: float, rel_tol: float):
    """(1/2) int exp(-z cosh(u + i phi) - nu (u + i phi)) du over [-U, U]."""
    a = abs(nu.real)
    c = z * math.cos(phi)
    u_max = 0.5
    while c * (math.cosh(u_max) - 1.0) - a * u_max < upper + 4.0:
        u_max += 0.25
    shift = 1j * phi

    def integrand(u):
        w = u + shift
        return np.exp(-z * np.cosh(w) - nu * w)

    h = min(step, u_max / 8)
    n = int(math.ceil(u_max / h))
    h = u_max / n
    u = np.linspace(-u_max, u_max, 2 * n + 1)
    f = integrand(u)
    total = f.sum() - 0.5 * (f[0] + f[-1])
    value = 0.5 * h * total
    scale = 0.5 * h * np.abs(f).sum()
    for _ in range(14):
        mids = u[:-1] + 0.5 * h
        fm = integrand(mids)
        total = total + fm.sum()
        scale = 0.5 * scale + 0.25 * h * np.abs(fm).sum()
        h *= 0.5
        new = 0.5 * h * total
        u = np.sort(np.concatenate([u, mids]))
        converged = abs(new - value) <= rel_tol * abs(new) + 64 * np.finfo(float).eps * scale
        value = new
        if converged:
            return value
    return value


def bessel_k(nu, z: float, config: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Macdonald function K_nu(z) for complex order and real z > 0."""
    z = float(z)
    if not z > 0:
        raise DomainError("bessel_k requires z > 0")
    nu = complex(nu)
    b = nu.imag
    # steer the contour towards the saddle at Im u = -arcsin(b / z)
    ratio = min(abs(b) / z, 1.0)
    phi0 = math.asin(ratio)
    phi0 = min(phi0, math.pi / 2 - min(0.5, 2.0 / max(abs(b), 1.0)))
    phi = -math.copysign(phi0, b) if b != 0 else 0.0
    rel_tol = min(1e-13, config.target_rel_err * 1e-3)
    return complex(_trapezoid_k(nu, z, phi, config.quad_upper, config.quad_step, rel_tol))
