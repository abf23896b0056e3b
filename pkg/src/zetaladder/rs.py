"""Riemann-Siegel evaluation of theta, Hardy's Z and |zeta(1/2+it)|^2.

Valid for ``t >= T_FLOOR``.  The main sum uses Neumaier-compensated
accumulation; the remainder uses the corrections C0..C4 expressed through
derivatives of ``Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError

T_FLOOR = 10.0
TWO_PI = 2.0 * math.pi
# below this height C0..C4 cannot reach 1e-9; Euler-Maclaurin is used instead
RS_SWITCH = 500.0

# |B_2k| for k = 1..10
_BERNOULLI_ABS = [
    Fraction(1, 6), Fraction(1, 30), Fraction(1, 42), Fraction(1, 30),
    Fraction(5, 66), Fraction(691, 2730), Fraction(7, 6), Fraction(3617, 510),
    Fraction(43867, 798), Fraction(174611, 330),
]

THETA_TERMS = 7


def _theta_coefficient(k):
    # coefficient of t^-(2k-1) in the Stirling expansion of theta
    b = _BERNOULLI_ABS[k - 1]
    return float((1 - Fraction(1, 2 ** (2 * k - 1))) * b / (4 * k * (2 * k - 1)))


_THETA_COEFFS = [_theta_coefficient(k) for k in range(1, len(_BERNOULLI_ABS) + 1)]


def _as_heights(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("height must be finite")
    if np.any(arr < T_FLOOR):
        raise DomainError(f"height below Riemann-Siegel floor {T_FLOOR}: min {arr.min()!r}")
    return arr


def _scalar_or_array(template, value):
    if np.ndim(template) == 0:
        return float(value)
    return value


def riemann_siegel_theta(t, terms=THETA_TERMS):
    """theta(t) from its asymptotic expansion, with ``terms`` correction terms.

    The default of seven terms keeps the truncation error below 1e-14 for
    every t >= 10.
    """
    if not 0 <= terms <= len(_THETA_COEFFS):
        raise ValueError(f"terms must lie in [0, {len(_THETA_COEFFS)}]")
    x = _as_heights(t)
    out = _theta_raw(x, terms)
    return _scalar_or_array(t, out)


def _theta_raw(x, terms=THETA_TERMS):
    inv = 1.0 / x
    inv2 = inv * inv
    corr = np.zeros_like(x)
    for c in reversed(_THETA_COEFFS[:terms]):
        corr = corr * inv2 + c
    corr = corr * inv
    return 0.5 * x * np.log(x / TWO_PI) - 0.5 * x - math.pi / 8.0 + corr


def theta_prime(t):
    """Derivative of theta, from the differentiated expansion."""
    x = _as_heights(t)
    inv2 = 1.0 / (x * x)
    corr = np.zeros_like(x)
    for k in reversed(range(1, THETA_TERMS + 1)):
        corr = corr * inv2 - (2 * k - 1) * _THETA_COEFFS[k - 1]
    corr = corr * inv2
    return _scalar_or_array(t, 0.5 * np.log(x / TWO_PI) + corr)


# ---------------------------------------------------------------------------
# Riemann-Siegel remainder


_PSI_DEGREE = 90


@lru_cache(maxsize=1)
def _psi_taylor():
    """Taylor coefficients of Psi(1/2 + z) in z, computed in 60-digit arithmetic."""
    with mpmath.workdps(60):
        pi = mpmath.pi
        deg = _PSI_DEGREE
        # numerator cos(2 pi z^2 - 5 pi / 8), denominator -cos(2 pi z)
        num = [mpmath.mpf(0)] * (deg + 1)
        c58, s58 = mpmath.cos(5 * pi / 8), mpmath.sin(5 * pi / 8)
        for j in range(0, deg // 2 + 1):
            m = 2 * j
            if m > deg:
                break
            w = (2 * pi) ** j / mpmath.factorial(j)
            # cos(a - b) = cos a cos b + sin a sin b with a = 2 pi z^2
            if j % 4 == 0:
                num[m] = w * c58
            elif j % 4 == 1:
                num[m] = w * s58
            elif j % 4 == 2:
                num[m] = -w * c58
            else:
                num[m] = -w * s58
        den = [mpmath.mpf(0)] * (deg + 1)
        for j in range(0, deg // 2 + 1):
            den[2 * j] = -((-1) ** j) * (2 * pi) ** (2 * j) / mpmath.factorial(2 * j)
        out = [mpmath.mpf(0)] * (deg + 1)
        for m in range(deg + 1):
            acc = num[m]
            for i in range(1, m + 1):
                if den[i]:
                    acc -= den[i] * out[m - i]
            out[m] = acc / den[0]
        return out


def _derivative_poly(coeffs, d):
    """Coefficients of the d-th derivative of the series ``coeffs``."""
    res = []
    for m in range(d, len(coeffs)):
        res.append(coeffs[m] * mpmath.factorial(m) / mpmath.factorial(m - d))
    return res


@lru_cache(maxsize=1)
def _correction_polys():
    """Polynomials in z = p - 1/2 for C0..C4 (Gabcke's form)."""
    c = _psi_taylor()
    with mpmath.workdps(60):
        pi = mpmath.pi
        d = {k: _derivative_poly(c, k) for k in (0, 1, 2, 3, 4, 5, 6, 8, 9, 12)}

        def combo(*parts):
            n = max(len(d[k]) for _, k in parts)
            acc = [mpmath.mpf(0)] * n
            for w, k in parts:
                for i, v in enumerate(d[k]):
                    acc[i] += w * v
            return acc

        c0 = combo((1, 0))
        c1 = combo((-1 / (96 * pi**2), 3))
        c2 = combo((1 / (64 * pi**2), 2), (1 / (18432 * pi**4), 6))
        c3 = combo((-1 / (64 * pi**2), 1), (-1 / (3840 * pi**4), 5),
                   (-1 / (5308416 * pi**6), 9))
        c4 = combo((1 / (128 * pi**2), 0), (19 / (24576 * pi**4), 4),
                   (11 / (5898240 * pi**6), 8), (1 / (2038431744 * pi**8), 12))
        return tuple(np.array([float(v) for v in poly]) for poly in (c0, c1, c2, c3, c4))


def rs_remainder(t, n_terms=None):
    """Riemann-Siegel remainder (sign and scaling included) at heights ``t``.

    ``n_terms`` main-sum terms are taken as floor(sqrt(t / 2 pi)) when omitted.
    """
    a = np.sqrt(t / TWO_PI)
    n = np.floor(a) if n_terms is None else n_terms
    z = (a - n) - 0.5
    polys = _correction_polys()
    inv_a = 1.0 / a
    acc = np.zeros_like(a)
    for poly in reversed(polys):
        acc = acc * inv_a + np.polynomial.polynomial.polyval(z, poly)
    sign = np.where(np.asarray(n, dtype=np.int64) % 2 == 1, 1.0, -1.0)
    return sign * acc / np.sqrt(a)


def _main_sum(x):
    n_max_each = np.floor(np.sqrt(x / TWO_PI)).astype(np.int64)
    theta = _theta_raw(x)
    s = np.zeros_like(x)
    comp = np.zeros_like(x)
    for n in range(1, int(n_max_each.max()) + 1):
        active = n_max_each >= n
        term = np.where(active, np.cos(theta - x * math.log(n)) / math.sqrt(n), 0.0)
        # Neumaier step
        tot = s + term
        big = np.abs(s) >= np.abs(term)
        comp += np.where(big, (s - tot) + term, (term - tot) + s)
        s = tot
    return 2.0 * (s + comp), n_max_each


_EM_TERMS = 10


def _zeta_em(x):
    """zeta(1/2 + i x) by Euler-Maclaurin in double precision (x <= ~600)."""
    n_cut = int(math.ceil(x.max())) + 10
    s = 0.5 + 1j * x
    logs = np.log(np.arange(1, n_cut, dtype=float))
    head = np.exp(-np.outer(s, logs)) @ np.ones(n_cut - 1)
    big_n = float(n_cut)
    n_pow = np.exp(-s * math.log(big_n))
    total = head + big_n * n_pow / (s - 1.0) + 0.5 * n_pow
    rising = s.copy()
    power = n_pow / big_n
    for k in range(1, _EM_TERMS + 1):
        b2k = float(_BERNOULLI_ABS[k - 1]) * (1 if k % 2 else -1)
        total = total + b2k / math.factorial(2 * k) * rising * power
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        power = power / (big_n * big_n)
    return total


def _z_low(x, chunk=2048):
    out = np.empty_like(x)
    for i in range(0, x.size, chunk):
        part = x[i:i + chunk]
        out[i:i + chunk] = np.real(np.exp(1j * _theta_raw(part)) * _zeta_em(part))
    return out


def _z_high(x):
    main, n = _main_sum(x)
    return main + rs_remainder(x, n)


def hardy_z(t):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + i t) for t >= 10.

    Riemann-Siegel with C0..C4 above ``RS_SWITCH``, Euler-Maclaurin below it.
    """
    x = _as_heights(t)
    flat = np.atleast_1d(x).ravel()
    out = np.empty_like(flat)
    low = flat < RS_SWITCH
    if low.any():
        out[low] = _z_low(flat[low])
    if (~low).any():
        out[~low] = _z_high(flat[~low])
    return _scalar_or_array(t, out.reshape(np.shape(x)))


def zeta_mod_sq(t):
    """|zeta(1/2 + i t)|^2, evaluated as Z(t)^2."""
    z = hardy_z(t)
    return z * z


def hardy_z_grid(centers, offsets):
    """Z at every ``centers[p] + offsets[j]``, shape (len(centers), len(offsets)).

    Above ``RS_SWITCH`` the main sum is factored as
    n^(-i t) = n^(-i c) n^(-i d), so one complex matrix product replaces the
    per-node cosine sums.  Intended for uniform quadrature panels.
    """
    c = np.asarray(centers, dtype=float)
    d = np.asarray(offsets, dtype=float)
    t = c[:, None] + d[None, :]
    _as_heights(t)
    if t.min() < RS_SWITCH:
        return hardy_z(t)
    n_each = np.floor(np.sqrt(t / TWO_PI)).astype(np.int64)
    n_max = int(n_each.max())
    n = np.arange(1, n_max + 1, dtype=float)
    logn = np.log(n)
    left = np.exp(-1j * np.outer(c, logn)) / np.sqrt(n)
    right = np.exp(-1j * np.outer(logn, d))
    partial = left @ right
    short = n_each < n_max
    if short.any():
        # drop the terms n > N(t) at nodes where N(t) < n_max
        ts = t[short]
        extra = np.zeros(ts.shape, dtype=complex)
        for m in range(int(n_each[short].min()) + 1, n_max + 1):
            active = n_each[short] < m
            extra += np.where(active, np.exp(-1j * ts * math.log(m)) / math.sqrt(m), 0.0)
        partial[short] -= extra
    main = 2.0 * np.real(np.exp(1j * _theta_raw(t)) * partial)
    return main + rs_remainder(t, n_each)
