"""Adaptive Gauss-Legendre panel quadrature tuned to the oscillation of Z^2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import AccuracyError
from .rs import T_FLOOR, theta_prime

HIGH_ORDER = 16
LOW_ORDER = 10

_XH, _WH = np.polynomial.legendre.leggauss(HIGH_ORDER)
_XL, _WL = np.polynomial.legendre.leggauss(LOW_ORDER)
# both rules on one node vector: [high nodes | low nodes]
NODES = np.concatenate([_XH, _XL])


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_panel_width: Optional[float] = None
    max_subdivisions: int = 40

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def panel_width(self, t):
        """Panel cap at height t: pi / theta'(t), about half a zero gap of Z."""
        width = math.pi / theta_prime(max(float(t), T_FLOOR))
        if self.max_panel_width is not None:
            width = min(width, self.max_panel_width)
        return width

    def header(self):
        return f"rel_tol={self.rel_tol!r} abs_tol={self.abs_tol!r}"


DEFAULT_SPEC = QuadratureSpec()


def neumaier_sum(values):
    """Compensated sum of a sequence of floats."""
    s = 0.0
    c = 0.0
    for v in values:
        v = float(v)
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def compensated_cumsum(values):
    """Running compensated sums, with a leading zero: len(values) + 1 entries."""
    out = np.empty(len(values) + 1)
    out[0] = 0.0
    s = 0.0
    c = 0.0
    for i, v in enumerate(values):
        v = float(v)
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i + 1] = s + c
    return out


def panel_rules(values, half_width):
    """High- and low-order panel estimates from values on ``NODES``.

    ``values`` has shape (..., HIGH_ORDER + LOW_ORDER).
    """
    hi = half_width * (values[..., :HIGH_ORDER] @ _WH)
    lo = half_width * (values[..., HIGH_ORDER:] @ _WL)
    return hi, lo


def gauss_high(w, a, b):
    """Single high-order Gauss-Legendre panel on [a, b] (vectorized over a, b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    pts = mid[..., None] + half[..., None] * _XH
    return half * (w(pts) @ _WH)


def uniform_panels(a, b, spec):
    """Equal-width panel edges on [a, b] no wider than the cap at b."""
    width = spec.panel_width(b)
    n = max(1, int(math.ceil((b - a) / width)))
    return np.linspace(a, b, n + 1)


def _panel_tolerance(value, width, total_width, scale, spec):
    share = max(spec.rel_tol * scale, spec.abs_tol) * width / total_width
    return max(spec.rel_tol * abs(value), share)


def integrate_weighted(a, b, w: Callable, spec: QuadratureSpec = DEFAULT_SPEC,
                       edges=None, return_error=False):
    """Adaptive quadrature of the vectorized integrand ``w`` over [a, b].

    The interval is cut into panels no wider than ``spec.panel_width``; every
    panel gets a 16/10 point Gauss-Legendre pair and is bisected while the
    pair disagrees by more than its share of the tolerance: the larger of
    rel_tol times its own value and rel_tol times the whole integral prorated
    by width, so panels near zeros of the integrand do not chase the
    floating-point noise floor.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if edges is None:
        edges = uniform_panels(a, b, spec)
    total = b - a
    pending = [(float(lo), float(hi), 0) for lo, hi in zip(edges[:-1], edges[1:])]
    accepted = []
    error_total = 0.0
    failed = False
    scale = None
    while pending:
        lo = np.array([p[0] for p in pending])
        hi = np.array([p[1] for p in pending])
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[:, None] + half[:, None] * NODES
        vals = np.asarray(w(pts), dtype=float)
        if vals.shape != pts.shape:
            vals = np.broadcast_to(vals, pts.shape)
        g_hi, g_lo = panel_rules(vals, half)
        if scale is None:
            # the first pass covers [a, b]; its magnitude sets the relative budget
            scale = abs(float(np.sum(g_hi)))
        nxt = []
        for (p_lo, p_hi, depth), v, e in zip(pending, g_hi, np.abs(g_hi - g_lo)):
            if not np.isfinite(v):
                raise AccuracyError(f"non-finite integrand on [{p_lo}, {p_hi}]",
                                    estimate=None, error=math.inf)
            if e <= _panel_tolerance(v, p_hi - p_lo, total, scale, spec):
                accepted.append((p_lo, v))
                error_total += e
            elif depth >= spec.max_subdivisions:
                accepted.append((p_lo, v))
                error_total += e
                failed = True
            else:
                c = 0.5 * (p_lo + p_hi)
                nxt.append((p_lo, c, depth + 1))
                nxt.append((c, p_hi, depth + 1))
        pending = nxt
    accepted.sort(key=lambda item: item[0])
    value = neumaier_sum(v for _, v in accepted)
    if failed:
        raise AccuracyError(
            f"quadrature on [{a}, {b}] did not converge within "
            f"{spec.max_subdivisions} subdivisions", estimate=value, error=error_total)
    if return_error:
        return value, error_total
    return value
