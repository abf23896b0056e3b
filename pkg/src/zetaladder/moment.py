"""Cumulative second moment F(T) = F(T0) + int_{T0}^T Z(t)^2 dt with checkpoints.

F is assembled block by block: every block of length ``BLOCK`` starting at a
checkpoint is cut into uniform panels, and the panel integrals are kept as a
compensated running sum.  Checkpoint values are persisted in a small text
cache; panel sums are rebuilt on demand and memoized in memory.
"""

from __future__ import annotations

import bisect
import logging
import math
import os
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import AccuracyError, DomainError, InversionError
from .quadrature import (DEFAULT_SPEC, NODES, QuadratureSpec, compensated_cumsum,
                         gauss_high, integrate_weighted, panel_rules)
from .rs import T_FLOOR, hardy_z_grid, zeta_mod_sq

log = logging.getLogger(__name__)

T0 = T_FLOOR
BLOCK = 100.0
# int_0^10 Z(t)^2 dt, from mpmath (40 digits, 80 Gauss-Legendre panels)
F_BASE = 9.982734637918992531399987893073568

CACHE_VERSION = "moment-cache v1"


@dataclass
class MomentCache:
    """Checkpoints (T, F(T)) spaced ``BLOCK`` apart, starting at (T0, F_BASE)."""

    spec: QuadratureSpec = DEFAULT_SPEC
    values: list = field(default_factory=lambda: [F_BASE])
    status: str = "new"

    @property
    def heights(self):
        return [T0 + BLOCK * i for i in range(len(self.values))]

    @property
    def top(self):
        return T0 + BLOCK * (len(self.values) - 1)

    def header(self):
        return f"# {CACHE_VERSION} {self.spec.header()}"

    def dumps(self):
        lines = [self.header()]
        for t, f in zip(self.heights, self.values):
            lines.append(f"{t!r}\t{f!r}")
        return "\n".join(lines) + "\n"

    def save(self, path):
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            fh.write(self.dumps())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path, spec: QuadratureSpec = DEFAULT_SPEC):
        """Read a cache file; a missing file or a foreign header gives a fresh cache."""
        cache = cls(spec=spec)
        if path is None or not os.path.exists(path):
            cache.status = "missing"
            return cache
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        if not lines or lines[0] != cache.header():
            log.warning("ignoring moment cache %s: header does not match the active quadrature settings", path)
            cache.status = "ignored"
            return cache
        values = []
        for i, line in enumerate(lines[1:]):
            t_str, f_str = line.split("\t")
            t, f = float(t_str), float(f_str)
            if t != T0 + BLOCK * i:
                raise ValueError(f"{path}: checkpoint {i} at T={t}, expected {T0 + BLOCK * i}")
            if values and f < values[-1]:
                raise ValueError(f"{path}: F decreases at T={t}")
            values.append(f)
        if not values or values[0] != F_BASE:
            cache.status = "ignored"
            return cache
        cache.values = values
        cache.status = "loaded"
        return cache


@dataclass(frozen=True)
class _Block:
    start: float
    edges: np.ndarray
    cum: np.ndarray  # cum[j] = int_start^edges[j] Z^2


class MomentFunction:
    """F(T) on top of a :class:`MomentCache`, with block memoization."""

    def __init__(self, spec: QuadratureSpec = DEFAULT_SPEC, cache: MomentCache = None,
                 path=None):
        if cache is None:
            cache = MomentCache.load(path, spec) if path else MomentCache(spec=spec)
        if cache.spec != spec:
            raise ValueError("cache quadrature settings differ from the active ones")
        self.spec = spec
        self.cache = cache
        self.path = path
        self._blocks = {}
        self._lock = threading.Lock()

    # -- blocks -----------------------------------------------------------

    def _integrate_block(self, m):
        start = T0 + BLOCK * m
        end = start + BLOCK
        n = max(1, int(math.ceil(BLOCK / self.spec.panel_width(end))))
        h = BLOCK / n
        edges = start + h * np.arange(n + 1)
        edges[-1] = end
        centers = start + h * (np.arange(n) + 0.5)
        z = hardy_z_grid(centers, 0.5 * h * NODES)
        g_hi, g_lo = panel_rules(z * z, 0.5 * h)
        err = np.abs(g_hi - g_lo)
        # each panel may also use its width share of the block's relative budget
        share = max(self.spec.rel_tol * abs(float(np.sum(g_hi))), self.spec.abs_tol) * h / BLOCK
        tol = np.maximum(self.spec.rel_tol * np.abs(g_hi), share)
        panels = np.array(g_hi, dtype=float)
        for j in np.nonzero(err > tol)[0]:
            log.debug("refining panel %d of block %d", j, m)
            panels[j] = integrate_weighted(edges[j], edges[j + 1], zeta_mod_sq, self.spec)
        return _Block(start=start, edges=edges, cum=compensated_cumsum(panels))

    def block(self, m):
        blk = self._blocks.get(m)
        if blk is None:
            blk = self._integrate_block(m)
            self._blocks[m] = blk
        return blk

    def extend_to(self, T):
        """Make sure the checkpoints reach at least height ``T``."""
        need = int(math.ceil((T - T0) / BLOCK))
        if need < len(self.cache.values):
            return
        with self._lock:
            values = self.cache.values
            while len(values) <= need:
                m = len(values) - 1
                values.append(values[-1] + float(self.block(m).cum[-1]))
        if self.path:
            self.cache.save(self.path)

    # -- evaluation -------------------------------------------------------

    def __call__(self, T):
        return self.F(T)

    def F(self, T):
        """F(T) for scalar or array ``T >= T0``."""
        x = np.asarray(T, dtype=float)
        if np.any(~np.isfinite(x)) or np.any(x < T0):
            raise DomainError(f"moment F needs T >= {T0}")
        flat = np.atleast_1d(x).ravel()
        self.extend_to(float(flat.max()))
        out = np.empty_like(flat)
        m_all = np.minimum(np.floor((flat - T0) / BLOCK).astype(np.int64),
                           len(self.cache.values) - 2)
        m_all = np.maximum(m_all, 0)
        for m in np.unique(m_all):
            sel = m_all == m
            out[sel] = self._f_in_block(int(m), flat[sel])
        if np.ndim(T) == 0:
            return float(out[0])
        return out.reshape(x.shape)

    def _f_in_block(self, m, x):
        blk = self.block(m)
        n = len(blk.edges) - 1
        j = np.clip(np.searchsorted(blk.edges, x, side="right") - 1, 0, n - 1)
        lo = blk.edges[j]
        base = self.cache.values[m] + blk.cum[j]
        part = np.zeros_like(x)
        inside = x > lo
        if inside.any():
            part[inside] = gauss_high(zeta_mod_sq, lo[inside], x[inside])
        return base + part

    def inverse(self, target, lower):
        """Smallest x >= lower with F(x) = target (F must reach target)."""
        self.extend_to(lower)
        values = self.cache.values
        while values[-1] < target:
            self.extend_to(self.cache.top + BLOCK)
            values = self.cache.values
        m = max(bisect.bisect_right(values, target) - 1, 0)
        m = min(m, len(values) - 2)
        m = max(m, int(math.floor((lower - T0) / BLOCK)))
        blk = self.block(m)
        panel_f = values[m] + blk.cum
        j = int(np.searchsorted(panel_f, target, side="right")) - 1
        j = min(max(j, 0), len(blk.edges) - 2)
        lo, hi = float(blk.edges[j]), float(blk.edges[j + 1])
        base = panel_f[j]

        def g(x):
            if x <= lo:
                return base - target
            return base + float(gauss_high(zeta_mod_sq, lo, x)) - target

        g_lo, g_hi = g(lo), g(hi)
        if g_lo > 0 or g_hi < 0:
            raise InversionError(f"F inverse bracket [{lo}, {hi}] does not contain {target}")
        if g_lo == 0:
            return lo
        if g_hi == 0:
            return hi
        return brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


_default = {}


def default_moment(spec: QuadratureSpec = DEFAULT_SPEC, path=None):
    """Process-wide :class:`MomentFunction` per (spec, path)."""
    key = (spec, path)
    if key not in _default:
        _default[key] = MomentFunction(spec, path=path)
    return _default[key]


def moment_F(T, spec: QuadratureSpec = DEFAULT_SPEC, cache: MomentCache = None):
    """F(T) = int_{T0}^T Z^2 dt + F(T0), extending ``cache`` as needed."""
    if cache is None:
        return default_moment(spec).F(T)
    return MomentFunction(spec, cache=cache).F(T)


__all__ = ["BLOCK", "F_BASE", "T0", "AccuracyError", "MomentCache", "MomentFunction",
           "default_moment", "moment_F"]
