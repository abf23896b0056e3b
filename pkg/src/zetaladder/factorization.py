"""Test-function catalog, mean-value point extraction and lemma reports.

Every catalog function is stored through its offset s = t - T from the base
point T = pi L or 2 pi L, which keeps trigonometric evaluations exact in s.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ExtractionError
from .ladder import IterateChain, Ladder, default_ladder
from .quadrature import integrate_weighted
from .rs import zeta_mod_sq

EPSILON_DEFAULT = 0.05
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class TestFunction:
    id: str
    label: str
    base_multiple: int           # T = base_multiple * pi * L
    profile: Callable            # s -> f(T + s), vectorized
    mean: Callable               # (U, Delta) -> (1/U) int_0^U f
    external: Callable           # (U, Delta) -> E
    functional: Callable         # (s0, Delta) -> F
    needs_epsilon: bool = False  # U in (0, pi/2 - eps] instead of (0, pi/2)
    uses_delta: bool = False
    constant: bool = False

    __test__ = False  # not a pytest class

    def base_point(self, L):
        return self.base_multiple * math.pi * L

    def check_U(self, U, epsilon=EPSILON_DEFAULT):
        if self.needs_epsilon:
            if not 0.0 < U <= HALF_PI - epsilon:
                raise DomainError("U outside (0, π/2−ε]")
        elif not 0.0 < U < HALF_PI:
            raise DomainError("U outside (0, π/2)")

    def check_delta(self, Delta):
        if self.uses_delta and not (Delta is not None and Delta > 0):
            raise DomainError(f"lemma {self.id} needs Delta > 0")

    def evaluator(self, T, Delta=None):
        """t -> f(t), computed through the offset t - T."""
        prof = self.profile

        def f(t):
            return prof(np.asarray(t, dtype=float) - T, Delta)
        return f


def _sec2(s, _d=None):
    c = np.cos(s)
    return 1.0 / (c * c)


def _sin2_cos4(s, _d=None):
    c = np.cos(s)
    sn = np.sin(s)
    return sn * sn / (c * c * c * c)


def _power(s, d):
    return np.power(np.maximum(s, 0.0), d)


def _sinc(U):
    return math.sin(U) / U


CATALOG = {
    "1": TestFunction(
        "1", "f1 = 1/cos^2 t on [pi L, pi L + U]", 1, _sec2,
        mean=lambda U, d: math.tan(U) / U,
        external=lambda U, d: math.tan(U) / U,
        functional=lambda s, d: math.cos(s) ** 2,
        needs_epsilon=True),
    "2": TestFunction(
        "2", "f2 = sin^2 t / cos^4 t on [pi L, pi L + U]", 1, _sin2_cos4,
        mean=lambda U, d: math.tan(U) ** 3 / (3.0 * U),
        external=lambda U, d: math.tan(U) ** 3 / (3.0 * U),
        functional=lambda s, d: math.cos(s) ** 4 / math.sin(s) ** 2,
        needs_epsilon=True),
    "3": TestFunction(
        "3", "fbar = (t - pi L)^Delta on [pi L, pi L + U]", 1, _power,
        mean=lambda U, d: U ** d / (1.0 + d),
        external=lambda U, d: U ** d / (1.0 + d),
        functional=lambda s, d: s ** (-d),
        uses_delta=True),
    "4": TestFunction(
        "4", "f3 = sin^2 t on [2 pi L, 2 pi L + U]", 2, lambda s, d: np.sin(s) ** 2,
        mean=lambda U, d: 0.5 - 0.5 * _sinc(U) * math.cos(U),
        external=lambda U, d: 0.5 - 0.5 * _sinc(U) * math.cos(U),
        functional=lambda s, d: 1.0 / math.sin(s) ** 2),
    "5": TestFunction(
        "5", "f4 = cos^2 t on [2 pi L, 2 pi L + U]", 2, lambda s, d: np.cos(s) ** 2,
        mean=lambda U, d: 0.5 + 0.5 * _sinc(U) * math.cos(U),
        external=lambda U, d: 0.5 + 0.5 * _sinc(U) * math.cos(U),
        functional=lambda s, d: 1.0 / math.cos(s) ** 2),
    "6": TestFunction(
        "6", "f5 = 1/cos^2 t on [2 pi L, 2 pi L + U]", 2, _sec2,
        mean=lambda U, d: math.tan(U) / U,
        external=lambda U, d: _sinc(U) / math.cos(U),
        functional=lambda s, d: math.cos(s) ** 2,
        needs_epsilon=True),
    "7": TestFunction(
        "7", "f6 = cos^3 t on [2 pi L, 2 pi L + U]", 2, lambda s, d: np.cos(s) ** 3,
        mean=lambda U, d: _sinc(U) - U * U / 3.0 * _sinc(U) ** 3,
        external=lambda U, d: _sinc(U) - U * U / 3.0 * _sinc(U) ** 3,
        functional=lambda s, d: 1.0 / math.cos(s) ** 3),
    "8": TestFunction(
        "8", "f7 = cos t on [2 pi L, 2 pi L + U]", 2, lambda s, d: np.cos(s),
        mean=lambda U, d: _sinc(U),
        external=lambda U, d: _sinc(U),
        functional=lambda s, d: 1.0 / math.cos(s)),
    "3s": TestFunction(
        "3s", "fbar* = (t - 2 pi L)^Delta on [2 pi L, 2 pi L + U]", 2, _power,
        mean=lambda U, d: U ** d / (1.0 + d),
        external=lambda U, d: U ** d / (1.0 + d),
        functional=lambda s, d: s ** (-d),
        uses_delta=True),
    "one": TestFunction(
        "one", "control f = 1 on [pi L, pi L + U]", 1, lambda s, d: np.ones_like(s),
        mean=lambda U, d: 1.0,
        external=lambda U, d: 1.0,
        functional=lambda s, d: 1.0,
        constant=True),
}

LEMMAS = ("1", "2", "3", "4", "5", "6", "7", "8")


def get_function(lemma) -> TestFunction:
    try:
        return CATALOG[str(lemma)]
    except KeyError:
        raise DomainError(f"unknown lemma {lemma!r}; choose from {sorted(CATALOG)}") from None


def external_E(lemma, U, Delta=None, epsilon=EPSILON_DEFAULT):
    f = get_function(lemma)
    f.check_U(U, epsilon)
    f.check_delta(Delta)
    return f.external(U, Delta)


def functional_F(lemma, alpha0, T, U=None, Delta=None):
    """F part of the right-hand side; depends on alpha0 only through alpha0 - T."""
    f = get_function(lemma)
    f.check_delta(Delta)
    s = alpha0 - T
    if U is not None and not 0.0 < s < U:
        raise DomainError(f"alpha0 - T = {s} outside (0, {U})")
    return f.functional(s, Delta)


# ---------------------------------------------------------------------------
# mean-value points


@dataclass
class MeanValuePoints:
    alpha0: float
    offset0: float               # alpha0 - T, kept separately to avoid cancellation
    alphas: list
    betas: list = field(default_factory=list)
    targets: list = field(default_factory=list)        # I_r / J_r per level
    substitution: list = field(default_factory=list)   # I_r / J_{r-1} - 1 per level
    means: list = field(default_factory=list)          # J_r / (b^r - a^r)

    def to_dict(self):
        return asdict(self)


def smallest_root(g_vec, g_scalar, lo, hi, step):
    """Smallest x in [lo, hi] where g changes sign, scanning a grid of ``step``."""
    n = max(16, int(math.ceil((hi - lo) / step)))
    grid = np.linspace(lo, hi, n + 1)
    vals = np.asarray(g_vec(grid), dtype=float)
    if vals[0] == 0.0:
        return float(grid[0])
    sign0 = np.sign(vals[0])
    hits = np.nonzero(np.sign(vals[1:]) != sign0)[0]
    if hits.size == 0:
        raise ExtractionError(
            f"no root on [{lo}, {hi}]: target outside the range "
            f"[{vals.min() if vals.min() < 0 else 0.0}, ...] of the segment samples")
    i = int(hits[0])
    if vals[i + 1] == 0.0:
        return float(grid[i + 1])
    return brentq(g_scalar, float(grid[i]), float(grid[i + 1]),
                  xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


def extract_points(f: TestFunction, chain: IterateChain, ladder: Ladder = None,
                   Delta=None, betas=None, substitution_tol=1e-6):
    """Mean-value points (alpha0, alpha_1..k) of ``f`` over ``chain``.

    ``betas``, when given, is copied into the result (they come from the same
    procedure run with f = 1).
    """
    ladder = ladder if ladder is not None else default_ladder()
    spec = ladder.spec
    T = chain.a
    U = chain.U
    fx = f.evaluator(T, Delta)
    if f.constant:
        J_prev = U
    else:
        J_prev = integrate_weighted(chain.lower[0], chain.upper[0], fx, spec)
    pts = MeanValuePoints(alpha0=math.nan, offset0=math.nan, alphas=[])
    for r in range(1, chain.k + 1):
        lo, hi = chain.segment(r)

        def composed(t, r=r):
            return fx(ladder.phi1_power(t, r))

        I_r = integrate_weighted(lo, hi, lambda t: composed(t) * ladder.z_tilde_sq(t), spec)
        if f.constant:
            J_r = hi - lo
        else:
            J_r = integrate_weighted(lo, hi, composed, spec)
        sub = I_r / J_prev - 1.0
        if abs(sub) > substitution_tol:
            raise ExtractionError(f"level {r}: substitution identity off by {sub:.3e}")
        target = I_r / J_r
        step = spec.panel_width(hi) / 8.0
        x = smallest_root(lambda t: ladder.z_tilde_sq(t) - target,
                          lambda t: ladder.z_tilde_sq(t) - target, lo, hi, step)
        pts.alphas.append(float(x))
        pts.targets.append(target)
        pts.substitution.append(sub)
        pts.means.append(J_r / (hi - lo))
        J_prev = J_r
    lo_k, hi_k = chain.segment(chain.k)
    mean_k = J_prev / (hi_k - lo_k)
    if f.constant:
        s0 = 0.5 * U
    else:
        prof = f.profile
        s0 = smallest_root(lambda s: prof(s, Delta) - mean_k,
                           lambda s: float(prof(s, Delta)) - mean_k, 0.0, U, U / 64.0)
    pts.offset0 = float(s0)
    pts.alpha0 = T + float(s0)
    if chain.k == 0:
        pts.means.append(mean_k)
    if betas is not None:
        pts.betas = list(betas)
    return pts


# ---------------------------------------------------------------------------
# lemma reports


@dataclass
class FactorizationReport:
    lemma: str
    L: float
    U: float
    k: int
    Delta: Optional[float]
    T: float
    points: MeanValuePoints
    mean_closed: float
    E: float
    F: float
    lhs: float
    rhs: float
    identity_rhs: float      # f(alpha0) * prod Z~^2(alpha_r) / Z~^2(beta_r)
    exact_residual: float
    asymptotic_residual: float
    lnT: float
    lnlnT_over_lnT: float

    def row(self):
        return {
            "lemma": self.lemma,
            "L": self.L,
            "U": self.U,
            "k": self.k,
            "Delta": "" if self.Delta is None else self.Delta,
            "alpha0": self.points.alpha0,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "exact_residual": self.exact_residual,
            "asymptotic_residual": self.asymptotic_residual,
            "lnT": self.lnT,
        }

    def sidecar(self):
        return {
            "lemma": self.lemma, "L": self.L, "U": self.U, "k": self.k, "Delta": self.Delta,
            "T": self.T, "offset0": self.points.offset0, "points": self.points.to_dict(),
            "E": self.E, "F": self.F, "mean_closed": self.mean_closed,
            "identity_rhs": self.identity_rhs,
        }


class LemmaEvaluator:
    """Runs lemma instances over one ladder, sharing beta vectors per chain."""

    def __init__(self, ladder: Ladder = None, epsilon=EPSILON_DEFAULT):
        self.ladder = ladder if ladder is not None else default_ladder()
        self.epsilon = epsilon
        self._chains = {}
        self._betas = {}

    def chain(self, a, U, k):
        key = (a, U, k)
        if key not in self._chains:
            self._chains[key] = self.ladder.reverse_iterate_interval(a, U, k)
        return self._chains[key]

    def betas(self, chain):
        key = (chain.a, chain.U, chain.k)
        if key not in self._betas:
            pts = extract_points(CATALOG["one"], chain, self.ladder)
            self._betas[key] = pts.alphas
        return self._betas[key]

    def evaluate(self, lemma, L, U, k, Delta=None):
        f = get_function(lemma)
        f.check_U(U, self.epsilon)
        f.check_delta(Delta)
        if not 1 <= k <= self.ladder.k0:
            raise DomainError(f"k must lie in [1, {self.ladder.k0}]")
        if not f.uses_delta:
            Delta = None
        T = f.base_point(L)
        chain = self.chain(T, U, k)
        betas = self.betas(chain)
        pts = extract_points(f, chain, self.ladder, Delta, betas=betas)
        s0 = pts.offset0
        E = f.external(U, Delta)
        F = f.functional(s0, Delta)
        if f.constant:
            pts.alphas = list(betas)
        alphas = np.array(pts.alphas)
        beta_arr = np.array(betas)
        lhs = float(np.prod(self._zeta_ratio(alphas, beta_arr)))
        zt = self.ladder.z_tilde_sq
        identity_rhs = float(f.profile(np.array(s0), Delta)) * float(
            np.prod(zt(alphas) / zt(beta_arr)))
        mean_closed = f.mean(U, Delta)
        rhs = E * F
        lnT = math.log(T)
        return FactorizationReport(
            lemma=f.id, L=L, U=U, k=k, Delta=Delta, T=T, points=pts,
            mean_closed=mean_closed, E=E, F=F, lhs=lhs, rhs=rhs,
            identity_rhs=identity_rhs,
            exact_residual=identity_rhs / mean_closed - 1.0,
            asymptotic_residual=lhs / rhs - 1.0,
            lnT=lnT, lnlnT_over_lnT=math.log(lnT) / lnT)

    @staticmethod
    def _zeta_ratio(alphas, betas):
        if alphas.size == 0:
            return np.ones(0)
        return zeta_mod_sq(alphas) / zeta_mod_sq(betas)


def evaluate_lemma(lemma, L, U, k, Delta=None, ladder: Ladder = None):
    return LemmaEvaluator(ladder).evaluate(lemma, L, U, k, Delta)
