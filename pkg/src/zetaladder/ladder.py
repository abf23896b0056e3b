"""The ladder phi1 = Phi^{-1} o F, its reverse iterates, and Z~^2 = phi1'.

Phi(y) = y ln y + (gamma - ln 2 pi) y + c0 is the balance function.  With
F(T) the cumulative second moment of Z, phi1(T) solves Phi(phi1(T)) = F(T),
so implicit differentiation gives phi1'(t) = Z(t)^2 / Phi'(phi1(t)).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, InversionError
from .moment import T0, MomentFunction, default_moment
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .rs import zeta_mod_sq

EULER_GAMMA = 0.57721566490153286061
K0_DEFAULT = 5
PHI_FLOOR = 4.0


@dataclass(frozen=True)
class LadderConstants:
    gamma: float = EULER_GAMMA
    ln_two_pi: float = math.log(2.0 * math.pi)
    c0: float = 0.0

    @property
    def slope(self):
        return self.gamma - self.ln_two_pi


DEFAULT_CONSTANTS = LadderConstants()


def Phi(y, consts: LadderConstants = DEFAULT_CONSTANTS):
    """Balance function y ln y + (gamma - ln 2 pi) y + c0, for y > 1."""
    y = _check_phi_arg(y)
    out = y * np.log(y) + consts.slope * y + consts.c0
    return float(out) if np.ndim(out) == 0 else out


def Phi_prime(y, consts: LadderConstants = DEFAULT_CONSTANTS):
    y = _check_phi_arg(y)
    out = np.log(y) + 1.0 + consts.slope
    return float(out) if np.ndim(out) == 0 else out


def _check_phi_arg(y):
    arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 1.0):
        raise DomainError("Phi is defined for y > 1 only")
    return arr


def invert_phi(value, upper, consts: LadderConstants = DEFAULT_CONSTANTS):
    """Solve Phi(y) = value on [PHI_FLOOR, upper], elementwise.

    Phi is increasing and convex there, so Newton started at the upper end of
    the bracket descends monotonically; a bisection step replaces any iterate
    that leaves the bracket.  Iteration stops at the floating-point fixed point.
    """
    v = np.atleast_1d(np.asarray(value, dtype=float))
    hi = np.broadcast_to(np.asarray(upper, dtype=float), v.shape).copy()
    lo = np.full_like(v, PHI_FLOOR)
    phi_lo = Phi(lo, consts)
    phi_hi = Phi(hi, consts)
    if np.any(v < phi_lo) or np.any(v > phi_hi):
        raise InversionError("balance equation has no root in [4, T]")
    y = hi.copy()
    for _ in range(100):
        resid = Phi(y, consts) - v
        step = resid / Phi_prime(y, consts)
        nxt = y - step
        bad = (nxt < lo) | (nxt > hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        lo = np.where(resid < 0, np.maximum(lo, y), lo)
        hi = np.where(resid > 0, np.minimum(hi, y), hi)
        done = np.abs(nxt - y) <= 2.0 * np.spacing(y)
        y = nxt
        if done.all():
            break
    return y


@dataclass
class IterateChain:
    a: float
    U: float
    k: int
    lower: list = field(default_factory=list)   # a^(0..k)
    upper: list = field(default_factory=list)   # b^(0..k)
    residuals: list = field(default_factory=list)  # per level (|F(a^r)-Phi(a^{r-1})|, same for b)
    constants: LadderConstants = DEFAULT_CONSTANTS

    def segment(self, r):
        return self.lower[r], self.upper[r]

    def to_dict(self):
        return {
            "a": self.a,
            "U": self.U,
            "k": self.k,
            "endpoints": [[lo, hi] for lo, hi in zip(self.lower, self.upper)],
            "residuals": [list(r) for r in self.residuals],
            "constants": asdict(self.constants),
        }


class Ladder:
    """phi1 and its companions over one :class:`MomentFunction`."""

    def __init__(self, moment: MomentFunction = None,
                 consts: LadderConstants = DEFAULT_CONSTANTS, k0: int = K0_DEFAULT):
        self.moment = moment if moment is not None else default_moment()
        self.consts = consts
        self.k0 = k0

    @property
    def spec(self) -> QuadratureSpec:
        return self.moment.spec

    def Phi(self, y):
        return Phi(y, self.consts)

    def Phi_prime(self, y):
        return Phi_prime(y, self.consts)

    def phi1(self, T):
        x = np.asarray(T, dtype=float)
        if np.any(x < T0):
            raise DomainError(f"phi1 needs T >= {T0}")
        y = invert_phi(self.moment.F(np.atleast_1d(x)), np.atleast_1d(x), self.consts)
        if np.ndim(T) == 0:
            return float(y[0])
        return y.reshape(x.shape)

    def phi1_power(self, t, r):
        """phi1 applied r times."""
        y = np.asarray(t, dtype=float)
        for _ in range(r):
            y = self.phi1(y)
        return y

    def phi1_inverse(self, v):
        """x > v with F(x) = Phi(v): one reverse iteration step."""
        v = float(v)
        if v < T0:
            raise DomainError(f"phi1_inverse needs v >= {T0}")
        target = self.Phi(v)
        if self.moment.F(v) >= target:
            raise InversionError(f"F({v}) >= Phi({v}); phi1(t) < t is violated")
        hi = v * (1.0 + 2.0 * (1.0 - self.consts.gamma) / math.log(v)) + 10.0
        for _ in range(60):
            if self.moment.F(hi) >= target:
                break
            hi = v + 2.0 * (hi - v)
        else:
            raise InversionError(f"no bracket for phi1_inverse({v}) after 60 widenings")
        return self.moment.inverse(target, v)

    def z_tilde_sq(self, t):
        """Z(t)^2 / Phi'(phi1(t)), which equals d phi1 / dt."""
        x = np.asarray(t, dtype=float)
        out = zeta_mod_sq(x) / self.Phi_prime(self.phi1(x))
        return float(out) if np.ndim(out) == 0 else out

    def reverse_iterate_interval(self, a, U, k):
        if U <= 0:
            raise DomainError("U must be positive")
        if not 0 <= k <= self.k0:
            raise DomainError(f"k must lie in [0, {self.k0}]")
        chain = IterateChain(a=float(a), U=float(U), k=int(k), constants=self.consts)
        lo, hi = float(a), float(a) + float(U)
        chain.lower.append(lo)
        chain.upper.append(hi)
        for _ in range(k):
            nlo = self.phi1_inverse(lo)
            nhi = self.phi1_inverse(hi)
            res = (abs(self.moment.F(nlo) - self.Phi(lo)), abs(self.moment.F(nhi) - self.Phi(hi)))
            chain.lower.append(nlo)
            chain.upper.append(nhi)
            chain.residuals.append(res)
            lo, hi = nlo, nhi
        return chain


_ladders = {}


def default_ladder(spec: QuadratureSpec = DEFAULT_SPEC, path=None,
                   consts: LadderConstants = DEFAULT_CONSTANTS):
    key = (spec, path, consts)
    if key not in _ladders:
        _ladders[key] = Ladder(default_moment(spec, path), consts)
    return _ladders[key]
