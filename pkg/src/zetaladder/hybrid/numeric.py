"""Numeric evaluation of relations with products and points taken from lemma runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import ConfigError, ZetaLadderError
from . import expr as E
from .symbols import DEFAULT_TABLE

TINY = 1e-300


class EvaluationError(ZetaLadderError, ValueError):
    pass


@dataclass
class Binding:
    values: dict = field(default_factory=dict)    # symbol -> float
    offsets: dict = field(default_factory=dict)   # point -> point - base
    lnT: float = None

    @property
    def delta(self):
        return self.values.get("Delta")


@dataclass(frozen=True)
class NumericResult:
    lhs: float
    rhs: float
    ratio: float
    lnT: float = None

    @property
    def deviation(self):
        return self.ratio - 1.0


def binding_from_reports(reports, table=DEFAULT_TABLE, Delta=None):
    """Bind product tokens and point symbols from reports sharing one (L, U)."""
    reports = list(reports)
    if not reports:
        raise ConfigError("no reports to bind")
    Ls = {r.L for r in reports}
    Us = {r.U for r in reports}
    if len(Ls) != 1 or len(Us) != 1:
        raise ConfigError(f"reports do not share one (L, U): L={sorted(Ls)}, U={sorted(Us)}")
    deltas = {r.Delta for r in reports if r.Delta is not None}
    if Delta is not None:
        deltas.add(Delta)
    if len(deltas) > 1:
        raise ConfigError(f"reports use different Delta values {sorted(deltas)}")
    by_lemma = {r.lemma: r for r in reports}
    b = Binding()
    b.values.update(U=reports[0].U, L=reports[0].L, pi=math.pi)
    if deltas:
        b.values["Delta"] = deltas.pop()
    for info in table.symbols.values():
        rep = by_lemma.get(info.lemma)
        if rep is None:
            continue
        if info.kind == "product":
            b.values[info.name] = rep.lhs
        elif info.kind == "point":
            b.values[info.name] = rep.points.alpha0
            b.offsets[info.name] = rep.points.offset0
    b.lnT = max(r.lnT for r in reports)
    return b


def _point_trig(name, point, b, table):
    """sin/cos/tan of m pi L + s through the offset s when L is an integer."""
    L = b.values.get("L")
    s = b.offsets.get(point)
    mult = table.base_of(point)
    if s is None or L is None or mult is None or L != int(L):
        return None
    sign = -1.0 if (mult * int(L)) % 2 else 1.0
    if name == "sin":
        return sign * math.sin(s)
    if name == "cos":
        return sign * math.cos(s)
    return math.tan(s)


def _base_value(base, b, table):
    if isinstance(base, E.Prime):
        return float(base.value)
    if isinstance(base, E.Sym):
        if base.name not in b.values:
            raise EvaluationError(f"unbound symbol {base.name}")
        return float(b.values[base.name])
    if isinstance(base, E.Off):
        if base.point in b.offsets:
            return float(b.offsets[base.point])
        try:
            return b.values[base.point] - base.multiple * math.pi * b.values["L"]
        except KeyError as exc:
            raise EvaluationError(f"unbound symbol {exc.args[0]}") from exc
    if isinstance(base, E.Func):
        inner = E.single_base(base.arg)
        if isinstance(inner, E.Sym) and base.name != "abs":
            v = _point_trig(base.name, inner.name, b, table)
            if v is not None:
                return v
        x = eval_expr(base.arg, b, table)
        if base.name == "abs":
            return abs(x)
        return getattr(math, base.name)(x)
    return eval_expr(base.expr, b, table)


def eval_expr(expr, b, table=DEFAULT_TABLE):
    total = 0.0
    for t in expr.terms:
        v = float(t.coeff)
        for base, e in t.factors:
            x = _base_value(base, b, table)
            p = e.value(b.delta)
            if p < 0 and abs(x) < TINY:
                raise EvaluationError(f"division by {x!r} from {E.base_text(base)}")
            if x < 0 and not e.is_integer:
                raise EvaluationError(f"negative base {E.base_text(base)} = {x!r} under power {e.text()}")
            v *= x ** p
        total += v
    return total


def numeric_eval(rel, binding, table=DEFAULT_TABLE):
    """(lhs, rhs, lhs / rhs) of a relation under ``binding``."""
    lhs = eval_expr(rel.lhs, binding, table)
    rhs = eval_expr(rel.rhs, binding, table)
    if abs(rhs) < TINY:
        raise EvaluationError(f"rhs {rhs!r} is too small to divide by")
    return NumericResult(lhs, rhs, lhs / rhs, binding.lnT)
