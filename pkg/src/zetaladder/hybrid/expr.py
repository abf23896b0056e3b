"""Normal forms for power-product expressions with rational and Delta exponents.

An expression is a tuple of terms; a term is a rational coefficient times a
sorted tuple of (base, exponent) factors.  Bases are symbols, primes, point
offsets, functions of a normal form, or primitive sums.  The rules that make
the form unique:

* products never expand sums; a multi-term factor becomes a ``SumBase``;
* addition distributes only sum factors whose exponent is exactly 1, then
  pulls out the common monomial content and the signed first coefficient;
* a sum base with an integer exponent has first coefficient +1;  under a
  non-integer exponent the sign of the base is part of the value and both
  orientations may occur;
* numeric bases under non-integer exponents are split into primes, with the
  integer part of each exponent folded into the coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ZetaLadderError
from .symbols import DEFAULT_TABLE


class AlgebraError(ZetaLadderError, ValueError):
    pass


class ExponentError(AlgebraError):
    pass


# -- exponents ------------------------------------------------------------

@dataclass(frozen=True)
class Exponent:
    """coeff * Delta**dpow with dpow in {-1, 0, 1}."""

    coeff: Fraction
    dpow: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff == 0:
            object.__setattr__(self, "dpow", 0)
        if self.dpow not in (-1, 0, 1):
            raise ExponentError(f"exponent Delta^{self.dpow} is outside q, q*Delta, q/Delta")

    @property
    def is_zero(self):
        return self.coeff == 0

    @property
    def is_integer(self):
        return self.dpow == 0 and self.coeff.denominator == 1

    @property
    def is_even(self):
        return self.is_integer and self.coeff.numerator % 2 == 0

    @property
    def is_odd(self):
        return self.is_integer and self.coeff.numerator % 2 == 1

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.dpow != other.dpow:
            raise ExponentError(f"cannot add exponents {self.text()} and {other.text()}")
        return Exponent(self.coeff + other.coeff, self.dpow)

    def __neg__(self):
        return Exponent(-self.coeff, self.dpow)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return ZERO_EXP
        return Exponent(self.coeff * other.coeff, self.dpow + other.dpow)

    def __truediv__(self, other):
        if other.is_zero:
            raise ExponentError("division by a zero exponent")
        return Exponent(self.coeff / other.coeff, self.dpow - other.dpow)

    def sign(self):
        return (self.coeff > 0) - (self.coeff < 0)

    def key(self):
        return (self.dpow, self.coeff)

    def value(self, delta=None):
        if self.dpow and delta is None:
            raise AlgebraError("exponent depends on Delta but Delta is unbound")
        return float(self.coeff) * (delta ** self.dpow if self.dpow else 1.0)

    def text(self):
        c = self.coeff
        if self.dpow == 0:
            return str(c)
        sign = "-" if c < 0 else ""
        p, q = abs(c.numerator), c.denominator
        if self.dpow == 1:
            num = "Delta" if p == 1 else f"{p}*Delta"
            return sign + (num if q == 1 else f"{num}/{q}")
        den = "Delta" if q == 1 else f"({q}*Delta)"
        return f"{sign}{p}/{den}"


ZERO_EXP = Exponent(0)
ONE_EXP = Exponent(1)


def _less(e1, e2):
    """e1 < e2 for comparable exponents (Delta > 0); None when incomparable."""
    if e1.dpow == e2.dpow:
        return e1.coeff < e2.coeff
    if e1.is_zero:
        return e2.coeff > 0
    if e2.is_zero:
        return e1.coeff < 0
    return None


# -- bases ----------------------------------------------------------------

@dataclass(frozen=True)
class Sym:
    name: str

    def key(self):
        return (1, self.name)


@dataclass(frozen=True)
class Prime:
    value: int

    def key(self):
        return (0, self.value)


@dataclass(frozen=True)
class Off:
    """point - multiple * pi * L"""

    point: str
    multiple: int

    def key(self):
        return (2, self.point, self.multiple)


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"

    def key(self):
        return (3, self.name, self.arg.key())


@dataclass(frozen=True)
class SumBase:
    expr: "Expr"

    def key(self):
        return (4, self.expr.key())


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    factors: tuple = ()

    def factor_key(self):
        return tuple((b.key(), e.key()) for b, e in self.factors)


@dataclass(frozen=True)
class Expr:
    terms: tuple = ()

    def key(self):
        return tuple((t.factor_key(), t.coeff) for t in self.terms)

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_monomial(self):
        return len(self.terms) == 1

    def __str__(self):
        return expr_text(self)


ZERO = Expr(())
ONE = Expr((Term(Fraction(1)),))


def const(q):
    q = Fraction(q)
    return ZERO if q == 0 else Expr((Term(q),))


def atom(base, exp=ONE_EXP):
    return from_term(Fraction(1), [(base, exp)])


# -- positivity ---------------------------------------------------------

def is_positive(base, table=DEFAULT_TABLE):
    if isinstance(base, (Prime, Off)):
        return True
    if isinstance(base, Sym):
        return table.is_positive(base.name)
    if isinstance(base, Func):
        if base.name == "abs":
            return True
        inner = single_base(base.arg)
        return isinstance(inner, Sym) and table.func_positive(inner.name, base.name)
    if isinstance(base, SumBase):
        return all(t.coeff > 0 and all(is_positive(b, table) for b, _ in t.factors)
                   for t in base.expr.terms)
    return False


def single_base(expr):
    """The base of ``expr`` when it is exactly base^1, else None."""
    if len(expr.terms) == 1:
        t = expr.terms[0]
        if t.coeff == 1 and len(t.factors) == 1 and t.factors[0][1] == ONE_EXP:
            return t.factors[0][0]
    return None


# -- term normalization ---------------------------------------------------

def _negate(expr):
    return Expr(tuple(Term(-t.coeff, t.factors) for t in expr.terms))


def _normalize(coeff, factors):
    coeff = Fraction(coeff)
    items = list(factors)
    while True:
        changed = False
        merged = {}
        for b, e in items:
            merged[b] = merged[b] + e if b in merged else e
        out = []
        for b, e in merged.items():
            if e.is_zero:
                changed = True
                continue
            if isinstance(b, SumBase) and e.is_integer and b.expr.terms[0].coeff < 0:
                # integer powers use the +1 orientation
                coeff *= (-1) ** abs(e.coeff.numerator)
                out.append((SumBase(_negate(b.expr)), e))
                changed = True
                continue
            if isinstance(b, Func) and b.name == "abs" and e.is_even:
                inner = single_base(b.arg)
                nb = inner if inner is not None else SumBase(b.arg)
                out.append((nb, e))
                changed = True
                continue
            if isinstance(b, Prime) and e.dpow == 0:
                whole = e.coeff.numerator // e.coeff.denominator
                if whole:
                    coeff *= Fraction(b.value) ** whole
                    rest = e.coeff - whole
                    if rest:
                        out.append((b, Exponent(rest)))
                    changed = True
                    continue
            out.append((b, e))
        # S^k (k integer) next to (-S)^x: rewrite S^k = (-1)^k (-S)^k
        bases = {b for b, _ in out}
        fixed = []
        for b, e in out:
            if isinstance(b, SumBase) and e.is_integer:
                nb = SumBase(_negate(b.expr))
                if nb in bases:
                    coeff *= (-1) ** abs(e.coeff.numerator)
                    fixed.append((nb, e))
                    changed = True
                    continue
            fixed.append((b, e))
        items = fixed
        if not changed:
            break
    items.sort(key=lambda be: be[0].key())
    return coeff, tuple(items)


def from_term(coeff, factors):
    coeff, factors = _normalize(coeff, factors)
    if coeff == 0:
        return ZERO
    if coeff == 1 and len(factors) == 1:
        b, e = factors[0]
        if isinstance(b, SumBase) and e == ONE_EXP:
            return b.expr
    return Expr((Term(coeff, factors),))


def _as_term(expr):
    if len(expr.terms) == 1:
        return expr.terms[0]
    return Term(Fraction(1), ((SumBase(expr), ONE_EXP),))


# -- arithmetic -----------------------------------------------------------

def mul(*exprs):
    coeff = Fraction(1)
    factors = []
    for e in exprs:
        if e.is_zero:
            return ZERO
        t = _as_term(e)
        coeff *= t.coeff
        factors.extend(t.factors)
    return from_term(coeff, factors)


def expand_term(term):
    """Distribute every sum factor with exponent exactly 1."""
    for i, (b, e) in enumerate(term.factors):
        if isinstance(b, SumBase) and e == ONE_EXP:
            rest = term.factors[:i] + term.factors[i + 1:]
            out = []
            for s in b.expr.terms:
                c, f = _normalize(term.coeff * s.coeff, rest + s.factors)
                if c:
                    out.extend(expand_term(Term(c, f)))
            return out
    return [term]


def expanded_terms(expr):
    out = []
    for t in expr.terms:
        out.extend(expand_term(t))
    return out


def _content(terms):
    bases = {}
    for t in terms:
        for b, _ in t.factors:
            bases.setdefault(b, None)
    content = []
    for b in bases:
        exps = []
        for t in terms:
            exps.append(next((e for fb, e in t.factors if fb == b), ZERO_EXP))
        low = exps[0]
        ok = True
        for e in exps[1:]:
            less = _less(e, low)
            if less is None:
                ok = False
                break
            if less:
                low = e
        if isinstance(b, SumBase) and any(e != low for e in exps):
            # partial sum powers would stay behind and make grouping matter
            ok = False
        if ok and not low.is_zero:
            content.append((b, low))
    return content


def _detect_offset(terms, table):
    """(Off, scale) when the terms read scale * (point - m*pi*L)."""
    if len(terms) != 2:
        return None
    t0, t1 = terms
    for p, q in ((t0, t1), (t1, t0)):
        if len(p.factors) != 1 or p.factors[0][1] != ONE_EXP:
            continue
        b = p.factors[0][0]
        if not isinstance(b, Sym):
            continue
        mult = table.base_of(b.name)
        if mult is None or q.coeff != -mult * p.coeff:
            continue
        if q.factors == ((Sym("L"), ONE_EXP), (Sym("pi"), ONE_EXP)):
            return Off(b.name, mult), p.coeff
    return None


def add(*exprs, table=DEFAULT_TABLE):
    terms = []
    for e in exprs:
        terms.extend(expanded_terms(e))
    combined = {}
    for t in terms:
        combined[t.factors] = combined.get(t.factors, Fraction(0)) + t.coeff
    terms = [Term(c, f) for f, c in combined.items() if c != 0]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return from_term(terms[0].coeff, terms[0].factors)
    content = _content(terms)
    prim = []
    for t in terms:
        c, f = _normalize(t.coeff, list(t.factors) + [(b, -e) for b, e in content])
        # dividing by a negative-power sum can leave sum^1 factors behind
        prim.extend(expand_term(Term(c, f)))
    merged = {}
    for t in prim:
        merged[t.factors] = merged.get(t.factors, Fraction(0)) + t.coeff
    prim = [Term(c, f) for f, c in merged.items() if c != 0]
    if not prim:
        return ZERO
    if len(prim) == 1:
        return from_term(prim[0].coeff, content + list(prim[0].factors))
    prim.sort(key=Term.factor_key)
    off = _detect_offset(prim, table)
    if off is not None:
        return from_term(off[1], content + [(off[0], ONE_EXP)])
    lead = prim[0].coeff
    prim = Expr(tuple(Term(t.coeff / lead, t.factors) for t in prim))
    if lead == 1 and not content:
        return prim
    return from_term(lead, content + [(SumBase(prim), ONE_EXP)])


def neg(a):
    return mul(const(-1), a)


def sub(a, b, table=DEFAULT_TABLE):
    return add(a, neg(b), table=table)


def _prime_factors(n):
    out = {}
    p = 2
    while p * p <= n and p < 10 ** 6:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def power(a, e, table=DEFAULT_TABLE):
    """a ** e with the real-analysis conventions described in the module doc."""
    if not isinstance(e, Exponent):
        e = Exponent(Fraction(e))
    if e.is_zero:
        return ONE
    if a.is_zero:
        if e.coeff > 0:
            return ZERO
        raise AlgebraError("zero raised to a non-positive power")
    if e == ONE_EXP:
        return a
    if len(a.terms) > 1:
        return from_term(Fraction(1), [(SumBase(a), e)])
    term = a.terms[0]
    c = term.coeff
    factors = list(term.factors)
    if c < 0 and not e.is_integer:
        for i, (b, f) in enumerate(factors):
            if isinstance(b, SumBase) and f.is_odd:
                factors[i] = (SumBase(_negate(b.expr)), f)
                c = -c
                break
        else:
            raise AlgebraError(f"negative coefficient under the power {e.text()}")
    out = []
    if e.is_integer:
        coeff = c ** e.coeff.numerator
    else:
        coeff = Fraction(1)
        for p, k in _prime_factors(c.numerator).items():
            out.append((Prime(p), Exponent(k) * e))
        for p, k in _prime_factors(c.denominator).items():
            out.append((Prime(p), Exponent(-k) * e))
    for b, f in factors:
        g = f * e
        if not e.is_integer and f.is_even and not is_positive(b, table):
            b = Func("abs", atom(b))
        out.append((b, g))
    return from_term(coeff, out)


def div(a, b, table=DEFAULT_TABLE):
    return mul(a, power(b, Exponent(-1), table))


def abs_expr(a, table=DEFAULT_TABLE):
    if a.is_zero:
        return ZERO
    if len(a.terms) > 1:
        if is_positive(SumBase(a), table):
            return a
        return atom(Func("abs", a))
    t = a.terms[0]
    out = []
    for b, e in t.factors:
        if not is_positive(b, table):
            b = Func("abs", atom(b))
        out.append((b, e))
    return from_term(abs(t.coeff), out)


def func(name, arg, table=DEFAULT_TABLE):
    if name == "abs":
        return abs_expr(arg, table)
    return atom(Func(name, arg))


# -- traversal ------------------------------------------------------------

def iter_bases(expr):
    """Every base occurring in ``expr``, nested ones included."""
    for t in expr.terms:
        for b, _ in t.factors:
            yield b
            if isinstance(b, Func):
                yield from iter_bases(b.arg)
            elif isinstance(b, SumBase):
                yield from iter_bases(b.expr)


def depends_on(expr, name):
    for b in iter_bases(expr):
        if isinstance(b, Sym) and b.name == name:
            return True
    return False


def count_base(expr, base):
    return sum(1 for b in iter_bases(expr) if b == base)


# -- printing -------------------------------------------------------------

def _num_text(q):
    return str(q) if q.denominator == 1 else f"({q})"


def base_text(b):
    if isinstance(b, Sym):
        return b.name
    if isinstance(b, Prime):
        return str(b.value)
    if isinstance(b, Off):
        m = "pi*L" if b.multiple == 1 else f"{b.multiple}*pi*L"
        return f"({b.point} - {m})"
    if isinstance(b, Func):
        return f"{b.name}({expr_text(b.arg)})"
    return f"({expr_text(b.expr)})"


def exp_text(e):
    if e == ONE_EXP:
        return ""
    if e.is_integer and e.coeff > 0:
        return f"^{e.coeff}"
    if e.dpow == 1 and e.coeff == 1:
        return "^Delta"
    return f"^({e.text()})"


def term_text(t):
    parts = []
    if t.coeff != 1 or not t.factors:
        parts.append(_num_text(t.coeff))
    parts.extend(base_text(b) + exp_text(e) for b, e in t.factors)
    return "*".join(parts)


def expr_text(expr):
    if expr.is_zero:
        return "0"
    out = ""
    for i, t in enumerate(expr.terms):
        body = term_text(Term(abs(t.coeff), t.factors))
        if i == 0:
            out = ("-" if t.coeff < 0 else "") + body
        else:
            out += (" - " if t.coeff < 0 else " + ") + body
    return out
