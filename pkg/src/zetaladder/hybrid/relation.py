"""Asymptotic relations ``lhs ~ rhs`` and the elimination operations on them.

"~" is handled as exact equality; every operation maps normal forms to
normal forms, so two relations agree iff both sides are identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ZetaLadderError
from . import expr as E
from .parser import parse_expr, parse_sides
from .symbols import DEFAULT_TABLE


class NotSolvableError(ZetaLadderError, ValueError):
    pass


def _cancel(lhs, rhs):
    """Drop factors shared verbatim by two monomial sides."""
    if len(lhs.terms) != 1 or len(rhs.terms) != 1:
        return lhs, rhs
    a, b = lhs.terms[0], rhs.terms[0]
    common = set(a.factors) & set(b.factors)
    ca, cb = a.coeff, b.coeff
    if ca == cb:
        ca = cb = Fraction(1)
    if not common and ca == a.coeff:
        return lhs, rhs
    fa = [f for f in a.factors if f not in common]
    fb = [f for f in b.factors if f not in common]
    return E.from_term(ca, fa), E.from_term(cb, fb)


@dataclass(frozen=True)
class AsymRelation:
    lhs: E.Expr
    rhs: E.Expr
    tag: str = ""
    provenance: tuple = field(default=(), compare=False)

    def __post_init__(self):
        lhs, rhs = _cancel(self.lhs, self.rhs)
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)

    def text(self):
        return f"{E.expr_text(self.lhs)} ~ {E.expr_text(self.rhs)}"

    __str__ = text

    def same_form(self, other):
        return self.lhs == other.lhs and self.rhs == other.rhs

    @property
    def is_trivial(self):
        return self.lhs == self.rhs

    def derived(self, lhs, rhs, tag, note):
        return AsymRelation(lhs, rhs, tag, self.provenance + (note,))

    def depends_on(self, name):
        return E.depends_on(self.lhs, name) or E.depends_on(self.rhs, name)


def parse_relation(text, table=DEFAULT_TABLE, tag=""):
    lhs, rhs = parse_sides(text, table)
    return AsymRelation(lhs, rhs, tag, (tag or text,))


def canonicalize(expr, table=DEFAULT_TABLE):
    """Normal form of an expression given as text or as an ``Expr``."""
    if isinstance(expr, str):
        return parse_expr(expr, table)
    return expr


def _atom_spec(atom, table):
    """(base, requested exponent or None) from text like 'tan(U)' or 'U^Delta'."""
    if isinstance(atom, str):
        atom = parse_expr(atom, table)
    if isinstance(atom, E.Expr):
        if len(atom.terms) == 1:
            t = atom.terms[0]
            if t.coeff == 1 and len(t.factors) == 1:
                b, e = t.factors[0]
                return b, (None if e == E.ONE_EXP else e)
        raise NotSolvableError(f"{E.expr_text(atom)} is not a single atom")
    return atom, None


def solve_for(rel, atom, exponent=None, table=DEFAULT_TABLE):
    """Isolate a power of ``atom`` on the lhs.

    The atom has to occur exactly once, as a direct factor of a monomial side.
    With ``exponent`` the result is raised so that the lhs is atom^exponent.
    """
    base, requested = _atom_spec(atom, table)
    if exponent is None:
        exponent = requested
    elif not isinstance(exponent, E.Exponent):
        exponent = parse_exponent(exponent, table)
    name = E.base_text(base)
    count = E.count_base(rel.lhs, base) + E.count_base(rel.rhs, base)
    if count != 1:
        raise NotSolvableError(f"{name} occurs {count} times in {rel.text()}")
    side, other = (rel.lhs, rel.rhs) if E.count_base(rel.lhs, base) else (rel.rhs, rel.lhs)
    if len(side.terms) != 1 or not any(b == base for b, _ in side.terms[0].factors):
        raise NotSolvableError(f"{name} occurs additively in {rel.text()}")
    term = side.terms[0]
    e = next(f for b, f in term.factors if b == base)
    rest = E.from_term(term.coeff, [(b, f) for b, f in term.factors if b != base])
    lhs = E.atom(base, e)
    rhs = E.div(other, rest, table)
    if exponent is not None and exponent != e:
        ratio = exponent / e
        lhs = E.power(lhs, ratio, table)
        rhs = E.power(rhs, ratio, table)
    return rel.derived(lhs, rhs, f"solve({rel.tag}, {name})", f"solve for {name}")


def parse_exponent(text, table=DEFAULT_TABLE):
    if isinstance(text, E.Exponent):
        return text
    if isinstance(text, (int, Fraction)):
        return E.Exponent(Fraction(text))
    from .parser import _Parser, to_exponent
    p = _Parser(str(text))
    node = p.expr()
    p.end()
    return to_exponent(node)


def _rule(rule):
    if len(rule.lhs.terms) != 1:
        raise NotSolvableError(f"rule lhs is not a power of one atom: {rule.text()}")
    t = rule.lhs.terms[0]
    if t.coeff != 1 or len(t.factors) != 1:
        raise NotSolvableError(f"rule lhs is not a power of one atom: {rule.text()}")
    return t.factors[0]


def _subst_expr(expr, base, e, value, exact, table):
    parts = []
    for term in E.expanded_terms(expr):
        factors = []
        pieces = []
        for b, c in term.factors:
            if b == base and (not exact or c == e):
                pieces.append(E.power(value, c / e, table))
            elif not exact and isinstance(b, E.Func):
                arg = _subst_expr(b.arg, base, e, value, exact, table)
                pieces.append(E.power(E.func(b.name, arg, table), c, table))
            elif not exact and isinstance(b, E.SumBase):
                inner = _subst_expr(b.expr, base, e, value, exact, table)
                pieces.append(E.power(inner, c, table))
            else:
                factors.append((b, c))
        parts.append(E.mul(E.from_term(term.coeff, factors), *pieces))
    return E.add(*parts, table=table)


def substitute(rule, target, exact=False, table=DEFAULT_TABLE):
    """Replace X^c by Y^(c/e) in ``target`` using the rule X^e ~ Y.

    With ``exact`` only factors X^e themselves are replaced, and only in the
    top-level terms.
    """
    base, e = _rule(rule)
    lhs = _subst_expr(target.lhs, base, e, rule.rhs, exact, table)
    rhs = _subst_expr(target.rhs, base, e, rule.rhs, exact, table)
    name = E.base_text(base) + E.exp_text(e)
    return target.derived(lhs, rhs, f"subst({rule.tag} -> {target.tag})",
                          f"substitute {name} from {rule.tag}")


def combine(parts, table=DEFAULT_TABLE, tag="combine"):
    """sum of m_i * R_i over (relation, multiplier) pairs."""
    lhs = []
    rhs = []
    notes = []
    for rel, m in parts:
        m = canonicalize(m, table) if isinstance(m, str) else E.const(m) if not isinstance(m, E.Expr) else m
        lhs.append(E.mul(m, rel.lhs))
        rhs.append(E.mul(m, rel.rhs))
        notes.append(f"({E.expr_text(m)})*[{rel.tag}]")
    return AsymRelation(E.add(*lhs, table=table), E.add(*rhs, table=table), tag,
                        ("combine " + " + ".join(notes),))


def scale(rel, m, table=DEFAULT_TABLE):
    m = canonicalize(m, table)
    return rel.derived(E.mul(m, rel.lhs), E.mul(m, rel.rhs), f"scale({rel.tag})",
                       f"multiply by {E.expr_text(m)}")


def power(rel, exponent, table=DEFAULT_TABLE):
    e = parse_exponent(exponent, table)
    return rel.derived(E.power(rel.lhs, e, table), E.power(rel.rhs, e, table),
                       f"pow({rel.tag})", f"raise to {e.text()}")


def swap(rel):
    return rel.derived(rel.rhs, rel.lhs, rel.tag, "swap sides")
