"""Symbol table for relation texts: products, points and parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

FUNCTIONS = ("sin", "cos", "tan", "abs")


@dataclass(frozen=True)
class SymbolInfo:
    name: str
    kind: str                       # "product", "point" or "parameter"
    lemma: str = None               # catalog id for products and points
    base_multiple: int = None       # points: base T = base_multiple * pi * L
    positive: bool = True
    positive_funcs: frozenset = frozenset()


@dataclass
class SymbolTable:
    symbols: dict = field(default_factory=dict)

    def add(self, info: SymbolInfo):
        self.symbols[info.name] = info
        return self

    def __contains__(self, name):
        return name in self.symbols

    def __getitem__(self, name):
        return self.symbols[name]

    def is_positive(self, name):
        info = self.symbols.get(name)
        return bool(info and info.positive)

    def func_positive(self, name, func):
        info = self.symbols.get(name)
        return bool(info and func in info.positive_funcs)

    def products(self):
        return [s for s in self.symbols.values() if s.kind == "product"]

    def points(self):
        return [s for s in self.symbols.values() if s.kind == "point"]

    def base_of(self, point):
        info = self.symbols.get(point)
        if info is None or info.kind != "point":
            return None
        return info.base_multiple


_TRIG = frozenset({"sin", "cos", "tan"})


def default_table():
    """Symbols of the two crossbreeding derivations.

    At base pi L the signs of sin and cos of a point are (-1)^L, so only tan
    is recorded positive there; at base 2 pi L all three are positive.
    """
    t = SymbolTable()
    t.add(SymbolInfo("U", "parameter", positive_funcs=_TRIG))
    t.add(SymbolInfo("Delta", "parameter"))
    t.add(SymbolInfo("L", "parameter"))
    t.add(SymbolInfo("pi", "parameter"))
    products = [("P1", "1"), ("P2", "2"), ("Pb", "3"), ("P3", "4"), ("P4", "5"),
                ("P5", "6"), ("P6", "7"), ("P7", "8"), ("Pbs", "3s")]
    for name, lemma in products:
        t.add(SymbolInfo(name, "product", lemma=lemma))
    points = [("a01", "1", 1), ("a02", "2", 1), ("ab0", "3", 1),
              ("a03", "4", 2), ("a04", "5", 2), ("a05", "6", 2), ("a06", "7", 2),
              ("a07", "8", 2), ("ab0s", "3s", 2)]
    for name, lemma, mult in points:
        funcs = frozenset({"tan"}) if mult == 1 else _TRIG
        t.add(SymbolInfo(name, "point", lemma=lemma, base_multiple=mult, positive_funcs=funcs))
    return t


DEFAULT_TABLE = default_table()
