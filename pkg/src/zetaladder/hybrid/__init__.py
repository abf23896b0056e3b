"""Symbolic crossbreeding of asymptotic product relations."""

from .expr import AlgebraError, Expr, Exponent, ExponentError
from .numeric import (Binding, EvaluationError, NumericResult, binding_from_reports,
                      eval_expr, numeric_eval)
from .parser import ParseError, RelationSyntaxError, UnknownSymbolError, parse_expr
from .relation import (AsymRelation, NotSolvableError, canonicalize, combine, parse_relation,
                       power, scale, solve_for, substitute)
from .script import (TARGETS, THEOREM1, THEOREM2, THEOREMS, DerivationScript, ScriptError,
                     ScriptRun, load_relations, reference_relations, run_script, run_theorem)
from .symbols import DEFAULT_TABLE, SymbolInfo, SymbolTable, default_table

__all__ = [
    "AlgebraError", "AsymRelation", "Binding", "DEFAULT_TABLE", "DerivationScript",
    "EvaluationError", "Expr", "Exponent", "ExponentError", "NotSolvableError",
    "NumericResult", "ParseError", "RelationSyntaxError", "ScriptError", "ScriptRun",
    "SymbolInfo", "SymbolTable", "TARGETS", "THEOREM1", "THEOREM2", "THEOREMS",
    "UnknownSymbolError", "binding_from_reports", "canonicalize", "combine",
    "default_table", "eval_expr", "load_relations", "numeric_eval", "reference_relations",
    "parse_expr", "parse_relation", "power", "run_script", "run_theorem", "scale",
    "solve_for", "substitute",
]
