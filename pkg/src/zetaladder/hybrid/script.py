"""Derivation scripts: ordered elimination steps with a transcript."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from ..errors import ZetaLadderError
from . import relation as R
from .symbols import DEFAULT_TABLE


class ScriptError(ZetaLadderError):
    def __init__(self, index, message):
        super().__init__(f"step {index}: {message}")
        self.index = index


def load_relations(text=None, path=None, table=DEFAULT_TABLE):
    """Relations from DSL text: one per line, optional ``label:`` prefix, # comments."""
    if path is not None:
        with open(path) as fh:
            text = fh.read()
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label, sep, body = line.partition(":")
        if not sep:
            label, body = f"line{n}", line
        label = label.strip()
        out[label] = R.parse_relation(body.strip(), table, tag=label)
    return out


def reference_relations(table=DEFAULT_TABLE):
    text = resources.files(__package__).joinpath("data/relations.rel").read_text()
    return load_relations(text, table=table)


@dataclass
class DerivationScript:
    """Steps are dicts with an ``op`` key:

    solve       rel, atom, [exponent]
    substitute  rule, into, [exact]
    combine     terms: [(rel, multiplier), ...]
    scale       rel, by
    power       rel, exponent
    check       rel, against, [erratum]   (transcript only)

    Every step except ``check`` stores its result under ``as``.
    """

    steps: list = field(default_factory=list)
    start: str = None
    result: str = None
    eliminated: tuple = ()
    name: str = "script"


@dataclass
class ScriptRun:
    relation: R.AsymRelation
    relations: dict
    transcript: list
    matches: dict


def _describe(step):
    op = step["op"]
    args = ", ".join(f"{k}={v}" for k, v in step.items() if k not in ("op", "as"))
    return f"{op}({args})"


def run_script(script, relations, table=DEFAULT_TABLE, full=False):
    """Execute ``script`` on a dict of named relations (or one relation)."""
    if isinstance(relations, R.AsymRelation):
        relations = {script.start or "input": relations}
    env = dict(relations)
    transcript = [f"# {script.name}"]
    matches = {}
    last = script.start
    for i, step in enumerate(script.steps, 1):
        try:
            op = step["op"]
            if op == "check":
                got, want = env[step["rel"]], env[step["against"]]
                ok = got.same_form(want)
                matches[step["against"]] = ok
                line = f"{'MATCH' if ok else 'MISMATCH'} ({step['against']})"
                if not ok and step.get("erratum"):
                    line += f"  erratum: {step['erratum']}"
                transcript.append(line)
                continue
            if op == "solve":
                out = R.solve_for(env[step["rel"]], step["atom"], step.get("exponent"), table)
            elif op == "substitute":
                out = R.substitute(env[step["rule"]], env[step["into"]],
                                   exact=step.get("exact", False), table=table)
            elif op == "combine":
                out = R.combine([(env[r], m) for r, m in step["terms"]], table,
                                tag=step["as"])
            elif op == "scale":
                out = R.scale(env[step["rel"]], step["by"], table)
            elif op == "power":
                out = R.power(env[step["rel"]], step["exponent"], table)
            else:
                raise ValueError(f"unknown op {op!r}")
        except KeyError as exc:
            raise ScriptError(i, f"unknown relation {exc.args[0]!r}") from exc
        except ZetaLadderError as exc:
            if isinstance(exc, ScriptError):
                raise
            raise ScriptError(i, str(exc)) from exc
        except ValueError as exc:
            raise ScriptError(i, str(exc)) from exc
        out = R.AsymRelation(out.lhs, out.rhs, step["as"], out.provenance)
        env[step["as"]] = out
        last = step["as"]
        transcript.append(f"[{i}] {_describe(step)} -> {step['as']}: {out.text()}")
    final_name = script.result or last
    if final_name is None:
        if len(env) != 1:
            raise ScriptError(0, "empty script needs a start relation")
        final_name = next(iter(env))
    final = env[final_name]
    for name in script.eliminated:
        if final.depends_on(name):
            raise ScriptError(len(script.steps), f"{name} is not eliminated from {final.text()}")
    if full:
        return ScriptRun(final, env, transcript, matches)
    return final


THEOREM1 = DerivationScript(
    name="Theorem 1: eliminate tan U and U^Delta",
    steps=[
        {"op": "solve", "rel": "2.3", "atom": "tan(U)", "as": "tanU"},
        {"op": "substitute", "rule": "tanU", "into": "2.7", "as": "s1"},
        {"op": "solve", "rel": "s1", "atom": "P1", "as": "3.1d"},
        {"op": "check", "rel": "3.1d", "against": "3.1",
         "erratum": "recorded lhs has P1 to the first power; the derivation gives P1^3"},
        {"op": "check", "rel": "3.1d", "against": "3.1c"},
        {"op": "solve", "rel": "2.11", "atom": "U", "as": "3.2d"},
        {"op": "check", "rel": "3.2d", "against": "3.2"},
        {"op": "substitute", "rule": "3.2d", "into": "3.1d", "as": "s2"},
        {"op": "solve", "rel": "s2", "atom": "Pb", "exponent": "1", "as": "3.3d"},
        {"op": "check", "rel": "3.3d", "against": "3.3"},
    ],
    result="3.3d",
    eliminated=("U",),
)

THEOREM2 = DerivationScript(
    name="Theorem 2: eliminate sin U, cos U and U",
    steps=[
        {"op": "combine", "terms": [("4.7", "cos(a04)^2"), ("4.3", "-sin(a03)^2")], "as": "c1"},
        {"op": "scale", "rel": "c1", "by": "1/cos(U)", "as": "5.1d"},
        {"op": "check", "rel": "5.1d", "against": "5.1"},
        {"op": "solve", "rel": "5.1d", "atom": "sin(U)", "as": "sinU"},
        {"op": "power", "rel": "sinU", "exponent": "3", "as": "sinU3"},
        {"op": "substitute", "rule": "sinU3", "into": "4.15", "exact": True, "as": "s1"},
        {"op": "solve", "rel": "4.19", "atom": "sin(U)", "as": "sinU7"},
        {"op": "substitute", "rule": "sinU7", "into": "s1", "as": "5.2d"},
        {"op": "check", "rel": "5.2d", "against": "5.2"},
        {"op": "substitute", "rule": "sinU", "into": "4.11", "as": "s2"},
        {"op": "solve", "rel": "s2", "atom": "cos(U)", "as": "5.3d"},
        {"op": "check", "rel": "5.3d", "against": "5.3"},
        {"op": "power", "rel": "5.3d", "exponent": "3/2", "as": "5.4d"},
        {"op": "check", "rel": "5.4d", "against": "5.4"},
        {"op": "substitute", "rule": "5.4d", "into": "5.2d", "exact": True, "as": "5.5d"},
        {"op": "check", "rel": "5.5d", "against": "5.5"},
        {"op": "solve", "rel": "2.11s", "atom": "U", "exponent": "2", "as": "5.6d"},
        {"op": "check", "rel": "5.6d", "against": "5.6"},
        {"op": "substitute", "rule": "5.6d", "into": "5.5d", "as": "5.8d"},
        {"op": "check", "rel": "5.8d", "against": "5.8"},
    ],
    result="5.8d",
    eliminated=("U",),
)

THEOREMS = {"1": THEOREM1, "2": THEOREM2}
TARGETS = {"1": "3.3", "2": "5.8"}


def run_theorem(which, table=DEFAULT_TABLE):
    return run_script(THEOREMS[str(which)], reference_relations(table), table, full=True)
