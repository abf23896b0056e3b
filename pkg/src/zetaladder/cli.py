"""Command-line runner: lemma and hybrid suites over grids, ladder and zeta tables, cache upkeep.

    zetaladder lemma --L 1000,10000 --U 0.5,1 --k 1 --lemma 1,2 --out runs/
    zetaladder hybrid --theorem 1 --L 10000 --delta 1,2
    zetaladder cache warm --to 1e5 --cache moment.txt

Settings come from defaults, then a key=value ``--config`` file, then flags.
Exit status: 0 ok, 1 configuration error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (AccuracyError, ConfigError, DomainError, ExtractionError, InversionError,
                     ZetaLadderError)
from .factorization import CATALOG, EPSILON_DEFAULT, LEMMAS, LemmaEvaluator, get_function
from .hybrid import TARGETS, binding_from_reports, numeric_eval, run_theorem
from .ladder import K0_DEFAULT, Ladder, LadderConstants
from .moment import MomentCache, MomentFunction
from .quadrature import QuadratureSpec
from .rs import hardy_z, riemann_siegel_theta

log = logging.getLogger("zetaladder")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (AccuracyError, InversionError, ExtractionError)
THEOREM_LEMMAS = {"1": ("1", "2", "3"), "2": ("4", "5", "6", "7", "8", "3s")}
DELTA_LEMMAS = ("3", "3s")


@dataclass
class RunConfig:
    L: list = field(default_factory=lambda: [1000])
    U: list = field(default_factory=lambda: [1.0])
    k: int = 1
    delta: list = field(default_factory=lambda: [1.0])
    lemma: list = field(default_factory=lambda: list(LEMMAS))
    theorem: list = field(default_factory=lambda: ["1", "2"])
    T: list = field(default_factory=list)
    to: float = 1e4
    tol: float = 1e-9
    abs_tol: float = 1e-12
    epsilon: float = EPSILON_DEFAULT
    k0: int = K0_DEFAULT
    cache: str = None
    out: str = None
    workers: int = 1
    from_csv: str = None

    def spec(self):
        return QuadratureSpec(rel_tol=self.tol, abs_tol=self.abs_tol)

    def validate(self, command):
        if command in ("lemma", "hybrid"):
            for name in ("L", "U"):
                if not getattr(self, name):
                    raise ConfigError(f"{name} grid is empty")
            if not 1 <= self.k <= self.k0:
                raise ConfigError(f"k={self.k} outside [1, {self.k0}]")
            if any(L <= 0 for L in self.L):
                raise ConfigError("L values must be positive integers")
        if command == "lemma":
            bad = [x for x in self.lemma if x not in CATALOG]
            if bad:
                raise ConfigError(f"unknown lemma ids {bad}")
        if command == "hybrid":
            bad = [x for x in self.theorem if x not in THEOREM_LEMMAS]
            if bad:
                raise ConfigError(f"unknown theorem ids {bad}")
            if not self.delta:
                raise ConfigError("delta list is empty")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def _split(value):
    return [v.strip() for v in str(value).split(",") if v.strip()]


_PARSERS = {
    "L": lambda v: [int(float(x)) for x in _split(v)],
    "U": lambda v: [float(x) for x in _split(v)],
    "delta": lambda v: [float(x) for x in _split(v)],
    "T": lambda v: [float(x) for x in _split(v)],
    "lemma": _split,
    "theorem": _split,
    "k": int, "k0": int, "workers": int,
    "to": float, "tol": float, "abs_tol": float, "epsilon": float,
    "cache": str, "out": str, "from_csv": str,
}


def read_config_file(path):
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _PARSERS:
            raise ConfigError(f"{path}:{n}: expected key=value with a known key, got {raw.strip()!r}")
        values[key] = value.strip()
    return values


def build_config(args):
    """Defaults < config file < command-line flags."""
    raw = {}
    if args.config:
        raw.update(read_config_file(args.config))
    for key in _PARSERS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    cfg = RunConfig()
    try:
        for key, value in raw.items():
            setattr(cfg, key, _PARSERS[key](value))
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return cfg


# -- workers --------------------------------------------------------------

_evaluator = None


def _make_evaluator(cfg, writable=True):
    spec = cfg.spec()
    if cfg.cache and writable:
        moment = MomentFunction(spec, path=cfg.cache)
    elif cfg.cache:
        moment = MomentFunction(spec, cache=MomentCache.load(cfg.cache, spec))
    else:
        moment = MomentFunction(spec)
    return LemmaEvaluator(Ladder(moment, LadderConstants(), cfg.k0), cfg.epsilon)


def _init_worker(cfg):
    global _evaluator
    _evaluator = _make_evaluator(cfg, writable=False)


def _run_row(row):
    lemma, L, U, k, Delta = row
    try:
        return _evaluator.evaluate(lemma, L, U, k, Delta), None
    except ZetaLadderError as exc:
        return None, exc


def _map_rows(cfg, rows, evaluator):
    """Evaluate rows in grid order, in process or in a pool."""
    global _evaluator
    if cfg.workers == 1 or len(rows) < 2:
        _evaluator = evaluator
        return [_run_row(r) for r in rows]
    with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as pool:
        return list(pool.map(_run_row, rows))


def _prewarm(cfg, evaluator, rows):
    """Extend the moment cache in this process before any worker starts."""
    if cfg.workers == 1:
        return
    tops = {}
    for lemma, L, U, k, _ in rows:
        a = get_function(lemma).base_point(L)
        if a + U > sum(tops.get(k, (0.0, 0.0))):
            tops[k] = (a, U)
    for k, (a, U) in sorted(tops.items()):
        evaluator.ladder.reverse_iterate_interval(a, U, k)


def _constants(cfg, evaluator):
    c = evaluator.ladder.consts
    return {"gamma": c.gamma, "ln_two_pi": c.ln_two_pi, "c0": c.c0,
            "rel_tol": cfg.tol, "abs_tol": cfg.abs_tol, "epsilon": cfg.epsilon}


# -- output ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def _write_csv(rows, columns, path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _out_path(cfg, name):
    if not cfg.out:
        return None
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _exit_for(errors):
    return EXIT_NUMERIC if any(isinstance(e, NUMERIC_ERRORS) for e in errors) else EXIT_OK


# -- commands -------------------------------------------------------------

LEMMA_COLUMNS = ["lemma", "L", "U", "k", "Delta", "T", "alpha0", "offset0", "lhs", "rhs",
                 "exact_residual", "asymptotic_residual", "lnT", "lnlnT_over_lnT", "error",
                 "gamma", "ln_two_pi", "c0", "rel_tol", "abs_tol", "epsilon"]


def lemma_grid(cfg, lemmas=None):
    rows = []
    for lemma in lemmas or cfg.lemma:
        deltas = cfg.delta if lemma in DELTA_LEMMAS else [None]
        for L, U, D in itertools.product(cfg.L, cfg.U, deltas):
            rows.append((lemma, L, U, cfg.k, D))
    return rows


def _report_row(report):
    row = report.row()
    row.update(T=report.T, offset0=report.points.offset0,
               lnlnT_over_lnT=report.lnlnT_over_lnT, error="")
    return row


def cmd_lemma(cfg):
    evaluator = _make_evaluator(cfg)
    rows = lemma_grid(cfg)
    _prewarm(cfg, evaluator, rows)
    results = _map_rows(cfg, rows, evaluator)
    consts = _constants(cfg, evaluator)
    out, sidecars, errors = [], [], []
    for (lemma, L, U, k, D), (rep, err) in zip(rows, results):
        if rep is None:
            errors.append(err)
            row = {"lemma": lemma, "L": L, "U": U, "k": k, "Delta": D, "error": str(err)}
        else:
            row = _report_row(rep)
            sidecars.append(rep.sidecar())
        row.update(consts)
        out.append(row)
    _write_csv(out, LEMMA_COLUMNS, _out_path(cfg, "lemma.csv"))
    side = _out_path(cfg, "lemma_points.json")
    if side:
        with open(side, "w") as fh:
            json.dump({"constants": consts, "rows": sidecars}, fh, indent=1, sort_keys=True)
    return _exit_for(errors)


class _StoredReport:
    """The fields of a lemma CSV row that a binding needs."""

    def __init__(self, row):
        self.lemma = row["lemma"]
        self.L = int(float(row["L"]))
        self.U = float(row["U"])
        self.k = int(row["k"])
        self.Delta = float(row["Delta"]) if row.get("Delta") else None
        self.lhs = float(row["lhs"])
        self.lnT = float(row["lnT"])

        class _P:
            alpha0 = float(row["alpha0"])
            offset0 = float(row["offset0"])
        self.points = _P


def _load_reports(path):
    with open(path) as fh:
        rows = [r for r in csv.DictReader(fh) if not r.get("error")]
    return {(r["lemma"], int(float(r["L"])), float(r["U"]), int(r["k"]),
             float(r["Delta"]) if r.get("Delta") else None): _StoredReport(r) for r in rows}


HYBRID_COLUMNS = ["theorem", "L", "U", "k", "Delta", "lhs", "rhs", "ratio", "deviation",
                  "lnT", "lnlnT_over_lnT", "error", "gamma", "ln_two_pi", "c0", "rel_tol",
                  "abs_tol", "epsilon"]


def cmd_hybrid(cfg):
    transcript = []
    scripts = {}
    status = EXIT_OK
    for th in cfg.theorem:
        run = run_theorem(th)
        scripts[th] = run.relation
        transcript.extend(run.transcript)
        if not run.matches.get(TARGETS[th], False):
            status = EXIT_NUMERIC
    text = "\n".join(transcript) + "\n"
    path = _out_path(cfg, "hybrid_transcript.txt")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    cells = [(th, L, U, D) for th in cfg.theorem
             for L, U, D in itertools.product(cfg.L, cfg.U, cfg.delta)]
    needed = []
    for th, L, U, D in cells:
        for lemma in THEOREM_LEMMAS[th]:
            needed.append((lemma, L, U, cfg.k, D if lemma in DELTA_LEMMAS else None))
    needed = list(dict.fromkeys(needed))
    if cfg.from_csv:
        stored = _load_reports(cfg.from_csv)
        missing = [key for key in needed if key not in stored]
        if missing:
            raise ConfigError(f"{cfg.from_csv} has no row for {missing[0]} (and {len(missing) - 1} more)")
        reports = {key: (stored[key], None) for key in needed}
        consts = {"gamma": LadderConstants().gamma, "ln_two_pi": LadderConstants().ln_two_pi,
                  "c0": LadderConstants().c0, "rel_tol": cfg.tol, "abs_tol": cfg.abs_tol,
                  "epsilon": cfg.epsilon}
    else:
        evaluator = _make_evaluator(cfg)
        _prewarm(cfg, evaluator, needed)
        reports = dict(zip(needed, _map_rows(cfg, needed, evaluator)))
        consts = _constants(cfg, evaluator)

    out, errors = [], []
    for th, L, U, D in cells:
        row = {"theorem": th, "L": L, "U": U, "k": cfg.k, "Delta": D, "error": ""}
        keys = [(lemma, L, U, cfg.k, D if lemma in DELTA_LEMMAS else None)
                for lemma in THEOREM_LEMMAS[th]]
        failed = [reports[key][1] for key in keys if reports[key][1] is not None]
        if failed:
            errors.extend(failed)
            row["error"] = str(failed[0])
        else:
            try:
                res = numeric_eval(scripts[th], binding_from_reports([reports[key][0] for key in keys]))
                row.update(lhs=res.lhs, rhs=res.rhs, ratio=res.ratio, deviation=res.deviation,
                           lnT=res.lnT, lnlnT_over_lnT=math.log(res.lnT) / res.lnT)
            except ZetaLadderError as exc:
                errors.append(exc)
                row["error"] = str(exc)
        row.update(consts)
        out.append(row)
    _write_csv(out, HYBRID_COLUMNS, _out_path(cfg, "hybrid.csv"))
    return max(status, _exit_for(errors))


def cmd_ladder(cfg):
    evaluator = _make_evaluator(cfg)
    lad = evaluator.ladder
    heights = cfg.T or [math.pi * L for L in cfg.L]
    gamma = lad.consts.gamma
    rows = []
    for T in heights:
        y = lad.phi1(T)
        rows.append({"T": T, "F": lad.moment.F(T), "phi1": y, "gap": T - y,
                     "gap_law": (1 - gamma) * T / math.log(T), "z_tilde_sq": lad.z_tilde_sq(T),
                     "rel_tol": cfg.tol, "abs_tol": cfg.abs_tol})
    _write_csv(rows, ["T", "F", "phi1", "gap", "gap_law", "z_tilde_sq", "rel_tol", "abs_tol"],
               _out_path(cfg, "ladder.csv"))
    return EXIT_OK


def cmd_zeta(cfg):
    heights = np.array(cfg.T or [math.pi * L for L in cfg.L], dtype=float)
    z = np.atleast_1d(hardy_z(heights))
    th = np.atleast_1d(riemann_siegel_theta(heights))
    rows = [{"t": float(t), "theta": float(a), "Z": float(b), "zeta_mod_sq": float(b * b)}
            for t, a, b in zip(heights, th, z)]
    _write_csv(rows, ["t", "theta", "Z", "zeta_mod_sq"], _out_path(cfg, "zeta.csv"))
    return EXIT_OK


def cmd_cache(cfg, action):
    spec = cfg.spec()
    cache = MomentCache.load(cfg.cache, spec)
    if action == "info":
        print(f"status={cache.status} checkpoints={len(cache.values)} top={cache.top!r} "
              f"F(top)={cache.values[-1]!r} {cache.header()[2:]}")
        return EXIT_OK
    if action == "warm":
        if not cfg.cache:
            raise ConfigError("cache warm needs --cache")
        m = MomentFunction(spec, cache=cache, path=cfg.cache)
        m.extend_to(cfg.to)
        print(f"status={cache.status} warmed to top={m.cache.top!r} checkpoints={len(m.cache.values)}")
        return EXIT_OK
    # verify: replay every stored checkpoint from scratch
    if cache.status != "loaded":
        print(f"status={cache.status} ignored cache" if cache.status == "ignored"
              else f"status={cache.status}")
        return EXIT_OK
    fresh = MomentFunction(spec)
    fresh.extend_to(cache.top)
    stored = np.array(cache.values)
    replay = np.array(fresh.cache.values[:len(stored)])
    worst = float(np.max(np.abs(replay - stored) / np.abs(stored)))
    ok = worst <= 10 * spec.rel_tol
    print(f"status=loaded verify={'ok' if ok else 'mismatch'} checkpoints={len(stored)} "
          f"max_rel_diff={worst!r}")
    return EXIT_OK if ok else EXIT_NUMERIC


# -- entry point ----------------------------------------------------------

def _add_common(p):
    p.add_argument("--config")
    p.add_argument("--L", help="comma-separated L grid")
    p.add_argument("--U", help="comma-separated U grid")
    p.add_argument("--k")
    p.add_argument("--delta", help="comma-separated Delta list")
    p.add_argument("--lemma", help="comma-separated lemma ids (1..8, 3s, one)")
    p.add_argument("--out", help="output directory (default: CSV on stdout)")
    p.add_argument("--cache", help="moment cache file")
    p.add_argument("--tol", help="relative quadrature tolerance")
    p.add_argument("--abs-tol", dest="abs_tol")
    p.add_argument("--epsilon")
    p.add_argument("--workers")
    p.add_argument("--T", help="comma-separated heights (ladder, zeta)")


def build_parser():
    parser = argparse.ArgumentParser(prog="zetaladder", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("lemma", "ladder", "zeta"):
        _add_common(sub.add_parser(name))
    p = sub.add_parser("hybrid")
    _add_common(p)
    p.add_argument("--theorem", help="comma-separated theorem ids (1, 2)")
    p.add_argument("--from-csv", dest="from_csv", help="bind from a lemma CSV instead of computing")
    p = sub.add_parser("cache")
    p.add_argument("action", choices=("warm", "verify", "info"))
    _add_common(p)
    p.add_argument("--to", help="warm target height")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        cfg.validate(args.command)
        if args.command == "lemma":
            return cmd_lemma(cfg)
        if args.command == "hybrid":
            return cmd_hybrid(cfg)
        if args.command == "ladder":
            return cmd_ladder(cfg)
        if args.command == "zeta":
            return cmd_zeta(cfg)
        return cmd_cache(cfg, args.action)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZetaLadderError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
