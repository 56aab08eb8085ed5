"""Command-line front end: ``cdmn solve`` and ``cdmn check``.

Exit status: 0 models found, 1 unsatisfiable, 2 usage or compile error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import fo
from .engine import SolveConfig, solve
from .errors import CdmnError, SolveError
from .translate import ALL, CompiledModel, compile_workbook

EXIT_OK, EXIT_UNSAT, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2, 3


@dataclass
class RunReport:
    status: str  # "ok", "unsat" or "error"
    models: list = field(default_factory=list)
    objective: int | None = None
    exhausted: bool = False
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status, "models": self.models}
        if self.objective is not None:
            out["objective"] = self.objective
        out["exhausted"] = self.exhausted
        out["stats"] = self.stats
        return out


def _json_value(v):
    return None if v is fo.NULL else v


def _from_json_value(v):
    return fo.NULL if v is None else v


def structure_to_json(model: CompiledModel, s: fo.Structure) -> dict:
    """Every symbol of the vocabulary with its interpretation."""
    out = {}
    for name, sig in sorted(model.vocabulary.symbols.items()):
        if sig.is_term:
            table = s.functions[name]
            if sig.arity == 0:
                out[name] = _json_value(table[()])
            else:
                out[name] = [[*args, _json_value(v)]
                             for args, v in sorted(table.items(), key=lambda kv: fo.sort_key(kv[0]))]
        elif sig.arity == 0:
            out[name] = () in s.relations[name]
        else:
            out[name] = [list(t) for t in sorted(s.relations[name], key=fo.sort_key)]
    return out


def structure_from_json(model: CompiledModel, record: dict) -> fo.Structure:
    functions, relations = {}, {}
    for name, sig in model.vocabulary.symbols.items():
        value = record[name]
        if sig.is_term:
            if sig.arity == 0:
                functions[name] = {(): _from_json_value(value)}
            else:
                functions[name] = {tuple(row[:-1]): _from_json_value(row[-1]) for row in value}
        elif sig.arity == 0:
            relations[name] = frozenset({()}) if value else frozenset()
        else:
            relations[name] = frozenset(tuple(row) for row in value)
    return fo.Structure(dict(model.structure.domains), functions, relations)


def _show(v):
    return "null" if v is fo.NULL else str(v)


def render_text(model: CompiledModel, s: fo.Structure) -> list[str]:
    """Decided symbols only; data is not repeated."""
    lines = []
    for sig in model.open_symbols():
        name = sig.name
        if sig.is_term:
            for args, v in sorted(s.functions[name].items(), key=lambda kv: fo.sort_key(kv[0])):
                lines.append(f"{sig.phrase(args)} = {_show(v)}")
        elif sig.arity == 0:
            lines.append(f"{sig.phrase(())} = {'Yes' if () in s.relations[name] else 'No'}")
        else:
            true = sorted(s.relations[name], key=fo.sort_key)
            rendered = ", ".join("(" + ", ".join(map(str, t)) + ")" for t in true)
            lines.append(f"{sig.describe()}: {{{rendered}}}")
    return lines


def _models_arg(text):
    if text.lower() == "all":
        return "all"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'all'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer or 'all'")
    return n


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdmn", description="Compile and solve cDMN workbooks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("solve", "compile and solve a workbook"),
                           ("check", "compile a workbook without solving")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("path")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--emit-theory", action="store_true",
                       help="print the compiled theory")
        if name == "solve":
            p.add_argument("--models", type=_models_arg, default=None,
                           help="number of models or 'all' (overrides the goal table)")
            p.add_argument("--max-nodes", type=_positive_int, default=None)
            p.add_argument("--max-ground", type=_positive_int, default=10**7)
            p.add_argument("--timeout", type=float, default=None, help="seconds")
    return parser


def _load(path):
    with open(path, "rb") as fh:
        return compile_workbook(fh.read())


def _check(args, out) -> int:
    model = _load(args.path)
    theory = model.theory.render()
    if args.format == "json":
        record = {"status": "ok", "sentences": len(model.theory.sentences),
                  "task": model.task.kind}
        if args.emit_theory:
            record["theory"] = theory
        print(json.dumps(record, indent=2, ensure_ascii=False), file=out)
    else:
        if args.emit_theory:
            print(theory, file=out)
        print(f"ok: {len(model.theory.sentences)} sentences, task {model.task.kind}", file=out)
    return EXIT_OK


def run_solve(model: CompiledModel, count=None, config: SolveConfig | None = None) -> RunReport:
    start = time.perf_counter()
    problem, result = solve(model, count, config)
    stats = {"ground_size": problem.size, "cells": len(problem.cells),
             "nodes": result.nodes, "elapsed": round(time.perf_counter() - start, 6)}
    if result.is_unsat:
        return RunReport("unsat", stats=stats, exhausted=True)
    models = [structure_to_json(model, s) for s in result.models]
    return RunReport("ok", models, result.objective, result.exhausted, stats)


def _solve(args, out) -> int:
    model = _load(args.path)
    config = SolveConfig(max_ground=args.max_ground, max_nodes=args.max_nodes,
                         timeout=args.timeout)
    start = time.perf_counter()
    problem, result = solve(model, args.models, config)
    elapsed = round(time.perf_counter() - start, 6)
    stats = {"ground_size": problem.size, "cells": len(problem.cells),
             "nodes": result.nodes, "elapsed": elapsed}
    if args.format == "json":
        report = RunReport("unsat" if result.is_unsat else "ok",
                           [structure_to_json(model, s) for s in result.models],
                           result.objective, result.exhausted, stats)
        record = report.to_json()
        if args.emit_theory:
            record["theory"] = model.theory.render()
        print(json.dumps(record, indent=2, ensure_ascii=False), file=out)
    else:
        if args.emit_theory:
            print(model.theory.render(), file=out)
            print(file=out)
        if result.is_unsat:
            print("unsatisfiable: no models", file=out)
        for i, s in enumerate(result.models, 1):
            print(f"Model {i}", file=out)
            for line in render_text(model, s):
                print(f"  {line}", file=out)
        if result.objective is not None:
            print(f"objective: {result.objective}", file=out)
        wanted = args.models if args.models is not None else model.task.count
        if not result.is_unsat and result.exhausted and wanted not in (None, "all"):
            print(f"only {len(result.models)} of {wanted} requested models exist", file=out)
        print(f"ground constraints: {problem.size}, nodes: {result.nodes}", file=out)
    return EXIT_UNSAT if result.is_unsat else EXIT_OK


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.command == "check":
            return _check(args, out)
        return _solve(args, out)
    except SolveError as exc:
        print(f"resource limit: {exc}", file=err)
        return EXIT_LIMIT
    except CdmnError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
