"""Translation of cDMN tables into a theory, a data structure and a task.

Decision and constraint tables become closed sentences:

* U / A   ``∀vars: ⋀_rows (inputs ⇒ outputs)`` plus, when the rows do not
  cover every input, ``∀vars: ⋀_rows ¬inputs ⇒ output = null`` (or the
  declared default).
* F       like U, with every row guarded by the negation of earlier rows.
* E*      ``∀vars: ⋀_rows (inputs ⇒ outputs)`` with arbitrary output cells
  and no completion.
* C+      ``∀W: H = Σ_rows sum{U: inputs_row: value_row}``.
* C< C>   ``∀W: H = min/max{U: inputs_1: value_1 | ...}``.
* C#      ``∀W: H = #{x: ∃U: ⋁_rows (x = value_row ∧ inputs_row)}``.

W holds the variables introduced by input columns that occur in the output
header, U the remaining introduced variables.

Data tables give a partial structure: relations are closed-world, functions
must be total, and un-enumerated types take the values seen in the data.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from . import fo
from .errors import (CdmnError, ConflictingData, DataDecisionOverlap,
                     DefaultNotAllowed, DefaultOnConstraintTable, EmptyDomain,
                     IncompleteFunctionData, MalformedGoal, MalformedTable,
                     MultipleGoalTables, MultipleOutputs, NonBasicValue,
                     NonNumericCountTarget, NonNumericOutput, NonValueOutput,
                     TranslationError, TypeMismatch, UnknownDomainElement)
from .expr import (Header, Irrelevant, NoAtom, Scope, Single, YesAtom,
                   cell_to_formula, cell_value, parse_cell, parse_header,
                   parse_term, resolve_term, _split_top)
from .glossary import INT, Vocabulary, build_vocabulary, parse_value
from .grid import Kind, TableBlock

ALL = None  # model count meaning "every model"
_EXHAUSTIVE_CAP = 100_000


@dataclass(frozen=True)
class Task:
    kind: str  # "expand", "minimize" or "maximize"
    count: int | None = 1
    term: fo.Term | None = None

    @classmethod
    def expand(cls, count=1):
        return cls("expand", count)

    @classmethod
    def minimize(cls, term):
        return cls("minimize", None, term)

    @classmethod
    def maximize(cls, term):
        return cls("maximize", None, term)

    @property
    def is_optimization(self):
        return self.kind != "expand"


Cell = tuple  # (symbol name, argument tuple)


@dataclass(frozen=True)
class CompiledModel:
    vocabulary: Vocabulary
    theory: fo.Theory
    structure: fo.Structure
    task: Task = field(default_factory=Task.expand)
    defaults: dict = field(default_factory=dict)
    nullable: frozenset = frozenset()

    def open_symbols(self):
        """Symbols left for the solver, sorted by name."""
        return [s for name, s in sorted(self.vocabulary.symbols.items())
                if not self.structure.interprets(name)]

    def cells(self):
        """Ordered ``(cell, value domain)`` pairs of everything to be decided."""
        out = []
        doms = self.structure.domains
        for sig in self.open_symbols():
            arg_doms = [doms[t] for t in sig.arg_types]
            if sig.is_term:
                values = tuple(doms[sig.result_type])
                if sig.name in self.nullable:
                    values += (fo.NULL,)
            else:
                values = (False, True)
            for args in itertools.product(*arg_doms):
                out.append(((sig.name, tuple(args)), values))
        return out

    def structure_from(self, assignment) -> fo.Structure:
        """Total structure combining the data with a cell assignment."""
        funcs, rels = {}, {}
        for sig in self.open_symbols():
            if sig.is_term:
                funcs[sig.name] = {}
            else:
                rels[sig.name] = set()
        for (sym, args), val in assignment.items():
            if sym in funcs:
                funcs[sym][args] = val
            elif val:
                rels[sym].add(args)
        return self.structure.extend(funcs, {k: frozenset(v) for k, v in rels.items()})


# --- helpers -----------------------------------------------------------------

def _file_column(block, j):
    """1-based file column of block column ``j`` (separator accounted for)."""
    if block.kind in (Kind.DECISION, Kind.CONSTRAINT, Kind.DATA) and j >= block.n_inputs:
        return j + 2
    return j + 1


class _Located:
    """Context manager attaching table coordinates to escaping errors."""

    def __init__(self, block, row=None, column=None):
        self.where = dict(table=block.name, row=row, column=column)

    def __enter__(self):
        return self

    def __exit__(self, et, exc, tb):
        if isinstance(exc, CdmnError):
            exc.locate(**self.where)
        return False


@dataclass
class _Table:
    block: TableBlock
    scope: Scope
    inputs: list
    outputs: list
    rows: list  # (input cells, output cells) parsed


def _parse_headers(block, vocab):
    scope = Scope()
    inputs, outputs = [], []
    for j, text in enumerate(block.header_row):
        is_input = j < block.n_inputs
        with _Located(block, block.header_source_row, _file_column(block, j)):
            h = parse_header(text, vocab, scope, column=j, is_input=is_input)
        (inputs if is_input else outputs).append(h)
    return scope, inputs, outputs


def _parse_table(block, vocab) -> _Table:
    scope, inputs, outputs = _parse_headers(block, vocab)
    rows = []
    for i, row in enumerate(block.body):
        cells = []
        for j, text in enumerate(row):
            with _Located(block, block.source_row(i), _file_column(block, j)):
                cells.append(parse_cell(text))
        rows.append((cells[:block.n_inputs], cells[block.n_inputs:]))
    return _Table(block, scope, inputs, outputs, rows)


def _as_table(table, vocab) -> _Table:
    return _parse_table(table, vocab) if isinstance(table, TableBlock) else table


def _row_formulas(table, vocab, i, which):
    block = table.block
    cells = table.rows[i][0 if which == "in" else 1]
    headers = table.inputs if which == "in" else table.outputs
    offset = 0 if which == "in" else block.n_inputs
    out = []
    for j, (cell, h) in enumerate(zip(cells, headers)):
        with _Located(block, block.source_row(i), _file_column(block, offset + j)):
            out.append(cell_to_formula(cell, h, vocab, table.scope))
    return out


def _inputs(table, vocab, i):
    return fo.conj(_row_formulas(table, vocab, i, "in"))


def _introduced(table):
    return [fo.Var(n, t) for n, t in table.scope.vars.items()]


def _provenance(block):
    if not block.body:
        return (block.name, block.source_row(0) - 1, block.source_row(0) - 1)
    return (block.name, block.source_row(0), block.source_row(len(block.body) - 1))


def _head_symbol(header: Header):
    node = header.atom if header.is_atom else header.term
    if isinstance(node, (fo.App, fo.Pred)):
        return node.symbol
    return None


# --- exhaustiveness (decides whether a null completion is needed) ------------

def _rows_exhaustive(table, vocab, nullable_candidates) -> bool:
    """True if, for every value of the input headers, some row applies.

    Only decided when each input cell constrains nothing but its own header
    value; otherwise returns False and the completion sentence is kept.
    """
    if not table.rows:
        return False
    doms, tests = [], []
    for j, h in enumerate(table.inputs):
        if h.is_atom:
            doms.append((False, True))
            continue
        try:
            ty = fo.term_type(h.term, vocab)
        except CdmnError:
            return False
        dom = vocab.domain(ty)
        if dom is None:
            return False
        syms = fo.symbols_of(h.term)
        doms.append(tuple(dom) + ((fo.NULL,) if syms & nullable_candidates else ()))
    if any(len(d) == 0 for d in doms):
        return False
    size = 1
    for d in doms:
        size *= len(d)
    if size > _EXHAUSTIVE_CAP:
        return False

    probe = fo.Structure(domains={})
    for in_cells, _ in table.rows:
        row_tests = []
        for j, (cell, h) in enumerate(zip(in_cells, table.inputs)):
            if isinstance(cell, Irrelevant):
                row_tests.append(None)
            elif h.is_atom:
                if isinstance(cell, YesAtom):
                    row_tests.append(("atom", True))
                elif isinstance(cell, NoAtom):
                    row_tests.append(("atom", False))
                else:
                    return False
            else:
                ty = fo.term_type(h.term, vocab)
                x = fo.Var("__probe__", ty)
                f = cell_to_formula(cell, Header("TypeVar", term=x), vocab, table.scope)
                if fo.symbols_of(f) or fo.free_vars(f) - {x}:
                    return False
                row_tests.append(("formula", f))
        tests.append(row_tests)

    def applies(row_tests, values):
        for test, v in zip(row_tests, values):
            if test is None:
                continue
            kind, payload = test
            if kind == "atom":
                if v != payload:
                    return False
            elif not fo.eval_formula(payload, probe, {"__probe__": v}):
                return False
        return True

    return all(any(applies(rt, values) for rt in tests)
               for values in itertools.product(*doms))


# --- decision and constraint tables ------------------------------------------

def _parse_defaults(table, vocab):
    block = table.block
    if block.default is None:
        return None
    parts = [p.strip() for p in _split_top(block.default)]
    with _Located(block, block.origin + 1):
        if len(parts) != len(table.outputs):
            raise TranslationError(
                f"default lists {len(parts)} values for {len(table.outputs)} outputs")
        values = []
        for text, h in zip(parts, table.outputs):
            if h.is_atom:
                if text not in ("Yes", "No"):
                    raise TypeMismatch("default of a relation output must be Yes or No")
                values.append(text == "Yes")
            else:
                t = resolve_term(parse_term(text), vocab, table.scope)
                if fo.free_vars(t):
                    raise TranslationError("a default value must be a constant")
                if not fo.compatible(fo.term_type(t, vocab), fo.term_type(h.term, vocab), vocab):
                    raise TypeMismatch(f"default {text!r} does not fit {fo.render(h.term)}")
                values.append(t)
    return values


def _check_value_outputs(table):
    block = table.block
    for i, (_, outs) in enumerate(table.rows):
        for j, cell in enumerate(outs):
            if not isinstance(cell, (Single, YesAtom, NoAtom, Irrelevant)):
                raise NonValueOutput(
                    "decision table outputs must be single values",
                    table=block.name, row=block.source_row(i),
                    column=_file_column(block, block.n_inputs + j))


def translate_decision_table(table, vocab, nullable_candidates=frozenset()):
    """U, A and F tables.  Returns ``(sentences, nullable symbols, defaults)``."""
    table = _as_table(table, vocab)
    block = table.block
    _check_value_outputs(table)
    defaults = _parse_defaults(table, vocab)
    variables = _introduced(table)
    ins = [_inputs(table, vocab, i) for i in range(len(table.rows))]
    outs = [fo.conj(_row_formulas(table, vocab, i, "out")) for i in range(len(table.rows))]
    rules = []
    for i in range(len(table.rows)):
        guard = ins[i]
        if block.hit_policy == "F":
            guard = fo.conj([guard] + [fo.neg(ins[k]) for k in range(i)])
        rules.append(fo.implies(guard, outs[i]))
    sentences = [fo.forall(variables, fo.conj(rules))]

    nullable = set()
    if not _rows_exhaustive(table, vocab, nullable_candidates):
        ante = fo.conj([fo.neg(f) for f in ins])
        cons = []
        for k, h in enumerate(table.outputs):
            if h.is_atom:
                value = defaults[k] if defaults else False
                cons.append(h.atom if value else fo.neg(h.atom))
            elif defaults:
                cons.append(fo.Cmp("=", h.term, defaults[k]))
            else:
                cons.append(fo.Cmp("=", h.term, fo.Value(fo.NULL)))
                sym = _head_symbol(h)
                if sym is not None:
                    nullable.add(sym)
        sentences.append(fo.forall(variables, fo.implies(ante, fo.conj(cons))))
    symbol_defaults = {}
    if defaults:
        for h, d in zip(table.outputs, defaults):
            sym = _head_symbol(h)
            if sym is not None:
                symbol_defaults[sym] = d.value if isinstance(d, fo.Value) else d
    return sentences, nullable, symbol_defaults


def translate_constraint_table(table, vocab) -> fo.Formula:
    table = _as_table(table, vocab)
    block = table.block
    if block.default is not None:
        raise DefaultOnConstraintTable("constraint tables cannot have default values",
                                       table=block.name, row=block.origin + 1)
    rules = []
    for i in range(len(table.rows)):
        rules.append(fo.implies(_inputs(table, vocab, i),
                                fo.conj(_row_formulas(table, vocab, i, "out"))))
    return fo.forall(_introduced(table), fo.conj(rules))


def _single_output(table, vocab, error):
    block = table.block
    where = dict(table=block.name, row=block.header_source_row)
    if block.default is not None:
        raise DefaultNotAllowed(f"{block.hit_policy} tables cannot have default values",
                                table=block.name, row=block.origin + 1)
    if len(table.outputs) != 1:
        raise MultipleOutputs(f"{block.hit_policy} tables have exactly one output column",
                              **where)
    h = table.outputs[0]
    if h.is_atom or not vocab.is_numeric(fo.term_type(h.term, vocab)):
        raise error(f"output of a {block.hit_policy} table must be numeric",
                    **where, column=_file_column(block, block.n_inputs))
    return h


def _split_variables(table, header):
    in_header = fo.free_vars(header.term)
    variables = _introduced(table)
    w = [v for v in variables if v in in_header]
    u = [v for v in variables if v not in in_header]
    return w, u


def _output_terms(table, vocab, header):
    block = table.block
    terms = []
    for i, (_, outs) in enumerate(table.rows):
        with _Located(block, block.source_row(i), _file_column(block, block.n_inputs)):
            if not isinstance(outs[0], Single):
                raise NonValueOutput("aggregating tables need a single value per row")
            terms.append(cell_value(outs[0], header, vocab, table.scope))
    return terms


def translate_c_aggregate(table, vocab, kind: str) -> fo.Formula:
    """C+ (``kind='sum'``), C< (``'min'``) and C> (``'max'``) tables."""
    table = _as_table(table, vocab)
    h = _single_output(table, vocab, NonNumericOutput)
    w, u = _split_variables(table, h)
    terms = _output_terms(table, vocab, h)
    for i, t in enumerate(terms):
        ty = fo.term_type(t, vocab)
        if ty is not None and not vocab.is_numeric(ty):
            raise NonNumericOutput(f"row value {fo.render(t)} is not numeric",
                                   table=table.block.name, row=table.block.source_row(i))
    conds = [_inputs(table, vocab, i) for i in range(len(table.rows))]
    if kind == "sum":
        parts = [fo.sum_agg(u, c, t) for c, t in zip(conds, terms)]
        rhs = parts[0] if parts else fo.Value(0)
        for p in parts[1:]:
            rhs = fo.Arith("+", rhs, p)
    else:
        rhs = fo.Agg(kind, tuple(u), tuple(zip(conds, terms)))
    return fo.forall(w, fo.Cmp("=", h.term, rhs))


def translate_c_count(table, vocab) -> fo.Formula:
    table = _as_table(table, vocab)
    h = _single_output(table, vocab, NonNumericCountTarget)
    w, u = _split_variables(table, h)
    terms = _output_terms(table, vocab, h)
    types = {fo.term_type(t, vocab) for t in terms} - {None}
    if len(types) > 1:
        raise TypeMismatch(f"counted values have different types {sorted(types)}",
                           table=table.block.name)
    value_type = types.pop() if types else None
    if value_type is None or value_type == INT or vocab.domain(value_type) is None:
        raise NonNumericCountTarget("counted values must belong to a finite declared type",
                                    table=table.block.name)
    x = fo.Var(table.scope.fresh("x"), value_type)
    alternatives = []
    for i, t in enumerate(terms):
        alternatives.append(fo.conj([fo.Cmp("=", x, t), _inputs(table, vocab, i)]))
    cond = fo.exists(u, fo.disj(alternatives))
    return fo.forall(w, fo.Cmp("=", h.term, fo.card_agg((x,), cond)))


# --- data tables -------------------------------------------------------------

_BASIC_RE = re.compile(r'^(-?\d+|[^\s+*/×÷()\[\]<>=≤≥≠,"]+|"[^"]*")$')


def _basic_values(text, block, row, column):
    text = text.strip()
    if text in ("", "-"):
        return None
    values = []
    for part in _split_top(text):
        part = part.strip()
        if not part or not _BASIC_RE.match(part) or part.startswith("-") and not part[1:].isdigit():
            raise NonBasicValue(f"data cells hold basic values only, got {text!r}",
                                table=block.name, row=row, column=column)
        if part.startswith('"'):
            part = part[1:-1]
        values.append(parse_value(part))
    return values


class _DataCollector:
    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.functions: dict = {}  # symbol -> {args: value}
        self.relations: dict = {}  # symbol -> {args: bool}
        self.seen: dict = {}  # un-enumerated type -> ordered values
        self.origin: dict = {}  # symbol -> table name

    def typed(self, value, type_name, block, row, column):
        decl = self.vocab.types[type_name]
        where = dict(table=block.name, row=row, column=column)
        if decl.is_numeric and not isinstance(value, int):
            raise NonBasicValue(f"{value!r} is not an integer ({type_name})", **where)
        if decl.domain is not None:
            if value not in decl.domain:
                raise UnknownDomainElement(f"{value!r} is not in the domain of {type_name}",
                                           **where)
        else:
            if not decl.is_numeric and isinstance(value, int):
                raise NonBasicValue(f"{value!r} is a number but {type_name} is not", **where)
            seen = self.seen.setdefault(type_name, [])
            if value not in seen:
                seen.append(value)
        return value

    def add(self, block: TableBlock):
        scope, inputs, outputs = _parse_headers(block, self.vocab)
        for j, h in enumerate(inputs):
            if not h.introduces:
                raise MalformedTable("data table key columns must introduce variables",
                                     table=block.name, row=block.header_source_row,
                                     column=_file_column(block, j))
        for k, h in enumerate(outputs):
            node = h.atom if h.is_atom else h.term
            col = _file_column(block, block.n_inputs + k)
            if not isinstance(node, (fo.App, fo.Pred)) or not all(
                    isinstance(a, fo.Var) for a in node.args):
                raise MalformedTable("data table value columns must apply a symbol to "
                                     "key variables", table=block.name,
                                     row=block.header_source_row, column=col)
            self.origin.setdefault(node.symbol, block.name)

        keys = [h.term for h in inputs]
        for i, row in enumerate(block.body):
            r = block.source_row(i)
            choices = []
            for j, (text, var) in enumerate(zip(row, keys)):
                col = _file_column(block, j)
                vals = _basic_values(text, block, r, col)
                if vals is None:
                    raise NonBasicValue("data table key cells cannot be empty",
                                        table=block.name, row=r, column=col)
                choices.append([self.typed(v, var.type, block, r, col) for v in vals])
            for combo in itertools.product(*choices):
                env = {v.name: val for v, val in zip(keys, combo)}
                for k, h in enumerate(outputs):
                    col = _file_column(block, block.n_inputs + k)
                    self._record(block, h, row[block.n_inputs + k], env, r, col)

    def _record(self, block, header, text, env, row, col):
        where = dict(table=block.name, row=row, column=col)
        node = header.atom if header.is_atom else header.term
        args = tuple(env[a.name] for a in node.args)
        sig = self.vocab.symbols[node.symbol]
        if header.is_atom:
            text = text.strip()
            if text in ("", "-"):
                return
            if text not in ("Yes", "No"):
                raise NonBasicValue("relation data cells hold Yes or No", **where)
            table = self.relations.setdefault(node.symbol, {})
            truth = text == "Yes"
            if table.get(args, truth) != truth:
                raise ConflictingData(f"{sig.phrase(args)} is both true and false", **where)
            table[args] = truth
            return
        vals = _basic_values(text, block, row, col)
        if vals is None:
            return
        if len(vals) != 1:
            raise ConflictingData(f"{sig.phrase(args)} is given several values", **where)
        value = self.typed(vals[0], sig.result_type, block, row, col)
        table = self.functions.setdefault(node.symbol, {})
        if args in table and table[args] != value:
            raise ConflictingData(
                f"{sig.phrase(args)} is both {table[args]!r} and {value!r}", **where)
        table[args] = value


def translate_data_tables(blocks, vocab: Vocabulary):
    """Returns ``(vocabulary with inferred domains, data structure)``."""
    collector = _DataCollector(vocab)
    for block in blocks:
        collector.add(block)
    vocab = vocab.with_domains({t: tuple(v) for t, v in collector.seen.items()})
    domains = {name: decl.domain for name, decl in vocab.types.items()
               if decl.domain is not None}
    functions = {}
    for sym, table in collector.functions.items():
        sig = vocab.symbols[sym]
        missing = [args for args in itertools.product(*(domains.get(t, ()) for t in sig.arg_types))
                   if args not in table]
        if missing:
            raise IncompleteFunctionData(
                f"no value for {sig.phrase(missing[0])}"
                + (f" and {len(missing) - 1} more" if len(missing) > 1 else ""),
                table=collector.origin[sym])
        functions[sym] = dict(table)
    relations = {sym: frozenset(a for a, v in table.items() if v)
                 for sym, table in collector.relations.items()}
    return vocab, fo.Structure(domains, functions, relations)


def translate_data_table(block: TableBlock, vocab: Vocabulary) -> fo.Structure:
    """A single data table as a structure fragment."""
    return translate_data_tables([block], vocab)[1]


# --- goal --------------------------------------------------------------------

_GET_RE = re.compile(r"^get\s+(\d+|all)\s+models?$", re.I)
_OPT_RE = re.compile(r"^(minimi[sz]e|maximi[sz]e)\s+(.+)$", re.I)


def translate_goal(block: TableBlock, vocab: Vocabulary) -> Task:
    where = dict(table=block.name, row=block.source_row(0))
    if tuple(c.lower() for c in block.header_row) != ("execute",):
        raise MalformedGoal("a goal table has the single header 'Execute'",
                            table=block.name, row=block.header_source_row)
    text = " ".join(block.body[0][0].split())
    m = _GET_RE.match(text)
    if m:
        n = m.group(1)
        if n.lower() == "all":
            return Task.expand(ALL)
        if int(n) < 1:
            raise MalformedGoal("the number of models must be positive", **where)
        return Task.expand(int(n))
    m = _OPT_RE.match(text)
    if m:
        with _Located(block, where["row"], 1):
            term = resolve_term(parse_term(m.group(2)), vocab, Scope())
            ty = fo.term_type(term, vocab)
        if fo.free_vars(term) or (ty is not None and not vocab.is_numeric(ty)):
            raise MalformedGoal(f"{m.group(2)!r} is not a closed numeric term", **where)
        maker = Task.minimize if m.group(1).lower().startswith("min") else Task.maximize
        return maker(term)
    raise MalformedGoal(f"cannot read goal {text!r}; use 'get N models', "
                        "'get all models', 'minimize <term>' or 'maximize <term>'", **where)


# --- whole model -------------------------------------------------------------

def compile_model(blocks, vocabulary: Vocabulary | None = None) -> CompiledModel:
    blocks = list(blocks)
    if vocabulary is None:
        vocabulary = build_vocabulary([b for b in blocks if b.kind.is_glossary])
    goals = [b for b in blocks if b.kind is Kind.GOAL]
    if len(goals) > 1:
        raise MultipleGoalTables("at most one goal table is allowed", table=goals[1].name,
                                 row=goals[1].origin + 1)
    vocab, structure = translate_data_tables(
        [b for b in blocks if b.kind is Kind.DATA], vocabulary)

    rule_blocks = [b for b in blocks if b.kind in (Kind.DECISION, Kind.CONSTRAINT)]
    tables = [_parse_table(b, vocab) for b in rule_blocks]

    candidates = set()
    for t in tables:
        if t.block.hit_policy in ("U", "A", "F"):
            candidates |= {s for s in map(_head_symbol, t.outputs) if s}
    for t in tables:
        if t.block.kind is Kind.DECISION:
            for h in t.outputs:
                sym = _head_symbol(h)
                if sym and structure.interprets(sym):
                    raise DataDecisionOverlap(
                        f"{sym} is given by a data table and defined by a decision table",
                        table=t.block.name, row=t.block.header_source_row)

    sentences, provenance = [], []
    nullable, defaults = set(), {}
    for t in tables:
        policy = t.block.hit_policy
        if policy in ("U", "A", "F"):
            new, nul, dfl = translate_decision_table(t, vocab, frozenset(candidates))
            nullable |= nul
            defaults.update(dfl)
        elif policy == "E*":
            new = [translate_constraint_table(t, vocab)]
        elif policy == "C#":
            new = [translate_c_count(t, vocab)]
        else:
            new = [translate_c_aggregate(t, vocab, {"C+": "sum", "C<": "min", "C>": "max"}[policy])]
        for s in new:
            with _Located(t.block):
                fo.check_formula(s, vocab)
                if fo.free_vars(s):
                    raise TranslationError(f"sentence has free variables: {fo.render(s)}")
            unknown = fo.symbols_of(s) - set(vocab.symbols)
            if unknown:
                raise TranslationError(f"undeclared symbols {sorted(unknown)}",
                                       table=t.block.name)
            sentences.append(s)
            provenance.append(_provenance(t.block))

    task = translate_goal(goals[0], vocab) if goals else Task.expand(1)

    needed = set()
    for sig in vocab.symbols.values():
        needed.update(sig.arg_types)
        if sig.result_type:
            needed.add(sig.result_type)
    for name in sorted(needed):
        if not vocab.domain(name):
            raise EmptyDomain(f"type {name} has no values: enumerate it in the glossary "
                              "or use it in a data table")
    return CompiledModel(vocab, fo.Theory(tuple(sentences), tuple(provenance)), structure,
                         task, defaults, frozenset(nullable))


def compile_workbook(source) -> CompiledModel:
    from .grid import read_workbook
    return compile_model(read_workbook(source))
