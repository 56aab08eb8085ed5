"""Grounding and search.

:func:`ground` instantiates every sentence over the finite domains, folds in
the data tables and splits the result into ground constraints over *cells*:
one cell per open constant, per argument tuple of an open function, per
tuple of an open relation and per open proposition.

:func:`solve_models` is a depth-first search with forward checking over the
cells in a fixed order (symbol name, then argument tuple; values in domain
order), so "the first N models" is well defined.  :func:`solve_optimize`
adds branch-and-bound on an interval bound of the objective.
:func:`oracle_enumerate` is the naive reference: it tries every total
extension and evaluates the ungrounded theory.
"""

from __future__ import annotations

import itertools
import sys
import threading
import time
from dataclasses import dataclass, field

from . import fo
from .errors import (DomainBlowup, EmptyDomain, EvaluationError, OracleBlowup,
                     ResourceLimit, UninterpretedSymbol)
from .translate import ALL, CompiledModel


class _Unknown:
    def __repr__(self):
        return "?"


UNK = _Unknown()


@dataclass
class SolveConfig:
    max_ground: int = 10**7
    max_nodes: int | None = None
    timeout: float | None = None
    stop: threading.Event | None = None


# --- ground nodes ------------------------------------------------------------

class GNode:
    __slots__ = ()

    def val(self, a):
        raise NotImplementedError


class GConst(GNode):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def val(self, a):
        return self.value

    def __repr__(self):
        return f"GConst({self.value!r})"


G_TRUE, G_FALSE = GConst(True), GConst(False)


def _is_const(n, value=None):
    if type(n) is not GConst:
        return False
    return value is None or (n.value is value)


class GCell(GNode):
    __slots__ = ("cell",)

    def __init__(self, cell):
        self.cell = cell

    def val(self, a):
        return a.get(self.cell, UNK)

    def __repr__(self):
        return f"{self.cell[0]}{self.cell[1]}"


class GApp(GNode):
    """Application whose arguments are only known during search."""
    __slots__ = ("symbol", "args", "is_term", "data")

    def __init__(self, symbol, args, is_term, data):
        self.symbol, self.args, self.is_term, self.data = symbol, args, is_term, data

    def val(self, a):
        vals = []
        for g in self.args:
            v = g.val(a)
            if v is UNK:
                return UNK
            vals.append(v)
        vals = tuple(vals)
        if any(v is fo.NULL for v in vals):
            return fo.NULL if self.is_term else False
        if self.data is not None:
            if self.is_term:
                return self.data[vals]
            return vals in self.data
        return a.get((self.symbol, vals), UNK)


class GArith(GNode):
    __slots__ = ("op", "left", "right")

    def __init__(self, op, left, right):
        self.op, self.left, self.right = op, left, right

    def val(self, a):
        l = self.left.val(a)
        if l is UNK:
            return UNK
        r = self.right.val(a)
        if r is UNK:
            return UNK
        return fo.arith(self.op, l, r)


class GAgg(GNode):
    __slots__ = ("kind", "pairs")

    def __init__(self, kind, pairs):
        self.kind, self.pairs = kind, pairs

    def val(self, a):
        values = []
        for cond, term in self.pairs:
            c = cond.val(a)
            if c is UNK:
                return UNK
            if not c:
                continue
            if term is None:
                values.append(1)
                continue
            t = term.val(a)
            if t is UNK:
                return UNK
            values.append(t)
        return fo.aggregate(self.kind, values)


class GCmp(GNode):
    __slots__ = ("op", "left", "right")

    def __init__(self, op, left, right):
        self.op, self.left, self.right = op, left, right

    def val(self, a):
        l = self.left.val(a)
        if l is UNK:
            return UNK
        r = self.right.val(a)
        if r is UNK:
            return UNK
        return fo.compare(self.op, l, r)


class GNot(GNode):
    __slots__ = ("body",)

    def __init__(self, body):
        self.body = body

    def val(self, a):
        v = self.body.val(a)
        return v if v is UNK else not v


class GAnd(GNode):
    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = parts

    def val(self, a):
        unknown = False
        for p in self.parts:
            v = p.val(a)
            if v is UNK:
                unknown = True
            elif not v:
                return False
        return UNK if unknown else True


class GOr(GNode):
    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = parts

    def val(self, a):
        unknown = False
        for p in self.parts:
            v = p.val(a)
            if v is UNK:
                unknown = True
            elif v:
                return True
        return UNK if unknown else False


def _g_and(parts):
    out = []
    for p in parts:
        if _is_const(p):
            if not p.value:
                return G_FALSE
            continue
        out.extend(p.parts if type(p) is GAnd else (p,))
    if not out:
        return G_TRUE
    return out[0] if len(out) == 1 else GAnd(tuple(out))


def _g_or(parts):
    out = []
    for p in parts:
        if _is_const(p):
            if p.value:
                return G_TRUE
            continue
        out.extend(p.parts if type(p) is GOr else (p,))
    if not out:
        return G_FALSE
    return out[0] if len(out) == 1 else GOr(tuple(out))


def _g_not(g):
    if _is_const(g):
        return GConst(not g.value)
    if type(g) is GNot:
        return g.body
    return GNot(g)


def _fold(node):
    """Evaluate a node without cells; evaluation errors are deferred."""
    try:
        return GConst(node.val({}))
    except EvaluationError:
        return node


# --- grounding ---------------------------------------------------------------

@dataclass
class GroundProblem:
    model: CompiledModel
    cells: list
    domains: list
    constraints: list  # (ground node, tuple of cell indices)

    @property
    def size(self):
        return len(self.constraints)


class _Grounder:
    def __init__(self, model: CompiledModel, cap: int):
        self.model = model
        self.s = model.structure
        self.cap = cap
        self.open = {sig.name for sig in model.open_symbols()}

    def bindings(self, vars, env):
        doms = []
        for v in vars:
            dom = self.s.domains.get(v.type)
            if not dom:
                raise EmptyDomain(f"type {v.type} has no values")
            doms.append(dom)
        for combo in itertools.product(*doms):
            local = dict(env)
            local.update((v.name, x) for v, x in zip(vars, combo))
            yield local

    def app(self, symbol, args, env, is_term):
        gargs = [self.term(x, env) for x in args]
        if all(_is_const(g) for g in gargs):
            vals = tuple(g.value for g in gargs)
            if any(v is fo.NULL for v in vals):
                return GConst(fo.NULL if is_term else False)
            if symbol in self.open:
                return GCell((symbol, vals))
            try:
                if is_term:
                    return GConst(self.s.functions[symbol][vals])
                return GConst(vals in self.s.relations[symbol])
            except KeyError:
                raise UninterpretedSymbol(f"{symbol}{vals} is not interpreted") from None
        data = None
        if symbol not in self.open:
            data = self.s.functions[symbol] if is_term else self.s.relations[symbol]
        return GApp(symbol, tuple(gargs), is_term, data)

    def term(self, t, env):
        k = type(t)
        if k is fo.Value:
            return GConst(t.value)
        if k is fo.Var:
            return GConst(env[t.name])
        if k is fo.App:
            return self.app(t.symbol, t.args, env, True)
        if k is fo.Arith:
            node = GArith(t.op, self.term(t.left, env), self.term(t.right, env))
            if _is_const(node.left) and _is_const(node.right):
                return _fold(node)
            return node
        if k is fo.Agg:
            pairs = []
            for local in self.bindings(t.vars, env):
                for cond, sub in t.branches:
                    g = self.formula(cond, local)
                    if _is_const(g) and not g.value:
                        continue
                    pairs.append((g, None if sub is None else self.term(sub, local)))
            node = GAgg(t.kind, tuple(pairs))
            if all(_is_const(c) and (s is None or _is_const(s)) for c, s in pairs):
                return _fold(node)
            return node
        raise TypeError(t)

    def formula(self, f, env):
        k = type(f)
        if k is fo.Bool:
            return G_TRUE if f.value else G_FALSE
        if k is fo.Pred:
            return self.app(f.symbol, f.args, env, False)
        if k is fo.Cmp:
            node = GCmp(f.op, self.term(f.left, env), self.term(f.right, env))
            if _is_const(node.left) and _is_const(node.right):
                return _fold(node)
            return node
        if k is fo.Not:
            return _g_not(self.formula(f.body, env))
        if k is fo.And:
            return _g_and([self.formula(p, env) for p in f.parts])
        if k is fo.Or:
            return _g_or([self.formula(p, env) for p in f.parts])
        if k is fo.Implies:
            ante = self.formula(f.ante, env)
            if _is_const(ante) and not ante.value:
                return G_TRUE
            return _g_or([_g_not(ante), self.formula(f.cons, env)])
        if k is fo.Forall:
            return _g_and([self.formula(f.body, e) for e in self.bindings(f.vars, env)])
        if k is fo.Exists:
            return _g_or([self.formula(f.body, e) for e in self.bindings(f.vars, env)])
        raise TypeError(f)

    def top(self, f, env, out):
        k = type(f)
        if k is fo.Forall:
            for local in self.bindings(f.vars, env):
                self.top(f.body, local, out)
        elif k is fo.And:
            for p in f.parts:
                self.top(p, env, out)
        else:
            g = self.formula(f, env)
            if _is_const(g) and g.value is True:
                return
            out.append(g)
            if len(out) > self.cap:
                raise DomainBlowup(f"more than {self.cap} ground constraints")


def _collect_cells(node, by_symbol, out):
    k = type(node)
    if k is GCell:
        out.add(node.cell)
    elif k is GApp:
        if node.data is None:
            out.update(by_symbol.get(node.symbol, ()))
        for g in node.args:
            _collect_cells(g, by_symbol, out)
    elif k in (GArith, GCmp):
        _collect_cells(node.left, by_symbol, out)
        _collect_cells(node.right, by_symbol, out)
    elif k is GNot:
        _collect_cells(node.body, by_symbol, out)
    elif k in (GAnd, GOr):
        for p in node.parts:
            _collect_cells(p, by_symbol, out)
    elif k is GAgg:
        for c, t in node.pairs:
            _collect_cells(c, by_symbol, out)
            if t is not None:
                _collect_cells(t, by_symbol, out)


def ground(model: CompiledModel, config: SolveConfig | None = None) -> GroundProblem:
    config = config or SolveConfig()
    cell_doms = model.cells()
    for cell, dom in cell_doms:
        if not dom:
            raise EmptyDomain(f"cell {cell} has an empty domain")
    cells = [c for c, _ in cell_doms]
    index = {c: i for i, c in enumerate(cells)}
    by_symbol = {}
    for c in cells:
        by_symbol.setdefault(c[0], []).append(c)

    grounder = _Grounder(model, config.max_ground)
    nodes = []
    for sentence in model.theory.sentences:
        grounder.top(sentence, {}, nodes)
    constraints = []
    for g in nodes:
        scope = set()
        _collect_cells(g, by_symbol, scope)
        constraints.append((g, tuple(sorted(index[c] for c in scope))))
    return GroundProblem(model, cells, [tuple(d) for _, d in cell_doms], constraints)


def ground_term(problem: GroundProblem, term: fo.Term) -> GNode:
    """Ground a closed term (e.g. an optimization objective)."""
    return _Grounder(problem.model, problem.size + 1).term(term, {})


# --- search ------------------------------------------------------------------

@dataclass
class SolveResult:
    status: str  # "models", "optimum" or "unsat"
    models: list = field(default_factory=list)
    objective: int | None = None
    exhausted: bool = False  # fewer models exist than were requested
    nodes: int = 0

    @property
    def is_unsat(self):
        return self.status == "unsat"


class _Search:
    def __init__(self, problem: GroundProblem, config: SolveConfig):
        self.p = problem
        self.config = config
        self.n = len(problem.cells)
        self.domains = [list(d) for d in problem.domains]
        self.watch = [[] for _ in range(self.n)]
        for cid, (_, scope) in enumerate(problem.constraints):
            for i in scope:
                self.watch[i].append(cid)
        self.assign = {}
        self.nodes = 0
        self.deadline = None
        if config.timeout is not None:
            self.deadline = time.monotonic() + config.timeout

    def tick(self):
        self.nodes += 1
        cfg = self.config
        if cfg.max_nodes is not None and self.nodes > cfg.max_nodes:
            raise ResourceLimit(f"search exceeded {cfg.max_nodes} nodes")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceLimit(f"search exceeded {cfg.timeout} seconds")
        if cfg.stop is not None and cfg.stop.is_set():
            raise ResourceLimit("search was cancelled")

    def root(self):
        """Check variable-free constraints and prune by unary ones."""
        for node, scope in self.p.constraints:
            if not scope:
                if node.val(self.assign) is False:
                    return False
            elif len(scope) == 1:
                if not self.filter(scope[0], node, {}):
                    return False
        return True

    def filter(self, j, node, saved):
        cell = self.p.cells[j]
        keep = []
        for w in self.domains[j]:
            self.assign[cell] = w
            if node.val(self.assign) is not False:
                keep.append(w)
        del self.assign[cell]
        if len(keep) != len(self.domains[j]):
            saved.setdefault(j, self.domains[j])
            self.domains[j] = keep
        return bool(keep)

    def propagate(self, i, saved):
        cells = self.p.cells
        for cid in self.watch[i]:
            node, scope = self.p.constraints[cid]
            free = [j for j in scope if cells[j] not in self.assign]
            if not free:
                if node.val(self.assign) is False:
                    return False
            elif len(free) == 1:
                if not self.filter(free[0], node, saved):
                    return False
            elif node.val(self.assign) is False:
                return False
        return True

    def run(self, k=0, prune=None):
        """Yield every total assignment extending the current one."""
        self.tick()
        if prune is not None and prune():
            return
        if k == self.n:
            yield dict(self.assign)
            return
        cell = self.p.cells[k]
        for v in list(self.domains[k]):
            self.assign[cell] = v
            saved = {}
            if self.propagate(k, saved):
                yield from self.run(k + 1, prune)
            for j, dom in saved.items():
                self.domains[j] = dom
        self.assign.pop(cell, None)


def _recursion_guard(n):
    need = 4 * n + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def _check_model(model: CompiledModel, structure: fo.Structure):
    for s in model.theory.sentences:
        if not fo.eval_formula(s, structure):
            raise AssertionError(f"solver returned a non-model violating {fo.render(s)}")


def solve_models(problem: GroundProblem, count=1, config: SolveConfig | None = None) -> SolveResult:
    """First ``count`` models in search order (``count=None`` for all)."""
    config = config or SolveConfig()
    search = _Search(problem, config)
    _recursion_guard(search.n)
    models = []
    if search.root():
        for assignment in search.run():
            structure = problem.model.structure_from(assignment)
            _check_model(problem.model, structure)
            models.append(structure)
            if count is not ALL and len(models) >= count:
                break
    if not models:
        return SolveResult("unsat", nodes=search.nodes,
                           exhausted=True)
    exhausted = count is ALL or len(models) < count
    return SolveResult("models", models, exhausted=exhausted, nodes=search.nodes)


def _bounds(node, a, search):
    """Interval (lo, hi) containing every value ``node`` can take, or None."""
    k = type(node)
    if k is GConst:
        v = node.value
        return (v, v) if isinstance(v, int) and not isinstance(v, bool) else None
    if k is GCell:
        v = a.get(node.cell, UNK)
        if v is not UNK:
            return (v, v) if isinstance(v, int) else None
        j = search.index[node.cell]
        nums = [x for x in search.domains[j] if isinstance(x, int) and not isinstance(x, bool)]
        return (min(nums), max(nums)) if nums else None
    if k is GArith:
        l, r = _bounds(node.left, a, search), _bounds(node.right, a, search)
        if l is None or r is None:
            return None
        if node.op == "+":
            return (l[0] + r[0], l[1] + r[1])
        if node.op == "-":
            return (l[0] - r[1], l[1] - r[0])
        if node.op == "*":
            prods = [x * y for x in l for y in r]
            return (min(prods), max(prods))
        return None
    if k is GAgg and node.kind in ("sum", "card"):
        lo = hi = 0
        for cond, term in node.pairs:
            c = cond.val(a)
            if c is False:
                continue
            b = (1, 1) if term is None else _bounds(term, a, search)
            if b is None:
                return None
            if c is UNK:
                b = (min(b[0], 0), max(b[1], 0))
            lo, hi = lo + b[0], hi + b[1]
        return (lo, hi)
    return None


def solve_optimize(problem: GroundProblem, objective, direction: str,
                   config: SolveConfig | None = None) -> SolveResult:
    """Branch and bound; ``objective`` is a closed fo term or a ground node."""
    config = config or SolveConfig()
    if direction not in ("minimize", "maximize"):
        raise ValueError(direction)
    goal = objective if isinstance(objective, GNode) else ground_term(problem, objective)
    search = _Search(problem, config)
    search.index = {c: i for i, c in enumerate(problem.cells)}
    _recursion_guard(search.n)
    sign = 1 if direction == "maximize" else -1
    best = {"value": None, "assignment": None}

    def prune():
        if best["value"] is None:
            return False
        b = _bounds(goal, search.assign, search)
        if b is None:
            return False
        reachable = b[1] if sign > 0 else -b[0]
        return reachable <= sign * best["value"]

    if search.root():
        for assignment in search.run(prune=prune):
            value = goal.val(assignment)
            if value is fo.NULL:
                continue
            if best["value"] is None or sign * value > sign * best["value"]:
                best["value"], best["assignment"] = value, assignment
    if best["assignment"] is None:
        return SolveResult("unsat", nodes=search.nodes, exhausted=True)
    structure = problem.model.structure_from(best["assignment"])
    _check_model(problem.model, structure)
    return SolveResult("optimum", [structure], objective=best["value"], nodes=search.nodes)


def solve(model: CompiledModel, count=None, config: SolveConfig | None = None):
    """Ground and run the model's task; ``count`` overrides the goal table."""
    problem = ground(model, config)
    task = model.task
    if task.is_optimization and count is None:
        return problem, solve_optimize(problem, task.term, task.kind, config)
    n = task.count if count is None else count
    if count == "all":
        n = ALL
    return problem, solve_models(problem, n, config)


# --- oracle ------------------------------------------------------------------

ORACLE_CAP = 10**6


def oracle_enumerate(model: CompiledModel, cap: int = ORACLE_CAP):
    """Every model, by brute force over all total extensions of the data."""
    cell_doms = model.cells()
    size = 1
    for _, dom in cell_doms:
        size *= len(dom)
        if size > cap:
            raise OracleBlowup(f"more than {cap} candidate structures")
    cells = [c for c, _ in cell_doms]
    out = []
    for combo in itertools.product(*(d for _, d in cell_doms)):
        structure = model.structure_from(dict(zip(cells, combo)))
        if all(fo.eval_formula(s, structure) for s in model.theory.sentences):
            out.append(structure)
    return out
