"""Typed first-order logic with aggregates over finite domains.

Terms and formulas are immutable dataclasses.  A :class:`Structure` fixes a
finite domain per type and interprets function and relation symbols; 0-ary
functions are constants and 0-ary relations are propositions.

Null handling: decision-table outputs may take the reserved :data:`NULL`
value.  Arithmetic and function application propagate null, ordering
comparisons involving null are false, and ``=``/``≠`` treat null as an
ordinary element (so ``null = null`` holds).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import (DivisionByZero, InexactDivision, MinMaxOfEmptySet,
                     TypeMismatch, UninterpretedSymbol)


class _Null:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "null"

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()

ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("=", "≠", "≤", "≥", "<", ">")
AGG_KINDS = ("sum", "min", "max", "card")


# --- terms -------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str
    type: str


@dataclass(frozen=True)
class Value(Term):
    value: object


@dataclass(frozen=True)
class App(Term):
    """Function application; constants are applications without arguments."""
    symbol: str
    args: tuple = ()


@dataclass(frozen=True)
class Arith(Term):
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Agg(Term):
    """``kind{vars: cond_1: term_1 | ... | cond_n: term_n}``.

    The aggregated multiset is the union over branches of the ``term_i``
    values for the variable tuples satisfying ``cond_i``.  ``card`` counts
    the satisfying tuples of its single branch and has no term.
    """
    kind: str
    vars: tuple
    branches: tuple


def sum_agg(vars, cond, term):
    return Agg("sum", tuple(vars), ((cond, term),))


def card_agg(vars, cond):
    return Agg("card", tuple(vars), ((cond, None),))


# --- formulas ----------------------------------------------------------------

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Bool(Formula):
    value: bool


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class Pred(Formula):
    symbol: str
    args: tuple = ()


@dataclass(frozen=True)
class Cmp(Formula):
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple


@dataclass(frozen=True)
class Implies(Formula):
    ante: Formula
    cons: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple
    body: Formula


def conj(parts) -> Formula:
    """Conjunction with flattening and true/false absorption."""
    out = []
    for p in parts:
        if p == TRUE:
            continue
        if p == FALSE:
            return FALSE
        out.extend(p.parts if isinstance(p, And) else (p,))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(parts) -> Formula:
    out = []
    for p in parts:
        if p == FALSE:
            continue
        if p == TRUE:
            return TRUE
        out.extend(p.parts if isinstance(p, Or) else (p,))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def neg(f: Formula) -> Formula:
    if isinstance(f, Bool):
        return Bool(not f.value)
    if isinstance(f, Not):
        return f.body
    return Not(f)


def implies(ante: Formula, cons: Formula) -> Formula:
    if ante == TRUE:
        return cons
    if ante == FALSE or cons == TRUE:
        return TRUE
    return Implies(ante, cons)


def forall(vars, body: Formula) -> Formula:
    vars = tuple(vars)
    if not vars or isinstance(body, Bool):
        return body
    return Forall(vars, body)


def exists(vars, body: Formula) -> Formula:
    vars = tuple(vars)
    if not vars:
        return body
    return Exists(vars, body)


@dataclass(frozen=True)
class Theory:
    sentences: tuple = ()
    # per sentence: (table name, first body row, last body row)
    provenance: tuple = ()

    def render(self) -> str:
        lines = []
        for s, (table, lo, hi) in itertools.zip_longest(
                self.sentences, self.provenance, fillvalue=(None, None, None)):
            if table is not None:
                lines.append(f"// {table} (rows {lo}-{hi})")
            lines.append(render(s) + ".")
        return "\n".join(lines)


# --- structures --------------------------------------------------------------

@dataclass(frozen=True)
class Structure:
    """Finite domains plus interpretations.

    ``functions`` maps a symbol to ``{argument tuple: value}``; constants use
    the empty tuple.  ``relations`` maps a symbol to the frozenset of true
    tuples; a proposition is true iff ``()`` is in its set.
    """
    domains: Mapping = field(default_factory=dict)
    functions: Mapping = field(default_factory=dict)
    relations: Mapping = field(default_factory=dict)

    __hash__ = None

    def extend(self, functions=None, relations=None) -> "Structure":
        fs = dict(self.functions)
        fs.update(functions or {})
        rs = dict(self.relations)
        rs.update(relations or {})
        return replace(self, functions=fs, relations=rs)

    def interprets(self, symbol) -> bool:
        return symbol in self.functions or symbol in self.relations

    def key(self):
        """Hashable canonical form, used to compare models as sets."""
        fs = tuple(sorted((s, tuple(sorted(m.items(), key=sort_key)))
                          for s, m in self.functions.items()))
        rs = tuple(sorted((s, tuple(sorted(m, key=sort_key)))
                          for s, m in self.relations.items()))
        return fs, rs


def sort_key(x):
    """Total order over values and tuples of values (ints < names < null)."""
    if isinstance(x, tuple):
        return (3, tuple(sort_key(v) for v in x))
    if x is NULL:
        return (2, 0)
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    return (1, str(x))


# --- primitive operations ----------------------------------------------------

def arith(op, a, b):
    if a is NULL or b is NULL:
        return NULL
    if not (isinstance(a, int) and isinstance(b, int)):
        raise TypeMismatch(f"arithmetic on non-numbers {a!r} {op} {b!r}")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise DivisionByZero(f"division of {a} by zero")
        q, r = divmod(a, b)
        if r:
            raise InexactDivision(f"{a} / {b} is not an integer")
        return q
    raise ValueError(op)


def compare(op, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "≠":
        return a != b
    if a is NULL or b is NULL:
        return False
    if not (isinstance(a, int) and isinstance(b, int)):
        raise TypeMismatch(f"ordering comparison on non-numbers {a!r} {op} {b!r}")
    if op == "≤":
        return a <= b
    if op == "≥":
        return a >= b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    raise ValueError(op)


def aggregate(kind, values):
    """Combine collected aggregate values; ``values`` is a list."""
    if kind == "card":
        return len(values)
    if any(v is NULL for v in values):
        return NULL
    if kind == "sum":
        return sum(values)
    if not values:
        raise MinMaxOfEmptySet(f"{kind} of an empty set")
    return min(values) if kind == "min" else max(values)


# --- evaluation --------------------------------------------------------------

def _bindings(vars, structure):
    doms = []
    for v in vars:
        dom = structure.domains.get(v.type)
        if dom is None:
            raise UninterpretedSymbol(f"type {v.type} has no finite domain")
        doms.append(dom)
    names = [v.name for v in vars]
    for combo in itertools.product(*doms):
        yield zip(names, combo)


def eval_term(term: Term, structure: Structure, env=None):
    env = env or {}
    t = type(term)
    if t is Value:
        return term.value
    if t is Var:
        return env[term.name]
    if t is App:
        args = tuple(eval_term(a, structure, env) for a in term.args)
        if any(a is NULL for a in args):
            return NULL
        try:
            return structure.functions[term.symbol][args]
        except KeyError:
            raise UninterpretedSymbol(
                f"{term.symbol}{args if args else ''} is not interpreted") from None
    if t is Arith:
        return arith(term.op, eval_term(term.left, structure, env),
                     eval_term(term.right, structure, env))
    if t is Agg:
        values = []
        for binding in _bindings(term.vars, structure):
            local = dict(env)
            local.update(binding)
            for cond, sub in term.branches:
                if eval_formula(cond, structure, local):
                    values.append(1 if sub is None else eval_term(sub, structure, local))
        return aggregate(term.kind, values)
    raise TypeError(f"not a term: {term!r}")


def eval_formula(formula: Formula, structure: Structure, env=None) -> bool:
    env = env or {}
    t = type(formula)
    if t is Bool:
        return formula.value
    if t is Cmp:
        return compare(formula.op, eval_term(formula.left, structure, env),
                       eval_term(formula.right, structure, env))
    if t is Pred:
        args = tuple(eval_term(a, structure, env) for a in formula.args)
        if any(a is NULL for a in args):
            return False
        try:
            return args in structure.relations[formula.symbol]
        except KeyError:
            raise UninterpretedSymbol(f"{formula.symbol} is not interpreted") from None
    if t is Not:
        return not eval_formula(formula.body, structure, env)
    if t is And:
        return all(eval_formula(p, structure, env) for p in formula.parts)
    if t is Or:
        return any(eval_formula(p, structure, env) for p in formula.parts)
    if t is Implies:
        return (not eval_formula(formula.ante, structure, env)
                or eval_formula(formula.cons, structure, env))
    if t is Forall or t is Exists:
        want = t is Forall
        for binding in _bindings(formula.vars, structure):
            local = dict(env)
            local.update(binding)
            if eval_formula(formula.body, structure, local) != want:
                return not want
        return want
    raise TypeError(f"not a formula: {formula!r}")


# --- traversal ---------------------------------------------------------------

def free_vars(node) -> frozenset:
    t = type(node)
    if t is Var:
        return frozenset((node,))
    if t in (Value, Bool):
        return frozenset()
    if t in (App, Pred):
        return frozenset().union(*(free_vars(a) for a in node.args))
    if t in (Arith, Cmp):
        return free_vars(node.left) | free_vars(node.right)
    if t is Not:
        return free_vars(node.body)
    if t in (And, Or):
        return frozenset().union(*(free_vars(p) for p in node.parts))
    if t is Implies:
        return free_vars(node.ante) | free_vars(node.cons)
    if t in (Forall, Exists):
        return free_vars(node.body) - set(node.vars)
    if t is Agg:
        inner = frozenset()
        for cond, sub in node.branches:
            inner |= free_vars(cond)
            if sub is not None:
                inner |= free_vars(sub)
        return inner - set(node.vars)
    raise TypeError(f"not a term or formula: {node!r}")


def symbols_of(node) -> set:
    """Names of all function and relation symbols occurring in a node."""
    out = set()

    def walk(n):
        t = type(n)
        if t in (App, Pred):
            out.add(n.symbol)
            for a in n.args:
                walk(a)
        elif t in (Arith, Cmp):
            walk(n.left)
            walk(n.right)
        elif t in (Not, Forall, Exists):
            walk(n.body)
        elif t in (And, Or):
            for p in n.parts:
                walk(p)
        elif t is Implies:
            walk(n.ante)
            walk(n.cons)
        elif t is Agg:
            for cond, sub in n.branches:
                walk(cond)
                if sub is not None:
                    walk(sub)

    walk(node)
    return out


def substitute(node, mapping: dict):
    """Replace free variables (by name) with terms."""
    t = type(node)
    if t is Var:
        return mapping.get(node.name, node)
    if t in (Value, Bool):
        return node
    if t is App:
        return App(node.symbol, tuple(substitute(a, mapping) for a in node.args))
    if t is Pred:
        return Pred(node.symbol, tuple(substitute(a, mapping) for a in node.args))
    if t is Arith:
        return Arith(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
    if t is Cmp:
        return Cmp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
    if t is Not:
        return Not(substitute(node.body, mapping))
    if t in (And, Or):
        return t(tuple(substitute(p, mapping) for p in node.parts))
    if t is Implies:
        return Implies(substitute(node.ante, mapping), substitute(node.cons, mapping))
    inner = {k: v for k, v in mapping.items() if k not in {v.name for v in node.vars}}
    if t in (Forall, Exists):
        return t(node.vars, substitute(node.body, inner))
    if t is Agg:
        return Agg(node.kind, node.vars, tuple(
            (substitute(c, inner), None if s is None else substitute(s, inner))
            for c, s in node.branches))
    raise TypeError(f"not a term or formula: {node!r}")


def alpha_normalize(node, prefix="v"):
    """Rename bound variables to ``v1, v2, ...`` in binding order."""
    counter = itertools.count(1)

    def rename(vars):
        return tuple(Var(f"{prefix}{next(counter)}", v.type) for v in vars)

    def walk(n):
        t = type(n)
        if t in (Var, Value, Bool):
            return n
        if t is App:
            return App(n.symbol, tuple(walk(a) for a in n.args))
        if t is Pred:
            return Pred(n.symbol, tuple(walk(a) for a in n.args))
        if t is Arith:
            return Arith(n.op, walk(n.left), walk(n.right))
        if t is Cmp:
            return Cmp(n.op, walk(n.left), walk(n.right))
        if t is Not:
            return Not(walk(n.body))
        if t in (And, Or):
            return t(tuple(walk(p) for p in n.parts))
        if t is Implies:
            return Implies(walk(n.ante), walk(n.cons))
        new = rename(n.vars)
        mapping = {old.name: nv for old, nv in zip(n.vars, new)}
        if t in (Forall, Exists):
            return t(new, walk(substitute(n.body, mapping)))
        if t is Agg:
            return Agg(n.kind, new, tuple(
                (walk(substitute(c, mapping)),
                 None if s is None else walk(substitute(s, mapping)))
                for c, s in n.branches))
        raise TypeError(f"not a term or formula: {n!r}")

    return walk(node)


def sort_commutative(node):
    """Order the parts of every conjunction and disjunction by rendering."""
    t = type(node)
    if t in (And, Or):
        parts = [sort_commutative(p) for p in node.parts]
        return t(tuple(sorted(parts, key=render)))
    if t is Not:
        return Not(sort_commutative(node.body))
    if t is Implies:
        return Implies(sort_commutative(node.ante), sort_commutative(node.cons))
    if t in (Forall, Exists):
        return t(node.vars, sort_commutative(node.body))
    if t is Cmp:
        return Cmp(node.op, sort_commutative(node.left), sort_commutative(node.right))
    if t is Agg:
        return Agg(node.kind, node.vars, tuple(
            (sort_commutative(c), None if s is None else sort_commutative(s))
            for c, s in node.branches))
    if t is Arith:
        return Arith(node.op, sort_commutative(node.left), sort_commutative(node.right))
    return node


def canonical(node) -> str:
    """Rendering that is equal for α-equivalent nodes (up to conjunct order)."""
    return render(sort_commutative(alpha_normalize(node)))


# --- rendering ---------------------------------------------------------------

def _render_value(v):
    return "null" if v is NULL else str(v)


def _typed(vars):
    return ", ".join(f"{v.name}[{v.type}]" for v in vars)


def render(node) -> str:
    t = type(node)
    if t is Var:
        return node.name
    if t is Value:
        return _render_value(node.value)
    if t in (App, Pred):
        if not node.args:
            return node.symbol
        return f"{node.symbol}({', '.join(render(a) for a in node.args)})"
    if t is Arith:
        def side(x):
            s = render(x)
            return f"({s})" if isinstance(x, Arith) else s
        return f"{side(node.left)} {node.op} {side(node.right)}"
    if t is Agg:
        if node.kind == "card":
            cond = node.branches[0][0]
            return f"#{{{_typed(node.vars)}: {render(cond)}}}"
        inner = " | ".join(f"{render(c)}: {render(s)}" for c, s in node.branches)
        return f"{node.kind}{{{_typed(node.vars)}: {inner}}}"
    if t is Bool:
        return "true" if node.value else "false"
    if t is Cmp:
        return f"{render(node.left)} {node.op} {render(node.right)}"
    if t is Not:
        return f"¬{_wrap(node.body, strong=True)}"
    if t in (And, Or):
        sym = " ∧ " if t is And else " ∨ "
        return sym.join(_wrap(p) for p in node.parts)
    if t is Implies:
        return f"{_wrap(node.ante)} ⇒ {_wrap(node.cons)}"
    if t in (Forall, Exists):
        q = "∀" if t is Forall else "∃"
        return f"{q}{_typed(node.vars)}: {render(node.body)}"
    raise TypeError(f"cannot render {node!r}")


def _wrap(f, strong=False):
    s = render(f)
    if isinstance(f, (And, Or, Implies, Forall, Exists)) or (strong and isinstance(f, Cmp)):
        return f"({s})"
    return s


# --- typing ------------------------------------------------------------------

def term_type(term, vocab):
    """Type name of a term; ``None`` for the null value."""
    t = type(term)
    if t is Var:
        return term.type
    if t is Value:
        if term.value is NULL:
            return None
        ty = vocab.element_type(term.value)
        if ty is None:
            raise TypeMismatch(f"{term.value!r} is not a domain element")
        return ty
    if t is App:
        sig = vocab.symbols.get(term.symbol)
        if sig is None or not sig.is_term:
            raise TypeMismatch(f"{term.symbol} is not a function")
        _check_args(sig, term.args, vocab)
        return sig.result_type
    if t is Arith:
        for side in (term.left, term.right):
            ty = term_type(side, vocab)
            if ty is not None and not vocab.is_numeric(ty):
                raise TypeMismatch(f"arithmetic on non-numeric {render(side)}")
        return "Int"
    if t is Agg:
        for cond, sub in term.branches:
            check_formula(cond, vocab)
            if sub is not None:
                ty = term_type(sub, vocab)
                if ty is not None and not vocab.is_numeric(ty):
                    raise TypeMismatch(f"aggregate over non-numeric {render(sub)}")
        return "Int"
    raise TypeError(f"not a term: {term!r}")


def compatible(t1, t2, vocab) -> bool:
    if t1 is None or t2 is None or t1 == t2:
        return True
    return vocab.is_numeric(t1) and vocab.is_numeric(t2)


def _check_args(sig, args, vocab):
    if len(args) != sig.arity:
        raise TypeMismatch(f"{sig.name} takes {sig.arity} arguments, got {len(args)}")
    for a, want in zip(args, sig.arg_types):
        got = term_type(a, vocab)
        if not compatible(got, want, vocab):
            raise TypeMismatch(f"argument {render(a)} of {sig.name} has type {got}, "
                               f"expected {want}")


def check_formula(f, vocab):
    """Raise :class:`TypeMismatch` unless the formula is well-typed."""
    t = type(f)
    if t is Bool:
        return
    if t is Pred:
        sig = vocab.symbols.get(f.symbol)
        if sig is None or sig.is_term:
            raise TypeMismatch(f"{f.symbol} is not a relation")
        _check_args(sig, f.args, vocab)
    elif t is Cmp:
        lt, rt = term_type(f.left, vocab), term_type(f.right, vocab)
        if f.op in ("=", "≠"):
            if not compatible(lt, rt, vocab):
                raise TypeMismatch(f"cannot compare {lt} with {rt} in {render(f)}")
        else:
            for ty, side in ((lt, f.left), (rt, f.right)):
                if ty is not None and not vocab.is_numeric(ty):
                    raise TypeMismatch(f"{render(side)} is not numeric in {render(f)}")
    elif t is Not:
        check_formula(f.body, vocab)
    elif t in (And, Or):
        for p in f.parts:
            check_formula(p, vocab)
    elif t is Implies:
        check_formula(f.ante, vocab)
        check_formula(f.cons, vocab)
    elif t in (Forall, Exists):
        check_formula(f.body, vocab)
    else:
        raise TypeError(f"not a formula: {f!r}")
