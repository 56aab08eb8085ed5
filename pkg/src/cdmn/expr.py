"""S-FEEL cell entries and cDMN column headers.

Parsing is split in two phases.  :func:`parse_cell` and :func:`parse_term`
produce a purely syntactic tree without consulting the vocabulary; the
``resolve_*`` functions and :func:`parse_header` then map phrases onto
symbols, variables and domain elements, producing :mod:`fo` terms.

Arithmetic operators may not be mixed without parentheses: ``a + b * c`` is
rejected, ``a + (b * c)`` is accepted.  A function argument that is itself
arithmetic must be parenthesized as well.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import fo
from .errors import (AmbiguousMatch, CdmnError, MalformedExpression,
                     MalformedRange, TypeMismatch, UnboundOutputVariable,
                     UnboundVariable, UnknownHeaderSymbol,
                     VariableRedeclaration, YesNoOnTerm)
from .glossary import BOOLEAN, CONSTANT, FUNCTION, RELATION, Vocabulary

# --- term syntax -------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Quoted:
    text: str


@dataclass(frozen=True)
class Group:
    inner: object


@dataclass(frozen=True)
class Phrase:
    items: tuple  # words (str) and parenthesized Groups


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


_TOKEN_RE = re.compile(r"""
    \s*(?:
      (?P<num>\d+(?![^\s+\-*/×÷(),"]))
    | (?P<op>[+\-*/×÷])
    | (?P<lp>\()
    | (?P<rp>\))
    | (?P<comma>,)
    | (?P<str>"[^"]*")
    | (?P<word>[^\s+\-*/×÷(),"]+)
    )""", re.X)
_OP_ALIASES = {"×": "*", "÷": "/"}
_ADDITIVE = {"+", "-"}


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise MalformedExpression(f"cannot parse {text[pos:]!r} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "op":
            val = _OP_ALIASES.get(val, val)
        out.append((kind, val))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, why):
        raise MalformedExpression(f"{why} in {self.text!r}")

    def expr(self):
        left = self.operand()
        klass = None
        while self.peek()[0] == "op":
            _, op = self.take()
            c = op in _ADDITIVE
            if klass is not None and c != klass:
                self.fail("mixed arithmetic operators need parentheses")
            klass = c
            left = BinOp(op, left, self.operand())
        return left

    def operand(self):
        items = []
        while True:
            kind, val = self.peek()
            if kind == "word":
                self.take()
                items.append(val)
            elif kind == "num":
                self.take()
                items.append(val)
            elif kind == "str" and not items:
                self.take()
                return Quoted(val[1:-1])
            elif kind == "lp":
                self.take()
                inner = self.expr()
                if self.take()[0] != "rp":
                    self.fail("unbalanced parenthesis")
                items.append(Group(inner))
            elif kind == "op" and val == "-" and not items and self.peek(1)[0] == "num":
                self.take()
                items.append("-" + self.take()[1])
            else:
                break
        if not items:
            self.fail("expected a term")
        if len(items) == 1:
            only = items[0]
            if isinstance(only, Group):
                return only.inner
            if re.fullmatch(r"-?\d+", only):
                return Num(int(only))
        return Phrase(tuple(items))

    def done(self):
        if self.i != len(self.toks):
            self.fail(f"unexpected {self.peek()[1]!r}")


def parse_term(text: str):
    p = _Parser(text)
    if not p.toks:
        raise MalformedExpression("empty expression")
    node = p.expr()
    p.done()
    return node


def render_term(node) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Quoted):
        return f'"{node.text}"'
    if isinstance(node, Group):
        return f"({render_term(node.inner)})"
    if isinstance(node, Phrase):
        return " ".join(render_term(i) if isinstance(i, Group) else i for i in node.items)
    if isinstance(node, BinOp):
        def side(x):
            s = render_term(x)
            return f"({s})" if isinstance(x, BinOp) else s
        return f"{side(node.left)} {node.op} {side(node.right)}"
    raise TypeError(node)


# --- cells -------------------------------------------------------------------

@dataclass(frozen=True)
class Irrelevant:
    pass


@dataclass(frozen=True)
class Compare:
    op: str
    term: object


@dataclass(frozen=True)
class Negated:
    terms: tuple


@dataclass(frozen=True)
class OneOf:
    terms: tuple


@dataclass(frozen=True)
class Range:
    lo: object
    lo_closed: bool
    hi: object
    hi_closed: bool


@dataclass(frozen=True)
class Single:
    term: object


@dataclass(frozen=True)
class YesAtom:
    pass


@dataclass(frozen=True)
class NoAtom:
    pass


_CMP_RE = re.compile(r"^(<=|>=|!=|≤|≥|≠|<|>|=)\s*(.*)$", re.S)
_CMP_ALIASES = {"<=": "≤", ">=": "≥", "!=": "≠"}
_NOT_RE = re.compile(r"^not\s*\((.*)\)$|^not\s+(.+)$", re.I | re.S)


def _split_top(text, sep=","):
    parts, depth, cur, quoted = [], 0, [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        elif not quoted and ch in "([":
            depth += 1
        elif not quoted and ch in ")]":
            depth -= 1
        if ch == sep and depth == 0 and not quoted:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _terms(text):
    parts = [p.strip() for p in _split_top(text)]
    if any(not p for p in parts):
        raise MalformedExpression(f"empty list element in {text!r}")
    return tuple(parse_term(p) for p in parts)


def parse_cell(text: str):
    s = text.strip()
    if s in ("", "-"):
        return Irrelevant()
    if s == "Yes":
        return YesAtom()
    if s == "No":
        return NoAtom()
    m = _CMP_RE.match(s)
    if m:
        op = _CMP_ALIASES.get(m.group(1), m.group(1))
        return Compare(op, parse_term(m.group(2)))
    m = _NOT_RE.match(s)
    if m:
        return Negated(_terms(m.group(1) if m.group(1) is not None else m.group(2)))
    if s[0] == "[" or (s[0] == "(" and len(_split_top(s[1:-1])) > 1):
        if s[-1] not in ")]" or s[0] not in "[(":
            raise MalformedRange(f"malformed range {s!r}")
        bounds = _split_top(s[1:-1])
        if len(bounds) != 2 or not all(b.strip() for b in bounds):
            raise MalformedRange(f"a range needs exactly two bounds: {s!r}")
        try:
            lo, hi = parse_term(bounds[0]), parse_term(bounds[1])
        except MalformedExpression as exc:
            raise MalformedRange(f"malformed range bound in {s!r}: {exc.message}") from None
        if isinstance(lo, Num) and isinstance(hi, Num) and lo.value > hi.value:
            raise MalformedRange(f"range {s!r} has lower bound above upper bound")
        return Range(lo, s[0] == "[", hi, s[-1] == "]")
    parts = _split_top(s)
    if len(parts) > 1:
        return OneOf(_terms(s))
    return Single(parse_term(s))


def render_cell(cell) -> str:
    if isinstance(cell, Irrelevant):
        return "-"
    if isinstance(cell, YesAtom):
        return "Yes"
    if isinstance(cell, NoAtom):
        return "No"
    if isinstance(cell, Compare):
        return f"{cell.op} {render_term(cell.term)}"
    if isinstance(cell, Negated):
        return "Not " + ", ".join(render_term(t) for t in cell.terms)
    if isinstance(cell, OneOf):
        return ", ".join(render_term(t) for t in cell.terms)
    if isinstance(cell, Range):
        return (("[" if cell.lo_closed else "(") + render_term(cell.lo) + ", "
                + render_term(cell.hi) + ("]" if cell.hi_closed else ")"))
    if isinstance(cell, Single):
        return render_term(cell.term)
    raise TypeError(cell)


# --- scopes and resolution ---------------------------------------------------

class Scope:
    """Variables of one table, introduced left to right."""

    def __init__(self):
        self.vars: dict[str, str] = {}
        self.introducing_column: dict[str, int] = {}
        self._named: dict[str, fo.Var] = {}
        self._by_type: dict[str, fo.Var] = {}
        self._reserved: set[str] = set()

    def lookup(self, word):
        if word in self._named:
            return self._named[word]
        return self._by_type.get(word)

    def type_var(self, type_name):
        return self._by_type.get(type_name)

    def fresh(self, base: str) -> str:
        name, k = base, 1
        while name in self.vars or name in self._reserved:
            k += 1
            name = f"{base}{k}"
        self._reserved.add(name)
        return name

    def introduce_type(self, type_name, column) -> fo.Var:
        var = fo.Var(self.fresh(f"x_{type_name}"), type_name)
        self.vars[var.name] = type_name
        self.introducing_column[var.name] = column
        self._by_type[type_name] = var
        return var

    def introduce_named(self, type_name, name, column) -> fo.Var:
        var = fo.Var(name, type_name)
        self.vars[name] = type_name
        self.introducing_column[name] = column
        self._named[name] = var
        self._reserved.add(name)
        return var

    def ordered(self):
        """Introduced variables in column order."""
        return [fo.Var(n, t) for n, t in self.vars.items()]


def _lone_word(items):
    return items[0] if len(items) == 1 and isinstance(items[0], str) else None


def resolve_term(syntax, vocab: Vocabulary, scope: Scope) -> fo.Term:
    node = _resolve(syntax, vocab, scope, want="term")
    return node


def _resolve(syntax, vocab, scope, want):
    if isinstance(syntax, Num):
        return fo.Value(syntax.value)
    if isinstance(syntax, Quoted):
        if syntax.text not in vocab.auto_constants:
            raise UnknownHeaderSymbol(f"{syntax.text!r} is not a domain element")
        return fo.Value(syntax.text)
    if isinstance(syntax, Group):
        return _resolve(syntax.inner, vocab, scope, want)
    if isinstance(syntax, BinOp):
        left = _resolve(syntax.left, vocab, scope, "term")
        right = _resolve(syntax.right, vocab, scope, "term")
        node = fo.Arith(syntax.op, left, right)
        fo.term_type(node, vocab)
        return node
    if isinstance(syntax, Phrase):
        return _resolve_phrase(syntax.items, vocab, scope, want)
    raise TypeError(syntax)


def _resolve_phrase(items, vocab, scope, want):
    word = _lone_word(items)
    if word is not None:
        if re.fullmatch(r"-?\d+", word):
            return fo.Value(int(word))
        if word.startswith("#") and word[1:] in vocab.types:
            var = fo.Var(scope.fresh("x"), word[1:])
            return fo.card_agg((var,), fo.TRUE)
        var = scope.lookup(word)
        if var is not None:
            return var
        if word in vocab.types:
            raise UnboundVariable(f"type {word} is used but no column introduces it")
        if word in vocab.auto_constants:
            return fo.Value(word)

    kinds = {"term": (FUNCTION, CONSTANT), "atom": (RELATION, BOOLEAN),
             "any": (FUNCTION, CONSTANT, RELATION, BOOLEAN)}[want]
    errors = []
    level, winners = None, []
    for sig, caps in vocab.matches(items):
        if sig.kind not in kinds:
            continue
        if level is not None and sig.n_words < level:
            break
        if any(w.name == sig.name for w, _ in winners):
            continue
        try:
            args = tuple(_resolve(Phrase(c) if not (len(c) == 1 and isinstance(c[0], Group))
                                  else c[0], vocab, scope, "term") for c in caps)
            node = (fo.App if sig.is_term else fo.Pred)(sig.name, args)
            if sig.is_term:
                fo.term_type(node, vocab)
            else:
                fo.check_formula(node, vocab)
        except CdmnError as exc:
            errors.append(exc)
            continue
        level = sig.n_words
        winners.append((sig, node))
    if len(winners) > 1:
        names = ", ".join(sorted(s.describe() for s, _ in winners))
        raise AmbiguousMatch(f"{' '.join(map(str, items))!r} matches {names}")
    if winners:
        return winners[0][1]
    if errors:
        raise errors[0]
    text = " ".join(render_term(i) if isinstance(i, Group) else i for i in items)
    raise UnknownHeaderSymbol(f"no symbol matches {text!r}")


# --- headers -----------------------------------------------------------------

@dataclass(frozen=True)
class Header:
    """A parsed column header.

    ``form`` is one of TypeVar, NamedVar, Const, Arith, FuncApp, RelApp,
    CountOfType.  Term-denoting headers carry ``term``; atom-denoting
    headers (relations and booleans) carry ``atom``.
    """
    form: str
    term: fo.Term | None = None
    atom: fo.Formula | None = None
    introduces: bool = False

    @property
    def is_atom(self):
        return self.atom is not None

    @property
    def is_variable(self):
        return self.form in ("TypeVar", "NamedVar")


_CALLED_RE = re.compile(r"^(\S+)\s+called\s+(\S+)$")


def _form_of(node):
    if isinstance(node, fo.Pred):
        return "RelApp"
    if isinstance(node, fo.Arith):
        return "Arith"
    if isinstance(node, fo.Agg):
        return "CountOfType"
    if isinstance(node, fo.App):
        return "FuncApp" if node.args else "Const"
    if isinstance(node, fo.Value):
        return "Const"
    raise TypeError(node)


def parse_header(text: str, vocab: Vocabulary, scope: Scope, column: int = 0,
                 is_input: bool = True) -> Header:
    """Parse one column header, introducing variables into ``scope``."""
    t = " ".join(text.split())
    if not t:
        raise MalformedExpression("empty column header")
    m = _CALLED_RE.match(t)
    if m and m.group(1) in vocab.types:
        type_name, name = m.groups()
        if not is_input:
            raise MalformedExpression(f"{t!r} introduces a variable in an output column")
        known = scope.lookup(name)
        if name in scope.vars or (known is not None and known.name == name):
            if scope.vars.get(name) != type_name:
                raise VariableRedeclaration(
                    f"variable {name} already has type {scope.vars.get(name)}")
            return Header("NamedVar", term=fo.Var(name, type_name))
        if (name in vocab.types or name in vocab.auto_constants or name in vocab.symbols
                or re.fullmatch(r"-?\d+", name)):
            raise VariableRedeclaration(f"variable name {name!r} shadows a constant or type")
        return Header("NamedVar", term=scope.introduce_named(type_name, name, column),
                      introduces=True)
    if t in vocab.types:
        var = scope.type_var(t)
        if var is not None:
            return Header("TypeVar", term=var)
        if not is_input:
            raise UnboundOutputVariable(f"output header {t!r} refers to no variable")
        return Header("TypeVar", term=scope.introduce_type(t, column), introduces=True)
    if t in scope._named:
        return Header("NamedVar", term=scope._named[t])

    syntax = parse_term(t)
    if isinstance(syntax, Phrase):
        node = _resolve_phrase(syntax.items, vocab, scope, "any")
    else:
        node = _resolve(syntax, vocab, scope, "term")
    if isinstance(node, fo.Pred):
        return Header("RelApp", atom=node)
    if isinstance(node, fo.Var):
        return Header("NamedVar" if node.name in scope._named else "TypeVar", term=node)
    return Header(_form_of(node), term=node)


# --- cell semantics ----------------------------------------------------------

def _yes_no_element(header, vocab, word):
    ty = fo.term_type(header.term, vocab)
    dom = vocab.domain(ty) or ()
    return word in dom


def cell_to_formula(cell, header: Header, vocab: Vocabulary, scope: Scope) -> fo.Formula:
    """The condition a cell imposes on its column's header."""
    if isinstance(cell, Irrelevant):
        return fo.TRUE
    if header.is_atom:
        if isinstance(cell, YesAtom):
            return header.atom
        if isinstance(cell, NoAtom):
            return fo.neg(header.atom)
        raise TypeMismatch("a relation column only accepts Yes, No or -")
    x = header.term
    if isinstance(cell, (YesAtom, NoAtom)):
        word = "Yes" if isinstance(cell, YesAtom) else "No"
        if _yes_no_element(header, vocab, word):
            return fo.Cmp("=", x, fo.Value(word))
        raise YesNoOnTerm(f"{word} used under a term-denoting header")

    def term(s):
        return resolve_term(s, vocab, scope)

    if isinstance(cell, Compare):
        f = fo.Cmp(cell.op, x, term(cell.term))
    elif isinstance(cell, Negated):
        f = fo.conj([fo.Cmp("≠", x, term(t)) for t in cell.terms])
    elif isinstance(cell, OneOf):
        f = fo.disj([fo.Cmp("=", x, term(t)) for t in cell.terms])
    elif isinstance(cell, Range):
        f = fo.conj([fo.Cmp("≥" if cell.lo_closed else ">", x, term(cell.lo)),
                     fo.Cmp("≤" if cell.hi_closed else "<", x, term(cell.hi))])
    elif isinstance(cell, Single):
        f = fo.Cmp("=", x, term(cell.term))
    else:
        raise TypeError(cell)
    fo.check_formula(f, vocab)
    return f


def cell_value(cell, header: Header, vocab: Vocabulary, scope: Scope) -> fo.Term:
    """The term written in a single-valued output cell."""
    if isinstance(cell, Single):
        return resolve_term(cell.term, vocab, scope)
    if isinstance(cell, (YesAtom, NoAtom)) and header.term is not None:
        word = "Yes" if isinstance(cell, YesAtom) else "No"
        if word in vocab.auto_constants:
            return fo.Value(word)
    raise MalformedExpression("expected a single value")
