"""Typed vocabulary built from the glossary tables.

Symbols are declared by a short natural-language description.  Every
whitespace-separated word of a function or relation description that is
*exactly* a declared type name becomes an argument slot; the remaining words
form the symbol's template.  ``nb nights of Doctor`` is thus a unary function
with template ``nb nights of _`` and internal name ``nb_nights_of_Doctor``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import (AmbiguousMatch, ClashingDomainElement,
                     DuplicateGlossaryTable, DuplicateSymbol, GlossaryError,
                     MalformedTable, MissingTypeTable, NoArguments,
                     UnknownType, UnresolvedSymbol)
from .grid import Kind, TableBlock

INT = "Int"  # built-in type of integer literals and arithmetic results
SLOT = None  # argument position inside a template

FUNCTION, CONSTANT, RELATION, BOOLEAN = "function", "constant", "relation", "boolean"

_RANGE_RE = re.compile(r"^\[\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*\]$")
_INT_RE = re.compile(r"^-?\d+$")
_NUMERIC_DATATYPES = {"int", "integer", "number", "numeric"}
_STRING_DATATYPES = {"", "string", "str", "text"}


def parse_value(text: str):
    """A basic value: an integer literal or a domain-element name."""
    text = text.strip()
    if _INT_RE.match(text):
        return int(text)
    return text


@dataclass(frozen=True)
class TypeDecl:
    name: str
    declared_domain: tuple | None = None
    is_numeric: bool = False
    # effective domain: the declared one, or the one inferred from data tables
    domain: tuple | None = None


@dataclass(frozen=True)
class Signature:
    name: str
    kind: str
    template: tuple
    arg_types: tuple[str, ...]
    result_type: str | None = None

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    @property
    def n_words(self) -> int:
        return sum(1 for t in self.template if t is not SLOT)

    @property
    def is_term(self) -> bool:
        return self.kind in (FUNCTION, CONSTANT)

    def render_template(self) -> str:
        return " ".join("_" if t is SLOT else t for t in self.template)

    def describe(self) -> str:
        """The declaring description, with slots filled by their type names."""
        types = iter(self.arg_types)
        return " ".join(next(types) if t is SLOT else t for t in self.template)

    def phrase(self, args) -> str:
        """Render an application with concrete arguments, e.g. ``color of Belgium``."""
        args = iter(args)
        return " ".join(str(next(args)) if t is SLOT else t for t in self.template)


def parse_signature(description: str, type_names, kind: str = FUNCTION,
                    existing=()) -> Signature:
    """Split a description into template words and typed argument slots.

    Constants and booleans never take arguments, so their descriptions are
    kept whole even if they happen to contain a type name.
    """
    words = description.split()
    if not words:
        raise GlossaryError("empty symbol description")
    template, arg_types = [], []
    for w in words:
        if kind in (FUNCTION, RELATION) and w in type_names:
            template.append(SLOT)
            arg_types.append(w)
        else:
            template.append(w)
    if kind == RELATION and not arg_types:
        raise NoArguments(f"relation {description!r} mentions no type")
    name = "_".join(words)
    if name in existing:
        raise DuplicateSymbol(f"symbol {description!r} is declared twice")
    return Signature(name=name, kind=kind, template=tuple(template),
                     arg_types=tuple(arg_types))


@dataclass(frozen=True)
class Element:
    """A domain element referenced by its automatically introduced constant."""
    value: object
    type: str


@dataclass(frozen=True)
class Vocabulary:
    types: dict = field(default_factory=dict)
    symbols: dict = field(default_factory=dict)
    auto_constants: dict = field(default_factory=dict)

    def _of_kind(self, kind):
        return {s.name: s for s in self.symbols.values() if s.kind == kind}

    @property
    def functions(self):
        return self._of_kind(FUNCTION)

    @property
    def constants(self):
        return self._of_kind(CONSTANT)

    @property
    def relations(self):
        return self._of_kind(RELATION)

    @property
    def booleans(self):
        return set(self._of_kind(BOOLEAN))

    def is_numeric(self, type_name) -> bool:
        if type_name == INT:
            return True
        decl = self.types.get(type_name)
        return bool(decl and decl.is_numeric)

    def domain(self, type_name):
        decl = self.types.get(type_name)
        return decl.domain if decl else None

    def element_type(self, value):
        if isinstance(value, int):
            return INT
        return self.auto_constants.get(value)

    def with_domains(self, inferred: dict) -> "Vocabulary":
        """Fill in domains of types not enumerated in the glossary."""
        types = dict(self.types)
        for name, values in inferred.items():
            decl = types[name]
            if decl.domain is None:
                numeric = decl.is_numeric or all(isinstance(v, int) for v in values)
                if numeric:
                    values = tuple(sorted(values))
                types[name] = replace(decl, domain=tuple(values), is_numeric=numeric)
        return Vocabulary(types, dict(self.symbols),
                          _auto_constants(types, self.symbols))

    def matches(self, items):
        """All template matches for a token sequence, best first.

        Each match is ``(signature, captures)`` where ``captures`` holds one
        tuple of items per argument slot.  Templates with more literal words
        come first; within a template, leftmost-longest captures come first.
        """
        found = []
        for sig in self.symbols.values():
            for caps in _splits(sig.template, tuple(items)):
                found.append((sig, caps))
        found.sort(key=lambda m: -m[0].n_words)
        return found


def _splits(template, items):
    def rec(ti, ii):
        if ti == len(template):
            if ii == len(items):
                yield []
            return
        tok = template[ti]
        if tok is SLOT:
            for j in range(len(items), ii, -1):
                for rest in rec(ti + 1, j):
                    yield [items[ii:j]] + rest
        elif ii < len(items) and items[ii] == tok:
            yield from rec(ti + 1, ii + 1)

    return [tuple(c) for c in rec(0, 0)]


def _auto_constants(types, symbols):
    auto = {}
    for decl in sorted(types.values(), key=lambda d: d.name):
        for v in decl.domain or ():
            if isinstance(v, int):
                continue
            if v in auto and auto[v] != decl.name:
                raise ClashingDomainElement(
                    f"domain element {v!r} belongs to both {auto[v]} and {decl.name}")
            if v in symbols:
                raise DuplicateSymbol(f"domain element {v!r} clashes with a symbol")
            auto[v] = decl.name
    return auto


_HEADERS = {
    Kind.GLOSSARY_TYPE: ("name", "type", "values"),
    Kind.GLOSSARY_FUNCTION: ("name", "type"),
    Kind.GLOSSARY_CONSTANT: ("name", "type"),
    Kind.GLOSSARY_RELATION: ("name",),
    Kind.GLOSSARY_BOOLEAN: ("name",),
}


def _check_header(block: TableBlock):
    expected = _HEADERS[block.kind]
    got = tuple(c.strip().lower() for c in block.header_row)
    if got != expected:
        raise MalformedTable(
            f"glossary header must be {', '.join(e.capitalize() for e in expected)}",
            table=block.name, row=block.header_source_row)


def _parse_type_row(block, i, row) -> TypeDecl:
    name, datatype, values = row
    where = dict(table=block.name, row=block.source_row(i))
    if not name or not name[0].isupper() or len(name.split()) != 1:
        raise GlossaryError(f"type name {name!r} must be one capitalized word", **where)
    if name == INT:
        raise GlossaryError(f"{INT!r} is reserved for integer literals", **where)
    dt = datatype.strip().lower()
    if dt in _NUMERIC_DATATYPES:
        numeric = True
    elif dt in _STRING_DATATYPES:
        numeric = False
    else:
        raise UnknownType(f"unsupported data type {datatype!r} (integers and strings only)",
                          **where, column=2)
    values = values.strip()
    if not values:
        return TypeDecl(name, None, numeric, None)
    m = _RANGE_RE.match(values)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise GlossaryError(f"empty range {values!r}", **where, column=3)
        domain = tuple(range(lo, hi + 1))
        return TypeDecl(name, domain, True, domain)
    domain = tuple(parse_value(v) for v in values.split(",") if v.strip())
    if len(set(domain)) != len(domain):
        raise GlossaryError(f"duplicate domain element in {values!r}", **where, column=3)
    all_int = all(isinstance(v, int) for v in domain)
    if numeric and not all_int:
        raise GlossaryError(f"numeric type {name} lists non-numbers", **where, column=3)
    for v in domain:
        if isinstance(v, str) and (len(v.split()) != 1):
            raise GlossaryError(f"domain element {v!r} must be a single word", **where)
    return TypeDecl(name, domain, all_int, domain)


def build_vocabulary(glossary_blocks) -> Vocabulary:
    by_kind = {}
    for block in glossary_blocks:
        if block.kind in by_kind:
            raise DuplicateGlossaryTable(f"second {block.kind.value} table",
                                         table=block.name, row=block.origin + 1)
        by_kind[block.kind] = block
    if Kind.GLOSSARY_TYPE not in by_kind:
        raise MissingTypeTable("the glossary needs a Type table")
    for block in by_kind.values():
        _check_header(block)

    types = {}
    tb = by_kind[Kind.GLOSSARY_TYPE]
    for i, row in enumerate(tb.body):
        decl = _parse_type_row(tb, i, row)
        if decl.name in types:
            raise DuplicateSymbol(f"type {decl.name} declared twice",
                                  table=tb.name, row=tb.source_row(i))
        types[decl.name] = decl

    symbols = {}
    templates = {}
    plan = [(Kind.GLOSSARY_FUNCTION, FUNCTION), (Kind.GLOSSARY_CONSTANT, CONSTANT),
            (Kind.GLOSSARY_RELATION, RELATION), (Kind.GLOSSARY_BOOLEAN, BOOLEAN)]
    for gkind, skind in plan:
        block = by_kind.get(gkind)
        if block is None:
            continue
        for i, row in enumerate(block.body):
            where = dict(table=block.name, row=block.source_row(i))
            desc = row[0]
            try:
                sig = parse_signature(desc, types, skind, existing=set(symbols) | set(types))
            except GlossaryError as exc:
                raise exc.locate(**where, column=1)
            if skind in (FUNCTION, CONSTANT):
                rtype = row[1].strip()
                if rtype not in types:
                    raise UnknownType(f"unknown type {rtype!r}", **where, column=2)
                sig = replace(sig, result_type=rtype)
            key = sig.template
            if key in templates:
                raise DuplicateSymbol(
                    f"{desc!r} has the same template as {templates[key]!r}", **where)
            templates[key] = desc
            symbols[sig.name] = sig
    return Vocabulary(types, symbols, _auto_constants(types, symbols))


def resolve_symbol(phrase: str, vocabulary: Vocabulary):
    """Resolve a phrase to ``(target, argument phrases)``.

    ``target`` is a :class:`Signature` or, for a bare domain element, an
    :class:`Element`.
    """
    words = tuple(phrase.split())
    if not words:
        raise UnresolvedSymbol("empty phrase")
    if len(words) == 1 and words[0] in vocabulary.auto_constants:
        return Element(words[0], vocabulary.auto_constants[words[0]]), []
    found = vocabulary.matches(words)
    if not found:
        raise UnresolvedSymbol(f"no symbol matches {phrase!r}")
    best = found[0][0].n_words
    tied = {sig.name for sig, _ in found if sig.n_words == best}
    if len(tied) > 1:
        raise AmbiguousMatch(f"{phrase!r} matches {', '.join(sorted(tied))}")
    sig, caps = found[0]
    return sig, [" ".join(c) for c in caps]
