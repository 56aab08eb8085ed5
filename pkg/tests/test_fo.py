import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdmn import fo
from cdmn.errors import (DivisionByZero, InexactDivision, MinMaxOfEmptySet, TypeMismatch,
                         UninterpretedSymbol)
from cdmn.fo import NULL
from helpers import TheoryGenerator

x, y = fo.Var("x", "T"), fo.Var("y", "T")
n = fo.Var("n", "N")
S = fo.Structure(
    domains={"T": ("a", "b", "c"), "N": (0, 1, 2)},
    functions={"f": {("a",): "b", ("b",): "c", ("c",): "a"},
               "g": {("a",): 2, ("b",): 0, ("c",): NULL},
               "k": {(): 1}},
    relations={"p": frozenset({("a",), ("c",)}), "q": frozenset({()})},
)


def ev(f, env=None):
    return fo.eval_formula(f, S, env)


def et(t, env=None):
    return fo.eval_term(t, S, env)


def V(v):
    return fo.Value(v)


# --- primitives ----------------------------------------------------------------

def test_integer_division_is_exact():
    assert fo.arith("/", 6, 3) == 2
    assert fo.arith("/", -6, 3) == -2
    with pytest.raises(InexactDivision):
        fo.arith("/", 7, 2)
    with pytest.raises(DivisionByZero):
        fo.arith("/", 1, 0)


def test_null_propagation():
    assert fo.arith("+", NULL, 1) is NULL
    assert fo.arith("/", NULL, 0) is NULL
    assert fo.compare("<", NULL, 3) is False
    assert fo.compare("≥", 3, NULL) is False
    assert fo.compare("=", NULL, NULL) is True
    assert fo.compare("≠", NULL, 3) is True
    assert fo.aggregate("sum", [1, NULL]) is NULL
    assert fo.aggregate("card", [NULL, 1]) == 2


def test_aggregate_edges():
    assert fo.aggregate("sum", []) == 0
    assert fo.aggregate("card", []) == 0
    assert fo.aggregate("min", [3, 1, 2]) == 1
    with pytest.raises(MinMaxOfEmptySet):
        fo.aggregate("max", [])


# --- evaluation ----------------------------------------------------------------

def test_eval_terms_and_atoms():
    assert et(fo.App("f", (fo.App("f", (V("a"),)),))) == "c"
    assert et(fo.App("g", (fo.App("f", (V("b"),)),))) is NULL
    assert et(fo.App("g", (V(NULL),))) is NULL
    assert ev(fo.Pred("p", (V(NULL),))) is False
    assert ev(fo.Pred("q", ())) is True
    assert et(fo.Arith("*", fo.App("k", ()), V(5))) == 5


def test_quantifiers():
    assert ev(fo.Forall((x,), fo.Cmp("≠", fo.App("f", (x,)), x)))
    assert ev(fo.Exists((x,), fo.Cmp("=", fo.App("g", (x,)), V(2))))
    assert not ev(fo.Forall((x,), fo.Pred("p", (x,))))
    # g(c) is null, so the ordering comparison fails for c
    assert not ev(fo.Forall((x,), fo.Cmp("≥", fo.App("g", (x,)), V(0))))


def test_aggregates():
    total = fo.sum_agg((x,), fo.Pred("p", (x,)), fo.App("g", (x,)))
    assert et(total) is NULL  # g(c) is null and p(c) holds
    only_a = fo.sum_agg((x,), fo.Cmp("=", x, V("a")), fo.App("g", (x,)))
    assert et(only_a) == 2
    assert et(fo.card_agg((x,), fo.Pred("p", (x,)))) == 2
    two = fo.Agg("max", (x,), ((fo.Pred("p", (x,)), V(4)), (fo.Cmp("=", x, V("b")), V(7))))
    assert et(two) == 7
    with pytest.raises(MinMaxOfEmptySet):
        et(fo.Agg("min", (x,), ((fo.FALSE, V(1)),)))


def test_uninterpreted_symbol():
    with pytest.raises(UninterpretedSymbol):
        et(fo.App("h", (V("a"),)))
    with pytest.raises(UninterpretedSymbol):
        ev(fo.Forall((fo.Var("z", "Missing"),), fo.TRUE))


def test_implication_short_circuits():
    bad = fo.Cmp("=", fo.Arith("/", V(1), V(0)), V(1))
    assert ev(fo.Implies(fo.FALSE, bad))


# --- constructors and syntax utilities -----------------------------------------

def test_smart_constructors():
    a, b = fo.Pred("p", (x,)), fo.Pred("q", ())
    assert fo.conj([fo.TRUE, a]) == a
    assert fo.conj([a, fo.FALSE]) == fo.FALSE
    assert fo.conj([fo.And((a, b)), a]) == fo.And((a, b, a))
    assert fo.disj([fo.FALSE]) == fo.FALSE
    assert fo.disj([a, fo.TRUE]) == fo.TRUE
    assert fo.neg(fo.neg(a)) == a
    assert fo.implies(fo.TRUE, a) == a
    assert fo.implies(fo.FALSE, a) == fo.TRUE
    assert fo.forall((), a) == a


def test_free_vars_and_substitute():
    f = fo.Forall((x,), fo.Cmp("=", fo.App("f", (x,)), y))
    assert fo.free_vars(f) == {y}
    g = fo.substitute(f, {"y": V("a"), "x": V("b")})
    assert fo.free_vars(g) == set()
    assert g.body == fo.Cmp("=", fo.App("f", (x,)), V("a"))
    assert fo.symbols_of(f) == {"f"}


def test_canonical_alpha_and_order():
    a = fo.Forall((x, y), fo.And((fo.Pred("p", (x,)), fo.Cmp("=", fo.App("f", (x,)), y))))
    u, w = fo.Var("u", "T"), fo.Var("w", "T")
    b = fo.Forall((u, w), fo.And((fo.Cmp("=", fo.App("f", (u,)), w), fo.Pred("p", (u,)))))
    assert fo.canonical(a) == fo.canonical(b)
    c = fo.Forall((u, w), fo.Cmp("=", fo.App("f", (w,)), u))
    assert fo.canonical(c) != fo.canonical(b)


def test_render():
    f = fo.Forall((x,), fo.Implies(fo.Pred("p", (x,)),
                                   fo.Cmp("=", fo.card_agg((y,), fo.Pred("p", (y,))), V(2))))
    assert fo.render(f) == "∀x[T]: p(x) ⇒ #{y[T]: p(y)} = 2"
    s = fo.sum_agg((y,), fo.Pred("p", (y,)), fo.App("g", (y,)))
    assert fo.render(s) == "sum{y[T]: p(y): g(y)}"
    assert fo.render(fo.Not(fo.Cmp("=", x, V(NULL)))) == "¬(x = null)"


def test_structure_key_ignores_insertion_order():
    a = S.extend({"h": {("a",): 1, ("b",): 2}})
    b = S.extend({"h": {("b",): 2, ("a",): 1}})
    assert a.key() == b.key()
    assert a.key() != S.extend({"h": {("a",): 2, ("b",): 1}}).key()


def test_type_checking():
    from cdmn.glossary import FUNCTION, Signature, TypeDecl, Vocabulary
    vocab = Vocabulary(
        {"T": TypeDecl("T", ("a", "b"), False, ("a", "b")), "N": TypeDecl("N", (0, 1), True, (0, 1))},
        {"g": Signature("g", FUNCTION, ("g", None), ("T",), "N")},
        {"a": "T", "b": "T"})
    fo.check_formula(fo.Cmp("≤", fo.App("g", (V("a"),)), V(1)), vocab)
    with pytest.raises(TypeMismatch):
        fo.check_formula(fo.Cmp("=", fo.App("g", (V("a"),)), V("b")), vocab)
    with pytest.raises(TypeMismatch):
        fo.term_type(fo.App("g", (V(1),)), vocab)
    with pytest.raises(TypeMismatch):
        fo.check_formula(fo.Cmp("<", V("a"), V("b")), vocab)


# --- property: evaluation agrees with substitution ----------------------------

def ref_term(t, s):
    """Closed-term evaluator written independently of the library's."""
    if isinstance(t, fo.Value):
        return t.value
    if isinstance(t, fo.App):
        args = tuple(ref_term(a, s) for a in t.args)
        if NULL in args:
            return NULL
        return s.functions[t.symbol][args]
    if isinstance(t, fo.Arith):
        l, r = ref_term(t.left, s), ref_term(t.right, s)
        if l is NULL or r is NULL:
            return NULL
        return {"+": l + r, "-": l - r, "*": l * r}[t.op]
    if isinstance(t, fo.Agg):
        vals = []
        for combo in itertools.product(*(s.domains[v.type] for v in t.vars)):
            m = {v.name: fo.Value(c) for v, c in zip(t.vars, combo)}
            for cond, sub in t.branches:
                if ref_formula(fo.substitute(cond, m), s):
                    vals.append(1 if sub is None else ref_term(fo.substitute(sub, m), s))
        if t.kind == "card":
            return len(vals)
        if NULL in vals:
            return NULL
        return {"sum": sum, "min": min, "max": max}[t.kind](vals)
    raise AssertionError(t)


def ref_formula(f, s):
    if isinstance(f, fo.Bool):
        return f.value
    if isinstance(f, fo.Pred):
        args = tuple(ref_term(a, s) for a in f.args)
        return NULL not in args and args in s.relations[f.symbol]
    if isinstance(f, fo.Cmp):
        l, r = ref_term(f.left, s), ref_term(f.right, s)
        if f.op == "=":
            return l == r
        if f.op == "≠":
            return not l == r
        if l is NULL or r is NULL:
            return False
        return {"≤": l <= r, "≥": l >= r, "<": l < r, ">": l > r}[f.op]
    if isinstance(f, fo.Not):
        return not ref_formula(f.body, s)
    if isinstance(f, fo.And):
        return all(ref_formula(p, s) for p in f.parts)
    if isinstance(f, fo.Or):
        return any(ref_formula(p, s) for p in f.parts)
    if isinstance(f, fo.Implies):
        return not ref_formula(f.ante, s) or ref_formula(f.cons, s)
    combos = itertools.product(*(s.domains[v.type] for v in f.vars))
    results = (ref_formula(fo.substitute(f.body, {v.name: fo.Value(c)
                                                  for v, c in zip(f.vars, combo)}), s)
               for combo in combos)
    return all(results) if isinstance(f, fo.Forall) else any(results)


def random_total_structure(model, rng):
    assignment = {cell: rng.choice(dom) for cell, dom in model.cells()}
    return model.structure_from(assignment)


@settings(max_examples=600, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_eval_agrees_with_substitution(seed):
    rng = random.Random(seed)
    model = TheoryGenerator(rng).model()
    s = random_total_structure(model, rng)
    for sentence in model.theory.sentences:
        assert fo.eval_formula(sentence, s) == ref_formula(sentence, s)
