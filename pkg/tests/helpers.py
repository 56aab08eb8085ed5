"""Shared builders for test workbooks and random theories."""

from __future__ import annotations

import csv
import io
import itertools
import random
from pathlib import Path

from cdmn import fo
from cdmn.glossary import (BOOLEAN, CONSTANT, FUNCTION, RELATION, Signature,
                           TypeDecl, Vocabulary)
from cdmn.translate import CompiledModel, Task, compile_workbook

MODELS = Path(__file__).resolve().parent.parent / "models"


def model_path(name: str) -> Path:
    return MODELS / f"{name}.cdmn"


def load_model(name: str) -> CompiledModel:
    return compile_workbook(model_path(name).read_bytes())


def workbook(*tables) -> str:
    """Join tables (lists of rows) into CSV text with blank separator lines."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for k, rows in enumerate(tables):
        if k:
            buf.write("\n")
        for row in rows:
            w.writerow(row)
    return buf.getvalue()


def keys(structures):
    return [s.key() for s in structures]


# --- map coloring ------------------------------------------------------------

def coloring_workbook(borders, colors, countries=None, goal="get all models"):
    countries = countries or sorted({c for pair in borders for c in pair})
    by_first = {}
    for a, b in borders:
        by_first.setdefault(a, []).append(b)
    data = [["Borders data table"], ["Country called c1", "Country called c2", "||",
                                     "c1 borders c2"]]
    for a in sorted(by_first):
        data.append([a, ", ".join(by_first[a]), "||", "Yes"])
    return workbook(
        [["Glossary Type"], ["Name", "Type", "Values"],
         ["Country", "string", ", ".join(countries)],
         ["Color", "string", ", ".join(colors)]],
        [["Glossary Function"], ["Name", "Type"], ["color of Country", "Color"]],
        [["Glossary Relation"], ["Name"], ["Country borders Country"]],
        data,
        [["Bordering countries", "E*"],
         ["Country called c1", "Country called c2", "c1 borders c2", "||", "color of c1"],
         ["-", "-", "Yes", "||", "not(color of c2)"]],
        [["Goal"], ["Execute"], [goal]],
    )


TRIANGLE = [("Aland", "Bree"), ("Aland", "Cair"), ("Bree", "Cair")]


# --- charge (sum over a basket) ----------------------------------------------

def charge_workbook(prices: dict, baskets: dict):
    """``prices``: item -> price; ``baskets``: person -> list of items."""
    price_rows = [["Prices data table"], ["Item", "||", "price of Item"]]
    price_rows += [[item, "||", str(p)] for item, p in prices.items()]
    basket_rows = [["Baskets data table"], ["Person called p", "Item called i", "||",
                                            "i in basket of p"]]
    for person, items in baskets.items():
        if items:
            basket_rows.append([person, ", ".join(items), "||", "Yes"])
        else:
            # mention the person so that they belong to the domain
            basket_rows.append([person, next(iter(prices)), "||", "No"])
    return workbook(
        [["Glossary Type"], ["Name", "Type", "Values"],
         ["Person", "string", ""], ["Item", "string", ""],
         ["Price", "int", "[0..9]"], ["Money", "int", "[0..36]"]],
        [["Glossary Function"], ["Name", "Type"],
         ["price of Item", "Price"], ["charge of Person", "Money"]],
        [["Glossary Relation"], ["Name"], ["Item in basket of Person"]],
        price_rows, basket_rows,
        [["Charge", "C+"],
         ["Person", "Item", "Item in basket of Person", "||", "charge of Person"],
         ["-", "-", "Yes", "||", "price of Item"]],
        [["Goal"], ["Execute"], ["get all models"]],
    )


def random_charge_instance(rng: random.Random):
    persons = [f"P{i}" for i in range(rng.randint(1, 4))]
    items = [f"I{i}" for i in range(rng.randint(1, 4))]
    prices = {item: rng.randint(0, 9) for item in items}
    baskets = {p: [i for i in items if rng.random() < 0.5] for p in persons}
    return prices, baskets


# --- invitations (count with deduplication) ----------------------------------

def invitations_workbook(people: dict):
    """``people``: person -> (spouse, is friend, is family)."""
    rows = [["People data table"], ["Person called p", "||", "spouse of p", "p is friend",
                                    "p is family"]]
    for p, (spouse, friend, family) in people.items():
        rows.append([p, "||", spouse, "Yes" if friend else "No", "Yes" if family else "No"])
    return workbook(
        [["Glossary Type"], ["Name", "Type", "Values"],
         ["Person", "string", ""], ["Count", "int", "[0..10]"]],
        [["Glossary Function"], ["Name", "Type"], ["spouse of Person", "Person"]],
        [["Glossary Constant"], ["Name", "Type"], ["NbInvitations", "Count"]],
        [["Glossary Relation"], ["Name"], ["Person is friend"], ["Person is family"]],
        rows,
        [["Invitations", "C#"],
         ["Person called p", "p is friend", "p is family", "||", "NbInvitations"],
         ["-", "Yes", "-", "||", "p"],
         ["-", "-", "Yes", "||", "p"],
         ["-", "-", "Yes", "||", "spouse of p"]],
    )


def random_people(rng: random.Random):
    names = [f"Q{i}" for i in range(rng.randint(1, 5))]
    return {p: (rng.choice(names), rng.random() < 0.4, rng.random() < 0.4) for p in names}


def expected_invitations(people: dict) -> int:
    invited = {p for p, (_, friend, _) in people.items() if friend}
    invited |= {p for p, (_, _, family) in people.items() if family}
    invited |= {s for s, _, family in people.values() if family}
    return len(invited)


# --- random fo theories --------------------------------------------------------

class TheoryGenerator:
    """Random small vocabularies, partial structures and theories.

    Division and min/max over possibly empty sets are left out so that both
    evaluators are total on every candidate structure.
    """

    def __init__(self, rng: random.Random, max_candidates: int = 300):
        self.rng = rng
        self.max_candidates = max_candidates

    def vocabulary(self):
        rng = self.rng
        t_size = rng.randint(1, 3)
        n_size = rng.randint(1, 3)
        t_dom = tuple(f"e{i}" for i in range(t_size))
        n_dom = tuple(range(n_size))
        types = {"T": TypeDecl("T", t_dom, False, t_dom), "N": TypeDecl("N", n_dom, True, n_dom)}
        pool = [
            Signature("c", CONSTANT, ("c",), (), "T"),
            Signature("k", CONSTANT, ("k",), (), "N"),
            Signature("f", FUNCTION, ("f", None), ("T",), "T"),
            Signature("g", FUNCTION, ("g", None), ("T",), "N"),
            Signature("p", RELATION, (None, "p"), ("T",)),
            Signature("r", RELATION, (None, "r", None), ("T", "T")),
            Signature("q", BOOLEAN, ("q",), ()),
        ]
        chosen = rng.sample(pool, rng.randint(1, 4))
        return Vocabulary(types, {s.name: s for s in chosen}, {e: "T" for e in t_dom})

    def data(self, vocab):
        """Interpret a random subset of the symbols."""
        rng = self.rng
        doms = {name: decl.domain for name, decl in vocab.types.items()}
        functions, relations = {}, {}
        for sig in vocab.symbols.values():
            if rng.random() > 0.3:
                continue
            tuples = list(itertools.product(*(doms[t] for t in sig.arg_types)))
            if sig.is_term:
                functions[sig.name] = {a: rng.choice(doms[sig.result_type]) for a in tuples}
            else:
                relations[sig.name] = frozenset(a for a in tuples if rng.random() < 0.5)
        return fo.Structure(doms, functions, relations)

    def term(self, vocab, env, want, depth):
        """A term of type ``want`` ('T' or 'N')."""
        rng = self.rng
        options = []
        vars_ = [v for v in env if v.type == want]
        if vars_:
            options.append(lambda: rng.choice(vars_))
        if want == "T":
            options.append(lambda: fo.Value(rng.choice(vocab.types["T"].domain)))
        else:
            options.append(lambda: fo.Value(rng.randint(-1, 3)))
        for sig in vocab.symbols.values():
            if sig.is_term and sig.result_type == want:
                options.append(lambda sig=sig: fo.App(
                    sig.name, tuple(self.term(vocab, env, t, depth - 1) for t in sig.arg_types)))
        if want == "N" and depth > 0:
            options.append(lambda: fo.Arith(rng.choice(["+", "-", "*"]),
                                            self.term(vocab, env, "N", depth - 1),
                                            self.term(vocab, env, "N", depth - 1)))
            options.append(lambda: self.aggregate(vocab, env, depth - 1))
        return rng.choice(options)()

    def aggregate(self, vocab, env, depth):
        rng = self.rng
        x = fo.Var(f"a{len(env)}", "T")
        inner = env + [x]
        kind = rng.choice(["sum", "card", "min", "max"])
        if kind == "card":
            return fo.card_agg((x,), self.formula(vocab, inner, depth))
        branches = [(self.formula(vocab, inner, depth), self.term(vocab, inner, "N", depth))]
        if kind in ("min", "max"):
            # a branch that always applies keeps the set nonempty
            branches.append((fo.TRUE, self.term(vocab, inner, "N", depth)))
        return fo.Agg(kind, (x,), tuple(branches))

    def atom(self, vocab, env, depth):
        rng = self.rng
        options = []
        for sig in vocab.symbols.values():
            if not sig.is_term:
                options.append(lambda sig=sig: fo.Pred(
                    sig.name, tuple(self.term(vocab, env, t, depth) for t in sig.arg_types)))
        options.append(lambda: fo.Cmp(rng.choice(["=", "≠"]), self.term(vocab, env, "T", depth),
                                      self.term(vocab, env, "T", depth)))
        options.append(lambda: fo.Cmp(rng.choice(fo.CMP_OPS), self.term(vocab, env, "N", depth),
                                      self.term(vocab, env, "N", depth)))
        return rng.choice(options)()

    def formula(self, vocab, env, depth):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.3:
            return self.atom(vocab, env, 0)
        choice = rng.randrange(6)
        sub = lambda: self.formula(vocab, env, depth - 1)
        if choice == 0:
            return fo.Not(sub())
        if choice == 1:
            return fo.And((sub(), sub()))
        if choice == 2:
            return fo.Or((sub(), sub()))
        if choice == 3:
            return fo.Implies(sub(), sub())
        x = fo.Var(f"v{len(env)}", rng.choice(["T", "T", "N"]))
        body = self.formula(vocab, env + [x], depth - 1)
        return fo.Forall((x,), body) if choice == 4 else fo.Exists((x,), body)

    def model(self) -> CompiledModel:
        """A random compiled model whose oracle space stays small."""
        while True:
            vocab = self.vocabulary()
            structure = self.data(vocab)
            nullable = frozenset(s.name for s in vocab.symbols.values()
                                 if s.is_term and self.rng.random() < 0.2)
            sentences = tuple(self.formula(vocab, [], 3)
                              for _ in range(self.rng.randint(1, 3)))
            task = Task.expand(None)
            model = CompiledModel(vocab, fo.Theory(sentences, ()), structure, task,
                                  {}, nullable)
            size = 1
            for _, dom in model.cells():
                size *= len(dom)
            if size <= self.max_candidates:
                return model


# --- expected translations of the bundled models -------------------------------

def _app(sym, *args):
    return fo.App(sym, tuple(args))


def _pred(sym, *args):
    return fo.Pred(sym, tuple(args))


def _golden_adult():
    age, adult = _app("Age_of_Person"), _app("Person_is_Adult")
    return fo.And((
        fo.Implies(fo.Cmp("≥", age, fo.Value(18)), fo.Cmp("=", adult, fo.Value("Yes"))),
        fo.Implies(fo.Cmp("<", age, fo.Value(18)), fo.Cmp("=", adult, fo.Value("No")))))


def _golden_maxshift():
    x, y = fo.Var("x", "Doctor"), fo.Var("y", "Day")
    return fo.Forall((x, y), fo.Cmp("≤", _app("nb_shifts_of_Doctor_on_Day", x, y), fo.Value(1)))


def _golden_map():
    c1, c2 = fo.Var("c1", "Country"), fo.Var("c2", "Country")
    return fo.Forall((c1, c2), fo.Implies(
        _pred("Country_borders_Country", c1, c2),
        fo.Cmp("≠", _app("color_of_Country", c1), _app("color_of_Country", c2))))


def _golden_multihit():
    p, y = fo.Var("p", "Person"), fo.Var("y", "Item")
    return fo.Forall((p,), fo.Cmp("=", _app("charge_of_Person", p), fo.sum_agg(
        (y,), _pred("Item_in_basket_of_Person", y, p), _app("price_of_Item", y))))


def _golden_invitations():
    x, p = fo.Var("x", "Person"), fo.Var("p", "Person")
    body = fo.Or((
        fo.And((fo.Cmp("=", x, p), _pred("Person_is_friend", p))),
        fo.And((fo.Cmp("=", x, p), _pred("Person_is_family", p))),
        fo.And((fo.Cmp("=", x, _app("spouse_of_Person", p)), _pred("Person_is_family", p))),
    ))
    return fo.Cmp("=", _app("NbInvitations"), fo.card_agg((x,), fo.Exists((p,), body)))


# model name -> builder of the single sentence its tables should compile to
GOLDENS = {
    "adult": _golden_adult,
    "maxshift": _golden_maxshift,
    "map_coloring": _golden_map,
    "multihit": _golden_multihit,
    "invitations": _golden_invitations,
}
