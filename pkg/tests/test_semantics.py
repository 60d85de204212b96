# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from itertools import product

import pytest

from src.logic_cs import ConstantSpecification, parse_cs, parse_logic
from src.semantics import (
    ExtractionFailed,
    Model,
    eval,
    extract_candidate_model,
    verify_model,
)
from src.syntax import (
    Evidence,
    F,
    Prop,
    T,
    parse_formula,
    parse_term,
    subformulas,
)

J = parse_logic("J")
EMPTY = ConstantSpecification()


def _model(valuation, evidence, root, cs=EMPTY, terms=None):
    universe = set(subformulas(parse_formula(root)))
    for entry in cs.entries:
        universe |= subformulas(entry)
    pairs = frozenset((parse_term(t), parse_formula(a)) for t, a in evidence)
    names = terms if terms is not None else [t for t, _ in evidence]
    occurring = frozenset(parse_term(t) for t in names)
    return Model(frozenset(valuation), pairs, frozenset(universe), occurring)


def test_eval_matches_truth_tables():
    cases = [
        ("P -> Q", lambda p, q: (not p) or q),
        ("~P -> (P -> Q)", lambda p, q: True),
        ("(P -> Q) -> ~Q -> ~P", lambda p, q: True),
        ("_|_ -> P", lambda p, q: True),
        ("~(P -> P)", lambda p, q: False),
        ("~~Q -> P", lambda p, q: p or not q),
    ]
    for text, expected in cases:
        f = parse_formula(text)
        for p, q in product((False, True), repeat=2):
            valuation = frozenset(name for name, v in (("P", p), ("Q", q)) if v)
            universe = frozenset(subformulas(f))
            model = Model(valuation, frozenset(), universe, frozenset())
            assert eval(model, f) == expected(p, q), (text, p, q)


def test_eval_justifications_read_the_evidence():
    model = _model({"P"}, [("x", "P")], "x:P -> y:P")
    assert eval(model, parse_formula("x:P"))
    assert not eval(model, parse_formula("y:P"))
    assert model.admits(parse_term("x"), Prop("P"))


def test_verify_model_closure():
    root = "x:(P -> Q) -> (y:P -> x*y:Q)"
    model = _model(set(), [("x", "P -> Q"), ("y", "P")], root, terms=["x", "y", "x*y"])
    assert verify_model(model, J, EMPTY) == ["closure: (x*y, Q) is missing"]
    evidence = [("x", "P -> Q"), ("y", "P"), ("x*y", "Q")]
    closed = _model(set(), evidence, root, terms=["x", "y", "x*y"])
    assert verify_model(closed, J, EMPTY) == []


def test_verify_model_sums():
    root = "x:P -> (x+y):P"
    model = _model(set(), [("x", "P")], root, terms=["x", "y", "x+y"])
    assert verify_model(model, J, EMPTY) == ["closure: (x+y, P) is missing"]


def test_verify_model_factivity_and_consistency():
    model = _model(set(), [("x", "P")], "x:P -> P")
    assert verify_model(model, J, EMPTY) == []
    assert verify_model(model, parse_logic("JT"), EMPTY) == [
        "factivity: (x, P) admitted but P is false"
    ]
    bottom = _model(set(), [("x", "_|_")], "x:_|_ -> _|_")
    assert verify_model(bottom, parse_logic("JD"), EMPTY) == [
        "consistency: (x, _|_) admitted"
    ]


def test_verify_model_constant_specification():
    cs = parse_cs("c:(P -> (Q -> P))")
    model = _model(set(), [], "P", cs, terms=["c"])
    assert verify_model(model, J, cs) == [
        "constant specification: (c, P -> (Q -> P)) is missing"
    ]


def test_verify_model_bang():
    root = "x:P -> !x:x:P"
    model = _model(set(), [("x", "P")], root, terms=["x", "!x"])
    assert verify_model(model, parse_logic("J4"), EMPTY) == [
        "closure: (!x, x:P) is missing"
    ]
    assert verify_model(model, J, EMPTY) == []


def test_verify_model_introspection():
    root = "~x:P -> ?x:~x:P"
    model = _model(set(), [], root, terms=["x", "?x"])
    assert verify_model(model, parse_logic("J5"), EMPTY) == [
        "introspection: (?x, ~x:P) is missing"
    ]
    weak = _model(set(), [], "~P -> ??x:~x:P", terms=["x", "??x"])
    assert verify_model(weak, parse_logic("JB"), EMPTY) == [
        "introspection: (??x, ~x:P) is missing"
    ]


def test_extract_model_from_open_branch():
    root = parse_formula("t:P -> P")
    branch = [
        F(root),
        T(parse_formula("t:P")),
        F(Prop("P")),
        T(Evidence(parse_term("t"), Prop("P"))),
    ]

    model = extract_candidate_model(branch, root, J, EMPTY)
    assert model.valuation == frozenset()
    assert model.admits(parse_term("t"), Prop("P"))
    assert not eval(model, root)


def test_extract_model_closes_under_application():
    root = parse_formula("x:(P -> Q) -> (y:P -> x*y:Q)")
    branch = [
        T(Evidence(parse_term("x"), parse_formula("P -> Q"))),
        T(Evidence(parse_term("y"), Prop("P"))),
    ]
    model = extract_candidate_model(branch, root, J, EMPTY)
    assert model.admits(parse_term("x*y"), Prop("Q"))


def test_extract_model_fails_on_forced_refutation():
    root = parse_formula("x:(P -> Q) -> (y:P -> x*y:Q)")
    branch = [
        T(Evidence(parse_term("x"), parse_formula("P -> Q"))),
        T(Evidence(parse_term("y"), Prop("P"))),
        F(Evidence(parse_term("x*y"), Prop("Q"))),
    ]
    with pytest.raises(ExtractionFailed):
        extract_candidate_model(branch, root, J, EMPTY)


def test_extract_model_adds_introspection():
    root = parse_formula("~x:P -> ?x:~x:P")
    branch = [F(Evidence(parse_term("x"), Prop("P")))]
    model = extract_candidate_model(branch, root, parse_logic("J5"), EMPTY)
    assert model.admits(parse_term("?x"), parse_formula("~x:P"))
