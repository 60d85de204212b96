# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from pathlib import Path

import pytest

from src.cutelim import (
    CutEliminator,
    HilbertProof,
    MalformedCut,
    ResourceExhausted,
    Subtree,
    cut_step_trace,
    eliminate_cuts,
    find_minimal_cut,
    hilbert_to_tableau,
    load_hilbert,
    parse_hilbert,
    rank,
    to_subtree,
    to_tableau,
    validate_hilbert,
)
from src.engine import InvalidProof, Rule, audit_subformula_property, check_proof, prove
from src.logic_cs import ConstantSpecification, parse_cs, parse_logic
from src.oracle import random_hilbert_proof
from src.syntax import Evidence, F, T, parse_formula, parse_term

J = parse_logic("J")
EMPTY = ConstantSpecification()

MP_PROOF = """
# weakening P -> P out of two tautologies
1. P -> (Q -> P) [Taut]
2. (P -> (Q -> P)) -> (P -> P) [Taut]
3. P -> P [MP 1 2]
"""

EXAMPLE_PROOF = """
1. c:(P -> (Q -> P)) [IAN]
2. c:(P -> (Q -> P)) -> (x:P -> c*x:(Q -> P)) [jK]
3. x:P -> c*x:(Q -> P) [MP 1 2]
"""
EXAMPLE_CS = parse_cs("c:(P -> (Q -> P))")


def test_rank():
    assert rank(parse_formula("P")) == 0
    assert rank(parse_formula("P -> Q")) == 1
    assert rank(parse_formula("~P")) == 1
    assert rank(parse_formula("x:P")) == 1
    assert rank(parse_term("!x")) == 1
    assert rank(Evidence(parse_term("x"), parse_formula("P"))) == 0
    assert rank(Evidence(parse_term("c*x"), parse_formula("Q -> P"))) == 2


def test_parse_hilbert():
    hp = parse_hilbert(MP_PROOF)
    assert len(hp) == 3
    assert hp.lines[2].justification == "MP"
    assert hp.lines[2].refs == (0, 1)
    assert hp.render().splitlines()[2] == "3. P -> P [MP 1 2]"
    assert parse_hilbert(hp.render()) == hp


@pytest.mark.parametrize(
    "text",
    [
        "",
        "1. P -> P",
        "2. P -> (Q -> P) [Taut]",
        "1. P -> [Taut]",
        "1. P -> P [MP 1]",
        "1. P -> P [Magic]",
    ],
)
def test_parse_hilbert_rejects(text):
    with pytest.raises(InvalidProof):
        parse_hilbert(text)


@pytest.mark.parametrize(
    "text, cs",
    [
        ("1. P -> Q [Taut]", EMPTY),
        ("1. x:P -> P [jT]", EMPTY),
        ("1. c:(P -> (Q -> P)) [IAN]", EMPTY),
        ("1. P -> (Q -> P) [Taut]\n2. P -> P [MP 1 3]", EMPTY),
        ("1. P -> (Q -> P) [Taut]\n2. P -> (Q -> P) [Taut]\n3. Q -> P [MP 1 2]", EMPTY),
        ("1. x:P -> !x:x:P [j4]", EMPTY),
    ],
)
def test_validate_hilbert_rejects(text, cs):
    with pytest.raises(InvalidProof):
        validate_hilbert(parse_hilbert(text), J, cs)


def test_compile_mp_uses_two_cuts():
    hp = parse_hilbert(MP_PROOF)
    tableau = hilbert_to_tableau(hp, 2, J, EMPTY)
    cuts = [n for n in tableau.nodes.values() if n.rule == Rule.CUT]
    assert len(cuts) == 4
    assert tableau.nodes[0].rule == Rule.ROOT
    assert tableau.scope == (
        parse_formula("P -> (Q -> P)"),
        parse_formula("(P -> (Q -> P)) -> (P -> P)"),
    )
    assert find_minimal_cut(tableau) is not None


def test_eliminate_cuts_on_the_mp_proof():
    hp = parse_hilbert(MP_PROOF)
    tableau = hilbert_to_tableau(hp, 2, J, EMPTY)
    eliminator = CutEliminator(tableau, J, EMPTY, verify_each_step=True)
    result = eliminator.run()
    goal = parse_formula("P -> P")
    assert result.is_cut_free()
    assert find_minimal_cut(result) is None
    assert check_proof(result, goal, J, EMPTY, result.scope)
    assert len(eliminator.trace) >= 2
    assert all(entry.decreases for entry in eliminator.trace)


def test_worked_example_through_hilbert():
    hp = parse_hilbert(EXAMPLE_PROOF)
    tableau = hilbert_to_tableau(hp, 2, J, EXAMPLE_CS)
    result = eliminate_cuts(tableau, J, EXAMPLE_CS)
    goal = parse_formula("x:P -> c*x:(Q -> P)")
    assert result.is_cut_free()
    assert check_proof(result, goal, J, EXAMPLE_CS, result.scope)
    assert audit_subformula_property(result, goal, EXAMPLE_CS, result.scope)
    assert any(n.rule == Rule.PB for n in result.nodes.values())


def test_ian_line_is_a_one_node_proof():
    hp = parse_hilbert("1. c:(P -> (Q -> P)) [IAN]")
    tableau = hilbert_to_tableau(hp, 0, J, EXAMPLE_CS)
    assert tableau.size == 1
    result = eliminate_cuts(tableau, J, EXAMPLE_CS)
    assert result.size == 1
    assert check_proof(result, parse_formula("c:(P -> (Q -> P))"), J, EXAMPLE_CS)


def test_axiom_line_compiles_without_cuts():
    hp = parse_hilbert("1. x:P -> (x+y):P [Sum]")
    tableau = hilbert_to_tableau(hp, 0, J, EMPTY)
    assert tableau.is_cut_free()
    assert cut_step_trace(tableau, J, EMPTY) == []


def test_goal_index_out_of_range():
    with pytest.raises(InvalidProof):
        hilbert_to_tableau(parse_hilbert(MP_PROOF), 5, J, EMPTY)


def test_elimination_needs_a_closed_tableau():
    compiled = hilbert_to_tableau(parse_hilbert(MP_PROOF), 2, J, EMPTY)
    open_tableau = to_tableau(to_subtree(compiled).children[0])
    with pytest.raises(InvalidProof):
        eliminate_cuts(open_tableau, J, EMPTY)


def test_step_budget():
    tableau = hilbert_to_tableau(parse_hilbert(MP_PROOF), 2, J, EMPTY)
    with pytest.raises(ResourceExhausted):
        eliminate_cuts(tableau, J, EMPTY, max_steps=1)


def test_subtree_round_trip_keeps_premises():
    proof = prove(parse_formula("x:P -> c*x:(Q -> P)"), J, EXAMPLE_CS).proof
    rebuilt = to_tableau(to_subtree(proof))
    assert rebuilt.size == proof.size
    assert sorted(n.rule for n in rebuilt.nodes.values()) == sorted(
        n.rule for n in proof.nodes.values()
    )
    assert check_proof(rebuilt, parse_formula("x:P -> c*x:(Q -> P)"), J, EXAMPLE_CS)


def test_non_complementary_cut_is_malformed():
    goal = parse_formula("P -> P")
    heads = (Subtree(T(goal), Rule.CUT), Subtree(T(goal), Rule.CUT))
    tree = Subtree(F(goal), Rule.ROOT, (), heads)
    with pytest.raises(MalformedCut):
        eliminate_cuts(to_tableau(tree), J, EMPTY)


def test_load_hilbert(temp_dir):
    path = Path(temp_dir) / "mp.hilbert"
    with open(path, "w", encoding="utf-8") as f:
        f.write(MP_PROOF)
    assert isinstance(load_hilbert(path), HilbertProof)


@pytest.mark.corpus
@pytest.mark.parametrize("seed", range(100))
def test_generated_hilbert_proofs(seed):
    logic = parse_logic(["J", "JT", "J4", "JT4"][seed % 4])
    hp, cs = random_hilbert_proof(seed, logic)
    assert len(hp) <= 8
    goal = hp.lines[-1].formula
    tableau = hilbert_to_tableau(hp, len(hp) - 1, logic, cs)
    eliminator = CutEliminator(tableau, logic, cs)
    result = eliminator.run()
    assert result.is_cut_free()
    assert check_proof(result, goal, logic, cs, result.scope)
    assert audit_subformula_property(result, goal, cs, result.scope)
    assert all(entry.decreases for entry in eliminator.trace)


def _cut_below(goal: str, first: str, heads: tuple[Subtree, Subtree]) -> Subtree:
    """F goal, T first, F R -> R from (F->), then a cut with the given heads."""
    g, rr = parse_formula(goal), F(parse_formula("R -> R"))
    below = Subtree(rr, Rule.F_IMP, (F(g),), heads)
    head = Subtree(T(parse_formula(first)), Rule.F_IMP, (F(g),), (below,))
    return Subtree(F(g), Rule.ROOT, (), (head,))



def _r_closes() -> tuple[Subtree, ...]:
    rr = F(parse_formula("R -> R"))
    r = parse_formula("R")
    return (Subtree(T(r), Rule.F_IMP, (rr,), (Subtree(F(r), Rule.F_IMP, (rr,)),)),)


def test_cut_head_closing_against_its_negation():
    goal = "~P -> (R -> R)"
    p = parse_formula("P")
    heads = (Subtree(T(p), Rule.CUT), Subtree(F(p), Rule.CUT, (), _r_closes()))
    tableau = to_tableau(_cut_below(goal, "~P", heads))
    eliminator = CutEliminator(tableau, J, EMPTY)
    result = eliminator.run()
    assert [entry.case for entry in eliminator.trace] == ["I.neg"]
    assert result.is_cut_free()
    assert any(n.rule == Rule.T_NEG for n in result.nodes.values())
    assert check_proof(result, parse_formula(goal), J, EMPTY)


def test_cut_head_negating_a_formula_on_the_branch():
    goal = "P -> (R -> R)"
    p, not_p = parse_formula("P"), parse_formula("~P")
    decomposed = (Subtree(T(p), Rule.F_NEG, (F(not_p),), _r_closes()),)
    heads = (Subtree(T(not_p), Rule.CUT), Subtree(F(not_p), Rule.CUT, (), decomposed))
    tableau = to_tableau(_cut_below(goal, "P", heads))
    eliminator = CutEliminator(tableau, J, EMPTY)
    result = eliminator.run()
    assert [entry.case for entry in eliminator.trace] == ["I.neg"]
    assert result.size == 5
    assert not any(n.rule == Rule.F_NEG for n in result.nodes.values())
    assert check_proof(result, parse_formula(goal), J, EMPTY)


CONTRAPOSITION_PROOF = """
1. P -> (Q -> P) [Taut]
2. (P -> (Q -> P)) -> (~(Q -> P) -> ~P) [Taut]
3. ~(Q -> P) -> ~P [MP 1 2]
"""

COMPOSITION_PROOF = """
1. P -> ~~P [Taut]
2. ~~P -> (Q -> ~~P) [Taut]
3. (P -> ~~P) -> ((~~P -> (Q -> ~~P)) -> (P -> (Q -> ~~P))) [Taut]
4. (~~P -> (Q -> ~~P)) -> (P -> (Q -> ~~P)) [MP 1 3]
5. P -> (Q -> ~~P) [MP 2 4]
"""

FACTIVE_SUM_PROOF = """
1. c:(P -> (Q -> P)) [IAN]
2. c:(P -> (Q -> P)) -> (c+x):(P -> (Q -> P)) [Sum]
3. (c+x):(P -> (Q -> P)) [MP 1 2]
4. (c+x):(P -> (Q -> P)) -> (P -> (Q -> P)) [jT]
5. P -> (Q -> P) [MP 3 4]
"""


@pytest.mark.parametrize(
    "text, logic_name, cs",
    [
        (CONTRAPOSITION_PROOF, "J", EMPTY),
        (COMPOSITION_PROOF, "J", EMPTY),
        (FACTIVE_SUM_PROOF, "JT", EXAMPLE_CS),
    ],
)
def test_varied_major_premises(text, logic_name, cs):
    logic = parse_logic(logic_name)
    hp = parse_hilbert(text)
    validate_hilbert(hp, logic, cs)
    goal = hp.lines[-1].formula
    result = eliminate_cuts(hilbert_to_tableau(hp, len(hp) - 1, logic, cs), logic, cs)
    assert result.is_cut_free()
    assert check_proof(result, goal, logic, cs, result.scope)
    assert audit_subformula_property(result, goal, cs, result.scope)
