# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

import random
import time

import pytest

from src.engine import (
    CheckResult,
    IllegalApplication,
    Invalid,
    Limits,
    Node,
    ResourceOut,
    Rule,
    RuleInstance,
    Tableau,
    Valid,
    applicable_rules,
    apply_rule,
    audit_subformula_property,
    check_proof,
    closure_status,
    initial_tableau,
    prove,
    search,
)
from src.logic_cs import ConfigError, ConstantSpecification, parse_cs, parse_logic
from src.oracle import random_axiom_instance
from src.semantics import eval, verify_model
from src.syntax import (
    Evidence,
    F,
    Neg,
    Prop,
    T,
    parse_formula,
    parse_term,
    render_formula,
)

J = parse_logic("J")
EXAMPLE_GOAL = parse_formula("x:P -> c*x:(Q -> P)")
EXAMPLE_CS = parse_cs("c:(P -> (Q -> P))")


def _rules(tableau: Tableau) -> list[str]:
    return [tableau.nodes[i].rule.value for i in sorted(tableau.nodes)]


def test_worked_example():
    verdict = prove(EXAMPLE_GOAL, J, EXAMPLE_CS)
    assert isinstance(verdict, Valid)
    proof = verdict.proof
    assert proof.is_cut_free()
    assert _rules(proof) == ["root", "F->", "F->", "Te", "Fe", "PB", "PB", "Te", "."]
    assert len(proof.leaves()) == 2
    assert check_proof(proof, EXAMPLE_GOAL, J, EXAMPLE_CS)
    assert audit_subformula_property(proof, EXAMPLE_GOAL, EXAMPLE_CS)


def test_worked_example_closures():
    proof = prove(EXAMPLE_GOAL, J, EXAMPLE_CS).proof
    reasons = sorted(proof.closures[leaf].reason for leaf in proof.leaves())
    assert reasons == ["cs", "evidential-pair"]


def test_worked_example_is_fast():
    started = time.monotonic()
    prove(EXAMPLE_GOAL, J, EXAMPLE_CS)
    assert time.monotonic() - started < 1.0


def test_worked_example_needs_the_cs():
    verdict = prove(EXAMPLE_GOAL, J, ConstantSpecification())
    assert isinstance(verdict, Invalid)


AXIOM_CORPUS = [
    ("J", "P -> (Q -> P)"),
    ("J", "(P -> (Q -> R)) -> ((P -> Q) -> (P -> R))"),
    ("J", "(~Q -> ~P) -> ((~Q -> P) -> Q)"),
    ("J", "x:P -> (x+y):P"),
    ("J", "y:P -> (x+y):P"),
    ("J", "x:(P -> Q) -> (y:P -> x*y:Q)"),
    ("J", "x:(P -> ~Q) -> (c:P -> x*c:~Q)"),
    ("JT", "x:P -> P"),
    ("JT", "(x+y):(P -> Q) -> (P -> Q)"),
    ("JD", "x:_|_ -> _|_"),
    ("J4", "x:P -> !x:x:P"),
    ("J4", "(x*y):Q -> !(x*y):(x*y):Q"),
    ("JB", "~P -> ??x:~x:P"),
    ("J5", "~x:P -> ?x:~x:P"),
    ("JT4", "x:P -> P"),
    ("JT4", "x:P -> !x:x:P"),
    ("JT45", "~x:P -> ?x:~x:P"),
    ("JDB", "~Q -> ??y:~y:Q"),
]


@pytest.mark.parametrize("logic_name, text", AXIOM_CORPUS)
def test_axioms_are_provable(logic_name, text):
    logic = parse_logic(logic_name)
    goal = parse_formula(text)
    cs = ConstantSpecification()
    verdict = prove(goal, logic, cs)
    assert isinstance(verdict, Valid)
    assert not any(n.rule in (Rule.PB, Rule.PBE) for n in verdict.proof.nodes.values())
    assert check_proof(verdict.proof, goal, logic, cs)
    assert audit_subformula_property(verdict.proof, goal, cs)


AXIOM_LOGICS = ["J", "JT", "JD", "J4", "JB", "J5", "JT4", "JT45"]
SCHEME_CASES = [
    (name, scheme) for name in AXIOM_LOGICS for scheme in parse_logic(name).schemes()
]


def _instances(logic_name: str, scheme: str, count: int = 6) -> list:
    rng = random.Random(f"{logic_name}/{scheme}")
    return [random_axiom_instance(rng, scheme) for _ in range(count)]


@pytest.mark.parametrize("logic_name, scheme", SCHEME_CASES)
def test_axiom_instances_are_provable(logic_name, scheme):
    logic = parse_logic(logic_name)
    cs = ConstantSpecification()
    for goal in _instances(logic_name, scheme):
        started = time.monotonic()
        verdict = prove(goal, logic, cs)
        assert time.monotonic() - started < 1.0
        assert isinstance(verdict, Valid), render_formula(goal)
        assert verdict.proof.is_cut_free()
        assert check_proof(verdict.proof, goal, logic, cs)
        assert audit_subformula_property(verdict.proof, goal, cs)


@pytest.mark.parametrize(
    "logic_name, text",
    [
        ("J", "P -> t:P"),
        ("J", "t:P -> P"),
        ("J", "t:_|_ -> _|_"),
        ("J4", "t:P -> P"),
        ("JT4", "P -> t:P"),
        ("JT", "t:P -> t:t:P"),
    ],
)
def test_non_theorems_have_countermodels(logic_name, text):
    logic = parse_logic(logic_name)
    goal = parse_formula(text)
    cs = ConstantSpecification()
    verdict = prove(goal, logic, cs)
    assert isinstance(verdict, Invalid)
    assert verdict.model is not None
    assert verify_model(verdict.model, logic, cs) == []
    assert not eval(verdict.model, goal)


def test_countermodel_for_p_implies_t_p():
    verdict = prove(parse_formula("P -> t:P"), J, ConstantSpecification())
    assert verdict.model.valuation == {"P"}
    assert verdict.model.evidence == frozenset()


def test_bang_outside_the_signature():
    goal = parse_formula("t:P -> !t:t:P")
    jt = parse_logic("JT")
    with pytest.raises(ConfigError):
        prove(goal, jt, ConstantSpecification())
    verdict = search([F(goal)], jt, ConstantSpecification())
    assert isinstance(verdict, Invalid)
    assert verdict.model is not None
    assert not eval(verdict.model, goal)


def test_prove_rejects_invalid_cs():
    with pytest.raises(ConfigError):
        prove(EXAMPLE_GOAL, J, parse_cs("c:(x:P -> P)"))


def test_without_bivalence_the_example_stays_open():
    verdict = search([F(EXAMPLE_GOAL)], J, EXAMPLE_CS, bivalence=False)
    assert isinstance(verdict, Invalid)
    assert verdict.model is None
    assert verdict.note == "open branch without bivalence"


def test_node_budget():
    goal = parse_formula("(x:P -> y:Q) -> (x+y):(P -> Q)")
    verdict = prove(goal, J, ConstantSpecification(), Limits(max_nodes=3))
    assert isinstance(verdict, ResourceOut)
    assert verdict.limit == "max_nodes"


def test_limits_must_be_positive():
    with pytest.raises(ConfigError):
        Limits(max_nodes=0)
    with pytest.raises(ConfigError):
        Limits(max_seconds=-1.0)


def test_applicable_rules_on_the_root():
    branch = [F(EXAMPLE_GOAL)]
    rules = applicable_rules(branch, EXAMPLE_GOAL, J, EXAMPLE_CS)
    first = rules[0]
    assert first.rule == Rule.F_IMP
    assert first.forks == ((T(parse_formula("x:P")), F(parse_formula("c*x:(Q -> P)"))),)
    # the CS bivalence comes before the other branching rules
    branching = [r for r in rules if r.branching]
    assert branching[0].rule == Rule.PB
    assert branching[0].forks[1] == (F(parse_formula("c:(P -> (Q -> P))")),)


def test_app_side_condition():
    major = T(Evidence(parse_term("c"), parse_formula("P -> (Q -> P)")))
    minor = T(Evidence(parse_term("x"), parse_formula("P")))
    branch = [F(EXAMPLE_GOAL), major, minor]
    rules = applicable_rules(branch, EXAMPLE_GOAL, J, EXAMPLE_CS)
    assert any(r.rule == Rule.APP for r in rules)
    # y*x does not occur, so (.) is not analytic for y
    other = T(Evidence(parse_term("y"), parse_formula("P -> (Q -> P)")))
    branch = [F(EXAMPLE_GOAL), other, minor]
    rules = applicable_rules(branch, EXAMPLE_GOAL, J, EXAMPLE_CS)
    assert not any(r.rule == Rule.APP for r in rules)


def test_logic_specific_rules_are_gated():
    premise = T(Evidence(parse_term("x"), parse_formula("P")))
    goal = parse_formula("x:P -> P")
    cs = ConstantSpecification()
    in_j = applicable_rules([F(goal), premise], goal, J, cs)
    in_jt = applicable_rules([F(goal), premise], goal, parse_logic("JT"), cs)
    assert not any(r.rule == Rule.E for r in in_j)
    assert any(r.rule == Rule.E for r in in_jt)


def test_apply_rule_builds_the_tableau():
    tableau = initial_tableau([F(EXAMPLE_GOAL)])
    instance = applicable_rules([F(EXAMPLE_GOAL)], EXAMPLE_GOAL, J, EXAMPLE_CS)[0]
    tableau = apply_rule(tableau, 0, instance, J, EXAMPLE_CS)
    assert tableau.size == 3
    assert tableau.nodes[0].children == (1,)
    assert tableau.nodes[1].children == (2,)
    assert tableau.nodes[2].premises == (0,)
    assert tableau.leaves() == [2]


def test_apply_rule_forks():
    tableau = initial_tableau([F(EXAMPLE_GOAL)])
    pb = RuleInstance(Rule.PB, (), ((T(parse_formula("P")),), (F(parse_formula("P")),)))
    tableau = apply_rule(tableau, 0, pb, J, EXAMPLE_CS)
    assert tableau.nodes[0].children == (1, 2)
    assert tableau.leaves() == [1, 2]


def test_apply_rule_rejects():
    tableau = initial_tableau([F(EXAMPLE_GOAL)])
    product = T(Evidence(parse_term("x"), parse_formula("P")))
    bogus = RuleInstance(Rule.TE, (T(parse_formula("x:P")),), ((product,),))
    with pytest.raises(IllegalApplication):
        apply_rule(tableau, 0, bogus, J, EXAMPLE_CS)
    r = parse_formula("R")
    non_analytic = RuleInstance(Rule.PB, (), ((T(r),), (F(r),)))
    with pytest.raises(IllegalApplication):
        apply_rule(tableau, 0, non_analytic, J, EXAMPLE_CS)


def test_several_roots():
    roots = [T(parse_formula("x:P")), F(parse_formula("(x+y):P"))]
    verdict = search(roots, J, ConstantSpecification())
    assert isinstance(verdict, Valid)
    assert len(verdict.proof.root_formulas()) == 2


def _mutate(proof: Tableau, node_id: int, **changes) -> Tableau:
    nodes = dict(proof.nodes)
    old = nodes[node_id]
    nodes[node_id] = Node(
        old.id,
        changes.get("formula", old.formula),
        changes.get("rule", old.rule),
        changes.get("premises", old.premises),
        changes.get("children", old.children),
    )
    return Tableau(nodes, proof.root, proof.scope)


def test_check_proof_rejects_mutations():
    proof = prove(EXAMPLE_GOAL, J, EXAMPLE_CS).proof
    assert check_proof(proof, EXAMPLE_GOAL, J, EXAMPLE_CS).accepted

    wrong_body = T(Evidence(parse_term("c*x"), parse_formula("P")))
    swapped = _mutate(proof, 8, formula=wrong_body)
    assert not check_proof(swapped, EXAMPLE_GOAL, J, EXAMPLE_CS)

    repointed = _mutate(proof, 8, premises=(7, 4))
    assert not check_proof(repointed, EXAMPLE_GOAL, J, EXAMPLE_CS)

    truncated = _mutate(proof, 7, children=())
    result = check_proof(truncated, EXAMPLE_GOAL, J, EXAMPLE_CS)
    assert not result
    assert result.reason == "open leaf"
    assert str(result).startswith("reject(node 7")

    wrong_goal = check_proof(proof, parse_formula("P"), J, EXAMPLE_CS)
    assert wrong_goal.reason == "root is not F goal"


def _mutant(proof: Tableau, rng: random.Random) -> Tableau:
    inner = [i for i in proof.nodes if i != proof.root]
    kind = rng.choice(["payload", "premise", "leaf"])
    if kind == "payload":
        return _mutate(proof, rng.choice(inner), formula=T(Prop("Z")))
    with_premises = [i for i in inner if proof.nodes[i].premises]
    if kind == "premise" and with_premises:
        node = rng.choice(with_premises)
        return _mutate(proof, node, premises=(node,))
    leaf = rng.choice(proof.leaves())
    parent = next(n for n in proof.nodes.values() if leaf in n.children)
    kept = tuple(c for c in parent.children if c != leaf)
    pruned = _mutate(proof, parent.id, children=kept)
    nodes = dict(pruned.nodes)
    del nodes[leaf]
    return Tableau(nodes, pruned.root)


@pytest.mark.corpus
def test_check_proof_rejects_seeded_mutations():
    cs = ConstantSpecification()
    proofs = []
    for logic_name, scheme in SCHEME_CASES:
        logic = parse_logic(logic_name)
        for goal in _instances(logic_name, scheme):
            proofs.append((prove(goal, logic, cs).proof, goal, logic))
    rng = random.Random(2026)
    rejected = 0
    for _ in range(200):
        proof, goal, logic = rng.choice(proofs)
        assert check_proof(proof, goal, logic, cs)
        if not check_proof(_mutant(proof, rng), goal, logic, cs):
            rejected += 1
    assert rejected >= 199


def test_check_proof_rejects_disabled_rules():
    goal = parse_formula("x:P -> P")
    jt = parse_logic("JT")
    proof = prove(goal, jt, ConstantSpecification()).proof
    result = check_proof(proof, goal, J, ConstantSpecification())
    assert not result
    assert "not available in J" in result.reason


def test_check_result_text():
    assert str(CheckResult(True)) == "accept"
    assert str(CheckResult(False, "cut", 3)) == "reject(node 3: cut)"


def test_check_proof_rejects_cuts():
    proof = prove(EXAMPLE_GOAL, J, EXAMPLE_CS).proof
    with_cut = _mutate(proof, 5, rule=Rule.CUT)
    with_cut = _mutate(with_cut, 6, rule=Rule.CUT)
    assert check_proof(with_cut, EXAMPLE_GOAL, J, EXAMPLE_CS).reason == "cut"


def test_audit_flags_foreign_formulas():
    proof = prove(EXAMPLE_GOAL, J, EXAMPLE_CS).proof
    stranger = T(Evidence(parse_term("z"), parse_formula("P")))
    foreign = _mutate(proof, 7, formula=stranger)
    assert not audit_subformula_property(foreign, EXAMPLE_GOAL, EXAMPLE_CS)


@pytest.mark.parametrize("sign", [T, F])
def test_a_formula_and_its_negation_under_one_sign_close(sign):
    p, cs = Prop("P"), ConstantSpecification()
    closure = closure_status([sign(p), sign(Neg(p))], cs)
    assert closure is not None
    assert closure.reason == "negation-pair"
    assert closure_status([sign(Neg(p)), sign(p)], cs).reason == "negation-pair"
    assert closure_status([sign(p), sign(Neg(Prop("Q")))], cs) is None



def test_check_proof_accepts_a_negation_pair_leaf():
    goal = parse_formula("P -> ~~P")
    nodes = {
        0: Node(0, F(goal), Rule.ROOT, (), (1,)),
        1: Node(1, T(Prop("P")), Rule.F_IMP, (0,), (2,)),
        2: Node(2, F(parse_formula("~~P")), Rule.F_IMP, (0,), (3,)),
        3: Node(3, T(parse_formula("~P")), Rule.F_NEG, (2,)),
    }
    assert check_proof(Tableau(nodes, 0), goal, J, ConstantSpecification())


def _forged_pb_proof() -> Tableau:
    # a PB on Q, foreign to P -> P, grafted under a proof that is already closed
    goal = parse_formula("P -> P")
    nodes = {
        0: Node(0, F(goal), Rule.ROOT, (), (1,)),
        1: Node(1, T(Prop("P")), Rule.F_IMP, (0,), (2,)),
        2: Node(2, F(Prop("P")), Rule.F_IMP, (0,), (3, 4)),
        3: Node(3, T(Prop("Q")), Rule.PB),
        4: Node(4, F(Prop("Q")), Rule.PB),
    }
    return Tableau(nodes, 0, (Prop("Q"),))


def test_check_proof_ignores_the_scope_a_tableau_carries():
    goal, cs = parse_formula("P -> P"), ConstantSpecification()
    forged = _forged_pb_proof()
    result = check_proof(forged, goal, J, cs)
    assert not result
    assert result.reason == "side-condition of (PB) violated"
    assert not audit_subformula_property(forged, goal, cs)
    assert check_proof(forged, goal, J, cs, (Prop("Q"),))
    assert audit_subformula_property(forged, goal, cs, (Prop("Q"),))
