# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

"""Finite single-world evidence models: a valuation of the propositional
letters plus an admissible-evidence relation, both restricted to a finite
universe of formulas and terms."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass

from src.logic_cs import (
    ConstantSpecification,
    LogicSpec,
    cs_subformulas,
    occurring_terms,
)
from src.syntax import (
    App,
    Bang,
    Bottom,
    Evidence,
    Formula,
    Implies,
    Just,
    Neg,
    Prop,
    Query,
    SignedFormula,
    Sum,
    Term,
    WQuery,
    render_formula,
    render_term,
)

logger = logging.getLogger(__name__)

Pair = tuple[Term, Formula]


class ExtractionFailed(ValueError):
    pass


@dataclass(frozen=True)
class Model:
    valuation: frozenset[str]
    evidence: frozenset[Pair]
    universe: frozenset[Formula]
    terms: frozenset[Term]

    def admits(self, term: Term, body: Formula) -> bool:
        return (term, body) in self.evidence


def eval(model: Model, f: Formula) -> bool:
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Prop):
        return f.name in model.valuation
    if isinstance(f, Neg):
        return not eval(model, f.inner)
    if isinstance(f, Implies):
        return not eval(model, f.left) or eval(model, f.right)
    return model.admits(f.term, f.body)


def _pair(term: Term, body: Formula) -> str:
    return f"({render_term(term)}, {render_formula(body)})"


def _sums_over(terms: Iterable[Term]) -> dict[Term, list[Sum]]:
    result: dict[Term, list[Sum]] = {}
    for t in terms:
        if isinstance(t, Sum):
            result.setdefault(t.left, []).append(t)
            result.setdefault(t.right, []).append(t)
    return result


def _closure_products(
    evidence: frozenset[Pair] | set[Pair],
    universe: frozenset[Formula],
    terms: frozenset[Term],
    logic: LogicSpec,
) -> set[Pair]:
    """Pairs required by application, sum and (with j4) proof checker closure."""
    required: set[Pair] = set()
    by_body: dict[Formula, list[Term]] = {}
    for t, body in evidence:
        by_body.setdefault(body, []).append(t)
    sums = _sums_over(terms)
    for s, body in evidence:
        if isinstance(body, Implies) and body.right in universe:
            for t in by_body.get(body.left, ()):
                if App(s, t) in terms:
                    required.add((App(s, t), body.right))
        for u in sums.get(s, ()):
            required.add((u, body))
        if "j4" in logic.axioms and Bang(s) in terms and Just(s, body) in universe:
            required.add((Bang(s), Just(s, body)))
    return required


def _introspection_products(model: Model, logic: LogicSpec) -> set[Pair]:
    required: set[Pair] = set()
    for u in model.terms:
        if isinstance(u, WQuery) and "jB" in logic.axioms:
            for a in model.universe:
                target = Neg(Just(u.inner, a))
                if target in model.universe and not eval(model, a):
                    required.add((u, target))
        elif isinstance(u, Query) and "j5" in logic.axioms:
            for a in model.universe:
                target = Neg(Just(u.inner, a))
                if target in model.universe and not model.admits(u.inner, a):
                    required.add((u, target))
    return required


def verify_model(
    model: Model, logic: LogicSpec, cs: ConstantSpecification
) -> list[str]:
    violations = []
    closure = _closure_products(model.evidence, model.universe, model.terms, logic)
    for t, body in sorted(closure - model.evidence, key=lambda p: _pair(*p)):
        violations.append(f"closure: {_pair(t, body)} is missing")
    for entry in cs:
        assert isinstance(entry, Just)
        if not model.admits(entry.term, entry.body):
            pair = _pair(entry.term, entry.body)
            violations.append(f"constant specification: {pair} is missing")
    for t, body in sorted(model.evidence, key=lambda p: _pair(*p)):
        if "jT" in logic.axioms and not eval(model, body):
            violations.append(
                f"factivity: {_pair(t, body)} admitted but "
                f"{render_formula(body)} is false"
            )
        if "jD" in logic.axioms and body == Bottom():
            violations.append(f"consistency: {_pair(t, body)} admitted")
    introspection = _introspection_products(model, logic)
    for t, body in sorted(introspection - model.evidence, key=lambda p: _pair(*p)):
        violations.append(f"introspection: {_pair(t, body)} is missing")
    return violations


def _satisfied(model: Model, sf: SignedFormula) -> bool:
    p = sf.payload
    if isinstance(p, Evidence):
        return model.admits(p.term, p.body) == sf.sign
    return eval(model, p) == sf.sign


def extract_candidate_model(
    branch: Iterable[SignedFormula],
    root: Formula,
    logic: LogicSpec,
    cs: ConstantSpecification,
    scope: tuple[Formula, ...] = (),
) -> Model:
    branch = list(branch)
    universe = cs_subformulas(root, cs, scope)
    terms = occurring_terms(root, cs, scope)
    valuation = frozenset(
        sf.payload.name for sf in branch if sf.sign and isinstance(sf.payload, Prop)
    )
    seed: set[Pair] = {
        (sf.payload.term, sf.payload.body)
        for sf in branch
        if sf.sign and isinstance(sf.payload, Evidence)
    }
    for entry in cs.entries:
        assert isinstance(entry, Just)
        seed.add((entry.term, entry.body))
    seed = {(t, a) for t, a in seed if t in terms and a in universe}

    extras: set[Pair] = set()
    while True:
        evidence = seed | extras
        while True:
            new = _closure_products(evidence, universe, terms, logic) - evidence
            if not new:
                break
            evidence |= new
        model = Model(valuation, frozenset(evidence), universe, terms)
        more = _introspection_products(model, logic) - evidence
        if not more:
            break
        extras |= more

    for sf in branch:
        p = sf.payload
        if not sf.sign and isinstance(p, Evidence) and model.admits(p.term, p.body):
            raise ExtractionFailed(
                f"{_pair(p.term, p.body)} is refuted on the branch but forced"
            )

    violations = verify_model(model, logic, cs)
    if violations:
        raise ExtractionFailed("; ".join(violations))
    for sf in branch:
        if not _satisfied(model, sf):
            raise ExtractionFailed(f"{sf} is not satisfied")
    logger.debug("extracted model with %d evidence pairs", len(model.evidence))
    return model
