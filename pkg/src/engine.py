# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from __future__ import annotations

import logging
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from src.logic_cs import (
    ConfigError,
    ConstantSpecification,
    LogicSpec,
    SignatureError,
    check_signature,
    cs_subformulas,
    occurring_terms,
    validate_cs,
    weak_cs_subformulas,
)
from src.semantics import ExtractionFailed, Model, extract_candidate_model
from src.syntax import (
    App,
    Bang,
    Bottom,
    Evidence,
    F,
    Formula,
    Implies,
    Just,
    Neg,
    Query,
    SignedFormula,
    Sum,
    T,
    Term,
    WQuery,
    render_formula,
    render_payload,
    render_signed,
    size,
    term_size,
)

logger = logging.getLogger(__name__)


class Rule(str, Enum):
    ROOT = "root"
    CUT = "cut"
    F_NEG = "F~"
    T_NEG = "T~"
    F_IMP = "F->"
    T_IMP = "T->"
    TE = "Te"
    FE = "Fe"
    SUM_L = "+L"
    SUM_R = "+R"
    APP = "."
    PB = "PB"
    PBE = "PBe"
    E = "e"
    E_BOT = "e_bot"
    BANG = "!"
    WQUERY = "?bar"
    QUERY = "?"

    def __str__(self) -> str:
        return self.value


RULE_AXIOM = {
    Rule.E: "jT",
    Rule.E_BOT: "jD",
    Rule.BANG: "j4",
    Rule.WQUERY: "jB",
    Rule.QUERY: "j5",
}
BRANCHING_RULES = frozenset({Rule.T_IMP, Rule.PB, Rule.PBE, Rule.CUT})


class IllegalApplication(ValueError):
    pass


class InvalidProof(ValueError):
    pass


def rule_enabled(rule: Rule, logic: LogicSpec) -> bool:
    axiom = RULE_AXIOM.get(rule)
    return axiom is None or axiom in logic.axioms


@dataclass(frozen=True)
class RuleInstance:
    rule: Rule
    premises: tuple[SignedFormula, ...]
    forks: tuple[tuple[SignedFormula, ...], ...]

    @property
    def branching(self) -> bool:
        return len(self.forks) == 2

    def __str__(self) -> str:
        forks = " | ".join(", ".join(map(render_signed, fork)) for fork in self.forks)
        return f"({self.rule}) {forks}"


@dataclass(frozen=True)
class AnalyticScope:
    """CS-subformulas and occurring terms of the root, gating (.), PB and PBe."""

    formulas: frozenset[Formula]
    terms: frozenset[Term]

    @classmethod
    def build(
        cls,
        roots: Sequence[Formula],
        cs: ConstantSpecification,
        scope: tuple[Formula, ...] = (),
    ) -> AnalyticScope:
        first, rest = roots[0], (*roots[1:], *scope)
        return cls(cs_subformulas(first, cs, rest), occurring_terms(first, cs, rest))

    @cached_property
    def implications(self) -> dict[Formula, list[Implies]]:
        """Implications of the scope indexed by their consequent."""
        result: dict[Formula, list[Implies]] = {}
        for f in sorted(self.formulas, key=_formula_key):
            if isinstance(f, Implies):
                result.setdefault(f.right, []).append(f)
        return result

    def allows_app(self, major: Evidence, minor_term: Term) -> bool:
        return major.body in self.formulas and App(major.term, minor_term) in self.terms

    def allows_pb(self, pivot: Formula) -> bool:
        return pivot in self.formulas

    def allows_pbe(self, pivot: Evidence) -> bool:
        return pivot.body in self.formulas and pivot.term in self.terms


def linear_products(
    sf: SignedFormula, logic: LogicSpec
) -> list[tuple[Rule, tuple[SignedFormula, ...]]]:
    p = sf.payload
    out: list[tuple[Rule, tuple[SignedFormula, ...]]] = []
    if isinstance(p, Evidence):
        t, body = p.term, p.body
        if sf.sign:
            if "jT" in logic.axioms:
                out.append((Rule.E, (T(body),)))
            if "jD" in logic.axioms and body == Bottom():
                out.append((Rule.E_BOT, (T(Bottom()),)))
            return out
        if isinstance(t, Sum):
            out.append((Rule.SUM_L, (F(Evidence(t.left, body)),)))
            out.append((Rule.SUM_R, (F(Evidence(t.right, body)),)))
        elif isinstance(t, Bang):
            if "j4" in logic.axioms and isinstance(body, Just) and body.term == t.inner:
                out.append((Rule.BANG, (F(Evidence(t.inner, body.body)),)))
        elif isinstance(t, (WQuery, Query)):
            if (
                isinstance(body, Neg)
                and isinstance(body.inner, Just)
                and body.inner.term == t.inner
            ):
                inner = body.inner.body
                if isinstance(t, WQuery) and "jB" in logic.axioms:
                    out.append((Rule.WQUERY, (T(inner),)))
                if isinstance(t, Query) and "j5" in logic.axioms:
                    out.append((Rule.QUERY, (T(Evidence(t.inner, inner)),)))
        return out
    if isinstance(p, Neg):
        rule = Rule.T_NEG if sf.sign else Rule.F_NEG
        out.append((rule, (SignedFormula(not sf.sign, p.inner),)))
    elif isinstance(p, Implies) and not sf.sign:
        out.append((Rule.F_IMP, (T(p.left), F(p.right))))
    elif isinstance(p, Just):
        rule = Rule.TE if sf.sign else Rule.FE
        out.append((rule, (SignedFormula(sf.sign, Evidence(p.term, p.body)),)))
    return out


def app_product(major: SignedFormula, minor: SignedFormula) -> SignedFormula | None:
    a, b = major.payload, minor.payload
    if not (major.sign and minor.sign):
        return None
    if not (isinstance(a, Evidence) and isinstance(b, Evidence)):
        return None
    if not isinstance(a.body, Implies) or a.body.left != b.body:
        return None
    return T(Evidence(App(a.term, b.term), a.body.right))


def implication_forks(
    sf: SignedFormula,
) -> tuple[tuple[SignedFormula, ...], ...] | None:
    if sf.sign and isinstance(sf.payload, Implies):
        return ((F(sf.payload.left),), (T(sf.payload.right),))
    return None


def bivalence_forks(pivot: Formula | Evidence) -> tuple[tuple[SignedFormula, ...], ...]:
    return ((T(pivot),), (F(pivot),))


@dataclass(frozen=True)
class Closure:
    reason: str
    witness: SignedFormula

    def __str__(self) -> str:
        return f"{self.reason}: {render_signed(self.witness)}"


def closure_against(
    sf: SignedFormula,
    present: set[SignedFormula] | frozenset[SignedFormula],
    cs: ConstantSpecification,
) -> Closure | None:
    if sf.sign and sf.payload == Bottom():
        return Closure("bottom", sf)
    if not sf.sign and sf.payload in cs.entries:
        return Closure("cs", sf)
    if sf.complement() in present:
        return Closure("evidential-pair" if sf.is_evidential else "pair", sf)
    p = sf.payload
    # F A is T ~A: equal signs on A and ~A close as well
    if not isinstance(p, Evidence) and (
        SignedFormula(sf.sign, Neg(p)) in present
        or (isinstance(p, Neg) and SignedFormula(sf.sign, p.inner) in present)
    ):
        return Closure("negation-pair", sf)
    return None


def closure_status(
    branch: Iterable[SignedFormula], cs: ConstantSpecification
) -> Closure | None:
    present: set[SignedFormula] = set()
    for sf in branch:
        closure = closure_against(sf, present, cs)
        if closure is not None:
            return closure
        present.add(sf)
    return None


def formula_roots(roots: Iterable[SignedFormula]) -> list[Formula]:
    result = []
    for sf in roots:
        if not isinstance(sf.payload, Evidence):
            result.append(sf.payload)
    return result


def _formula_key(f: Formula) -> tuple[int, str]:
    return size(f), render_formula(f)


def _pbe_candidates(gate: AnalyticScope) -> list[Evidence]:
    pairs = [Evidence(t, f) for t in gate.terms for f in gate.formulas]
    return sorted(
        pairs,
        key=lambda e: (size(e.body) + term_size(e.term), render_payload(e)),
    )


def _relevant_pbe(
    branch: Iterable[SignedFormula], gate: AnalyticScope
) -> list[Evidence]:
    # pivots that could fire (.) towards a refuted application term
    result = []
    for sf in branch:
        p = sf.payload
        if sf.sign or not isinstance(p, Evidence) or not isinstance(p.term, App):
            continue
        for f in gate.implications.get(p.body, ()):
            result.append(Evidence(p.term.left, f))
            result.append(Evidence(p.term.right, f.left))
    return result


def _decided(
    pivot: Formula | Evidence, present: set[SignedFormula] | frozenset[SignedFormula]
) -> bool:
    return T(pivot) in present or F(pivot) in present


def applicable_rules(
    branch: Sequence[SignedFormula],
    root: Formula | Sequence[Formula],
    logic: LogicSpec,
    cs: ConstantSpecification,
    scope: tuple[Formula, ...] = (),
) -> list[RuleInstance]:
    roots = [root] if not isinstance(root, Sequence) else list(root)
    gate = AnalyticScope.build(roots, cs, scope)
    present = set(branch)
    linear: list[tuple[int, int, RuleInstance]] = []
    for index, sf in enumerate(branch):
        for order, (rule, products) in enumerate(linear_products(sf, logic)):
            if not all(p in present for p in products):
                linear.append((index, order, RuleInstance(rule, (sf,), (products,))))
    for i, major in enumerate(branch):
        for j, minor in enumerate(branch):
            product = app_product(major, minor)
            if product is None or product in present:
                continue
            assert isinstance(major.payload, Evidence)
            assert isinstance(minor.payload, Evidence)
            if gate.allows_app(major.payload, minor.payload.term):
                instance = RuleInstance(Rule.APP, (major, minor), ((product,),))
                linear.append((max(i, j), 9, instance))
    linear.sort(key=lambda item: (item[0], item[1]))
    result = [instance for _, _, instance in linear]

    for entry in sorted(cs.entries, key=_formula_key):
        if not _decided(entry, present):
            result.append(RuleInstance(Rule.PB, (), bivalence_forks(entry)))
    for sf in branch:
        forks = implication_forks(sf)
        if forks and not any(fork[0] in present for fork in forks):
            result.append(RuleInstance(Rule.T_IMP, (sf,), forks))
    seen: set[Evidence] = set()
    for pivot in _relevant_pbe(branch, gate) + _pbe_candidates(gate):
        if pivot in seen or _decided(pivot, present) or not gate.allows_pbe(pivot):
            continue
        seen.add(pivot)
        result.append(RuleInstance(Rule.PBE, (), bivalence_forks(pivot)))
    for f in sorted(gate.formulas, key=_formula_key):
        if f not in cs.entries and not _decided(f, present):
            result.append(RuleInstance(Rule.PB, (), bivalence_forks(f)))
    return result


@dataclass(frozen=True)
class Node:
    id: int
    formula: SignedFormula
    rule: Rule
    premises: tuple[int, ...] = ()
    children: tuple[int, ...] = ()


@dataclass(frozen=True)
class Tableau:
    nodes: dict[int, Node]
    root: int
    scope: tuple[Formula, ...] = ()
    closures: dict[int, Closure] = field(default_factory=dict, compare=False)

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def parents(self) -> dict[int, int]:
        return {c: n.id for n in self.nodes.values() for c in n.children}

    def path(self, node_id: int) -> list[Node]:
        parents = self.parents()
        path = [self.nodes[node_id]]
        while path[-1].id in parents:
            path.append(self.nodes[parents[path[-1].id]])
        return path[::-1]

    def leaves(self) -> list[int]:
        result, stack = [], [self.root]
        while stack:
            node = self.nodes[stack.pop()]
            if not node.children:
                result.append(node.id)
            stack.extend(reversed(node.children))
        return result

    def root_formulas(self) -> list[SignedFormula]:
        result = []
        node = self.nodes[self.root]
        while node.rule == Rule.ROOT:
            result.append(node.formula)
            if len(node.children) != 1:
                break
            node = self.nodes[node.children[0]]
        return result

    @property
    def size(self) -> int:
        return len(self.nodes)

    def is_cut_free(self) -> bool:
        return all(n.rule != Rule.CUT for n in self.nodes.values())


def _nearest(path: Sequence[Node], sf: SignedFormula) -> int:
    for node in reversed(path):
        if node.formula == sf:
            return node.id
    raise IllegalApplication(f"Premise {render_signed(sf)} is not on the branch")


def apply_rule(
    tableau: Tableau,
    leaf: int,
    instance: RuleInstance,
    logic: LogicSpec,
    cs: ConstantSpecification,
) -> Tableau:
    if tableau.nodes[leaf].children:
        raise IllegalApplication(f"Node {leaf} is not a leaf")
    path = tableau.path(leaf)
    branch = [n.formula for n in path]
    roots = formula_roots(tableau.root_formulas())
    allowed = applicable_rules(branch, roots, logic, cs, tableau.scope)
    if instance not in allowed:
        raise IllegalApplication(f"{instance} is not applicable at node {leaf}")
    premises = tuple(_nearest(path, p) for p in instance.premises)
    nodes = dict(tableau.nodes)
    next_id = max(nodes) + 1
    heads = []
    for fork in instance.forks:
        parent = None
        for sf in fork:
            nodes[next_id] = Node(next_id, sf, instance.rule, premises)
            if parent is None:
                heads.append(next_id)
            else:
                nodes[parent] = Node(
                    parent, nodes[parent].formula, nodes[parent].rule,
                    nodes[parent].premises, (next_id,),
                )
            parent = next_id
            next_id += 1
    old = nodes[leaf]
    nodes[leaf] = Node(old.id, old.formula, old.rule, old.premises, tuple(heads))
    return Tableau(nodes, tableau.root, tableau.scope)


def initial_tableau(
    roots: Sequence[SignedFormula], scope: tuple[Formula, ...] = ()
) -> Tableau:
    nodes = {}
    for i, sf in enumerate(roots):
        children = (i + 1,) if i + 1 < len(roots) else ()
        nodes[i] = Node(i, sf, Rule.ROOT, (), children)
    return Tableau(nodes, 0, scope)


@dataclass(frozen=True)
class Limits:
    max_nodes: int = 200_000
    max_seconds: float = 10.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise ConfigError("Limits must be positive")


@dataclass(frozen=True)
class Valid:
    proof: Tableau


@dataclass(frozen=True)
class Invalid:
    branch: tuple[SignedFormula, ...]
    model: Model | None
    note: str | None = None


@dataclass(frozen=True)
class ResourceOut:
    limit: str
    nodes: int
    seconds: float


Verdict = Valid | Invalid | ResourceOut


class _LimitHit(Exception):
    def __init__(self, limit: str):
        self.limit = limit


class _Branch:
    """Mutable search state of one open branch; copied when the branch forks."""

    def __init__(self):
        self.formulas: list[SignedFormula] = []
        self.present: set[SignedFormula] = set()
        self.node_of: dict[SignedFormula, int] = {}
        self.leaf = -1
        self.cursor = 0
        self.pending_imp: list[SignedFormula] = []
        self.t_by_body: dict[Formula, tuple[Term, ...]] = {}
        self.t_by_antecedent: dict[Formula, tuple[Evidence, ...]] = {}
        self.refuted_apps: list[SignedFormula] = []
        self.cs_cursor = 0
        self.pbe_cursor = 0
        self.pb_cursor = 0
        self.closure: Closure | None = None

    def copy(self) -> _Branch:
        other = _Branch.__new__(_Branch)
        other.__dict__.update(self.__dict__)
        other.formulas = list(self.formulas)
        other.present = set(self.present)
        other.node_of = dict(self.node_of)
        other.pending_imp = list(self.pending_imp)
        other.t_by_body = dict(self.t_by_body)
        other.t_by_antecedent = dict(self.t_by_antecedent)
        other.refuted_apps = list(self.refuted_apps)
        return other


class _Search:
    def __init__(
        self,
        roots: Sequence[SignedFormula],
        logic: LogicSpec,
        cs: ConstantSpecification,
        limits: Limits,
        bivalence: bool = True,
        scope: tuple[Formula, ...] = (),
    ):
        self.roots = list(roots)
        self.logic = logic
        self.cs = cs
        self.limits = limits
        self.bivalence = bivalence
        self.scope = scope
        root_payloads = formula_roots(roots)
        self.gate = AnalyticScope.build(root_payloads, cs, scope)
        self.cs_pivots = sorted(cs.entries, key=_formula_key)
        self.pb_pivots = [
            f
            for f in sorted(self.gate.formulas, key=_formula_key)
            if f not in cs.entries
        ]
        self.pbe_pivots = _pbe_candidates(self.gate) if bivalence else []
        self.nodes: dict[int, list] = {}
        self.closures: dict[int, Closure] = {}
        self.started = 0.0

    def _new_node(
        self, parent: int, sf: SignedFormula, rule: Rule, premises: tuple[int, ...]
    ) -> int:
        node_id = len(self.nodes)
        if node_id >= self.limits.max_nodes:
            raise _LimitHit("max_nodes")
        self.nodes[node_id] = [sf, rule, premises, []]
        if parent >= 0:
            self.nodes[parent][3].append(node_id)
        return node_id

    def _extend(
        self,
        branch: _Branch,
        sf: SignedFormula,
        rule: Rule,
        premises: Sequence[SignedFormula],
        parent: int | None = None,
    ) -> None:
        premise_ids = tuple(branch.node_of[p] for p in premises)
        above = branch.leaf if parent is None else parent
        node_id = self._new_node(above, sf, rule, premise_ids)
        branch.leaf = node_id
        if branch.closure is None:
            branch.closure = closure_against(sf, branch.present, self.cs)
        branch.formulas.append(sf)
        branch.present.add(sf)
        branch.node_of[sf] = node_id
        p = sf.payload
        if isinstance(p, Evidence):
            if sf.sign:
                branch.t_by_body[p.body] = branch.t_by_body.get(p.body, ()) + (p.term,)
                if isinstance(p.body, Implies):
                    key = p.body.left
                    known = branch.t_by_antecedent.get(key, ())
                    branch.t_by_antecedent[key] = known + (p,)
            elif isinstance(p.term, App):
                branch.refuted_apps.append(sf)

    def _app_instance(self, branch: _Branch, sf: SignedFormula) -> RuleInstance | None:
        p = sf.payload
        if not sf.sign or not isinstance(p, Evidence):
            return None
        if isinstance(p.body, Implies):
            for t in branch.t_by_body.get(p.body.left, ()):
                minor = T(Evidence(t, p.body.left))
                instance = self._app(branch, sf, minor)
                if instance:
                    return instance
        for major in branch.t_by_antecedent.get(p.body, ()):
            instance = self._app(branch, T(major), sf)
            if instance:
                return instance
        return None

    def _app(
        self, branch: _Branch, major: SignedFormula, minor: SignedFormula
    ) -> RuleInstance | None:
        product = app_product(major, minor)
        if product is None or product in branch.present:
            return None
        assert isinstance(major.payload, Evidence)
        assert isinstance(minor.payload, Evidence)
        if not self.gate.allows_app(major.payload, minor.payload.term):
            return None
        return RuleInstance(Rule.APP, (major, minor), ((product,),))

    def _next_linear(self, branch: _Branch) -> RuleInstance | None:
        while branch.cursor < len(branch.formulas):
            sf = branch.formulas[branch.cursor]
            for rule, products in linear_products(sf, self.logic):
                if not all(p in branch.present for p in products):
                    return RuleInstance(rule, (sf,), (products,))
            instance = self._app_instance(branch, sf)
            if instance is not None:
                return instance
            if implication_forks(sf):
                branch.pending_imp.append(sf)
            branch.cursor += 1
        return None

    def _next_branching(self, branch: _Branch) -> RuleInstance | None:
        present = branch.present
        if self.bivalence:
            while branch.cs_cursor < len(self.cs_pivots):
                pivot = self.cs_pivots[branch.cs_cursor]
                if not _decided(pivot, present):
                    return RuleInstance(Rule.PB, (), bivalence_forks(pivot))
                branch.cs_cursor += 1
        for sf in branch.pending_imp:
            forks = implication_forks(sf)
            assert forks is not None
            if not any(fork[0] in present for fork in forks):
                return RuleInstance(Rule.T_IMP, (sf,), forks)
        if not self.bivalence:
            return None
        for pivot in _relevant_pbe(branch.refuted_apps, self.gate):
            if self.gate.allows_pbe(pivot) and not _decided(pivot, present):
                return RuleInstance(Rule.PBE, (), bivalence_forks(pivot))
        while branch.pbe_cursor < len(self.pbe_pivots):
            pivot = self.pbe_pivots[branch.pbe_cursor]
            if not _decided(pivot, present):
                return RuleInstance(Rule.PBE, (), bivalence_forks(pivot))
            branch.pbe_cursor += 1
        while branch.pb_cursor < len(self.pb_pivots):
            pivot = self.pb_pivots[branch.pb_cursor]
            if not _decided(pivot, present):
                return RuleInstance(Rule.PB, (), bivalence_forks(pivot))
            branch.pb_cursor += 1
        return None

    def _check_time(self) -> None:
        if time.monotonic() - self.started > self.limits.max_seconds:
            raise _LimitHit("max_seconds")

    def run(self) -> Verdict:
        self.started = time.monotonic()
        try:
            return self._run()
        except _LimitHit as hit:
            elapsed = time.monotonic() - self.started
            logger.info(
                "search stopped by %s after %d nodes", hit.limit, len(self.nodes)
            )
            return ResourceOut(hit.limit, len(self.nodes), elapsed)

    def _run(self) -> Verdict:
        start = _Branch()
        for sf in self.roots:
            if sf not in start.present:
                self._extend(start, sf, Rule.ROOT, ())
        stack = [start]
        while stack:
            branch = stack.pop()
            while branch.closure is None:
                self._check_time()
                instance = self._next_linear(branch)
                if instance is not None:
                    for sf in instance.forks[0]:
                        if sf not in branch.present:
                            self._extend(branch, sf, instance.rule, instance.premises)
                    continue
                instance = self._next_branching(branch)
                if instance is None:
                    logger.debug("saturated open branch at node %d", branch.leaf)
                    return self._invalid(branch)
                left, right = branch, branch.copy()
                parent = branch.leaf
                rule, premises = instance.rule, instance.premises
                self._extend(left, instance.forks[0][0], rule, premises, parent)
                self._extend(right, instance.forks[1][0], rule, premises, parent)
                # bivalence forks: the false side is explored first
                if instance.rule == Rule.T_IMP:
                    stack.append(right)
                else:
                    stack.append(left)
                    branch = right
            self.closures[branch.leaf] = branch.closure
            logger.debug("closed branch at node %d (%s)", branch.leaf, branch.closure)
        return Valid(self.tableau())

    def _invalid(self, branch: _Branch) -> Invalid:
        formulas = tuple(branch.formulas)
        if not self.bivalence:
            return Invalid(formulas, None, "open branch without bivalence")
        payloads = formula_roots(self.roots)
        root, rest = payloads[0], tuple(payloads[1:])
        try:
            model = extract_candidate_model(
                formulas, root, self.logic, self.cs, (*rest, *self.scope)
            )
        except ExtractionFailed as e:
            logger.info("model undetermined: %s", e)
            return Invalid(formulas, None, f"model undetermined: {e}")
        return Invalid(formulas, model)

    def tableau(self) -> Tableau:
        nodes = {
            i: Node(i, sf, rule, premises, tuple(children))
            for i, (sf, rule, premises, children) in self.nodes.items()
        }
        return Tableau(nodes, 0, self.scope, dict(self.closures))


def search(
    roots: Sequence[SignedFormula],
    logic: LogicSpec,
    cs: ConstantSpecification,
    limits: Limits | None = None,
    bivalence: bool = True,
    scope: tuple[Formula, ...] = (),
) -> Verdict:
    return _Search(roots, logic, cs, limits or Limits(), bivalence, scope).run()


def prove(
    goal: Formula,
    logic: LogicSpec,
    cs: ConstantSpecification,
    limits: Limits | None = None,
) -> Verdict:
    violations = validate_cs(cs, logic)
    if violations:
        raise ConfigError(
            "Invalid constant specification: " + "; ".join(map(str, violations))
        )
    try:
        check_signature(goal, logic)
    except SignatureError as e:
        raise ConfigError(str(e)) from e
    verdict = search([F(goal)], logic, cs, limits)
    logger.info(
        "%s in %s: %s", render_formula(goal), logic.name, type(verdict).__name__
    )
    return verdict


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    reason: str | None = None
    node: int | None = None

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accept"
        return f"reject(node {self.node}: {self.reason})"


def _reject(node: int, reason: str) -> CheckResult:
    return CheckResult(False, reason, node)


def _check_linear(
    node: Node, premises: list[SignedFormula], logic: LogicSpec, gate: AnalyticScope
) -> str | None:
    if node.rule == Rule.APP:
        if len(premises) != 2:
            return "(.) needs two premises"
        for major, minor in (premises, premises[::-1]):
            product = app_product(major, minor)
            if product == node.formula:
                assert isinstance(major.payload, Evidence)
                assert isinstance(minor.payload, Evidence)
                if not gate.allows_app(major.payload, minor.payload.term):
                    return "side-condition of (.) violated"
                return None
        return "not a product of (.)"
    if len(premises) != 1:
        return f"({node.rule}) needs one premise"
    for rule, products in linear_products(premises[0], logic):
        if rule == node.rule and node.formula in products:
            return None
    return f"not a product of ({node.rule})"


def _check_fork(
    parent: Node,
    left: Node,
    right: Node,
    path_formulas: dict[int, SignedFormula],
    gate: AnalyticScope,
) -> str | None:
    if left.rule != right.rule or left.premises != right.premises:
        return "fork children disagree on their rule"
    rule = left.rule
    if rule == Rule.CUT:
        return "cut"
    premises = [path_formulas[p] for p in left.premises]
    if rule == Rule.T_IMP:
        if len(premises) != 1:
            return "(T->) needs one premise"
        forks = implication_forks(premises[0])
    elif rule in (Rule.PB, Rule.PBE):
        if premises:
            return f"({rule}) takes no premise"
        pivot = left.formula.payload
        if rule == Rule.PB and (
            isinstance(pivot, Evidence) or not gate.allows_pb(pivot)
        ):
            return "side-condition of (PB) violated"
        if rule == Rule.PBE and (
            not isinstance(pivot, Evidence) or not gate.allows_pbe(pivot)
        ):
            return "side-condition of (PBe) violated"
        forks = bivalence_forks(pivot)
    else:
        return f"({rule}) does not branch"
    if forks is None or (left.formula, right.formula) != (forks[0][0], forks[1][0]):
        return f"forks do not match ({rule})"
    return None


def check_proof(
    tableau: Tableau,
    goal: Formula,
    logic: LogicSpec,
    cs: ConstantSpecification,
    scope: tuple[Formula, ...] = (),
) -> CheckResult:
    """Re-check every step of a closed tableau for goal.

    Side conditions are judged against the goal, the CS and the explicit scope;
    the scope a tableau carries in memory is not consulted.
    """
    if tableau.root not in tableau.nodes:
        return _reject(tableau.root, "missing root")
    root = tableau.nodes[tableau.root]
    if root.rule != Rule.ROOT or root.formula != F(goal):
        return _reject(root.id, "root is not F goal")
    gate = AnalyticScope.build([goal], cs, scope)
    seen: set[int] = set()
    stack: list[tuple[int, tuple[int, ...]]] = [(root.id, ())]
    formulas = {n.id: n.formula for n in tableau.nodes.values()}
    while stack:
        node_id, ancestors = stack.pop()
        if node_id not in tableau.nodes:
            return _reject(node_id, "dangling child reference")
        if node_id in seen:
            return _reject(node_id, "node reached twice")
        seen.add(node_id)
        node = tableau.nodes[node_id]
        if node.rule == Rule.CUT:
            return _reject(node_id, "cut")
        if node_id != root.id and node.rule == Rule.ROOT:
            return _reject(node_id, "root rule below the root")
        if not rule_enabled(node.rule, logic):
            return _reject(
                node_id, f"rule ({node.rule}) is not available in {logic.name}"
            )
        if any(p not in ancestors for p in node.premises):
            return _reject(node_id, "premise is not above the node on its branch")
        if node.rule not in BRANCHING_RULES and node.rule != Rule.ROOT:
            premises = [formulas[p] for p in node.premises]
            reason = _check_linear(node, premises, logic, gate)
            if reason:
                return _reject(node_id, reason)
        children = [tableau.nodes.get(c) for c in node.children]
        if any(c is None for c in children):
            return _reject(node_id, "dangling child reference")
        if len(children) > 2:
            return _reject(node_id, "more than two children")
        if len(children) == 2:
            left, right = children
            assert left is not None and right is not None
            reason = _check_fork(node, left, right, formulas, gate)
            if reason:
                return _reject(left.id, reason)
        elif len(children) == 1:
            child = children[0]
            assert child is not None
            if child.rule in BRANCHING_RULES:
                return _reject(child.id, f"({child.rule}) without its sibling fork")
        else:
            branch = [formulas[a] for a in ancestors] + [node.formula]
            if closure_status(branch, cs) is None:
                return _reject(node_id, "open leaf")
        for child in reversed(node.children):
            stack.append((child, ancestors + (node_id,)))
    return CheckResult(True)


def audit_subformula_property(
    tableau: Tableau,
    root: Formula,
    cs: ConstantSpecification,
    scope: tuple[Formula, ...] = (),
) -> CheckResult:
    base = cs_subformulas(root, cs, scope)
    weak = weak_cs_subformulas(root, cs, scope)
    terms = occurring_terms(root, cs, scope)
    for node in sorted(tableau.nodes.values(), key=lambda n: n.id):
        p = node.formula.payload
        if isinstance(p, Evidence):
            if p.body not in base:
                return _reject(
                    node.id, f"{render_payload(p)}: body is not a CS-subformula"
                )

            if p.term not in terms:
                return _reject(node.id, f"{render_payload(p)}: term does not occur")
        elif p not in weak:
            return _reject(node.id, f"{render_payload(p)} is not a weak CS-subformula")
    return CheckResult(True)
