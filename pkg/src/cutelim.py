# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from __future__ import annotations

import logging
import re
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import count
from pathlib import Path

from src.engine import (
    AnalyticScope,
    InvalidProof,
    Limits,
    Node,
    Rule,
    Tableau,
    Valid,
    closure_against,
    closure_status,
    formula_roots,
    linear_products,
    search,
)
from src.logic_cs import (
    ConstantSpecification,
    LogicSpec,
    SignatureError,
    check_signature,
    matches_scheme,
)
from src.syntax import (
    App,
    Bang,
    Bottom,
    Const,
    Evidence,
    F,
    Formula,
    FormulaSyntaxError,
    Implies,
    Just,
    Neg,
    Payload,
    Prop,
    Query,
    SignedFormula,
    Sum,
    T,
    Term,
    Var,
    WQuery,
    parse_formula,
    render_formula,
    render_payload,
)

logger = logging.getLogger(__name__)

HILBERT_LINE = re.compile(r"^\s*(\d+)\.\s+(.+?)\s+\[([^\]]+)\]\s*$")
AXIOM_NAMES = (
    "Taut", "Sum", "Sum-left", "Sum-right", "jK", "jT", "jD", "j4", "jB", "j5"
)


class MalformedCut(ValueError):
    pass


class ResourceExhausted(ValueError):
    pass


def rank(x: Term | Formula | Evidence) -> int:
    if isinstance(x, (Var, Const, Prop, Bottom)):
        return 0
    if isinstance(x, (Sum, App, Implies)):
        return rank(x.left) + rank(x.right) + 1
    if isinstance(x, (Bang, Query, WQuery)):
        return rank(x.inner) + 1
    if isinstance(x, Neg):
        return rank(x.inner) + 1
    if isinstance(x, Just):
        return rank(x.term) + rank(x.body) + 1
    return rank(x.term) + rank(x.body)


@dataclass(frozen=True)
class CutMeasure:
    rank: int
    weight: int
    at_branch_end: bool

    @property
    def key(self) -> tuple[int, int]:
        return self.rank, self.weight


@dataclass(frozen=True)
class TraceEntry:
    case: str
    pivot: str
    measure: CutMeasure
    replacements: tuple[tuple[str, CutMeasure], ...]

    @property
    def decreases(self) -> bool:
        return all(m.key < self.measure.key for _, m in self.replacements)

    def __str__(self) -> str:
        new = ", ".join(
            f"{p} rank={m.rank} weight={m.weight}" for p, m in self.replacements
        )
        return (
            f"case={self.case} pivot={self.pivot} rank={self.measure.rank} "
            f"weight={self.measure.weight} → [{new}]"
        )


@dataclass(frozen=True)
class Subtree:
    """A tableau node with its descendants; premises are named by formula and
    resolve to the nearest ancestor carrying that formula."""

    formula: SignedFormula
    rule: Rule
    premises: tuple[SignedFormula, ...] = ()
    children: tuple[Subtree, ...] = ()

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    @cached_property
    def cut_free(self) -> bool:
        return self.rule != Rule.CUT and all(c.cut_free for c in self.children)

    def with_children(self, children: tuple[Subtree, ...]) -> Subtree:
        return Subtree(self.formula, self.rule, self.premises, children)

    def with_rule(self, rule: Rule) -> Subtree:
        return Subtree(self.formula, rule, self.premises, self.children)


def _without(trees: tuple[Subtree, ...], used: SignedFormula) -> tuple[Subtree, ...]:
    # drops the steps taking used as premise; only (T~)/(F~) do, and their
    # product is already on the branch
    result: list[Subtree] = []
    for tree in trees:
        children = _without(tree.children, used)
        if used in tree.premises:
            result.extend(children)
        else:
            result.append(tree.with_children(children))
    return tuple(result)


def to_subtree(tableau: Tableau) -> Subtree:
    def build(node_id: int) -> Subtree:
        node = tableau.nodes[node_id]
        premises = tuple(tableau.nodes[p].formula for p in node.premises)
        children = tuple(build(c) for c in node.children)
        return Subtree(node.formula, node.rule, premises, children)

    return build(tableau.root)


def to_tableau(tree: Subtree, scope: tuple[Formula, ...] = ()) -> Tableau:
    nodes: dict[int, Node] = {}
    latest: dict[SignedFormula, int] = {}
    ids = count()

    def build(sub: Subtree) -> int:
        node_id = next(ids)
        try:
            premises = tuple(latest[p] for p in sub.premises)
        except KeyError as e:
            raise MalformedCut(
                f"Premise {e.args[0]} of {sub.formula} is not above it"
            ) from e
        previous = latest.get(sub.formula)
        latest[sub.formula] = node_id
        children = tuple(build(c) for c in sub.children)
        if previous is None:
            del latest[sub.formula]
        else:
            latest[sub.formula] = previous
        nodes[node_id] = Node(node_id, sub.formula, sub.rule, premises, children)
        return node_id

    build(tree)
    return Tableau(nodes, 0, scope)


def _cut_heads(node: Subtree) -> tuple[Subtree, Subtree] | None:
    if len(node.children) != 2 or node.children[0].rule != Rule.CUT:
        return None
    first, second = node.children
    if first.formula.sign:
        return first, second
    return second, first


def _find_cut(tree: Subtree) -> list[int] | None:
    for i, child in enumerate(tree.children):
        if child.cut_free:
            continue
        found = _find_cut(child)
        if found is not None:
            return [i, *found]
    if _cut_heads(tree) is not None:
        return []
    return None


def _measure(site: Subtree) -> CutMeasure:
    heads = _cut_heads(site)
    assert heads is not None
    t_head, f_head = heads
    return CutMeasure(
        rank(t_head.formula.payload),
        t_head.size - 1 + f_head.size - 1,
        not t_head.children or not f_head.children,
    )


def _all_cuts(tree: Subtree) -> list[tuple[str, CutMeasure]]:
    result = []
    stack = [tree]
    while stack:
        node = stack.pop()
        heads = _cut_heads(node)
        if heads is not None:
            result.append((render_payload(heads[0].formula.payload), _measure(node)))
        stack.extend(reversed(node.children))
    return result


def find_minimal_cut(tableau: Tableau) -> tuple[int, CutMeasure] | None:
    tree = to_subtree(tableau)
    path = _find_cut(tree)
    if path is None:
        return None
    node_id = tableau.root
    site = tree
    for i in path:
        node_id = tableau.nodes[node_id].children[i]
        site = site.children[i]
    return tableau.nodes[node_id].children[0], _measure(site)


def _derive(
    start: SignedFormula, target: SignedFormula, logic: LogicSpec, depth: int = 4
) -> list[tuple[SignedFormula, Rule, SignedFormula]] | None:
    """Shortest chain of one-premise rules leading from start to target."""
    if start == target:
        return []
    queue = deque([(start, [])])
    while queue:
        current, chain = queue.popleft()
        if len(chain) >= depth:
            continue
        for rule, products in linear_products(current, logic):
            for product in products:
                step = [*chain, (product, rule, current)]
                if product == target:
                    return step
                queue.append((product, step))
    return None


def _chain(
    steps: Sequence[tuple[SignedFormula, Rule, SignedFormula]],
    tail: tuple[Subtree, ...],
) -> tuple[Subtree, ...]:
    children = tail
    for formula, rule, premise in reversed(steps):
        children = (Subtree(formula, rule, (premise,), children),)
    return children


class CutEliminator:
    def __init__(
        self,
        tableau: Tableau,
        logic: LogicSpec,
        cs: ConstantSpecification,
        max_steps: int = 10**6,
        verify_each_step: bool = False,
    ):
        self.tableau = tableau
        self.logic = logic
        self.cs = cs
        self.max_steps = max_steps
        self.verify_each_step = verify_each_step
        roots = formula_roots(tableau.root_formulas())
        self.gate = AnalyticScope.build(roots, cs, tableau.scope)
        self.trace: list[TraceEntry] = []

    def _closed(self, context: Sequence[SignedFormula]) -> bool:
        return closure_status(context, self.cs) is not None

    def _head(
        self,
        sf: SignedFormula,
        context: Sequence[SignedFormula],
        children: tuple[Subtree, ...],
    ) -> Subtree:
        if self._closed([*context, sf]):
            children = ()
        return Subtree(sf, Rule.CUT, (), children)

    def _cut(
        self,
        pivot: Payload,
        context: Sequence[SignedFormula],
        t_children: tuple[Subtree, ...],
        f_children: tuple[Subtree, ...],
    ) -> tuple[Subtree, Subtree]:
        return (
            self._head(T(pivot), context, t_children),
            self._head(F(pivot), context, f_children),
        )

    def run(self) -> Tableau:
        tree = to_subtree(self.tableau)
        if not self._all_closed(tree, []):
            raise InvalidProof("Cut elimination needs a closed tableau")
        steps = 0
        while True:
            path = _find_cut(tree)
            if path is None:
                break
            steps += 1
            if steps > self.max_steps:
                raise ResourceExhausted(
                    f"Cut elimination exceeded {self.max_steps} rewrite steps"
                )
            tree = self._rewrite_at(tree, path, [])
            if self.verify_each_step and not self._all_closed(tree, []):
                raise InvalidProof(
                    f"Rewrite {steps} ({self.trace[-1].case}) left an open branch"
                )
        logger.info("cut elimination finished after %d rewrites", steps)
        return to_tableau(tree, self.tableau.scope)

    def _all_closed(self, tree: Subtree, context: list[SignedFormula]) -> bool:
        context = [*context, tree.formula]
        if not tree.children:
            return self._closed(context)
        return all(self._all_closed(c, context) for c in tree.children)

    def _rewrite_at(
        self, tree: Subtree, path: list[int], context: list[SignedFormula]
    ) -> Subtree:
        context = [*context, tree.formula]
        if not path:
            return tree.with_children(self._rewrite(tree, context))
        i = path[0]
        children = list(tree.children)
        children[i] = self._rewrite_at(children[i], path[1:], context)
        return tree.with_children(tuple(children))

    def _record(
        self, case: str, site: Subtree, pivot: Payload, children: tuple[Subtree, ...]
    ) -> tuple[Subtree, ...]:
        replacements = _all_cuts(site.with_children(children))
        entry = TraceEntry(
            case, render_payload(pivot), _measure(site), tuple(replacements)
        )
        logger.debug("%s", entry)
        self.trace.append(entry)
        return children

    def _rewrite(
        self, site: Subtree, theta: list[SignedFormula]
    ) -> tuple[Subtree, ...]:
        heads = _cut_heads(site)
        assert heads is not None
        t_head, f_head = heads
        pivot = t_head.formula.payload
        if t_head.formula.complement() != f_head.formula:
            raise MalformedCut(
                f"Cut children {t_head.formula} and {f_head.formula} do not complement"
            )
        if not t_head.children or not f_head.children:
            return self._branch_end(site, theta, t_head, f_head, pivot)
        top = t_head.children[0]
        if top.rule == Rule.APP and t_head.formula in top.premises:
            assert isinstance(pivot, Evidence)
            if not self.gate.allows_pbe(pivot):
                raise MalformedCut(f"Cut on {render_payload(pivot)} is not analytic")
            children = (t_head.with_rule(Rule.PBE), f_head.with_rule(Rule.PBE))
            return self._record("III.pbe", site, pivot, children)
        theta_set = set(theta)
        for side in (t_head, f_head):
            tops = side.children
            if all(p in theta_set for c in tops for p in c.premises):
                return self._permute(site, theta, t_head, f_head, side, pivot)
        for side in (t_head, f_head):
            for c in side.children:
                if any(p not in theta_set and p != side.formula for p in c.premises):
                    raise MalformedCut(f"Premise of {c.formula} is not on its branch")
        if isinstance(pivot, Implies):
            return self._implication(site, theta, t_head, f_head, pivot)
        return self._principal(site, theta, t_head, f_head, pivot)

    def _branch_end(self, site, theta, t_head, f_head, pivot) -> tuple[Subtree, ...]:
        if self._closed(theta):
            return self._record("I", site, pivot, ())
        for leaf, other in ((t_head, f_head), (f_head, t_head)):
            if leaf.children:
                continue
            closure = closure_against(leaf.formula, set(theta), self.cs)
            if closure is None:
                continue
            if closure.reason == "cs":
                children = (t_head.with_rule(Rule.PB), f_head.with_rule(Rule.PB))
                return self._record("I.pb", site, pivot, children)
            if closure.reason == "negation-pair":
                children = self._negation_end(leaf, other, theta)
                return self._record("I.neg", site, pivot, children)
            # the other head is redundant: its formula is in theta, or it is F _|_
            return self._record("I", site, pivot, other.children)
        raise MalformedCut(f"Open branch below the cut on {render_payload(pivot)}")

    def _negation_end(
        self, leaf: Subtree, other: Subtree, theta
    ) -> tuple[Subtree, ...]:
        """The leaf head meets its formula negated under the same sign in theta."""
        sign, a = leaf.formula.sign, leaf.formula.payload
        negated = SignedFormula(sign, Neg(a))
        if negated in theta:
            # other is the product of decomposing the negation
            rule = Rule.T_NEG if sign else Rule.F_NEG
            return (Subtree(other.formula, rule, (negated,), other.children),)
        assert isinstance(a, Neg)
        return _without(other.children, other.formula)

    def _permute(self, site, theta, t_head, f_head, side, pivot) -> tuple[Subtree, ...]:
        tops = side.children
        new = []
        for top in tops:
            context = [*theta, top.formula]
            if side is t_head:
                below = self._cut(pivot, context, top.children, f_head.children)
            else:
                below = self._cut(pivot, context, t_head.children, top.children)
            if self._closed(context):
                below = ()
            new.append(top.with_children(below))
        return self._record("II", site, pivot, tuple(new))

    def _implication(
        self, site, theta, t_head, f_head, pivot: Implies
    ) -> tuple[Subtree, ...]:
        a, b = pivot.left, pivot.right
        split = {c.formula: c for c in t_head.children}
        if F(a) not in split or T(b) not in split:
            raise MalformedCut(f"Cut on {render_formula(pivot)} lacks its (T->) split")
        fx = F(pivot)

        def f_imp(sf: SignedFormula) -> Subtree:
            return Subtree(sf, Rule.F_IMP, (fx,))

        ta, tb, fb = [*theta, T(a)], [*theta, T(a), T(b)], [*theta, T(a), F(b)]
        stripped = f_head.children
        while (
            len(stripped) == 1
            and stripped[0].rule == Rule.F_IMP
            and stripped[0].premises == (fx,)
            and stripped[0].formula in (T(a), F(b))
        ):
            stripped = stripped[0].children
        t_split = (
            Subtree(F(a), Rule.T_IMP, (T(pivot),)),
            Subtree(T(b), Rule.T_IMP, (T(pivot),)),
        )
        tb_fork = self._head(
            T(b), ta, self._cut(pivot, tb, split[T(b)].children, (f_imp(F(b)),))
        )
        fb_fork = self._head(F(b), ta, self._cut(pivot, fb, t_split, stripped))
        ta_fork = self._head(T(a), theta, (tb_fork, fb_fork))
        fa_context = [*theta, F(a)]
        fa_fork = self._head(
            F(a),
            theta,
            self._cut(pivot, fa_context, split[F(a)].children, (f_imp(T(a)),)),
        )
        return self._record("III.imp", site, pivot, (ta_fork, fa_fork))

    def _close_or_cut(self, context, pivot, t_rest, beta_node) -> tuple[Subtree, ...]:
        if self._closed(context):
            return ()
        beta_leaf = Subtree(beta_node.formula, beta_node.rule, beta_node.premises)
        return self._cut(pivot, context, t_rest, (beta_leaf,))

    def _principal(self, site, theta, t_head, f_head, pivot) -> tuple[Subtree, ...]:
        if len(t_head.children) != 1 or len(f_head.children) != 1:
            raise MalformedCut(
                f"No principal rewrite for the cut on {render_payload(pivot)}"
            )
        alpha_node, beta_node = t_head.children[0], f_head.children[0]
        alpha, beta = alpha_node.formula, beta_node.formula
        neg_beta = beta.complement()
        case = f"III.{alpha_node.rule}/{beta_node.rule}"

        beta_context = [*theta, beta]
        beta_fork = self._head(
            beta,
            theta,
            self._cut(pivot, beta_context, t_head.children, beta_node.children),
        )
        context = [*theta, neg_beta]
        chain = _derive(neg_beta, alpha, self.logic)
        if chain is not None:
            derived = [*context, *(sf for sf, _, _ in chain)]
            tail = self._close_or_cut(derived, pivot, alpha_node.children, beta_node)
            neg_fork = self._head(neg_beta, theta, _chain(chain, tail))
        else:
            back = _derive(alpha.complement(), beta, self.logic)
            if back is None:
                raise MalformedCut(
                    f"No principal rewrite for the cut on {render_payload(pivot)}"
                    f" ({case})"
                )
            alpha_tail = self._close_or_cut(
                [*context, alpha], pivot, alpha_node.children, beta_node
            )
            alpha_fork = self._head(alpha, context, alpha_tail)

            refute = self._head(alpha.complement(), context, _chain(back, ()))
            inner = (alpha_fork, refute) if alpha.sign else (refute, alpha_fork)
            neg_fork = self._head(neg_beta, theta, inner)
        children = (beta_fork, neg_fork) if beta.sign else (neg_fork, beta_fork)
        return self._record(case, site, pivot, children)


def eliminate_cuts(
    tableau: Tableau,
    logic: LogicSpec,
    cs: ConstantSpecification,
    max_steps: int = 10**6,
    verify_each_step: bool = False,
) -> Tableau:
    return CutEliminator(tableau, logic, cs, max_steps, verify_each_step).run()


def cut_step_trace(
    tableau: Tableau,
    logic: LogicSpec,
    cs: ConstantSpecification,
    max_steps: int = 10**6,
) -> list[TraceEntry]:
    eliminator = CutEliminator(tableau, logic, cs, max_steps)
    eliminator.run()
    return eliminator.trace


@dataclass(frozen=True)
class HilbertLine:
    formula: Formula
    justification: str
    refs: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.justification == "MP":
            i, j = self.refs
            return f"{render_formula(self.formula)} [MP {i + 1} {j + 1}]"
        return f"{render_formula(self.formula)} [{self.justification}]"


@dataclass(frozen=True)
class HilbertProof:
    lines: tuple[HilbertLine, ...]

    def __len__(self) -> int:
        return len(self.lines)

    def render(self) -> str:
        return "\n".join(f"{i}. {line}" for i, line in enumerate(self.lines, start=1))


def parse_hilbert(text: str) -> HilbertProof:
    lines = []
    for raw in text.splitlines():
        raw = raw.split("#", 1)[0]
        if not raw.strip():
            continue
        match = HILBERT_LINE.match(raw)
        if not match:
            raise InvalidProof(f"Cannot read Hilbert line {raw.strip()!r}")
        number, formula_text, justification = match.groups()
        if int(number) != len(lines) + 1:
            raise InvalidProof(f"Hilbert line {number} is out of sequence")
        try:
            formula = parse_formula(formula_text)
        except FormulaSyntaxError as e:
            raise InvalidProof(f"Hilbert line {number}: {e}") from e
        words = justification.split() or [""]
        if words[0] == "MP":
            if len(words) != 3 or not all(w.isdigit() for w in words[1:]):
                raise InvalidProof(f"Hilbert line {number}: MP needs two line numbers")
            refs = (int(words[1]) - 1, int(words[2]) - 1)
            lines.append(HilbertLine(formula, "MP", refs))
        elif len(words) == 1 and (words[0] == "IAN" or words[0] in AXIOM_NAMES):
            lines.append(HilbertLine(formula, words[0]))
        else:
            raise InvalidProof(
                f"Hilbert line {number}: unknown justification {justification!r}"
            )
    if not lines:
        raise InvalidProof("Empty Hilbert proof")
    return HilbertProof(tuple(lines))


def load_hilbert(path: str | Path) -> HilbertProof:
    with open(path, encoding="utf-8") as f:
        return parse_hilbert(f.read())


def validate_hilbert(
    hp: HilbertProof, logic: LogicSpec, cs: ConstantSpecification
) -> None:
    for k, line in enumerate(hp.lines):
        label = f"Hilbert line {k + 1}"
        try:
            check_signature(line.formula, logic)
        except SignatureError as e:
            raise InvalidProof(f"{label}: {e}") from e
        if line.justification == "MP":
            i, j = line.refs
            if not (0 <= i < k and 0 <= j < k):
                raise InvalidProof(f"{label}: MP must cite earlier lines")
            if hp.lines[j].formula != Implies(hp.lines[i].formula, line.formula):
                raise InvalidProof(
                    f"{label}: line {j + 1} is not line {i + 1} -> line {k + 1}"
                )
        elif line.justification == "IAN":
            if line.formula not in cs:
                raise InvalidProof(
                    f"{label}: {render_formula(line.formula)} is not in the "
                    "constant specification"
                )
        elif not matches_scheme(line.formula, line.justification, logic):
            raise InvalidProof(
                f"{label}: not an instance of {line.justification} in {logic.name}"
            )


class _Compiler:
    def __init__(
        self,
        hp: HilbertProof,
        logic: LogicSpec,
        cs: ConstantSpecification,
        limits: Limits,
    ):
        self.hp = hp
        self.logic = logic
        self.cs = cs
        self.limits = limits
        self.cache: dict[int, tuple[Subtree, ...]] = {}

    def below(self, k: int) -> tuple[Subtree, ...]:
        """Closed continuation of a branch that carries F line k."""
        if k not in self.cache:
            self.cache[k] = self._compile(k)
        return self.cache[k]

    def _compile(self, k: int) -> tuple[Subtree, ...]:
        line = self.hp.lines[k]
        if line.justification == "IAN":
            return ()
        if line.justification == "MP":
            i, j = line.refs
            b, a = self.hp.lines[i].formula, line.formula
            imp = Implies(b, a)
            split = (
                Subtree(F(b), Rule.T_IMP, (T(imp),)),
                Subtree(T(a), Rule.T_IMP, (T(imp),)),
            )
            inner = (
                Subtree(T(imp), Rule.CUT, (), split),
                Subtree(F(imp), Rule.CUT, (), self.below(j)),
            )
            return (
                Subtree(T(b), Rule.CUT, (), inner),
                Subtree(F(b), Rule.CUT, (), self.below(i)),
            )
        verdict = search(
            [F(line.formula)], self.logic, self.cs, self.limits, bivalence=False
        )

        if not isinstance(verdict, Valid):
            raise InvalidProof(f"Axiom line {k + 1} has no direct refutation")
        return to_subtree(verdict.proof).children


def hilbert_to_tableau(
    hp: HilbertProof,
    goal_index: int,
    logic: LogicSpec,
    cs: ConstantSpecification,
    limits: Limits | None = None,
) -> Tableau:
    validate_hilbert(hp, logic, cs)
    if not 0 <= goal_index < len(hp):
        raise InvalidProof(f"No Hilbert line {goal_index + 1}")
    compiler = _Compiler(hp, logic, cs, limits or Limits())
    goal = hp.lines[goal_index].formula
    tree = Subtree(F(goal), Rule.ROOT, (), compiler.below(goal_index))
    scope = []
    for line in hp.lines:
        if line.formula != goal and line.formula not in scope:
            scope.append(line.formula)
    return to_tableau(tree, tuple(scope))
