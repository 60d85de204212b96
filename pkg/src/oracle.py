# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

"""Cross-checks for the prover: the forgetful projection into modal logic,
a small loop-checking modal tableau for K, T, D, K4 and S4, and seeded
generators for goals, constant specifications and Hilbert proofs."""

from __future__ import annotations

import logging
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from src.cutelim import HilbertLine, HilbertProof
from src.logic_cs import ConstantSpecification, LogicSpec
from src.syntax import (
    App,
    Bang,
    Bottom,
    Const,
    Formula,
    Implies,
    Just,
    Neg,
    Prop,
    Query,
    Sum,
    Term,
    WQuery,
    make_term_symbol,
    size,
    term_size,
)

logger = logging.getLogger(__name__)


class UnsupportedLogic(ValueError):
    pass


@dataclass(frozen=True)
class MProp:
    name: str


@dataclass(frozen=True)
class MBottom:
    pass


@dataclass(frozen=True)
class MNeg:
    inner: ModalFormula


@dataclass(frozen=True)
class MImplies:
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class Box:
    inner: ModalFormula


ModalFormula = MProp | MBottom | MNeg | MImplies | Box
Signed = tuple[bool, ModalFormula]


@dataclass(frozen=True)
class ModalSystem:
    name: str
    reflexive: bool = False
    serial: bool = False
    transitive: bool = False


MODAL_SYSTEMS = {
    "K": ModalSystem("K"),
    "T": ModalSystem("T", reflexive=True),
    "D": ModalSystem("D", serial=True),
    "K4": ModalSystem("K4", transitive=True),
    "S4": ModalSystem("S4", reflexive=True, transitive=True),
}
MODAL_ALIASES = {"KT": "T", "KD": "D", "KT4": "S4"}
COUNTERPARTS = {"J": "K", "JT": "T", "JD": "D", "J4": "K4", "JT4": "S4"}


def forgetful_projection(f: Formula) -> ModalFormula:
    if isinstance(f, Prop):
        return MProp(f.name)
    if isinstance(f, Bottom):
        return MBottom()
    if isinstance(f, Neg):
        return MNeg(forgetful_projection(f.inner))
    if isinstance(f, Implies):
        return MImplies(forgetful_projection(f.left), forgetful_projection(f.right))
    return Box(forgetful_projection(f.body))


def render_modal(f: ModalFormula) -> str:
    if isinstance(f, MProp):
        return f.name
    if isinstance(f, MBottom):
        return "_|_"
    if isinstance(f, MImplies):
        left = render_modal(f.left)
        if isinstance(f.left, MImplies):
            left = f"({left})"
        return f"{left} -> {render_modal(f.right)}"
    inner = render_modal(f.inner)
    if isinstance(f.inner, MImplies):
        inner = f"({inner})"
    return ("~" if isinstance(f, MNeg) else "[]") + inner


def counterpart(logic: LogicSpec) -> str:
    try:
        return COUNTERPARTS[logic.name]
    except KeyError:
        raise UnsupportedLogic(
            f"No modal counterpart is checked for {logic.name}"
        ) from None


def _system(name: str) -> ModalSystem:
    key = name.strip().upper()
    key = MODAL_ALIASES.get(key, key)
    if key not in MODAL_SYSTEMS:
        raise UnsupportedLogic(f"Unsupported modal logic {name!r}")
    return MODAL_SYSTEMS[key]


def _key(sf: Signed) -> tuple[str, bool]:
    return render_modal(sf[1]), sf[0]


def _alternatives(sf: Signed, system: ModalSystem) -> list[frozenset[Signed]] | None:
    sign, f = sf
    if isinstance(f, MNeg):
        return [frozenset({(not sign, f.inner)})]
    if isinstance(f, MImplies):
        if sign:
            return [frozenset({(False, f.left)}), frozenset({(True, f.right)})]
        return [frozenset({(True, f.left), (False, f.right)})]
    if isinstance(f, Box) and sign and system.reflexive:
        return [frozenset({(True, f.inner)})]
    return None


def _closed(world: frozenset[Signed]) -> bool:
    if (True, MBottom()) in world:
        return True
    return any((not sign, f) in world for sign, f in world)


def _saturations(
    world: frozenset[Signed], system: ModalSystem
) -> Iterator[frozenset[Signed]]:
    """Open propositional saturations of one world's label set."""
    if _closed(world):
        return
    for sf in sorted(world, key=_key):
        alternatives = _alternatives(sf, system)
        if alternatives is None or any(alt <= world for alt in alternatives):
            continue
        for alt in alternatives:
            yield from _saturations(world | alt, system)
        return
    yield world


class _ModalTableau:
    def __init__(self, system: ModalSystem):
        self.system = system
        self.worlds = 0

    def satisfiable(
        self, seed: frozenset[Signed], history: tuple[frozenset[Signed], ...] = ()
    ) -> bool:
        if self.system.transitive and seed in history:
            # blocked by an ancestor with the same label set
            return True
        self.worlds += 1
        history = (*history, seed)
        for world in _saturations(seed, self.system):
            demands = self._successors(world)
            if all(self.satisfiable(demand, history) for demand in demands):
                return True
        return False

    def _successors(self, world: frozenset[Signed]) -> list[frozenset[Signed]]:
        boxed = [f.inner for sign, f in world if sign and isinstance(f, Box)]
        carried: set[Signed] = {(True, b) for b in boxed}
        if self.system.transitive:
            carried |= {(True, Box(b)) for b in boxed}
        demands = [
            frozenset({(False, f.inner), *carried})
            for sign, f in sorted(world, key=_key)
            if not sign and isinstance(f, Box)
        ]
        if self.system.serial and not demands and carried:
            demands.append(frozenset(carried))
        return demands


def modal_prove(f: ModalFormula, ml: str) -> bool:
    system = _system(ml)
    tableau = _ModalTableau(system)
    valid = not tableau.satisfiable(frozenset({(False, f)}))
    logger.debug(
        "%s in %s: %s after %d worlds",
        render_modal(f),
        system.name,
        "valid" if valid else "invalid",
        tableau.worlds,
    )
    return valid


def check_projection(goal: Formula, logic: LogicSpec) -> bool:
    return modal_prove(forgetful_projection(goal), counterpart(logic))


def _random_term(
    rng: random.Random, budget: int, ops: Sequence[str], pool: Sequence[str]
) -> Term:
    unary = [op for op in ops if op in ("!", "?", "??")] if budget >= 2 else []
    binary = [op for op in ops if op in ("*", "+")] if budget >= 3 else []
    if not (unary or binary) or rng.random() < 0.4:
        return make_term_symbol(rng.choice(pool))
    op = rng.choice([*unary, *binary])
    if op in binary:
        left = _random_term(rng, rng.randint(1, budget - 2), ops, pool)
        right = _random_term(rng, budget - 1 - term_size(left), ops, pool)
        return App(left, right) if op == "*" else Sum(left, right)
    inner = _random_term(rng, budget - 1, ops, pool)
    return {"!": Bang, "?": Query, "??": WQuery}[op](inner)


def _random_formula(
    rng: random.Random,
    budget: int,
    ops: Sequence[str],
    atoms: Sequence[str],
    pool: Sequence[str],
) -> Formula:
    kinds = ["atom"]
    if budget >= 2:
        kinds.append("neg")
    if budget >= 3:
        kinds += ["imp", "imp", "just", "just"]
    kind = rng.choice(kinds)
    if kind == "atom":
        return Bottom() if rng.random() < 0.1 else Prop(rng.choice(atoms))
    if kind == "neg":
        return Neg(_random_formula(rng, budget - 1, ops, atoms, pool))
    if kind == "imp":
        left = _random_formula(rng, rng.randint(1, budget - 2), ops, atoms, pool)
        right = _random_formula(rng, budget - 1 - size(left), ops, atoms, pool)
        return Implies(left, right)
    term = _random_term(rng, rng.randint(1, budget - 2), ops, pool)
    body = _random_formula(rng, budget - 1 - term_size(term), ops, atoms, pool)
    return Just(term, body)


def random_goal(
    seed: int,
    size_bound: int,
    signature: frozenset[str] | Sequence[str],
    atoms: Sequence[str] = ("P", "Q"),
    terms: Sequence[str] = ("x", "y", "c"),
) -> Formula:
    if size_bound < 1:
        raise ValueError("size_bound must be positive")
    rng = random.Random(seed)
    return _random_formula(rng, size_bound, sorted(signature), atoms, terms)


def _pick(rng: random.Random, atoms: Sequence[str]) -> Formula:
    atom = Prop(rng.choice(atoms))
    return Neg(atom) if rng.random() < 0.25 else atom


def random_axiom_instance(
    rng: random.Random,
    scheme: str,
    atoms: Sequence[str] = ("P", "Q"),
    terms: Sequence[str] = ("x", "y", "c"),
) -> Formula:
    """An instance of the named scheme over the given atoms and term symbols."""
    a, b, c = (_pick(rng, atoms) for _ in range(3))
    s, t = (make_term_symbol(rng.choice(terms)) for _ in range(2))
    if scheme == "Taut":
        return rng.choice(
            [
                Implies(a, Implies(b, a)),
                Implies(
                    Implies(a, Implies(b, c)),
                    Implies(Implies(a, b), Implies(a, c)),
                ),
                Implies(Implies(Neg(b), Neg(a)), Implies(Implies(Neg(b), a), b)),
            ]
        )
    if scheme == "Sum-left":
        return Implies(Just(s, a), Just(Sum(s, t), a))
    if scheme == "Sum-right":
        return Implies(Just(t, a), Just(Sum(s, t), a))
    if scheme == "jK":
        return Implies(Just(s, Implies(a, b)), Implies(Just(t, a), Just(App(s, t), b)))
    if scheme == "jT":
        return Implies(Just(t, a), a)
    if scheme == "jD":
        return Implies(Just(t, Bottom()), Bottom())
    if scheme == "j4":
        return Implies(Just(t, a), Just(Bang(t), Just(t, a)))
    if scheme == "jB":
        return Implies(Neg(a), Just(WQuery(t), Neg(Just(t, a))))
    if scheme == "j5":
        return Implies(Neg(Just(t, a)), Just(Query(t), Neg(Just(t, a))))
    raise ValueError(f"Unknown axiom scheme {scheme!r}")


def random_cs(
    seed: int,
    logic: LogicSpec,
    entries: int = 3,
    atoms: Sequence[str] = ("P", "Q"),
    terms: Sequence[str] = ("x", "y", "c"),
) -> ConstantSpecification:
    """Single-constant entries c:A for random axiom instances A of the logic."""
    rng = random.Random(seed)
    constants = [t for t in terms if isinstance(make_term_symbol(t), Const)] or ["c"]
    result = set()
    for _ in range(entries):
        axiom = random_axiom_instance(rng, rng.choice(logic.schemes()), atoms, terms)
        result.add(Just(Const(rng.choice(constants)), axiom))
    return ConstantSpecification(frozenset(result))


class _Draft:
    """Hilbert lines under construction, with the MP depth of each line."""

    def __init__(self) -> None:
        self.lines: list[HilbertLine] = []
        self.depths: list[int] = []

    def add(
        self, formula: Formula, justification: str, refs: tuple[int, ...] = ()
    ) -> int:
        depth = 1 + max(self.depths[r] for r in refs) if refs else 0
        self.lines.append(HilbertLine(formula, justification, refs))
        self.depths.append(depth)
        return len(self.lines) - 1

    def mp(self, minor: int, major: int) -> int:
        implication = self.lines[major].formula
        assert isinstance(implication, Implies)
        assert implication.left == self.lines[minor].formula
        return self.add(implication.right, "MP", (minor, major))

    def composable(self, max_depth: int) -> list[tuple[int, int]]:
        """Pairs of lines X -> Y and Y -> Z that fit a composition step."""
        pairs = []
        for i, first in enumerate(self.lines):
            if not isinstance(first.formula, Implies) or self.depths[i] + 2 > max_depth:
                continue
            for j, second in enumerate(self.lines):
                if (
                    i != j
                    and isinstance(second.formula, Implies)
                    and second.formula.left == first.formula.right
                    and self.depths[j] + 1 <= max_depth
                ):
                    pairs.append((i, j))
        return pairs


def _major_premises(
    a: Formula,
    rng: random.Random,
    logic: LogicSpec,
    atoms: Sequence[str],
    terms: Sequence[str],
) -> list[tuple[Formula, str]]:
    """Axiom instances A -> C usable as the major premise of an MP on A."""
    b = _pick(rng, atoms)
    options = [
        (Implies(a, Implies(b, a)), "Taut"),
        (Implies(a, Neg(Neg(a))), "Taut"),
        (Implies(a, Implies(Neg(a), b)), "Taut"),
    ]
    if isinstance(a, Implies):
        # contraposition
        options.append((Implies(a, Implies(Neg(a.right), Neg(a.left))), "Taut"))
        if isinstance(a.right, Implies):
            x, y, z = a.left, a.right.left, a.right.right
            options.append((Implies(a, Implies(Implies(x, y), Implies(x, z))), "Taut"))
    if isinstance(a, Just):
        other = make_term_symbol(rng.choice(terms))
        options.append((Implies(a, Just(Sum(a.term, other), a.body)), "Sum-left"))
        if isinstance(a.body, Implies):
            left, right = a.body.left, a.body.right
            conclusion = Implies(Just(other, left), Just(App(a.term, other), right))
            options.append((Implies(a, conclusion), "jK"))
        if "jT" in logic.axioms:
            options.append((Implies(a, a.body), "jT"))
        if "j4" in logic.axioms:
            options.append((Implies(a, Just(Bang(a.term), a)), "j4"))
    return options


def random_hilbert_proof(
    seed: int,
    logic: LogicSpec,
    max_lines: int = 8,
    max_depth: int = 4,
    atoms: Sequence[str] = ("P", "Q"),
    terms: Sequence[str] = ("x", "y", "c"),
) -> tuple[HilbertProof, ConstantSpecification]:
    """A valid Hilbert proof whose last line is the goal, with the CS it needs.

    The proof starts either from an axiom instance or from a necessitated
    tautology pushed through jK. Each further step applies MP to any earlier
    line of small enough depth, with a major premise drawn from weakening,
    double negation, contraposition, S-distribution or the Sum, jK, jT and j4
    schemes, or composes two earlier lines X -> Y and Y -> Z into X -> Z.
    """
    if max_lines < 1 or max_depth < 0:
        raise ValueError("max_lines must be positive and max_depth non-negative")
    rng = random.Random(seed)
    draft = _Draft()
    cs_entries: set[Formula] = set()
    if max_lines >= 3 and max_depth >= 1 and rng.random() < 0.4:
        body = random_axiom_instance(rng, "Taut", atoms, terms)
        assert isinstance(body, Implies)
        constant = Const("c")
        necessitated = Just(constant, body)
        cs_entries.add(necessitated)
        variable = make_term_symbol(rng.choice([t for t in terms if t >= "s"] or ["x"]))
        conclusion = Implies(
            Just(variable, body.left), Just(App(constant, variable), body.right)
        )
        ian = draft.add(necessitated, "IAN")
        draft.mp(ian, draft.add(Implies(necessitated, conclusion), "jK"))
    else:
        scheme = rng.choice(logic.schemes())
        draft.add(random_axiom_instance(rng, scheme, atoms, terms), scheme)
    while len(draft.lines) + 2 <= max_lines and rng.random() < 0.85:
        pairs = draft.composable(max_depth)
        if pairs and len(draft.lines) + 3 <= max_lines and rng.random() < 0.4:
            i, j = rng.choice(pairs)
            first, second = draft.lines[i].formula, draft.lines[j].formula
            assert isinstance(first, Implies) and isinstance(second, Implies)
            composed = Implies(first.left, second.right)
            taut = draft.add(Implies(first, Implies(second, composed)), "Taut")
            draft.mp(j, draft.mp(i, taut))
            continue
        candidates = [k for k, depth in enumerate(draft.depths) if depth < max_depth]
        if not candidates:
            break
        last = len(draft.lines) - 1
        if last in candidates and rng.random() < 0.6:
            minor = last
        else:
            minor = rng.choice(candidates)
        formula, scheme = rng.choice(
            _major_premises(draft.lines[minor].formula, rng, logic, atoms, terms)
        )
        draft.mp(minor, draft.add(formula, scheme))
    logger.debug(
        "generated Hilbert proof of %d lines (seed %d)", len(draft.lines), seed
    )
    cs = ConstantSpecification(frozenset(cs_entries))
    return HilbertProof(tuple(draft.lines)), cs

