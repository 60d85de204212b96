# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from pathlib import Path

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
    formula_operators,
    formula_terms,
    parse_formula,
    render_formula,
    subformulas,
    subterms,
)

EXTRA_AXIOMS = ("jT", "jD", "j4", "jB", "j5")
SUFFIXES = {"T": "jT", "D": "jD", "4": "j4", "B": "jB", "5": "j5"}
ALIASES = {"LP": "JT4"}
BASE_SCHEMES = ("Taut", "Sum-left", "Sum-right", "jK")


class ConfigError(ValueError):
    pass


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class LogicSpec:
    axioms: frozenset[str] = frozenset()

    def __post_init__(self):
        unknown = set(self.axioms) - set(EXTRA_AXIOMS)
        if unknown:
            raise ConfigError(f"Unknown axioms: {sorted(unknown)}")

    @property
    def signature(self) -> frozenset[str]:
        ops = {"*", "+"}
        if "j4" in self.axioms:
            ops.add("!")
        if "jB" in self.axioms:
            ops.add("??")
        if "j5" in self.axioms:
            ops.add("?")
        return frozenset(ops)

    @property
    def name(self) -> str:
        inverse = {v: k for k, v in SUFFIXES.items()}
        return "J" + "".join(inverse[a] for a in EXTRA_AXIOMS if a in self.axioms)

    def schemes(self) -> tuple[str, ...]:
        return BASE_SCHEMES + tuple(a for a in EXTRA_AXIOMS if a in self.axioms)

    def __str__(self) -> str:
        return self.name


def parse_logic(name: str) -> LogicSpec:
    name = ALIASES.get(name.strip().upper(), name.strip().upper())
    if not name.startswith("J"):
        raise ConfigError(f"Logic name must start with 'J': {name!r}")
    order = list(SUFFIXES)
    last = -1
    axioms = set()
    for letter in name[1:]:
        if letter not in SUFFIXES:
            raise ConfigError(f"Unknown axiom letter {letter!r} in logic {name!r}")
        index = order.index(letter)
        if index <= last:
            raise ConfigError(
                f"Axiom letters of {name!r} must follow the order T, D, 4, B, 5"
            )
        last = index
        axioms.add(SUFFIXES[letter])
    return LogicSpec(frozenset(axioms))


def check_signature(f: Formula, logic: LogicSpec) -> None:
    extra = formula_operators(f) - logic.signature
    if extra:
        raise SignatureError(
            f"Operators {sorted(extra)} in {render_formula(f)} "
            f"are not in the signature of {logic.name}"
        )


def _truth_atoms(f: Formula, acc: list[Formula]) -> None:
    if isinstance(f, (Prop, Just)):
        if f not in acc:
            acc.append(f)
    elif isinstance(f, Neg):
        _truth_atoms(f.inner, acc)
    elif isinstance(f, Implies):
        _truth_atoms(f.left, acc)
        _truth_atoms(f.right, acc)


def _truth_value(f: Formula, assignment: dict[Formula, bool]) -> bool:
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Neg):
        return not _truth_value(f.inner, assignment)
    if isinstance(f, Implies):
        return not _truth_value(f.left, assignment) or _truth_value(f.right, assignment)
    return assignment[f]


def is_tautology(f: Formula) -> bool:
    atoms: list[Formula] = []
    _truth_atoms(f, atoms)
    for values in product((False, True), repeat=len(atoms)):
        if not _truth_value(f, dict(zip(atoms, values))):
            return False
    return True


def _match_scheme(f: Formula, scheme: str) -> bool:
    if scheme == "Taut":
        return is_tautology(f)
    if not isinstance(f, Implies):
        return False
    left, right = f.left, f.right
    if scheme in ("Sum-left", "Sum-right"):
        if not (isinstance(left, Just) and isinstance(right, Just)):
            return False
        if left.body != right.body or not isinstance(right.term, Sum):
            return False
        side = right.term.left if scheme == "Sum-left" else right.term.right
        return side == left.term
    if scheme == "jK":
        return (
            isinstance(left, Just)
            and isinstance(left.body, Implies)
            and isinstance(right, Implies)
            and isinstance(right.left, Just)
            and isinstance(right.right, Just)
            and right.left.body == left.body.left
            and right.right.body == left.body.right
            and right.right.term == App(left.term, right.left.term)
        )
    if scheme == "jT":
        return isinstance(left, Just) and left.body == right
    if scheme == "jD":
        return isinstance(left, Just) and left.body == Bottom() and right == Bottom()
    if scheme == "j4":
        return (
            isinstance(left, Just)
            and right == Just(Bang(left.term), left)
        )
    if scheme == "jB":
        return (
            isinstance(left, Neg)
            and isinstance(right, Just)
            and isinstance(right.term, WQuery)
            and right.body == Neg(Just(right.term.inner, left.inner))
        )
    if scheme == "j5":
        return (
            isinstance(left, Neg)
            and isinstance(left.inner, Just)
            and right == Just(Query(left.inner.term), left)
        )
    raise ConfigError(f"Unknown axiom scheme {scheme!r}")


def matches_scheme(f: Formula, scheme: str, logic: LogicSpec) -> bool:
    if scheme == "Sum":
        return _match_scheme(f, "Sum-left") or _match_scheme(f, "Sum-right")
    if scheme not in logic.schemes():
        return False
    return _match_scheme(f, scheme)


def is_axiom_instance(f: Formula, logic: LogicSpec) -> str | None:
    check_signature(f, logic)
    for scheme in logic.schemes():
        if _match_scheme(f, scheme):
            return scheme
    return None


@dataclass(frozen=True)
class ConstantSpecification:
    entries: frozenset[Formula] = frozenset()

    def __contains__(self, f: object) -> bool:
        return f in self.entries

    def __iter__(self):
        return iter(sorted(self.entries, key=render_formula))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Violation:
    entry: Formula
    reason: str

    def __str__(self) -> str:
        return f"{render_formula(self.entry)}: {self.reason}"


def _peel_constants(f: Formula) -> tuple[list[Const], Formula]:
    constants = []
    while isinstance(f, Just) and isinstance(f.term, Const):
        constants.append(f.term)
        f = f.body
    return constants, f


def validate_cs(cs: ConstantSpecification, logic: LogicSpec) -> list[Violation]:
    violations = []
    for entry in cs:
        constants, axiom = _peel_constants(entry)
        if not constants:
            violations.append(Violation(entry, "not of the form c:A with c a constant"))
            continue
        try:
            scheme = is_axiom_instance(axiom, logic)
        except SignatureError as e:
            violations.append(Violation(entry, str(e)))
            continue
        if scheme is None:
            violations.append(
                Violation(
                    entry,
                    f"body {render_formula(axiom)} is not an axiom of {logic.name}",
                )
            )
        assert isinstance(entry, Just)
        if len(constants) > 1 and entry.body not in cs.entries:
            missing = f"missing {render_formula(entry.body)} (downward closure)"
            violations.append(Violation(entry, missing))

    return violations


def parse_cs(text: str) -> ConstantSpecification:
    entries = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.add(parse_formula(line))
    return ConstantSpecification(frozenset(entries))


def load_cs(path: str | Path, logic: LogicSpec) -> ConstantSpecification:
    with open(path, encoding="utf-8") as f:
        cs = parse_cs(f.read())
    violations = validate_cs(cs, logic)
    if violations:
        details = "; ".join(str(v) for v in violations)
        raise ConfigError(f"Invalid constant specification {path}: {details}")
    return cs


def cs_subformulas(
    root: Formula, cs: ConstantSpecification, scope: tuple[Formula, ...] = ()
) -> frozenset[Formula]:
    result = set(subformulas(root))
    for f in (*scope, *cs.entries):
        result |= subformulas(f)
    return frozenset(result)


def weak_cs_subformulas(
    root: Formula, cs: ConstantSpecification, scope: tuple[Formula, ...] = ()
) -> frozenset[Formula]:
    base = cs_subformulas(root, cs, scope)
    return base | frozenset(Neg(f) for f in base)


def occurring_terms(
    root: Formula, cs: ConstantSpecification, scope: tuple[Formula, ...] = ()
) -> frozenset[Term]:
    result: set[Term] = set()
    for f in (root, *scope, *cs.entries):
        for t in formula_terms(f):
            result |= subterms(t)
    return frozenset(result)
