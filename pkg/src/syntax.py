# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from __future__ import annotations

from dataclasses import dataclass

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    left: Term
    right: Term


@dataclass(frozen=True)
class Sum:
    left: Term
    right: Term


@dataclass(frozen=True)
class Bang:
    inner: Term


@dataclass(frozen=True)
class Query:
    inner: Term


@dataclass(frozen=True)
class WQuery:
    inner: Term


Term = Var | Const | App | Sum | Bang | Query | WQuery


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Neg:
    inner: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Just:
    term: Term
    body: Formula


Formula = Prop | Bottom | Neg | Implies | Just


@dataclass(frozen=True)
class Evidence:
    """The evidential atom [t,A]: t is admissible evidence for A."""

    term: Term
    body: Formula


Payload = Formula | Evidence


@dataclass(frozen=True)
class SignedFormula:
    sign: bool
    payload: Payload

    @property
    def is_evidential(self) -> bool:
        return isinstance(self.payload, Evidence)

    def complement(self) -> SignedFormula:
        return SignedFormula(not self.sign, self.payload)

    def __str__(self) -> str:
        return render_signed(self)


def T(payload: Payload) -> SignedFormula:
    return SignedFormula(True, payload)


def F(payload: Payload) -> SignedFormula:
    return SignedFormula(False, payload)


GRAMMAR = r"""
?formula: imp
?imp: unary
    | unary "->" imp        -> implies
?unary: "~" unary           -> neg
      | term ":" unary      -> just
      | atom
?atom: PROPID               -> prop
     | "_|_"                -> bottom
     | "(" formula ")"

?term: tsum
?tsum: tprod
     | tsum "+" tprod       -> sum
?tprod: tunary
      | tprod "*" tunary    -> app
?tunary: "!" tunary         -> bang
       | "?" "?" tunary     -> wquery
       | "?" qoperand       -> query
       | tatom
?qoperand: "!" tunary       -> bang
         | tatom
?tatom: TERMID              -> termid
       | "(" term ")"

evidence: "[" term "," formula "]"

PROPID: /[A-Z][A-Za-z0-9_]*/
TERMID: /[a-z][A-Za-z0-9_]*/

%import common.WS
%ignore WS
"""


class _Builder(Transformer):
    def implies(self, items):
        return Implies(items[0], items[1])

    def neg(self, items):
        return Neg(items[0])

    def just(self, items):
        return Just(items[0], items[1])

    def prop(self, items):
        return Prop(str(items[0]))

    def bottom(self, items):
        return Bottom()

    def sum(self, items):
        return Sum(items[0], items[1])

    def app(self, items):
        return App(items[0], items[1])

    def bang(self, items):
        return Bang(items[0])

    def wquery(self, items):
        return WQuery(items[0])

    def query(self, items):
        return Query(items[0])

    def termid(self, items):
        return make_term_symbol(str(items[0]))

    def evidence(self, items):
        return Evidence(items[0], items[1])


_PARSER = Lark(
    GRAMMAR,
    parser="lalr",
    start=["formula", "term", "evidence"],
    transformer=_Builder(),
)


def make_term_symbol(name: str) -> Var | Const:
    # a-r are constants, s-z are variables
    if name[0] <= "r":
        return Const(name)
    return Var(name)


def _parse(text: str, start: str):
    try:
        return _PARSER.parse(text, start=start)
    except UnexpectedInput as e:
        position = getattr(e, "pos_in_stream", None)
        raise FormulaSyntaxError(
            f"Cannot parse {start} {text!r} at position {position}", position
        ) from e


def parse_formula(text: str) -> Formula:
    return _parse(text, "formula")


def parse_term(text: str) -> Term:
    return _parse(text, "term")


def parse_evidence(text: str) -> Evidence:
    return _parse(text, "evidence")


def parse_payload(text: str, evidential: bool) -> Payload:
    return parse_evidence(text) if evidential else parse_formula(text)


def parse_signed(text: str) -> SignedFormula:
    text = text.strip()
    if len(text) < 2 or text[0] not in "TF" or not text[1].isspace():
        raise FormulaSyntaxError(
            f"Signed formula must start with 'T ' or 'F ': {text!r}", 0
        )

    body = text[1:].strip()
    return SignedFormula(text[0] == "T", parse_payload(body, body.startswith("[")))


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Sum):
        right = render_term(t.right)
        if isinstance(t.right, Sum):
            right = f"({right})"
        return f"{render_term(t.left)}+{right}"
    if isinstance(t, App):
        left = render_term(t.left)
        if isinstance(t.left, Sum):
            left = f"({left})"
        right = render_term(t.right)
        if isinstance(t.right, (Sum, App)):
            right = f"({right})"
        return f"{left}*{right}"
    inner = render_term(t.inner)
    if isinstance(t.inner, (Sum, App)):
        inner = f"({inner})"
    if isinstance(t, Bang):
        return "!" + inner
    if isinstance(t, WQuery):
        return "??" + inner
    # two adjacent "?" always read as "??", so a query under a query needs parentheses
    if isinstance(t.inner, (Query, WQuery)):
        inner = f"({inner})"
    return "?" + inner


def _render_operand(f: Formula) -> str:
    text = render_formula(f)
    if isinstance(f, Implies):
        return f"({text})"
    return text


def render_formula(f: Formula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Bottom):
        return "_|_"
    if isinstance(f, Neg):
        return "~" + _render_operand(f.inner)
    if isinstance(f, Just):
        return f"{render_term(f.term)}:{_render_operand(f.body)}"
    return f"{_render_operand(f.left)} -> {render_formula(f.right)}"


def render_evidence(e: Evidence) -> str:
    return f"[{render_term(e.term)}, {render_formula(e.body)}]"


def render_payload(p: Payload) -> str:
    if isinstance(p, Evidence):
        return render_evidence(p)
    return render_formula(p)


def render_signed(sf: SignedFormula) -> str:
    return ("T " if sf.sign else "F ") + render_payload(sf.payload)


def render_unsigned(sf: SignedFormula) -> str:
    if sf.sign:
        return render_payload(sf.payload)
    if isinstance(sf.payload, Evidence):
        return "~" + render_evidence(sf.payload)
    return "~" + _render_operand(sf.payload)


def subformulas(f: Formula) -> frozenset[Formula]:
    result: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in result:
            continue
        result.add(g)
        if isinstance(g, Neg):
            stack.append(g.inner)
        elif isinstance(g, Implies):
            stack.extend((g.left, g.right))
        elif isinstance(g, Just):
            stack.append(g.body)
    return frozenset(result)


def subterms(t: Term) -> frozenset[Term]:
    result: set[Term] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in result:
            continue
        result.add(u)
        if isinstance(u, (App, Sum)):
            stack.extend((u.left, u.right))
        elif isinstance(u, (Bang, Query, WQuery)):
            stack.append(u.inner)
    return frozenset(result)


def formula_terms(f: Formula) -> frozenset[Term]:
    """Terms standing in front of a colon somewhere in f (not subterm-closed)."""
    return frozenset(g.term for g in subformulas(f) if isinstance(g, Just))


def term_size(t: Term) -> int:
    if isinstance(t, (Var, Const)):
        return 1
    if isinstance(t, (App, Sum)):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1 + term_size(t.inner)


def size(f: Formula) -> int:
    if isinstance(f, (Prop, Bottom)):
        return 1
    if isinstance(f, Neg):
        return 1 + size(f.inner)
    if isinstance(f, Implies):
        return 1 + size(f.left) + size(f.right)
    return 1 + term_size(f.term) + size(f.body)


def term_operators(t: Term) -> frozenset[str]:
    names = {App: "*", Sum: "+", Bang: "!", Query: "?", WQuery: "??"}
    return frozenset(names[type(u)] for u in subterms(t) if type(u) in names)


def formula_operators(f: Formula) -> frozenset[str]:
    result: set[str] = set()
    for t in formula_terms(f):
        result |= term_operators(t)
    return frozenset(result)
