# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

from __future__ import annotations

import json
from pathlib import Path

from graphviz import Digraph

from src.engine import (
    Closure,
    Invalid,
    InvalidProof,
    Node,
    ResourceOut,
    Rule,
    Tableau,
    Valid,
    Verdict,
    closure_status,
)
from src.logic_cs import ConstantSpecification
from src.semantics import Model
from src.syntax import (
    Prop,
    SignedFormula,
    parse_payload,
    render_formula,
    render_payload,
    render_signed,
    render_term,
    render_unsigned,
)

CLOSED_MARK = "⊗"


def node_to_json(node: Node) -> dict:
    return {
        "id": node.id,
        "sign": "T" if node.formula.sign else "F",
        "kind": "evidential" if node.formula.is_evidential else "formula",
        "payload": render_payload(node.formula.payload),
        "rule": node.rule.value,
        "premises": list(node.premises),
        "children": list(node.children),
    }


def tableau_to_json(tableau: Tableau) -> dict:
    return {
        "root": tableau.root,
        "nodes": [node_to_json(tableau.nodes[i]) for i in sorted(tableau.nodes)],
    }


def _node_from_json(entry: dict) -> Node:
    try:
        sign = entry["sign"]
        if sign not in ("T", "F"):
            raise InvalidProof(f"Node {entry.get('id')}: sign must be T or F")
        evidential = entry["kind"] == "evidential"
        payload = parse_payload(entry["payload"], evidential)
        return Node(
            int(entry["id"]),
            SignedFormula(sign == "T", payload),
            Rule(entry["rule"]),
            tuple(int(p) for p in entry.get("premises", [])),
            tuple(int(c) for c in entry.get("children", [])),
        )
    except (KeyError, TypeError) as e:
        raise InvalidProof(f"Malformed proof node {entry!r}: {e}") from e
    except InvalidProof:
        raise
    except ValueError as e:
        raise InvalidProof(f"Node {entry.get('id')}: {e}") from e


def tableau_from_json(data: dict) -> Tableau:
    if not isinstance(data, dict) or "nodes" not in data:
        raise InvalidProof("Proof JSON must be an object with a 'nodes' array")
    nodes = {}
    for entry in data["nodes"]:
        node = _node_from_json(entry)
        if node.id in nodes:
            raise InvalidProof(f"Duplicate node id {node.id}")
        nodes[node.id] = node
    if not nodes:
        raise InvalidProof("Proof JSON has no nodes")
    if data.get("scope"):
        # side conditions are judged against the goal and the CS only
        raise InvalidProof("Proof JSON may not widen the analytic scope")
    return Tableau(nodes, int(data.get("root", min(nodes))))


def load_tableau(path: str | Path) -> Tableau:
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidProof(f"{path} is not valid JSON: {e}") from e
    if (
        isinstance(data, dict)
        and "nodes" not in data
        and isinstance(data.get("proof"), dict)
    ):
        # a verdict document written by prove --format json

        data = data["proof"]
    return tableau_from_json(data)


def model_to_json(model: Model) -> dict:
    valuation = {}
    for f in sorted(model.universe, key=render_formula):
        if isinstance(f, Prop):
            valuation[f.name] = f.name in model.valuation
    return {
        "valuation": valuation,
        "evidence": sorted(
            [render_term(t), render_formula(a)] for t, a in model.evidence
        ),
        "universe": sorted(render_formula(f) for f in model.universe),
        "terms": sorted(render_term(t) for t in model.terms),
    }


def verdict_to_json(verdict: Verdict) -> dict:
    if isinstance(verdict, Valid):
        return {"verdict": "valid", "proof": tableau_to_json(verdict.proof)}
    if isinstance(verdict, Invalid):
        return {
            "verdict": "invalid",
            "branch": [render_signed(sf) for sf in verdict.branch],
            "model": model_to_json(verdict.model) if verdict.model else None,
            "note": verdict.note,
        }
    assert isinstance(verdict, ResourceOut)
    return {
        "verdict": "resource-out",
        "limit": verdict.limit,
        "nodes": verdict.nodes,
        "seconds": round(verdict.seconds, 3),
    }


def leaf_closures(
    tableau: Tableau, cs: ConstantSpecification | None = None
) -> dict[int, Closure | None]:
    if tableau.closures:
        return {leaf: tableau.closures.get(leaf) for leaf in tableau.leaves()}
    cs = cs or ConstantSpecification()
    return {
        leaf: closure_status([n.formula for n in tableau.path(leaf)], cs)
        for leaf in tableau.leaves()
    }


def _label(node: Node, unsigned: bool) -> str:
    text = render_unsigned(node.formula) if unsigned else render_signed(node.formula)
    premises = ",".join(map(str, node.premises))
    rule = f"{node.rule}" + (f" {premises}" if premises else "")
    return f"{node.id}. {text}  ({rule})"


def render_tree(
    tableau: Tableau,
    cs: ConstantSpecification | None = None,
    unsigned: bool = False,
) -> str:
    closures = leaf_closures(tableau, cs)
    lines = []
    stack: list[tuple[int, int]] = [(tableau.root, 0)]
    while stack:
        node_id, depth = stack.pop()
        node = tableau.nodes[node_id]
        line = "    " * depth + _label(node, unsigned)
        if not node.children and closures.get(node_id):
            line += f" {CLOSED_MARK}"
        lines.append(line)
        inner = depth + (1 if len(node.children) > 1 else 0)
        for child in reversed(node.children):
            stack.append((child, inner))
    return "\n".join(lines)


def tableau_to_dot(
    tableau: Tableau,
    cs: ConstantSpecification | None = None,
    unsigned: bool = False,
) -> str:
    closures = leaf_closures(tableau, cs)
    graph = Digraph("tableau")
    graph.attr("node", shape="box", fontname="monospace")
    for node_id in sorted(tableau.nodes):
        node = tableau.nodes[node_id]
        attrs = {}
        label = _label(node, unsigned)
        if not node.children and closures.get(node_id):
            label += f"\n{CLOSED_MARK}"
            attrs = {"style": "filled", "fillcolor": "palegreen1"}
        graph.node(str(node_id), label, **attrs)
        for child in node.children:
            graph.edge(str(node_id), str(child))
    return graph.source
