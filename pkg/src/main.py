# SPDX-FileCopyrightText: 2026 justification-tableaux contributors
#
# SPDX-License-Identifier: ISC

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from src.cutelim import (
    CutEliminator,
    HilbertProof,
    MalformedCut,
    ResourceExhausted,
    hilbert_to_tableau,
    load_hilbert,
)
from src.engine import (
    Invalid,
    InvalidProof,
    Limits,
    ResourceOut,
    Tableau,
    Valid,
    Verdict,
    audit_subformula_property,
    check_proof,
    formula_roots,
    prove,
)
from src.export import (
    load_tableau,
    model_to_json,
    render_tree,
    tableau_to_dot,
    tableau_to_json,
    verdict_to_json,
)
from src.logic_cs import (
    ConfigError,
    ConstantSpecification,
    LogicSpec,
    load_cs,
    parse_cs,
    parse_logic,
    validate_cs,
)
from src.oracle import (
    counterpart,
    forgetful_projection,
    modal_prove,
    random_goal,
    random_hilbert_proof,
    render_modal,
)
from src.syntax import Formula, parse_formula, render_formula, render_signed

logger = logging.getLogger(__name__)

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_RESOURCE_OUT = 2
EXIT_CONFIG = 3
FORMATS = ("text", "json", "dot")


@dataclass(frozen=True)
class RunConfig:
    logic: LogicSpec
    cs: ConstantSpecification
    goals: tuple[str, ...] = ()
    limits: Limits = Limits()
    output_format: str = "text"
    seed: int | None = None
    jobs: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        logic = parse_logic(args.logic)
        cs = load_cs(args.cs, logic) if args.cs else ConstantSpecification()
        goals = list(getattr(args, "goals", None) or [])
        goal_file = getattr(args, "goal_file", None)
        if goal_file:
            goals.extend(_read_goal_file(goal_file))
        count = getattr(args, "random", None)
        if count:
            if args.seed is None:
                raise ConfigError("--random needs --seed")
            for i in range(count):
                goal = random_goal(args.seed + i, args.size_bound, logic.signature)
                goals.append(render_formula(goal))
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        return cls(
            logic=logic,
            cs=cs,
            goals=tuple(goals),
            limits=Limits(args.max_nodes, args.max_seconds),
            output_format=args.format,
            seed=args.seed,
            jobs=args.jobs,
        )


def _read_goal_file(path: str) -> list[str]:
    with open(path, encoding="utf-8") as f:
        lines = [line.strip() for line in f]
    return [line for line in lines if line and not line.startswith("#")]


def exit_code(verdict: Verdict) -> int:
    if isinstance(verdict, Valid):
        return EXIT_VALID
    if isinstance(verdict, Invalid):
        return EXIT_INVALID
    return EXIT_RESOURCE_OUT


def _verdict_text(goal: Formula, verdict: Verdict, config: RunConfig) -> str:
    head = f"{render_formula(goal)} in {config.logic.name}: "
    if isinstance(verdict, Valid):
        return head + "valid\n" + render_tree(verdict.proof, config.cs)
    if isinstance(verdict, Invalid):
        lines = [head + "invalid", "open branch:"]
        lines += [f"  {render_signed(sf)}" for sf in verdict.branch]
        if verdict.model is None:
            lines.append(verdict.note or "model undetermined")
        else:
            model = json.dumps(model_to_json(verdict.model), ensure_ascii=False)
            lines.append("model: " + model)
        return "\n".join(lines)
    assert isinstance(verdict, ResourceOut)
    return head + (
        f"resource-out ({verdict.limit} after {verdict.nodes} nodes, "
        f"{verdict.seconds:.2f}s)"
    )


def _render_verdict(
    goal: Formula, verdict: Verdict, config: RunConfig, command: str
) -> str:
    if command == "decide":
        return ""
    if command == "countermodel":
        if not isinstance(verdict, Invalid):
            if config.output_format != "text":
                return ""
            return _verdict_text(goal, verdict, config)
        if config.output_format == "json":
            model = model_to_json(verdict.model) if verdict.model else None
            data = {"goal": render_formula(goal), "model": model, "note": verdict.note}
            return json.dumps(data, ensure_ascii=False)
        return _verdict_text(goal, verdict, config)
    if config.output_format == "json":
        data = {"goal": render_formula(goal), **verdict_to_json(verdict)}
        return json.dumps(data, ensure_ascii=False)
    if config.output_format == "dot" and isinstance(verdict, Valid):
        return tableau_to_dot(verdict.proof, config.cs)
    return _verdict_text(goal, verdict, config)


def decide_goal(
    text: str, config: RunConfig, command: str = "prove"
) -> tuple[int, str, str]:
    """Exit code, standard output and standard error for one goal."""
    try:
        goal = parse_formula(text)
        verdict = prove(goal, config.logic, config.cs, config.limits)
    except ValueError as e:
        return EXIT_CONFIG, "", str(e)
    return exit_code(verdict), _render_verdict(goal, verdict, config, command), ""


def _emit(out: str, err: str) -> None:
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)


def cmd_prove(config: RunConfig, command: str = "prove") -> int:
    if not config.goals:
        raise ConfigError("No goal given")
    if config.jobs > 1 and len(config.goals) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            count = len(config.goals)
            results = list(
                executor.map(
                    decide_goal, config.goals, [config] * count, [command] * count
                )
            )
    else:
        results = [decide_goal(goal, config, command) for goal in config.goals]
    code = max(code for code, _, _ in results)
    for _, out, err in results:
        # stdout stays empty once any goal fails to configure
        _emit("" if code == EXIT_CONFIG else out, err)
    return code


def cmd_validate_cs(args: argparse.Namespace) -> int:
    if not args.cs:
        raise ConfigError("validate-cs needs --cs")
    logic = parse_logic(args.logic)
    with open(args.cs, encoding="utf-8") as f:
        cs = parse_cs(f.read())
    violations = validate_cs(cs, logic)
    if args.format == "json":
        data = {"entries": len(cs), "violations": [str(v) for v in violations]}
        print(json.dumps(data, ensure_ascii=False))
    else:
        for violation in violations:
            print(violation)
        if not violations:
            print(f"{len(cs)} entries, valid for {logic.name}")
    return EXIT_INVALID if violations else EXIT_VALID


def _hilbert_input(
    args: argparse.Namespace, config: RunConfig
) -> tuple[HilbertProof, ConstantSpecification]:
    if args.hilbert:
        return load_hilbert(args.hilbert), config.cs
    if config.seed is None:
        raise ConfigError("Give a Hilbert proof file or --seed")
    hp, cs = random_hilbert_proof(config.seed, config.logic)
    return hp, ConstantSpecification(config.cs.entries | cs.entries)


def _with_cs(config: RunConfig, cs: ConstantSpecification) -> RunConfig:
    return RunConfig(
        config.logic, cs, limits=config.limits, output_format=config.output_format
    )


def _goal_index(args: argparse.Namespace, hp: HilbertProof) -> int:
    return (args.line - 1) if args.line else len(hp) - 1


def _print_tableau(tableau: Tableau, config: RunConfig) -> None:
    if config.output_format == "json":
        print(json.dumps(tableau_to_json(tableau), ensure_ascii=False))
    elif config.output_format == "dot":
        print(tableau_to_dot(tableau, config.cs))
    else:
        print(render_tree(tableau, config.cs))


def cmd_compile_hilbert(args: argparse.Namespace, config: RunConfig) -> int:
    hp, cs = _hilbert_input(args, config)
    config = _with_cs(config, cs)
    index = _goal_index(args, hp)
    tableau = hilbert_to_tableau(hp, index, config.logic, cs, config.limits)
    _print_tableau(tableau, config)
    return EXIT_VALID


def cmd_cutelim(args: argparse.Namespace, config: RunConfig) -> int:
    hp, cs = _hilbert_input(args, config)
    config = _with_cs(config, cs)
    index = _goal_index(args, hp)
    tableau = hilbert_to_tableau(hp, index, config.logic, cs, config.limits)
    eliminator = CutEliminator(
        tableau, config.logic, cs, args.max_steps, args.verify_each_step
    )
    try:
        proof = eliminator.run()
    except (MalformedCut, ResourceExhausted) as e:
        logger.error("cut elimination failed: %s", e)
        return EXIT_RESOURCE_OUT if isinstance(e, ResourceExhausted) else EXIT_INVALID
    result = check_proof(proof, hp.lines[index].formula, config.logic, cs, proof.scope)
    if config.output_format == "json":
        data = {
            "trace": [str(entry) for entry in eliminator.trace],
            "check": str(result),
            "proof": tableau_to_json(proof),
        }
        print(json.dumps(data, ensure_ascii=False))
    else:
        for entry in eliminator.trace:
            print(entry)
        print(f"check: {result}")
        if config.output_format == "dot":
            print(tableau_to_dot(proof, cs))
        else:
            print(render_tree(proof, cs))
    return EXIT_VALID if result else EXIT_INVALID


def cmd_audit(args: argparse.Namespace, config: RunConfig) -> int:
    tableau = load_tableau(args.proof)
    roots = formula_roots(tableau.root_formulas())
    if len(roots) != 1:
        raise InvalidProof("Audit needs a proof with a single root formula")
    goal = roots[0]
    checked = check_proof(tableau, goal, config.logic, config.cs)
    audited = audit_subformula_property(tableau, goal, config.cs)
    if config.output_format == "json":
        data = {
            "goal": render_formula(goal),
            "check": str(checked),
            "audit": str(audited),
        }
        print(json.dumps(data, ensure_ascii=False))
    else:
        print(f"check: {checked}")
        print(f"audit: {audited}")
    return EXIT_VALID if checked and audited else EXIT_INVALID


def cmd_project(config: RunConfig) -> int:
    if not config.goals:
        raise ConfigError("No goal given")
    modal_logic = counterpart(config.logic)
    code = EXIT_VALID
    for text in config.goals:
        projected = forgetful_projection(parse_formula(text))
        valid = modal_prove(projected, modal_logic)
        if config.output_format == "json":
            data = {
                "projection": render_modal(projected),
                "logic": modal_logic,
                "valid": valid,
            }
            print(json.dumps(data))
        else:
            verdict = "valid" if valid else "invalid"
            print(f"{render_modal(projected)} in {modal_logic}: {verdict}")
        if not valid:
            code = EXIT_INVALID
    return code


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--logic",
        default="J",
        help="Justification logic: J plus T, D, 4, B, 5 in this order, or LP",
    )
    common.add_argument("--cs", help="Constant specification file, one c:A per line")
    common.add_argument(
        "--format", choices=FORMATS, default="text", help="Output format"
    )
    common.add_argument(
        "--max-nodes", type=int, default=Limits.max_nodes, help="Node budget per goal"
    )
    common.add_argument(
        "--max-seconds",
        type=float,
        default=Limits.max_seconds,
        help="Time budget per goal",
    )
    common.add_argument(
        "--seed", type=int, help="Seed for generated goals and Hilbert proofs"
    )
    common.add_argument("--jobs", type=int, default=1, help="Goals decided in parallel")
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for INFO, -vv for DEBUG",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_arguments()
    parser = argparse.ArgumentParser(
        prog="jtab",
        description="Analytic tableaux for justification logics",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("prove", "Decide goals and print proofs or countermodels"),
        ("decide", "Decide goals; the exit code is the only output"),
        ("countermodel", "Print a countermodel for each invalid goal"),
        ("project", "Check the forgetful projection in the modal counterpart"),
    ):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("goals", nargs="*", help="Goal formulas")
        sub.add_argument("--goal-file", help="File with one goal per line")
        sub.add_argument(
            "--random", type=int, help="Add this many generated goals (needs --seed)"
        )
        sub.add_argument(
            "--size-bound", type=int, default=12, help="Size bound of generated goals"
        )

    commands.add_parser(
        "validate-cs", parents=[common], help="Check a constant specification"
    )

    for name, help_text in (
        ("compile-hilbert", "Compile a Hilbert proof into a tableau with cuts"),
        ("cutelim", "Compile a Hilbert proof and eliminate its cuts"),
    ):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument(
            "hilbert", nargs="?", help="Hilbert proof file (omit with --seed)"
        )
        sub.add_argument("--line", type=int, help="Line to prove (default: last)")
        if name == "cutelim":
            sub.add_argument(
                "--max-steps", type=int, default=10**6, help="Rewrite step budget"
            )
            sub.add_argument(
                "--verify-each-step",
                action="store_true",
                help="Re-check closure after every rewrite",
            )

    audit = commands.add_parser(
        "audit", parents=[common], help="Check a proof JSON file"
    )
    audit.add_argument("proof", help="Proof JSON file")
    return parser


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )



def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if args.command == "validate-cs":
            return cmd_validate_cs(args)
        config = RunConfig.from_args(args)
        if args.command in ("prove", "decide", "countermodel"):
            return cmd_prove(config, args.command)
        if args.command == "project":
            return cmd_project(config)
        if args.command == "compile-hilbert":
            return cmd_compile_hilbert(args, config)
        if args.command == "cutelim":
            return cmd_cutelim(args, config)
        return cmd_audit(args, config)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
