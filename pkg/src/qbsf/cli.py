"""Command line entry point.

Exit codes: 0 ok, 1 other error, 2 parse error, 3 shape error in
``classify``, 4 shape error in ``transform``, 10 resource limit exceeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import analysis, machineenc, solver, tableau, textio, transforms
from .core import Limits, equivalent, free_symbols
from .errors import ArityMismatch, InconsistentArity, LimitExceeded, NotPrenex, ParseError, QbsfError, ShapeMismatch

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_PARSE = 2
EXIT_CLASSIFY_SHAPE = 3
EXIT_TRANSFORM_SHAPE = 4
EXIT_LIMIT = 10


@dataclass
class CliConfig:
    subcommand: str
    input: str = "-"
    output: Optional[str] = None
    max_arity: int = Limits().max_arity
    max_steps: int = Limits().max_steps
    flags: dict = field(default_factory=dict)

    @property
    def limits(self) -> Limits:
        return Limits(self.max_arity, self.max_steps)


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(cfg: CliConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _formula(cfg: CliConfig):
    text = _read(cfg.input)
    try:
        return textio.parse_formula(text)
    except InconsistentArity as exc:
        # ill-formed input, reported like any other parse failure
        raise ParseError(str(exc)) from None


def cmd_solve(cfg: CliConfig) -> int:
    phi = _formula(cfg)
    verdict = solver.decide(phi, cfg.limits)
    lines = ["TRUE" if verdict.value else "FALSE"]
    if cfg.flags.get("witness") and verdict.witness is not None:
        for name, table in verdict.witness.items():
            lines.append(f"witness {name}/{table.arity} {table}")
    _emit(cfg, "\n".join(lines))
    return EXIT_OK


def cmd_classify(cfg: CliConfig) -> int:
    phi = _formula(cfg)
    report = analysis.classify(phi)
    if cfg.flags.get("signature"):
        if not report["prenex"]:
            raise _Fail(EXIT_CLASSIFY_SHAPE, "signature requested for a non-prenex formula")
        if report["signature"] is None:
            raise _Fail(EXIT_CLASSIFY_SHAPE, "prefix does not split into a function block and a proposition block")
    _emit(cfg, json.dumps(report, sort_keys=False))
    return EXIT_OK


def _apply_transform(phi, flags):
    if flags.get("flatten"):
        return transforms.flatten(phi)
    if flags.get("prenex"):
        return transforms.to_prenex(phi)
    if flags.get("dualize"):
        return transforms.dualize(phi)
    if flags.get("alt_reduce"):
        return transforms.alt_reduce(phi)
    if flags.get("pad"):
        f, m_star = flags["pad"]
        try:
            m_star = int(m_star)
        except ValueError:
            raise _Fail(EXIT_OTHER, f"--pad expects an integer arity, got {m_star!r}") from None
        return transforms.pad_arity(phi, f, m_star)
    if flags.get("merge"):
        f, g, h = flags["merge"]
        return transforms.merge_functions(phi, f, g, h)
    raise _Fail(EXIT_OTHER, "no transform selected")


def cmd_transform(cfg: CliConfig) -> int:
    phi = _formula(cfg)
    try:
        out = _apply_transform(phi, cfg.flags)
    except (ShapeMismatch, NotPrenex, ArityMismatch) as exc:
        raise _Fail(EXIT_TRANSFORM_SHAPE, f"{type(exc).__name__}: {exc}") from None
    _emit(cfg, textio.print_formula(out))
    if cfg.flags.get("check"):
        if free_symbols(phi) or free_symbols(out):
            same = equivalent(phi, out, cfg.limits)
        else:
            same = solver.decide(phi, cfg.limits).value == solver.decide(out, cfg.limits).value
        print("check: equivalent" if same else "check: NOT equivalent", file=sys.stderr)
        if not same:
            return EXIT_OTHER
    return EXIT_OK


def cmd_from_dqbf(cfg: CliConfig) -> int:
    inst = textio.parse_dqdimacs(_read(cfg.input))
    _emit(cfg, textio.print_formula(transforms.dqbf_to_qbsf(inst)))
    return EXIT_OK


def cmd_encode_machine(cfg: CliConfig) -> int:
    M = machineenc.OracleMachine.from_json(_load_json(_read(cfg.input)))
    oracles = cfg.flags.get("oracles")
    if oracles is not None and oracles != M.num_oracles:
        M = dataclasses.replace(M, num_oracles=oracles)
    encode = machineenc.encode_run_dnf if cfg.flags.get("dnf") else machineenc.encode_run
    phi = encode(M, cfg.flags.get("word", ""), cfg.flags.get("first", "exists"))
    _emit(cfg, textio.print_formula(phi))
    return EXIT_OK


def cmd_tableau_verify(cfg: CliConfig) -> int:
    M = tableau.AtmSpec.from_json(_load_json(_read(cfg.input)))
    x = cfg.flags.get("word", "")
    report = tableau.verify_simulation(M, x)
    lines = ["AGREE" if report.agree else "DISAGREE"]
    lines.append(
        f"v1={int(report.quantified)} k_accepting={int(report.k_accepting)} direct={int(report.direct)} "
        f"tuples={report.tuples_checked} pool={report.pool_size} grouped_mismatches={report.grouped_mismatches}"
    )
    if not report.agree and report.counterexample is not None:
        for i, A in enumerate(report.counterexample, 1):
            words = " ".join(tableau.word_bits(M, w) for w in sorted(A.words))
            lines.append(f"oracle {i}: {{{words}}}")
    _emit(cfg, "\n".join(lines))
    return EXIT_OK if report.agree else EXIT_OTHER


COMMANDS = {
    "solve": cmd_solve,
    "classify": cmd_classify,
    "transform": cmd_transform,
    "from-dqbf": cmd_from_dqbf,
    "encode-machine": cmd_encode_machine,
    "tableau-verify": cmd_tableau_verify,
}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", default="-", help="input file, or - for standard input")
    common.add_argument("--output", "-o", help="write the result here instead of standard output")
    common.add_argument("--max-arity", type=_positive, default=Limits().max_arity)
    common.add_argument("--max-steps", type=_positive, default=Limits().max_steps)

    parser = argparse.ArgumentParser(prog="qbsf", description="Quantified Boolean second-order formulas.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("solve", parents=[common], help="decide a closed formula")
    p.add_argument("--witness", action="store_true", help="print tables for the leading block")

    p = sub.add_parser("classify", parents=[common], help="report syntactic properties as JSON")
    p.add_argument("--signature", action="store_true", help="fail unless a prefix signature exists")

    p = sub.add_parser("transform", parents=[common], help="rewrite a formula")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--flatten", action="store_true")
    g.add_argument("--prenex", action="store_true")
    g.add_argument("--dualize", action="store_true")
    g.add_argument("--alt-reduce", action="store_true")
    g.add_argument("--pad", nargs=2, metavar=("F", "M_STAR"))
    g.add_argument("--merge", nargs=3, metavar=("F", "G", "H"))
    p.add_argument("--check", action="store_true", help="verify equivalence with the solver")

    sub.add_parser("from-dqbf", parents=[common], help="translate DQDIMACS to a formula")

    p = sub.add_parser("encode-machine", parents=[common], help="encode an oracle machine run")
    p.add_argument("--input", dest="word", default="", help="machine input word")
    p.add_argument("--oracles", type=_non_negative, help="number of oracle symbols")
    p.add_argument("--first", choices=("exists", "forall"), default="exists")
    p.add_argument("--dnf", action="store_true", help="use the DNF (complement) encoding")

    p = sub.add_parser("tableau-verify", parents=[common], help="check the tableau simulation")
    p.add_argument("--input", dest="word", default="", help="machine input word")
    return parser


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    base = {"subcommand", "input", "output", "max_arity", "max_steps"}
    flags = {k: v for k, v in vars(ns).items() if k not in base}
    return CliConfig(ns.subcommand, ns.input, ns.output, ns.max_arity, ns.max_steps, flags)


def run(cfg: CliConfig) -> int:
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LimitExceeded as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except QbsfError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
