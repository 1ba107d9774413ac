"""Command-line front end.

Subcommands: check, flow, seq, normalize, gen, stats, diverge-demo.
Exit codes: 0 success, 1 domain error (invalid input or precondition),
2 usage error.  All inputs and outputs are plain text; '-' means stdin.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .formula import to_text
from .derivation import (
    Derivation,
    DerivationError,
    check,
    format_derivation,
    parse_derivation,
)
from .flow import AtomicFlow, FlowError, ResourceCapExceeded, TOP
from .bridge import extract_flow, random_derivation, random_flow, sequentialize
from .local_rules import (
    C_SYSTEM,
    apply_rule,
    first_match,
    normalize_c_derivation,
    normalize_w_derivation,
)
from .global_reductions import algorithm_bc, algorithm_ex
from .streamliner import hyper_streamline, streamline


class DomainError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(path, text: str, out):
    if path is None:
        out.write(text)
    else:
        Path(path).write_text(text)


def _load_derivation(path: str) -> Derivation:
    try:
        return parse_derivation(_read(path))
    except (DerivationError, ValueError) as exc:
        raise DomainError(f"cannot parse derivation: {exc}") from exc


def _load_flow(path: str) -> AtomicFlow:
    try:
        flow = AtomicFlow.from_json(_read(path))
    except (FlowError, ValueError, KeyError) as exc:
        raise DomainError(f"cannot parse flow: {exc}") from exc
    report = flow.validate()
    if not report.ok:
        raise DomainError(f"invalid flow: {report.condition} ({report.witness})")
    return flow


def _cmd_check(args, out) -> int:
    deriv = _load_derivation(args.input)
    report = check(deriv)
    if report.ok:
        out.write(f"ok, {len(deriv.steps)} steps\n")
        return 0
    out.write(f"fail at step {report.step}: {report.reason}\n")
    return 1


def _cmd_flow(args, out) -> int:
    deriv = _load_derivation(args.input)
    report = check(deriv)
    if not report.ok:
        raise DomainError(f"derivation invalid at step {report.step}: {report.reason}")
    flow = extract_flow(deriv).flow
    if args.dot:
        Path(args.dot).write_text(flow.to_dot(polarity=args.polarity))
    if args.json or args.output is not None or not args.dot:
        _write(args.output, flow.to_json(), out)
    return 0


def _cmd_seq(args, out) -> int:
    flow = _load_flow(args.input)
    deriv = sequentialize(flow)
    _write(args.output, format_derivation(deriv), out)
    return 0


STRATEGIES = ("w", "c", "bc", "ex", "str", "hstr")


def _cmd_normalize(args, out) -> int:
    deriv = _load_derivation(args.input)
    report = check(deriv)
    if not report.ok:
        raise DomainError(f"derivation invalid at step {report.step}: {report.reason}")
    pipeline_report = None
    try:
        if args.strategy == "w":
            deriv, _ = normalize_w_derivation(deriv)
        elif args.strategy == "c":
            deriv, _ = normalize_c_derivation(deriv)
        elif args.strategy == "bc":
            deriv = algorithm_bc(deriv, jobs=args.jobs)
        elif args.strategy == "ex":
            deriv = algorithm_ex(deriv, jobs=args.jobs)
        elif args.strategy == "str":
            deriv, pipeline_report = streamline(
                deriv, minimal_w=args.minimal_w,
                eager_weakening=args.eager_weakening, jobs=args.jobs,
            )
        else:
            deriv, pipeline_report = hyper_streamline(
                deriv, eager_weakening=args.eager_weakening, jobs=args.jobs
            )
    except (FlowError, ResourceCapExceeded) as exc:
        raise DomainError(str(exc)) from exc
    if args.trace:
        trace_dir = Path(args.trace)
        trace_dir.mkdir(parents=True, exist_ok=True)
        if pipeline_report is not None:
            (trace_dir / "report.json").write_text(pipeline_report.to_json())
            for i, (stage, flow_json) in enumerate(
                zip(pipeline_report.stages, pipeline_report.stage_flows)
            ):
                (trace_dir / f"stage-{i}-{stage.name}.json").write_text(flow_json)
        (trace_dir / "final.sks").write_text(format_derivation(deriv))
        (trace_dir / "final-flow.json").write_text(extract_flow(deriv).flow.to_json())
    _write(args.output, format_derivation(deriv), out)
    return 0


def _cmd_gen(args, out) -> int:
    if args.kind == "flow":
        flow = random_flow(args.seed, vertices=args.vertices, roots=args.roots)
        _write(args.output, flow.to_json(), out)
    else:
        deriv = random_derivation(args.seed, vertices=args.vertices, roots=args.roots)
        _write(args.output, format_derivation(deriv), out)
    return 0


def _cmd_stats(args, out) -> int:
    deriv = _load_derivation(args.input)
    report = check(deriv)
    if not report.ok:
        raise DomainError(f"derivation invalid at step {report.step}: {report.reason}")
    flow = extract_flow(deriv).flow
    counts = flow.label_counts()
    out.write(f"steps: {len(deriv.steps)}\n")
    out.write(f"premiss: {to_text(deriv.premiss)}\n")
    out.write(f"conclusion: {to_text(deriv.conclusion)}\n")
    for lab in ("aid", "aiu", "awd", "awu", "acd", "acu"):
        out.write(f"{lab}: {counts.get(lab, 0)}\n")
    out.write(f"edges: {len(flow.edges())}\n")
    out.write(f"ai-cycles: {len(flow.ai_cycles())}\n")
    out.write(f"simple edges: {len(flow.simple_edges())}\n")
    out.write(f"streamlined: {flow.is_streamlined()}\n")
    out.write(f"super-streamlined: {flow.is_super_streamlined()}\n")
    out.write(f"hyper-streamlined: {flow.is_hyper_streamlined()}\n")
    return 0


def diverge_demo_flow() -> AtomicFlow:
    """The cyclic interaction/contraction/cut flow on which the
    contraction rewriting system runs forever."""
    g = AtomicFlow()
    v_id = g.add_vertex("aid")
    v_cd = g.add_vertex("acd")
    v_iu = g.add_vertex("aiu")
    g.add_edge(TOP, v_cd, hint="a")
    g.add_edge(v_id, v_cd, hint="a")
    g.add_edge(v_cd, v_iu, hint="a")
    g.add_edge(v_id, v_iu, hint="a")
    return g


def _cmd_diverge(args, out) -> int:
    flow = diverge_demo_flow()
    out.write(f"start: {len(flow.vertices())} vertices\n")
    for i in range(args.max_steps):
        m = first_match(flow, C_SYSTEM)
        if m is None:
            out.write("unexpectedly normal\n")
            return 1
        flow = apply_rule(flow, m)
        out.write(f"step {i + 1}: {m.rule}, {len(flow.vertices())} vertices\n")
    out.write(f"stopped by --max-steps cap ({args.max_steps}); the system keeps growing\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sksflow",
        description="Check deep-inference derivations, extract and rewrite their atomic flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a derivation file")
    p.add_argument("input")

    p = sub.add_parser("flow", help="extract the atomic flow of a derivation")
    p.add_argument("input")
    p.add_argument("--json", action="store_true", help="write the flow as JSON (default)")
    p.add_argument("--dot", metavar="PATH", help="also write a DOT rendering")
    p.add_argument("--polarity", action="store_true", help="annotate DOT edges with polarities")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("seq", help="sequentialise a flow file into a derivation")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("normalize", help="rewrite a derivation")
    p.add_argument("input")
    p.add_argument("--strategy", required=True, choices=STRATEGIES)
    p.add_argument("--trace", metavar="DIR", help="dump per-stage artifacts")
    p.add_argument("--minimal-w", action="store_true",
                   help="stop weakening reductions once merely streamlined")
    p.add_argument("--eager-weakening", action="store_true",
                   help="clear weakenings before and between the global stages")
    p.add_argument("--jobs", type=int, default=1,
                   help="evaluate the two copies of a global reduction concurrently")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("gen", help="emit a seeded random flow or derivation")
    p.add_argument("--kind", choices=("flow", "derivation"), default="flow")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vertices", type=int, default=8)
    p.add_argument("--roots", type=int, default=2)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("stats", help="print flow statistics of a derivation")
    p.add_argument("input")

    p = sub.add_parser("diverge-demo",
                       help="run the contraction system on its non-terminating cyclic flow")
    p.add_argument("--max-steps", type=int, default=5)
    return parser


COMMANDS = {
    "check": _cmd_check,
    "flow": _cmd_flow,
    "seq": _cmd_seq,
    "normalize": _cmd_normalize,
    "gen": _cmd_gen,
    "stats": _cmd_stats,
    "diverge-demo": _cmd_diverge,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return COMMANDS[args.command](args, out)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FlowError, DerivationError, ResourceCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
