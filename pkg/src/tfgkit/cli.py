"""Command-line front end.

Subcommands wire the pipeline stages together: reduce a net, decide
reachability through the reduced net, compute concurrency matrices, check
equation files, query the brute-force oracle, and benchmark a corpus
directory.

Exit codes are a stable contract: 0 success (or Reachable, or well-formed),
1 negative verdict (Unreachable, check failed, disagreement), 2 input error,
3 Unknown.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from tfgkit import conc as conc_mod
from tfgkit import net_io, reach, reductions, tfg
from tfgkit.petri import (
    Marking,
    PetriNet,
    explore,
    is_safe,
    oracle_concurrency,
    oracle_reachable,
    random_walk,
)
from tfgkit.relation import UNKNOWN, ConcurrencyMatrix

log = logging.getLogger("tfgkit")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_UNKNOWN = 3

# Cooperative timeout: wall-clock signals are nondeterministic, so --timeout
# is converted into a state budget at a fixed nominal exploration rate.
NOMINAL_STATES_PER_SECOND = 50_000


class CliError(Exception):
    """Input-level failure; message goes to stderr, exit code 2."""


def _configure_logging() -> None:
    level_name = os.environ.get("TFGKIT_LOG", "").upper()
    if level_name:
        level = getattr(logging, level_name, None)
        if not isinstance(level, int):
            level = logging.INFO
        logging.basicConfig(
            stream=sys.stderr, level=level,
            format="%(levelname)s %(name)s: %(message)s",
        )


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_net(path: str, fmt: str) -> tuple[PetriNet, Marking]:
    text = _read_text(path)
    if fmt == "auto":
        stripped = text.lstrip()
        looks_xml = stripped.startswith("<")
        fmt = "pnml" if looks_xml or path.endswith((".pnml", ".xml")) else "net"
    try:
        if fmt == "pnml":
            return net_io.parse_pnml(text)
        return net_io.parse_net(text)
    except net_io.ParseError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _effective_max_states(args: argparse.Namespace) -> int:
    budget = args.max_states
    if args.timeout is not None:
        budget = min(budget, max(1, int(args.timeout * NOMINAL_STATES_PER_SECOND)))
    return budget


def _reduction_inputs(
    net: PetriNet, m0: Marking, args: argparse.Namespace
) -> reductions.ReductionResult:
    """Internal reducer by default; --equations switches to externally
    produced equations, which then need --reduced-net for the target side."""
    if args.equations is None:
        return reductions.reduce(net, m0)
    if args.reduced_net is None:
        raise CliError("--equations needs --reduced-net for the reduced side")
    try:
        equations = net_io.parse_equations(_read_text(args.equations))
    except net_io.ParseError as exc:
        raise CliError(f"{args.equations}: {exc}") from exc
    net2, m2 = _load_net(args.reduced_net, "net")
    removed = len(net.places) - len(net2.places)
    ratio = removed / len(net.places) if net.places else 0.0
    return reductions.ReductionResult(net2, m2, tuple(equations), ratio)


def _build_graph(
    net: PetriNet, result: reductions.ReductionResult
) -> tfg.TokenFlowGraph:
    try:
        return reductions.build_graph(net, result)
    except tfg.NotWellFormedError as exc:
        raise CliError(f"equations are not well formed: {exc}") from exc


def cmd_reduce(args: argparse.Namespace) -> int:
    net, m0 = _load_net(args.net, args.format)
    result = reductions.reduce(net, m0)
    _build_graph(net, result)
    equations_text = net_io.write_equations(result.equations)
    _write_output(args.output, equations_text)
    if args.reduced_net is not None:
        Path(args.reduced_net).write_text(
            net_io.write_net(result.reduced_net, result.reduced_marking)
        )
    print(f"ratio {result.ratio:.3f}")
    log.info(
        "reduced %d places to %d with %d equations",
        len(net.places), len(result.reduced_net.places), len(result.equations),
    )
    return EXIT_OK


def cmd_reach(args: argparse.Namespace) -> int:
    net, m0 = _load_net(args.net, args.format)
    try:
        target = net_io.parse_marking_query(_read_text(args.query), net.places)
    except net_io.ParseError as exc:
        raise CliError(f"{args.query}: {exc}") from exc
    result = _reduction_inputs(net, m0, args)
    _build_graph(net, result)
    verdict = reach.decide(
        net, m0, target, result,
        max_states=_effective_max_states(args), max_token=args.max_token,
    )
    print(f"{verdict.answer.upper()} {verdict.reason}")
    if verdict.answer == reach.REACHABLE:
        return EXIT_OK
    if verdict.answer == reach.UNREACHABLE:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def _rel2_from_oracle(
    result: reductions.ReductionResult, max_states: int, max_token: int
) -> ConcurrencyMatrix:
    space2 = explore(
        result.reduced_net, result.reduced_marking,
        max_states=max_states, max_token=max_token,
    )
    return oracle_concurrency(space2, result.reduced_net.places)


def _matrix_summary(matrix: ConcurrencyMatrix) -> str:
    ones = zeros = unknowns = 0
    for _, _, value in matrix.cells():
        if value == 1:
            ones += 1
        elif value == 0:
            zeros += 1
        else:
            unknowns += 1
    ratio = conc_mod.filling_ratio(matrix)
    return f"filling {ratio:.3f} ones {ones} zeros {zeros} unknown {unknowns}"


def cmd_conc(args: argparse.Namespace) -> int:
    net, m0 = _load_net(args.net, args.format)
    max_states = _effective_max_states(args)
    if args.oracle:
        space = explore(net, m0, max_states=max_states, max_token=args.max_token)
        if not space.is_complete:
            raise CliError(f"state space {space.status}; raise --max-states")
        matrix = oracle_concurrency(space, net.places)
    else:
        result = _reduction_inputs(net, m0, args)
        graph = _build_graph(net, result)
        if args.rel2 is not None:
            try:
                doc = net_io.parse_matrix(_read_text(args.rel2))
            except net_io.ParseError as exc:
                raise CliError(f"{args.rel2}: {exc}") from exc
            rel2 = conc_mod.from_document(doc)
        else:
            rel2 = _rel2_from_oracle(result, max_states, args.max_token)
        partial = args.partial or not rel2.is_complete()
        try:
            if partial:
                full = conc_mod.partial_matrix(graph, rel2)
            else:
                full = conc_mod.matrix(graph, rel2)
        except (conc_mod.IncompleteInputError, conc_mod.InconsistentInputError) as exc:
            raise CliError(str(exc)) from exc
        matrix = full.restrict(net.places)
    _write_output(args.output, net_io.write_matrix(conc_mod.to_document(matrix)))
    print(_matrix_summary(matrix), file=sys.stderr)
    return EXIT_OK


def cmd_tfg_check(args: argparse.Namespace) -> int:
    net, m0 = _load_net(args.net, args.format)
    if args.equations is None:
        result = reductions.reduce(net, m0)
        equations = result.equations
        p2 = result.reduced_net.places
    else:
        try:
            equations = tuple(net_io.parse_equations(_read_text(args.equations)))
        except net_io.ParseError as exc:
            raise CliError(f"{args.equations}: {exc}") from exc
        if args.reduced_net is None:
            raise CliError("--equations needs --reduced-net for the reduced side")
        net2, _ = _load_net(args.reduced_net, "net")
        p2 = net2.places
    graph, violations = tfg.check(equations, net.places, p2)
    failed = {v.check_id for v in violations}
    for check_id in tfg.CHECK_IDS:
        status = "fail" if check_id in failed else "ok"
        print(f"{check_id} {status}")
    for violation in violations:
        print(f"  {violation.check_id}: {violation.detail} [{violation.witness}]")
    if violations:
        return EXIT_NEGATIVE
    print(
        f"well-formed: {len(graph.nodes)} nodes, "
        f"{len(graph.r_arcs)} redundancy arcs, "
        f"{len(graph.a_arcs)} agglomeration arcs"
    )
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    net, m0 = _load_net(args.net, args.format)
    space = explore(
        net, m0, max_states=_effective_max_states(args), max_token=args.max_token
    )
    print(f"states {len(space.markings)} status {space.status} "
          f"safe {'yes' if is_safe(space) else 'no'}")
    if args.conc:
        if not space.is_complete:
            raise CliError(f"state space {space.status}; raise --max-states")
        matrix = oracle_concurrency(space, net.places)
        _write_output(args.output, net_io.write_matrix(conc_mod.to_document(matrix)))
        print(_matrix_summary(matrix), file=sys.stderr)
    if args.query is not None:
        if not space.is_complete:
            return EXIT_UNKNOWN
        try:
            target = net_io.parse_marking_query(_read_text(args.query), net.places)
        except net_io.ParseError as exc:
            raise CliError(f"{args.query}: {exc}") from exc
        if oracle_reachable(space, target):
            print("REACHABLE oracle")
            return EXIT_OK
        print("UNREACHABLE oracle")
        return EXIT_NEGATIVE
    return EXIT_OK


def _bench_targets(
    net: PetriNet, m0: Marking, seed: int, per_kind: int = 3
) -> list[Marking]:
    """Deterministic target mix: random-walk markings plus mutations that
    flip one place of a walked marking."""
    targets = []
    for i in range(per_kind):
        walked = random_walk(net, m0, steps=3 + 7 * i, seed=seed + i)
        targets.append(walked)
        if net.places:
            place = net.places[(seed + i) % len(net.places)]
            flipped = dict(walked.items())
            flipped[place] = 0 if walked[place] else 1
            targets.append(Marking(flipped))
    return targets


def _bench_row(
    name: str, path: Path, args: argparse.Namespace
) -> tuple[str, float | None]:
    """One corpus instance: returns (TSV row, ratio or None if skipped)."""
    net, m0 = _load_net(str(path), "net")
    max_states = _effective_max_states(args)
    space1 = explore(net, m0, max_states=max_states, max_token=args.max_token)
    if not space1.is_complete:
        return f"{name}\t{len(net.places)}\t-\t-\t-\t-\t-\tskipped({space1.status})", None
    result = reductions.reduce(net, m0)
    graph = reductions.build_graph(net, result)
    space2 = explore(
        result.reduced_net, result.reduced_marking,
        max_states=max_states, max_token=args.max_token,
    )

    reach_ok = True
    for target in _bench_targets(net, m0, args.seed):
        verdict = reach.decide(net, m0, target, result, max_states=max_states,
                               max_token=args.max_token)
        if verdict.answer == reach.UNKNOWN:
            continue
        expected = oracle_reachable(space1, target)
        if (verdict.answer == reach.REACHABLE) != expected:
            reach_ok = False

    rel2 = oracle_concurrency(space2, result.reduced_net.places)
    accelerated = conc_mod.matrix(graph, rel2).restrict(net.places)
    conc_ok = accelerated == oracle_concurrency(space1, net.places)

    work = len(space1.markings) + len(space2.markings)
    row = "\t".join([
        name,
        str(len(net.places)),
        str(len(result.reduced_net.places)),
        f"{result.ratio:.3f}",
        str(work),
        "ok" if reach_ok else "FAIL",
        "ok" if conc_ok else "FAIL",
        "complete",
    ])
    return row, result.ratio


def _ratio_histogram(ratios: list[float]) -> list[str]:
    buckets = [0] * 10
    for ratio in ratios:
        buckets[min(9, int(ratio * 10))] += 1
    lines = []
    for i, count in enumerate(buckets):
        lines.append(f"# {i / 10:.1f}-{(i + 1) / 10:.1f} {'#' * count}")
    return lines


def cmd_bench(args: argparse.Namespace) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise CliError(f"{args.corpus} is not a directory")
    header = "name\tplaces\treduced\tratio\tstates\treach\tconc\tstatus"
    rows = []
    ratios = []
    failed = False
    for path in sorted(corpus.glob("*.net")):
        row, ratio = _bench_row(path.stem, path, args)
        rows.append(row)
        if ratio is not None:
            ratios.append(ratio)
        if "\tFAIL\t" in row or row.endswith("FAIL"):
            failed = True
    report = "\n".join([header, *rows, *_ratio_histogram(ratios)]) + "\n"
    _write_output(args.output, report)
    log.info("benchmarked %d instances", len(rows))
    return EXIT_NEGATIVE if failed else EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("auto", "net", "pnml"),
                        default="auto", help="input net format")
    parser.add_argument("--max-states", type=int, default=100_000,
                        help="state budget for exploration")
    parser.add_argument("--max-token", type=int, default=1,
                        help="per-place token cap during exploration")
    parser.add_argument("--timeout", type=float, default=None,
                        help="budget in seconds, converted to a state count")
    parser.add_argument("--seed", type=int, default=0,
                        help="PRNG seed for benchmark targets")
    parser.add_argument("--output", default=None,
                        help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfgkit",
        description="Safe Petri net reduction with token flow graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a net, emit equations and ratio")
    p.add_argument("net")
    p.add_argument("--reduced-net", default=None,
                   help="write the reduced net to this file")
    _add_common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("reach", help="decide reachability of a target marking")
    p.add_argument("net")
    p.add_argument("query", help="file of name=nat tokens")
    p.add_argument("--equations", default=None,
                   help="use externally produced equations")
    p.add_argument("--reduced-net", default=None,
                   help="reduced net matching --equations")
    _add_common(p)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("conc", help="compute the place-concurrency matrix")
    p.add_argument("net")
    p.add_argument("--rel2", default=None,
                   help="matrix file with the reduced net's relation")
    p.add_argument("--partial", action="store_true",
                   help="force the partial algorithm")
    p.add_argument("--oracle", action="store_true",
                   help="bypass the reduction, explore the full net")
    p.add_argument("--equations", default=None,
                   help="use externally produced equations")
    p.add_argument("--reduced-net", default=None,
                   help="reduced net matching --equations")
    _add_common(p)
    p.set_defaults(func=cmd_conc)

    p = sub.add_parser("tfg-check",
                       help="build the token flow graph and report T1-T6")
    p.add_argument("net")
    p.add_argument("--equations", default=None,
                   help="equation file to check (default: reduce internally)")
    p.add_argument("--reduced-net", default=None,
                   help="reduced net matching --equations")
    _add_common(p)
    p.set_defaults(func=cmd_tfg_check)

    p = sub.add_parser("oracle", help="brute-force answers from the full net")
    p.add_argument("net")
    p.add_argument("query", nargs="?", default=None,
                   help="optional marking query file")
    p.add_argument("--conc", action="store_true",
                   help="also write the oracle concurrency matrix")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="benchmark every *.net in a directory")
    p.add_argument("corpus")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
