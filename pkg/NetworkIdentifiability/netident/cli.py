"""
Command-line interface

    netident analyze layered.json --measured 6,7,8
    netident check-node open_diamond.json --node 1 --measured 4,5
    netident counterexample crossed_diamond_adversarial.json --node 1 --measured 4,5
    netident export-dot crossed_diamond.json --measured 4,5
    netident oracle-test layered.json --measured 6,7,8 --oracle-samples 100
    netident suggest layered.json --k 3

Exit codes: 0 Identifiable (or success), 1 error, 2 Inconclusive, 3 NotIdentifiable,
4 oracle-test found violations.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from netident import __version__
from netident.disjoint_paths import ConstrainedWitness
from netident.errors import ConfigError, GraphSyntaxError, NetidentError
from netident.graph_core import DiGraph, NodeSet, parse_graph, to_dot
from netident.identify import Status, decide_graph, decide_node, minimum_measurement_sets, suggest_measurement_sets
from netident.logging_config import configure_logging
from netident.oracle import build_counterexample, consistency_violations, load_fixture, sample_evidence
from netident.report import (
    build_report,
    counterexample_report,
    node_report,
    oracle_test_report,
    render_counterexample,
    render_oracle_test,
    render_report,
    render_suggest,
    suggest_report,
    to_json,
)
from netident.settings import AnalysisSettings, Settings, load_settings, use_settings

logger = logging.getLogger("netident.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 4
EXIT_CODES = {
    Status.IDENTIFIABLE: 0,
    Status.INCONCLUSIVE: 2,
    Status.NOT_IDENTIFIABLE: 3,
}
ORACLE_TEST_SAMPLES = 100


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def parse_measured(text: Optional[str]) -> Optional[NodeSet]:
    """'4,5' -> {4,5}; '' -> empty set; None -> use the graph's own measured set"""
    if text is None:
        return None
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return NodeSet.of(int(t) for t in items)
    except ValueError as e:
        raise GraphSyntaxError(f"--measured expects comma-separated integers, got {text!r}") from e


def _read_graph(path: Path) -> DiGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise GraphSyntaxError(f"cannot read graph file {path}: {e}") from e
    return parse_graph(text)


def _measured(args, graph: DiGraph) -> NodeSet:
    c = parse_measured(args.measured)
    c = graph.measured if c is None else c
    graph.check_nodes(c)
    return c


def _emit(args, model, text_renderer) -> None:
    print(to_json(model) if args.json else text_renderer(model))


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="config.yaml to use instead of the default")
    common.add_argument("--log-level", dest="log_level", help="override logging.level")
    common.add_argument("--cap", type=int, help="enumeration cap for uniqueness testing")
    common.add_argument("--max-exact-n", dest="max_exact_n", type=int, help="largest n for exhaustive procedures")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="machine-readable output")
    fmt.add_argument("--text", dest="json", action="store_false", help="human-readable output (default)")

    parser = _Parser(
        prog="netident",
        description="Identifiability of network transfer functions from partial node measurements.",
    )
    parser.add_argument("--version", action="version", version=f"netident {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="verdict for every node")
    p.add_argument("graph", type=Path)
    p.add_argument("--measured")
    p.add_argument("--seed", type=int)
    p.add_argument("--oracle-samples", dest="oracle_samples", type=int)

    p = sub.add_parser("check-node", parents=[common], help="verdict and certificate for one node")
    p.add_argument("graph", type=Path)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--measured")

    p = sub.add_parser("counterexample", parents=[common], help="G_bar with equal measured transfer")
    p.add_argument("fixture", type=Path)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--measured")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("export-dot", parents=[common], help="DOT export with measured nodes highlighted")
    p.add_argument("graph", type=Path)
    p.add_argument("--measured")

    p = sub.add_parser("oracle-test", parents=[common], help="cross-check verdicts on generic samples")
    p.add_argument("graph", type=Path)
    p.add_argument("--measured")
    p.add_argument("--seed", type=int)
    p.add_argument("--oracle-samples", dest="oracle_samples", type=int)

    p = sub.add_parser("suggest", parents=[common], help="identifying measured sets by brute force")
    p.add_argument("graph", type=Path)
    p.add_argument("--k", type=int, help="set size; default is the smallest that works")
    return parser


def _apply_overrides(settings: Settings, args) -> Settings:
    analysis = {}
    if args.cap is not None:
        analysis["enumeration_cap"] = args.cap
    if args.max_exact_n is not None:
        analysis["max_exact_n"] = args.max_exact_n
    if not analysis:
        return settings
    try:
        updated = AnalysisSettings.model_validate({**settings.analysis.model_dump(), **analysis})
    except ValidationError as e:
        raise ConfigError(f"invalid command-line override: {e}") from e
    return settings.model_copy(update={"analysis": updated})


def cmd_analyze(args, settings: Settings) -> int:
    graph = _read_graph(args.graph)
    c = _measured(args, graph)
    seed = args.seed if args.seed is not None else settings.oracle.default_seed
    samples = args.oracle_samples if args.oracle_samples is not None else settings.oracle.samples
    verdict = decide_graph(graph, c)
    evidence = sample_evidence(graph, c, samples, seed) if samples > 0 else ()
    report = build_report("analyze", graph, verdict, seed, evidence)
    _emit(args, report, render_report)
    logger.info("analyze %s measured %s: %s", args.graph, c, verdict.overall.value)
    return EXIT_CODES[verdict.overall]


def cmd_check_node(args, settings: Settings) -> int:
    graph = _read_graph(args.graph)
    c = _measured(args, graph)
    verdict = decide_node(graph, args.node, c)
    if args.json:
        print(to_json(node_report(verdict)))
    else:
        print(verdict.status.value)
        print(verdict.describe())
        if isinstance(verdict.certificate, ConstrainedWitness) and verdict.certificate.m:
            print(f"enumeration count: {verdict.certificate.enumeration_count}")
    return EXIT_CODES[verdict.status]


def cmd_counterexample(args, settings: Settings) -> int:
    fixture = load_fixture(args.fixture)
    c = _measured(args, fixture.graph)
    seed = args.seed if args.seed is not None else fixture.seed
    nm = fixture.network(seed)
    ce = build_counterexample(nm, args.node, c)
    _emit(args, counterexample_report(fixture.graph, ce, seed), render_counterexample)
    return EXIT_OK


def cmd_export_dot(args, settings: Settings) -> int:
    graph = _read_graph(args.graph)
    c = _measured(args, graph)
    sys.stdout.write(to_dot(graph, c))
    return EXIT_OK


def cmd_oracle_test(args, settings: Settings) -> int:
    graph = _read_graph(args.graph)
    c = _measured(args, graph)
    seed = args.seed if args.seed is not None else settings.oracle.default_seed
    samples = args.oracle_samples if args.oracle_samples is not None else ORACLE_TEST_SAMPLES
    run = consistency_violations(graph, c, samples, seed)
    _emit(args, oracle_test_report(graph, run), render_oracle_test)
    return EXIT_VIOLATIONS if run.violations else EXIT_OK


def cmd_suggest(args, settings: Settings) -> int:
    graph = _read_graph(args.graph)
    if args.k is None:
        k, sets = minimum_measurement_sets(graph)
        minimum = True
    else:
        k, sets, minimum = args.k, suggest_measurement_sets(graph, args.k), False
    _emit(args, suggest_report(graph, k, sets, minimum), render_suggest)
    return EXIT_OK if sets else EXIT_CODES[Status.INCONCLUSIVE]


COMMANDS = {
    "analyze": cmd_analyze,
    "check-node": cmd_check_node,
    "counterexample": cmd_counterexample,
    "export-dot": cmd_export_dot,
    "oracle-test": cmd_oracle_test,
    "suggest": cmd_suggest,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        settings = _apply_overrides(load_settings(args.config), args)
        use_settings(settings)
        configure_logging(settings, args.log_level)
        return COMMANDS[args.command](args, settings)
    except NetidentError as e:
        logger.error("%s", e)
        return EXIT_ERROR
    finally:
        use_settings(None)


if __name__ == "__main__":
    raise SystemExit(main())
