"""
Machine-readable reports
Pydantic models for everything the CLI prints with --json, serialized with orjson using
sorted keys and two-space indentation so identical runs give identical bytes.
"""

from typing import Dict, List, Literal, Optional, Sequence

import orjson
from pydantic import BaseModel

from netident import __version__
from netident.disjoint_paths import ConstrainedWitness, PathSet
from netident.graph_core import DiGraph, GraphPayload, NodeSet, graph_to_payload
from netident.identify import GraphVerdict, PathDeficiency, Verdict
from netident.oracle import Counterexample, NodeEvidence, OracleRun, measured_transfer

TOOL = "netident"


class CertificateModel(BaseModel):
    kind: Literal["witness", "deficiency", "none"]
    paths: List[List[int]] = []
    source_subset: List[int] = []
    target_subset: List[int] = []
    shared: List[int] = []
    enumeration_count: Optional[int] = None
    required: Optional[int] = None
    count: Optional[int] = None


class EvidenceModel(BaseModel):
    samples: int
    ranks: List[int]
    full_count: int
    conclusive: bool


class NodeReport(BaseModel):
    node: int
    status: str
    out_neighbors: List[int]
    max_paths: int
    generic_paths: bool
    certificate: CertificateModel
    summary: str
    evidence: Optional[EvidenceModel] = None


class Report(BaseModel):
    tool: str = TOOL
    version: str = __version__
    command: str
    graph: GraphPayload
    measured: List[int]
    seed: int
    oracle_samples: int = 0
    overall: str
    nodes: List[NodeReport]


class CounterexampleReport(BaseModel):
    tool: str = TOOL
    version: str = __version__
    graph: GraphPayload
    node: int
    measured: List[int]
    seed: int
    alpha: int
    delay: int
    kernel_vector: List[str]
    v: List[str]
    g: List[List[str]]
    g_bar: List[List[str]]
    measured_transfer: List[List[str]]
    transfer_equal: bool


class OracleTestReport(BaseModel):
    tool: str = TOOL
    version: str = __version__
    graph: GraphPayload
    measured: List[int]
    seed: int
    samples: int
    overall: str
    checks: int
    violations: List[str]


class SuggestReport(BaseModel):
    tool: str = TOOL
    version: str = __version__
    graph: GraphPayload
    k: int
    minimum: bool
    sets: List[List[int]]


def _paths(ps: PathSet) -> List[List[int]]:
    return [list(p.vertices) for p in ps.paths]


def certificate_model(verdict: Verdict) -> CertificateModel:
    cert = verdict.certificate
    if isinstance(cert, ConstrainedWitness):
        return CertificateModel(
            kind="witness",
            paths=_paths(cert.path_set),
            source_subset=list(cert.source_subset),
            target_subset=list(cert.target_subset),
            shared=list(cert.shared),
            enumeration_count=cert.enumeration_count,
        )
    if isinstance(cert, PathDeficiency):
        return CertificateModel(
            kind="deficiency",
            paths=_paths(cert.max_path_set),
            required=cert.required,
            count=cert.count,
        )
    return CertificateModel(kind="none")


def node_report(verdict: Verdict, evidence: Optional[NodeEvidence] = None) -> NodeReport:
    ev = None
    if evidence is not None:
        ev = EvidenceModel(
            samples=len(evidence.ranks),
            ranks=list(evidence.ranks),
            full_count=evidence.full_count,
            conclusive=False,
        )
    return NodeReport(
        node=verdict.node,
        status=verdict.status.value,
        out_neighbors=list(verdict.out_neighbors),
        max_paths=verdict.max_paths,
        generic_paths=verdict.generic_paths,
        certificate=certificate_model(verdict),
        summary=verdict.describe(),
        evidence=ev,
    )


def build_report(
    command: str,
    graph: DiGraph,
    verdict: GraphVerdict,
    seed: int,
    evidence: Sequence[NodeEvidence] = (),
) -> Report:
    by_node: Dict[int, NodeEvidence] = {e.node: e for e in evidence}
    return Report(
        command=command,
        graph=graph_to_payload(graph),
        measured=list(verdict.measured),
        seed=seed,
        oracle_samples=len(evidence[0].ranks) if evidence else 0,
        overall=verdict.overall.value,
        nodes=[node_report(v, by_node.get(v.node)) for v in verdict.per_node],
    )


def counterexample_report(graph: DiGraph, ce: Counterexample, seed: int) -> CounterexampleReport:
    return CounterexampleReport(
        graph=graph_to_payload(graph),
        node=ce.node,
        measured=list(ce.measured),
        seed=seed,
        alpha=ce.alpha,
        delay=ce.delay,
        kernel_vector=[x.to_literal() for x in ce.kernel_vector],
        v=[x.to_literal() for x in ce.v],
        g=ce.g.g.to_literals(),
        g_bar=ce.g_bar.g.to_literals(),
        measured_transfer=measured_transfer(ce.g_bar, ce.measured).to_literals(),
        transfer_equal=True,
    )


def oracle_test_report(graph: DiGraph, run: OracleRun) -> OracleTestReport:
    return OracleTestReport(
        graph=graph_to_payload(graph),
        measured=list(run.verdict.measured),
        seed=run.seed,
        samples=run.samples,
        overall=run.verdict.overall.value,
        checks=run.checks,
        violations=list(run.violations),
    )


def suggest_report(graph: DiGraph, k: int, sets: Sequence[NodeSet], minimum: bool) -> SuggestReport:
    return SuggestReport(
        graph=graph_to_payload(graph),
        k=k,
        minimum=minimum,
        sets=[list(s) for s in sets],
    )


def to_json(model: BaseModel) -> str:
    data = model.model_dump(mode="json")
    return orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode("utf-8")


def parse_report(text: str) -> Report:
    return Report.model_validate(orjson.loads(text))


# --- text rendering ---


def render_report(report: Report) -> str:
    g = report.graph
    measured = "{" + ",".join(str(v) for v in report.measured) + "}"
    lines = [f"graph: n={g.n}, {len(g.edges)} edges; measured {measured}"]
    for node in report.nodes:
        lines.append(node.summary)
        if node.certificate.kind == "witness" and node.certificate.paths:
            lines.append(f"  enumeration count: {node.certificate.enumeration_count}")
        if not node.generic_paths:
            lines.append("  fewer disjoint paths than out-neighbours")
        if node.evidence is not None:
            lines.append(
                f"  sampled rank of T_(C,N_{node.node}): full in {node.evidence.full_count}/"
                f"{node.evidence.samples} samples (non-conclusive)"
            )
    lines.append(f"overall: {report.overall}")
    return "\n".join(lines)


def render_counterexample(report: CounterexampleReport) -> str:
    def matrix(rows: List[List[str]]) -> List[str]:
        return ["  [" + ", ".join(r) + "]" for r in rows]

    lines = [f"counterexample for node {report.node}, measured {report.measured}"]
    lines.append(f"alpha = {report.alpha}, delay k = {report.delay}")
    lines.append("kernel vector: (" + ", ".join(report.kernel_vector) + ")")
    lines.append("v(z): (" + ", ".join(report.v) + ")")
    lines.append("G:")
    lines.extend(matrix(report.g))
    lines.append("G_bar:")
    lines.extend(matrix(report.g_bar))
    lines.append("C(I-G)^-1 = C(I-G_bar)^-1:")
    lines.extend(matrix(report.measured_transfer))
    return "\n".join(lines)


def render_oracle_test(report: OracleTestReport) -> str:
    lines = [
        f"oracle test: {report.samples} samples from seed {report.seed}, measured {report.measured}",
        f"verdict: {report.overall}; {report.checks} checks, {len(report.violations)} violations",
    ]
    lines.extend(f"  {v}" for v in report.violations)
    return "\n".join(lines)


def render_suggest(report: SuggestReport) -> str:
    if not report.sets:
        return f"no identifying measured set of size {report.k}"
    head = f"{'minimum ' if report.minimum else ''}identifying measured sets of size {report.k}:"
    return "\n".join([head] + ["  {" + ",".join(str(v) for v in s) + "}" for s in report.sets])
