"""
Identifiability verdicts per node and per graph, with certificates
A node is Identifiable when a constrained set of |N_i| vertex-disjoint paths from N_i to
the measured set exists, NotIdentifiable when fewer than |N_i| disjoint paths exist at
all, and Inconclusive otherwise (the path condition is sufficient only).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

from netident.disjoint_paths import ConstrainedWitness, PathSet, exists_constrained_set, max_disjoint_paths
from netident.errors import InvariantError, SizeLimitExceeded
from netident.graph_core import DiGraph, NodeSet, out_neighbors
from netident.settings import get_settings

logger = logging.getLogger(__name__)


class Status(str, Enum):
    IDENTIFIABLE = "Identifiable"
    NOT_IDENTIFIABLE = "NotIdentifiable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PathDeficiency:
    """Fewer than `required` vertex-disjoint paths from N_i to the measured set"""

    required: int
    count: int
    max_path_set: PathSet

    def __post_init__(self):
        if self.count >= self.required:
            raise InvariantError(f"deficiency needs count < required, got {self.count} >= {self.required}")


Certificate = Union[ConstrainedWitness, PathDeficiency, None]


@dataclass(frozen=True)
class Verdict:
    node: int
    status: Status
    out_neighbors: NodeSet
    max_paths: int
    certificate: Certificate = None

    def __post_init__(self):
        m = len(self.out_neighbors)
        if self.status is Status.IDENTIFIABLE:
            if not isinstance(self.certificate, ConstrainedWitness) or self.certificate.m != m:
                raise InvariantError(f"node {self.node}: Identifiable needs a witness of {m} paths")
        elif self.status is Status.NOT_IDENTIFIABLE:
            if not isinstance(self.certificate, PathDeficiency) or self.certificate.required != m:
                raise InvariantError(f"node {self.node}: NotIdentifiable needs a path-deficiency record")
        elif self.certificate is not None:
            raise InvariantError(f"node {self.node}: Inconclusive carries no certificate")

    @property
    def generic_paths(self) -> bool:
        """|N_i| disjoint paths exist; the path-existence condition for generic identifiability"""
        return self.max_paths >= len(self.out_neighbors)

    def describe(self) -> str:
        cert = self.certificate
        if isinstance(cert, ConstrainedWitness):
            if cert.m == 0:
                return f"node {self.node}: {self.status.value} (no out-neighbours)"
            return f"node {self.node}: {self.status.value}; constrained paths: {cert.path_set.describe()}"
        if isinstance(cert, PathDeficiency):
            return (
                f"node {self.node}: {self.status.value}; only {cert.count} of {cert.required} "
                f"vertex-disjoint paths from {self.out_neighbors}"
            )
        return f"node {self.node}: {self.status.value}; {self.max_paths} disjoint paths but no constrained set"


@dataclass(frozen=True)
class GraphVerdict:
    measured: NodeSet
    per_node: Tuple[Verdict, ...]

    @property
    def overall(self) -> Status:
        statuses = {v.status for v in self.per_node}
        if Status.NOT_IDENTIFIABLE in statuses:
            return Status.NOT_IDENTIFIABLE
        if statuses <= {Status.IDENTIFIABLE}:
            return Status.IDENTIFIABLE
        return Status.INCONCLUSIVE

    def verdict(self, i: int) -> Verdict:
        return self.per_node[i - 1]


def decide_node(g: DiGraph, i: int, c: NodeSet, cap: Optional[int] = None) -> Verdict:
    """
    Verdict for the column (i, N_i) given measured nodes c

    Args:
        g: Graph
        i: Node whose outgoing transfer functions are to be identified
        c: Measured nodes
        cap: Enumeration cap for uniqueness testing

    Returns:
        Verdict with certificate
    """
    g.check_nodes(c)
    neighbors = out_neighbors(g, i)
    m = len(neighbors)
    if m == 0:
        witness = ConstrainedWitness(PathSet(), NodeSet(), NodeSet())
        return Verdict(i, Status.IDENTIFIABLE, neighbors, 0, witness)

    count, paths = max_disjoint_paths(g, neighbors, c)
    if count < m:
        logger.debug("node %d: %d < %d disjoint paths to %s", i, count, m, c)
        return Verdict(i, Status.NOT_IDENTIFIABLE, neighbors, count, PathDeficiency(m, count, paths))

    for c_bar in c.subsets(m):
        # overlap is taken against c_bar so measured out-neighbours outside it can carry paths
        witness = exists_constrained_set(g, neighbors, c_bar, m, cap=cap)
        if witness is not None:
            logger.debug("node %d: constrained witness %s into %s", i, witness.path_set, c_bar)
            return Verdict(i, Status.IDENTIFIABLE, neighbors, count, witness)
    return Verdict(i, Status.INCONCLUSIVE, neighbors, count, None)


def decide_graph(g: DiGraph, c: NodeSet, cap: Optional[int] = None) -> GraphVerdict:
    g.check_nodes(c)
    verdicts = tuple(decide_node(g, i, c, cap=cap) for i in range(1, g.n + 1))
    result = GraphVerdict(c, verdicts)
    logger.debug("graph with %d nodes, measured %s: %s", g.n, c, result.overall.value)
    return result


def suggest_measurement_sets(
    g: DiGraph,
    k: int,
    cap: Optional[int] = None,
    max_n: Optional[int] = None,
) -> List[NodeSet]:
    """All size-k measured sets (lexicographic) that make the whole graph Identifiable"""
    limit = max_n if max_n is not None else get_settings().analysis.max_exact_n
    if g.n > limit:
        raise SizeLimitExceeded(g.n, limit)
    if not 1 <= k <= g.n:
        raise InvariantError(f"k must lie in 1..{g.n}, got {k}")
    found = [c for c in g.vertices.subsets(k) if decide_graph(g, c, cap=cap).overall is Status.IDENTIFIABLE]
    logger.debug("%d identifying measured sets of size %d", len(found), k)
    return found


def minimum_measurement_sets(
    g: DiGraph,
    cap: Optional[int] = None,
    max_n: Optional[int] = None,
) -> Tuple[int, List[NodeSet]]:
    """Smallest k with an identifying measured set of size k, and all such sets"""
    for k in range(1, g.n + 1):
        sets = suggest_measurement_sets(g, k, cap=cap, max_n=max_n)
        if sets:
            return k, sets
    # c = V always identifies, so the loop returns by k = n
    raise InvariantError("no identifying measured set found, not even the full vertex set")
