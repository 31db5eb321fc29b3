"""
Exact oracle over concrete network matrices
Samples and validates admissible G(z), then checks verdicts against the rank criterion on
T = (I - G)^-1, Jacobi's complementary-minor identity, the determinant factorization
along a constrained witness, and builds counterexamples G_bar = G - v u^T.

Storage convention: entry (j-1, i-1) of the matrix holds G_ji, the weight of edge (i, j).
"""

import logging
import random
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional, Tuple, Union

import orjson
from pydantic import BaseModel, ValidationError

from netident.disjoint_paths import ConstrainedWitness
from netident.errors import (
    GraphSyntaxError,
    InvariantError,
    PreconditionError,
    SingularMatrix,
)
from netident.graph_core import DiGraph, Edge, GraphPayload, NodeSet, complement, graph_from_payload, out_neighbors
from netident.identify import GraphVerdict, Status, decide_graph
from netident.ratfun.cycle_families import (
    WeightedDigraph,
    canonical_cycle,
    det_via_cycle_families,
    spanning_cycle_families,
)
from netident.ratfun.matrix import (
    RatMatrix,
    cofactor,
    determinant,
    evaluate,
    fraction_det,
    kernel_basis,
    limit_at_infinity,
    mat_inverse,
    normal_rank,
    sampled_rank,
    sympy_matrix,
)
from netident.ratfun.rational import ONE, ZERO, RationalFunction, first_order, parse_rational
from netident.settings import get_settings

logger = logging.getLogger(__name__)

EXACT = "exact"
PROBABILISTIC = "probabilistic"


def _idx(nodes: NodeSet) -> List[int]:
    return [v - 1 for v in nodes]


# --- admissibility ---


@dataclass(frozen=True)
class Admissibility:
    p1: bool
    p2: bool
    p3: bool
    p3_method: str = EXACT
    diagnostics: Tuple[str, ...] = ()

    @property
    def admissible(self) -> bool:
        return self.p1 and self.p2 and self.p3


@dataclass(frozen=True)
class NetworkMatrix:
    g: RatMatrix
    graph: DiGraph
    admissibility: Admissibility

    @property
    def n(self) -> int:
        return self.graph.n

    def weight(self, i: int, j: int) -> RationalFunction:
        """G_ji, the transfer function on edge (i, j)"""
        return self.g[j - 1, i - 1]

    @cached_property
    def identity_minus(self) -> RatMatrix:
        return RatMatrix.identity(self.n) - self.g

    @cached_property
    def transfer(self) -> RatMatrix:
        """T = (I - G)^-1"""
        return mat_inverse(self.identity_minus)


def _principal_minors_nonzero(limit: List[List[Fraction]], n: int, max_n: int, sampled: int, seed: int):
    if all(limit[r][c] == (1 if r == c else 0) for r in range(n) for c in range(n)):
        return True, EXACT, None
    if n <= max_n:
        subsets = (s for k in range(1, n + 1) for s in combinations(range(n), k))
        method = EXACT
    else:
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(range(n), rng.randint(1, n)))) for _ in range(sampled))
        method = PROBABILISTIC
    for s in subsets:
        if fraction_det([[limit[r][c] for c in s] for r in s]) == 0:
            return False, method, s
    return True, method, None


def validate_admissible(
    g: RatMatrix,
    graph: DiGraph,
    max_n: Optional[int] = None,
    seed: int = 0,
) -> NetworkMatrix:
    """
    Check properness, consistency with the edge set, and well-posedness of G

    Failures are recorded in the admissibility diagnostics, not raised.
    """
    n = graph.n
    if g.shape != (n, n):
        raise InvariantError(f"network matrix must be {n}x{n}, got {g.shape}")
    settings = get_settings()
    limit_n = max_n if max_n is not None else settings.analysis.max_exact_n
    notes: List[str] = []

    p1 = True
    for r in range(n):
        for c in range(n):
            if not g[r, c].is_proper:
                p1 = False
                notes.append(f"P1: G{r + 1}{c + 1} = {g[r, c]} is improper")

    p2 = True
    for r in range(n):
        for c in range(n):
            on_edge = graph.has_edge(c + 1, r + 1)
            if on_edge == g[r, c].is_zero:
                p2 = False
                what = "zero on edge" if on_edge else "nonzero off the edge set"
                notes.append(f"P2: G{r + 1}{c + 1} {what} ({c + 1},{r + 1})")

    p3, method = False, EXACT
    if p1:
        limit = limit_at_infinity(RatMatrix.identity(n) - g)
        p3, method, bad = _principal_minors_nonzero(
            limit, n, limit_n, settings.oracle.p3_sampled_minors, seed
        )
        if bad is not None:
            notes.append(f"P3: principal minor on {[k + 1 for k in bad]} of lim (I-G) is zero")
    else:
        notes.append("P3: not evaluated, G has improper entries")

    result = Admissibility(p1, p2, p3, method, tuple(notes))
    if not result.admissible:
        logger.debug("inadmissible network matrix: %s", "; ".join(notes))
    return NetworkMatrix(g, graph, result)


# --- sampling ---


class SampleMode(str, Enum):
    GENERIC = "generic"
    ADVERSARIAL = "adversarial"


def _draw_first_order(rng: random.Random, bound: int) -> RationalFunction:
    a = rng.choice([k for k in range(-bound, bound + 1) if k != 0])
    b = rng.randint(-bound, bound)
    return first_order(a, b)


def sample_admissible(
    graph: DiGraph,
    seed: int,
    mode: Union[SampleMode, str] = SampleMode.GENERIC,
    assignments: Optional[Mapping[Edge, RationalFunction]] = None,
) -> NetworkMatrix:
    """
    Admissible network matrix for graph, deterministic in (graph, seed, mode, assignments)

    Every edge (i, j) draws G_ji = a / (z - b) in canonical edge order; in adversarial mode
    the assigned edges then take their given values.
    """
    mode = SampleMode(mode)
    assignments = dict(assignments or {})
    if mode is SampleMode.GENERIC and assignments:
        raise InvariantError("generic sampling takes no assignments")
    for (i, j), value in assignments.items():
        if not graph.has_edge(i, j):
            raise InvariantError(f"assignment on ({i},{j}) which is not an edge")
        if value.is_zero:
            raise InvariantError(f"assignment on edge ({i},{j}) is zero")
        if not value.is_proper:
            raise InvariantError(f"assignment on edge ({i},{j}) is improper: {value}")

    bound = get_settings().oracle.coefficient_bound
    rng = random.Random(seed)
    cells = [[ZERO] * graph.n for _ in range(graph.n)]
    for (i, j) in graph.edges:
        drawn = _draw_first_order(rng, bound)
        cells[j - 1][i - 1] = assignments.get((i, j), drawn)

    nm = validate_admissible(RatMatrix.from_rows(cells, cols=graph.n), graph, seed=seed)
    if not nm.admissibility.admissible:
        raise InvariantError("sampled matrix is not admissible: " + "; ".join(nm.admissibility.diagnostics))
    return nm


# --- fixtures ---

_EDGE_KEY = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*$")


class FixturePayload(BaseModel):
    graph: GraphPayload
    assignments: Dict[str, str] = {}
    seed: int = 0
    mode: Literal["generic", "adversarial"] = "generic"


@dataclass(frozen=True)
class Fixture:
    graph: DiGraph
    assignments: Mapping[Edge, RationalFunction]
    seed: int
    mode: SampleMode

    def network(self, seed: Optional[int] = None) -> NetworkMatrix:
        return sample_admissible(self.graph, self.seed if seed is None else seed, self.mode, self.assignments)


def parse_fixture(text: str) -> Fixture:
    """{graph: <graph JSON>, assignments: {"i->j": "<literal>"}, seed: int, mode: "generic"|"adversarial"}"""
    try:
        payload = FixturePayload.model_validate(orjson.loads(text))
    except orjson.JSONDecodeError as e:
        raise GraphSyntaxError(f"invalid fixture JSON: {e}") from e
    except ValidationError as e:
        raise GraphSyntaxError(f"invalid fixture payload: {e}") from e
    graph = graph_from_payload(payload.graph)
    assignments: Dict[Edge, RationalFunction] = {}
    for key, literal in payload.assignments.items():
        m = _EDGE_KEY.match(key)
        if not m:
            raise GraphSyntaxError(f"assignment key {key!r} is not of the form 'i->j'")
        assignments[(int(m.group(1)), int(m.group(2)))] = parse_rational(literal)
    if payload.mode == "adversarial" and not assignments:
        raise GraphSyntaxError("adversarial fixture needs at least one assignment")
    if payload.mode == "generic" and assignments:
        raise GraphSyntaxError("generic fixture must not carry assignments")
    return Fixture(graph, assignments, payload.seed, SampleMode(payload.mode))


def load_fixture(path: Union[str, Path]) -> Fixture:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise GraphSyntaxError(f"cannot read fixture {path}: {e}") from e
    return parse_fixture(text)


# --- rank criterion ---


@dataclass(frozen=True)
class RankTest:
    node: int
    rank: int
    required: int
    method: str = EXACT

    @property
    def full(self) -> bool:
        return self.rank == self.required


def measured_transfer(nm: NetworkMatrix, c: NodeSet) -> RatMatrix:
    """C T(z): the rows of (I - G)^-1 indexed by the measured nodes"""
    nm.graph.check_nodes(c)
    return nm.transfer.submatrix(_idx(c), list(range(nm.n)))


def _evaluated_rank(nm: NetworkMatrix, c: NodeSet, neighbors: NodeSet, seed: int) -> int:
    settings = get_settings().oracle
    rows, cols = _idx(c), _idx(neighbors)

    def transfer_at(x: int):
        a = sympy_matrix(evaluate(nm.identity_minus, x))
        if a.det() == 0:
            raise SingularMatrix(f"I - G is singular at z={x}")
        return a.inv().extract(rows, cols)

    return sampled_rank(
        transfer_at,
        settings.probabilistic_points,
        settings.evaluation_bound,
        seed,
        settings.coefficient_bound,
    )


def rank_test(nm: NetworkMatrix, i: int, c: NodeSet, max_n: Optional[int] = None, seed: int = 0) -> RankTest:
    """
    Normal rank of T_{C,N_i} against |N_i|

    Above max_exact_n the rank is taken at random evaluation points and labeled probabilistic.
    """
    neighbors = out_neighbors(nm.graph, i)
    nm.graph.check_nodes(c)
    m = len(neighbors)
    if m == 0:
        return RankTest(i, 0, 0)
    if not len(c):
        return RankTest(i, 0, m)
    limit = max_n if max_n is not None else get_settings().analysis.max_exact_n
    if nm.n > limit:
        logger.warning("n=%d exceeds max_exact_n=%d; rank of T_{C,N_%d} is probabilistic", nm.n, limit, i)
        return RankTest(i, _evaluated_rank(nm, c, neighbors, seed), m, PROBABILISTIC)
    sub = nm.transfer.submatrix(_idx(c), _idx(neighbors))
    return RankTest(i, normal_rank(sub), m)


def graph_rank_test(nm: NetworkMatrix, c: NodeSet, max_n: Optional[int] = None, seed: int = 0) -> Dict[int, RankTest]:
    """Rank criterion for every node; the sample identifies G iff all are full"""
    return {i: rank_test(nm, i, c, max_n=max_n, seed=seed) for i in range(1, nm.n + 1)}


def all_full(tests: Mapping[int, RankTest]) -> bool:
    return all(t.full for t in tests.values())


# --- Jacobi identity ---


@dataclass(frozen=True)
class JacobiCheck:
    lhs_nonzero: bool
    rhs_nonzero: bool
    identity_holds: bool

    @property
    def agree(self) -> bool:
        return self.lhs_nonzero == self.rhs_nonzero


def jacobi_check(nm: NetworkMatrix, i: int, c: NodeSet) -> JacobiCheck:
    """
    det T_{C,N_i} against det (I - G)_{N_i^c, C^c} for |C| = |N_i|

    identity_holds verifies det adj(I-G)_{C,N_i} = s * det(I-G)^(k-1) * det (I-G)_{N_i^c, C^c}
    with s = (-1)^(sum C + sum N_i), using only the k*k cofactors involved.
    """
    neighbors = out_neighbors(nm.graph, i)
    nm.graph.check_nodes(c)
    k = len(neighbors)
    if len(c) != k:
        raise PreconditionError(f"Jacobi check needs |C| = |N_{i}| = {k}, got |C| = {len(c)}")
    a = nm.identity_minus
    lhs = determinant(nm.transfer.submatrix(_idx(c), _idx(neighbors)))
    rhs = determinant(a.submatrix(_idx(complement(nm.graph, neighbors)), _idx(complement(nm.graph, c))))

    det_a = determinant(a)
    adj_sub = RatMatrix.from_rows([[cofactor(a, nb, cr) for nb in _idx(neighbors)] for cr in _idx(c)], cols=k)
    sign = -1 if (sum(c) + sum(neighbors)) % 2 else 1
    identity_holds = determinant(adj_sub) == det_a ** (k - 1) * rhs * sign
    return JacobiCheck(not lhs.is_zero, not rhs.is_zero, identity_holds)


# --- counterexample ---


@dataclass(frozen=True)
class Counterexample:
    g: NetworkMatrix
    g_bar: NetworkMatrix
    node: int
    measured: NodeSet
    kernel_vector: Tuple[RationalFunction, ...]
    v: Tuple[RationalFunction, ...]
    alpha: int
    delay: int

    def column_differs(self) -> bool:
        col = self.node - 1
        return self.g.g.column(col) != self.g_bar.g.column(col)


def _alpha_candidates():
    k = 1
    while True:
        yield k
        yield -k
        k += 1


def build_counterexample(nm: NetworkMatrix, i: int, c: NodeSet) -> Counterexample:
    """
    Admissible G_bar with C(I-G)^-1 = C(I-G_bar)^-1 and a different column i

    Takes the first kernel vector w of T_{C,N_i}, the smallest delay k making z^-k w strictly
    proper, and the first alpha in 1, -1, 2, -2, ... with every G_ji - v_j nonzero.
    """
    neighbors = out_neighbors(nm.graph, i)
    if not len(neighbors):
        raise PreconditionError(f"node {i} has no out-neighbours: nothing to identify")
    test = rank_test(nm, i, c, max_n=nm.n)
    if test.full:
        raise PreconditionError(f"T_(C,N_{i}) has full column rank {test.rank}; no counterexample exists")

    sub = nm.transfer.submatrix(_idx(c), _idx(neighbors))
    w_hat = kernel_basis(sub)[0]
    delay = max(0, max(x.relative_degree for x in w_hat if not x.is_zero) + 1)
    shifted = [x * RationalFunction.z_power(-delay) for x in w_hat]

    column = [nm.weight(i, j) for j in neighbors]
    alpha = None
    for cand in _alpha_candidates():
        if all(not (gj - sv * cand).is_zero for gj, sv in zip(column, shifted)):
            alpha = cand
            break
        if abs(cand) > len(column) + 1:
            break
    if alpha is None:
        raise InvariantError(f"no alpha keeps column {i} nonzero on every out-neighbour")

    v = [ZERO] * nm.n
    for j, sv in zip(neighbors, shifted):
        v[j - 1] = sv * alpha
    g_bar = nm.g
    for r in range(nm.n):
        if not v[r].is_zero:
            g_bar = g_bar.with_entry(r, i - 1, g_bar[r, i - 1] - v[r])

    nm_bar = validate_admissible(g_bar, nm.graph)
    ce = Counterexample(nm, nm_bar, i, c, tuple(w_hat), tuple(v), alpha, delay)
    if not nm_bar.admissibility.admissible:
        raise InvariantError("counterexample is not admissible: " + "; ".join(nm_bar.admissibility.diagnostics))
    if not transfer_equal(nm, nm_bar, c):
        raise InvariantError("counterexample changes the measured transfer matrix")
    if not ce.column_differs():
        raise InvariantError(f"counterexample leaves column {i} unchanged")
    logger.debug("counterexample for node %d: alpha=%d delay=%d", i, alpha, delay)
    return ce


def transfer_equal(a: NetworkMatrix, b: NetworkMatrix, c: NodeSet) -> bool:
    """
    C(I-G_a)^-1 == C(I-G_b)^-1, computed by comparing rows and by C T_a (G_a - G_b) == 0
    """
    if a.n != b.n:
        raise InvariantError(f"dimension mismatch {a.n} vs {b.n}")
    rows = measured_transfer(a, c)
    by_rows = rows == measured_transfer(b, c)
    by_product = (rows @ (a.g - b.g)).is_zero()
    if by_rows != by_product:
        raise InvariantError("row comparison and C T D = 0 disagree")
    return by_rows


# --- determinant factorization along a witness ---


@dataclass(frozen=True)
class FactorizationCheck:
    node: int
    size: int
    families: int
    families_with_witness: int
    det_nonzero: bool
    factorization_holds: bool

    @property
    def all_contain_witness(self) -> bool:
        return self.families == self.families_with_witness

    @property
    def ok(self) -> bool:
        return self.all_contain_witness and self.det_nonzero and self.factorization_holds


def factorization_check(
    nm: NetworkMatrix,
    i: int,
    witness: ConstrainedWitness,
    max_n: Optional[int] = None,
) -> FactorizationCheck:
    """
    M = (I - G)_{N_i^c, Cbar^c} with Cbar the witness end nodes plus the shared nodes.

    Rows and columns are paired: a node outside N_i and Cbar with itself, the row of each
    path end with the column of its path start. In the weighted digraph of M every witness
    path closes into a cycle; every spanning cycle family must contain all of them, and
    det M = (-1)^(p1 + m) w(F1) det (I - G)_{R,R} where p1 counts the vertices on those
    cycles, m the cycles, and R the nodes left over.
    """
    graph = nm.graph
    neighbors = out_neighbors(graph, i)
    routed = witness.path_set.routed
    c_bar = witness.target_subset | witness.shared
    free = complement(graph, neighbors | c_bar)
    pairs = [(p.end, p.start) for p in routed.paths]
    row_nodes = list(free) + [end for end, _ in pairs]
    col_nodes = list(free) + [start for _, start in pairs]

    a = nm.identity_minus
    m_mat = a.submatrix([v - 1 for v in row_nodes], [v - 1 for v in col_nodes])
    w = WeightedDigraph.from_matrix(m_mat)
    position = {v: k + 1 for k, v in enumerate(free)}

    cycles = []
    for k, path in enumerate(routed.paths):
        pair_vertex = len(free) + k + 1
        cycles.append(canonical_cycle([pair_vertex] + [position[v] for v in path.vertices[1:-1]]))

    families = spanning_cycle_families(w, max_n)
    with_witness = sum(1 for f in families if all(f.contains(cyc) for cyc in cycles))

    det_m = det_via_cycle_families(w, max_n)
    on_cycles = {v for p in routed.paths for v in p.vertices[1:-1]}
    rest = [v for v in free if v not in on_cycles]
    w_f1 = ONE
    for cyc in cycles:
        w_f1 = w_f1 * w.cycle_weight(cyc)
    det_rest = determinant(a.submatrix([v - 1 for v in rest], [v - 1 for v in rest]))
    p1 = sum(len(cyc) for cyc in cycles)
    sign = -1 if (p1 + len(cycles)) % 2 else 1
    holds = det_m == w_f1 * det_rest * sign and det_m == determinant(m_mat)
    return FactorizationCheck(i, w.p, len(families), with_witness, not det_m.is_zero, holds)


# --- sampled evidence and consistency ---


@dataclass(frozen=True)
class NodeEvidence:
    node: int
    required: int
    ranks: Tuple[int, ...]

    @property
    def full_count(self) -> int:
        return sum(1 for r in self.ranks if r == self.required)


def sample_evidence(
    graph: DiGraph,
    c: NodeSet,
    samples: int,
    seed: int = 0,
    max_n: Optional[int] = None,
) -> Tuple[NodeEvidence, ...]:
    """Rank of T_{C,N_i} for every node over generic samples seed .. seed+samples-1"""
    ranks: Dict[int, List[int]] = {i: [] for i in range(1, graph.n + 1)}
    required = {i: len(out_neighbors(graph, i)) for i in ranks}
    for s in range(seed, seed + samples):
        nm = sample_admissible(graph, s)
        for i, t in graph_rank_test(nm, c, max_n=max_n, seed=s).items():
            ranks[i].append(t.rank)
    return tuple(NodeEvidence(i, required[i], tuple(ranks[i])) for i in sorted(ranks))


@dataclass(frozen=True)
class OracleRun:
    verdict: GraphVerdict
    samples: int
    seed: int
    violations: Tuple[str, ...]
    checks: int


def consistency_violations(
    graph: DiGraph,
    c: NodeSet,
    samples: int,
    seed: int = 0,
    cap: Optional[int] = None,
    max_n: Optional[int] = None,
) -> OracleRun:
    """
    Cross-check path verdicts against exact algebra on generic samples

    Identifiable nodes must have full-rank T_{C,N_i} and pass the factorization check;
    NotIdentifiable nodes must be rank deficient; Jacobi agreement must hold on the
    square case given by each witness end set, and on C itself when |C| = |N_i|.
    """
    verdict = decide_graph(graph, c, cap=cap)
    violations: List[str] = []
    checks = 0
    for s in range(seed, seed + samples):
        nm = sample_admissible(graph, s)
        for v in verdict.per_node:
            i = v.node
            test = rank_test(nm, i, c, max_n=max_n, seed=s)
            checks += 1
            if v.status is Status.IDENTIFIABLE and not test.full:
                violations.append(f"seed {s}: node {i} Identifiable but rank {test.rank} < {test.required}")
            if v.status is Status.NOT_IDENTIFIABLE and test.full:
                violations.append(f"seed {s}: node {i} NotIdentifiable but rank is full")
            if not len(v.out_neighbors):
                continue
            square_sets = []
            if len(c) == len(v.out_neighbors):
                square_sets.append(c)
            if isinstance(v.certificate, ConstrainedWitness):
                square_sets.append(v.certificate.target_subset | v.certificate.shared)
            for square in square_sets:
                jc = jacobi_check(nm, i, square)
                checks += 1
                if not (jc.agree and jc.identity_holds):
                    violations.append(f"seed {s}: node {i} Jacobi check failed on {square}")
            if v.status is Status.IDENTIFIABLE:
                fc = factorization_check(nm, i, v.certificate, max_n=max_n)
                checks += 1
                if not fc.ok:
                    violations.append(f"seed {s}: node {i} determinant factorization failed")
    for line in violations:
        logger.warning(line)
    return OracleRun(verdict, samples, seed, tuple(violations), checks)
