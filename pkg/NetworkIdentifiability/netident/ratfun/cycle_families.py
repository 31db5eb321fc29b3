"""
Spanning cycle families of a weighted digraph and the determinant expansion over them
An arc (k, l) carries the matrix entry M[l][k]; a spanning cycle family picks one
outgoing arc per vertex so that every vertex is also entered once.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from netident.errors import InvariantError, SizeLimitExceeded
from netident.ratfun.matrix import RatMatrix
from netident.ratfun.rational import ONE, ZERO, RationalFunction, product
from netident.settings import get_settings

logger = logging.getLogger(__name__)

Arc = Tuple[int, int]
Cycle = Tuple[int, ...]


def canonical_cycle(vertices) -> Cycle:
    """Rotate so the smallest vertex comes first"""
    vs = tuple(vertices)
    k = vs.index(min(vs))
    return vs[k:] + vs[:k]


@dataclass(frozen=True)
class WeightedDigraph:
    """Vertices 1..p; self-loops allowed; every stored weight nonzero"""

    p: int
    arcs: Mapping[Arc, RationalFunction]

    def __post_init__(self):
        for (k, l), weight in self.arcs.items():
            if not (1 <= k <= self.p and 1 <= l <= self.p):
                raise InvariantError(f"arc ({k},{l}) outside 1..{self.p}")
            if weight.is_zero:
                raise InvariantError(f"arc ({k},{l}) has zero weight")

    @classmethod
    def from_matrix(cls, m: RatMatrix) -> "WeightedDigraph":
        if not m.is_square:
            raise InvariantError(f"weighted digraph needs a square matrix, got {m.shape}")
        arcs = {(k + 1, l + 1): m[l, k] for (l, k) in m.nonzero_positions()}
        return cls(m.rows, arcs)

    def successors(self, k: int) -> List[int]:
        return sorted(l for (a, l) in self.arcs if a == k)

    def cycle_weight(self, cycle: Cycle) -> RationalFunction:
        ring = list(cycle) + [cycle[0]]
        return product(self.arcs[(a, b)] for a, b in zip(ring, ring[1:]))


@dataclass(frozen=True)
class CycleFamily:
    cycles: Tuple[Cycle, ...]
    weight: RationalFunction

    @property
    def n_cycles(self) -> int:
        return len(self.cycles)

    def contains(self, cycle: Cycle) -> bool:
        return canonical_cycle(cycle) in self.cycles

    def __str__(self) -> str:
        return " ".join("(" + " ".join(str(v) for v in c) + ")" for c in self.cycles)


def _cycles_of(succ: Dict[int, int]) -> Tuple[Cycle, ...]:
    seen = set()
    cycles = []
    for start in sorted(succ):
        if start in seen:
            continue
        walk = []
        v = start
        while v not in seen:
            seen.add(v)
            walk.append(v)
            v = succ[v]
        cycles.append(canonical_cycle(walk))
    return tuple(sorted(cycles))


def _check_size(p: int, max_n: Optional[int]) -> None:
    limit = max_n if max_n is not None else get_settings().analysis.max_exact_n
    if p > limit:
        raise SizeLimitExceeded(p, limit)


def _iter_successor_maps(w: WeightedDigraph) -> Iterator[Dict[int, int]]:
    succ: Dict[int, int] = {}
    entered = set()
    options = {k: w.successors(k) for k in range(1, w.p + 1)}

    def assign(k: int) -> Iterator[Dict[int, int]]:
        if k > w.p:
            yield dict(succ)
            return
        for l in options[k]:
            if l in entered:
                continue
            succ[k] = l
            entered.add(l)
            yield from assign(k + 1)
            entered.discard(l)
            del succ[k]

    yield from assign(1)


def spanning_cycle_families(w: WeightedDigraph, max_n: Optional[int] = None) -> List[CycleFamily]:
    """Every set of vertex-disjoint cycles covering all p vertices"""
    _check_size(w.p, max_n)
    families = []
    for succ in _iter_successor_maps(w):
        cycles = _cycles_of(succ)
        weight = product(w.cycle_weight(c) for c in cycles)
        families.append(CycleFamily(cycles, weight))
    logger.debug("%d spanning cycle families on %d vertices", len(families), w.p)
    return families


def cycle_family_sum(w: WeightedDigraph, max_n: Optional[int] = None) -> RationalFunction:
    """Sum over spanning cycle families F of (-1)^N_F w(F)"""
    total = ZERO
    for fam in spanning_cycle_families(w, max_n):
        total = total + (-fam.weight if fam.n_cycles % 2 else fam.weight)
    return total


def det_via_cycle_families(w: WeightedDigraph, max_n: Optional[int] = None) -> RationalFunction:
    """
    det M = (-1)^p * sum_F (-1)^N_F w(F)

    A family with N_F cycles is a permutation of sign (-1)^(p - N_F); the identity
    family (p self-loops) therefore enters with sign +1, as in the diagonal product.
    """
    if w.p == 0:
        return ONE
    total = cycle_family_sum(w, max_n)
    return -total if w.p % 2 else total
