import logging
import math
from collections import Counter, defaultdict
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from ..config import settings
from ..errors import CornerFLMError, LatticeSizeError
from ..models import LatticeSpec, ModelKind, ModelSpec
from .lattice_service import LatticeGraph, lattice_service
from .parameterization_service import NormalizedZ, RawPartition, parameterization_service

logger = logging.getLogger(__name__)


def laurent_mul(a: Mapping[int, int], b: Mapping[int, int]) -> Dict[int, int]:
    out: Dict[int, int] = defaultdict(int)
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[ea + eb] += ca * cb
    return {e: c for e, c in out.items() if c}


def laurent_pow(a: Mapping[int, int], k: int) -> Dict[int, int]:
    result: Dict[int, int] = {0: 1}
    for _ in range(k):
        result = laurent_mul(result, a)
    return result


def expand_fk_counts(counts: Mapping[Tuple[int, int, int], int], potts_q: Mapping[int, int],
                     potts_v: Mapping[int, int]) -> RawPartition:
    """Turn (clusters, edges, flagged) multiplicities into Q^k v^|A| weights in s."""
    q_powers: Dict[int, Dict[int, int]] = {}
    v_powers: Dict[int, Dict[int, int]] = {}
    raw: RawPartition = defaultdict(int)
    for (k, a, d), mult in counts.items():
        if k not in q_powers:
            q_powers[k] = laurent_pow(potts_q, k)
        if a not in v_powers:
            v_powers[a] = laurent_pow(potts_v, a)
        for e, c in laurent_mul(q_powers[k], v_powers[a]).items():
            raw[(e, d)] += mult * c
    return {key: w for key, w in raw.items() if w}


class BruteForceService:

    def __init__(self):
        self.lattice_service = lattice_service
        self.parameterization_service = parameterization_service

    def _check_edges(self, graph: LatticeGraph):
        if graph.num_edges > settings.max_brute_force_edges:
            raise LatticeSizeError(
                f"{graph.lattice.id} has {graph.num_edges} edges; brute force allows "
                f"{settings.max_brute_force_edges}")

    def fk_counts(self, graph: LatticeGraph,
                  marked: FrozenSet[int] = frozenset()) -> Counter:
        """Multiplicities of (clusters, edges, clusters touching a marked site) over all edge subsets."""
        self._check_edges(graph)
        counts: Counter = Counter()
        edges = graph.edges
        n = graph.num_vertices
        for mask in range(1 << len(edges)):
            uf = UnionFind(range(n))
            used = 0
            for bit, (u, v) in enumerate(edges):
                if mask >> bit & 1:
                    uf.union(u, v)
                    used += 1
            roots = {uf[i] for i in range(n)}
            flagged = {uf[i] for i in marked}
            counts[(len(roots), used, len(flagged))] += 1
        return counts

    def fk_partition(self, graph: LatticeGraph, kind: ModelKind,
                     marked: FrozenSet[int] = frozenset()) -> RawPartition:
        couplings = self.parameterization_service.couplings(kind)
        return expand_fk_counts(self.fk_counts(graph, marked), couplings.potts_q, couplings.potts_v)

    def loop_partition(self, graph: LatticeGraph,
                       marked: FrozenSet[int] = frozenset()) -> RawPartition:
        """
        Selfdual square Potts in the medial-loop form, n^V * sum n^{#loops}, s = 1/n.

        Loops are the face walks of each cluster, traced around the planar embedding;
        the outer walk of a cluster holding a marked site is the loop that touches the
        marked boundary.
        """
        self._check_edges(graph)
        n = graph.num_vertices
        counts: Counter = Counter()
        for mask in range(1 << graph.num_edges):
            chosen = [e for bit, e in enumerate(graph.edges) if mask >> bit & 1]
            loops, touching = self._trace_loops(graph, chosen, marked)
            counts[(-(n + loops), touching)] += 1
        return dict(counts)

    @staticmethod
    def _trace_loops(graph: LatticeGraph, chosen: List[Tuple[int, int]],
                     marked: FrozenSet[int]) -> Tuple[int, int]:
        coords = graph.coords
        sub = nx.Graph()
        sub.add_nodes_from(range(graph.num_vertices))
        sub.add_edges_from(chosen)
        # neighbours sorted counter-clockwise
        rotation = {}
        for v in sub.nodes:
            x0, y0 = coords[v]
            rotation[v] = sorted(sub.neighbors(v),
                                 key=lambda w: math.atan2(coords[w][1] - y0, coords[w][0] - x0))
        loops = touching = 0
        for component in nx.connected_components(sub):
            if len(component) == 1:
                loops += 1
                touching += int(next(iter(component)) in marked)
                continue
            seen = set()
            walks = 0
            for u in component:
                for v in rotation[u]:
                    if (u, v) in seen:
                        continue
                    a, b = u, v
                    while (a, b) not in seen:
                        seen.add((a, b))
                        around = rotation[b]
                        # next dart: clockwise successor of the reverse dart
                        c = around[(around.index(a) - 1) % len(around)]
                        a, b = b, c
                    walks += 1
            loops += walks
            if component & marked:
                touching += 1
        return loops, touching

    def ising_partition(self, graph: LatticeGraph) -> RawPartition:
        """Sum over all 2^V spin states of x^{-sum s_i s_j}."""
        n = graph.num_vertices
        if n > settings.max_brute_force_sites:
            raise LatticeSizeError(
                f"{graph.lattice.id} has {n} sites; brute force allows {settings.max_brute_force_sites}")
        edges = np.array(graph.edges, dtype=np.int64).reshape(-1, 2)
        counts: Counter = Counter()
        chunk = 1 << 16
        for start in range(0, 1 << n, chunk):
            states = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
            spins = ((states[:, None] >> np.arange(n)) & 1).astype(np.int32) * 2 - 1
            bonds = (spins[:, edges[:, 0]] * spins[:, edges[:, 1]]).sum(axis=1)
            values, multiplicity = np.unique(-bonds, return_counts=True)
            for e, c in zip(values, multiplicity):
                counts[(int(e), 0)] += int(c)
        return dict(counts)

    def fpl2_partition(self, graph: LatticeGraph) -> RawPartition:
        """Two-colourings with two black edges per vertex, weight n per black and per white loop."""
        self._check_edges(graph)
        edges = graph.edges
        n = graph.num_vertices
        remaining = [0] * n
        for u, v in edges:
            remaining[u] += 1
            remaining[v] += 1
        black_degree = [0] * n
        colours: List[bool] = []
        counts: Counter = Counter()

        def loops() -> int:
            total = 0
            for colour in (True, False):
                sub = nx.MultiGraph()
                sub.add_edges_from(e for e, c in zip(edges, colours) if c == colour)
                total += nx.number_connected_components(sub)
            return total

        def extend(i: int):
            if i == len(edges):
                counts[-loops()] += 1
                return
            u, v = edges[i]
            remaining[u] -= 1
            remaining[v] -= 1
            for colour in (True, False):
                if colour and (black_degree[u] == 2 or black_degree[v] == 2):
                    continue
                if colour:
                    black_degree[u] += 1
                    black_degree[v] += 1
                if (black_degree[u] + remaining[u] >= 2 and black_degree[v] + remaining[v] >= 2
                        and (remaining[u] or black_degree[u] == 2)
                        and (remaining[v] or black_degree[v] == 2)):
                    colours.append(colour)
                    extend(i + 1)
                    colours.pop()
                if colour:
                    black_degree[u] -= 1
                    black_degree[v] -= 1
            remaining[u] += 1
            remaining[v] += 1

        extend(0)
        return {(e, 0): c for e, c in counts.items()}

    def raw_partition(self, lattice: LatticeSpec, model: ModelSpec) -> RawPartition:
        graph = self.lattice_service.build(lattice)
        marked = graph.marked_sites(model.boundary)
        kind = model.kind
        if model.is_potts:
            raw = self.fk_partition(graph, kind, marked)
            if kind == ModelKind.SQ_SELFDUAL:
                loop_raw = self.loop_partition(graph, marked)
                if loop_raw != raw:
                    raise CornerFLMError(f"FK and loop forms disagree on {lattice.id}")
            return raw
        if model.is_ising:
            return self.ising_partition(graph)
        return self.fpl2_partition(graph)

    def brute_force_partition(self, lattice: LatticeSpec, model: ModelSpec,
                              order: Optional[int] = None) -> NormalizedZ:
        """Oracle NormalizedZ by exhaustive enumeration."""
        graph = self.lattice_service.build(lattice)
        raw = self.raw_partition(lattice, model)
        logger.debug("brute force %s on %s: %d raw terms", model.id, lattice.id, len(raw))
        marked = len(graph.marked_sites(model.boundary))
        return self.parameterization_service.normalize(model, lattice, raw, marked, order)


brute_force_service = BruteForceService()
