import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx
from cachetools import LRUCache, cached

from ..errors import InvalidConfigError
from ..models import BoundarySpec, Geometry, LatticeSpec, Side

logger = logging.getLogger(__name__)

Coord = Tuple[int, int]


@dataclass(frozen=True)
class LatticeGraph:
    """
    A finite lattice with its vertices listed in transfer (sweep) order.

    Edges are pairs (u, v) of sweep indices with u < v; parallel edges appear
    repeatedly (the FPL2 boundary closures). ``last_use[i]`` is the largest index
    adjacent to i, or i itself, so vertex i can leave the front after step last_use[i].
    """

    lattice: LatticeSpec
    coords: Tuple[Coord, ...]
    edges: Tuple[Tuple[int, int], ...]
    sides: Dict[Side, FrozenSet[int]]
    last_use: Tuple[int, ...]

    @property
    def num_vertices(self) -> int:
        return len(self.coords)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def index_of(self, coord: Coord) -> int:
        return self.coords.index(coord)

    def earlier_neighbors(self, i: int) -> List[int]:
        return [u for u, v in self.edges if v == i]

    def marked_sites(self, boundary: BoundarySpec) -> FrozenSet[int]:
        marked = set()
        for side in boundary.sides:
            marked |= self.sides.get(side, frozenset())
        return frozenset(marked)

    def front_width(self) -> int:
        """Largest number of vertices alive in the front at any step."""
        width = 0
        for i in range(self.num_vertices):
            alive = sum(1 for j in range(i + 1) if self.last_use[j] > i)
            width = max(width, alive + 1)
        return width

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        for i, coord in enumerate(self.coords):
            graph.add_node(i, pos=coord)
        graph.add_edges_from(self.edges)
        return graph


class LatticeService:

    def build(self, lattice: LatticeSpec) -> LatticeGraph:
        return _build_graph(lattice)

    def site_coords(self, lattice: LatticeSpec) -> List[Coord]:
        if lattice.geometry == Geometry.TRIANGULAR_TRIANGLE:
            return [(x, y) for x in range(lattice.m) for y in range(x, lattice.m)]
        if lattice.geometry == Geometry.FPL2_RECTANGLE:
            return [(x, y) for x in range(2 * lattice.m) for y in range(2 * lattice.n)]
        return [(x, y) for x in range(lattice.m) for y in range(lattice.n)]

    def raw_edges(self, lattice: LatticeSpec, sites: FrozenSet[Coord]) -> List[Tuple[Coord, Coord]]:
        edges = []
        steps = [(1, 0), (0, 1)]
        if lattice.geometry in (Geometry.TRIANGULAR_RECTANGLE, Geometry.TRIANGULAR_TRIANGLE):
            steps.append((1, 1))
        for (x, y) in sorted(sites):
            for dx, dy in steps:
                other = (x + dx, y + dy)
                if other in sites:
                    edges.append(((x, y), other))
        if lattice.geometry == Geometry.FPL2_RECTANGLE:
            w, h = 2 * lattice.m, 2 * lattice.n
            for i in range(lattice.m):
                edges.append(((2 * i, 0), (2 * i + 1, 0)))
                edges.append(((2 * i, h - 1), (2 * i + 1, h - 1)))
            for j in range(lattice.n):
                edges.append(((0, 2 * j), (0, 2 * j + 1)))
                edges.append(((w - 1, 2 * j), (w - 1, 2 * j + 1)))
        return edges

    def side_sets(self, lattice: LatticeSpec, sites: FrozenSet[Coord]) -> Dict[Side, FrozenSet[Coord]]:
        if lattice.geometry == Geometry.TRIANGULAR_TRIANGLE:
            return {}
        xs = [x for x, _ in sites]
        ys = [y for _, y in sites]
        return {
            Side.LEFT: frozenset(c for c in sites if c[0] == min(xs)),
            Side.RIGHT: frozenset(c for c in sites if c[0] == max(xs)),
            Side.BOTTOM: frozenset(c for c in sites if c[1] == min(ys)),
            Side.TOP: frozenset(c for c in sites if c[1] == max(ys)),
        }


lattice_service = LatticeService()


_graph_cache: LRUCache = LRUCache(maxsize=256)


@cached(_graph_cache)
def _build_graph(lattice: LatticeSpec) -> LatticeGraph:
    coords = lattice_service.site_coords(lattice)
    sites = frozenset(coords)
    if not sites:
        raise InvalidConfigError(f"lattice {lattice.id} has no sites")
    width = max(x for x, _ in coords) + 1
    height = max(y for _, y in coords) + 1

    # columns give a front of height sites; rows give width sites
    if lattice.geometry == Geometry.TRIANGULAR_TRIANGLE or height <= width:
        order = sorted(coords, key=lambda c: (c[0], c[1]))
    else:
        order = sorted(coords, key=lambda c: (c[1], c[0]))
    index = {c: i for i, c in enumerate(order)}

    edges = []
    for a, b in lattice_service.raw_edges(lattice, sites):
        u, v = sorted((index[a], index[b]))
        edges.append((u, v))
    edges.sort()

    last_use = list(range(len(order)))
    for u, v in edges:
        last_use[u] = max(last_use[u], v)

    sides = {side: frozenset(index[c] for c in members)
             for side, members in lattice_service.side_sets(lattice, sites).items()}
    graph = LatticeGraph(lattice, tuple(order), tuple(edges), sides, tuple(last_use))
    logger.debug("built %s: V=%d E=%d", lattice.id, graph.num_vertices, graph.num_edges)
    return graph
