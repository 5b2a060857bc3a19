import logging
import time
from collections import defaultdict
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from tqdm import tqdm

from ..config import settings
from ..errors import LatticeSizeError
from ..models import BoundarySpec, LatticeSpec, ModelKind, ModelSpec, Side
from .lattice_service import LatticeGraph, lattice_service
from .parameterization_service import NormalizedZ, RawPartition, parameterization_service

logger = logging.getLogger(__name__)

# value of one transfer state: (s-exponent, flagged closed clusters) -> weight
Weights = Dict[Tuple[int, int], int]


def _canonical(labels: Tuple[int, ...], flags: Mapping[int, bool]) -> Tuple[Tuple[int, ...], Tuple[bool, ...]]:
    """Relabel blocks by first occurrence; flags follow their blocks."""
    mapping: Dict[int, int] = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    new_flags = [False] * len(mapping)
    for old, new in mapping.items():
        new_flags[new] = flags.get(old, False)
    return tuple(out), tuple(new_flags)


def _scale(weights: Weights, laurent: Mapping[int, int], flag_shift: int = 0) -> Weights:
    out: Weights = defaultdict(int)
    for (e, d), c in weights.items():
        for de, dc in laurent.items():
            out[(e + de, d + flag_shift)] += c * dc
    return out


def _accumulate(table: Dict, key, weights: Mapping) -> None:
    target = table.get(key)
    if target is None:
        target = defaultdict(int)
        table[key] = target
    for k, c in weights.items():
        target[k] += c


class TransferService:

    def __init__(self):
        self.lattice_service = lattice_service
        self.parameterization_service = parameterization_service

    def _progress(self, iterable, desc: str):
        return tqdm(iterable, desc=desc, leave=False, disable=not settings.show_progress)

    def _check_width(self, graph: LatticeGraph, budget: int):
        width = graph.front_width()
        if width > budget:
            raise LatticeSizeError(f"{graph.lattice.id}: front width {width} exceeds budget {budget}")

    def fk_transfer(self, graph: LatticeGraph, potts_q: Mapping[int, int], potts_v: Mapping[int, int],
                    marked: FrozenSet[int] = frozenset()) -> RawPartition:
        """
        Sum over edge subsets of Q^k v^|A| by a non-crossing connectivity transfer matrix.

        States are block labellings of the front with a touched-marked-side flag per
        block; a block that leaves the front closes a cluster and contributes Q.
        """
        self._check_width(graph, settings.max_front_width_potts)
        front: List[int] = []
        states: Dict[Tuple[Tuple[int, ...], Tuple[bool, ...]], Weights] = {((), ()): {(0, 0): 1}}
        for i in self._progress(range(graph.num_vertices), f"FK {graph.lattice.id}"):
            front.append(i)
            grown: Dict = {}
            for (labels, flags), w in states.items():
                new_label = len(flags)
                _accumulate(grown, (labels + (new_label,), flags + (i in marked,)), w)
            states = grown
            for u in graph.earlier_neighbors(i):
                pos_u, pos_i = front.index(u), len(front) - 1
                branched: Dict = {}
                for (labels, flags), w in states.items():
                    _accumulate(branched, (labels, flags), w)
                    a, b = labels[pos_u], labels[pos_i]
                    if a == b:
                        key = (labels, flags)
                    else:
                        merged = tuple(a if lab == b else lab for lab in labels)
                        flag_map = dict(enumerate(flags))
                        flag_map[a] = flags[a] or flags[b]
                        key = _canonical(merged, flag_map)
                    _accumulate(branched, key, _scale(w, potts_v))
                states = branched
            for j in [j for j in front if graph.last_use[j] <= i]:
                pos = front.index(j)
                retired: Dict = {}
                for (labels, flags), w in states.items():
                    lab = labels[pos]
                    rest = labels[:pos] + labels[pos + 1:]
                    if lab in rest:
                        key = _canonical(rest, dict(enumerate(flags)))
                        _accumulate(retired, key, w)
                    else:
                        key = _canonical(rest, dict(enumerate(flags)))
                        _accumulate(retired, key, _scale(w, potts_q, int(flags[lab])))
                states = retired
                front.pop(pos)
            logger.debug("FK step %d on %s: %d states", i, graph.lattice.id, len(states))
        final = states.get(((), ()), {})
        return {k: c for k, c in final.items() if c}

    def ising_transfer(self, graph: LatticeGraph, truncation: Optional[int] = None) -> RawPartition:
        """
        Spin-front transfer for x^{-sum s_i s_j}, tracking the number of unsatisfied bonds.

        The first spin is fixed to +1 and the result doubled. Terms with at least
        ``truncation`` unsatisfied bonds (powers of w = x^2) are dropped.
        """
        self._check_width(graph, settings.max_front_width_ising)
        front: List[int] = []
        states: Dict[Tuple[int, ...], Dict[int, int]] = {(): {0: 1}}
        for i in self._progress(range(graph.num_vertices), f"Ising {graph.lattice.id}"):
            front.append(i)
            neighbours = [front.index(u) for u in graph.earlier_neighbors(i)]
            grown: Dict = {}
            for spins, w in states.items():
                for s in ((1,) if i == 0 else (1, -1)):
                    broken = sum(1 for p in neighbours if spins[p] != s)
                    shifted = {dis + broken: c for dis, c in w.items()
                               if truncation is None or dis + broken < truncation}
                    if shifted:
                        _accumulate(grown, spins + (s,), shifted)
            states = grown
            for j in [j for j in front if graph.last_use[j] <= i]:
                pos = front.index(j)
                retired: Dict = {}
                for spins, w in states.items():
                    _accumulate(retired, spins[:pos] + spins[pos + 1:], w)
                states = retired
                front.pop(pos)
        final = states.get((), {})
        e = graph.num_edges
        return {(-e + 2 * dis, 0): 2 * c for dis, c in final.items() if c}

    def fpl2_transfer(self, graph: LatticeGraph) -> RawPartition:
        """
        Two-colour loop transfer: open edges carry (colour, path label); each vertex
        takes exactly two black and two white edges, and joining two ends of one path
        closes a loop of weight n.
        """
        self._check_width(graph, settings.max_front_width_potts)
        incoming: Dict[int, List[int]] = defaultdict(list)
        outgoing: Dict[int, List[int]] = defaultdict(list)
        for idx, (u, v) in enumerate(graph.edges):
            outgoing[u].append(idx)
            incoming[v].append(idx)
        open_edges: List[int] = []
        states: Dict[Tuple[Tuple[bool, int], ...], Dict[int, int]] = {(): {0: 1}}
        for i in self._progress(range(graph.num_vertices), f"FPL2 {graph.lattice.id}"):
            ins = [open_edges.index(e) for e in incoming[i]]
            outs = outgoing[i]
            keep = [p for p in range(len(open_edges)) if p not in ins]
            new_open = [open_edges[p] for p in keep] + outs
            advanced: Dict = {}
            for state, w in states.items():
                in_black = [p for p in ins if state[p][0]]
                need = 2 - len(in_black)
                if need < 0 or need > len(outs):
                    continue
                for black_out in _subsets(len(outs), need):
                    result = self._fpl2_join(state, ins, keep, outs, black_out)
                    if result is None:
                        continue
                    key, closed = result
                    _accumulate(advanced, key, {loops + closed: c for loops, c in w.items()})
            states = advanced
            open_edges = new_open
            # keep open edges in edge-index order so states stay comparable
            order = sorted(range(len(open_edges)), key=lambda p: open_edges[p])
            open_edges = [open_edges[p] for p in order]
            states_sorted: Dict = {}
            for state, w in states.items():
                _accumulate(states_sorted, _relabel_paths(tuple(state[p] for p in order)), w)
            states = states_sorted
        final = states.get((), {})
        return {(-loops, 0): c for loops, c in final.items() if c}

    @staticmethod
    def _fpl2_join(state, ins: List[int], keep: List[int], outs: List[int],
                   black_out: FrozenSet[int]):
        kept = [list(state[p]) for p in keep]
        out_slots: List[Optional[List]] = [None] * len(outs)
        closed = 0
        next_label = max((lab for _, lab in state), default=-1) + 1
        for colour in (True, False):
            ends_in = [state[p][1] for p in ins if state[p][0] == colour]
            ends_out = [k for k in range(len(outs)) if (k in black_out) == colour]
            if len(ends_in) + len(ends_out) != 2:
                return None
            if len(ends_in) == 2:
                a, b = ends_in
                if a == b:
                    closed += 1
                else:
                    for slot in kept:
                        if slot[0] == colour and slot[1] == b:
                            slot[1] = a
            elif len(ends_in) == 1:
                out_slots[ends_out[0]] = [colour, ends_in[0]]
            else:
                for k in ends_out:
                    out_slots[k] = [colour, next_label]
                next_label += 1
        key = tuple((c, lab) for c, lab in kept) + tuple((c, lab) for c, lab in out_slots)
        return key, closed

    def transfer_raw(self, lattice: LatticeSpec, model: ModelSpec,
                     truncation: Optional[int] = None) -> RawPartition:
        graph = self.lattice_service.build(lattice)
        if model.is_potts:
            couplings = self.parameterization_service.couplings(model.kind)
            return self.fk_transfer(graph, couplings.potts_q, couplings.potts_v,
                                    graph.marked_sites(model.boundary))
        if model.is_ising:
            return self.ising_transfer(graph, truncation)
        return self.fpl2_transfer(graph)

    def transfer_partition(self, lattice: LatticeSpec, model: ModelSpec,
                           order: Optional[int] = None, truncation: Optional[int] = None) -> NormalizedZ:
        """
        NormalizedZ by transfer matrix. ``truncation`` (in y) applies to Ising only;
        ``order`` is needed to recombine JS layers for r >= 2.
        """
        start = time.perf_counter()
        graph = self.lattice_service.build(lattice)
        raw = self.transfer_raw(lattice, model, truncation)
        logger.debug("transfer %s on %s: %d terms in %.3fs", model.id, lattice.id, len(raw),
                     time.perf_counter() - start)
        marked = len(graph.marked_sites(model.boundary))
        return self.parameterization_service.normalize(
            model, lattice, raw, marked, order, truncation if model.is_ising else None)

    def js_partition(self, lattice: LatticeSpec, sides: Iterable[Side], r: int,
                     order: Optional[int] = None) -> NormalizedZ:
        """Selfdual square Potts with loops touching the marked sides weighted n1(r)."""
        model = ModelSpec(ModelKind.SQ_SELFDUAL, BoundarySpec(r, frozenset(sides)))
        return self.transfer_partition(lattice, model, order)


def _subsets(n: int, k: int) -> List[FrozenSet[int]]:
    return [frozenset(c) for c in combinations(range(n), k)]


def _relabel_paths(state: Tuple[Tuple[bool, int], ...]) -> Tuple[Tuple[bool, int], ...]:
    mapping: Dict[int, int] = {}
    out = []
    for colour, lab in state:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append((colour, mapping[lab]))
    return tuple(out)


transfer_service = TransferService()
