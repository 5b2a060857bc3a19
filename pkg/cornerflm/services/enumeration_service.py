import logging
import math
from dataclasses import replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from joblib import Parallel, delayed

from ..cache import EnumerationCache
from ..config import settings
from ..errors import InvalidConfigError
from ..models import BoundarySpec, Geometry, LatticeSpec, ModelSpec, Side
from .parameterization_service import NormalizedZ, parameterization_service
from .series_service import LogPartition
from .transfer_service import transfer_service

logger = logging.getLogger(__name__)

TableKey = Union[int, Tuple[int, int]]

# rectangle tables: which m+n values each FLM formula reads
TABLE_DEPTH = {"free": 4, "L": 3, "LL": 2}
TABLE_SIDES = {"free": frozenset(), "L": frozenset({Side.LEFT}), "LL": frozenset({Side.LEFT, Side.BOTTOM})}


def _compute_entry(model_id: str, lattice: LatticeSpec, y_order: Optional[int],
                   cache_dir: str, use_cache: bool) -> NormalizedZ:
    # module-level so joblib workers can pickle it
    cache = EnumerationCache(cache_dir, use_cache)
    try:
        return enumeration_service.partition(ModelSpec.parse(model_id), lattice, y_order, cache)
    finally:
        cache.close()


class EnumerationService:

    def __init__(self):
        self.transfer_service = transfer_service
        self.parameterization_service = parameterization_service

    def y_order(self, model: ModelSpec, order) -> int:
        """Exclusive order in the model's small variable y that covers q^order."""
        lam = self.parameterization_service.couplings(model.kind).y_valuation
        return math.ceil(Fraction(order) / lam)

    def _needs_y_order(self, model: ModelSpec) -> bool:
        return model.is_ising or (not model.boundary.is_free and model.boundary.r not in (0, 1))

    def partition(self, model: ModelSpec, lattice: LatticeSpec, y_order: Optional[int] = None,
                  cache: Optional[EnumerationCache] = None) -> NormalizedZ:
        """NormalizedZ via transfer matrix, through the cache; free lattices reuse their transpose."""
        if not self._needs_y_order(model):
            y_order = None
        elif y_order is None:
            raise InvalidConfigError(f"{model.id} needs an enumeration order")
        if model.boundary.is_free and lattice.m > lattice.n and not lattice.is_triangle:
            nz = self.partition(model, lattice.transposed(), y_order, cache)
            return replace(nz, lattice=lattice)
        parts = (model.id, lattice.id, y_order)
        if cache is not None:
            text = cache.get(parts)
            if text is not None:
                return NormalizedZ.from_text(text, model, lattice)
        truncation = y_order if model.is_ising else None
        nz = self.transfer_service.transfer_partition(lattice, model, y_order, truncation)
        if cache is not None:
            cache.put(parts, nz.to_text())
        return nz

    def lattices_for(self, model: ModelSpec, geometry: Geometry, k: int, table: str = "free") -> List[LatticeSpec]:
        """All lattices an FLM assembly at cutoff k reads from one table."""
        if geometry == Geometry.TRIANGULAR_TRIANGLE:
            return [LatticeSpec(geometry, m) for m in range(max(1, k - 2), k + 1)]
        depth = TABLE_DEPTH[table]
        out = []
        for total in range(max(2, k - depth + 1), k + 1):
            for m in range(1, total):
                out.append(LatticeSpec(geometry, m, total - m))
        return out

    def enumerate_table(self, model: ModelSpec, geometry: Geometry, k: int, order,
                        table: str = "free", r: Optional[int] = None,
                        cache: Optional[EnumerationCache] = None,
                        threads: Optional[int] = None) -> Dict[TableKey, LogPartition]:
        """
        Log partition functions of every lattice in the FLM window of cutoff k.

        ``table`` selects the free, left-marked ("L") or left+bottom-marked ("LL")
        boundary; marked tables need the JS parameter ``r``. Keys are (m, n), or M
        for the triangle geometry.
        """
        if table != "free":
            if r is None:
                raise InvalidConfigError("marked FLM tables need a JS parameter r")
            model = model.with_boundary(BoundarySpec(r, TABLE_SIDES[table]))
        lattices = self.lattices_for(model, geometry, k, table)
        y_order = self.y_order(model, order) if self._needs_y_order(model) else None
        threads = threads or settings.threads
        cache_dir = cache.directory if cache is not None else settings.cache_dir
        use_cache = cache.enabled if cache is not None else False
        logger.info("enumerating %d lattices for %s (%s, k=%d) on %d thread(s)",
                    len(lattices), model.id, table, k, threads)
        if threads == 1:
            entries = [self.partition(model, lat, y_order, cache) for lat in lattices]
        else:
            entries = Parallel(n_jobs=threads)(
                delayed(_compute_entry)(model.id, lat, y_order, str(cache_dir), use_cache)
                for lat in lattices)
        result: Dict[TableKey, LogPartition] = {}
        for lat, nz in zip(lattices, entries):
            key = lat.m if lat.is_triangle else (lat.m, lat.n)
            result[key] = self.parameterization_service.to_log_partition(nz, order)
        return result


enumeration_service = EnumerationService()
