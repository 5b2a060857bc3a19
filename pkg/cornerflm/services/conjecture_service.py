import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from ..cache import EnumerationCache
from ..errors import InvalidConfigError
from ..models import BoundarySpec, Geometry, ModelKind, ModelSpec, Target
from .catalog_service import catalog_service
from .enumeration_service import enumeration_service
from .flm_service import BoundaryCorrections, FreeEnergyTriple, flm_service
from .productize_service import FitResult, productize_service
from .series_service import LogPartition

logger = logging.getLogger(__name__)

DELTA_TARGETS = (Target.DELTA_SURFACE, Target.DELTA_CORNER, Target.DELTA_CORNER_JS)

GEOMETRY_ALIASES = {"triangle": Geometry.TRIANGULAR_TRIANGLE.value}


@dataclass(frozen=True)
class ConjectureOutcome:
    series: LogPartition
    guaranteed_order: Fraction
    result: FitResult
    hint_period: Optional[int] = None
    catalog_agrees: Optional[bool] = None
    catalog_first_discrepancy: Optional[Fraction] = None


class ConjectureService:
    """Enumerate, assemble and fit: the end-to-end path from a model id to a product form."""

    def __init__(self):
        self.enumeration_service = enumeration_service
        self.flm_service = flm_service

    def resolve_geometry(self, model: ModelSpec, text: Optional[str]) -> Geometry:
        if text is None or text == "rectangle":
            return model.default_geometry()
        try:
            geometry = Geometry(GEOMETRY_ALIASES.get(text, text))
        except ValueError as exc:
            raise InvalidConfigError(f"unknown geometry '{text}'") from exc
        if geometry not in model.geometries():
            raise InvalidConfigError(f"geometry {geometry.value} does not apply to {model.kind.value}")
        return geometry

    def free_energies(self, model: ModelSpec, geometry: Geometry, k: int,
                      cache: Optional[EnumerationCache] = None, threads: Optional[int] = None) -> FreeEnergyTriple:
        order = self.flm_service.guaranteed_order(model.kind, k, geometry)
        free = model.with_boundary(BoundarySpec())
        table = self.enumeration_service.enumerate_table(free, geometry, k, order, cache=cache, threads=threads)
        if geometry == Geometry.TRIANGULAR_TRIANGLE:
            return self.flm_service.flm_triangle(table, k, model.kind)
        return self.flm_service.flm_rectangle(table, k, model.kind, geometry)

    def boundary_corrections(self, r: int, k: int, cache: Optional[EnumerationCache] = None,
                             threads: Optional[int] = None) -> BoundaryCorrections:
        model = ModelSpec(ModelKind.SQ_SELFDUAL)
        geometry = Geometry.SQUARE_RECTANGLE
        order = self.flm_service.guaranteed_order(model.kind, k, geometry)
        tables = {name: self.enumeration_service.enumerate_table(model, geometry, k, order, table=name,
                                                                 r=None if name == "free" else r,
                                                                 cache=cache, threads=threads)
                  for name in ("free", "L", "LL")}
        return self.flm_service.flm_boundary(tables["free"], tables["L"], tables["LL"], k, r)

    def target_series(self, model: ModelSpec, geometry: Geometry, target: Target, k: int,
                      cache: Optional[EnumerationCache] = None,
                      threads: Optional[int] = None) -> Tuple[LogPartition, Fraction]:
        """The FLM free energy selected by ``target``, truncated to its guaranteed order."""
        target = Target(target)
        if target in DELTA_TARGETS:
            if model.boundary.is_free:
                raise InvalidConfigError(f"{target.value} needs a JS boundary (--js r=R)")
            bc = self.boundary_corrections(model.boundary.r, k, cache, threads)
            series = {Target.DELTA_SURFACE: bc.delta_fs,
                      Target.DELTA_CORNER: bc.delta_fc_left,
                      Target.DELTA_CORNER_JS: bc.delta_fc_leftlow}[target]
            order = bc.guaranteed_order
        else:
            triple = self.free_energies(model, geometry, k, cache, threads)
            series = triple.parts()[target.value]
            order = triple.guaranteed_order
        return series.truncate(order), order

    def compare_with_catalog(self, model: ModelSpec, geometry: Geometry, target: Target,
                             series: LogPartition, order: Fraction) -> Optional[Fraction]:
        """First exponent where the series departs from the quoted product; raises if none is quoted."""
        if Target(target) in DELTA_TARGETS:
            form = catalog_service.js_form(target, model.boundary.r)
            quoted = productize_service.product_log(form, order)
        else:
            entry = catalog_service.entry(model.kind, target, geometry)
            if entry.valid_order is not None:
                order = min(order, entry.valid_order)
            quoted = entry.log_partition(order)
        # AF bulk is quoted up to an overall sign
        ignore_sign = model.kind == ModelKind.SQ_AF and Target(target) == Target.BULK
        if ignore_sign:
            if series.q_power != quoted.q_power or series.constant.modulus() != quoted.constant.modulus():
                return Fraction(0)
            return series.series.first_difference(quoted.series, order)
        return series.first_difference(quoted, order)

    def conjecture(self, model: ModelSpec, geometry: Geometry, target: Target, k: int,
                   cache: Optional[EnumerationCache] = None, threads: Optional[int] = None,
                   min_repeats: Optional[int] = None) -> ConjectureOutcome:
        target = Target(target)
        series, order = self.target_series(model, geometry, target, k, cache, threads)
        hint = catalog_service.table_period(model.kind, target)
        grid = series.series.grid
        result = productize_service.conjecture(series, min_repeats=min_repeats,
                                               hint_period=hint * grid if hint else None)
        try:
            first = self.compare_with_catalog(model, geometry, target, series, order)
        except InvalidConfigError:
            logger.info("no quoted product to compare against for %s %s", model.id, target.value)
            return ConjectureOutcome(series, order, result, hint)
        if first is not None:
            logger.warning("%s %s departs from the quoted product at q^%s", model.id, target.value, first)
        return ConjectureOutcome(series, order, result, hint, first is None, first)


conjecture_service = ConjectureService()
