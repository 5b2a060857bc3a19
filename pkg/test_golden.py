"""
Test script comparing full enumerations with the quoted products
"""

import pytest

from cornerflm.models import BoundarySpec, Geometry, ModelKind, ModelSpec, Side, Target
from cornerflm.services.conjecture_service import conjecture_service
from cornerflm.services.productize_service import ProductForm

FREE_TARGETS = (Target.BULK, Target.SURFACE, Target.CORNER)
JS_TARGETS = (Target.DELTA_SURFACE, Target.DELTA_CORNER, Target.DELTA_CORNER_JS)


def first_departure(model, geometry, target, k):
    series, order = conjecture_service.target_series(model, geometry, target, k)
    return conjecture_service.compare_with_catalog(model, geometry, target, series, order)


@pytest.mark.parametrize("target", FREE_TARGETS)
def test_small_cutoff_square(single_thread, target):
    model = ModelSpec(ModelKind.SQ_SELFDUAL)
    assert first_departure(model, Geometry.SQUARE_RECTANGLE, target, 6) is None


@pytest.mark.parametrize("target", JS_TARGETS)
def test_small_cutoff_js(single_thread, target):
    model = ModelSpec(ModelKind.SQ_SELFDUAL, BoundarySpec(2, frozenset({Side.LEFT})))
    assert first_departure(model, Geometry.SQUARE_RECTANGLE, target, 6) is None


GOLDEN_RUNS = [
    (ModelKind.SQ_SELFDUAL, Geometry.SQUARE_RECTANGLE, 13),
    (ModelKind.SQ_AF, Geometry.SQUARE_RECTANGLE, 11),
    (ModelKind.TRI_SELFDUAL, Geometry.TRIANGULAR_TRIANGLE, 9),
    (ModelKind.TRI_SELFDUAL, Geometry.TRIANGULAR_RECTANGLE, 9),
    (ModelKind.TRI_CHROMATIC, Geometry.TRIANGULAR_TRIANGLE, 9),
    (ModelKind.TRI_CHROMATIC, Geometry.TRIANGULAR_RECTANGLE, 11),
    (ModelKind.FPL2, Geometry.FPL2_RECTANGLE, 9),
    (ModelKind.ISING_SQ, Geometry.SQUARE_RECTANGLE, 17),
    (ModelKind.ISING_TRI, Geometry.TRIANGULAR_TRIANGLE, 9),
    (ModelKind.ISING_TRI, Geometry.TRIANGULAR_RECTANGLE, 9),
]


@pytest.mark.slow
@pytest.mark.parametrize("kind, geometry, k", GOLDEN_RUNS, ids=lambda v: getattr(v, "value", v))
def test_golden_free_energies(kind, geometry, k):
    model = ModelSpec(kind)
    for target in FREE_TARGETS:
        assert first_departure(model, geometry, target, k) is None, target.value


@pytest.mark.slow
@pytest.mark.parametrize("r", [0, 2, 3])
def test_golden_js_corrections(r):
    model = ModelSpec(ModelKind.SQ_SELFDUAL, BoundarySpec(r, frozenset({Side.LEFT})))
    for target in JS_TARGETS:
        if r == 0 and target != Target.DELTA_SURFACE:
            continue
        assert first_departure(model, Geometry.SQUARE_RECTANGLE, target, 10) is None, target.value


@pytest.mark.slow
def test_golden_corner_conjecture(cache_dir):
    model = ModelSpec(ModelKind.SQ_SELFDUAL)
    outcome = conjecture_service.conjecture(model, Geometry.SQUARE_RECTANGLE, Target.CORNER, 13)
    assert isinstance(outcome.result, ProductForm)
    assert outcome.result.period == 8
    assert outcome.catalog_agrees
