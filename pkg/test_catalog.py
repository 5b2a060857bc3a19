"""
Test script for the catalogue of quoted products and closed forms
"""

from fractions import Fraction

import pytest

from cornerflm.errors import InvalidConfigError
from cornerflm.models import CornerAngle, Geometry, ModelKind, Target
from cornerflm.services.catalog_service import catalog_service
from cornerflm.services.productize_service import ProductForm, productize_service
from cornerflm.services.series_service import FracSeries


def test_every_model_has_three_quantities():
    for kind in ModelKind:
        for target in (Target.BULK, Target.SURFACE, Target.CORNER):
            assert catalog_service.entry(kind, target).model == kind


def test_per_angle_corner_entries():
    acute = catalog_service.entry(ModelKind.TRI_SELFDUAL, Target.CORNER, Geometry.TRIANGULAR_TRIANGLE,
                                  CornerAngle.ACUTE)
    assert acute.angle == CornerAngle.ACUTE
    obtuse = catalog_service.entry(ModelKind.TRI_CHROMATIC, Target.CORNER, Geometry.TRIANGULAR_RECTANGLE,
                                   CornerAngle.OBTUSE)
    assert obtuse.variable == "x"


def test_raw_expansion_is_bounded():
    entry = catalog_service.entry(ModelKind.TRI_SELFDUAL, Target.CORNER, Geometry.TRIANGULAR_RECTANGLE)
    assert entry.valid_order == Fraction(46, 3)
    entry.log_partition(15)
    with pytest.raises(InvalidConfigError):
        entry.log_partition(20)


def test_unknown_entries():
    with pytest.raises(InvalidConfigError):
        catalog_service.entry(ModelKind.SQ_SELFDUAL, Target.DELTA_SURFACE)
    with pytest.raises(InvalidConfigError):
        catalog_service.closed_form("sq-selfdual:nothing")
    with pytest.raises(InvalidConfigError):
        catalog_service.conjecture(ModelKind.SQ_SELFDUAL, Geometry.SQUARE_RECTANGLE)
    with pytest.raises(InvalidConfigError):
        catalog_service.x2_form(ModelKind.SQ_AF)


def test_conjectured_triangle_corner():
    entry = catalog_service.conjecture(ModelKind.ISING_TRI, Geometry.TRIANGULAR_TRIANGLE)
    assert entry.target == Target.CORNER


def test_free_boundary_corrections_are_trivial():
    assert catalog_service.js_delta_surface(1).is_unit()
    assert catalog_service.js_delta_corner_left(1).is_unit()
    assert catalog_service.js_delta_corner_leftlow(1).is_unit()
    assert catalog_service.js_corner(1).is_unit()


def test_odd_r_corner_is_finite():
    # r = 3 leaves (1-q^3)(1-q^5) / ((1-q^7)(1-q^9))
    form = catalog_service.js_delta_corner_left(3)
    expected = FracSeries.polynomial([1, 0, 0, -1, 0, -1, 0, 1, 1, 1, -1], trunc=11)
    assert productize_service.expand_product_form(form, 11) == expected


def test_no_corner_product_at_r_zero():
    with pytest.raises(InvalidConfigError):
        catalog_service.js_mixed_corner(0)
    with pytest.raises(InvalidConfigError):
        catalog_service.js_corner(0)
    assert not catalog_service.js_delta_surface(0).is_unit()


def test_mixed_corner_is_half_the_one_side_correction():
    left = productize_service.product_log(catalog_service.js_delta_corner_left(2), 16)
    mixed = productize_service.product_log(catalog_service.js_mixed_corner(2), 16)
    assert mixed.scale(2) == left


def test_js_form_targets():
    assert catalog_service.js_form(Target.DELTA_SURFACE, None) == catalog_service.js_delta_surface(None)
    with pytest.raises(InvalidConfigError):
        catalog_service.js_form(Target.BULK, 2)


def test_table_period_only_for_free_targets():
    assert catalog_service.table_period(ModelKind.SQ_SELFDUAL, Target.DELTA_SURFACE) is None


CORNER_PERIOD_CASES = [
    (ModelKind.SQ_SELFDUAL, Geometry.SQUARE_RECTANGLE),
    (ModelKind.SQ_AF, Geometry.SQUARE_RECTANGLE),
    (ModelKind.TRI_SELFDUAL, Geometry.TRIANGULAR_TRIANGLE),
    (ModelKind.TRI_CHROMATIC, Geometry.TRIANGULAR_RECTANGLE),
    (ModelKind.FPL2, Geometry.FPL2_RECTANGLE),
    (ModelKind.ISING_SQ, Geometry.SQUARE_RECTANGLE),
]


@pytest.mark.parametrize("kind, geometry", CORNER_PERIOD_CASES, ids=lambda v: v.value)
def test_fit_recovers_quoted_corner_period(kind, geometry):
    period = catalog_service.table_period(kind, Target.CORNER)
    entry = catalog_service.entry(kind, Target.CORNER, geometry)
    log = productize_service.product_log(entry.form, 3 * period + 1)
    grid = log.series.grid
    result = productize_service.conjecture(log, hint_period=period * grid)
    assert isinstance(result, ProductForm)
    assert result.period == period * grid
