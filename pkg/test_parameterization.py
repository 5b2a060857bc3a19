"""
Test script for the model parameterisations and the normalised partition polynomials
"""

from fractions import Fraction

import pytest

from cornerflm.errors import InvalidConfigError, SeriesError, UnsupportedBoundaryError
from cornerflm.models import BoundarySpec, Geometry, LatticeSpec, ModelKind, ModelSpec, Side
from cornerflm.services.parameterization_service import (
    NormalizedZ,
    ising_square_alpha,
    parameterization_service,
)
from cornerflm.services.series_service import FracSeries, LogConstant


def test_selfdual_square_variable():
    pm = parameterization_service.build_parameterization(ModelKind.SQ_SELFDUAL, 8)
    # x = q / (1 + q^2)
    for e, c in ((1, 1), (2, 0), (3, -1), (5, 1), (7, -1)):
        assert pm.x_of_q.coefficient(e) == c
    assert pm.n.coefficient(-1) == 1 and pm.n.coefficient(1) == 1


def test_triangular_variable_lives_on_thirds():
    pm = parameterization_service.build_parameterization(ModelKind.TRI_SELFDUAL, 4)
    assert pm.y_of_q.coefficient(Fraction(2, 3)) == 1
    assert pm.grid == 3


def test_ising_square_variable():
    pm = parameterization_service.build_parameterization(ModelKind.ISING_SQ, 6)
    # x^2 = q^{1/2} prod (1-q^j)^{alpha_j}, alpha periodic mod 8
    assert pm.y_of_q.coefficient(Fraction(1, 2)) == 1
    assert pm.y_of_q.coefficient(Fraction(3, 2)) == -1
    assert [ising_square_alpha(j) for j in range(1, 9)] == [1, 0, -1, 0, -1, 0, 1, 0]


def test_parameterisation_order_must_be_positive():
    with pytest.raises(InvalidConfigError):
        parameterization_service.build_parameterization(ModelKind.SQ_AF, 0)


def test_boundary_loop_weight():
    # r = 1 is the free boundary: n1 = n
    n1 = parameterization_service.n1(1, 6)
    assert n1.coefficient(-1) == 1 and n1.coefficient(1) == 1 and n1.coefficient(3) == 0
    n1 = parameterization_service.n1(2, 8)
    assert n1.coefficient(-1) == 1
    assert n1.coefficient(1) == 0
    assert n1.coefficient(3) == 1
    assert n1.coefficient(5) == -1
    with pytest.raises(InvalidConfigError):
        parameterization_service.n1(0, 4)


def test_js_polynomials():
    assert parameterization_service.js_polynomial(0) == FracSeries.polynomial([1])
    assert parameterization_service.js_polynomial(2) == FracSeries.polynomial([1, 0, -1])
    assert parameterization_service.js_polynomial(4) == FracSeries.polynomial([1, 0, -3, 0, 1])
    ratio = parameterization_service.js_ratio(2, 6)
    assert ratio == FracSeries.polynomial([1, 0, -1], trunc=6)


def test_q_order_uses_leading_exponent():
    assert parameterization_service.q_order(ModelKind.ISING_SQ, 4) == 2
    assert parameterization_service.q_order(ModelKind.TRI_SELFDUAL, 3) == 2
    assert parameterization_service.q_order(ModelKind.FPL2, 3) == 6


def test_to_log_partition():
    model = ModelSpec(ModelKind.SQ_AF)
    lattice = LatticeSpec(Geometry.SQUARE_RECTANGLE, 1, 2)
    nz = NormalizedZ(model, lattice, FracSeries.polynomial([1, 1]), 0, LogConstant())
    log = parameterization_service.to_log_partition(nz, 4)
    assert log.q_power == 0
    assert log.series == FracSeries.from_terms({1: 1, 2: Fraction(-1, 2), 3: Fraction(1, 3)}, 4)


def test_normalized_polynomial_starts_at_one():
    model = ModelSpec(ModelKind.SQ_AF)
    lattice = LatticeSpec(Geometry.SQUARE_RECTANGLE, 1, 1)
    with pytest.raises(SeriesError):
        NormalizedZ(model, lattice, FracSeries.polynomial([2, 1]), 0, LogConstant())


def test_model_and_boundary_ids():
    spec = ModelSpec.parse("sq-selfdual+js:r=2:left,bottom")
    assert spec.boundary == BoundarySpec(2, frozenset({Side.LEFT, Side.BOTTOM}))
    assert spec.id == "sq-selfdual+js:r=2:left,bottom"
    assert ModelSpec.parse("ising-tri").boundary.is_free
    with pytest.raises(InvalidConfigError):
        ModelSpec.parse("potts")
    with pytest.raises(UnsupportedBoundaryError):
        ModelSpec.parse("sq-af+js:r=1:left")
    with pytest.raises(InvalidConfigError):
        LatticeSpec(Geometry.SQUARE_RECTANGLE, 0, 3)
    assert LatticeSpec(Geometry.TRIANGULAR_TRIANGLE, 4).n == 4
