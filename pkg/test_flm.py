"""
Test script for the finite lattice method assemblies on synthetic tables
"""

from fractions import Fraction

import pytest

from cornerflm.errors import InvalidConfigError, MissingTableEntryError
from cornerflm.models import Geometry, ModelKind, Side
from cornerflm.services.flm_service import BoundaryCorrections, FreeEnergyTriple, flm_service
from cornerflm.services.series_service import FracSeries, LogConstant, LogPartition

TRUNC = 6

BULK = LogPartition(Fraction(-2), LogConstant.from_rational(3), FracSeries.polynomial([0, 1, 0, 2], trunc=TRUNC))
SURFACE = LogPartition(Fraction(1), LogConstant(), FracSeries.polynomial([0, 0, -1, 5], trunc=TRUNC))
CORNER = LogPartition(Fraction(0), LogConstant.from_rational(2), FracSeries.polynomial([0, 7, 1], trunc=TRUNC))


def rectangle_table(k):
    return {(m, n): BULK.scale(m * n) + SURFACE.scale(m + n) + CORNER
            for m in range(1, k) for n in range(1, k) if m + n <= k}


def triangle_table(k):
    return {m: BULK.scale(Fraction(m * (m + 1), 2)) + SURFACE.scale(m) + CORNER for m in range(1, k + 1)}


def test_rectangle_assembly_recovers_decomposition():
    triple = flm_service.flm_rectangle(rectangle_table(7), 7)
    assert triple.f_b == BULK
    assert triple.f_s == SURFACE
    assert triple.f_c == CORNER


def test_triangle_assembly_recovers_decomposition():
    triple = flm_service.flm_triangle(triangle_table(6), 6)
    assert triple.f_b == BULK
    assert triple.f_s == SURFACE
    assert triple.f_c == CORNER
    assert flm_service.reconstruct(triple, 4) == triangle_table(6)[4]


def test_missing_entry_is_reported():
    table = rectangle_table(7)
    del table[(2, 4)]
    with pytest.raises(MissingTableEntryError) as excinfo:
        flm_service.flm_rectangle(table, 7)
    assert excinfo.value.key == (2, 4)


def test_cutoff_too_small():
    with pytest.raises(InvalidConfigError):
        flm_service.flm_rectangle(rectangle_table(4), 1)


def test_sublattice_inversion_round_trip():
    table = {(m, n): LogPartition(Fraction(m), LogConstant(), FracSeries.polynomial([0, m * n, m - n], trunc=TRUNC))
             for m in range(1, 5) for n in range(1, 5)}
    ftilde = flm_service.ftilde_rectangle(table)
    for (m, n), f in table.items():
        assert flm_service.reconstruct_rectangle(ftilde, m, n) == f


def test_triangle_inversion_round_trip():
    table = {m: LogPartition(Fraction(0), LogConstant(), FracSeries.polynomial([0, m * m, 1], trunc=TRUNC))
             for m in range(1, 6)}
    ftilde = flm_service.ftilde_triangle(table)
    for m, f in table.items():
        assert flm_service.reconstruct_triangle(ftilde, m) == f


def test_eta_weights():
    assert [flm_service.eta_weight(m, 3) for m in (3, 2, 1)] == [1, 2, 1]
    assert flm_service.eta_weight(1, 2) == 2
    assert flm_service.eta_weight(0, 2) == 0
    assert flm_service.signed_eta(2, 3) == -2


def test_split_corner_angles():
    obtuse = LogPartition(Fraction(0), LogConstant(), FracSeries.polynomial([0, 1, 2], trunc=TRUNC))
    acute = LogPartition(Fraction(0), LogConstant(), FracSeries.polynomial([0, 0, 3, -1], trunc=TRUNC))
    rect = obtuse.scale(2) + acute.scale(2)
    tri = acute.scale(3)
    assert flm_service.split_corner_angles(rect, tri) == (obtuse, acute)


def _corrections():
    delta_fs = LogPartition(Fraction(0), LogConstant(), FracSeries.polynomial([0, 2], trunc=TRUNC))
    left = LogPartition(Fraction(0), LogConstant(), FracSeries.polynomial([0, 0, 4], trunc=TRUNC))
    leftlow = LogPartition(Fraction(0), LogConstant(), FracSeries.polynomial([0, 1, 0, 6], trunc=TRUNC))
    return BoundaryCorrections(2, delta_fs, left, leftlow, 6, Fraction(5))


def test_compose_one_marked_side():
    free = FreeEnergyTriple(BULK, SURFACE, CORNER, 6, Fraction(5))
    bc = _corrections()
    d = flm_service.compose_boundary_config(bc, [Side.LEFT], free)
    assert d.constant == CORNER + bc.delta_fc_left
    assert d.m_coeff == SURFACE
    assert d.n_coeff == SURFACE + bc.delta_fs


def test_compose_two_adjacent_sides():
    free = FreeEnergyTriple(BULK, SURFACE, CORNER, 6, Fraction(5))
    bc = _corrections()
    d = flm_service.compose_boundary_config(bc, [Side.LEFT, Side.BOTTOM], free)
    assert d.constant == CORNER + bc.delta_fc_leftlow
    expected = BULK.scale(12) + (SURFACE + bc.delta_fs).scale(7) + CORNER + bc.delta_fc_leftlow
    assert d.evaluate(3, 4) == expected


def test_compose_all_sides():
    free = FreeEnergyTriple(BULK, SURFACE, CORNER, 6, Fraction(5))
    bc = _corrections()
    d = flm_service.compose_boundary_config(bc, list(Side), free)
    assert d.constant == CORNER + bc.delta_fc_js.scale(4)


def test_guaranteed_orders():
    assert flm_service.guaranteed_order(ModelKind.SQ_SELFDUAL, 10) == 9
    assert flm_service.guaranteed_order(ModelKind.TRI_SELFDUAL, 9) == 6
    assert flm_service.guaranteed_order(ModelKind.ISING_SQ, 12) == 4
    assert flm_service.guaranteed_order(ModelKind.ISING_TRI, 8, Geometry.TRIANGULAR_TRIANGLE) == 4


@pytest.mark.parametrize("k, order", [(7, 6), (8, 8), (9, 8), (10, 10)])
def test_fpl2_guaranteed_order_tracks_half_the_cutoff(k, order):
    assert flm_service.guaranteed_order(ModelKind.FPL2, k, Geometry.FPL2_RECTANGLE) == order


def test_stabilized_order():
    a = FreeEnergyTriple(BULK, SURFACE, CORNER, 6, Fraction(5))
    shifted = CORNER + LogPartition(Fraction(0), LogConstant(), FracSeries.monomial(4, 1, TRUNC))
    b = FreeEnergyTriple(BULK, SURFACE, shifted, 7, Fraction(6))
    assert flm_service.stabilized_order(a, b) == 4
    assert flm_service.stabilized_order(a, a) is None


def test_check_decomposition():
    triple = flm_service.flm_rectangle(rectangle_table(7), 7)
    direct = BULK.scale(12) + SURFACE.scale(7) + CORNER
    predicted = flm_service.reconstruct(triple, 3, 4)
    assert flm_service.check_decomposition(direct, predicted) is None
    bumped = direct + LogPartition(Fraction(0), LogConstant(), FracSeries.monomial(5, 1, TRUNC))
    assert flm_service.check_decomposition(bumped, predicted) == 5
    assert flm_service.check_decomposition(bumped, predicted, order=5) is None
