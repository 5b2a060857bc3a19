"""
Test script checking the transfer-matrix enumeration against exhaustive enumeration
"""

from fractions import Fraction

import pytest

from cornerflm.errors import LatticeSizeError
from cornerflm.models import BoundarySpec, Geometry, LatticeSpec, ModelKind, ModelSpec, Side
from cornerflm.services.brute_force_service import brute_force_service
from cornerflm.services.lattice_service import lattice_service
from cornerflm.services.series_service import FracSeries
from cornerflm.services.transfer_service import transfer_service

SQ = Geometry.SQUARE_RECTANGLE
TRI_R = Geometry.TRIANGULAR_RECTANGLE
TRI_T = Geometry.TRIANGULAR_TRIANGLE
FPL = Geometry.FPL2_RECTANGLE

SQUARE_SHAPES = [(1, 3), (1, 5), (2, 2), (2, 3), (2, 4), (3, 3), (3, 4)]
TRIANGULAR_SHAPES = [(1, 4), (2, 2), (2, 3), (3, 2), (2, 4), (3, 3)]
TRIANGLE_SIDES = [2, 3, 4]

FREE_CASES = (
    [(kind, LatticeSpec(SQ, m, n)) for kind in (ModelKind.SQ_SELFDUAL, ModelKind.SQ_AF, ModelKind.ISING_SQ)
     for m, n in SQUARE_SHAPES]
    + [(kind, LatticeSpec(TRI_R, m, n))
       for kind in (ModelKind.TRI_SELFDUAL, ModelKind.TRI_CHROMATIC, ModelKind.ISING_TRI)
       for m, n in TRIANGULAR_SHAPES]
    + [(kind, LatticeSpec(TRI_T, m))
       for kind in (ModelKind.TRI_SELFDUAL, ModelKind.TRI_CHROMATIC, ModelKind.ISING_TRI)
       for m in TRIANGLE_SIDES]
    + [(ModelKind.FPL2, LatticeSpec(FPL, m, n)) for m, n in ((1, 1), (1, 2), (2, 1))]
)


@pytest.mark.parametrize("kind, lattice", FREE_CASES, ids=lambda v: getattr(v, "id", getattr(v, "value", v)))
def test_transfer_matches_brute_force(kind, lattice):
    model = ModelSpec(kind)
    assert transfer_service.transfer_partition(lattice, model) == brute_force_service.brute_force_partition(
        lattice, model)


@pytest.mark.parametrize("r", [0, 1])
@pytest.mark.parametrize("sides", [(Side.LEFT,), (Side.LEFT, Side.BOTTOM)])
def test_js_polynomial_boundaries(r, sides):
    lattice = LatticeSpec(SQ, 3, 2)
    model = ModelSpec(ModelKind.SQ_SELFDUAL, BoundarySpec(r, frozenset(sides)))
    assert transfer_service.js_partition(lattice, sides, r) == brute_force_service.brute_force_partition(
        lattice, model)


@pytest.mark.parametrize("r", [2, 3])
def test_js_series_boundaries(r):
    lattice = LatticeSpec(SQ, 2, 3)
    sides = (Side.LEFT, Side.BOTTOM)
    model = ModelSpec(ModelKind.SQ_SELFDUAL, BoundarySpec(r, frozenset(sides)))
    assert transfer_service.js_partition(lattice, sides, r, order=10) == brute_force_service.brute_force_partition(
        lattice, model, order=10)


def test_js_r1_is_free():
    lattice = LatticeSpec(SQ, 3, 2)
    free = transfer_service.transfer_partition(lattice, ModelSpec(ModelKind.SQ_SELFDUAL))
    marked = transfer_service.js_partition(lattice, (Side.LEFT,), 1)
    assert marked.poly == free.poly
    assert marked.lead_exponent == free.lead_exponent


def test_selfdual_square_two_sites():
    # Z = Q^2 + Q v = n^4 + n^3 in s = 1/n
    nz = brute_force_service.brute_force_partition(LatticeSpec(SQ, 1, 2), ModelSpec(ModelKind.SQ_SELFDUAL))
    assert nz.lead_exponent == -4
    assert nz.poly == FracSeries.polynomial([1, 1])
    assert nz.constant.to_rational() == 1


def test_ising_two_sites():
    nz = brute_force_service.brute_force_partition(LatticeSpec(SQ, 1, 2), ModelSpec(ModelKind.ISING_SQ))
    assert nz.lead_exponent == -1
    assert nz.poly == FracSeries.polynomial([1, 1])
    assert nz.constant.to_rational() == 2


def test_antiferromagnetic_ground_state_keeps_sign():
    # Q = -(1 - s^2)^2 / s^2 leads with -1 per site
    nz = brute_force_service.brute_force_partition(LatticeSpec(SQ, 1, 3), ModelSpec(ModelKind.SQ_AF))
    assert nz.constant.phase == 3
    assert nz.constant.to_rational() == -1


def test_transposed_lattice_gives_same_polynomial():
    model = ModelSpec(ModelKind.TRI_CHROMATIC)
    a = transfer_service.transfer_partition(LatticeSpec(TRI_R, 2, 3), model)
    b = transfer_service.transfer_partition(LatticeSpec(TRI_R, 3, 2), model)
    assert a.poly == b.poly


def test_lattice_graph_counts():
    graph = lattice_service.build(LatticeSpec(TRI_T, 3))
    assert graph.num_vertices == 6
    assert graph.num_edges == 9
    fpl = lattice_service.build(LatticeSpec(FPL, 1, 2))
    # the boundary closures make every FPL2 site four-valent
    degrees = dict(fpl.to_networkx().degree())
    assert set(degrees.values()) == {4}


def test_brute_force_budget():
    with pytest.raises(LatticeSizeError):
        brute_force_service.brute_force_partition(LatticeSpec(SQ, 4, 5), ModelSpec(ModelKind.SQ_AF))


def test_ising_truncation_keeps_low_orders():
    lattice = LatticeSpec(SQ, 3, 3)
    model = ModelSpec(ModelKind.ISING_SQ)
    exact = transfer_service.transfer_partition(lattice, model)
    cut = transfer_service.transfer_partition(lattice, model, truncation=4)
    assert cut.poly.trunc == Fraction(4)
    assert cut.poly.agrees_with(exact.poly)


def test_oracle_grid_covers_every_model():
    assert len(FREE_CASES) >= 40
    assert {kind for kind, _ in FREE_CASES} == set(ModelKind)
    for _, lattice in FREE_CASES:
        assert lattice_service.build(lattice).num_edges <= 20
