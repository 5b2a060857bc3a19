"""
Test script for the q -> 1 asymptotics and the Cardy-Peschel extraction
"""

from fractions import Fraction

import mpmath
import pytest

from cornerflm.errors import ClassificationError, InvalidConfigError
from cornerflm.models import Classification, CornerAngle, Geometry, ModelKind, Target
from cornerflm.services.asymptotics_service import asymptotics_service, corner_weight, parse_corners
from cornerflm.services.catalog_service import catalog_service
from cornerflm.services.productize_service import productize_service

RIGHT, ACUTE, OBTUSE = CornerAngle.RIGHT, CornerAngle.ACUTE, CornerAngle.OBTUSE


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpmathify(x)


def close(a, b, rel=1e-12):
    return mpmath.almosteq(_mp(a), _mp(b), rel_eps=rel, abs_eps=rel)


def square_corner():
    return catalog_service.entry(ModelKind.SQ_SELFDUAL, Target.CORNER).form


def triangle_corner():
    return catalog_service.entry(ModelKind.TRI_SELFDUAL, Target.CORNER, Geometry.TRIANGULAR_TRIANGLE).form


def af_corner():
    return catalog_service.entry(ModelKind.SQ_AF, Target.CORNER).form


def test_divergence_coefficients():
    assert asymptotics_service.divergence_coefficient(square_corner()) == Fraction(1, 8)
    assert asymptotics_service.divergence_coefficient(triangle_corner()) == Fraction(1, 6)
    assert asymptotics_service.divergence_coefficient(af_corner()) == Fraction(-1, 16)
    assert asymptotics_service.divergence_coefficient(catalog_service.js_delta_corner_left(None)) == Fraction(-1, 24)
    assert asymptotics_service.divergence_coefficient(
        catalog_service.js_delta_corner_leftlow(None)) == Fraction(-1, 24)


def test_classification():
    assert asymptotics_service.classify_q1_limit(square_corner()) == Classification.DIVERGENT
    assert asymptotics_service.classify_q1_limit(af_corner()) == Classification.ZERO
    bulk = catalog_service.entry(ModelKind.SQ_SELFDUAL, Target.BULK).form
    assert asymptotics_service.classify_q1_limit(bulk) == Classification.FINITE
    with pytest.raises(ClassificationError):
        asymptotics_service.finite_limit_value(square_corner())


def test_square_corner_prefactor():
    pi2 = mpmath.pi ** 2
    expansion = asymptotics_service.asymptotic_expansion(square_corner())
    assert expansion.a_log == 0
    assert close(expansion.a0, mpmath.log(mpmath.mpf(2) ** -2.5))
    assert close(asymptotics_service.prefactor(square_corner()), mpmath.mpf(2) ** -2.5 * mpmath.exp(-pi2 / 16))


def test_other_corner_prefactors():
    pi2 = mpmath.pi ** 2
    sqrt2 = mpmath.sqrt(2)
    assert close(asymptotics_service.prefactor(af_corner()), mpmath.exp(pi2 / 32))
    assert close(asymptotics_service.prefactor(triangle_corner()),
                 (3 * mpmath.sqrt(3) - 5) / 2 * mpmath.exp(-pi2 / 12))
    assert close(asymptotics_service.prefactor(catalog_service.js_delta_corner_left(None)),
                 mpmath.sqrt(2 + sqrt2) * mpmath.exp(pi2 / 48))
    assert close(asymptotics_service.prefactor(catalog_service.js_delta_corner_leftlow(None)),
                 (1 + sqrt2) / 2 * mpmath.exp(pi2 / 48))


def test_lattice_ratio_of_prefactors():
    a_tri = asymptotics_service.prefactor(triangle_corner())
    a_sq = asymptotics_service.prefactor(square_corner())
    assert close(a_tri ** 3 / a_sq ** 4, 128 * (3 * mpmath.sqrt(3) - 5) ** 3)
    assert close(a_tri ** 3 / a_sq ** 4, 0.966031, rel=1e-6)


def test_finite_js_limits():
    left, leftlow = catalog_service.js_delta_corner_left, catalog_service.js_delta_corner_leftlow
    limit = asymptotics_service.finite_limit_value
    assert close(limit(catalog_service.js_delta_surface(1)), 1)
    assert close(limit(catalog_service.js_delta_surface(3)), Fraction(5, 4))
    assert close(limit(left(2)), (1 + mpmath.sqrt(2)) / 5)
    assert close(limit(left(3)), Fraction(5, 21))
    assert close(limit(leftlow(3)), Fraction(250, 1323))
    assert close(limit(leftlow(2)), 9 * mpmath.pi / 400 * (3 + 2 * mpmath.sqrt(2)))


def test_single_corner_js_limits():
    limit = asymptotics_service.finite_limit_value
    assert close(limit(catalog_service.js_mixed_corner(3)), mpmath.sqrt(mpmath.mpf(5) / 21))
    assert close(limit(catalog_service.js_corner(3)), Fraction(50, 63))
    assert close(limit(catalog_service.js_mixed_corner(2)) ** 2, (1 + mpmath.sqrt(2)) / 5)


def test_numeric_ladder_matches_closed_prefactor():
    numeric = asymptotics_service.numeric_prefactor(square_corner())
    exact = asymptotics_service.prefactor(square_corner())
    assert abs(numeric.value - exact) < 1e-3 * abs(exact)


def test_trend_follows_classification():
    assert asymptotics_service.trend_consistent(square_corner())
    assert asymptotics_service.trend_consistent(af_corner())


def test_ladder_point_range():
    with pytest.raises(InvalidConfigError):
        asymptotics_service.ladder_evaluate(square_corner(), 1.0)
    with pytest.raises(InvalidConfigError):
        asymptotics_service.ladder_evaluate(square_corner(), 0.0)


def test_corner_weights():
    assert corner_weight(RIGHT) == Fraction(1, 16)
    assert corner_weight(ACUTE) == Fraction(1, 9)
    assert corner_weight(OBTUSE) == Fraction(5, 144)


def test_cardy_peschel_extraction():
    assert asymptotics_service.cardy_peschel_extract([RIGHT] * 4, Fraction(1, 8), 1) == Fraction(1, 2)
    assert asymptotics_service.cardy_peschel_extract([ACUTE] * 3, Fraction(1, 6), 1) == Fraction(1, 2)
    assert asymptotics_service.c_eff_from(Fraction(1, 8), [RIGHT] * 4, Fraction(1, 2)) == 1
    assert asymptotics_service.h_from(1, 1) == 0
    with pytest.raises(InvalidConfigError):
        asymptotics_service.cardy_peschel_extract([RIGHT], Fraction(1, 8), 0)
    with pytest.raises(InvalidConfigError):
        asymptotics_service.cardy_peschel_extract([], Fraction(1, 8), 1)


def test_profile_with_corners():
    profile = asymptotics_service.profile(square_corner(), 1, [RIGHT] * 4, numeric=False)
    assert profile.classification == Classification.DIVERGENT
    assert profile.xi_coefficient == Fraction(1, 2)
    assert profile.numeric_A is None


def test_chromatic_correlation_length_by_angle():
    forms = {}
    for angle in (ACUTE, OBTUSE):
        entry = catalog_service.entry(ModelKind.TRI_CHROMATIC, Target.CORNER, angle=angle)
        forms[angle] = productize_service.x_to_q_form(entry.form)
    values = asymptotics_service.xi_by_angle(forms, 2)
    assert values == {ACUTE: Fraction(7, 96), OBTUSE: Fraction(7, 60)}


def test_universality_map():
    assert asymptotics_service.universality_map(ModelKind.SQ_AF, Fraction(1, 4)) == (Fraction(1, 2), 0)
    assert asymptotics_service.universality_map(ModelKind.TRI_SELFDUAL, Fraction(1, 6)) == (Fraction(1, 2), 0)
    with pytest.raises(InvalidConfigError):
        asymptotics_service.universality_map(ModelKind.FPL2, 1)


def test_parse_corners():
    assert parse_corners("4xpi/2") == [RIGHT] * 4
    assert parse_corners("2xpi/3, 2pi/3") == [ACUTE, ACUTE, OBTUSE]
    with pytest.raises(InvalidConfigError):
        parse_corners("3xpi/5")
