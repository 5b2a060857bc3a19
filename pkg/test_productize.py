"""
Test script for Euler exponent extraction and periodic product fitting
"""

from fractions import Fraction

import pytest

from cornerflm.errors import InvalidConfigError, SeriesError
from cornerflm.models import ModelKind, Target
from cornerflm.services.catalog_service import catalog_service
from cornerflm.services.productize_service import (
    FitFailure,
    Prefactor,
    ProductForm,
    SimpleFactor,
    productize_service,
)
from cornerflm.services.series_service import FracSeries, LogConstant, LogPartition, euler_log, euler_product


def test_alphas_round_trip():
    alpha = lambda j: j % 3 - 1  # noqa: E731
    alphas = productize_service.alphas_from_log(euler_log(alpha, 1, 20))
    assert alphas == {j: alpha(j) for j in range(1, 20)}


def test_alphas_from_expanded_product():
    alpha = lambda j: Fraction(j, 2) if j % 2 else -1  # noqa: E731
    alphas = productize_service.log_to_alphas(euler_product(alpha, 1, 12))
    assert [alphas[j] for j in range(1, 12)] == [alpha(j) for j in range(1, 12)]


def test_alphas_need_truncated_series():
    with pytest.raises(SeriesError):
        productize_service.alphas_from_log(FracSeries.polynomial([0, 1]))
    with pytest.raises(SeriesError):
        productize_service.alphas_from_log(FracSeries.polynomial([0, 1], trunc=4), max_index=6)


def test_fit_period_two():
    alphas = {j: Fraction(j) if j % 2 else Fraction(2) for j in range(1, 19)}
    form = productize_service.fit_product_form(alphas)
    assert isinstance(form, ProductForm)
    assert form.period == 2
    assert form.betas == (1, 0)
    assert form.gammas == (0, 2)
    assert form.repeats == 9


def test_fit_turns_first_exception_into_a_simple_factor():
    alphas = {j: Fraction(-1) for j in range(1, 13)}
    alphas[1] = Fraction(1)
    form = productize_service.fit_product_form(alphas)
    assert form.period == 1
    assert form.gammas == (-1,)
    assert form.prefactor.factors == (SimpleFactor(-1, Fraction(1), Fraction(2)),)


def test_exception_outside_prefactor_powers_fails():
    alphas = {j: Fraction(-1) for j in range(1, 13)}
    alphas[1] = Fraction(2)
    assert isinstance(productize_service.fit_product_form(alphas), FitFailure)
    form = productize_service.fit_product_form(alphas, powers=[Fraction(3)])
    assert form.prefactor.factors == (SimpleFactor(-1, Fraction(1), Fraction(3)),)


def test_short_series_fits_every_residue_twice():
    gammas = (1, 0, -1, 0, 2)
    alphas = {j: Fraction(gammas[(j - 1) % 5]) for j in range(1, 13)}
    form = productize_service.fit_product_form(alphas)
    assert form.period == 5
    assert form.gammas == gammas
    assert form.repeats == 2


def test_hinted_period_on_a_short_series():
    # twelve exponents of the square corner product leave residues 5..8 seen once
    gammas = (0, -1, 0, -4, 0, -1, 0, 0)
    alphas = {j: Fraction(gammas[(j - 1) % 8]) for j in range(1, 13)}
    assert isinstance(productize_service.fit_product_form(alphas), FitFailure)
    form = productize_service.fit_product_form(alphas, hint_period=8)
    assert form.period == 8
    assert form.gammas == gammas
    assert form.repeats == 1
    alphas[12] = Fraction(0)
    assert isinstance(productize_service.fit_product_form(alphas, hint_period=8), FitFailure)


def test_fit_failure_reports_missing_exponents():
    alphas = {j: Fraction(j * j) for j in range(1, 13)}
    result = productize_service.fit_product_form(alphas, min_repeats=3)
    assert isinstance(result, FitFailure)
    assert result.indices_available == 12
    assert result.indices_needed == 3
    assert result.residues_fitted == 0
    assert len(result.alphas) == 12


def test_fit_failure_uses_period_hint():
    alphas = {j: Fraction(j * j) for j in range(1, 13)}
    result = productize_service.fit_product_form(alphas, min_repeats=3, hint_period=8)
    assert result.indices_needed == 12


def test_min_repeats_below_three():
    with pytest.raises(InvalidConfigError):
        productize_service.fit_product_form({1: Fraction(1)}, min_repeats=2)


def test_conjecture_recovers_square_corner():
    quoted = catalog_service.entry(ModelKind.SQ_SELFDUAL, Target.CORNER).form
    log = productize_service.product_log(quoted, 40)
    fitted = productize_service.conjecture(log)
    assert isinstance(fitted, ProductForm)
    assert fitted.period == 8
    assert fitted.to_dict() == quoted.to_dict()


def test_conjecture_keeps_constant_and_power():
    quoted = catalog_service.entry(ModelKind.SQ_SELFDUAL, Target.BULK).form
    log = productize_service.product_log(quoted, 30)
    fitted = productize_service.conjecture(log)
    assert isinstance(fitted, ProductForm)
    assert fitted.prefactor.q_power == -2
    assert productize_service.product_log(fitted, 30).agrees_with(log)


def test_whitelisted_prefactor():
    factor = SimpleFactor(1, Fraction(2), Fraction(1))
    body = ProductForm.from_families([(2, 1, 0, 1, 1, None)])
    log = productize_service.product_log(body, 20)
    log = LogPartition(log.q_power, log.constant, log.series + factor.log_series(20))
    fitted = productize_service.conjecture(log, whitelist=[(1, Fraction(2), Fraction(1))])
    assert fitted.prefactor.factors == (factor,)
    assert fitted.betas == body.betas and fitted.gammas == body.gammas


def test_expand_product_form():
    pentagonal = ProductForm.from_families([(1, 0, 0, 1, 1, None)])
    assert productize_service.expand_product_form(pentagonal, 16) == euler_product(lambda j: 1, 1, 16)


def test_finite_family_range():
    form = ProductForm.from_families([(2, 1, 0, 1, 1, 3)])
    # (1-q)(1-q^3)(1-q^5)
    expected = FracSeries.polynomial([1, -1, 0, -1, 1, -1, 1, 0, 1, -1], trunc=10)
    assert productize_service.expand_product_form(form, 10) == expected


def test_lower_start_is_cancelled():
    form = ProductForm.from_families([(4, -1, 0, -4, 1, None)])
    direct = euler_log(lambda j: -4 if j % 4 == 1 and j > 1 else 0, 1, 20)
    assert productize_service.product_log(form, 20).series == direct


def test_product_arithmetic():
    a = ProductForm.from_families([(2, 1, 0, 1, 1, None)])
    b = ProductForm.from_families([(3, 0, 0, 1, 1, None)])
    both = a + b
    assert both.period == 6
    assert productize_service.product_log(both - b, 24).series == productize_service.product_log(a, 24).series
    assert (a - a).is_unit()


def _coefficients(form, order):
    s = productize_service.expand_product_form(form, order)
    return [s.coefficient(e) for e in range(order)]


def test_variable_negation():
    form = ProductForm.from_families([(1, 0, 0, 1, 1, None), (2, 1, 1, 0, 1, None)])
    original = _coefficients(form, 12)
    negated = _coefficients(productize_service.negate_variable(form), 12)
    assert negated == [c * (-1) ** n for n, c in enumerate(original)]


def test_variable_rescaling():
    form = ProductForm.from_families([(1, 0, 0, 1, 1, None)])
    original = _coefficients(form, 8)
    rescaled = _coefficients(productize_service.rescale_variable(form, 2), 16)
    assert rescaled[::2] == original
    assert not any(rescaled[1::2])


def test_x_to_q():
    form = ProductForm.from_families([(1, 0, 0, 1, 1, None), (2, 1, 1, 0, 1, None)])
    original = _coefficients(form, 8)
    mapped = _coefficients(productize_service.x_to_q_form(form), 16)
    assert mapped[::2] == [c * (-1) ** n for n, c in enumerate(original)]
    assert not any(mapped[1::2])


def test_negation_of_prefactor_power():
    form = ProductForm(Prefactor(LogConstant(), Fraction(1), ()), 1, 1, (Fraction(0),), (Fraction(0),))
    negated = productize_service.negate_variable(form)
    assert negated.prefactor.constant.phase == 1


def test_dict_round_trip():
    quoted = catalog_service.entry(ModelKind.SQ_AF, Target.SURFACE).form
    assert ProductForm.from_dict(quoted.to_dict()) == quoted
