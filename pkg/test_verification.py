"""
Test script for the analytic bulk identities and the closed-form limits
"""

from fractions import Fraction

import pytest

from cornerflm.errors import InvalidConfigError
from cornerflm.models import ModelKind, Target
from cornerflm.services.catalog_service import catalog_service
from cornerflm.services.productize_service import Prefactor, ProductForm, SimpleFactor
from cornerflm.services.verification_service import VERIFIABLE_MODELS, verification_service


@pytest.mark.parametrize("kind", VERIFIABLE_MODELS, ids=lambda k: k.value)
def test_bulk_identities_through_order_twenty(kind):
    report = verification_service.check_identity(kind, 20)
    assert report.agree, report.first_discrepancy
    assert report.first_discrepancy is None


def test_antiferromagnetic_identity_up_to_sign():
    report = verification_service.check_identity(ModelKind.SQ_AF, 4)
    assert report.agree


def test_corrupted_product_is_caught():
    quoted = catalog_service.entry(ModelKind.SQ_SELFDUAL, Target.BULK).form
    extra = ProductForm(Prefactor(factors=(SimpleFactor(-1, Fraction(3), Fraction(1)),)),
                        1, 1, (Fraction(0),), (Fraction(0),))
    report = verification_service.check_identity(ModelKind.SQ_SELFDUAL, 7, quoted + extra)
    assert not report.agree
    assert report.first_discrepancy == 3


def test_no_analytic_form_for_fpl():
    with pytest.raises(InvalidConfigError):
        verification_service.check_identity(ModelKind.FPL2, 4)


@pytest.mark.parametrize("family", [(4, 1, 1, 0), (4, -1, 0, 1), (8, 3, 2, -1)])
def test_log_product_identity(family):
    assert verification_service.check_log_product_identity(*family, 12)


def test_log_product_needs_positive_first_exponent():
    with pytest.raises(InvalidConfigError):
        verification_service.log_product_closed_form(4, 4, 0, 1, 8)


REPRODUCED = [
    "sq-selfdual:bulk",
    "sq-selfdual:surface",
    "sq-af:forests",
    "sq-af:surface-derived",
    "tri-selfdual:bulk-derived",
    "tri-selfdual:surface",
    "fpl2:bulk",
    "fpl2:surface",
    "js:surface:r=inf",
    "js:surface:r=0:derived",
    "js:surface:r=1:derived",
    "js:surface:r=2:derived",
    "js:surface:r=3:derived",
    "js:left:r=1:derived",
    "js:left:r=2:derived",
    "js:left:r=3:derived",
    "js:left:r=4:derived",
    "js:left:r=5:derived",
    "js:leftlow:r=1:derived",
    "js:leftlow:r=2:derived",
    "js:leftlow:r=3:derived",
    "js:mixed:r=2",
    "js:mixed:r=3",
    "js:corner:r=2",
    "js:corner:r=3",
]

PRINTED_MISMATCHES = ["sq-af:surface", "tri-selfdual:bulk", "js:surface:r=0", "js:left:r=2", "js:left:r=3",
                      "js:leftlow:r=1", "js:leftlow:r=2"]


@pytest.mark.parametrize("key", REPRODUCED)
def test_closed_form_limits(key):
    report = verification_service.check_limit(key)
    assert report.reproduced
    assert report.agree


@pytest.mark.parametrize("key", PRINTED_MISMATCHES)
def test_printed_limits_that_miss(key):
    report = verification_service.check_limit(key)
    assert not report.reproduced
    assert not report.agree


def test_unpaired_closed_form():
    with pytest.raises(InvalidConfigError):
        verification_service.check_limit("tri-chromatic:surface")
