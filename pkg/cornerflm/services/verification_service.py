import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional

import mpmath
from joblib import Parallel, delayed

from ..config import settings
from ..errors import InvalidConfigError
from ..models import Geometry, ModelKind, Target
from .asymptotics_service import asymptotics_service
from .catalog_service import catalog_service
from .productize_service import Prefactor, ProductForm, SimpleFactor, productize_service
from .series_service import FracSeries, LogConstant, LogPartition, series_inverse, series_mul

logger = logging.getLogger(__name__)

VERIFIABLE_MODELS = (ModelKind.SQ_SELFDUAL, ModelKind.SQ_AF, ModelKind.TRI_SELFDUAL,
                     ModelKind.ISING_SQ, ModelKind.ISING_TRI)


@dataclass(frozen=True)
class IdentityReport:
    model: ModelKind
    max_order_checked: Fraction
    agree: bool
    first_discrepancy: Optional[Fraction] = None
    phase_note: str = ""


@dataclass(frozen=True)
class LimitReport:
    key: str
    expression: str
    closed_value: object
    product_value: object
    agree: bool
    reproduced: bool
    note: str = ""


def _inverse_q_af() -> ProductForm:
    """1/Q = -q^2 (1-q^2)^{-2} for the antiferromagnetic square model."""
    return ProductForm(Prefactor(LogConstant.from_rational(-1), Fraction(2),
                                 (SimpleFactor(-1, Fraction(2), Fraction(-2)),)),
                       1, 1, (Fraction(0),), (Fraction(0),))


def _limit_products() -> Dict[str, Callable[[], ProductForm]]:
    """Product whose q -> 1 limit each closed form is meant to give."""

    def quoted(model, target, geometry=None):
        return lambda: catalog_service.entry(model, target, geometry).form

    products = {
        "sq-selfdual:bulk": quoted(ModelKind.SQ_SELFDUAL, Target.BULK),
        "sq-selfdual:surface": quoted(ModelKind.SQ_SELFDUAL, Target.SURFACE),
        "sq-af:forests": lambda: catalog_service.entry(ModelKind.SQ_AF, Target.BULK).form + _inverse_q_af(),
        "sq-af:surface": quoted(ModelKind.SQ_AF, Target.SURFACE),
        "sq-af:surface-derived": quoted(ModelKind.SQ_AF, Target.SURFACE),
        "tri-selfdual:bulk": quoted(ModelKind.TRI_SELFDUAL, Target.BULK),
        "tri-selfdual:bulk-derived": quoted(ModelKind.TRI_SELFDUAL, Target.BULK),
        "tri-selfdual:surface": quoted(ModelKind.TRI_SELFDUAL, Target.SURFACE, Geometry.TRIANGULAR_RECTANGLE),
        "fpl2:bulk": quoted(ModelKind.FPL2, Target.BULK),
        "fpl2:surface": quoted(ModelKind.FPL2, Target.SURFACE),
        "js:surface:r=0": lambda: catalog_service.js_delta_surface(0),
        "js:surface:r=inf": lambda: catalog_service.js_delta_surface(None),
    }
    for r in range(0, 10):
        products[f"js:surface:r={r}:derived"] = lambda r=r: catalog_service.js_delta_surface(r)
    for r in range(1, 10):
        for suffix in ("", ":derived"):
            products[f"js:left:r={r}{suffix}"] = lambda r=r: catalog_service.js_delta_corner_left(r)
            products[f"js:leftlow:r={r}{suffix}"] = lambda r=r: catalog_service.js_delta_corner_leftlow(r)
        products[f"js:mixed:r={r}"] = lambda r=r: catalog_service.js_mixed_corner(r)
        products[f"js:corner:r={r}"] = lambda r=r: catalog_service.js_corner(r)
    return products


LIMIT_PRODUCTS = _limit_products()


def _ratio(num: Mapping, den: Mapping, order: Fraction) -> FracSeries:
    """Expansion of a ratio of two finite sums of powers of q; den must start at 1."""
    top = FracSeries.from_terms(num, order)
    bottom = FracSeries.from_terms(den, order)
    return series_mul(top, series_inverse(bottom, order), order)


def _poly_mul(*factors: Mapping) -> Dict[Fraction, Fraction]:
    out: Dict[Fraction, Fraction] = {Fraction(0): Fraction(1)}
    for f in factors:
        nxt: Dict[Fraction, Fraction] = {}
        for e1, c1 in out.items():
            for e2, c2 in f.items():
                e = e1 + Fraction(e2)
                nxt[e] = nxt.get(e, 0) + c1 * Fraction(c2)
        out = {e: c for e, c in nxt.items() if c}
    return out


class VerificationService:

    def analytic_bulk_series(self, model: ModelKind, order) -> LogPartition:
        """f_b = -psi from the known exact free energy, expanded exactly in q."""
        model = ModelKind(model)
        order = Fraction(order)
        build = {
            ModelKind.SQ_SELFDUAL: self._selfdual_square,
            ModelKind.SQ_AF: self._antiferro_square,
            ModelKind.TRI_SELFDUAL: self._selfdual_triangular,
            ModelKind.ISING_SQ: self._ising_square,
            ModelKind.ISING_TRI: self._ising_triangular,
        }.get(model)
        if build is None:
            raise InvalidConfigError(f"no analytic bulk free energy for {model.value}")
        return build(order)

    def _selfdual_square(self, order: Fraction) -> LogPartition:
        # 1/2 ln Q + 2 beta + 2 sum_k q^k/k tanh(k lambda), tanh(k lambda) = (1-q^{2k})/(1+q^{2k})
        series = SimpleFactor(1, Fraction(2), Fraction(1)).log_series(order)
        k = 1
        while k < order:
            series = series + _ratio({k: 1, 3 * k: -1}, {0: 1, 2 * k: 1}, order) * Fraction(2, k)
            k += 1
        return LogPartition(Fraction(-2), LogConstant(), series)

    def _antiferro_square(self, order: Fraction) -> LogPartition:
        series = SimpleFactor(-1, Fraction(2), Fraction(1)).log_series(order)
        k = 1
        while k < order:
            series = series + _ratio({k: (-1) ** k, 3 * k: -1}, {0: 1, 2 * k: 1}, order) * Fraction(2, k)
            k += 1
        return LogPartition(Fraction(-2), LogConstant({-1: Fraction(1, 2)}), series)

    def _selfdual_triangular(self, order: Fraction) -> LogPartition:
        series = SimpleFactor(1, Fraction(2), Fraction(1)).log_series(order)
        k = 1
        while Fraction(4 * k, 3) < order:
            series = series + _ratio({Fraction(4 * k, 3): 1, Fraction(8 * k, 3): -1},
                                     {0: 1, 2 * k: 1}, order) * Fraction(3, k)
            k += 1
        return LogPartition(Fraction(-2), LogConstant(), series)

    def _tau(self, order: Fraction) -> FracSeries:
        series = FracSeries.zero(order)
        m = 1
        while 2 * m < order:
            num = _poly_mul({2 * m: 1}, {0: 1, 2 * m: -1}, {0: 1, 2 * m: -1})
            series = series + _ratio(num, {0: 1, 8 * m: -1}, order) * Fraction(1, m)
            m += 1
        return series

    def _ising_square(self, order: Fraction) -> LogPartition:
        # -psi = 2K + sum_n q^{2n}(1-q^n)^2(1-q^{2n})^2 / (n(1+q^{2n})(1-q^{8n})), 2K = -ln x^2
        two_k = productize_service.product_log(catalog_service.x2_form(ModelKind.ISING_SQ).scale(-1), order)
        series = FracSeries.zero(order)
        n = 1
        while 2 * n < order:
            num = _poly_mul({2 * n: 1}, {0: 1, n: -1}, {0: 1, n: -1}, {0: 1, 2 * n: -1}, {0: 1, 2 * n: -1})
            den = _poly_mul({0: 1, 2 * n: 1}, {0: 1, 8 * n: -1})
            series = series + _ratio(num, den, order) * Fraction(1, n)
            n += 1
        return two_k + LogPartition(Fraction(0), LogConstant(), series)

    def _ising_triangular(self, order: Fraction) -> LogPartition:
        # -psi = 3K + tau - 3 g(z) at z = q^{-1/3}
        three_k = productize_service.product_log(
            catalog_service.x2_form(ModelKind.ISING_TRI).scale(Fraction(-3, 2)), order)
        g = FracSeries.zero(order)
        m = 1
        while Fraction(10 * m, 3) < order:
            num = _poly_mul({3 * m: 1}, {0: 1, 2 * m: -1}, {Fraction(m, 3): 1, Fraction(5 * m, 3): -1})
            den = _poly_mul({0: 1, 8 * m: -1}, {0: 1, 2 * m: 1})
            g = g + _ratio(num, den, order) * Fraction(1, m)
            m += 1
        return three_k + LogPartition(Fraction(0), LogConstant(), self._tau(order) - g * 3)

    def check_identity(self, model: ModelKind, order, product: Optional[ProductForm] = None) -> IdentityReport:
        """Compare the analytic f_b with the log of the bulk product (the catalog's unless given)."""
        model = ModelKind(model)
        order = Fraction(order)
        analytic = self.analytic_bulk_series(model, order)
        if product is None:
            product = catalog_service.entry(model, Target.BULK).form
        quoted = productize_service.product_log(product, order)
        first = None
        if analytic.q_power != quoted.q_power or analytic.constant.modulus() != quoted.constant.modulus():
            first = Fraction(0)
        else:
            first = analytic.series.first_difference(quoted.series, order)
        phase = analytic.constant.phase - quoted.constant.phase
        phase_note = ""
        if phase % 2:
            phase_note = f"analytic = product * exp(i*pi*{phase})"
            if model != ModelKind.SQ_AF and first is None:
                first = Fraction(0)
        report = IdentityReport(model, order, first is None, first, phase_note)
        if report.agree:
            logger.info("%s bulk identity holds through q^%s", model.value, order)
        else:
            logger.warning("%s bulk identity fails at q^%s", model.value, first)
        return report

    def check_all(self, order, models=VERIFIABLE_MODELS, threads: Optional[int] = None) -> List[IdentityReport]:
        threads = threads or settings.threads
        return list(Parallel(n_jobs=threads)(delayed(self.check_identity)(m, order) for m in models))

    def log_product_closed_form(self, A, c, mu, nu, order) -> FracSeries:
        """
        ln prod_k (1-q^{Ak-c})^{mu k+nu}
          = -sum_n q^{(A-c)n}(mu+nu-nu q^{An}) / (n (1-q^{An})^2).
        """
        A, c, mu, nu, order = (Fraction(v) for v in (A, c, mu, nu, order))
        if A - c <= 0:
            raise InvalidConfigError("the first factor must carry a positive exponent")
        series = FracSeries.zero(order)
        n = 1
        while (A - c) * n < order:
            num = _poly_mul({(A - c) * n: 1}, {0: mu + nu, A * n: -nu})
            den = _poly_mul({0: 1, A * n: -1}, {0: 1, A * n: -1})
            series = series - _ratio(num, den, order) * Fraction(1, n)
            n += 1
        return series

    def check_log_product_identity(self, A, c, mu, nu, order) -> bool:
        closed = self.log_product_closed_form(A, c, mu, nu, order)
        direct = productize_service.product_log(ProductForm.from_families([(A, c, mu, nu, 1, None)]), order)
        return direct.q_power == 0 and not direct.constant.exponents and closed.agrees_with(direct.series, order)

    def check_limit(self, key: str) -> LimitReport:
        """Evaluate a catalogued closed form and the q -> 1 limit of its product."""
        if key not in LIMIT_PRODUCTS:
            raise InvalidConfigError(f"no product is paired with the closed form '{key}'")
        closed = catalog_service.closed_form(key)
        with mpmath.workdps(settings.precision_digits):
            expected = closed.value()
            actual = asymptotics_service.finite_limit_value(LIMIT_PRODUCTS[key]())
            tolerance = mpmath.mpf(10) ** (-(settings.precision_digits // 2))
            agree = bool(mpmath.almosteq(expected, actual, rel_eps=tolerance, abs_eps=tolerance))
        if agree != closed.reproduced:
            logger.warning("%s: closed form %s the product limit", key, "matches" if agree else "misses")
        return LimitReport(key, closed.expression, expected, actual, agree, closed.reproduced, closed.note)

    def check_limits(self, keys: Optional[Iterable[str]] = None) -> List[LimitReport]:
        return [self.check_limit(k) for k in (keys or LIMIT_PRODUCTS)]


verification_service = VerificationService()
