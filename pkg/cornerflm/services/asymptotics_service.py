import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from ..config import settings
from ..errors import ClassificationError, InvalidConfigError
from ..models import Classification, CornerAngle, ModelKind
from .productize_service import ProductForm
from .series_service import FracSeries, series_inverse, series_mul, series_pow, series_revert

logger = logging.getLogger(__name__)

# interior angle in units of pi
ANGLE_FRACTIONS: Dict[CornerAngle, Fraction] = {
    CornerAngle.RIGHT: Fraction(1, 2),
    CornerAngle.ACUTE: Fraction(1, 3),
    CornerAngle.OBTUSE: Fraction(2, 3),
}


def _mp(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _bernoulli2(x: Fraction) -> Fraction:
    return x * x - x + Fraction(1, 6)


def _real_if_close(z):
    if isinstance(z, mpmath.mpc) and abs(z.imag) <= mpmath.mpf(10) ** (-(mpmath.mp.dps - 5)) * max(1, abs(z)):
        return z.real
    return z


def corner_weight(angle: CornerAngle) -> Fraction:
    """Cardy-Peschel coefficient per unit central charge: f_c picks up c*w*ln(xi)."""
    theta = ANGLE_FRACTIONS[CornerAngle(angle)]
    return (1 / theta - theta) / 24


def parse_corners(text: str) -> List[CornerAngle]:
    """'4xpi/2,2xpi/3' -> [RIGHT]*4 + [ACUTE]*2."""
    corners: List[CornerAngle] = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        count, _, name = token.rpartition("x")
        try:
            corners.extend([CornerAngle(name)] * (int(count) if count else 1))
        except ValueError as exc:
            raise InvalidConfigError(f"bad corner spec '{token}', expected e.g. 4xpi/2") from exc
    return corners


@dataclass(frozen=True)
class AsymptoticExpansion:
    """
    ln p(q) = A2/eps^2 + A1/eps + a_log*ln(eps) + A0 + O(eps) with eps = -ln q.

    A2 = -zeta(3)*zeta3_coeff and A1 = pi^2*pi2_coeff are kept exact.
    """

    zeta3_coeff: Fraction
    pi2_coeff: Fraction
    a_log: Fraction
    a0: object

    @property
    def a2(self):
        return -mpmath.zeta(3) * _mp(self.zeta3_coeff)

    @property
    def a1(self):
        return mpmath.pi ** 2 * _mp(self.pi2_coeff)

    @property
    def has_linear_growth(self) -> bool:
        return self.zeta3_coeff != 0

    @property
    def prefactor(self):
        """A in p ~ A * (1-q)^a_log * exp(C/(1-q))."""
        return _real_if_close(mpmath.exp(self.a0 - self.a1 / 2 + self.a2 / 12))


@dataclass(frozen=True)
class LadderPoint:
    q: float
    log_abs: float
    phase: Fraction
    error: float

    @property
    def value(self):
        modulus = mpmath.exp(mpmath.mpf(self.log_abs))
        if self.phase == 0:
            return modulus
        return _real_if_close(modulus * mpmath.expjpi(_mp(self.phase)))


@dataclass(frozen=True)
class NumericPrefactor:
    value: object
    error: float
    points: Tuple[LadderPoint, ...] = ()


@dataclass(frozen=True)
class AsymptoticProfile:
    classification: Classification
    expansion: AsymptoticExpansion
    finite_value: Optional[object] = None
    divergence_coeff: Optional[Fraction] = None
    prefactor_A: Optional[object] = None
    numeric_A: Optional[NumericPrefactor] = None
    xi_coefficient: Optional[Fraction] = None


def _neville_at_zero(xs: Sequence[float], ys: Sequence[float]) -> float:
    p = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
    return p[0]


class AsymptoticsService:

    # Exact expansion

    def asymptotic_expansion(self, p: ProductForm) -> AsymptoticExpansion:
        with mpmath.workdps(settings.precision_digits):
            a = Fraction(p.period, p.grid)
            zeta3 = pi2 = a_log = Fraction(0)
            a0 = mpmath.mpf(0)
            ln_a = mpmath.log(_mp(a))
            for r, beta, gamma in p.families():
                x = Fraction(r, p.period)
                xm = _mp(x)
                # sum_n (beta*a*(n+x) + gamma) * ln(1 - exp(-eps*a*(n+x)))
                zeta3 += beta / a
                pi2 -= gamma / (6 * a)
                a_log += gamma * (Fraction(1, 2) - x) - beta * a * _bernoulli2(x) / 2
                if gamma:
                    a0 += _mp(gamma) * (ln_a * _mp(Fraction(1, 2) - x) - mpmath.zeta(0, xm, 1))
                if beta:
                    z = -_mp(_bernoulli2(x)) / 2
                    a0 += _mp(beta * a) * (ln_a * z - mpmath.zeta(-1, xm, 1))
            pre = p.prefactor
            a0 = a0 + pre.constant.log_value()
            for f in pre.factors:
                if f.sign < 0:
                    a_log += f.power
                    a0 += _mp(f.power) * mpmath.log(_mp(f.exponent))
                else:
                    a0 += _mp(f.power) * mpmath.log(2)
            return AsymptoticExpansion(zeta3, pi2, a_log, a0)

    def classify_q1_limit(self, p: ProductForm) -> Classification:
        e = self.asymptotic_expansion(p)
        if e.has_linear_growth:
            logger.warning("slope families do not pair up; ln p grows like 1/(1-q)^2")
            return Classification.LINEAR_GROWTH_SPECIAL
        if e.pi2_coeff:
            return Classification.DIVERGENT if e.pi2_coeff > 0 else Classification.ZERO
        if e.a_log:
            return Classification.DIVERGENT if e.a_log < 0 else Classification.ZERO
        return Classification.FINITE

    def finite_limit_value(self, p: ProductForm):
        classification = self.classify_q1_limit(p)
        if classification != Classification.FINITE:
            raise ClassificationError(f"product has no finite q -> 1 limit ({classification.value})")
        with mpmath.workdps(settings.precision_digits):
            return _real_if_close(mpmath.exp(self.asymptotic_expansion(p).a0))

    def divergence_coefficient(self, p: ProductForm) -> Fraction:
        """C/pi^2 with ln p ~ C/(1-q)."""
        e = self.asymptotic_expansion(p)
        if e.has_linear_growth:
            raise ClassificationError("slope families with nonzero net slope have no 1/(1-q) divergence")
        return e.pi2_coeff

    def prefactor(self, p: ProductForm):
        """Closed-form A with p ~ A * (1-q)^a_log * exp(C/(1-q))."""
        with mpmath.workdps(settings.precision_digits):
            return self.asymptotic_expansion(p).prefactor

    # Numerics

    def ladder_evaluate(self, p: ProductForm, q: float, tol: float = 1e-17) -> LadderPoint:
        """ln|p(q)| by direct summation of the factors, with a truncation error estimate."""
        if not 0 < q < 1:
            raise InvalidConfigError(f"ladder point must lie in (0, 1), got {q}")
        lnq = np.log(q)
        pre = p.prefactor
        log_abs = float(mpmath.re(pre.constant.log_value())) + float(pre.q_power) * lnq
        for f in pre.factors:
            log_abs += float(f.power) * np.log1p(f.sign * np.exp(float(f.exponent) * lnq))
        a = p.period / p.grid
        n_max = int(np.ceil(-np.log(tol) / (a * -lnq))) + 1
        n = np.arange(n_max, dtype=float)
        error = 0.0
        magnitude = abs(log_abs)
        for r, beta, gamma in p.families():
            e = a * (n + r / p.period)
            terms = (float(beta) * e + float(gamma)) * np.log1p(-np.exp(e * lnq))
            log_abs += float(np.sum(terms))
            magnitude += float(np.sum(np.abs(terms)))
            e_next = a * (n_max + r / p.period)
            error += abs(float(beta) * e_next + float(gamma)) * np.exp(e_next * lnq) / (1 - np.exp(a * lnq))
        error += magnitude * np.finfo(float).eps
        return LadderPoint(float(q), float(log_abs), pre.constant.phase, float(error))

    def ladder(self, p: ProductForm, points: Optional[int] = None) -> List[LadderPoint]:
        points = points or settings.ladder_points
        return [self.ladder_evaluate(p, 1 - 2.0 ** -m) for m in range(3, 3 + points)]

    def numeric_prefactor(self, p: ProductForm, points: Optional[int] = None) -> NumericPrefactor:
        """A from q = 1 - 2^-m, with ln p - C/h - a_log*ln h extrapolated to h = 0."""
        e = self.asymptotic_expansion(p)
        if e.has_linear_growth:
            raise ClassificationError("numeric prefactor needs a form without linear growth")
        ladder = self.ladder(p, points)
        if len(ladder) < 3:
            raise InvalidConfigError("numeric prefactor needs at least three ladder points")
        c = float(e.pi2_coeff) * np.pi ** 2
        hs = [1 - pt.q for pt in ladder]
        fs = [pt.log_abs - c / h - float(e.a_log) * np.log(h) for h, pt in zip(hs, ladder)]
        best = _neville_at_zero(hs, fs)
        previous = _neville_at_zero(hs[1:], fs[1:])
        error = abs(best - previous)
        if not np.isfinite(best):
            raise ClassificationError("ladder extrapolation did not converge")
        with mpmath.workdps(settings.precision_digits):
            value = LadderPoint(0.0, best, ladder[0].phase, error).value
        logger.debug("numeric prefactor ln A=%.15g +- %.2g from %d points", best, error, len(ladder))
        return NumericPrefactor(value, error * float(abs(value)), tuple(ladder))

    def trend_consistent(self, p: ProductForm, qs: Iterable[float] = (0.99, 0.999, 0.9999)) -> bool:
        """Check direct evaluations near q = 1 move the way the classification says."""
        classification = self.classify_q1_limit(p)
        logs = [self.ladder_evaluate(p, q).log_abs for q in qs]
        steps = np.diff(logs)
        if classification == Classification.DIVERGENT:
            return bool(np.all(steps > 0))
        if classification == Classification.ZERO:
            return bool(np.all(steps < 0))
        if classification == Classification.FINITE:
            return bool(np.all(np.abs(steps[1:]) <= np.abs(steps[:-1]) + 1e-12))
        return True

    def profile(self, p: ProductForm, central_charge=None,
                corners: Optional[Sequence[CornerAngle]] = None, numeric: bool = True) -> AsymptoticProfile:
        expansion = self.asymptotic_expansion(p)
        classification = self.classify_q1_limit(p)
        if classification == Classification.LINEAR_GROWTH_SPECIAL:
            return AsymptoticProfile(classification, expansion)
        finite = self.finite_limit_value(p) if classification == Classification.FINITE else None
        with mpmath.workdps(settings.precision_digits):
            A = expansion.prefactor
        numeric_A = self.numeric_prefactor(p) if numeric else None
        xi = None
        if central_charge is not None and corners:
            xi = self.cardy_peschel_extract(corners, expansion.pi2_coeff, central_charge)
        return AsymptoticProfile(classification, expansion, finite, expansion.pi2_coeff, A, numeric_A, xi)

    # Cardy-Peschel

    def cardy_peschel_extract(self, corners: Sequence[CornerAngle], C, c) -> Fraction:
        """ln(xi) coefficient of 1/(1-q), in units of pi^2, from C/pi^2 and the corner set."""
        total = self._total_weight(corners)
        c = Fraction(c)
        if c == 0:
            raise InvalidConfigError("central charge must be nonzero")
        return Fraction(C) / (c * total)

    def c_eff_from(self, C, corners: Sequence[CornerAngle], xi_coefficient) -> Fraction:
        """Effective central charge given the corner divergence and the bulk ln(xi) coefficient."""
        return Fraction(C) / (Fraction(xi_coefficient) * self._total_weight(corners))

    def h_from(self, c, c_eff, angle: CornerAngle = CornerAngle.RIGHT) -> Fraction:
        """Boundary-changing weight h with w*c_eff = w*c - h*pi/angle."""
        theta = ANGLE_FRACTIONS[CornerAngle(angle)]
        return corner_weight(angle) * (Fraction(c) - Fraction(c_eff)) * theta

    def correlation_prefactor(self, A, corners: Sequence[CornerAngle], c):
        """xi prefactor A^{1/(c*sum w)}."""
        exponent = 1 / (Fraction(c) * self._total_weight(corners))
        with mpmath.workdps(settings.precision_digits):
            return mpmath.power(A, _mp(exponent))

    def xi_by_angle(self, forms: Dict[CornerAngle, ProductForm], c) -> Dict[CornerAngle, Fraction]:
        """ln(xi) coefficient from each single-corner form; disagreeing values are logged."""
        values = {angle: self.cardy_peschel_extract([angle], self.divergence_coefficient(p), c)
                  for angle, p in forms.items()}
        if len(set(values.values())) > 1:
            logger.warning("per-angle correlation lengths disagree: %s",
                           ", ".join(f"{a.value}: {v} pi^2" for a, v in values.items()))
        return values

    @staticmethod
    def _total_weight(corners: Sequence[CornerAngle]) -> Fraction:
        corners = list(corners)
        if not corners:
            raise InvalidConfigError("corner list is empty")
        return sum((corner_weight(a) for a in corners), Fraction(0))

    # Universality near Q -> 0-

    def universality_map(self, model: ModelKind, K, order: int = 4) -> Tuple[Fraction, Fraction]:
        """
        Rewrite K*(1/d - 1/2) as u/sqrt(-Q) + v for the AF square (d = 1-q) or
        triangular (d = 1+t) selfdual model; returns (u, v) in units of K's unit.
        """
        model = ModelKind(model)
        d = FracSeries.polynomial([0, 1], trunc=order + 2)
        one = FracSeries.one(order + 2)
        if model == ModelKind.SQ_AF:
            # sqrt(-Q) = 1/q - q
            s = series_mul(d * 2 - series_mul(d, d), series_inverse(one - d, order + 2), order + 2)
        elif model == ModelKind.TRI_SELFDUAL:
            s = series_mul(series_mul(d, one * 3 - d * 3 + series_mul(d, d)),
                           series_pow(one - d, Fraction(-3, 2), order + 2), order + 2)
        else:
            raise InvalidConfigError(f"no Q -> 0 variable map for {model.value}")
        inverse = series_revert(s, order + 1)
        ratio = series_inverse(inverse.shift(-1), order)
        K = Fraction(K)
        return K * ratio.coefficient(0), K * (ratio.coefficient(1) - Fraction(1, 2))


asymptotics_service = AsymptoticsService()
