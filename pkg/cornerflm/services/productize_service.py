import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..config import settings
from ..errors import InvalidConfigError, SeriesError
from .series_service import (
    FracSeries,
    LogConstant,
    LogPartition,
    _index_bound,
    euler_log,
    series_exp,
    series_log,
)

logger = logging.getLogger(__name__)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _minimal_period(betas: Sequence[Fraction], gammas: Sequence[Fraction]) -> int:
    period = len(betas)
    for d in range(1, period + 1):
        if period % d == 0 and all(betas[p] == betas[p % d] and gammas[p] == gammas[p % d]
                                   for p in range(period)):
            return d
    return period


def fmt(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class SimpleFactor:
    """(1 + sign*q^exponent)^power."""

    sign: int
    exponent: Fraction
    power: Fraction

    def log_series(self, order) -> FracSeries:
        e = Fraction(self.exponent)
        grid = e.denominator
        n = _index_bound(Fraction(order), grid)
        step = e.numerator
        coeffs = {}
        k = 1
        while step * k < n:
            coeffs[step * k] = Fraction(self.power) * (-1) ** (k + 1) * Fraction(self.sign) ** k / k
            k += 1
        return FracSeries(coeffs, grid, order)

    def pretty(self) -> str:
        op = "+" if self.sign > 0 else "-"
        base = f"(1{op}q^{fmt(self.exponent)})"
        return base if self.power == 1 else f"{base}^{fmt(self.power)}"


def merge_factors(factors: Iterable[SimpleFactor]) -> Tuple[SimpleFactor, ...]:
    """Collect powers of equal factors, drop the trivial ones, sort by exponent."""
    powers: Dict[Tuple[Fraction, int], Fraction] = {}
    for f in factors:
        key = (Fraction(f.exponent), f.sign)
        powers[key] = powers.get(key, Fraction(0)) + Fraction(f.power)
    return tuple(SimpleFactor(sign, e, p) for (e, sign), p in sorted(powers.items()) if p)


@dataclass(frozen=True)
class Prefactor:
    """constant * q^q_power * prod of simple factors."""

    constant: LogConstant = field(default_factory=LogConstant)
    q_power: Fraction = Fraction(0)
    factors: Tuple[SimpleFactor, ...] = ()

    def __add__(self, other: "Prefactor") -> "Prefactor":
        return Prefactor(self.constant + other.constant, Fraction(self.q_power) + other.q_power,
                         merge_factors(self.factors + other.factors))

    def scale(self, factor) -> "Prefactor":
        factor = Fraction(factor)
        return Prefactor(self.constant.scale(factor), Fraction(self.q_power) * factor,
                         merge_factors(SimpleFactor(f.sign, f.exponent, f.power * factor)
                                       for f in self.factors))

    def log_partition(self, order) -> LogPartition:
        series = FracSeries.zero(order)
        for f in self.factors:
            series = series + f.log_series(order)
        return LogPartition(Fraction(self.q_power), self.constant, series)

    def pretty(self) -> str:
        parts = []
        if self.constant.exponents:
            try:
                parts.append(fmt(self.constant.to_rational()))
            except SeriesError:
                parts.append(f"[{self.constant.to_text()}]")
        if self.q_power:
            parts.append(f"q^{fmt(self.q_power)}")
        parts.extend(f.pretty() for f in self.factors)
        return " ".join(parts)


@dataclass(frozen=True)
class ProductForm:
    """
    prefactor * prod_j (1 - q^{j/grid})^{alpha_j} with alpha_j = beta_r*(j/grid) + gamma_r.

    Residues are r = ((j-1) mod period) + 1 and the tuples are indexed by r-1.
    """

    prefactor: Prefactor
    grid: int
    period: int
    betas: Tuple[Fraction, ...]
    gammas: Tuple[Fraction, ...]
    repeats: int = 0

    @classmethod
    def unit(cls) -> "ProductForm":
        return cls(Prefactor(), 1, 1, (Fraction(0),), (Fraction(0),))

    @property
    def period_q(self) -> Fraction:
        return Fraction(self.period, self.grid)

    def residue_index(self, j: int) -> int:
        return (j - 1) % self.period

    def alpha(self, j: int) -> Fraction:
        p = self.residue_index(j)
        return self.betas[p] * Fraction(j, self.grid) + self.gammas[p]

    def is_unit(self) -> bool:
        return (not any(self.betas) and not any(self.gammas) and not self.prefactor.factors
                and not self.prefactor.q_power and not self.prefactor.constant.exponents)

    def regrid(self, grid: int, period: int) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        """(betas, gammas) on a finer grid and a multiple of the period, both in grid units."""
        step = grid // self.grid
        if grid % self.grid or period % (self.period * step):
            raise InvalidConfigError(f"cannot regrid ({self.grid}, {self.period}) to ({grid}, {period})")
        betas, gammas = [], []
        for j in range(1, period + 1):
            if j % step:
                betas.append(Fraction(0))
                gammas.append(Fraction(0))
                continue
            p = self.residue_index(j // step)
            betas.append(self.betas[p])
            gammas.append(self.gammas[p])
        return tuple(betas), tuple(gammas)

    def __add__(self, other: "ProductForm") -> "ProductForm":
        """Product of the two forms (sum of logarithms)."""
        grid = _lcm(self.grid, other.grid)
        period = _lcm(self.period * (grid // self.grid), other.period * (grid // other.grid))
        b1, g1 = self.regrid(grid, period)
        b2, g2 = other.regrid(grid, period)
        betas = [x + y for x, y in zip(b1, b2)]
        gammas = [x + y for x, y in zip(g1, g2)]
        period = _minimal_period(betas, gammas)
        return ProductForm(self.prefactor + other.prefactor, grid, period,
                           tuple(betas[:period]), tuple(gammas[:period]), min(self.repeats, other.repeats))

    def scale(self, factor) -> "ProductForm":
        """The form raised to a rational power."""
        factor = Fraction(factor)
        return ProductForm(self.prefactor.scale(factor), self.grid, self.period,
                           tuple(b * factor for b in self.betas), tuple(g * factor for g in self.gammas),
                           self.repeats)

    def __neg__(self) -> "ProductForm":
        return self.scale(-1)

    def __sub__(self, other: "ProductForm") -> "ProductForm":
        return self + (-other)

    def families(self) -> List[Tuple[int, Fraction, Fraction]]:
        """Non-trivial residues as (r, beta_r, gamma_r)."""
        return [(p + 1, b, g) for p, (b, g) in enumerate(zip(self.betas, self.gammas)) if b or g]

    @classmethod
    def from_families(cls, families: Iterable[Tuple], prefactor: Optional[Prefactor] = None,
                      grid: Optional[int] = None) -> "ProductForm":
        """
        Build from families (A, c, mu, nu, k_min, k_max) meaning
        prod_{k=k_min}^{k_max} (1 - q^{A k - c})^{mu k + nu}; k_max None is infinite.

        Finite ranges become simple factors, and factors that the periodic extension
        adds below k_min are cancelled by simple factors as well.
        """
        prefactor = prefactor or Prefactor()
        families = [tuple(Fraction(x) if x is not None else None for x in f[:4]) + tuple(f[4:])
                    for f in families]
        g = grid or 1
        for A, c, _, _, _, _ in families:
            g = _lcm(g, _lcm(A.denominator, c.denominator))
        period = 1
        for A, c, _, _, _, k_max in families:
            if k_max is None:
                period = _lcm(period, int(A * g))
        betas = [Fraction(0)] * period
        gammas = [Fraction(0)] * period
        extras: Dict[Fraction, Fraction] = {}
        for A, c, mu, nu, k_min, k_max in families:
            if k_max is not None:
                for k in range(k_min, k_max + 1):
                    e = A * k - c
                    if e <= 0:
                        raise InvalidConfigError(f"family term at k={k} has non-positive exponent {e}")
                    extras[e] = extras.get(e, 0) + mu * k + nu
                continue
            step = int(A * g)
            # first positive exponent of the family's progression
            k_lo = k_min
            while A * (k_lo - 1) - c > 0:
                k_lo -= 1
            for k in range(k_lo, k_lo + period // step):
                j = int((A * k - c) * g)
                if j <= 0:
                    continue
                p = (j - 1) % period
                betas[p] += mu / A
                gammas[p] += mu * c / A + nu
            for k in range(k_lo, k_min):
                e = A * k - c
                if e > 0:
                    extras[e] = extras.get(e, 0) - (mu * k + nu)
        factors = merge_factors(list(prefactor.factors) + [SimpleFactor(-1, e, p) for e, p in extras.items()])
        period = _minimal_period(betas, gammas)
        return cls(Prefactor(prefactor.constant, prefactor.q_power, factors), g, period,
                   tuple(betas[:period]), tuple(gammas[:period]))

    def pretty(self) -> str:
        pieces = []
        pre = self.prefactor.pretty()
        if pre:
            pieces.append(pre)
        A = Fraction(self.period, self.grid)
        for r, beta, gamma in self.families():
            c = Fraction(self.period - r, self.grid)
            slope, const = beta * A, gamma - beta * c
            exp_text = f"{fmt(A)}k" + (f"-{fmt(c)}" if c else "")
            if slope:
                power = f"{fmt(slope)}k" + (f"{'+' if const > 0 else '-'}{fmt(abs(const))}" if const else "")
                power = f"({power})"
            else:
                power = fmt(const)
            pieces.append(f"prod_k (1-q^{{{exp_text}}})^{{{power}}}")
        return " * ".join(pieces) if pieces else "1"

    def to_dict(self) -> Dict:
        return {
            "prefactor": {
                "constant": self.prefactor.constant.to_text(),
                "q_power": fmt(self.prefactor.q_power),
                "factors": [{"sign": f.sign, "exponent": fmt(f.exponent), "power": fmt(f.power)}
                            for f in self.prefactor.factors],
            },
            "g": self.grid,
            "a": self.period,
            "beta": [fmt(b) for b in self.betas],
            "gamma": [fmt(g) for g in self.gammas],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ProductForm":
        pre = data.get("prefactor", {})
        factors = tuple(SimpleFactor(int(f["sign"]), Fraction(f["exponent"]), Fraction(f["power"]))
                        for f in pre.get("factors", []))
        prefactor = Prefactor(LogConstant.from_text(pre.get("constant", "1")),
                              Fraction(pre.get("q_power", "0")), factors)
        return cls(prefactor, int(data["g"]), int(data["a"]),
                   tuple(Fraction(b) for b in data["beta"]), tuple(Fraction(g) for g in data["gamma"]))


@dataclass(frozen=True)
class FitFailure:
    """No periodic fit at the available order; carries the best partial fit."""

    reason: str
    indices_available: int
    indices_needed: int
    best_period: Optional[int] = None
    residues_fitted: int = 0
    alphas: Tuple[Fraction, ...] = ()


FitResult = Union[ProductForm, FitFailure]

# powers a first-occurrence exception may carry when it moves into the prefactor
PREFACTOR_POWERS = frozenset(Fraction(p) for p in (-2, -1, 1, 2))


def _fit_residue(points: Sequence[Tuple[int, Fraction]], grid: int, powers: Iterable[Fraction]):
    """
    Try constant, constant+exception, linear, linear+exception; return (beta, gamma, exception) or None.

    A lone point is a constant; a slope needs three points. Exceptions sit at the first
    occurrence and only with a power from ``powers``.
    """
    powers = frozenset(powers)
    values = [v for _, v in points]
    if all(v == values[0] for v in values):
        return Fraction(0), values[0], None
    if len(values) >= 3 and all(v == values[1] for v in values[1:]) and values[0] - values[1] in powers:
        return Fraction(0), values[1], (points[0][0], values[0] - values[1])

    def linear(pts):
        (j0, v0), (j1, v1) = pts[0], pts[1]
        beta = (v1 - v0) / (Fraction(j1 - j0, grid))
        gamma = v0 - beta * Fraction(j0, grid)
        if all(beta * Fraction(j, grid) + gamma == v for j, v in pts):
            return beta, gamma
        return None

    if len(points) >= 3:
        fit = linear(points)
        if fit:
            return fit[0], fit[1], None
    if len(points) >= 4:
        fit = linear(points[1:])
        if fit:
            beta, gamma = fit
            j0, v0 = points[0]
            delta = v0 - beta * Fraction(j0, grid) - gamma
            if delta in powers:
                return beta, gamma, (j0, delta)
    return None


def _fit_period(alphas: Dict[int, Fraction], J: int, a: int, grid: int, powers: Iterable[Fraction]):
    """Per-residue fits at period a; stops at the first residue that does not fit."""
    betas, gammas, exceptions = [], [], []
    for r in range(1, a + 1):
        points = [(j, Fraction(alphas[j])) for j in range(r, J + 1, a)]
        fit = _fit_residue(points, grid, powers)
        if fit is None:
            break
        beta, gamma, exception = fit
        betas.append(beta)
        gammas.append(gamma)
        if exception is not None:
            exceptions.append(SimpleFactor(-1, Fraction(exception[0], grid), exception[1]))
    return betas, gammas, exceptions


class ProductizeService:

    def extract_log_prefactor(self, f: LogPartition,
                              whitelist: Sequence[Tuple[int, Fraction, Optional[Fraction]]] = ()
                              ) -> Tuple[Prefactor, FracSeries]:
        """
        Split ln(prefactor) off a log-partition; returns the prefactor and the residual
        log series. Whitelist entries are (sign, exponent, power or None); None peels
        greedily by matching the residual's coefficient at that exponent.
        """
        residual = f.series
        factors = []
        for sign, exponent, power in sorted(whitelist, key=lambda w: Fraction(w[1])):
            exponent = Fraction(exponent)
            if power is None:
                power = residual.coefficient(exponent) / sign
            if not power:
                continue
            factor = SimpleFactor(sign, exponent, Fraction(power))
            residual = residual - factor.log_series(residual.trunc)
            factors.append(factor)
        return Prefactor(f.constant, f.q_power, tuple(factors)), residual

    def extract_prefactor(self, s: FracSeries,
                          whitelist: Sequence[Tuple[int, Fraction, Optional[Fraction]]] = ()
                          ) -> Tuple[Prefactor, FracSeries]:
        """Leading monomial and whitelisted factors out; the returned series starts at 1."""
        if s.is_zero():
            raise SeriesError("prefactor of a zero series")
        log = LogPartition.from_series(s, s.trunc)
        prefactor, residual = self.extract_log_prefactor(log, whitelist)
        return prefactor, series_exp(residual)

    def alphas_from_log(self, log: FracSeries, max_index: Optional[int] = None) -> Dict[int, Fraction]:
        """Euler exponents alpha_1..alpha_J from ln prod (1-q^{j/g})^{alpha_j}."""
        if log.trunc is None:
            raise SeriesError("exponent extraction needs a truncated series")
        limit = _index_bound(log.trunc, log.grid) - 1
        if max_index is None:
            max_index = limit
        if max_index > limit:
            raise SeriesError(f"truncation {log.trunc} covers indices up to {limit}, asked for {max_index}")
        alphas: Dict[int, Fraction] = {}
        for m in range(1, max_index + 1):
            acc = m * log.coeffs.get(m, Fraction(0))
            for j in range(1, m):
                if m % j == 0 and alphas[j]:
                    acc += j * alphas[j]
            alphas[m] = -acc / m
        return alphas

    def log_to_alphas(self, s: FracSeries, max_index: Optional[int] = None) -> Dict[int, Fraction]:
        if s.constant_term() != 1 or s.has_negative_powers():
            raise SeriesError("exponent extraction needs a series with constant term 1")
        return self.alphas_from_log(series_log(s), max_index)

    def fit_product_form(self, alphas: Dict[int, Fraction], grid: int = 1,
                         min_repeats: Optional[int] = None, hint_period: Optional[int] = None,
                         prefactor: Optional[Prefactor] = None,
                         powers: Iterable[Fraction] = PREFACTOR_POWERS) -> FitResult:
        """
        Smallest period (grid units) whose residues are all fitted exactly by a constant
        or linear exponent. A residue may take one exception at its first occurrence when
        its power is in ``powers``; exceptions turn into simple factors of the prefactor.

        Periods seen min_repeats times are tried first. Short series then try periods that
        repeat every residue at least once, and last the hinted period, which needs one
        repeat overall and exactness on every available index.
        """
        min_repeats = min_repeats or settings.min_repeats
        if min_repeats < 3:
            raise InvalidConfigError("min_repeats must be at least 3")
        prefactor = prefactor or Prefactor()
        powers = frozenset(Fraction(p) for p in powers)
        J = max(alphas) if alphas else 0
        confirmed = J // min_repeats
        candidates = list(range(1, max(confirmed, J // 2) + 1))
        if hint_period and hint_period < J and hint_period not in candidates:
            candidates.append(hint_period)
        best: Tuple[int, Optional[int]] = (-1, None)
        for a in candidates:
            betas, gammas, exceptions = _fit_period(alphas, J, a, grid, powers)
            if len(betas) > best[0]:
                best = (len(betas), a)
            if len(betas) < a:
                continue
            if a > confirmed:
                logger.warning("period %d (grid %d) fitted with %d repeats, fewer than %d",
                               a, grid, J // a, min_repeats)
            else:
                logger.info("fitted period %d (grid %d) with %d repeats", a, grid, J // a)
            pre = Prefactor(prefactor.constant, prefactor.q_power,
                            merge_factors(tuple(prefactor.factors) + tuple(exceptions)))
            return ProductForm(pre, grid, a, tuple(betas), tuple(gammas), J // a)
        hint = hint_period or (confirmed + 1)
        needed = max(0, min_repeats * hint - J)
        logger.warning("no periodic product fit with %d exponents; %d more needed for period %d",
                       J, needed, hint)
        return FitFailure("no periodic fit at the available order", J, needed, best[1], max(best[0], 0),
                          tuple(alphas[j] for j in sorted(alphas)))

    def conjecture(self, f: LogPartition, order=None, min_repeats: Optional[int] = None,
                   hint_period: Optional[int] = None,
                   whitelist: Sequence[Tuple[int, Fraction, Optional[Fraction]]] = ()) -> FitResult:
        """Prefactor extraction, exponent inversion and periodic fit in one step."""
        if order is not None:
            f = f.truncate(order)
        prefactor, residual = self.extract_log_prefactor(f, whitelist)
        alphas = self.alphas_from_log(residual)
        return self.fit_product_form(alphas, residual.grid, min_repeats, hint_period, prefactor)

    def product_log(self, p: ProductForm, order) -> LogPartition:
        """ln of a product form through q^order (exclusive)."""
        order = Fraction(order)
        body = LogPartition(Fraction(0), LogConstant(), euler_log(p.alpha, p.grid, order))
        return p.prefactor.log_partition(order) + body

    def expand_product_form(self, p: ProductForm, order) -> FracSeries:
        """Exact expansion including the prefactor; the constant must be rational."""
        return self.product_log(p, order).exp_series(order)

    def negate_variable(self, p: ProductForm) -> ProductForm:
        """Rewrite an integer-grid form in x as a form in s = -x."""
        if p.grid != 1:
            raise InvalidConfigError("variable negation needs an integer-grid product form")

        # (1-x^m) is (1-s^m) for even m and (1-s^{2m})/(1-s^m) for odd m
        def alpha_s(J: int) -> Fraction:
            if J % 2:
                return -p.alpha(J)
            total = p.alpha(J)
            if (J // 2) % 2:
                total += p.alpha(J // 2)
            return total

        a = _lcm(2 * p.period, 4)
        betas, gammas = [], []
        for r in range(1, a + 1):
            v0, v1 = alpha_s(r), alpha_s(r + a)
            beta = (v1 - v0) / a
            betas.append(beta)
            gammas.append(v0 - beta * r)
        factors = []
        for f in p.prefactor.factors:
            if f.exponent.denominator != 1:
                raise InvalidConfigError("variable negation needs integer simple-factor exponents")
            factors.append(SimpleFactor(f.sign * (-1) ** int(f.exponent), f.exponent, f.power))
        constant = p.prefactor.constant + LogConstant({-1: p.prefactor.q_power})
        prefactor = Prefactor(constant, p.prefactor.q_power, merge_factors(factors))
        a = _minimal_period(betas, gammas)
        return ProductForm(prefactor, 1, a, tuple(betas[:a]), tuple(gammas[:a]), p.repeats)

    def rescale_variable(self, p: ProductForm, factor) -> ProductForm:
        """The same product written in s with q = s^factor."""
        factor = Fraction(factor)
        if factor <= 0:
            raise InvalidConfigError(f"rescaling factor must be positive, got {factor}")
        A = Fraction(p.period, p.grid) * factor
        families = []
        for r, beta, gamma in p.families():
            c = Fraction(p.period - r, p.grid) * factor
            slope = beta / factor
            families.append((A, c, slope * A, gamma - slope * c, 1, None))
        pre = p.prefactor
        prefactor = Prefactor(pre.constant, pre.q_power * factor,
                              tuple(SimpleFactor(f.sign, f.exponent * factor, f.power) for f in pre.factors))
        return ProductForm.from_families(families, prefactor)

    def x_to_q_form(self, p: ProductForm) -> ProductForm:
        """Apply x = -q^2: (1-x^m) -> (1-q^{2m}) or (1-q^{4m})/(1-q^{2m})."""
        return self.rescale_variable(self.negate_variable(p), 2)


productize_service = ProductizeService()
