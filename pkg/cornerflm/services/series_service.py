import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple, Union

import mpmath

from ..errors import SeriesError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

# every grid denominator must divide this
GRID_BASE = 12


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _check_grid(grid: int) -> None:
    if grid <= 0 or GRID_BASE % grid:
        raise SeriesError(f"grid denominator {grid} does not divide {GRID_BASE}")


def _min_order(*orders: Optional[Fraction]) -> Optional[Fraction]:
    known = [o for o in orders if o is not None]
    return min(known) if known else None


def _index_bound(order: Fraction, grid: int) -> int:
    """Smallest index j with j/grid >= order."""
    order = Fraction(order)
    return -((-order.numerator * grid) // order.denominator)


def _integer_root(n: int, degree: int) -> Optional[int]:
    if n < 0:
        return None
    if n < 2:
        return n
    lo, hi = 1, 1 << (n.bit_length() // degree + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid ** degree
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def rational_power(value: Fraction, exponent: Fraction) -> Fraction:
    """Exact value**exponent, or SeriesError when it is not rational."""
    value, exponent = Fraction(value), Fraction(exponent)
    if exponent.denominator == 1:
        return value ** exponent.numerator
    degree = exponent.denominator
    sign = 1
    if value < 0:
        if degree % 2 == 0:
            raise SeriesError(f"even root of negative constant {value}")
        sign = -1
    num = _integer_root(abs(value.numerator), degree)
    den = _integer_root(value.denominator, degree)
    if num is None or den is None:
        raise SeriesError(f"{value} has no exact rational power {exponent}")
    return (Fraction(sign * num, den)) ** exponent.numerator


class FracSeries:
    """
    Truncated power series in q with exact rational coefficients.

    Exponents live on the grid j/grid (grid divides 12). ``trunc`` is the exclusive
    exponent bound below which every coefficient is known; None marks an exact
    finite expression.
    """

    __slots__ = ("grid", "coeffs", "trunc")

    def __init__(self, coeffs: Optional[Mapping[int, Number]] = None, grid: int = 1,
                 trunc: Optional[Number] = None):
        _check_grid(grid)
        trunc = None if trunc is None else Fraction(trunc)
        clean: Dict[int, Fraction] = {}
        for j, c in (coeffs or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            if trunc is not None and Fraction(j, grid) >= trunc:
                continue
            clean[int(j)] = c
        self.grid = grid
        self.coeffs = clean
        self.trunc = trunc

    # Construction

    @classmethod
    def zero(cls, trunc: Optional[Number] = None) -> "FracSeries":
        return cls({}, 1, trunc)

    @classmethod
    def one(cls, trunc: Optional[Number] = None) -> "FracSeries":
        return cls({0: 1}, 1, trunc)

    @classmethod
    def monomial(cls, exponent: Number, coeff: Number = 1,
                 trunc: Optional[Number] = None) -> "FracSeries":
        exponent = Fraction(exponent)
        grid = exponent.denominator
        return cls({exponent.numerator: coeff}, grid, trunc)

    @classmethod
    def from_terms(cls, terms: Mapping[Number, Number],
                   trunc: Optional[Number] = None) -> "FracSeries":
        """Build from a mapping exponent -> coefficient."""
        grid = 1
        for e in terms:
            grid = _lcm(grid, Fraction(e).denominator)
        return cls({int(Fraction(e) * grid): c for e, c in terms.items()}, grid, trunc)

    @classmethod
    def polynomial(cls, coeffs: List[Number], grid: int = 1,
                   trunc: Optional[Number] = None) -> "FracSeries":
        return cls(dict(enumerate(coeffs)), grid, trunc)

    # Inspection

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    def is_zero(self) -> bool:
        return not self.coeffs

    def exponent(self, j: int) -> Fraction:
        return Fraction(j, self.grid)

    def terms(self) -> Iterator[Tuple[Fraction, Fraction]]:
        for j in sorted(self.coeffs):
            yield Fraction(j, self.grid), self.coeffs[j]

    def coefficient(self, exponent: Number) -> Fraction:
        exponent = Fraction(exponent)
        if self.trunc is not None and exponent >= self.trunc:
            raise SeriesError(f"coefficient of q^{exponent} lies beyond truncation {self.trunc}")
        scaled = exponent * self.grid
        if scaled.denominator != 1:
            return Fraction(0)
        return self.coeffs.get(scaled.numerator, Fraction(0))

    def valuation(self) -> Optional[Fraction]:
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.grid)

    def effective_valuation(self) -> Optional[Fraction]:
        """Lowest exponent that may be nonzero; None for an exact zero."""
        v = self.valuation()
        return v if v is not None else self.trunc

    def lead(self) -> Tuple[Fraction, Fraction]:
        if not self.coeffs:
            raise SeriesError("leading term of a zero series")
        j = min(self.coeffs)
        return Fraction(j, self.grid), self.coeffs[j]

    def constant_term(self) -> Fraction:
        return self.coeffs.get(0, Fraction(0))

    def has_negative_powers(self) -> bool:
        return any(j < 0 for j in self.coeffs)

    # Grid and truncation

    def on_grid(self, grid: int) -> "FracSeries":
        if grid == self.grid:
            return self
        if grid % self.grid:
            raise SeriesError(f"grid {grid} does not refine grid {self.grid}")
        factor = grid // self.grid
        return FracSeries({j * factor: c for j, c in self.coeffs.items()}, grid, self.trunc)

    def reduced(self) -> "FracSeries":
        """Same series on the coarsest grid that carries all stored indices."""
        g = self.grid
        for j in self.coeffs:
            g = gcd(g, j)
            if g == 1:
                break
        if g <= 1:
            return self
        return FracSeries({j // g: c for j, c in self.coeffs.items()}, self.grid // g, self.trunc)

    def truncate(self, order: Optional[Number]) -> "FracSeries":
        if order is None:
            return self
        return FracSeries(self.coeffs, self.grid, _min_order(self.trunc, Fraction(order)))

    def shift(self, exponent: Number) -> "FracSeries":
        """Multiply by q^exponent."""
        exponent = Fraction(exponent)
        grid = _lcm(self.grid, exponent.denominator)
        base = self.on_grid(grid)
        offset = int(exponent * grid)
        trunc = None if self.trunc is None else self.trunc + exponent
        return FracSeries({j + offset: c for j, c in base.coeffs.items()}, grid, trunc)

    # Arithmetic

    def __neg__(self) -> "FracSeries":
        return FracSeries({j: -c for j, c in self.coeffs.items()}, self.grid, self.trunc)

    def __add__(self, other) -> "FracSeries":
        if not isinstance(other, FracSeries):
            other = FracSeries.one() * Fraction(other)
        grid = _lcm(self.grid, other.grid)
        a, b = self.on_grid(grid), other.on_grid(grid)
        coeffs = dict(a.coeffs)
        for j, c in b.coeffs.items():
            coeffs[j] = coeffs.get(j, 0) + c
        return FracSeries(coeffs, grid, _min_order(a.trunc, b.trunc))

    __radd__ = __add__

    def __sub__(self, other) -> "FracSeries":
        if not isinstance(other, FracSeries):
            other = FracSeries.one() * Fraction(other)
        return self + (-other)

    def __rsub__(self, other) -> "FracSeries":
        return (-self) + other

    def __mul__(self, other) -> "FracSeries":
        if isinstance(other, FracSeries):
            return series_mul(self, other)
        scalar = Fraction(other)
        if scalar == 0:
            return FracSeries.zero()
        return FracSeries({j: c * scalar for j, c in self.coeffs.items()}, self.grid, self.trunc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "FracSeries":
        if isinstance(other, FracSeries):
            return series_mul(self, series_pow(other, -1, self.trunc))
        return self * (1 / Fraction(other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FracSeries):
            return NotImplemented
        grid = _lcm(self.grid, other.grid)
        return (self.trunc == other.trunc
                and self.on_grid(grid).coeffs == other.on_grid(grid).coeffs)

    __hash__ = None

    def first_difference(self, other: "FracSeries",
                         order: Optional[Number] = None) -> Optional[Fraction]:
        """Lowest exponent below the common truncation where the two series differ."""
        bound = _min_order(self.trunc, other.trunc, None if order is None else Fraction(order))
        grid = _lcm(self.grid, other.grid)
        a, b = self.on_grid(grid), other.on_grid(grid)
        indices = sorted(set(a.coeffs) | set(b.coeffs))
        for j in indices:
            e = Fraction(j, grid)
            if bound is not None and e >= bound:
                break
            if a.coeffs.get(j, 0) != b.coeffs.get(j, 0):
                return e
        return None

    def agrees_with(self, other: "FracSeries", order: Optional[Number] = None) -> bool:
        return self.first_difference(other, order) is None

    def __repr__(self) -> str:
        body = " + ".join(f"({c})q^{e}" for e, c in list(self.terms())[:8])
        tail = " + ..." if len(self.coeffs) > 8 else ""
        trunc = "" if self.trunc is None else f" + O(q^{self.trunc})"
        return f"FracSeries({body or '0'}{tail}{trunc})"

    # Canonical text

    def to_text(self) -> str:
        lines = [f"# grid {self.grid}",
                 f"# trunc {'exact' if self.trunc is None else self.trunc}"]
        for j in sorted(self.coeffs):
            c = self.coeffs[j]
            lines.append(f"{j}/{self.grid}\t{c.numerator}/{c.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FracSeries":
        grid, trunc = 1, None
        coeffs: Dict[int, Fraction] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(" ")
                if key == "grid":
                    grid = int(value)
                elif key == "trunc":
                    trunc = None if value == "exact" else Fraction(value)
                continue
            exponent, coeff = line.split("\t")
            j, g = exponent.split("/")
            if int(g) != grid:
                raise SeriesError(f"term {exponent} does not match grid {grid}")
            coeffs[int(j)] = Fraction(coeff)
        return cls(coeffs, grid, trunc)


def series_mul(a: FracSeries, b: FracSeries, order: Optional[Number] = None) -> FracSeries:
    """Exact product; truncation min(Ta + vb, Tb + va)."""
    if (a.is_zero() and a.is_exact) or (b.is_zero() and b.is_exact):
        return FracSeries.zero()
    grid = _lcm(a.grid, b.grid)
    a, b = a.on_grid(grid), b.on_grid(grid)
    trunc = None
    if a.trunc is not None:
        trunc = a.trunc + b.effective_valuation()
    if b.trunc is not None:
        trunc = _min_order(trunc, b.trunc + a.effective_valuation())
    if order is not None:
        trunc = _min_order(trunc, Fraction(order))
    bound = None if trunc is None else _index_bound(trunc, grid)
    b_items = sorted(b.coeffs.items())
    out: Dict[int, Fraction] = {}
    for ja, ca in a.coeffs.items():
        for jb, cb in b_items:
            j = ja + jb
            if bound is not None and j >= bound:
                break
            out[j] = out.get(j, 0) + ca * cb
    return FracSeries(out, grid, trunc)


def _require_order(s: FracSeries, order: Optional[Number], what: str) -> Fraction:
    trunc = _min_order(s.trunc, None if order is None else Fraction(order))
    if trunc is None:
        raise SeriesError(f"{what} of an exact series needs an explicit order")
    return trunc


def series_log(a: FracSeries, order: Optional[Number] = None) -> FracSeries:
    """ln a for a series with constant term 1."""
    if a.has_negative_powers():
        raise SeriesError("log of a series with negative powers")
    if a.constant_term() != 1:
        raise SeriesError(f"log needs constant term 1, got {a.constant_term()}")
    if a.is_exact and len(a.coeffs) == 1:
        return FracSeries.zero(None if order is None else Fraction(order))
    trunc = _require_order(a, order, "log")
    n = _index_bound(trunc, a.grid)
    nonzero = sorted(j for j in a.coeffs if 0 < j < n)
    b = [Fraction(0)] * max(n, 1)
    for j in range(1, n):
        acc = j * a.coeffs.get(j, 0)
        for k in nonzero:
            if k >= j:
                break
            bi = b[j - k]
            if bi:
                acc -= (j - k) * bi * a.coeffs[k]
        b[j] = acc / j
    return FracSeries({j: b[j] for j in range(1, n)}, a.grid, trunc)


def series_exp(a: FracSeries, order: Optional[Number] = None) -> FracSeries:
    """exp a for a series with zero constant term."""
    if a.has_negative_powers():
        raise SeriesError("exp of a series with negative powers")
    if a.constant_term() != 0:
        raise SeriesError(f"exp needs zero constant term, got {a.constant_term()}")
    if a.is_zero() and a.is_exact:
        return FracSeries.one(None if order is None else Fraction(order))
    trunc = _require_order(a, order, "exp")
    n = _index_bound(trunc, a.grid)
    nonzero = sorted(j for j in a.coeffs if 0 < j < n)
    b = [Fraction(0)] * max(n, 1)
    b[0] = Fraction(1)
    for j in range(1, n):
        acc = Fraction(0)
        for k in nonzero:
            if k > j:
                break
            bj = b[j - k]
            if bj:
                acc += k * a.coeffs[k] * bj
        b[j] = acc / j
    return FracSeries(dict(enumerate(b[:n])), a.grid, trunc)


def series_pow(a: FracSeries, e: Number, order: Optional[Number] = None) -> FracSeries:
    """a**e; fractional powers need an exact rational root of the leading coefficient."""
    e = Fraction(e)
    if a.is_zero():
        raise SeriesError("power of a zero series")
    if e == 0:
        return FracSeries.one(None if order is None else Fraction(order))
    if e.denominator == 1 and e > 0:
        result, base, n = FracSeries.one(), a, e.numerator
        while n:
            if n & 1:
                result = series_mul(result, base, order)
            n >>= 1
            if n:
                base = series_mul(base, base, order)
        return result
    p, c = a.lead()
    shift = p * e
    lead = rational_power(c, e)
    grid = _lcm(a.grid, shift.denominator)
    _check_grid(grid)
    unit = a.shift(-p) * (1 / c)
    rel = unit.trunc
    if order is not None:
        rel = _min_order(rel, Fraction(order) - shift)
    if rel is None:
        raise SeriesError("negative or fractional power of an exact series needs an explicit order")
    if rel <= 0:
        return FracSeries.zero(shift + max(rel, Fraction(0)))
    body = series_exp(series_log(unit, rel) * e, rel)
    return body.shift(shift) * lead


def series_inverse(a: FracSeries, order: Optional[Number] = None) -> FracSeries:
    return series_pow(a, -1, order)


def series_substitute(outer: FracSeries, inner: FracSeries,
                      order: Optional[Number] = None) -> FracSeries:
    """outer(inner(q)); inner must start at a positive power of q."""
    p = inner.valuation()
    if p is None or p <= 0:
        raise SeriesError("substitution needs an inner series with positive leading exponent")
    if outer.has_negative_powers():
        raise SeriesError("substitution into an outer series with negative powers")
    trunc = None if outer.trunc is None else outer.trunc * p
    if inner.trunc is not None:
        positive = [Fraction(j, outer.grid) for j in outer.coeffs if j > 0]
        if positive:
            trunc = _min_order(trunc, min(positive) * p + inner.trunc - p)
        elif outer.trunc is not None:
            trunc = _min_order(trunc, outer.trunc * p)
    if order is not None:
        trunc = _min_order(trunc, Fraction(order))
    if outer.grid == 1:
        step = inner if trunc is None else inner.truncate(trunc)
    else:
        if trunc is None:
            raise SeriesError("fractional-grid substitution of exact series needs an explicit order")
        step = series_pow(inner, Fraction(1, outer.grid), trunc)
    result = FracSeries({0: outer.constant_term()}, 1, trunc)
    if trunc is None:
        top = max(outer.coeffs) if outer.coeffs else 0
    else:
        top = _index_bound(trunc / p * outer.grid, 1) - 1
        if outer.trunc is not None:
            top = min(top, _index_bound(outer.trunc, outer.grid) - 1)
    power = FracSeries.one()
    for j in range(1, top + 1):
        power = series_mul(power, step, trunc)
        c = outer.coeffs.get(j)
        if c:
            result = result + power * c
    return result if trunc is None else result.truncate(trunc)


def series_revert(s: FracSeries, order: int) -> FracSeries:
    """Compositional inverse t(y) with s(t(y)) = y, for s = c1*y + O(y^2) on the integer grid."""
    if s.grid != 1 or s.valuation() != 1:
        raise SeriesError("reversion needs an integer-grid series starting at the first power")
    c1 = s.coefficient(1)
    y = FracSeries.monomial(1, 1, order)
    nonlinear = s - FracSeries.monomial(1, c1)
    t = y * (1 / c1)
    for _ in range(order):
        t = (y - series_substitute(nonlinear, t, order)) * (1 / c1)
    return t.truncate(order)


def euler_log(alpha: Callable[[int], Fraction], grid: int, order: Number) -> FracSeries:
    """ln prod_{j>=1} (1 - q^{j/grid})^{alpha(j)} through q^order (exclusive)."""
    n = _index_bound(Fraction(order), grid)
    coeffs: Dict[int, Fraction] = {}
    for j in range(1, n):
        a = Fraction(alpha(j))
        if not a:
            continue
        for m in range(1, (n - 1) // j + 1):
            coeffs[j * m] = coeffs.get(j * m, 0) - a / m
    return FracSeries(coeffs, grid, Fraction(order))


def euler_product(alpha: Callable[[int], Fraction], grid: int, order: Number) -> FracSeries:
    return series_exp(euler_log(alpha, grid, order))


class LogConstant:
    """
    Exact logarithm of an algebraic constant, ln c = sum_b e_b ln b.

    Bases are integers >= 2 (primes after factorisation) plus -1 for the phase.
    Exponents stay unreduced so FLM combinations keep track of the phase.
    """

    __slots__ = ("exponents",)

    def __init__(self, exponents: Optional[Mapping[int, Number]] = None):
        self.exponents: Dict[int, Fraction] = {
            int(b): Fraction(e) for b, e in (exponents or {}).items() if Fraction(e) != 0}

    @staticmethod
    def _factor(n: int) -> Dict[int, int]:
        out: Dict[int, int] = {}
        p = 2
        while p * p <= n:
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
            p += 1
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out

    @classmethod
    def from_rational(cls, value: Number) -> "LogConstant":
        value = Fraction(value)
        if value == 0:
            raise SeriesError("logarithm of zero")
        exps: Dict[int, Fraction] = {}
        if value < 0:
            exps[-1] = Fraction(1)
        for p, k in cls._factor(abs(value.numerator)).items():
            exps[p] = exps.get(p, 0) + k
        for p, k in cls._factor(value.denominator).items():
            exps[p] = exps.get(p, 0) - k
        return cls(exps)

    def __add__(self, other: "LogConstant") -> "LogConstant":
        exps = dict(self.exponents)
        for b, e in other.exponents.items():
            exps[b] = exps.get(b, 0) + e
        return LogConstant(exps)

    def __neg__(self) -> "LogConstant":
        return LogConstant({b: -e for b, e in self.exponents.items()})

    def __sub__(self, other: "LogConstant") -> "LogConstant":
        return self + (-other)

    def scale(self, factor: Number) -> "LogConstant":
        factor = Fraction(factor)
        return LogConstant({b: e * factor for b, e in self.exponents.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogConstant):
            return NotImplemented
        return self.exponents == other.exponents

    __hash__ = None

    @property
    def phase(self) -> Fraction:
        """Exponent of -1, i.e. the phase in units of pi."""
        return self.exponents.get(-1, Fraction(0))

    def modulus(self) -> "LogConstant":
        return LogConstant({b: e for b, e in self.exponents.items() if b != -1})

    def equivalent_to(self, other: "LogConstant") -> bool:
        """Equal as complex numbers: moduli agree and phases differ by a multiple of 2."""
        diff = self.phase - other.phase
        return self.modulus() == other.modulus() and diff.denominator == 1 and diff.numerator % 2 == 0

    def to_rational(self) -> Fraction:
        value = Fraction(1)
        for b, e in self.exponents.items():
            if e.denominator != 1:
                raise SeriesError(f"constant {self} is not rational")
            value *= Fraction(b) ** e.numerator
        return value

    def log_value(self):
        """ln c as an mpmath number (complex when a phase is present)."""
        total = mpmath.mpf(0)
        for b, e in self.exponents.items():
            if b == -1:
                total = total + mpmath.mpc(0, mpmath.pi) * mpmath.mpf(e.numerator) / e.denominator
            else:
                total = total + mpmath.log(b) * mpmath.mpf(e.numerator) / e.denominator
        return total

    def to_text(self) -> str:
        if not self.exponents:
            return "1"
        return " ".join(f"{b}^{e}" for b, e in sorted(self.exponents.items()))

    @classmethod
    def from_text(cls, text: str) -> "LogConstant":
        text = text.strip()
        if text in ("", "1"):
            return cls()
        exps = {}
        for token in text.split():
            b, e = token.split("^")
            exps[int(b)] = Fraction(e)
        return cls(exps)

    def __repr__(self) -> str:
        return f"LogConstant({self.to_text()})"


@dataclass(frozen=True)
class LogPartition:
    """ln Z = q_power*ln q + ln c + series, with series free of a constant term."""

    q_power: Fraction = Fraction(0)
    constant: LogConstant = field(default_factory=LogConstant)
    series: FracSeries = field(default_factory=FracSeries.zero)

    def __post_init__(self):
        if self.series.constant_term() != 0:
            raise SeriesError("log-partition series must have zero constant term")
        if self.series.has_negative_powers():
            raise SeriesError("log-partition series must not carry negative powers")

    @classmethod
    def zero(cls, trunc: Optional[Number] = None) -> "LogPartition":
        return cls(Fraction(0), LogConstant(), FracSeries.zero(trunc))

    @classmethod
    def from_series(cls, s: FracSeries, order: Optional[Number] = None) -> "LogPartition":
        """ln s for a series with a nonzero leading term c*q^p."""
        p, c = s.lead()
        unit = s.shift(-p) * (1 / c)
        rel = None if order is None else Fraction(order)
        return cls(p, LogConstant.from_rational(c), series_log(unit, rel))

    @property
    def trunc(self) -> Optional[Fraction]:
        return self.series.trunc

    def __add__(self, other: "LogPartition") -> "LogPartition":
        return LogPartition(self.q_power + other.q_power, self.constant + other.constant,
                            self.series + other.series)

    def __neg__(self) -> "LogPartition":
        return LogPartition(-self.q_power, -self.constant, -self.series)

    def __sub__(self, other: "LogPartition") -> "LogPartition":
        return self + (-other)

    def scale(self, factor: Number) -> "LogPartition":
        factor = Fraction(factor)
        if factor == 0:
            return LogPartition.zero(self.trunc)
        return LogPartition(self.q_power * factor, self.constant.scale(factor), self.series * factor)

    def __mul__(self, factor: Number) -> "LogPartition":
        return self.scale(factor)

    __rmul__ = __mul__

    def truncate(self, order: Optional[Number]) -> "LogPartition":
        return LogPartition(self.q_power, self.constant, self.series.truncate(order))

    def first_difference(self, other: "LogPartition",
                         order: Optional[Number] = None,
                         modulo_phase: bool = True) -> Optional[Fraction]:
        """
        Lowest q-exponent at which the two free energies differ.

        A mismatch in the ln q coefficient or the constant is reported at exponent 0.
        """
        same_constant = (self.constant.equivalent_to(other.constant) if modulo_phase
                         else self.constant == other.constant)
        if self.q_power != other.q_power or not same_constant:
            return Fraction(0)
        return self.series.first_difference(other.series, order)

    def agrees_with(self, other: "LogPartition", order: Optional[Number] = None) -> bool:
        return self.first_difference(other, order) is None

    def exp_series(self, order: Optional[Number] = None) -> FracSeries:
        """c*q^p*exp(series) as a truncated series; needs a rational constant."""
        c = self.constant.to_rational()
        rel = None if order is None else Fraction(order) - self.q_power
        return series_exp(self.series, rel).shift(self.q_power) * c

    def to_text(self) -> str:
        return (f"# q_power {self.q_power}\n# constant {self.constant.to_text()}\n"
                + self.series.to_text())

    @classmethod
    def from_text(cls, text: str) -> "LogPartition":
        q_power, constant = Fraction(0), LogConstant()
        body = []
        for line in text.splitlines():
            if line.startswith("# q_power "):
                q_power = Fraction(line[len("# q_power "):].strip())
            elif line.startswith("# constant "):
                constant = LogConstant.from_text(line[len("# constant "):])
            else:
                body.append(line)
        return cls(q_power, constant, FracSeries.from_text("\n".join(body)))
