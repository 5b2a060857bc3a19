import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Mapping, Optional, Tuple

from cachetools import LRUCache, cached

from ..errors import InvalidConfigError, SeriesError
from ..models import LatticeSpec, ModelKind, ModelSpec
from .series_service import (
    FracSeries,
    LogConstant,
    LogPartition,
    euler_log,
    series_exp,
    series_log,
    series_mul,
    series_pow,
    series_substitute,
)

logger = logging.getLogger(__name__)

# (s-exponent, number of clusters touching a marked side) -> integer weight
RawPartition = Dict[Tuple[int, int], int]


@dataclass(frozen=True)
class ModelCouplings:
    """Static description of how a model's partition function is written in its base variable s."""

    variable: str
    # Z is c * s^e0 * P(y) with P a polynomial in y = s^step
    step: int
    # s = q^rho * S(q)
    rho: Fraction
    # Potts couplings as Laurent polynomials in s
    potts_q: Optional[Mapping[int, int]] = None
    potts_v: Optional[Mapping[int, int]] = None
    # leading exponent of y(q), used to convert guaranteed orders to q-units
    y_valuation: Fraction = Fraction(1)


COUPLINGS: Dict[ModelKind, ModelCouplings] = {
    ModelKind.SQ_SELFDUAL: ModelCouplings("x", 1, Fraction(1), {-2: 1}, {-1: 1}, Fraction(1)),
    ModelKind.SQ_AF: ModelCouplings("q", 1, Fraction(1), {-2: -1, 0: 2, 2: -1}, {-1: 1, 0: -2, 1: 1},
                                    Fraction(1)),
    ModelKind.TRI_SELFDUAL: ModelCouplings("t", 1, Fraction(2, 3), {-3: 1, 0: 2, 3: 1}, {-1: 1, 0: -1, 1: 1},
                                           Fraction(2, 3)),
    ModelKind.TRI_CHROMATIC: ModelCouplings("x", 1, Fraction(1), {-1: -1, 0: 2, 1: -1}, {0: -1}, Fraction(1)),
    ModelKind.FPL2: ModelCouplings("u", 2, Fraction(1), y_valuation=Fraction(2)),
    ModelKind.ISING_SQ: ModelCouplings("x", 2, Fraction(1, 4), y_valuation=Fraction(1, 2)),
    ModelKind.ISING_TRI: ModelCouplings("x", 2, Fraction(1, 6), y_valuation=Fraction(1, 3)),
}


def ising_square_alpha(j: int) -> int:
    r = j % 8
    return 1 if r in (1, 7) else -1 if r in (3, 5) else 0


def ising_triangular_alpha(j: int) -> int:
    r = j % 24
    return 1 if r in (4, 20) else -1 if r in (8, 16) else 0


@dataclass(frozen=True)
class ParamMap:
    """Exact q-parameterisation of one model, every series truncated at ``order``."""

    model: ModelKind
    order: Fraction
    couplings: ModelCouplings
    # ln S(q), where s = q^rho * S(q)
    log_unit: FracSeries
    # y(q), the variable P is a polynomial in
    y_of_q: FracSeries
    potts_q: Optional[FracSeries] = None
    v: Optional[FracSeries] = None
    sqrt_q: Optional[FracSeries] = None
    n: Optional[FracSeries] = None
    x_of_q: Optional[FracSeries] = None
    extras: Dict[str, FracSeries] = field(default_factory=dict)

    @property
    def grid(self) -> int:
        return self.y_of_q.grid


@dataclass(frozen=True)
class NormalizedZ:
    """Z = constant * s^lead_exponent * poly(y), with poly(0) = 1."""

    model: ModelSpec
    lattice: LatticeSpec
    poly: FracSeries
    lead_exponent: int
    constant: LogConstant

    def __post_init__(self):
        if self.poly.constant_term() != 1:
            raise SeriesError(f"normalized partition polynomial must start at 1, got {self.poly.constant_term()}")

    @property
    def key(self) -> Tuple[str, str]:
        return self.model.id, self.lattice.id

    def to_text(self) -> str:
        return (f"# model {self.model.id}\n# lattice {self.lattice.id}\n"
                f"# lead_exponent {self.lead_exponent}\n# constant {self.constant.to_text()}\n"
                + self.poly.to_text())

    @classmethod
    def from_text(cls, text: str, model: ModelSpec, lattice: LatticeSpec) -> "NormalizedZ":
        lead, constant = 0, LogConstant()
        body = []
        for line in text.splitlines():
            if line.startswith("# lead_exponent "):
                lead = int(line.split()[-1])
            elif line.startswith("# constant "):
                constant = LogConstant.from_text(line[len("# constant "):])
            elif line.startswith("# model ") or line.startswith("# lattice "):
                continue
            else:
                body.append(line)
        return cls(model, lattice, FracSeries.from_text("\n".join(body)), lead, constant)


class ParameterizationService:

    def couplings(self, kind: ModelKind) -> ModelCouplings:
        return COUPLINGS[ModelKind(kind)]

    def build_parameterization(self, kind: ModelKind, order) -> ParamMap:
        """All couplings of a model as exact q-series truncated at ``order``."""
        order = Fraction(order)
        if order <= 0:
            raise InvalidConfigError(f"parameterisation order must be positive, got {order}")
        return _build_parameterization(ModelKind(kind), order)

    def n1(self, r: int, order) -> FracSeries:
        """Boundary loop weight n1(r) = q^{-1}(1 - q^{2r+2})/(1 - q^{2r}) as a q-series."""
        if r < 1:
            raise InvalidConfigError("n1 is infinite at r=0; use the top-layer projection")
        num = FracSeries({-1: 1, 2 * r + 1: -1})
        den = FracSeries({0: 1, 2 * r: -1})
        return series_mul(num, series_pow(den, -1, Fraction(order) + 1), Fraction(order))

    def js_polynomial(self, r: int) -> FracSeries:
        """A_r(x) = sum_k (-1)^k C(r-k, k) x^{2k}; n1/n = A_r/A_{r-1} in x = 1/n."""
        if r < 0:
            return FracSeries.zero()
        return FracSeries({2 * k: (-1) ** k * comb(r - k, k) for k in range(r // 2 + 1)})

    def js_ratio(self, r: int, order) -> FracSeries:
        """n1/n as a power series in x = 1/n with constant term 1."""
        if r < 1:
            raise InvalidConfigError("n1/n diverges at r=0")
        return series_mul(self.js_polynomial(r), series_pow(self.js_polynomial(r - 1), -1, order), order)

    def normalize(self, model: ModelSpec, lattice: LatticeSpec, raw: RawPartition,
                  marked_sites: int = 0, order: Optional[int] = None,
                  truncation: Optional[int] = None) -> NormalizedZ:
        """
        Build the ground-state normalised partition polynomial from a raw layered sum.

        ``raw`` maps (s-exponent, flagged cluster count) to integer weights. For JS
        boundaries the layers are recombined with (n1/n)^(d - marked_sites); at r=0
        only the top layer d = marked_sites survives. ``order`` bounds the x-series
        when the recombination is not polynomial; ``truncation`` marks raw sums that
        were cut off in y (the Ising spin transfer).
        """
        couplings = self.couplings(model.kind)
        r = model.boundary.r
        layers: Dict[int, Dict[int, int]] = {}
        for (e, d), w in raw.items():
            if w:
                layers.setdefault(d, {})
                layers[d][e] = layers[d].get(e, 0) + w
        if not layers:
            raise SeriesError(f"empty partition function for {model.id} on {lattice.id}")

        if model.boundary.is_free or r == 1:
            merged: Dict[int, int] = {}
            for layer in layers.values():
                for e, w in layer.items():
                    merged[e] = merged.get(e, 0) + w
            return self._normalize_polynomial(model, lattice, merged, couplings, truncation)

        if r == 0:
            top = layers.get(marked_sites)
            if not top:
                raise SeriesError(f"top boundary layer missing for {model.id} on {lattice.id}")
            return self._normalize_polynomial(model, lattice, top, couplings, truncation)

        # general r: sum_d poly_d * R^(d - B), R = n1/n in powers of x
        if order is None:
            raise SeriesError("JS recombination with r >= 2 needs an explicit order")
        e0 = min(e for layer in layers.values() for e in layer)
        inverse_ratio = series_pow(self.js_ratio(r, order), -1, order)
        total = FracSeries.zero(order)
        for d, layer in sorted(layers.items()):
            poly = FracSeries({e - e0: w for e, w in layer.items()})
            total = total + series_mul(poly, series_pow(inverse_ratio, marked_sites - d, order), order)
        p, c = total.lead()
        if p != 0:
            raise SeriesError(f"JS ground state cancelled on {lattice.id}")
        poly = total * (1 / c)
        return NormalizedZ(model, lattice, poly, e0, self._ground_constant(model, lattice, c, couplings))

    def _normalize_polynomial(self, model: ModelSpec, lattice: LatticeSpec, coeffs: Mapping[int, int],
                              couplings: ModelCouplings, truncation: Optional[int] = None) -> NormalizedZ:
        e0 = min(e for e, w in coeffs.items() if w)
        c = coeffs[e0]
        step = couplings.step
        body = {}
        for e, w in coeffs.items():
            if not w:
                continue
            if (e - e0) % step:
                raise SeriesError(f"{model.id}: exponent {e} off the y = s^{step} lattice")
            body[(e - e0) // step] = Fraction(w, c)
        constant = self._ground_constant(model, lattice, Fraction(c), couplings)
        return NormalizedZ(model, lattice, FracSeries(body, 1, truncation), e0, constant)

    @staticmethod
    def _ground_constant(model: ModelSpec, lattice: LatticeSpec, c: Fraction,
                         couplings: ModelCouplings) -> LogConstant:
        # Potts: the unique ground state weighs (lead of Q)^V; keep (-1)^V unreduced
        if couplings.potts_q is not None:
            qmin = min(couplings.potts_q)
            lead = couplings.potts_q[qmin]
            sites = lattice_site_count(lattice)
            if lead ** sites == c:
                return LogConstant.from_rational(lead).scale(sites)
        return LogConstant.from_rational(c)

    def to_log_partition(self, nz: NormalizedZ, order) -> LogPartition:
        """ln Z = ln c + e0 (rho ln q + ln S(q)) + ln P(y(q)), exact through q^order."""
        order = Fraction(order)
        pm = self.build_parameterization(nz.model.kind, order)
        e0 = nz.lead_exponent
        body = series_substitute(nz.poly, pm.y_of_q, order)
        series = pm.log_unit * e0 + series_log(body, order)
        return LogPartition(e0 * pm.couplings.rho, nz.constant, series.truncate(order))

    def q_order(self, kind: ModelKind, y_order) -> Fraction:
        """Convert an exclusive order in the model's small variable to q-units."""
        return Fraction(y_order) * self.couplings(kind).y_valuation


def lattice_site_count(lattice: LatticeSpec) -> int:
    if lattice.is_triangle:
        return lattice.m * (lattice.m + 1) // 2
    return lattice.m * lattice.n


_param_cache: LRUCache = LRUCache(maxsize=64)


@cached(_param_cache)
def _build_parameterization(kind: ModelKind, order: Fraction) -> ParamMap:
    couplings = COUPLINGS[kind]
    q = FracSeries.monomial(1)
    one_plus_q2 = FracSeries({0: 1, 2: 1})

    def laurent(coeffs: Mapping[int, int], grid: int = 1) -> FracSeries:
        return FracSeries(dict(coeffs), grid)

    if kind == ModelKind.SQ_SELFDUAL:
        log_unit = -series_log(one_plus_q2, order)
        x = series_mul(q, series_pow(one_plus_q2, -1, order), order)
        n = FracSeries({-1: 1, 1: 1})
        return ParamMap(kind, order, couplings, log_unit, x,
                        potts_q=n * n, v=n, sqrt_q=n, n=n, x_of_q=x)

    if kind == ModelKind.SQ_AF:
        return ParamMap(kind, order, couplings, FracSeries.zero(order), q.truncate(order),
                        potts_q=laurent(couplings.potts_q), v=laurent(couplings.potts_v))

    if kind == ModelKind.TRI_SELFDUAL:
        t = FracSeries.monomial(Fraction(2, 3))
        return ParamMap(kind, order, couplings, FracSeries.zero(order), t.truncate(order),
                        potts_q=FracSeries({-6: 1, 0: 2, 6: 1}, 3),
                        v=FracSeries({-2: 1, 0: -1, 2: 1}, 3),
                        sqrt_q=FracSeries({-1: 1, 1: 1}),
                        extras={"t": t})

    if kind == ModelKind.TRI_CHROMATIC:
        return ParamMap(kind, order, couplings, FracSeries.zero(order), q.truncate(order),
                        potts_q=laurent(couplings.potts_q), v=laurent(couplings.potts_v),
                        x_of_q=q)

    if kind == ModelKind.FPL2:
        log_unit = -series_log(one_plus_q2, order)
        u = series_mul(q, series_pow(one_plus_q2, -1, order), order)
        y = series_mul(u, u, order)
        return ParamMap(kind, order, couplings, log_unit, y, n=FracSeries({-1: 1, 1: 1}),
                        extras={"u": u})

    if kind in (ModelKind.ISING_SQ, ModelKind.ISING_TRI):
        if kind == ModelKind.ISING_SQ:
            grid, lead, alpha = 1, Fraction(1, 2), ising_square_alpha
        else:
            grid, lead, alpha = 3, Fraction(1, 3), ising_triangular_alpha
        log_w_unit = euler_log(alpha, grid, order)
        w = series_exp(log_w_unit).shift(lead).truncate(order)
        x = series_pow(w, Fraction(1, 2), order)
        return ParamMap(kind, order, couplings, log_w_unit * Fraction(1, 2), w,
                        x_of_q=x, extras={"x2": w})

    raise InvalidConfigError(f"no parameterisation for {kind}")


parameterization_service = ParameterizationService()
