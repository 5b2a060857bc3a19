import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import mpmath

from ..config import settings
from ..errors import InvalidConfigError
from ..models import CornerAngle, Geometry, ModelKind, Target
from .productize_service import Prefactor, ProductForm, SimpleFactor, productize_service
from .series_service import LogConstant, LogPartition

logger = logging.getLogger(__name__)

F = Fraction


def _fam(A, c, nu, mu=0, k_min: int = 1, k_max: Optional[int] = None) -> Tuple:
    """prod_{k=k_min}^{k_max} (1 - q^{A k - c})^{mu k + nu}."""
    return (F(A), F(c), F(mu), F(nu), k_min, k_max)


def _pre(constant=1, q_power=0, minus: Optional[Mapping] = None,
         plus: Optional[Mapping] = None) -> Prefactor:
    factors = [SimpleFactor(-1, F(e), F(p)) for e, p in (minus or {}).items()]
    factors += [SimpleFactor(1, F(e), F(p)) for e, p in (plus or {}).items()]
    return Prefactor(LogConstant.from_rational(constant), F(q_power), tuple(factors))


def _form(*families, prefactor: Optional[Prefactor] = None) -> ProductForm:
    return ProductForm.from_families(families, prefactor)


def _raw(terms: Mapping, constant=1) -> ProductForm:
    """A finite list of (1 - q^e)^p factors."""
    return _form(prefactor=_pre(constant, minus={F(e): p for e, p in terms.items()}))


@dataclass(frozen=True)
class CatalogEntry:
    """A quoted product formula for e^{f}; valid_order None means conjectured to all orders."""

    model: ModelKind
    target: Target
    geometry: Geometry
    form: ProductForm
    valid_order: Optional[Fraction] = None
    variable: str = "q"
    angle: Optional[CornerAngle] = None
    note: str = ""

    def log_partition(self, order) -> LogPartition:
        if self.valid_order is not None and F(order) > self.valid_order:
            raise InvalidConfigError(
                f"{self.model.value} {self.target.value} is only known through {self.valid_order}")
        return productize_service.product_log(self.form, order)


@dataclass(frozen=True)
class ClosedForm:
    """A closed-form q -> 1 constant; ``reproduced`` is False when it disagrees with its own product."""

    key: str
    expression: str
    evaluate: Callable[[], object]
    reproduced: bool = True
    note: str = ""

    def value(self):
        with mpmath.workdps(settings.precision_digits):
            return self.evaluate()


def x2_form(kind: ModelKind) -> ProductForm:
    """The Ising variable x^2 as a product in q."""
    if kind == ModelKind.ISING_SQ:
        return _form(_fam(8, 7, 1), _fam(8, 1, 1), _fam(8, 5, -1), _fam(8, 3, -1),
                     prefactor=_pre(q_power=F(1, 2)))
    if kind == ModelKind.ISING_TRI:
        return _form(_fam(8, F(20, 3), 1), _fam(8, F(4, 3), 1), _fam(8, F(16, 3), -1), _fam(8, F(8, 3), -1),
                     prefactor=_pre(q_power=F(1, 3)))
    raise InvalidConfigError(f"{kind.value} has no x^2 variable")


def _js_x(k_max: Optional[int] = None) -> ProductForm:
    # (1-q^{4k+1})(1-q^{4k+2}) / ((1-q^{4k-1})(1-q^{4k+4}))
    if k_max is not None and k_max < 1:
        return ProductForm.unit()
    return _form(_fam(4, -1, 1, k_max=k_max), _fam(4, -2, 1, k_max=k_max),
                 _fam(4, 1, -1, k_max=k_max), _fam(4, -4, -1, k_max=k_max))


TRI_RECT_CORNER_RAW = {
    F(4, 3): -1, 2: -1, F(8, 3): 1, F(10, 3): -1, 4: -2, F(14, 3): -1, F(16, 3): -5, 6: 5,
    F(20, 3): -9, F(22, 3): 9, 8: -8, F(26, 3): 9, F(28, 3): -15, 10: 15, F(32, 3): -11,
    F(34, 3): 13, 12: -22, F(38, 3): 19, F(40, 3): -17, 14: 19, F(44, 3): -29,
}

ISING_TRI_SURFACE_RAW = {
    F(4, 3): -2, F(8, 3): 4, F(10, 3): 2, F(14, 3): -4, F(16, 3): -4, F(20, 3): 2, F(22, 3): 6,
    F(26, 3): -6, F(28, 3): -6, F(32, 3): 12, F(34, 3): 8, F(38, 3): -10, F(40, 3): -12,
    F(44, 3): 6, F(46, 3): 12,
}

ISING_TRI_RECT_CORNER_RAW = {
    F(2, 3): -2, 1: -2, F(4, 3): 4, F(5, 3): -4, 2: 6, F(7, 3): -4, F(8, 3): 4, 3: -2,
    F(10, 3): 3, 4: -3, F(14, 3): -1, 5: -2, F(16, 3): -4, F(17, 3): -4, 6: 4, F(19, 3): -4,
    F(20, 3): 10, 7: -2, F(22, 3): 6, 8: -2, F(26, 3): -10, 9: -2, F(28, 3): 2, F(29, 3): -4,
    10: 8, F(31, 3): -4, F(32, 3): -8, 11: -2, F(34, 3): 7, 12: 1, F(38, 3): -5, 13: -2,
    F(40, 3): -15, F(41, 3): -4, 14: 2, F(43, 3): -4, F(44, 3): 20, 15: -2, F(46, 3): 14, 16: -8,
}

ISING_TRI_TRIANGLE_CORNER_RAW = {
    F(2, 3): -3, F(8, 3): 6, F(10, 3): 3, 4: -1, F(14, 3): -9, F(16, 3): -9, F(20, 3): 9,
    F(22, 3): 9, F(26, 3): -15, F(28, 3): -9, F(32, 3): 21, F(34, 3): 15, 12: -1,
    F(38, 3): -21, F(40, 3): -24,
}

CHROMATIC_RECT_CORNER = {11: -1, 10: 1, 9: 3, 8: 2, 7: 4, 6: -3, 5: 1, 4: -3, 3: 5, 2: 2, 1: 2, 0: 1}
CHROMATIC_TRI_CORNER = {10: 1, 9: 2, 8: 1, 7: 3, 6: -2, 5: 3, 4: -2, 3: 3, 2: 1, 1: 3, 0: 1}

# exponent periods (bulk, surface, corner) in the model's expansion variable
TABLE_PERIODS: Dict[ModelKind, Tuple[int, int, int]] = {
    ModelKind.SQ_SELFDUAL: (4, 8, 8),
    ModelKind.TRI_SELFDUAL: (4, 8, 8),
    ModelKind.SQ_AF: (8, 16, 16),
    ModelKind.TRI_CHROMATIC: (6, 12, 12),
    ModelKind.FPL2: (8, 16, 16),
    ModelKind.ISING_SQ: (8, 8, 8),
}

# C/pi^2 in f ~ C/(1-q) for the full corner term of the named geometry
DIVERGENCE_TARGETS: Dict[Tuple[ModelKind, Geometry], Fraction] = {
    (ModelKind.SQ_SELFDUAL, Geometry.SQUARE_RECTANGLE): F(1, 8),
    (ModelKind.SQ_AF, Geometry.SQUARE_RECTANGLE): F(-1, 16),
    (ModelKind.TRI_SELFDUAL, Geometry.TRIANGULAR_TRIANGLE): F(1, 6),
    (ModelKind.FPL2, Geometry.FPL2_RECTANGLE): F(3, 16),
    (ModelKind.ISING_SQ, Geometry.SQUARE_RECTANGLE): F(1, 16),
    (ModelKind.ISING_TRI, Geometry.TRIANGULAR_TRIANGLE): F(1, 12),
}


def _build_entries() -> Dict[Tuple, CatalogEntry]:
    entries: Dict[Tuple, CatalogEntry] = {}

    def add(model, target, geometry, form, valid_order=None, variable="q", angle=None, note=""):
        entries[(model, target, geometry, angle)] = CatalogEntry(
            model, target, geometry, form, None if valid_order is None else F(valid_order),
            variable, angle, note)

    sq, tri_r, tri_t = Geometry.SQUARE_RECTANGLE, Geometry.TRIANGULAR_RECTANGLE, Geometry.TRIANGULAR_TRIANGLE
    B, S, C = Target.BULK, Target.SURFACE, Target.CORNER

    m = ModelKind.SQ_SELFDUAL
    add(m, B, sq, _form(_fam(4, 1, 4), _fam(4, -1, -4), prefactor=_pre(q_power=-2, minus={1: -2}, plus={2: 1})))
    add(m, S, sq, _form(_fam(8, 1, 2), _fam(8, 5, -2), prefactor=_pre(minus={1: 1})))
    add(m, C, sq, _form(_fam(8, 6, -1), _fam(8, 4, -4), _fam(8, 2, -1)))

    m = ModelKind.SQ_AF
    add(m, B, sq, _form(_fam(8, 2, 2), _fam(8, 6, -2), prefactor=_pre(-1, -2, minus={1: 2, 2: 1})),
        note="overall sign from Q < 0")
    add(m, S, sq, _form(_fam(16, 14, 1), _fam(16, 2, 1), _fam(16, 10, -1), _fam(16, 6, -1),
                        _fam(8, 3, 2), _fam(8, -1, -2), prefactor=_pre(minus={1: -1})))
    add(m, C, sq, _form(_fam(4, 2, 1), _fam(8, 4, 3), _fam(16, 8, -4)))

    m = ModelKind.TRI_SELFDUAL
    bulk = _form(_fam(4, F(4, 3), 3), _fam(4, F(2, 3), 3), _fam(4, F(8, 3), -3), _fam(4, F(-2, 3), -3),
                 prefactor=_pre(q_power=-2, minus={4: 1, 2: -1}))
    surface = _form(_fam(8, F(8, 3), 2), _fam(8, F(22, 3), 2), _fam(8, F(16, 3), -2), _fam(8, F(14, 3), -2),
                    prefactor=_pre(minus={F(4, 3): 2, F(2, 3): -2}))
    tri_corner = _form(_fam(8, 6, -1), _fam(8, 2, -1), _fam(8, F(14, 3), -3), _fam(8, F(10, 3), -3))
    rect_corner = _raw(TRI_RECT_CORNER_RAW)
    for geometry in (tri_r, tri_t):
        add(m, B, geometry, bulk)
    add(m, S, tri_r, surface)
    add(m, S, tri_t, surface.scale(F(3, 2)), note="triangle surface term is 3/2 of the rectangle one")
    add(m, C, tri_r, rect_corner, F(46, 3), note="raw expansion; no periodic form known")
    add(m, C, tri_t, tri_corner)
    add(m, C, tri_t, tri_corner.scale(F(1, 3)), angle=CornerAngle.ACUTE)
    add(m, C, tri_r, (rect_corner - tri_corner.scale(F(2, 3))).scale(F(1, 2)), F(46, 3),
        angle=CornerAngle.OBTUSE, note="rectangle corner minus two acute corners, halved")

    m = ModelKind.TRI_CHROMATIC
    bulk = _form(_fam(6, 3, 1), _fam(6, 2, 2), _fam(6, 1, 1), _fam(6, 5, -1), _fam(6, 4, -1),
                 _fam(6, 0, -1), _fam(6, -1, -1), prefactor=_pre(-1, -1))
    surface = _form(*[_fam(12, c, 2) for c in (11, 6, 5, 4)], *[_fam(12, c, -2) for c in (9, 8, 7, 2)])
    rect_corner = _form(*[_fam(12, c, p) for c, p in CHROMATIC_RECT_CORNER.items()])
    tri_corner = _form(*[_fam(12, c, p) for c, p in CHROMATIC_TRI_CORNER.items()])
    for geometry in (tri_r, tri_t):
        add(m, B, geometry, bulk, variable="x")
    add(m, S, tri_r, surface, variable="x")
    add(m, S, tri_t, surface.scale(F(3, 2)), variable="x",
        note="triangle surface term is 3/2 of the rectangle one")
    add(m, C, tri_r, rect_corner, variable="x")
    add(m, C, tri_t, tri_corner, variable="x")
    add(m, C, tri_t, tri_corner.scale(F(1, 3)), variable="x", angle=CornerAngle.ACUTE)
    add(m, C, tri_r, (rect_corner - tri_corner.scale(F(2, 3))).scale(F(1, 2)), variable="x",
        angle=CornerAngle.OBTUSE)

    m, fpl = ModelKind.FPL2, Geometry.FPL2_RECTANGLE
    add(m, B, fpl, _form(_fam(8, 4, 4), _fam(8, 2, 4), _fam(8, 6, -4), _fam(8, 0, -4),
                         prefactor=_pre(q_power=-2)))
    add(m, S, fpl, _form(_fam(16, 12, 2), _fam(16, 10, 2), _fam(16, 2, 6), _fam(16, 14, -4),
                         _fam(16, 6, -4), _fam(16, 4, -2), prefactor=_pre(q_power=-1, minus={2: 2})))
    add(m, C, fpl, _form(_fam(16, 14, -5), _fam(16, 12, -1), _fam(16, 10, -1), _fam(16, 6, -5),
                         _fam(16, 4, -5), _fam(16, 2, -1), prefactor=_pre(2)),
        note="constant 2 from the two orientations of the ground state")

    m = ModelKind.ISING_SQ
    x2 = x2_form(m)
    add(m, B, sq, _form(_fam(8, 1, -1, 8), _fam(8, 5, -5, 8), _fam(8, 7, 7, -8), _fam(8, 3, 3, -8),
                        _fam(8, 4, 2), _fam(8, 6, -1), _fam(8, 2, -1), prefactor=_pre(q_power=F(-1, 2))))
    add(m, S, sq, x2.scale(F(1, 2)) + _form(
        _fam(4, F(3, 2), -2, 4), _fam(4, F(5, 2), 2, -4), _fam(4, F(1, 2), 0, 4), _fam(4, F(-1, 2), 0, -4),
        _fam(8, 5, -1, 2), _fam(8, 3, 1, -2), _fam(8, -1, 0, 2), _fam(8, 1, 0, -2)),
        note="prefactor x^{+1}; the surface term carries one power of x per boundary site")
    add(m, C, sq, _form(_fam(8, 4, -1), _fam(8, 6, 0, 4), _fam(8, 2, 4, -4), _fam(4, 1, -4, 8),
                        _fam(4, 3, 4, -8), prefactor=_pre(2)),
        note="constant 2 from the spin-flip symmetry")

    m = ModelKind.ISING_TRI
    x2 = x2_form(m)
    bulk = x2.scale(F(-3, 2)) + _form(
        _fam(8, 4, 2), _fam(8, 6, -1), _fam(8, 2, -1),
        _fam(8, F(14, 3), -3, 6), _fam(8, F(10, 3), 3, -6),
        _fam(8, F(4, 3), 0, 6), _fam(8, F(2, 3), 0, 6), _fam(8, F(-8, 3), 0, 6),
        _fam(8, F(8, 3), 0, -6), _fam(8, F(-2, 3), 0, -6), _fam(8, F(-4, 3), 0, -6))
    surface = x2 + _raw(ISING_TRI_SURFACE_RAW)
    for geometry in (tri_r, tri_t):
        add(m, B, geometry, bulk)
    add(m, S, tri_r, surface, F(50, 3), note="raw expansion; no periodic form known")
    add(m, S, tri_t, surface.scale(F(3, 2)), F(50, 3), note="triangle surface term is 3/2 of the rectangle one")
    add(m, C, tri_r, x2.scale(F(-1, 2)) + _raw(ISING_TRI_RECT_CORNER_RAW, 2), F(50, 3),
        note="raw expansion with prefactor 2/x")
    add(m, C, tri_t, _raw(ISING_TRI_TRIANGLE_CORNER_RAW, 2), 14, note="raw expansion")
    return entries


_CONJECTURES = {
    (ModelKind.ISING_TRI, Geometry.TRIANGULAR_TRIANGLE): lambda: _form(
        _fam(8, 4, -1), _fam(8, F(14, 3), -9, 12), _fam(8, F(22, 3), 9, -12),
        _fam(8, F(2, 3), -3, 12), _fam(8, F(10, 3), 3, -12), _fam(8, F(16, 3), -9, 15),
        _fam(8, F(8, 3), 6, -15), _fam(8, F(4, 3), 0, 9), _fam(8, F(20, 3), 9, -9),
        prefactor=_pre(2)),
}


def _mp(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _gamma(x) -> object:
    return mpmath.gamma(_mp(x))


def _js_surface_limit(r: Optional[int]):
    sqrt_pi = mpmath.sqrt(mpmath.pi)
    tail = 8 * _gamma(F(3, 4)) / (sqrt_pi * _gamma(F(1, 4)))
    if r is None:
        return tail
    if r == 0:
        return tail ** 2 / 4
    p, odd = divmod(r, 2)
    if odd:
        # prod_{k=1}^{p} (4k+1)(4k+2)/((4k-1)(4k+4))
        return (_gamma(F(5, 4) + p) * _gamma(F(3, 2) + p) * _gamma(F(3, 4)) * _gamma(2)
                / (_gamma(F(3, 4) + p) * _gamma(2 + p) * _gamma(F(5, 4)) * _gamma(F(3, 2))))
    head = (_gamma(p - F(1, 4)) * _gamma(p + 1) * _gamma(F(5, 4)) * _gamma(F(3, 2))
            / (_gamma(F(3, 4)) * _gamma(2) * _gamma(p + F(1, 4)) * _gamma(p + F(1, 2))))
    return head * mpmath.mpf(4 * p - 1) / (4 * p + 2) * tail ** 2


def _js_left_printed(r: int):
    return (mpmath.mpf(4) ** (1 + r) * mpmath.sqrt(2 + mpmath.sqrt(2)) / mpmath.pi
            * _gamma(F(9 + 4 * r, 8)) * _gamma(F(7 + 4 * r, 8)) * _gamma(F(3 + 2 * r, 2))
            / _gamma(F(3 + 4 * r, 2)))


def _js_leftlow_printed(r: int):
    return (mpmath.mpf(r + 1) / 2 * mpmath.mpf(2) ** (-4 * r) * mpmath.sqrt(2 + mpmath.sqrt(2))
            * mpmath.pi ** _mp(F(3, 2)) * _gamma(F(1 + 2 * r, 2)) ** 3
            / (_gamma(F(3 + 4 * r, 8)) ** 2 * _gamma(F(5 + 4 * r, 8)) ** 2 * _gamma(F(2 + r, 2)) ** 2))


def _js_leftlow_derived(r: int):
    return _js_leftlow_printed(r) * mpmath.sqrt(2 + mpmath.sqrt(2))


def _build_closed_forms() -> Dict[str, ClosedForm]:
    g = _gamma
    pi = mpmath.pi
    forms = [
        ClosedForm("sq-selfdual:bulk", "18 G(-3/4)^2 G(1/4)^2 / G(-1/4)^4",
                   lambda: 18 * g(F(-3, 4)) ** 2 * g(F(1, 4)) ** 2 / g(F(-1, 4)) ** 4),
        ClosedForm("sq-selfdual:surface", "8 G(3/8)^2 / G(-1/8)^2",
                   lambda: 8 * g(F(3, 8)) ** 2 / g(F(-1, 8)) ** 2),
        ClosedForm("sq-af:forests", "G(5/4)^2 / G(3/4)^2",
                   lambda: g(F(5, 4)) ** 2 / g(F(3, 4)) ** 2,
                   note="limit of e^{f_b}/Q"),
        ClosedForm("sq-af:surface", "-5/3 G(3/8) G(1/8) / (G(-1/8) G(5/8))",
                   lambda: -mpmath.mpf(5) / 3 * g(F(3, 8)) * g(F(1, 8)) / (g(F(-1, 8)) * g(F(5, 8))),
                   reproduced=False, note="the product gives G(1/8) G(3/8) / (8 G(5/8) G(7/8)), 3/5 of this"),
        ClosedForm("sq-af:surface-derived", "G(1/8) G(3/8) / (8 G(5/8) G(7/8))",
                   lambda: g(F(1, 8)) * g(F(3, 8)) / (8 * g(F(5, 8)) * g(F(7, 8)))),
        ClosedForm("tri-selfdual:bulk", "108 pi^{-3/2} G(7/6)^6 / (G(5/4)^2 G(5/6)^3)",
                   lambda: 108 / pi ** _mp(F(3, 2)) * g(F(7, 6)) ** 6 / (g(F(5, 4)) ** 2 * g(F(5, 6)) ** 3),
                   reproduced=False, note="the product gives 2 (G(1/3) G(7/6) / (G(2/3) G(5/6)))^3"),
        ClosedForm("tri-selfdual:bulk-derived", "2 (G(1/3) G(7/6) / (G(2/3) G(5/6)))^3",
                   lambda: 2 * (g(F(1, 3)) * g(F(7, 6)) / (g(F(2, 3)) * g(F(5, 6)))) ** 3),
        ClosedForm("tri-selfdual:surface", "4 - 2 sqrt(3)", lambda: 4 - 2 * mpmath.sqrt(3)),
        ClosedForm("tri-chromatic:bulk", "-54 2^{1/3} G(7/6)^4 / (pi^2 G(2/3))",
                   lambda: -54 * mpmath.cbrt(2) * g(F(7, 6)) ** 4 / (pi ** 2 * g(F(2, 3))),
                   reproduced=False, note="negative, while the product at x -> -1 is positive"),
        ClosedForm("tri-chromatic:surface", "8 G(5/12)^2 G(5/4)^2 / (pi G(1/6)^2)",
                   lambda: 8 * g(F(5, 12)) ** 2 * g(F(5, 4)) ** 2 / (pi * g(F(1, 6)) ** 2),
                   reproduced=False, note="not checked against the product"),
        ClosedForm("fpl2:bulk", "G(1/4)^8 / (4 pi^6)", lambda: g(F(1, 4)) ** 8 / (4 * pi ** 6)),
        ClosedForm("fpl2:surface", "144 sqrt(2) pi G(-3/4)^2 / G(-1/8)^4",
                   lambda: 144 * mpmath.sqrt(2) * pi * g(F(-3, 4)) ** 2 / g(F(-1, 8)) ** 4),
        ClosedForm("js:surface:r=0", "64/pi G(3/4)^2 / G(1/4)^2",
                   lambda: 64 / pi * g(F(3, 4)) ** 2 / g(F(1, 4)) ** 2,
                   reproduced=False, note="the product gives 16/pi G(3/4)^2 / G(1/4)^2"),
        ClosedForm("js:surface:r=inf", "8 G(3/4) / (sqrt(pi) G(1/4))",
                   lambda: _js_surface_limit(None)),
    ]
    for r in range(0, 10):
        forms.append(ClosedForm(f"js:surface:r={r}:derived", "Gamma limit of the delta f_s product",
                                lambda r=r: _js_surface_limit(r)))
    for r in range(1, 10):
        forms.append(ClosedForm(f"js:left:r={r}", "printed finite-r limit of e^{delta f_c} with one JS side",
                                lambda r=r: _js_left_printed(r), reproduced=False,
                                note="exceeds the product's limit by the factor 2r+1"))
        forms.append(ClosedForm(f"js:left:r={r}:derived", "printed one-side limit / (2r+1)",
                                lambda r=r: _js_left_printed(r) / (2 * r + 1)))
        forms.append(ClosedForm(f"js:leftlow:r={r}", "printed finite-r limit of e^{delta f_c} with two JS sides",
                                lambda r=r: _js_leftlow_printed(r), reproduced=False,
                                note="the product needs (2+sqrt 2) in place of sqrt(2+sqrt 2)"))
        forms.append(ClosedForm(f"js:leftlow:r={r}:derived", "printed two-sides limit * sqrt(2+sqrt 2)",
                                lambda r=r: _js_leftlow_derived(r)))
        forms.append(ClosedForm(f"js:mixed:r={r}", "one free|JS corner: sqrt of the one-side limit",
                                lambda r=r: mpmath.sqrt(_js_left_printed(r) / (2 * r + 1))))
        forms.append(ClosedForm(f"js:corner:r={r}", "one JS|JS corner: two-sides limit / one-side limit",
                                lambda r=r: _js_leftlow_derived(r) * (2 * r + 1) / _js_left_printed(r)))
    return {f.key: f for f in forms}


class CatalogService:

    def __init__(self):
        self._entries: Optional[Dict[Tuple, CatalogEntry]] = None
        self._closed: Optional[Dict[str, ClosedForm]] = None

    def _all(self) -> Dict[Tuple, CatalogEntry]:
        if self._entries is None:
            self._entries = _build_entries()
            logger.debug("built %d catalog entries", len(self._entries))
        return self._entries

    def entries(self) -> List[CatalogEntry]:
        return list(self._all().values())

    def entry(self, model: ModelKind, target: Target, geometry: Optional[Geometry] = None,
              angle: Optional[CornerAngle] = None) -> CatalogEntry:
        model, target = ModelKind(model), Target(target)
        candidates = [e for (m, t, g, a), e in self._all().items()
                      if m == model and t == target and a == angle and (geometry is None or g == geometry)]
        if not candidates:
            where = f" on {Geometry(geometry).value}" if geometry else ""
            raise InvalidConfigError(f"no quoted product for {model.value} {target.value}{where}")
        return candidates[0]

    def conjecture(self, model: ModelKind, geometry: Geometry) -> CatalogEntry:
        """Conjectured closed product where only a raw expansion was derived."""
        key = (ModelKind(model), Geometry(geometry))
        if key not in _CONJECTURES:
            raise InvalidConfigError(f"no conjectured corner product for {key[0].value} on {key[1].value}")
        return CatalogEntry(key[0], Target.CORNER, key[1], _CONJECTURES[key](),
                            note="conjecture consistent with the raw expansion")

    def x2_form(self, kind: ModelKind) -> ProductForm:
        return x2_form(ModelKind(kind))

    def js_delta_surface(self, r: Optional[int]) -> ProductForm:
        """e^{delta f_s} for one JS side; r None is the r -> infinity limit."""
        if r is None:
            return _js_x()
        if r == 0:
            return _js_x().scale(2) + _form(prefactor=_pre(minus={1: 1, 4: -1}))
        if r == 1:
            return ProductForm.unit()
        p, odd = divmod(r, 2)
        if odd:
            return _js_x(p)
        return (-_js_x(p - 1)) + _js_x().scale(2) + _form(prefactor=_pre(minus={4 * p - 1: 1, 4 * p + 2: -1}))

    def js_delta_corner_left(self, r: Optional[int]) -> ProductForm:
        """e^{delta f_c} with one JS side (two free|JS corners)."""
        tail = [_fam(8, 5, 1), _fam(8, 3, 1)]
        if r is None:
            return _form(*tail)
        if r == 0:
            raise InvalidConfigError("no corner product is known for r=0")
        if r == 1:
            return ProductForm.unit()
        p, odd = divmod(r, 2)
        if odd:
            return _form(_fam(2, -1, -1, k_min=2 * p + 1, k_max=4 * p + 2),
                         _fam(8, 5, 1, k_max=p + 1), _fam(8, 3, 1, k_max=p + 1))
        return _form(_fam(2, -1, -1, k_min=2 * p, k_max=4 * p),
                     _fam(8, 1, -1, k_min=p + 1), _fam(8, -1, -1, k_min=p + 1), *tail)

    def js_delta_corner_leftlow(self, r: Optional[int]) -> ProductForm:
        """e^{delta f_c} with two adjacent JS sides."""
        tail = [_fam(8, 5, 2), _fam(8, 3, 2), _fam(8, 2, -1), _fam(8, -2, -1)]
        if r is None:
            return _form(*tail, prefactor=_pre(minus={4: -1}))
        if r == 0:
            raise InvalidConfigError("no corner product is known for r=0")
        if r == 1:
            return ProductForm.unit()
        p, odd = divmod(r, 2)
        if odd:
            return _form(_fam(4, 1, 2, k_max=p), _fam(4, -1, 2, k_max=p),
                         _fam(8, 1, -2, k_max=p), _fam(8, -1, -2, k_max=p),
                         _fam(8, 2, 1, k_max=p), _fam(8, -2, 1, k_max=p), _fam(4, -2, -2, k_max=p),
                         prefactor=_pre(minus={4 * p + 4: 1, 4: -1}))
        k0 = p + 1
        return _form(_fam(8, 5, 2, k_min=k0), _fam(8, 3, 2, k_min=k0), _fam(4, 0, 2, k_min=k0),
                     _fam(4, 1, -2, k_min=k0), _fam(4, 3, -2, k_min=k0),
                     _fam(8, 6, -1, k_min=k0), _fam(8, 2, -1, k_min=k0), *tail,
                     prefactor=_pre(minus={4 * p + 2: 1, 4: -1}))

    def js_mixed_corner(self, r: Optional[int]) -> ProductForm:
        """One free|JS corner: half of the one-side corner correction."""
        return self.js_delta_corner_left(r).scale(F(1, 2))

    def js_corner(self, r: Optional[int]) -> ProductForm:
        """One JS|JS corner: the two-sides correction minus the one-side one."""
        return self.js_delta_corner_leftlow(r) - self.js_delta_corner_left(r)

    def js_form(self, target: Target, r: Optional[int]) -> ProductForm:
        target = Target(target)
        if target == Target.DELTA_SURFACE:
            return self.js_delta_surface(r)
        if target == Target.DELTA_CORNER:
            return self.js_delta_corner_left(r)
        if target == Target.DELTA_CORNER_JS:
            return self.js_delta_corner_leftlow(r)
        raise InvalidConfigError(f"{target.value} is not a JS correction target")

    def closed_forms(self) -> Dict[str, ClosedForm]:
        if self._closed is None:
            self._closed = _build_closed_forms()
        return self._closed

    def closed_form(self, key: str) -> ClosedForm:
        forms = self.closed_forms()
        if key not in forms:
            raise InvalidConfigError(f"unknown closed form '{key}'")
        return forms[key]

    def table_period(self, model: ModelKind, target: Target) -> Optional[int]:
        periods = TABLE_PERIODS.get(ModelKind(model))
        if periods is None:
            return None
        order = (Target.BULK, Target.SURFACE, Target.CORNER)
        target = Target(target)
        return periods[order.index(target)] if target in order else None

    def divergence_target(self, model: ModelKind, geometry: Geometry) -> Optional[Fraction]:
        return DIVERGENCE_TARGETS.get((ModelKind(model), Geometry(geometry)))


catalog_service = CatalogService()
