import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from ..errors import InvalidConfigError, MissingTableEntryError
from ..models import Geometry, ModelKind, Side, VERTICAL_SIDES
from .parameterization_service import parameterization_service
from .series_service import LogPartition

logger = logging.getLogger(__name__)

RectTable = Mapping[Tuple[int, int], LogPartition]
TriTable = Mapping[int, LogPartition]


@dataclass(frozen=True)
class FreeEnergyTriple:
    """f_{M,N} ~ MN f_b + (M+N) f_s + f_c (triangle: M(M+1)/2 f_b + M f_s + f_c)."""

    f_b: LogPartition
    f_s: LogPartition
    f_c: LogPartition
    k: int
    guaranteed_order: Fraction
    geometry: Geometry = Geometry.SQUARE_RECTANGLE
    model: str = ""

    def parts(self) -> Dict[str, LogPartition]:
        return {"bulk": self.f_b, "surface": self.f_s, "corner": self.f_c}

    def to_text(self) -> str:
        blocks = [f"# model {self.model}", f"# geometry {self.geometry.value}", f"# cutoff {self.k}",
                  f"# guaranteed_order {self.guaranteed_order}"]
        for name, part in self.parts().items():
            blocks.append(f"## {name}")
            blocks.append(part.to_text().rstrip("\n"))
        return "\n".join(blocks) + "\n"


@dataclass(frozen=True)
class BoundaryCorrections:
    """
    JS boundary corrections from one FLM assembly.

    ``delta_fs`` is per unit length of a marked side. ``delta_fc_left`` and
    ``delta_fc_leftlow`` are the one-side and adjacent-two-sides corner terms.
    """

    r: int
    delta_fs: LogPartition
    delta_fc_left: LogPartition
    delta_fc_leftlow: LogPartition
    k: int
    guaranteed_order: Fraction

    @property
    def delta_fc_mixed(self) -> LogPartition:
        """Correction carried by one free|JS corner."""
        return self.delta_fc_left.scale(Fraction(1, 2))

    @property
    def delta_fc_js(self) -> LogPartition:
        """Correction carried by one JS|JS corner."""
        return self.delta_fc_leftlow - self.delta_fc_left


@dataclass(frozen=True)
class Decomposition:
    """f_{M,N} = MN*bulk + M*m_coeff + N*n_coeff + constant."""

    bulk: LogPartition
    m_coeff: LogPartition
    n_coeff: LogPartition
    constant: LogPartition

    def evaluate(self, m: int, n: int) -> LogPartition:
        return self.bulk.scale(m * n) + self.m_coeff.scale(m) + self.n_coeff.scale(n) + self.constant


# rectangle weights on f_{m,n}, indexed by k - (m+n)
def _fb_weight(m: int, n: int, depth: int) -> int:
    return (1, -3, 3, -1)[depth]


def _fs_weight(m: int, n: int, depth: int) -> int:
    return (1 - m, 3 * m - 1, -(3 * m + 1), m + 1)[depth]


def _fc_weight(m: int, n: int, depth: int) -> int:
    return ((m - 1) * (n - 1), 1 + m + n - 3 * m * n, 3 * m * n + m + n - 1, -(m + 1) * (n + 1))[depth]


# triangle weights on f_m, indexed by k - m
def _tri_fb(m: int, depth: int) -> Fraction:
    return Fraction((1, -2, 1)[depth])


def _tri_fs(m: int, depth: int) -> Fraction:
    return Fraction((1 - m, 2 * m + 1, -(m + 2))[depth])


def _tri_fc(m: int, depth: int) -> Fraction:
    return (Fraction(m * m - 3 * m + 2, 2), Fraction(1 - m * m), Fraction(m * m + 3 * m + 2, 2))[depth]


class FLMService:

    def __init__(self):
        self.parameterization_service = parameterization_service

    @staticmethod
    def eta_weight(m: int, i: int) -> int:
        """Sublattice weight: 1 if m=i or (m+2=i, i>2); 2 if m+1=i with i>1; 0 otherwise."""
        if m == i:
            return 1
        if m + 1 == i and i > 1:
            return 2
        if m + 2 == i and i > 2:
            return 1
        return 0

    def signed_eta(self, m: int, i: int) -> int:
        """Second-difference weight of f_m in the inversion for index i."""
        return (-1) ** (i - m) * self.eta_weight(m, i)

    @staticmethod
    def _entry(table: RectTable, m: int, n: int, trunc=None) -> LogPartition:
        if m <= 0 or n <= 0:
            return LogPartition.zero(trunc)
        try:
            return table[(m, n)]
        except KeyError:
            raise MissingTableEntryError((m, n)) from None

    @staticmethod
    def _weighted_sum(terms: Iterable[Tuple[Fraction, LogPartition]]) -> LogPartition:
        total: Optional[LogPartition] = None
        for w, f in terms:
            if not w:
                continue
            part = f.scale(w)
            total = part if total is None else total + part
        return total if total is not None else LogPartition.zero()

    def flm_rectangle(self, table: RectTable, k: int, model: Optional[ModelKind] = None,
                      geometry: Geometry = Geometry.SQUARE_RECTANGLE) -> FreeEnergyTriple:
        """Bulk, surface and corner free energies from f_{m,n} with k-3 <= m+n <= k."""
        if k < 2:
            raise InvalidConfigError(f"FLM cutoff must be at least 2, got {k}")
        fb, fs, fc = [], [], []
        for depth in range(4):
            total = k - depth
            for m in range(1, total):
                n = total - m
                f = self._entry(table, m, n)
                fb.append((_fb_weight(m, n, depth), f))
                fs.append((_fs_weight(m, n, depth), f))
                fc.append((_fc_weight(m, n, depth), f))
        logger.info("assembled rectangle FLM at k=%d from %d entries", k, len(fb))
        return FreeEnergyTriple(self._weighted_sum(fb), self._weighted_sum(fs), self._weighted_sum(fc), k,
                                self.guaranteed_order(model, k, geometry) if model else Fraction(0),
                                geometry, model.value if model else "")

    def flm_triangle(self, table: TriTable, k: int, model: Optional[ModelKind] = None) -> FreeEnergyTriple:
        """Triangle variant: only one corner type, f_M for k-2 <= M <= k."""
        if k < 1:
            raise InvalidConfigError(f"FLM cutoff must be positive, got {k}")
        fb, fs, fc = [], [], []
        for depth in range(3):
            m = k - depth
            if m <= 0:
                continue
            if m not in table:
                raise MissingTableEntryError(m)
            f = table[m]
            fb.append((_tri_fb(m, depth), f))
            fs.append((_tri_fs(m, depth), f))
            fc.append((_tri_fc(m, depth), f))
        geometry = Geometry.TRIANGULAR_TRIANGLE
        return FreeEnergyTriple(self._weighted_sum(fb), self._weighted_sum(fs), self._weighted_sum(fc), k,
                                self.guaranteed_order(model, k, geometry) if model else Fraction(0),
                                geometry, model.value if model else "")

    def ftilde_rectangle(self, table: RectTable) -> Dict[Tuple[int, int], LogPartition]:
        """Irreducible contributions: double second difference of f_{m,n}."""
        out = {}
        for (i, j) in table:
            terms = []
            for m in (i, i - 1, i - 2):
                for n in (j, j - 1, j - 2):
                    if m > 0 and n > 0:
                        terms.append((self.signed_eta(m, i) * self.signed_eta(n, j), table[(m, n)]))
            out[(i, j)] = self._weighted_sum(terms)
        return out

    def reconstruct_rectangle(self, ftilde: RectTable, m: int, n: int) -> LogPartition:
        """f_{m,n} as the sum over all sublattices [i,j] placed inside [m,n]."""
        return self._weighted_sum(((m - i + 1) * (n - j + 1), f)
                                  for (i, j), f in ftilde.items() if i <= m and j <= n)

    def ftilde_triangle(self, table: TriTable) -> Dict[int, LogPartition]:
        out = {}
        for i in table:
            weights = {i: 1, i - 1: -3, i - 2: 3, i - 3: -1}
            out[i] = self._weighted_sum((w, table[m]) for m, w in weights.items() if m > 0)
        return out

    def reconstruct_triangle(self, ftilde: TriTable, m: int) -> LogPartition:
        """A side-i triangle fits (m-i+1)(m-i+2)/2 times into a side-m triangle."""
        return self._weighted_sum((Fraction((m - i + 1) * (m - i + 2), 2), f)
                                  for i, f in ftilde.items() if i <= m)

    def flm_boundary(self, free: RectTable, left: RectTable, leftlow: RectTable, k: int,
                     r: int, triple: Optional[FreeEnergyTriple] = None,
                     model: ModelKind = ModelKind.SQ_SELFDUAL) -> BoundaryCorrections:
        """One-side and adjacent-two-sides JS corrections at cutoff k."""
        triple = triple or self.flm_rectangle(free, k, model)
        ds_terms, dc_terms = [], []
        for depth, w in enumerate((1, -2, 1)):
            total = k - depth
            for m in range(1, total):
                n = total - m
                diff = self._entry(left, m, n) - self._entry(free, m - 1, n)
                ds_terms.append((w, diff))
                dc_terms.append((w * (m - k + 1), diff))
        delta_fs = self._weighted_sum(ds_terms) - triple.f_b
        delta_fc = self._weighted_sum(dc_terms) - triple.f_s

        def low(m: int, n: int) -> LogPartition:
            # bottom-marked m x n is the transpose of left-marked n x m
            return self._entry(left, n, m)

        ll_terms = []
        for depth, w in enumerate((1, -1)):
            total = k - depth
            for m in range(1, total):
                n = total - m
                combo = (self._entry(leftlow, m, n) + self._entry(free, m - 1, n - 1)
                         - self._entry(left, m, n - 1)
                         - low(m - 1, n))
                ll_terms.append((w, combo))
        delta_fc_ll = (self._weighted_sum(ll_terms) + delta_fc.scale(2) - delta_fs.scale(2) - triple.f_b)
        return BoundaryCorrections(r, delta_fs, delta_fc, delta_fc_ll, k, self.guaranteed_order(model, k))

    def compose_boundary_config(self, bc: BoundaryCorrections, sides: Iterable[Side],
                                free: FreeEnergyTriple) -> Decomposition:
        """Sum over independent sides and corners for any set of marked sides."""
        sides = frozenset(Side(s) for s in sides)
        n_coeff = free.f_s
        m_coeff = free.f_s
        for side in sides:
            if side in VERTICAL_SIDES:
                n_coeff = n_coeff + bc.delta_fs
            else:
                m_coeff = m_coeff + bc.delta_fs
        constant = free.f_c
        corners = [(Side.LEFT, Side.BOTTOM), (Side.BOTTOM, Side.RIGHT),
                   (Side.RIGHT, Side.TOP), (Side.TOP, Side.LEFT)]
        for a, b in corners:
            marked = (a in sides) + (b in sides)
            if marked == 1:
                constant = constant + bc.delta_fc_mixed
            elif marked == 2:
                constant = constant + bc.delta_fc_js
        return Decomposition(free.f_b, m_coeff, n_coeff, constant)

    def reconstruct(self, triple: FreeEnergyTriple, m: int, n: int = 0) -> LogPartition:
        """MN f_b + (M+N) f_s + f_c, or the triangle form for triangle triples."""
        if triple.geometry == Geometry.TRIANGULAR_TRIANGLE:
            return triple.f_b.scale(Fraction(m * (m + 1), 2)) + triple.f_s.scale(m) + triple.f_c
        return triple.f_b.scale(m * n) + triple.f_s.scale(m + n) + triple.f_c

    def check_decomposition(self, direct: LogPartition, predicted: LogPartition,
                            order=None) -> Optional[Fraction]:
        """First q-exponent at which a direct enumeration departs from the FLM prediction."""
        return direct.first_difference(predicted, order)

    def guaranteed_order(self, model: ModelKind, k: int,
                         geometry: Geometry = Geometry.SQUARE_RECTANGLE) -> Fraction:
        """Exclusive q-order through which an assembly at cutoff k is exact."""
        model = ModelKind(model)
        if model == ModelKind.TRI_SELFDUAL:
            y_order = k
        elif model == ModelKind.ISING_SQ:
            y_order = k - 4
        elif model == ModelKind.ISING_TRI:
            y_order = 2 * k - 4 if geometry == Geometry.TRIANGULAR_TRIANGLE else k - 3
        elif model == ModelKind.FPL2:
            y_order = k // 2
        else:
            y_order = k - 1
        return self.parameterization_service.q_order(model, max(y_order, 0))

    def stabilized_order(self, t1: FreeEnergyTriple, t2: FreeEnergyTriple) -> Optional[Fraction]:
        """Lowest exponent at which the cutoff-k and cutoff-(k+1) triples differ; None if never."""
        found = None
        for a, b in zip(t1.parts().values(), t2.parts().values()):
            d = a.first_difference(b)
            if d is not None and (found is None or d < found):
                found = d
        return found

    def split_corner_angles(self, rect_corner: LogPartition,
                            tri_corner: LogPartition) -> Tuple[LogPartition, LogPartition]:
        """(f_c at 2pi/3, f_c at pi/3) from the rectangle and triangle corner energies."""
        pi3 = tri_corner.scale(Fraction(1, 3))
        two_pi3 = (rect_corner - pi3.scale(2)).scale(Fraction(1, 2))
        return two_pi3, pi3


flm_service = FLMService()
