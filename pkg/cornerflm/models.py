import enum
from dataclasses import dataclass, field
from typing import FrozenSet, Optional

from .errors import InvalidConfigError, UnsupportedBoundaryError


class ModelKind(str, enum.Enum):
    SQ_SELFDUAL = "sq-selfdual"
    SQ_AF = "sq-af"
    TRI_SELFDUAL = "tri-selfdual"
    TRI_CHROMATIC = "tri-chromatic"
    FPL2 = "fpl2"
    ISING_SQ = "ising-sq"
    ISING_TRI = "ising-tri"


class Geometry(str, enum.Enum):
    SQUARE_RECTANGLE = "square-rectangle"
    TRIANGULAR_RECTANGLE = "triangular-rectangle"
    TRIANGULAR_TRIANGLE = "triangular-triangle"
    FPL2_RECTANGLE = "fpl2-rectangle"


class Side(str, enum.Enum):
    LEFT = "left"
    BOTTOM = "bottom"
    RIGHT = "right"
    TOP = "top"


class Target(str, enum.Enum):
    BULK = "bulk"
    SURFACE = "surface"
    CORNER = "corner"
    DELTA_SURFACE = "delta-surface"
    DELTA_CORNER = "delta-corner"
    DELTA_CORNER_JS = "delta-corner-js"


class OutputFormat(str, enum.Enum):
    JSON = "json"
    TSV = "tsv"
    PRETTY = "pretty"


class Classification(str, enum.Enum):
    ZERO = "zero"
    FINITE = "finite"
    DIVERGENT = "divergent"
    LINEAR_GROWTH_SPECIAL = "linear-growth-special"


class CornerAngle(str, enum.Enum):
    RIGHT = "pi/2"
    ACUTE = "pi/3"
    OBTUSE = "2pi/3"


POTTS_KINDS = frozenset({ModelKind.SQ_SELFDUAL, ModelKind.SQ_AF,
                         ModelKind.TRI_SELFDUAL, ModelKind.TRI_CHROMATIC})
ISING_KINDS = frozenset({ModelKind.ISING_SQ, ModelKind.ISING_TRI})
TRIANGULAR_KINDS = frozenset({ModelKind.TRI_SELFDUAL, ModelKind.TRI_CHROMATIC, ModelKind.ISING_TRI})

VERTICAL_SIDES = frozenset({Side.LEFT, Side.RIGHT})


@dataclass(frozen=True)
class LatticeSpec:
    """A finite lattice; [m,n] counts m columns and n rows of sites (triangle: side m)."""

    geometry: Geometry
    m: int
    n: int = 0

    def __post_init__(self):
        if self.geometry == Geometry.TRIANGULAR_TRIANGLE:
            object.__setattr__(self, "n", self.m)
        if self.m <= 0 or self.n <= 0:
            raise InvalidConfigError(f"lattice dimensions must be positive, got [{self.m},{self.n}]")

    @property
    def is_triangle(self) -> bool:
        return self.geometry == Geometry.TRIANGULAR_TRIANGLE

    @property
    def id(self) -> str:
        if self.is_triangle:
            return f"{self.geometry.value}:{self.m}"
        return f"{self.geometry.value}:{self.m}x{self.n}"

    def transposed(self) -> "LatticeSpec":
        if self.is_triangle:
            return self
        return LatticeSpec(self.geometry, self.n, self.m)


@dataclass(frozen=True)
class BoundarySpec:
    """JS(r) marking on a subset of sides; the empty marking is the free boundary."""

    r: Optional[int] = None
    sides: FrozenSet[Side] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "sides", frozenset(Side(s) for s in self.sides))
        if self.sides and self.r is None:
            raise InvalidConfigError("marked sides need a JS parameter r")
        if self.r is not None and self.r < 0:
            raise InvalidConfigError(f"JS parameter must be non-negative, got r={self.r}")

    @property
    def is_free(self) -> bool:
        return not self.sides

    @property
    def id(self) -> str:
        if self.is_free:
            return "free"
        ordered = [s.value for s in Side if s in self.sides]
        return f"js:r={self.r}:{','.join(ordered)}"

    @classmethod
    def parse(cls, text: str) -> "BoundarySpec":
        text = text.strip()
        if text in ("", "free"):
            return cls()
        parts = text.split(":")
        if len(parts) != 3 or parts[0] != "js" or not parts[1].startswith("r="):
            raise InvalidConfigError(f"bad boundary id '{text}', expected js:r=R:side[,side]")
        try:
            r = int(parts[1][2:])
            sides = frozenset(Side(s.strip()) for s in parts[2].split(",") if s.strip())
        except ValueError as exc:
            raise InvalidConfigError(f"bad boundary id '{text}': {exc}") from exc
        return cls(r, sides)


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    boundary: BoundarySpec = field(default_factory=BoundarySpec)

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not self.boundary.is_free and self.kind != ModelKind.SQ_SELFDUAL:
            raise UnsupportedBoundaryError(
                f"JS boundaries exist only for {ModelKind.SQ_SELFDUAL.value}, not {self.kind.value}")

    @property
    def id(self) -> str:
        if self.boundary.is_free:
            return self.kind.value
        return f"{self.kind.value}+{self.boundary.id}"

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        kind_text, _, boundary_text = text.strip().partition("+")
        try:
            kind = ModelKind(kind_text)
        except ValueError as exc:
            known = ", ".join(k.value for k in ModelKind)
            raise InvalidConfigError(f"unknown model '{kind_text}' (known: {known})") from exc
        return cls(kind, BoundarySpec.parse(boundary_text))

    def with_boundary(self, boundary: BoundarySpec) -> "ModelSpec":
        return ModelSpec(self.kind, boundary)

    @property
    def is_potts(self) -> bool:
        return self.kind in POTTS_KINDS

    @property
    def is_ising(self) -> bool:
        return self.kind in ISING_KINDS

    @property
    def is_triangular(self) -> bool:
        return self.kind in TRIANGULAR_KINDS

    def geometries(self):
        if self.kind == ModelKind.FPL2:
            return (Geometry.FPL2_RECTANGLE,)
        if self.is_triangular:
            return (Geometry.TRIANGULAR_RECTANGLE, Geometry.TRIANGULAR_TRIANGLE)
        return (Geometry.SQUARE_RECTANGLE,)

    def default_geometry(self) -> Geometry:
        return self.geometries()[0]

    def lattice(self, m: int, n: int = 0, geometry: Optional[Geometry] = None) -> LatticeSpec:
        geometry = geometry or self.default_geometry()
        if geometry not in self.geometries():
            raise InvalidConfigError(f"geometry {geometry.value} does not apply to {self.kind.value}")
        return LatticeSpec(geometry, m, n or m)
