"""Normal-crossing central fibers and their compatibility kernels G^q."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import AssemblyError, HypothesisViolation, InvariantBreach, ShapeError
from .lattice import ExactMatrix, Lattice, integer_kernel_basis
from .models import Boundary, ComponentModel, SurfaceModel

SUPPORTED_DEGREES = (2, 4)


@dataclass(frozen=True)
class DoubleLocus:
    """Surface along which two components meet; sides are (component, boundary surface)."""

    surface: SurfaceModel
    side_a: tuple[str, str]
    side_b: tuple[str, str]

    @property
    def name(self) -> str:
        return self.surface.name


@dataclass(frozen=True)
class GlobalClass:
    """One coordinate vector per component, in that component's H^q basis."""

    degree: int
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(tuple(int(x) for x in p) for p in self.parts))

    def flat(self) -> tuple[int, ...]:
        return tuple(x for p in self.parts for x in p)

    def __add__(self, other: "GlobalClass") -> "GlobalClass":
        if self.degree != other.degree or [len(p) for p in self.parts] != [len(p) for p in other.parts]:
            raise ShapeError("classes live in different groups")
        return GlobalClass(self.degree, tuple(tuple(a + b for a, b in zip(p, q))
                                              for p, q in zip(self.parts, other.parts)))

    def scale(self, m: int) -> "GlobalClass":
        return GlobalClass(self.degree, tuple(tuple(m * a for a in p) for p in self.parts))

    def is_zero(self) -> bool:
        return not any(self.flat())


@dataclass(frozen=True)
class NormalCrossingFiber:
    components: tuple[ComponentModel, ...]
    loci: tuple[DoubleLocus, ...]
    triple_curves: tuple[str, ...] = ()

    def index(self, name: str) -> int:
        for i, c in enumerate(self.components):
            if c.name == name:
                return i
        raise KeyError(name)

    def component(self, name: str) -> ComponentModel:
        return self.components[self.index(name)]

    def ranks(self, q: int) -> tuple[int, ...]:
        _check_degree(q)
        return tuple(c.h2.rank if q == 2 else c.h4.rank for c in self.components)

    def labels(self, q: int) -> tuple[str, ...]:
        _check_degree(q)
        return tuple(f"{c.name}.{lab}" for c in self.components
                     for lab in (c.h2.labels if q == 2 else c.h4.labels))

    def make_class(self, q: int, coords: Mapping[str, Sequence[int]]) -> GlobalClass:
        """Build a class from per-component coordinates; omitted components are zero."""
        unknown = set(coords) - {c.name for c in self.components}
        if unknown:
            raise KeyError(f"unknown components {sorted(unknown)}")
        parts = []
        for c, rank in zip(self.components, self.ranks(q)):
            v = tuple(coords.get(c.name, (0,) * rank))
            if len(v) != rank:
                raise ShapeError(f"{c.name}: {len(v)} coordinates for H^{q} of rank {rank}")
            parts.append(v)
        return GlobalClass(q, tuple(parts))

    def class_from_flat(self, q: int, vec: Sequence[int]) -> GlobalClass:
        ranks = self.ranks(q)
        if len(vec) != sum(ranks):
            raise ShapeError(f"flat vector of length {len(vec)}, expected {sum(ranks)}")
        parts, pos = [], 0
        for r in ranks:
            parts.append(tuple(vec[pos:pos + r]))
            pos += r
        return GlobalClass(q, tuple(parts))


def _check_degree(q: int):
    if q not in SUPPORTED_DEGREES:
        raise ValueError(f"only degrees {SUPPORTED_DEGREES} are modeled, got {q}")


def _resolve(components: Mapping[str, ComponentModel], side: tuple[str, str], locus: str) -> Boundary:
    comp, surf = side
    if comp not in components:
        raise AssemblyError(f"locus {locus!r} references unknown component {comp!r}")
    try:
        return components[comp].boundary_for(surf)
    except KeyError:
        raise AssemblyError(f"locus {locus!r}: component {comp!r} has no boundary {surf!r}") from None


def assemble(components: Iterable[ComponentModel], gluing: Iterable[DoubleLocus],
             triple_curves: Iterable[str] = ()) -> NormalCrossingFiber:
    """Validate gluing data and return the fiber.

    Pairs of components without a locus are simply disjoint.
    """
    components = tuple(components)
    gluing = tuple(gluing)
    by_name: dict[str, ComponentModel] = {}
    for c in components:
        if c.name in by_name:
            raise AssemblyError(f"duplicate component {c.name!r}")
        by_name[c.name] = c

    seen_names, seen_sides = set(), set()
    for locus in gluing:
        if locus.name in seen_names:
            raise AssemblyError(f"duplicate locus {locus.name!r}")
        seen_names.add(locus.name)
        if locus.side_a[0] == locus.side_b[0]:
            raise AssemblyError(f"locus {locus.name!r} glues {locus.side_a[0]!r} to itself")
        for side in (locus.side_a, locus.side_b):
            if side in seen_sides:
                raise AssemblyError(f"boundary {side} is used by two loci")
            seen_sides.add(side)
            b = _resolve(by_name, side, locus.name)
            if b.restriction2.rows != locus.surface.h2.rank:
                raise AssemblyError(
                    f"locus {locus.name!r}: restriction from {side[0]} lands in rank "
                    f"{b.restriction2.rows}, surface has rank {locus.surface.h2.rank}")
    return NormalCrossingFiber(components, gluing, tuple(triple_curves))


def _restriction_rows(fiber: NormalCrossingFiber, locus: DoubleLocus, q: int) -> list[list[int]]:
    ranks = fiber.ranks(q)
    offsets = [sum(ranks[:i]) for i in range(len(ranks))]
    height = locus.surface.h2.rank if q == 2 else 1
    rows = [[0] * sum(ranks) for _ in range(height)]
    for side, sign in ((locus.side_a, 1), (locus.side_b, -1)):
        ci = fiber.index(side[0])
        b = fiber.components[ci].boundary_for(side[1])
        block = b.restriction2.to_int_rows() if q == 2 else [list(b.restriction4)]
        for r in range(height):
            for j, x in enumerate(block[r]):
                rows[r][offsets[ci] + j] += sign * x
    return rows


def compatibility_matrix(fiber: NormalCrossingFiber, q: int) -> ExactMatrix:
    """Stacked difference-of-restrictions map; its kernel is G^q."""
    rows = []
    for locus in fiber.loci:
        rows.extend(_restriction_rows(fiber, locus, q))
    return ExactMatrix.from_rows(rows, cols=sum(fiber.ranks(q)))


class Membership(NamedTuple):
    compatible: bool
    residuals: dict[str, tuple[int, ...]]


def membership_check(fiber: NormalCrossingFiber, cls: GlobalClass) -> Membership:
    """Per-locus residual l_a|locus - l_b|locus; compatible iff all vanish."""
    _check_degree(cls.degree)
    ranks = fiber.ranks(cls.degree)
    if [len(p) for p in cls.parts] != list(ranks):
        raise ShapeError(f"class has part lengths {[len(p) for p in cls.parts]}, fiber expects {list(ranks)}")
    flat = cls.flat()
    residuals = {}
    for locus in fiber.loci:
        rows = _restriction_rows(fiber, locus, cls.degree)
        residuals[locus.name] = tuple(sum(a * x for a, x in zip(r, flat)) for r in rows)
    return Membership(all(not any(v) for v in residuals.values()), residuals)


class CompatibilityKernel(NamedTuple):
    basis: tuple[GlobalClass, ...]
    lattice: Lattice
    matrix: ExactMatrix


def compatibility_kernel(fiber: NormalCrossingFiber, q: int) -> CompatibilityKernel:
    _check_degree(q)
    for locus in fiber.loci:
        if not locus.surface.h1_is_zero:
            raise HypothesisViolation(locus.name, q)
    nu = compatibility_matrix(fiber, q)
    k = integer_kernel_basis(nu)
    basis = tuple(fiber.class_from_flat(q, [int(x) for x in col]) for col in k.columns())
    for g in basis:
        if not membership_check(fiber, g).compatible:
            raise InvariantBreach(f"kernel vector {g.flat()} fails the compatibility equations")
    lattice = Lattice(len(basis), tuple(f"g{i}" for i in range(1, len(basis) + 1)))
    return CompatibilityKernel(basis, lattice, nu)
