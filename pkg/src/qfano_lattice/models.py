"""Cohomology models for the pieces of the central fiber.

All classes are integer vectors in fixed bases.  On the blow-up V1 of Y at
its N points of type 1/2(1,1,1) the H^2 basis is

    B0 = f*h - 1/2 (e_1 + ... + e_N),  e_1, ..., e_N

and half-integral presentations such as ``f*h - sum q_i/2 e_i`` never appear
as stored data.  V2 is the blow-up of Y at the same points and along the
curve C = S n D; E_i is a copy of P^3 glued along two planes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ParityViolation, ScenarioError, ShapeError
from .lattice import ExactMatrix, Lattice


@dataclass(frozen=True)
class QFanoScenario:
    """Numerical data of Y: h^3, N singular points, K_Y ~ -r h, mult of D at each point."""

    h3: Fraction
    N: int
    r: int = 1
    mult_d: tuple[int, ...] | None = None

    def __post_init__(self):
        h3 = Fraction(self.h3)
        object.__setattr__(self, "h3", h3)
        if h3 <= 0:
            raise ScenarioError(f"h^3 must be positive, got {h3}")
        if (2 * h3).denominator != 1:
            raise ScenarioError(f"2*h^3 must be an integer, got h^3 = {h3}")
        if self.N < 1:
            raise ScenarioError(f"need at least one singular point, got N = {self.N}")
        if self.r < 1 or self.r % 2 == 0:
            raise ScenarioError(f"r must be a positive odd integer (K_Y is not Cartier), got {self.r}")
        mult = tuple(self.mult_d) if self.mult_d is not None else (1,) * self.N
        if len(mult) != self.N:
            raise ScenarioError(f"mult_d has {len(mult)} entries for N = {self.N}")
        if any(q < 0 for q in mult):
            raise ScenarioError("multiplicities are nonnegative")
        object.__setattr__(self, "mult_d", mult)


@dataclass(frozen=True)
class WeilClass:
    """The class k*h on Y with multiplicities q_i at the singular points."""

    k: int
    mult: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mult", tuple(self.mult))
        if any(q < 0 for q in self.mult):
            raise ValueError("multiplicities are nonnegative")


@dataclass(frozen=True)
class SurfaceModel:
    """A double-locus surface: its H^2 model and the H^1 = H^3 = 0 flag."""

    name: str
    h2: Lattice
    h1_is_zero: bool = True


@dataclass(frozen=True)
class Boundary:
    """Restriction data from a component to one of its boundary surfaces.

    ``restriction2`` maps H^2(component) -> H^2(surface) (rows = surface rank);
    ``restriction4`` lists the degree of each H^4 basis class on the surface.
    """

    surface: str
    restriction2: ExactMatrix
    restriction4: tuple[int, ...]


@dataclass(frozen=True)
class ComponentModel:
    name: str
    h2: Lattice
    h4: Lattice
    pairing: ExactMatrix
    boundary: tuple[Boundary, ...]

    def __post_init__(self):
        if self.pairing.shape != (self.h2.rank, self.h4.rank):
            raise ShapeError(f"{self.name}: pairing is {self.pairing.shape}, "
                             f"expected {(self.h2.rank, self.h4.rank)}")
        for b in self.boundary:
            if b.restriction2.cols != self.h2.rank:
                raise ShapeError(f"{self.name}->{b.surface}: restriction has {b.restriction2.cols} columns")
            if len(b.restriction4) != self.h4.rank:
                raise ShapeError(f"{self.name}->{b.surface}: H^4 degrees have wrong length")

    def boundary_for(self, surface: str) -> Boundary:
        for b in self.boundary:
            if b.surface == surface:
                return b
        raise KeyError(f"{self.name} has no boundary surface {surface!r}")

    def pair(self, x2: Sequence, y4: Sequence) -> Fraction:
        """Cup product of an H^2 class with an H^4 class."""
        if len(x2) != self.h2.rank or len(y4) != self.h4.rank:
            raise ShapeError(f"{self.name}: coordinate lengths do not match ranks")
        return sum((Fraction(a) * Fraction(b) * self.pairing[i, j]
                    for i, a in enumerate(x2) if a
                    for j, b in enumerate(y4) if b), Fraction(0))

    def triple(self, x: Sequence, y: Sequence, z: Sequence) -> Fraction:
        return self.h2.triple(x, y, z)


def _point_blowup_cubes(h3: Fraction, n: int, extra: int = 0):
    """Triple products in the basis (pullback-minus-half, exceptional planes).

    ``extra`` trailing basis slots get ``None`` (unspecified) wherever touched.
    """
    size = n + 1 + extra
    table = [[[None] * size for _ in range(size)] for _ in range(size)]
    for idx in itertools.product(range(size), repeat=3):
        if any(i > n for i in idx):
            continue
        planes = [i for i in idx if i > 0]
        if not planes:
            val = h3 - Fraction(n, 2)
        elif len(set(planes)) > 1:
            val = Fraction(0)
        else:
            val = Fraction({1: 1, 2: -2, 3: 4}[len(planes)])
        i, j, k = idx
        table[i][j][k] = val
    return tuple(tuple(tuple(c) for c in r) for r in table)


def weil_to_blowup_coords(c: WeilClass, s: QFanoScenario | None = None) -> tuple[int, ...]:
    """Coordinates (k, c_1, ..., c_N) of ``f*(k h) - sum q_i/2 e_i`` in the B0, e_i basis.

    Expanding gives c_i = (k - q_i)/2, which is an integer exactly when
    q_i = k mod 2 for every i.
    """
    if s is not None and len(c.mult) != s.N:
        raise ShapeError(f"{len(c.mult)} multiplicities for N = {s.N}")
    bad = [i + 1 for i, q in enumerate(c.mult) if (c.k - q) % 2]
    if bad:
        raise ParityViolation(bad[0], c.k, c.mult[bad[0] - 1], offending=bad)
    return (c.k,) + tuple((c.k - q) // 2 for q in c.mult)


def blowup_coords_to_weil(coords: Sequence[int]) -> WeilClass:
    """Inverse of :func:`weil_to_blowup_coords`: q_i = k - 2 c_i."""
    k, *cs = coords
    return WeilClass(k, tuple(k - 2 * ci for ci in cs))


def anticanonical_transform_coords(s: QFanoScenario) -> tuple[int, ...]:
    """Proper transform of the anticanonical member D (D ~ r h) on V1."""
    return weil_to_blowup_coords(WeilClass(s.r, s.mult_d), s)


def _plane_row(i: int, width: int) -> list[int]:
    # restriction of (B0, e_1..e_N, ...) to the i-th exceptional plane, in units of its hyperplane class
    row = [0] * width
    row[0] = 1
    row[i] = -2
    return row


def build_v1(s: QFanoScenario) -> ComponentModel:
    n = s.N
    labels2 = ("B0",) + tuple(f"e{i}" for i in range(1, n + 1))
    labels4 = tuple(f"m{i}" for i in range(n + 1))
    h2 = Lattice(n + 1, labels2, trilinear=_point_blowup_cubes(s.h3, n))
    h4 = Lattice(n + 1, labels4)
    dtilde = anticanonical_transform_coords(s)
    boundary = [Boundary("Dtilde", ExactMatrix.identity(n + 1), tuple(dtilde))]
    for i in range(1, n + 1):
        boundary.append(Boundary(
            f"e{i}",
            ExactMatrix.from_rows([_plane_row(i, n + 1)]),
            tuple(int(j == i) for j in range(n + 1)),
        ))
    return ComponentModel("V1", h2, h4, ExactMatrix.identity(n + 1), tuple(boundary))


def build_v2(s: QFanoScenario) -> ComponentModel:
    """Blow-up of Y at the points and along C.

    The last H^2 slot is the exceptional surface G over C, whose triple
    products are left unspecified.  H^4 is spanned by classes n_0..n_N dual
    to M0, f_i and the fiber F of G -> C, with G.F = -1.
    """
    n = s.N
    labels2 = ("M0",) + tuple(f"f{i}" for i in range(1, n + 1)) + ("G",)
    labels4 = tuple(f"n{i}" for i in range(n + 1)) + ("F",)
    h2 = Lattice(n + 2, labels2, trilinear=_point_blowup_cubes(s.h3, n, extra=1))
    h4 = Lattice(n + 2, labels4)
    pairing = [[int(i == j) for j in range(n + 2)] for i in range(n + 2)]
    pairing[n + 1][n + 1] = -1

    dtilde = anticanonical_transform_coords(s)
    # D' = r M0 + sum c_i f_i - G, so F.D' = 1.  G meets D' along C = S|D ~ 2r f*h.
    g_on_d = [2 * s.r] + [s.r] * n
    res_d = [[int(i == j) for j in range(n + 1)] + [g_on_d[i]] for i in range(n + 1)]
    boundary = [Boundary("Dtilde", ExactMatrix.from_rows(res_d), tuple(dtilde) + (1,))]
    for i in range(1, n + 1):
        boundary.append(Boundary(
            f"f{i}",
            ExactMatrix.from_rows([_plane_row(i, n + 2)]),
            tuple(int(j == i) for j in range(n + 2)),
        ))
    return ComponentModel("V2", h2, h4, ExactMatrix.from_rows(pairing), tuple(boundary))


def build_e(i: int) -> ComponentModel:
    """The i-th P^3 component, meeting V1 and V2 in the planes e_i and f_i."""
    h2 = Lattice(1, ("eta",), trilinear=(((Fraction(1),),),))
    h4 = Lattice(1, ("lambda",))
    plane = ExactMatrix.identity(1)
    boundary = (Boundary(f"e{i}", plane, (1,)), Boundary(f"f{i}", plane, (1,)))
    return ComponentModel(f"E{i}", h2, h4, ExactMatrix.identity(1), boundary)


def plane_surface(name: str) -> SurfaceModel:
    return SurfaceModel(name, Lattice(1, ("omega",), bilinear=ExactMatrix.identity(1)), True)


def build_dtilde_surface(s: QFanoScenario) -> SurfaceModel:
    """Model of the K3 surface D~ = V1 n V2 on the span of restricted classes.

    Basis: beta = B0|D~ and gamma_i = e_i|D~ (the curves over the points).
    The intersection form is V1's triple product contracted with D~.
    """
    v1 = build_v1(s)
    d = anticanonical_transform_coords(s)
    n = s.N
    basis = [[int(i == j) for j in range(n + 1)] for i in range(n + 1)]
    form = ExactMatrix.from_rows(
        [[v1.triple(x, y, d) for y in basis] for x in basis], cols=n + 1
    )
    labels = ("beta",) + tuple(f"gamma{i}" for i in range(1, n + 1))
    return SurfaceModel("Dtilde", Lattice(n + 1, labels, bilinear=form), True)
