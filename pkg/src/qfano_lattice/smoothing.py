"""Cup products on G-classes and the unimodular pairing certificate.

Products of classes on the central fiber are computed component by
component and summed, with every cross-component term set to zero.  A
unimodular (a_i . b_j) matrix between k degree-2 and k degree-4 classes
identifies <a_1, ..., a_k> with H^2 of the smooth fiber (mod torsion),
provided h^{2,0} of the smooth fiber vanishes and k = h^2.  Those two
Hodge-theoretic facts are premises carried on the certificate; only the
arithmetic is checked here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .degeneration import GlobalClass, NormalCrossingFiber, membership_check
from .errors import CertificateError, DegreeMismatch, ShapeError
from .lattice import ExactMatrix, is_unimodular

FIBER_DIMENSION = 3
DIVISOR_DEGREE = 2
CURVE_DEGREE = 2 * FIBER_DIMENSION - 2


def _as_int(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def _check_parts(fiber: NormalCrossingFiber, cls: GlobalClass):
    if len(cls.parts) != len(fiber.components):
        raise ShapeError(f"class has {len(cls.parts)} parts for {len(fiber.components)} components")


def mixed_zero_pairing(a: GlobalClass, b: GlobalClass, fiber: NormalCrossingFiber):
    """Sum over components of a_alpha . b_alpha."""
    if a.degree != DIVISOR_DEGREE or b.degree != CURVE_DEGREE:
        raise DegreeMismatch(f"pairing needs degrees ({DIVISOR_DEGREE}, {CURVE_DEGREE}), "
                             f"got ({a.degree}, {b.degree})")
    _check_parts(fiber, a)
    _check_parts(fiber, b)
    total = sum((c.pair(x, y) for c, x, y in zip(fiber.components, a.parts, b.parts)), Fraction(0))
    return _as_int(total)


def mixed_zero_triple(a: GlobalClass, b: GlobalClass, c: GlobalClass, fiber: NormalCrossingFiber):
    """Triple cup product of degree-2 classes, component-wise."""
    for x in (a, b, c):
        if x.degree != DIVISOR_DEGREE:
            raise DegreeMismatch(f"triple product needs degree-{DIVISOR_DEGREE} classes, got {x.degree}")
        _check_parts(fiber, x)
    total = sum((comp.triple(x, y, z) for comp, x, y, z in zip(fiber.components, a.parts, b.parts, c.parts)),
                Fraction(0))
    return _as_int(total)


@dataclass(frozen=True)
class PairingCertificate:
    a_classes: tuple[GlobalClass, ...]
    b_classes: tuple[GlobalClass, ...]
    matrix: ExactMatrix
    unimodular: bool
    k: int
    h20_zero: bool | None
    issues: tuple[str, ...] = ()
    dimension: int = FIBER_DIMENSION

    @property
    def admissible(self) -> bool:
        return not self.issues

    @property
    def determinant(self) -> int:
        return int(self.matrix.det())

    @property
    def valid(self) -> bool:
        """Admissible and unimodular: the certificate supports the lattice identification."""
        return self.admissible and self.unimodular


def certify(a_classes: Sequence[GlobalClass], b_classes: Sequence[GlobalClass],
            fiber: NormalCrossingFiber, k: int, h20_zero: bool | None = None) -> PairingCertificate:
    """Compute the (a_i . b_j) matrix and decide unimodularity exactly.

    Classes that are not compatible on the fiber, or a missing h^{2,0} = 0
    premise, make the certificate inadmissible; the matrix is still reported.
    """
    a_classes, b_classes = tuple(a_classes), tuple(b_classes)
    if len(a_classes) != k or len(b_classes) != k:
        raise ShapeError(f"need k = {k} classes on each side, got {len(a_classes)} and {len(b_classes)}")
    issues = []
    if h20_zero is not True:
        issues.append("premise h^{2,0}(W_t) = 0 not asserted")
    for side, classes in (("a", a_classes), ("b", b_classes)):
        for i, cls in enumerate(classes, 1):
            m = membership_check(fiber, cls)
            if not m.compatible:
                bad = {name: r for name, r in m.residuals.items() if any(r)}
                issues.append(f"{side}_{i} is not in G^{cls.degree}: residuals {bad}")
    matrix = ExactMatrix.from_rows(
        [[mixed_zero_pairing(a, b, fiber) for b in b_classes] for a in a_classes], cols=k
    )
    return PairingCertificate(a_classes, b_classes, matrix, is_unimodular(matrix), k, h20_zero, tuple(issues))


@dataclass(frozen=True)
class SmoothFiberLattice:
    """H^2 of the smooth fiber mod torsion, with its cubic form."""

    rank: int
    cup: tuple[tuple[tuple[int, ...], ...], ...]
    certificate: PairingCertificate = field(repr=False)

    def cube(self, coords: Sequence[int]) -> int:
        return sum(coords[i] * coords[j] * coords[l] * self.cup[i][j][l]
                   for i, j, l in itertools.product(range(self.rank), repeat=3))


def induced_cup_product(cert: PairingCertificate, fiber: NormalCrossingFiber) -> SmoothFiberLattice:
    if not cert.unimodular:
        raise CertificateError(f"pairing matrix has determinant {cert.determinant}; not unimodular")
    if not cert.admissible:
        raise CertificateError("certificate is inadmissible: " + "; ".join(cert.issues))
    a = cert.a_classes
    k = cert.k
    cup = [[[None] * k for _ in range(k)] for _ in range(k)]
    for i, j, l in itertools.product(range(k), repeat=3):
        val = mixed_zero_triple(a[i], a[j], a[l], fiber)
        if isinstance(val, Fraction):
            raise CertificateError(f"cup product a_{i + 1} a_{j + 1} a_{l + 1} = {val} is not an integer")
        cup[i][j][l] = val
    return SmoothFiberLattice(k, tuple(tuple(tuple(c) for c in r) for r in cup), cert)
