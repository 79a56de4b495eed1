"""Exception hierarchy shared by every layer of the engine."""


class LatticeError(Exception):
    """Base class for all errors raised by qfano_lattice."""


class NonIntegralError(LatticeError, ValueError):
    """An integral matrix was required but an entry has a denominator."""


class ShapeError(LatticeError, ValueError):
    """Matrix or coordinate dimensions do not fit the operation."""


class ScenarioError(LatticeError, ValueError):
    """Scenario parameters violate their invariants (h^3 <= 0, even r, ...)."""


class ParityViolation(LatticeError):
    """A Weil class whose multiplicity parity differs from its degree.

    ``index`` is 1-based, matching the labels e_1, ..., e_N.
    """

    def __init__(self, index, k, q, offending=None):
        self.index = index
        self.k = k
        self.q = q
        self.offending = tuple(offending) if offending is not None else (index,)
        super().__init__(
            f"parity violation at index {index}: multiplicity {q} is not "
            f"congruent to degree {k} mod 2 (class not Cartier-compatible there)"
        )


class UnspecifiedIntersection(LatticeError):
    """A triple product touched an intersection number the model leaves open."""


class AssemblyError(LatticeError, ValueError):
    """Gluing data for a normal-crossing fiber is inconsistent."""


class HypothesisViolation(LatticeError):
    """A double locus lacks the vanishing needed for the Mayer-Vietoris step."""

    def __init__(self, locus, degree):
        self.locus = locus
        self.degree = degree
        super().__init__(
            f"double locus {locus!r} is not flagged with H^{degree - 1} = 0; "
            f"refusing to compute G^{degree}"
        )


class CertificateError(LatticeError):
    """A pairing certificate cannot support the requested conclusion."""


class NoIntegerSolution(LatticeError, ValueError):
    """The cube ratio is not the cube of a positive integer."""


class ReferenceMismatch(LatticeError):
    """A computed invariant contradicts the bundled reference value."""


class InvariantBreach(LatticeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class ConfigError(LatticeError, ValueError):
    """Scenario configuration could not be parsed."""


class DegreeMismatch(LatticeError, ValueError):
    """Classes of the wrong cohomological degree were combined."""
