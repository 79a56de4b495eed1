"""Exact lattice engine for smoothings of normal-crossing 3-fold degenerations."""

from .errors import (
    AssemblyError,
    CertificateError,
    ConfigError,
    DegreeMismatch,
    HypothesisViolation,
    InvariantBreach,
    LatticeError,
    NoIntegerSolution,
    NonIntegralError,
    ParityViolation,
    ReferenceMismatch,
    ScenarioError,
    ShapeError,
    UnspecifiedIntersection,
)
from .lattice import (
    EmbeddingVerdict,
    ExactMatrix,
    Lattice,
    SmithDecomposition,
    hermite_normal_form,
    integer_kernel_basis,
    integer_solve,
    is_injective_primitive,
    is_unimodular,
    smith_normal_form,
)
from .models import (
    ComponentModel,
    QFanoScenario,
    SurfaceModel,
    WeilClass,
    anticanonical_transform_coords,
    build_e,
    build_v1,
    build_v2,
    weil_to_blowup_coords,
)
from .degeneration import (
    DoubleLocus,
    GlobalClass,
    NormalCrossingFiber,
    assemble,
    compatibility_kernel,
    membership_check,
)
from .smoothing import (
    PairingCertificate,
    SmoothFiberLattice,
    certify,
    induced_cup_product,
    mixed_zero_pairing,
)
from .pipeline import (
    InvariantRecord,
    VerificationReport,
    build_standard_scenario,
    primitivity_pipeline,
    report_invariants,
    run_all,
    run_scenario,
    solve_pullback_scale,
)

__version__ = "0.1.0"
