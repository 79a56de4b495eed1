"""End-to-end verification run for a Q-Fano scenario and its Calabi-Yau double cover.

The run assembles the central fiber W_0 = V1 u V2 u E_1 u ... u E_N, checks
that H and H' are compatible classes, certifies the 1x1 pairing, reads off
H_X^3 from the induced cup product, solves pi*(h) = a H_X for a, and feeds
the resulting lattice map into the primitivity deduction.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, NamedTuple

from .degeneration import (
    DoubleLocus,
    GlobalClass,
    NormalCrossingFiber,
    assemble,
    compatibility_kernel,
    membership_check,
)
from .errors import (
    ConfigError,
    InvariantBreach,
    LatticeError,
    NoIntegerSolution,
    ReferenceMismatch,
)
from .lattice import EmbeddingVerdict, ExactMatrix, integer_solve, is_injective_primitive
from .models import (
    QFanoScenario,
    anticanonical_transform_coords,
    build_dtilde_surface,
    build_e,
    build_v1,
    build_v2,
    plane_surface,
)
from .smoothing import PairingCertificate, certify, induced_cup_product, mixed_zero_pairing

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Keyed by (h^3, N, r).  Values are stated, not derived, so they carry provenance "reference".
REFERENCE_INVARIANTS = {
    (Fraction(4), 4, 1): {"c2HX": 44, "eulerX": -88},
}


def build_standard_fiber(s: QFanoScenario) -> NormalCrossingFiber:
    v1, v2 = build_v1(s), build_v2(s)
    es = [build_e(i) for i in range(1, s.N + 1)]
    loci = [DoubleLocus(build_dtilde_surface(s), ("V1", "Dtilde"), ("V2", "Dtilde"))]
    for i in range(1, s.N + 1):
        loci.append(DoubleLocus(plane_surface(f"e{i}"), ("V1", f"e{i}"), (f"E{i}", f"e{i}")))
        loci.append(DoubleLocus(plane_surface(f"f{i}"), ("V2", f"f{i}"), (f"E{i}", f"f{i}")))
    triple = [f"e{i}^f{i}" for i in range(1, s.N + 1)]
    return assemble([v1, v2, *es], loci, triple)


class StandardScenario(NamedTuple):
    scenario: QFanoScenario
    fiber: NormalCrossingFiber
    H: GlobalClass
    H_prime: GlobalClass
    d: int


def build_standard_scenario(s: QFanoScenario, d_override: int | None = None, b_scale: int = 1) -> StandardScenario:
    """Fiber plus the distinguished classes H in G^2 and H' = (m0, dF, 0, ..., 0) in G^4.

    ``d`` is m0 . D~.  ``d_override`` replaces the class m0 that defines d by
    ``d_override * m0`` and leaves the F-coefficient alone, so any value other
    than 1 breaks both the pairing and D~-compatibility.  ``b_scale`` multiplies
    all of H'.
    """
    fiber = build_standard_fiber(s)
    v1 = fiber.component("V1")
    n = s.N
    unit = lambda size, i: tuple(int(j == i) for j in range(size))  # noqa: E731

    m0 = unit(n + 1, 0)
    d = int(v1.pair(anticanonical_transform_coords(s), m0))

    H = fiber.make_class(2, {
        "V1": unit(n + 1, 0),
        "V2": unit(n + 2, 0),
        **{f"E{i}": (1,) for i in range(1, n + 1)},
    })
    c = 1 if d_override is None else d_override
    f_coeff = tuple(d * x for x in unit(n + 2, n + 1))
    H_prime = fiber.make_class(4, {"V1": tuple(c * x for x in m0), "V2": f_coeff}).scale(b_scale)
    return StandardScenario(s, fiber, H, H_prime, d)


def _icbrt(n: int) -> int:
    lo, hi = 0, 1
    while hi ** 3 <= n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** 3 <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


def solve_pullback_scale(pullback_cube, generator_cube) -> int:
    """The positive integer a with a^3 * generator_cube == pullback_cube."""
    x, y = Fraction(pullback_cube), Fraction(generator_cube)
    if x <= 0 or y <= 0:
        raise ValueError(f"both cubes must be positive, got {x} and {y}")
    ratio = x / y
    if ratio.denominator != 1:
        raise NoIntegerSolution(f"{x}/{y} = {ratio} is not an integer, let alone a cube")
    a = _icbrt(ratio.numerator)
    if a ** 3 != ratio:
        raise NoIntegerSolution(f"{ratio} is not the cube of a positive integer")
    return a


@dataclass(frozen=True)
class Premise:
    key: str
    statement: str
    anchor: str
    asserted: bool | None


PREMISE_TEXT = {
    "lefschetzPrimitive": (
        "i_X^*: Pic(X)_f -> Pic(X_n)_f is injective and primitive",
        "Lefschetz hyperplane section theorem on the Calabi-Yau double cover X",
    ),
    "h20Zero": (
        "h^{2,0}(W_t) = 0 and h^2(W_t) = 1 for the smooth fiber",
        "hypothesis of the smoothing-lattice theorem; X is Calabi-Yau of Picard number one",
    ),
    "sigmaInjective": (
        "sigma = (pi|X_n)^*: Cl(Y_n)_f -> Pic(X_n)_f is injective",
        "commutative square i_X^* o pi^* = sigma o i_Y^*",
    ),
}


class PrimitivityVerdict(NamedTuple):
    passed: bool
    embedding: EmbeddingVerdict
    conclusions: tuple[str, ...]
    reason: str | None


def primitivity_pipeline(lattice_map, lefschetz_primitive: bool | None,
                         sigma_injective: bool | None) -> PrimitivityVerdict:
    """Deduce that Cl(Y) -> Cl(Y_n)_f is injective and primitive.

    ``lattice_map`` is pi^*: Cl(Y) -> Pic(X)_f in bases h, H_X.  The factor
    i_X^* enters only through the Lefschetz premise; the deduction rule is
    fixed: a primitive composite sigma o i_Y^* with sigma injective forces
    i_Y^* to be injective and primitive.
    """
    verdict = is_injective_primitive(lattice_map)
    if not verdict.primitive:
        why = "not injective" if not verdict.injective else f"elementary divisors {verdict.elementary_divisors}"
        return PrimitivityVerdict(False, verdict, (), f"pi^* is not injective and primitive ({why})")
    lines = ["pi^*: Cl(Y) -> Pic(X)_f is injective and primitive"]
    if lefschetz_primitive is not True:
        return PrimitivityVerdict(False, verdict, tuple(lines), "Lefschetz premise on i_X^* not asserted")
    lines.append("i_X^* o pi^* is injective and primitive (composite of primitive embeddings)")
    if sigma_injective is not True:
        return PrimitivityVerdict(False, verdict, tuple(lines), "injectivity premise on sigma not asserted")
    lines.append("i_Y^*: Cl(Y) -> Cl(Y_n)_f is injective and primitive")
    return PrimitivityVerdict(True, verdict, tuple(lines), None)


@dataclass(frozen=True)
class InvariantRecord:
    HX3: int
    c2HX: int | None
    eulerX: int | None
    provenance: dict[str, str]

    def as_tuple(self):
        return (self.HX3, self.c2HX, self.eulerX)


def _invariant_record(s: QFanoScenario, hx3: int, e_y: int | None, e_s: int | None) -> InvariantRecord:
    if s.h3.denominator == 1 and (hx3 <= 0 or hx3 % 2):
        raise InvariantBreach(f"H_X^3 = {hx3} should be a positive even integer for integral h^3")
    prov = {"HX3": "computed"}
    ref = REFERENCE_INVARIANTS.get((s.h3, s.N, s.r))
    c2, euler = None, None
    if ref is not None:
        c2, euler = ref["c2HX"], ref["eulerX"]
        prov["c2HX"] = prov["eulerX"] = "reference"
    if e_y is not None and e_s is not None:
        # topological count for a double cover branched over S and the N points
        computed = 2 * e_y - e_s - s.N
        if euler is not None and computed != euler:
            raise ReferenceMismatch(f"e(X) = 2*{e_y} - {e_s} - {s.N} = {computed}, reference is {euler}")
        euler = computed
        prov["eulerX"] = "computed"
    return InvariantRecord(hx3, c2, euler, prov)


def report_invariants(s: QFanoScenario, e_y: int | None = None, e_s: int | None = None) -> InvariantRecord:
    """Invariant record with H_X^3 obtained from the pairing certificate chain."""
    ps = build_standard_scenario(s)
    cert = certify([ps.H], [ps.H_prime], ps.fiber, k=1, h20_zero=True)
    lat = induced_cup_product(cert, ps.fiber)
    return _invariant_record(s, lat.cup[0][0][0], e_y, e_s)


# --- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    scenario: QFanoScenario
    name: str = "scenario"
    d_override: int | None = None
    b_scale: int = 1
    premises: dict[str, bool | None] = field(default_factory=dict)
    e_y: int | None = None
    e_s: int | None = None


def _rational(value, what: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(f"{what} must be an integer or a 'p/q' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what}: cannot parse {value!r} as a rational") from exc


def _int(value, what: str, optional: bool = False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{what} must be an integer, got {value!r}")
    return value


def parse_config(data: dict[str, Any]) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("h3", "N"):
        if key not in data:
            raise ConfigError(f"config is missing {key!r}")
    h3 = _rational(data["h3"], "h3")
    n = _int(data["N"], "N")
    r = _int(data.get("r", 1), "r")
    mult = data.get("multD")
    if mult is not None:
        if not isinstance(mult, list):
            raise ConfigError("multD must be a list of integers")
        mult = tuple(_int(q, "multD entry") for q in mult)
    overrides = data.get("overrides") or {}
    premises_in = data.get("premises") or {}
    unknown = set(premises_in) - set(PREMISE_TEXT)
    if unknown:
        raise ConfigError(f"unknown premises {sorted(unknown)}")
    premises = {}
    for key in PREMISE_TEXT:
        v = premises_in.get(key)
        if v is not None and not isinstance(v, bool):
            raise ConfigError(f"premise {key} must be true/false")
        premises[key] = v
    geometry = data.get("geometry") or {}
    try:
        scenario = QFanoScenario(h3, n, r, mult)
    except LatticeError as exc:
        raise ConfigError(str(exc)) from exc
    return ScenarioConfig(
        scenario=scenario,
        name=str(data.get("name", "scenario")),
        d_override=_int(overrides.get("d"), "overrides.d", optional=True),
        b_scale=_int(overrides.get("bScale", 1), "overrides.bScale"),
        premises=premises,
        e_y=_int(geometry.get("eY"), "geometry.eY", optional=True),
        e_s=_int(geometry.get("eS"), "geometry.eS", optional=True),
    )


def bundled_configs() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("qfano_lattice.data").iterdir() if p.name.endswith(".json"))


def load_config(path) -> ScenarioConfig:
    """Read a JSON config from ``path``; a bare bundled name such as ``takagi-4-4`` also works."""
    p = Path(path)
    try:
        if p.exists():
            text = p.read_text(encoding="utf-8")
        elif str(path) in bundled_configs():
            text = resources.files("qfano_lattice.data").joinpath(f"{path}.json").read_text(encoding="utf-8")
        else:
            raise ConfigError(f"no such config file or bundled config: {path}")
        data = json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)


# --- report ------------------------------------------------------------------

@dataclass
class Fact:
    name: str
    passed: bool
    detail: str


@dataclass
class VerificationReport:
    scenario: dict[str, Any]
    premises: list[Premise] = field(default_factory=list)
    facts: list[Fact] = field(default_factory=list)
    conclusions: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    invariants: InvariantRecord | None = None
    cube_contributions: dict[str, str] = field(default_factory=dict)
    metrics: dict[str, Any] = field(default_factory=dict)
    error: str | None = None
    internal_error: bool = False

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.facts) and all(f.passed for f in self.facts)

    @property
    def exit_status(self) -> int:
        if self.internal_error:
            return 3
        return 0 if self.passed else 1

    def fact(self, name: str) -> Fact:
        return next(f for f in self.facts if f.name == name)

    def to_dict(self) -> dict[str, Any]:
        inv = None
        if self.invariants is not None:
            inv = {"HX3": self.invariants.HX3, "c2HX": self.invariants.c2HX,
                   "eulerX": self.invariants.eulerX, "provenance": dict(self.invariants.provenance)}
        return {
            "schemaVersion": SCHEMA_VERSION,
            "scenario": self.scenario,
            "premises": [{"key": p.key, "statement": p.statement, "anchor": p.anchor, "asserted": p.asserted}
                         for p in self.premises],
            "computedFacts": [{"name": f.name, "passed": f.passed, "detail": f.detail} for f in self.facts],
            "conclusions": list(self.conclusions),
            "warnings": list(self.warnings),
            "invariants": inv,
            "cubeContributions": dict(self.cube_contributions),
            "metrics": dict(self.metrics),
            "error": self.error,
            "passed": self.passed,
            "exitStatus": self.exit_status,
        }

    def render_text(self) -> str:
        sc = self.scenario
        out = [f"scenario {sc.get('name')}: h^3 = {sc.get('h3')}, N = {sc.get('N')}, r = {sc.get('r')}, "
               f"multD = {sc.get('multD')}"]
        out.append("premises (assumed, not computed):")
        out += [f"  - [{'asserted' if p.asserted else 'NOT ASSERTED'}] {p.statement}  ({p.anchor})"
                for p in self.premises]
        out.append("computed facts:")
        out += [f"  {'PASS' if f.passed else 'FAIL'}  {f.name}: {f.detail}" for f in self.facts]
        if self.warnings:
            out.append("warnings:")
            out += [f"  ! {w}" for w in self.warnings]
        if self.invariants is not None:
            inv = self.invariants
            prov = inv.provenance
            out.append("invariants (H_X^3, c2(X).H_X, e(X)) = "
                       f"({inv.HX3}, {inv.c2HX}, {inv.eulerX})  "
                       + ", ".join(f"{k}: {v}" for k, v in prov.items()))
        if self.conclusions:
            out.append("conclusions:")
            out += [f"  => {c}" for c in self.conclusions]
        if self.error:
            out.append(f"error: {self.error}")
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out)


def _scenario_echo(cfg: ScenarioConfig) -> dict[str, Any]:
    s = cfg.scenario
    return {"name": cfg.name, "h3": str(s.h3), "N": s.N, "r": s.r, "multD": list(s.mult_d),
            "overrides": {"d": cfg.d_override, "bScale": cfg.b_scale}}


def run_scenario(cfg: ScenarioConfig) -> VerificationReport:
    report = VerificationReport(_scenario_echo(cfg))
    report.premises = [Premise(k, *PREMISE_TEXT[k], cfg.premises.get(k)) for k in PREMISE_TEXT]
    try:
        _run_stages(cfg, report)
    except InvariantBreach as exc:
        report.error = f"internal invariant breach: {exc}"
        report.internal_error = True
    except LatticeError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
    log.debug("scenario %s finished: passed=%s", cfg.name, report.passed)
    return report


def _run_stages(cfg: ScenarioConfig, report: VerificationReport):
    s = cfg.scenario
    add: Callable[[str, bool, str], None] = lambda n, ok, d: report.facts.append(Fact(n, bool(ok), d))  # noqa: E731

    ps = build_standard_scenario(s, cfg.d_override, cfg.b_scale)
    fiber = ps.fiber
    blowup_cube = s.h3 - Fraction(s.N, 2)
    if blowup_cube.denominator != 1:
        report.warnings.append(
            f"B0^3 = h^3 - N/2 = {blowup_cube} is not an integer; no smooth blow-up has these "
            "invariants, the arithmetic is carried out over Q")

    flags = all(l.surface.h1_is_zero for l in fiber.loci)
    add("vanishing hypothesis flags", flags,
        f"H^1 = H^3 = 0 recorded on all {len(fiber.loci)} double loci")
    report.conclusions.append(f"d = m0 . D~ = {ps.d}")
    report.metrics["d"] = ps.d

    g2 = compatibility_kernel(fiber, 2)
    g4 = compatibility_kernel(fiber, 4)
    for label, cls, kern in (("H in G^2(W0)", ps.H, g2), ("H' in G^4(W0)", ps.H_prime, g4)):
        m = membership_check(fiber, cls)
        bad = {k: v for k, v in m.residuals.items() if any(v)}
        add(label, m.compatible, "all residuals zero" if m.compatible else f"nonzero residuals {bad}")
        if m.compatible:
            cols = ExactMatrix.from_columns([b.flat() for b in kern.basis], rows=len(cls.flat()))
            if integer_solve(cols, cls.flat()) is None:
                raise InvariantBreach(f"{label}: compatible class outside the kernel span")
    report.conclusions.append(f"rank G^2(W0) = {g2.lattice.rank}, rank G^4(W0) = {g4.lattice.rank}")

    pairing = mixed_zero_pairing(ps.H, ps.H_prime, fiber)
    report.metrics["pairing"] = str(pairing)
    add("H . H' = 1", pairing == 1, f"H . H' = {pairing}")

    cert: PairingCertificate = certify([ps.H], [ps.H_prime], fiber, k=1,
                                       h20_zero=cfg.premises.get("h20Zero"))
    report.metrics.update(determinant=cert.determinant, unimodular=cert.unimodular)
    add("pairing certificate", cert.valid,
        f"matrix {[[int(x) for x in r] for r in cert.matrix.entries]}, det = {cert.determinant}, "
        f"unimodular = {cert.unimodular}" + (f"; issues: {'; '.join(cert.issues)}" if cert.issues else ""))
    if not cert.valid:
        return

    lattice = induced_cup_product(cert, fiber)
    hx3 = lattice.cup[0][0][0]
    report.metrics["HX3"] = hx3
    for comp, part in zip(fiber.components, ps.H.parts):
        report.cube_contributions[comp.name] = str(comp.triple(part, part, part))
    expected = 2 * s.h3
    add("H^3 = 2 h^3", hx3 == expected, f"H^3 = {hx3}, 2 h^3 = {expected}")
    report.conclusions.append(f"<H> = H^2(W_t, Z)_f with H^3 = {hx3}")

    pull_cube = 2 * s.h3  # (pi^* h)^3 = deg(pi) h^3
    try:
        a = solve_pullback_scale(pull_cube, hx3)
    except NoIntegerSolution as exc:
        add("pi^*(h) = a H_X with a = 1", False, str(exc))
        return
    report.metrics["a"] = a
    add("pi^*(h) = a H_X with a = 1", a == 1, f"a^3 * {hx3} = {pull_cube} gives a = {a}")
    if a == 1:
        report.conclusions.append("pi^*: Cl(Y) -> Pic(X)_f is a bijection")

    prim = primitivity_pipeline(ExactMatrix.from_rows([[a]]), cfg.premises.get("lefschetzPrimitive"),
                                cfg.premises.get("sigmaInjective"))
    add("pi^* injective and primitive", prim.embedding.primitive,
        f"elementary divisors {prim.embedding.elementary_divisors}")
    add("Cl(Y) -> Cl(Y_n)_f deduction", prim.passed, prim.reason or "premise chain complete")
    report.conclusions.extend(prim.conclusions[1:])

    report.invariants = _invariant_record(s, hx3, cfg.e_y, cfg.e_s)


def run_all(config_path) -> VerificationReport:
    """Load a config and run every stage; ``report.exit_status`` is the process status.

    Raises :class:`ConfigError` when the config cannot be parsed (status 2).
    """
    return run_scenario(load_config(config_path))


def sweep_configs(h3_max=10, n_max=6, rs=(1, 3)):
    """Configs for h^3 in {1/2, 1, ..., h3_max} x N in 1..n_max x r in rs, premises asserted."""
    premises = {k: True for k in PREMISE_TEXT}
    h3_max = Fraction(h3_max)
    steps = int(2 * h3_max)
    for twice in range(1, steps + 1):
        for n in range(1, n_max + 1):
            for r in rs:
                s = QFanoScenario(Fraction(twice, 2), n, r)
                yield ScenarioConfig(s, name=f"sweep-{twice}/2-{n}-{r}", premises=premises)
