"""Acceptance criteria, one marked test each; the summary prints a PASS/FAIL line per criterion."""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from qfano_lattice.degeneration import compatibility_kernel, compatibility_matrix, membership_check
from qfano_lattice.errors import ParityViolation
from qfano_lattice.lattice import ExactMatrix, is_injective_primitive, smith_normal_form
from qfano_lattice.models import QFanoScenario, WeilClass, build_v1, weil_to_blowup_coords
from qfano_lattice.pipeline import (
    PREMISE_TEXT,
    ScenarioConfig,
    build_standard_scenario,
    run_all,
    run_scenario,
    sweep_configs,
)
from qfano_lattice.smoothing import certify, induced_cup_product, mixed_zero_pairing

from oracles import (
    blowup_basis_in_primitives,
    cokernel_oracle,
    expand_triple,
    invariant_factors_by_minors,
    leibniz_det,
    rational_solve,
)

ALL_TRUE = {k: True for k in PREMISE_TEXT}


@pytest.mark.criterion(1, "bundled run: H_X^3 = 8, (8, 44, -88), three premises")
def test_headline():
    rep = run_all("takagi-4-4")
    assert rep.passed and rep.exit_status == 0
    inv = rep.invariants
    assert inv.HX3 == 8 and isinstance(inv.HX3, int)
    assert inv.as_tuple() == (8, 44, -88)
    assert inv.provenance["c2HX"] == "reference" and inv.provenance["eulerX"] == "reference"
    assert len(rep.premises) == 3 and all(p.asserted for p in rep.premises)
    assert any("injective and primitive" in c for c in rep.conclusions)
    print(f"criterion 1: HX3={inv.HX3} c2HX={inv.c2HX} eulerX={inv.eulerX}")


@pytest.mark.criterion(2, "mixed-zero pairing H . H' = 1")
def test_pairing():
    ps = build_standard_scenario(QFanoScenario(4, 4, 1))
    value = mixed_zero_pairing(ps.H, ps.H_prime, ps.fiber)
    assert value == 1
    print(f"criterion 2: H.H' = {value}")


@pytest.mark.criterion(3, "sweep: unimodular certificate and H^3 = 2 h^3")
def test_sweep():
    cases = list(sweep_configs(h3_max=10, n_max=6, rs=(1, 3)))
    pairs = {(c.scenario.h3, c.scenario.N) for c in cases}
    assert len(pairs) == 120 and len(cases) == 240
    for cfg in cases:
        s = cfg.scenario
        ps = build_standard_scenario(s)
        cert = certify([ps.H], [ps.H_prime], ps.fiber, k=1, h20_zero=True)
        assert cert.unimodular and cert.valid, cfg.name
        hx3 = induced_cup_product(cert, ps.fiber).cup[0][0][0]
        assert hx3 == 2 * s.h3, cfg.name
        rep = run_scenario(cfg)
        assert rep.passed, (cfg.name, rep.error)
    print(f"criterion 3: {len(pairs)} (h3, N) pairs x r in {{1, 3}} = {len(cases)} runs")


@pytest.mark.criterion(4, "blow-up intersection numbers match the expansion oracle")
def test_blowup_oracle():
    rng = random.Random(2024)
    for _ in range(20):
        h3 = Fraction(rng.randint(1, 40), 2)
        n = rng.randint(1, 6)
        v1 = build_v1(QFanoScenario(h3, n))
        prim = blowup_basis_in_primitives(n)
        for i, j, k in itertools.product(range(n + 1), repeat=3):
            assert v1.h2.trilinear[i][j][k] == expand_triple(prim[i], prim[j], prim[k], h3), (h3, n, i, j, k)
        assert v1.h2.trilinear[0][0][0] == h3 - Fraction(n, 2)
    print("criterion 4: 20 scenarios agree")


def _parity_oracle(k, q):
    """Either the first index (1-based) with k - q_i odd, or the integer coefficients of e_i."""
    for i, x in enumerate(q, 1):
        if (k - x) % 2:
            return i
    # k f*h - sum q_i/2 e_i rewritten with B0 = f*h - 1/2 sum e_i
    return (k,) + tuple(Fraction(k, 2) - Fraction(x, 2) for x in q)


@pytest.mark.criterion(5, "Weil -> blow-up coordinates agree with exhaustive parity enumeration")
def test_parity_brute_force():
    count = 0
    for n in range(1, 4):
        for k in range(7):
            for q in itertools.product(range(7), repeat=n):
                expected = _parity_oracle(k, q)
                if isinstance(expected, int):
                    with pytest.raises(ParityViolation) as exc:
                        weil_to_blowup_coords(WeilClass(k, q))
                    assert exc.value.index == expected
                else:
                    assert weil_to_blowup_coords(WeilClass(k, q)) == expected
                count += 1
    print(f"criterion 5: {count} cases")


# Coordinate subsets for the saturation check: each touches every locus type
# (D~, the planes e_i and f_i, and through G the curve C on D~).
_SUBSETS = [
    ("V1.B0", "V1.e1", "V2.M0", "V2.f1", "E1.eta", "E2.eta", "E3.eta", "E4.eta"),
    ("V1.B0", "V1.e1", "V1.e2", "V2.M0", "V2.f1", "V2.f2", "E1.eta", "E2.eta"),
    ("V1.B0", "V1.e1", "V2.M0", "V2.f1", "V2.G", "E1.eta", "E2.eta", "E3.eta"),
]


@pytest.mark.criterion(6, "compatibility kernel is saturated on the bundled fiber")
def test_kernel_saturation():
    ps = build_standard_scenario(QFanoScenario(4, 4, 1))
    fiber = ps.fiber
    labels = fiber.labels(2)
    width = len(labels)
    basis = [g.flat() for g in compatibility_kernel(fiber, 2).basis]
    nu = np.array(compatibility_matrix(fiber, 2).to_int_rows(), dtype=np.int64)
    grid = np.array(list(itertools.product(range(-3, 4), repeat=8)), dtype=np.int64)
    rng = random.Random(6)
    total = 0
    for subset in _SUBSETS:
        idx = [labels.index(lab) for lab in subset]
        hits = grid[np.all(grid @ nu[:, idx].T == 0, axis=1)]
        # the vectorised filter must agree with membership_check, spot-checked on misses
        for row in rng.sample(range(len(grid)), 200):
            vec = [0] * width
            for j, x in zip(idx, grid[row]):
                vec[j] = int(x)
            assert membership_check(fiber, fiber.class_from_flat(2, vec)).compatible == \
                bool(np.all(nu[:, idx] @ grid[row] == 0))
        for h in hits:
            vec = [0] * width
            for j, x in zip(idx, h):
                vec[j] = int(x)
            assert membership_check(fiber, fiber.class_from_flat(2, vec)).compatible
            coeffs = rational_solve(basis, vec)
            assert coeffs is not None and all(c.denominator == 1 for c in coeffs), vec
        total += len(hits)
    assert total > len(_SUBSETS)  # more than the zero vector each time
    print(f"criterion 6: {len(_SUBSETS)} subsets x 7^8 vectors, {total} compatible, all in the span")


@pytest.mark.criterion(7, "injective-primitive verdict agrees with cokernel enumeration")
def test_primitivity_oracle():
    rng = random.Random(7)
    cases = []
    for _ in range(450):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        cases.append([[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)])
    for _ in range(100):
        # injective maps with one column scaled: never primitive
        m = rng.randint(1, 3)
        n = rng.randint(1, m)
        while True:
            a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
            if any(leibniz_det([[a[i][j] for j in range(n)] for i in rows])
                   for rows in itertools.combinations(range(m), n)):
                break
        c = rng.randrange(n)
        f = rng.choice([2, 3, -2])
        for row in a:
            row[c] *= f
        cases.append(a)
    scaled_non_primitive = 0
    for a in cases:
        v = is_injective_primitive(a)
        assert (v.injective, v.primitive) == cokernel_oracle(a), a
        scaled_non_primitive += v.injective and not v.primitive
    assert len(cases) >= 500 and scaled_non_primitive >= 100
    print(f"criterion 7: {len(cases)} matrices, {scaled_non_primitive} injective but not primitive")


def _run(**kw):
    return run_scenario(ScenarioConfig(QFanoScenario(4, 4, 1, kw.pop("mult", None)), premises=ALL_TRUE, **kw))


@pytest.mark.criterion(8, "negative controls: 2 m0, bScale = 2, even multD")
def test_negative_controls():
    for kw in (dict(d_override=2), dict(b_scale=2)):
        ps = build_standard_scenario(QFanoScenario(4, 4, 1), **kw)
        cert = certify([ps.H], [ps.H_prime], ps.fiber, k=1, h20_zero=True)
        assert cert.matrix.to_int_rows() == [[2]] and not cert.unimodular
        rep = _run(**kw)
        assert rep.exit_status != 0 and rep.metrics["unimodular"] is False
    with pytest.raises(ParityViolation):
        weil_to_blowup_coords(WeilClass(1, (1, 2, 1, 1)))
    rep = _run(mult=(1, 1, 2, 1))
    assert rep.exit_status != 0 and rep.error.startswith("ParityViolation")
    print("criterion 8: all controls fail as required")


@pytest.mark.criterion(9, "Smith normal form properties on 1000 random matrices")
def test_snf_properties():
    rng = random.Random(9)
    for _ in range(1000):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        a = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        dec = smith_normal_form(a)
        assert dec.U @ ExactMatrix.from_rows(a) @ dec.V == dec.S
        assert abs(dec.U.det()) == 1 and abs(dec.V.det()) == 1
        s = dec.S.to_int_rows()
        assert all(s[i][j] == 0 for i in range(m) for j in range(n) if i != j)
        nz = list(dec.elementary_divisors)
        assert all(x > 0 for x in nz)
        assert list(dec.diagonal) == nz + [0] * (min(m, n) - len(nz))
        assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
        if m <= 3 and n <= 3:
            assert nz == invariant_factors_by_minors(a)
    print("criterion 9: 1000 matrices")
