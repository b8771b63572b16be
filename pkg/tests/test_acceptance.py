"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines and the
per-criterion wall times.
"""

import time
from fractions import Fraction

import numpy as np

import affharm as ah

from helpers import catalogue_instances, finite_catalogue, random_irreducible, rng


def _report(name, ok, elapsed, budget, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {status} ({elapsed:.1f}s / budget {budget}s){detail}")
    assert ok, f"{name} failed{detail}"
    assert elapsed < budget, f"{name} exceeded its {budget}s budget ({elapsed:.1f}s)"


def test_criterion_01_finite_group_cohomology_vanishes():
    start = time.monotonic()
    r = rng(101)
    ok = True
    for G in finite_catalogue():
        for _ in range(20):
            rep = ah.random_rep(G, r, max_dim=4)
            cert = rep.validate()
            mu = ah.uniform_generator_measure(G)
            # construction cross-checks the relator solver against the
            # all-pairs oracle and raises on any dimension mismatch
            space = ah.cocycle_space(rep, mu)
            ok &= space.dim_har == 0
            ok &= space.dim_z1 == space.dim_b1
            ok &= cert["max_unitarity_residual"] < 1e-8
            ok &= cert["max_relator_residual"] < 1e-8
            ok &= max(space.residuals.values()) < 1e-8
    _report("finite-group vanishing", ok, time.monotonic() - start, 30)


def test_criterion_02_harmonic_equals_coboundary_complement():
    start = time.monotonic()
    r = rng(102)
    count = 0
    worst = 0.0
    ok = True
    while count < 100:
        for label, rep, mu in catalogue_instances(r):
            space = ah.cocycle_space(rep, mu)
            har = space.har_subspace()
            perp = space.b1_subspace().complement()
            ok &= har.dim == perp.dim
            if har.dim:
                worst = max(worst, float(har.principal_angles_with(perp).max()))
            count += 1
            if count >= 100:
                break
    ok &= worst < 1e-8
    _report("orthogonality identification", ok, time.monotonic() - start, 30,
            f", max angle {worst:.2e}")


def test_criterion_03_explicit_projection_formula():
    start = time.monotonic()
    r = rng(103)
    worst_formula = worst_idem = worst_equiv = 0.0
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0:
            continue
        for _ in range(100):
            b = space.random_z1(r)
            b0, _ = space.project_harmonic(b)
            oracle = space.project_harmonic_oracle(b)
            worst_formula = max(worst_formula, space.norm(b0 - oracle))
            b00, _ = space.project_harmonic(b0)
            worst_idem = max(worst_idem, space.norm(b00 - b0))
        algebra = ah.commutant(rep)
        for _ in range(10):
            b = space.random_z1(r)
            p0, _ = space.project_harmonic(b)
            for T in algebra.basis:
                lhs, _ = space.project_harmonic(b.apply_operator(T))
                worst_equiv = max(worst_equiv, space.norm(lhs - p0.apply_operator(T)))
    ok = worst_formula < 1e-8 and worst_idem < 1e-8 and worst_equiv < 1e-8
    _report("explicit projection formula", ok, time.monotonic() - start, 30,
            f", residuals formula {worst_formula:.2e} idem {worst_idem:.2e} "
            f"equivariance {worst_equiv:.2e}")


def test_criterion_04_span_minimality():
    start = time.monotonic()
    r = rng(104)
    violations = 0
    worst = 0.0
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        for _ in range(100):
            b0 = space.random_harmonic(r)
            v = r.standard_normal(rep.dim) + 1j * r.standard_normal(rep.dim)
            lhs = ah.cocycle_span(b0)
            rhs = ah.cocycle_span(b0 + ah.coboundary(rep, v))
            res = rhs.containment_residual(lhs)
            worst = max(worst, res)
            if res >= 1e-8:
                violations += 1
    _report("span minimality", violations == 0, time.monotonic() - start, 60,
            f", worst containment residual {worst:.2e}")


def test_criterion_05_irreducibility_equivalence():
    start = time.monotonic()
    r = rng(105)
    ok = True
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0:
            continue
        for _ in range(3):
            b = space.random_z1(r)
            result = ah.decide_irreducible(space, b, sampler_trials=50, rng=r)
            # the verdict must equal the defining span criterion...
            b0, _ = space.project_harmonic(b)
            h_norm = space.norm(b0)
            if h_norm <= 1e-8 * max(space.norm(b), 1.0):
                full = False
            else:
                full = ah.cocycle_span((1.0 / h_norm) * b0).is_full()
            ok &= result.irreducible == full
            # ... and the translate sampler must never falsify an accepted one
            ok &= result.sampler_consistent
    _report("irreducibility equivalence", ok, time.monotonic() - start, 60)


def test_criterion_06_existence_for_free_group_multiples():
    start = time.monotonic()
    r = rng(106)
    F2 = ah.free(2)
    mu = ah.uniform_generator_measure(F2)
    ok = True
    for k in (1, 2, 3):
        sigma = random_irreducible(F2, r, k)
        assert ah.fixed_and_reduced(sigma)[0].dim == 0
        for m in (1, 2, 3, 4):
            rep = sigma.multiple(m) if m > 1 else sigma
            result = ah.exists_irreducible_affine(rep, mu, seed=1000 + 10 * k + m)
            ok &= result.exists == (k >= m)
            ok &= result.dim_vn == Fraction(k, m)
            if result.exists:
                ok &= result.witness is not None
    _report("existence criterion on free-group multiples", ok,
            time.monotonic() - start, 60)


def test_criterion_07_coupling_reciprocity():
    start = time.monotonic()
    r = rng(107)
    F2 = ah.free(2)
    mu = ah.uniform_generator_measure(F2)
    worst = 0.0
    for k in (1, 2, 3):
        sigma = random_irreducible(F2, r, k)
        for m in (1, 2, 3, 4):
            rep = sigma.multiple(m) if m > 1 else sigma
            space = ah.cocycle_space(rep, mu)
            image, comm = ah.commutant_on_harmonics(space)
            dim_m = Fraction(space.dim_har, image.factor_size ** 2)
            dim_n = Fraction(space.dim_har, comm.factor_size ** 2)
            worst = max(worst, abs(float(dim_m * dim_n) - 1.0))
    _report("coupling reciprocity", worst < 1e-9, time.monotonic() - start, 60,
            f", worst deviation {worst:.2e}")


def test_criterion_08_wreath_decomposition_and_existence():
    start = time.monotonic()
    r = rng(108)
    ok = True
    worst_identity = 0.0

    cases = []
    c2 = ah.cyclic(2, gen_name="u")
    cases.append((c2, ah.UnitaryRep(c2, {"u": np.diag([1.0, -1.0]).astype(complex)}), True))
    c2b = ah.cyclic(2, gen_name="u")
    cases.append((c2b, ah.UnitaryRep.trivial(c2b, 2), False))
    s3 = ah.symmetric(3)
    cases.append((s3, ah.UnitaryRep(s3, ah.irreducible_reps(s3)[-1]), True))
    s3b = ah.symmetric(3)
    sign_images = ah.irreducible_reps(s3b)[1]
    triv_plus_sign = ah.UnitaryRep.trivial(s3b, 1).direct_sum(
        ah.UnitaryRep(s3b, sign_images))
    cases.append((s3b, triv_plus_sign, True))
    s3c = ah.symmetric(3)
    cases.append((s3c, ah.UnitaryRep.trivial(s3c, 2), False))

    for base, rep, expected in cases:
        mu1 = ah.uniform_generator_measure(base)
        deco = ah.wreath_har_decomposition(rep, mu1, rng=r)
        ok &= deco.dim_har == rep.dim
        ok &= deco.harmonic_residual < 1e-10
        ok &= deco.lift_span_residual < 1e-8
        v = r.standard_normal(rep.dim) + 1j * r.standard_normal(rep.dim)
        lift = ah.LiftedCocycle(deco.wreath, rep, None, v)
        worst_identity = max(worst_identity, lift.verify_identity(r, trials=1000))
        verdict = ah.wreath_exists_irreducible(rep, cross_check=True, mu1=mu1)
        ok &= verdict.exists == expected
        ok &= verdict.cross_check_verdict == expected
    ok &= worst_identity < 1e-8
    _report("wreath decomposition and existence", ok, time.monotonic() - start, 60,
            f", worst identity residual {worst_identity:.2e}")


def test_criterion_09_well_definedness_on_equal_words():
    start = time.monotonic()
    r = rng(109)
    worst = 0.0
    for label, rep, mu in catalogue_instances(r):
        if not rep.group.supports_equality:
            continue
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0:
            continue
        b = space.random_z1(r)
        for _ in range(1000):
            w1, w2, _ = ah.equal_normal_form_pair(rep.group, r)
            worst = max(worst, float(np.linalg.norm(
                b.evaluate_word(w1) - b.evaluate_word(w2))))
    _report("well-definedness", worst < 1e-8, time.monotonic() - start, 60,
            f", worst value gap {worst:.2e}")


def test_criterion_10_adjoint_proportionality():
    start = time.monotonic()
    r = rng(110)
    ok = True
    reported = []
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0 or space.dim_b1 == 0:
            continue  # the pairing is vacuous without coboundaries
        ratios = []
        attempts = 0
        while len(ratios) < 100 and attempts < 1000:
            attempts += 1
            b = space.random_z1(r)
            v = r.standard_normal(rep.dim) + 1j * r.standard_normal(rep.dim)
            denom = np.vdot(v, ah.m_mu(b, mu))
            if abs(denom) < 1e-6:
                continue
            ratios.append(ah.inner_mu(ah.coboundary(rep, v), b, mu) / denom)
        ratios = np.array(ratios)
        spread = float(np.abs(ratios - ratios.mean()).max())
        ok &= len(ratios) == 100 and spread < 1e-8
        reported.append((label, complex(ratios.mean())))
    constants = {f"{c.real:+.6f}{c.imag:+.6f}i" for _, c in reported}
    _report("adjoint proportionality", ok, time.monotonic() - start, 60,
            f", measured constant(s) {sorted(constants)}")
