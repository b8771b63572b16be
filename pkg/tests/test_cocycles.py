import numpy as np
import pytest

import affharm as ah
from affharm.cocycles import word_evaluation_matrix
from affharm.errors import GapTooSmall, ValidationError

from helpers import (
    catalogue_instances,
    character,
    commuting_pair_rep,
    finite_catalogue,
    random_irreducible,
    rng,
)


def test_z1_dimension_free_group():
    r = rng(0)
    F2 = ah.free(2)
    for d in (1, 2, 3):
        rep = ah.UnitaryRep(F2, {"a": ah.random_unitary(r, d),
                                 "b": ah.random_unitary(r, d)})
        assert ah.z1_stack_basis(rep).shape[1] == 2 * d


def test_z1_dimension_cyclic_characters():
    C3 = ah.cyclic(3)
    omega = ah.UnitaryRep(C3, {"t": np.array([[np.exp(2j * np.pi / 3)]])})
    assert ah.z1_stack_basis(omega).shape[1] == 1  # 1 + w + w^2 = 0
    trivial = ah.UnitaryRep.trivial(C3, 1)
    assert ah.z1_stack_basis(trivial).shape[1] == 0  # constraint 3B = 0


def test_relator_and_all_pairs_solvers_agree():
    r = rng(1)
    for G in finite_catalogue():
        rep = ah.random_rep(G, r, max_dim=3)
        assert ah.z1_stack_basis(rep).shape[1] == ah.z1_dimension_all_pairs(rep)


def test_evaluate_basics():
    r = rng(2)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 2)
    b = ah.Cocycle(rep, {"a": ah.random_unitary(r, 2)[:, 0],
                         "b": ah.random_unitary(r, 2)[:, 0]})
    assert np.linalg.norm(b.evaluate_word(())) == 0
    lhs = b.evaluate_word((-1,))
    rhs = -rep.image((-1,)) @ b.values["a"]
    assert np.linalg.norm(lhs - rhs) < 1e-12


def test_evaluation_well_defined_on_equal_words():
    r = rng(3)
    for G in [ah.quaternion(), ah.dihedral(4), ah.free_abelian(2)]:
        rep = (ah.random_rep(G, r, max_dim=3) if isinstance(G, ah.TableGroup)
               else commuting_pair_rep(G, r, 2))
        mu = ah.uniform_generator_measure(G)
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0:
            continue
        b = space.random_z1(r)
        for _ in range(200):
            w1, w2, _ = ah.equal_normal_form_pair(G, r)
            assert np.linalg.norm(b.evaluate_word(w1) - b.evaluate_word(w2)) < 1e-8


def test_cocycle_identity_sampled():
    r = rng(4)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 3)
    mu = ah.uniform_generator_measure(F2)
    space = ah.cocycle_space(rep, mu)
    b = space.random_z1(r)
    for _ in range(100):
        w1 = ah.random_word(F2, r, 5)
        w2 = ah.random_word(F2, r, 5)
        lhs = b.evaluate_word(w1 + w2)
        rhs = b.evaluate_word(w1) + rep.image(w1) @ b.evaluate_word(w2)
        assert np.linalg.norm(lhs - rhs) < 1e-10


def test_coboundary_examples():
    G = ah.cyclic(3)
    trivial = ah.UnitaryRep.trivial(G, 2)
    v = np.array([1.0, 2.0])
    assert np.linalg.norm(ah.coboundary(trivial, v).stack()) == 0  # v invariant

    theta = 0.9
    rep = character(theta)
    b = ah.coboundary(rep, np.array([1.0]))
    assert abs(b.values["t"][0] - (np.exp(1j * theta) - 1)) < 1e-12


def test_mean_of_coboundary_is_markov_minus_identity():
    r = rng(5)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 3)
    mu = ah.uniform_generator_measure(F2)
    M = ah.markov_operator(rep, mu)
    for _ in range(10):
        v = ah.random_unitary(r, 3)[:, 0]
        lhs = ah.m_mu(ah.coboundary(rep, v), mu)
        assert np.linalg.norm(lhs - (M - np.eye(3)) @ v) < 1e-10


def test_mean_lands_in_reduced_space():
    r = rng(6)
    for G in [ah.symmetric(3), ah.dihedral(4)]:
        rep = ah.random_rep(G, r, max_dim=4)
        mu = ah.uniform_generator_measure(G)
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0:
            continue
        fixed = space.fixed
        for _ in range(10):
            b = space.random_z1(r)
            mean = ah.m_mu(b, mu)
            assert np.linalg.norm(fixed.project_vector(mean)) < 1e-8


def test_homomorphisms_are_harmonic_for_symmetric_measures():
    Z2 = ah.free_abelian(2)
    trivial = ah.UnitaryRep.trivial(Z2, 1)
    mu = ah.uniform_generator_measure(Z2)
    b = ah.Cocycle(trivial, {"t1": np.array([1.0 + 2j]), "t2": np.array([-0.5j])})
    assert np.linalg.norm(ah.m_mu(b, mu)) < 1e-14


def test_inner_product_properties():
    r = rng(7)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 2)
    mu = ah.uniform_generator_measure(F2)
    space = ah.cocycle_space(rep, mu)
    for _ in range(10):
        b = space.random_z1(r)
        sq = ah.inner_mu(b, b, mu)
        assert sq.imag == pytest.approx(0.0, abs=1e-12)
        assert sq.real >= 0
        # the norm bound through the word metric
        assert sq.real <= mu.second_moment * b.norm_q() ** 2 + 1e-12


def test_inner_product_disjoint_coordinates():
    G = ah.free(2)
    rep = ah.UnitaryRep(G, {"a": np.diag([1j, -1j]), "b": np.diag([-1.0, 1.0])})
    mu = ah.uniform_generator_measure(G)
    b1 = ah.Cocycle(rep, {"a": np.array([1.0, 0.0]), "b": np.array([2.0, 0.0])})
    b2 = ah.Cocycle(rep, {"a": np.array([0.0, 1.0]), "b": np.array([0.0, -1j])})
    assert abs(ah.inner_mu(b1, b2, mu)) < 1e-14


def test_harmonic_dimensions():
    r = rng(8)
    # finite groups: everything is a coboundary
    for G in finite_catalogue():
        rep = ah.random_rep(G, r, max_dim=3)
        space = ah.cocycle_space(rep, ah.uniform_generator_measure(G))
        assert space.dim_har == 0
        assert space.dim_z1 == space.dim_b1

    # free group: the harmonic space has the dimension of the rep
    F2 = ah.free(2)
    for k in (1, 2, 3):
        rep = random_irreducible(F2, r, k)
        space = ah.cocycle_space(rep, ah.uniform_generator_measure(F2))
        assert (space.dim_z1, space.dim_b1, space.dim_har) == (2 * k, k, k)

    # trivial rep of Z^2: all homomorphisms are harmonic
    Z2 = ah.free_abelian(2)
    space = ah.cocycle_space(ah.UnitaryRep.trivial(Z2, 1),
                             ah.uniform_generator_measure(Z2))
    assert (space.dim_z1, space.dim_b1, space.dim_har) == (2, 0, 2)


def test_dimension_identities_across_catalogue():
    r = rng(9)
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        assert space.dim_z1 == space.dim_b1 + space.dim_har, label
        assert space.dim_b1 == rep.dim - space.fixed.dim, label


def test_orthogonality_harmonic_vs_coboundary_complement():
    r = rng(10)
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        har = space.har_subspace()
        b1_perp = space.b1_subspace().complement()
        assert har.dim == b1_perp.dim, label
        if har.dim:
            assert har.principal_angles_with(b1_perp).max() < 1e-8, label


def test_project_harmonic_fixes_harmonics():
    r = rng(11)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 2)
    space = ah.cocycle_space(rep, ah.uniform_generator_measure(F2))
    b = space.random_harmonic(r)
    b0, v = space.project_harmonic(b)
    assert np.linalg.norm(v) < 1e-10
    assert space.norm(b0 - b) < 1e-10


def test_project_harmonic_kills_coboundaries():
    r = rng(12)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 3)
    space = ah.cocycle_space(rep, ah.uniform_generator_measure(F2))
    w = ah.random_unitary(r, 3)[:, 0]  # no invariant vectors: w is reduced
    b = ah.coboundary(rep, w)
    b0, v = space.project_harmonic(b)
    assert np.linalg.norm(v - w) < 1e-8
    assert space.norm(b0) < 1e-8


def test_projection_matches_gram_oracle_and_is_idempotent():
    r = rng(13)
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0:
            continue
        for _ in range(10):
            b = space.random_z1(r)
            b0, _ = space.project_harmonic(b)
            oracle = space.project_harmonic_oracle(b)
            assert space.norm(b0 - oracle) < 1e-8, label
            b00, v0 = space.project_harmonic(b0)
            assert space.norm(b00 - b0) < 1e-8, label
            assert np.linalg.norm(v0) < 1e-8, label


def test_projection_commutes_with_module_action():
    r = rng(14)
    F2 = ah.free(2)
    sigma = random_irreducible(F2, r, 2)
    rep = sigma.multiple(2)
    mu = ah.uniform_generator_measure(F2)
    space = ah.cocycle_space(rep, mu)
    algebra = ah.commutant(rep)
    for _ in range(5):
        b = space.random_z1(r)
        for T in algebra.basis:
            lhs, _ = space.project_harmonic(b.apply_operator(T))
            rhs0, _ = space.project_harmonic(b)
            rhs = rhs0.apply_operator(T)
            assert space.norm(lhs - rhs) < 1e-8


def test_adjoint_proportionality_constant():
    r = rng(15)
    for label, rep, mu in catalogue_instances(r):
        space = ah.cocycle_space(rep, mu)
        if space.dim_z1 == 0 or space.dim_b1 == 0:
            continue
        ratios = []
        for _ in range(100):
            b = space.random_z1(r)
            v = (r.standard_normal(rep.dim) + 1j * r.standard_normal(rep.dim))
            denom = np.vdot(v, ah.m_mu(b, mu))
            if abs(denom) < 1e-6:
                continue
            num = ah.inner_mu(ah.coboundary(rep, v), b, mu)
            ratios.append(num / denom)
        assert len(ratios) > 50, label
        ratios = np.array(ratios)
        assert np.abs(ratios - ratios.mean()).max() < 1e-8, label


def test_gap_refusal():
    rep = character(1e-4)
    mu = ah.uniform_generator_measure(rep.group)
    space = ah.cocycle_space(rep, mu)
    b = space.random_z1(rng(16))
    with pytest.raises(GapTooSmall):
        space.project_harmonic(b)


def test_coords_rejects_non_cocycles():
    C3 = ah.cyclic(3)
    trivial = ah.UnitaryRep.trivial(C3, 1)
    mu = ah.uniform_generator_measure(C3)
    space = ah.cocycle_space(trivial, mu)
    fake = ah.Cocycle(trivial, {"t": np.array([1.0])})  # violates 3B = 0
    with pytest.raises(ValidationError):
        space.coords(fake)


def test_word_evaluation_matrix_consistency():
    r = rng(17)
    F2 = ah.free(2)
    rep = random_irreducible(F2, r, 2)
    b = ah.Cocycle(rep, {"a": r.standard_normal(2) + 0j, "b": r.standard_normal(2) + 0j})
    for _ in range(50):
        w = ah.random_word(F2, r, 6)
        direct = b.evaluate_word(w)
        via_matrix = word_evaluation_matrix(rep, w) @ b.stack()
        assert np.linalg.norm(direct - via_matrix) < 1e-12
