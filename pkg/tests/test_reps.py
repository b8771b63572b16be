import numpy as np
import pytest
from fractions import Fraction

import affharm as ah
from affharm.errors import NotFactor, NotInvariant, NotUnitary, RelatorViolated
from affharm.reps import generated_algebra_basis, irreducible_reps

from helpers import character, finite_catalogue, random_irreducible, rng


def rotation(theta):
    return np.array([[np.cos(theta), -np.sin(theta)],
                     [np.sin(theta), np.cos(theta)]], dtype=complex)


def test_validate_trivial_and_characters():
    G = ah.cyclic(4)
    cert = ah.UnitaryRep.trivial(G, 3).validate()
    assert cert["max_relator_residual"] < 1e-12
    rep = character(0.7)
    assert rep.validate()["max_unitarity_residual"] < 1e-12


def test_relator_violation_detected():
    C3 = ah.cyclic(3)
    rep = ah.UnitaryRep(C3, {"t": rotation(2 * np.pi / 5)})
    with pytest.raises(RelatorViolated):
        rep.validate()


def test_not_unitary_detected():
    G = ah.free(1)
    rep = ah.UnitaryRep(G, {"a": np.array([[2.0]])})
    with pytest.raises(NotUnitary):
        rep.validate()


def test_fixed_and_reduced():
    G = ah.cyclic(3)
    fixed, reduced = ah.fixed_and_reduced(ah.UnitaryRep.trivial(G, 4))
    assert fixed.dim == 4 and reduced.dim == 0

    rep = character(np.pi / 3)
    fixed, reduced = ah.fixed_and_reduced(rep)
    assert fixed.dim == 0 and reduced.dim == 1

    shift = np.roll(np.eye(3), 1, axis=0).astype(complex)  # regular rep of C3
    reg = ah.UnitaryRep(G, {"t": shift})
    reg.validate()
    fixed, _ = ah.fixed_and_reduced(reg)
    assert fixed.dim == 1
    constants = np.ones(3) / np.sqrt(3)
    assert fixed.distance_to(constants) < 1e-10


def test_markov_operator_examples():
    G = ah.cyclic(3)
    mu = ah.uniform_generator_measure(G)
    assert np.allclose(ah.markov_operator(ah.UnitaryRep.trivial(G, 2), mu), np.eye(2))

    rep = character(np.pi / 2)
    muz = ah.uniform_generator_measure(rep.group)
    assert abs(ah.markov_operator(rep, muz)[0, 0]) < 1e-12

    C2 = ah.cyclic(2)
    sign = ah.UnitaryRep(C2, {"t": np.array([[-1.0]])})
    point = ah.make_measure(C2, [(["t"], 1.0)])
    assert ah.markov_operator(sign, point)[0, 0] == pytest.approx(-1.0)


def test_b1_closed_certificate_examples():
    G = ah.cyclic(3)
    assert ah.b1_closed_certificate(
        ah.UnitaryRep.trivial(G, 2), ah.uniform_generator_measure(G)) == np.inf

    rep = character(np.pi / 2)
    assert ah.b1_closed_certificate(
        rep, ah.uniform_generator_measure(rep.group)) == pytest.approx(1.0)

    C2 = ah.cyclic(2)
    sign = ah.UnitaryRep(C2, {"t": np.array([[-1.0]])})
    point = ah.make_measure(C2, [(["t"], 1.0)])
    assert ah.b1_closed_certificate(sign, point) == pytest.approx(2.0)


def test_markov_selfadjoint_contraction_and_fixed_multiplicity():
    r = rng(11)
    for G in finite_catalogue():
        rep = ah.random_rep(G, r, max_dim=4)
        mu = ah.uniform_generator_measure(G)
        M = ah.markov_operator(rep, mu)
        assert np.linalg.norm(M - M.conj().T, 2) < 1e-10
        evals = np.linalg.eigvalsh((M + M.conj().T) / 2)
        assert evals.min() > -1 - 1e-10 and evals.max() < 1 + 1e-10
        fixed, _ = ah.fixed_and_reduced(rep)
        assert int(np.sum(np.abs(evals - 1) < 1e-8)) == fixed.dim


def test_commutant_dimensions():
    r = rng(12)
    F2 = ah.free(2)
    sigma = random_irreducible(F2, r, 2)
    assert ah.commutant(sigma).dim == 1  # scalars only
    assert ah.commutant(sigma.multiple(2)).dim == 4
    tau = random_irreducible(F2, r, 2)
    assert ah.commutant(sigma.direct_sum(tau)).dim == 2


def test_commutant_commutes_with_random_words():
    r = rng(13)
    G = ah.symmetric(3)
    rep = ah.random_rep(G, r, max_dim=4)
    algebra = ah.commutant(rep)
    for _ in range(100):
        w = ah.random_word(G, r, 6)
        U = rep.image(w)
        for T in algebra.basis:
            assert np.linalg.norm(T @ U - U @ T, 2) < 1e-8


def test_double_commutant():
    r = rng(14)
    F2 = ah.free(2)
    sigma = random_irreducible(F2, r, 2)
    rep = sigma.direct_sum(random_irreducible(F2, r, 1))
    mats = [rep.images[name] for name in rep.group.generators]
    bicomm = ah.VNAlgebra.commutant_of([T for T in ah.commutant(rep).basis])
    generated = generated_algebra_basis(mats)
    A = np.column_stack([T.reshape(-1) for T in bicomm.basis])
    B = np.column_stack([T.reshape(-1) for T in generated])
    assert A.shape[1] == B.shape[1]
    assert ah.principal_angles(A, B).max() < 1e-8


def test_center_blocks_structure():
    r = rng(15)
    F2 = ah.free(2)
    sigma = random_irreducible(F2, r, 2)

    scalars = ah.commutant(sigma)
    assert scalars.is_factor
    assert [(b.size, b.multiplicity) for b in scalars.blocks] == [(1, 2)]

    double = ah.commutant(sigma.multiple(2))
    assert double.is_factor
    assert [(b.size, b.multiplicity) for b in double.blocks] == [(2, 2)]

    tau = random_irreducible(F2, r, 2)
    mixed = ah.commutant(sigma.direct_sum(tau))
    assert not mixed.is_factor
    assert [(b.size, b.multiplicity) for b in mixed.blocks] == [(1, 2), (1, 2)]


def test_block_multiplicities_sum_to_dim():
    r = rng(16)
    for G in finite_catalogue():
        rep = ah.random_rep(G, r, max_dim=4)
        algebra = ah.commutant(rep)
        assert sum(b.size * b.multiplicity for b in algebra.blocks) == rep.dim
        total = sum(b.projection for b in algebra.blocks)
        assert np.linalg.norm(total - np.eye(rep.dim), 2) < 1e-8


def test_vn_dimension_examples():
    # scalars acting on C^3
    scalars = ah.VNAlgebra([np.eye(3, dtype=complex)])
    assert ah.vn_dimension(scalars, ah.Subspace.full(3)) == Fraction(3)

    # full 2x2 algebra on its standard form (left multiplication on C^4)
    eye2 = np.eye(2)
    units = [np.zeros((2, 2), dtype=complex) for _ in range(4)]
    for k, (i, j) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        units[k][i, j] = 1.0
    left_mult = ah.VNAlgebra([np.kron(eye2, E) for E in units])
    assert left_mult.factor_size == 2
    assert ah.vn_dimension(left_mult, ah.Subspace.full(4)) == Fraction(1)

    # M_m with multiplicity k: whole space has dimension k/m
    k, m = 3, 2
    mats = [np.kron(np.eye(k), E) for E in units]
    algebra = ah.VNAlgebra(mats)
    assert algebra.factor_size == m
    assert ah.vn_dimension(algebra, ah.Subspace.full(k * m)) == Fraction(k, m)


def test_vn_dimension_errors():
    r = rng(17)
    F2 = ah.free(2)
    sigma = random_irreducible(F2, r, 2)
    tau = random_irreducible(F2, r, 2)
    mixed = ah.commutant(sigma.direct_sum(tau))
    with pytest.raises(NotFactor):
        ah.vn_dimension(mixed, ah.Subspace.full(4))
    double = ah.commutant(sigma.multiple(2))
    bad = ah.Subspace.from_spanning([np.array([1.0, 0, 0, 0])], ambient=4)
    with pytest.raises(NotInvariant):
        ah.vn_dimension(double, bad)


def test_irreducible_catalogues():
    for G in finite_catalogue():
        irreps = irreducible_reps(G)
        assert sum(next(iter(im.values())).shape[0] ** 2 for im in irreps) == G.order
        for images in irreps:
            rep = ah.UnitaryRep(G, images)
            rep.validate()
            assert ah.commutant(rep).dim == 1


def test_random_rep_validates():
    r = rng(18)
    for G in finite_catalogue():
        for _ in range(3):
            rep = ah.random_rep(G, r, max_dim=4)
            assert rep.dim <= 4
            rep.validate()


def test_amplified_algebra():
    r = rng(19)
    F2 = ah.free(2)
    sigma = random_irreducible(F2, r, 2)
    M = ah.commutant(sigma.multiple(2))
    big = M.amplify(3)
    assert big.ambient_dim == 12
    assert big.is_factor and big.factor_size == 2
    assert big.blocks[0].multiplicity == 6
