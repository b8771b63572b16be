"""Shared instance builders for the test suite."""

import numpy as np

import affharm as ah


def rng(seed=0):
    return np.random.default_rng(seed)


def z_group():
    return ah.free(1, names=("t",))


def character(theta, group=None):
    G = group if group is not None else z_group()
    return ah.UnitaryRep(G, {G.generators[0]: np.array([[np.exp(1j * theta)]])})


def random_irreducible(G, r, k):
    """Random irreducible rep of a free group without invariant vectors."""
    while True:
        rep = ah.UnitaryRep(G, {name: ah.random_unitary(r, k) for name in G.generators})
        if ah.fixed_and_reduced(rep)[0].dim != 0:
            continue
        if k == 1 or ah.commutant(rep).dim == 1:
            return rep


def commuting_pair_rep(G, r, d):
    """Random rep of the rank-2 free abelian group: simultaneously
    diagonalizable unitaries with generic phases."""
    V = ah.random_unitary(r, d)
    images = {}
    for name in G.generators:
        phases = np.exp(1j * r.uniform(0.3, 2 * np.pi - 0.3, size=d))
        images[name] = V @ np.diag(phases) @ V.conj().T
    return ah.UnitaryRep(G, images)


def finite_catalogue():
    return ([ah.cyclic(n) for n in range(2, 7)]
            + [ah.symmetric(3), ah.dihedral(4), ah.quaternion()])


def catalogue_instances(r, finite_dim=3):
    """Standard (label, rep, measure) triples across the supported kinds."""
    out = []
    F2 = ah.free(2)
    mu_f2 = ah.uniform_generator_measure(F2)
    for k in (1, 2, 3):
        out.append((f"F2_irr{k}", random_irreducible(F2, r, k), mu_f2))
    sigma = random_irreducible(F2, r, 2)
    out.append(("F2_sigma_double", sigma.multiple(2), mu_f2))
    tau = random_irreducible(F2, r, 2)
    out.append(("F2_sigma_plus_tau", sigma.direct_sum(tau), mu_f2))

    Z = z_group()
    out.append(("Z_char_quarter", character(np.pi / 2, Z),
                ah.uniform_generator_measure(Z)))
    Zt = z_group()
    out.append(("Z_trivial", ah.UnitaryRep.trivial(Zt, 1),
                ah.uniform_generator_measure(Zt)))

    Z2 = ah.free_abelian(2)
    out.append(("Z2_trivial", ah.UnitaryRep.trivial(Z2, 1),
                ah.uniform_generator_measure(Z2)))
    Z2b = ah.free_abelian(2)
    out.append(("Z2_commuting", commuting_pair_rep(Z2b, r, 2),
                ah.uniform_generator_measure(Z2b)))

    for G in finite_catalogue():
        label = f"{G.catalogue[0]}{G.catalogue[1]}"
        out.append((label, ah.random_rep(G, r, max_dim=finite_dim),
                    ah.uniform_generator_measure(G)))
    return out
