"""1-cocycles with unitary coefficients: the cocycle space and coboundaries,
the measure inner product, harmonic cocycles, and the explicit harmonic
projection through the averaging operator.

A cocycle is determined by its values on the positive generators; the value
on an inverse letter is ``b(s^-1) = -pi(s^-1) b(s)`` and a word evaluates by
``b(s_1 ... s_m) = sum_k pi(s_1 ... s_{k-1}) b(s_k)``.  Relators impose the
linear constraints that cut the cocycle space out of the space of generator
value tuples.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import GapTooSmall, InvalidGroupSpec, ValidationError
from .groups import FinMeasure, TableGroup, Word
from .linalg import (
    Subspace,
    nullspace,
    operator_norm,
    orthonormal_columns,
    random_complex_vector,
)
from .reps import UnitaryRep, fixed_and_reduced, markov_operator, reduced_markov_eig

RES_TOL = 1e-8
GAP_TOL = 1e-8


class Cocycle:
    """A 1-cocycle stored by its values on the positive generators."""

    def __init__(self, rep: UnitaryRep, values: Mapping[str, np.ndarray]):
        self.rep = rep
        self.group = rep.group
        vals = {}
        for name in self.group.generators:
            if name not in values:
                raise InvalidGroupSpec(f"missing cocycle value for generator {name!r}")
            v = np.asarray(values[name], dtype=complex).ravel()
            if v.shape[0] != rep.dim:
                raise InvalidGroupSpec(
                    f"cocycle value for {name!r} has dimension {v.shape[0]}, "
                    f"expected {rep.dim}")
            vals[name] = v
        self.values = vals

    # -- evaluation ----------------------------------------------------------

    def letter_value(self, letter: int) -> np.ndarray:
        name = self.group.letter_name(letter)
        if letter > 0:
            return self.values[name]
        return -(self.rep.letter_image(letter) @ self.values[name])

    def evaluate_word(self, word) -> np.ndarray:
        if not isinstance(word, tuple) or (word and not isinstance(word[0], (int, np.integer))):
            word = self.group.parse_word(word)
        acc = np.zeros(self.rep.dim, dtype=complex)
        prefix = np.eye(self.rep.dim, dtype=complex)
        for letter in word:
            acc = acc + prefix @ self.letter_value(letter)
            prefix = prefix @ self.rep.letter_image(letter)
        return acc

    def evaluate(self, g) -> np.ndarray:
        """Value at a group element (through its canonical word)."""
        return self.evaluate_word(self.group.element_to_word(g))

    def stack(self) -> np.ndarray:
        return np.concatenate([self.values[name] for name in self.group.generators])

    def relator_residual(self) -> float:
        worst = 0.0
        for rel in self.group.relators:
            worst = max(worst, float(np.linalg.norm(self.evaluate_word(rel))))
        return worst

    def norm_q(self) -> float:
        """Sup of the value norms over generators and their inverses."""
        worst = 0.0
        for letter in self.group.letters():
            worst = max(worst, float(np.linalg.norm(self.letter_value(letter))))
        return worst

    def apply_operator(self, T: np.ndarray) -> "Cocycle":
        """Coordinate-wise action of an operator commuting with the rep."""
        T = np.asarray(T, dtype=complex)
        return Cocycle(self.rep, {name: T @ v for name, v in self.values.items()})

    # -- constructors and arithmetic ------------------------------------------

    @classmethod
    def zero(cls, rep: UnitaryRep) -> "Cocycle":
        z = np.zeros(rep.dim, dtype=complex)
        return cls(rep, {name: z for name in rep.group.generators})

    @classmethod
    def from_stack(cls, rep: UnitaryRep, x: np.ndarray) -> "Cocycle":
        x = np.asarray(x, dtype=complex).ravel()
        d = rep.dim
        values = {name: x[i * d:(i + 1) * d]
                  for i, name in enumerate(rep.group.generators)}
        return cls(rep, values)

    @classmethod
    def coboundary(cls, rep: UnitaryRep, v) -> "Cocycle":
        """The cocycle g -> pi(g) v - v."""
        v = np.asarray(v, dtype=complex).ravel()
        return cls(rep, {name: rep.images[name] @ v - v
                         for name in rep.group.generators})

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.rep, {n: self.values[n] + other.values[n]
                                  for n in self.values})

    def __sub__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.rep, {n: self.values[n] - other.values[n]
                                  for n in self.values})

    def __neg__(self) -> "Cocycle":
        return Cocycle(self.rep, {n: -v for n, v in self.values.items()})

    def __rmul__(self, scalar) -> "Cocycle":
        return Cocycle(self.rep, {n: scalar * v for n, v in self.values.items()})

    def __repr__(self) -> str:
        return f"Cocycle(dim={self.rep.dim}, group={type(self.group).__name__})"


def coboundary(rep: UnitaryRep, v) -> Cocycle:
    return Cocycle.coboundary(rep, v)


# -- measure pairings ----------------------------------------------------------

def inner_mu(b: Cocycle, bp: Cocycle, mu: FinMeasure) -> complex:
    """Weighted inner product of the values over the support (conjugate-linear
    in the first argument)."""
    out = 0j
    for g, w in mu.items():
        out += w * np.vdot(b.evaluate(g), bp.evaluate(g))
    return out


def norm_mu(b: Cocycle, mu: FinMeasure) -> float:
    return float(np.sqrt(max(inner_mu(b, b, mu).real, 0.0)))


def norm_q(b: Cocycle) -> float:
    return b.norm_q()


def m_mu(b: Cocycle, mu: FinMeasure) -> np.ndarray:
    """The mean of the cocycle against the measure."""
    out = np.zeros(b.rep.dim, dtype=complex)
    for g, w in mu.items():
        out += w * b.evaluate(g)
    return out


# -- the cocycle space ----------------------------------------------------------

def word_evaluation_matrix(rep: UnitaryRep, word: Word) -> np.ndarray:
    """Matrix of the linear map (generator value stack) -> b(word)."""
    d = rep.dim
    k = len(rep.group.generators)
    blocks = [np.zeros((d, d), dtype=complex) for _ in range(k)]
    prefix = np.eye(d, dtype=complex)
    for letter in word:
        idx = abs(letter) - 1
        if letter > 0:
            blocks[idx] = blocks[idx] + prefix
        else:
            blocks[idx] = blocks[idx] - prefix @ rep.letter_image(letter)
        prefix = prefix @ rep.letter_image(letter)
    return np.hstack(blocks)


def z1_stack_basis(rep: UnitaryRep, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns, generator-stack coordinates) of the
    solution space of the relator constraints."""
    d = rep.dim
    k = len(rep.group.generators)
    if not rep.group.relators:
        return np.eye(k * d, dtype=complex)
    constraints = np.vstack([word_evaluation_matrix(rep, rel)
                             for rel in rep.group.relators])
    return nullspace(constraints, rtol=rtol, floor=1.0)


def z1_dimension_all_pairs(rep: UnitaryRep, rtol: float = 1e-9) -> int:
    """Brute-force cocycle space dimension for a finite group: unknowns are
    the values on every element, constraints are all pairs (g, h)."""
    group = rep.group
    if not isinstance(group, TableGroup):
        raise InvalidGroupSpec("the all-pairs solver needs a finite table group")
    n = group.order
    d = rep.dim
    images = [rep.image_of_element(g) for g in range(n)]
    eye = np.eye(d)
    rows = []
    for g in range(n):
        for h in range(n):
            gh = group.multiply(g, h)
            row = np.zeros((d, n * d), dtype=complex)
            row[:, gh * d:(gh + 1) * d] += eye
            row[:, g * d:(g + 1) * d] -= eye
            row[:, h * d:(h + 1) * d] -= images[g]
            rows.append(row)
    kernel = nullspace(np.vstack(rows), rtol=rtol, floor=1.0)
    return kernel.shape[1]


class CocycleSpace:
    """The cocycle space of a representation with its measure geometry.

    Holds an orthonormal basis of the space in the inner product given by the
    measure (via the evaluation embedding on the support), the matrix of the
    averaging mean on that basis, and the resulting harmonic and coboundary
    coordinate subspaces.  Constructed once and shared read-only.
    """

    def __init__(self, rep: UnitaryRep, mu: FinMeasure, *,
                 rank_rtol: float = 1e-9, res_tol: float = RES_TOL,
                 gap_tol: float = GAP_TOL, cross_check: bool = True):
        if mu.group is not rep.group:
            raise InvalidGroupSpec("measure and representation live on different groups")
        self.rep = rep
        self.group = rep.group
        self.measure = mu
        self.res_tol = res_tol
        self.gap_tol = gap_tol
        rep.validate()

        d = rep.dim
        self.fixed, self.reduced = fixed_and_reduced(rep)
        self.markov = markov_operator(rep, mu)
        self._m_evals, self._m_evecs, self._m_basis = reduced_markov_eig(
            rep, mu, self.reduced)
        if self.reduced.dim == 0:
            self.gap = float("inf")
        else:
            self.gap = float(np.min(np.abs(1.0 - self._m_evals)))

        Z = z1_stack_basis(rep, rtol=rank_rtol)
        if cross_check and isinstance(self.group, TableGroup):
            brute = z1_dimension_all_pairs(rep, rtol=rank_rtol)
            if brute != Z.shape[1]:
                raise InvalidGroupSpec(
                    f"relator solver found dim {Z.shape[1]} but the all-pairs "
                    f"solver found {brute}; the relators do not present the group")

        support = mu.items()
        self._support = support
        ev_blocks = [np.sqrt(w) * word_evaluation_matrix(rep, self.group.element_to_word(g))
                     for g, w in support]
        EV = np.vstack(ev_blocks) if ev_blocks else np.zeros((0, Z.shape[0]))
        self._EV = EV

        E = EV @ Z
        gram = E.conj().T @ E
        if Z.shape[1]:
            evals, evecs = np.linalg.eigh((gram + gram.conj().T) / 2)
            if evals[0] < 1e-12 * max(evals[-1], 1.0):
                raise InvalidGroupSpec(
                    "measure inner product is degenerate on the cocycle space; "
                    "is the support generating?")
            whiten = evecs @ np.diag(evals ** -0.5)
        else:
            whiten = np.zeros((0, 0))
        self._z_mu = Z @ whiten                  # stack coords of the onb
        self._e_mu = EV @ self._z_mu             # evaluation coords of the onb

        mean_map = np.zeros((d, len(support) * d), dtype=complex)
        for i in range(len(support)):
            mean_map[:, i * d:(i + 1) * d] = np.sqrt(support[i][1]) * np.eye(d)
        self._mean_map = mean_map
        self.m_matrix = mean_map @ self._e_mu    # M_mu on the onb coordinates

        self.har_coords = nullspace(self.m_matrix, rtol=rank_rtol, floor=1.0)

        if self.reduced.dim:
            raw = np.column_stack([
                self._coords_unchecked(Cocycle.coboundary(rep, self.reduced.basis[:, i]))
                for i in range(self.reduced.dim)])
            self.b1_coords = orthonormal_columns(raw, rtol=rank_rtol)
        else:
            self.b1_coords = np.zeros((Z.shape[1], 0), dtype=complex)

        if self.b1_coords.shape[1] != self.reduced.dim:
            raise InvalidGroupSpec(
                "coboundary map is not injective on the reduced space at tolerance")
        if self.dim_z1 != self.dim_b1 + self.dim_har:
            raise InvalidGroupSpec(
                f"dimension split failed: dim Z1 = {self.dim_z1} but "
                f"dim B1 + dim Har = {self.dim_b1} + {self.dim_har}")

        ortho = 0.0
        if self.dim_b1 and self.dim_har:
            ortho = operator_norm(self.b1_coords.conj().T @ self.har_coords)
        onb_res = 0.0
        if self._e_mu.shape[1]:
            onb_res = operator_norm(
                self._e_mu.conj().T @ self._e_mu - np.eye(self._e_mu.shape[1]))
        self.residuals = {
            "har_b1_orthogonality": float(ortho),
            "mu_basis_orthonormality": float(onb_res),
        }

    # -- dimensions ------------------------------------------------------------

    @property
    def dim_z1(self) -> int:
        return self._z_mu.shape[1]

    @property
    def dim_b1(self) -> int:
        return self.b1_coords.shape[1]

    @property
    def dim_har(self) -> int:
        return self.har_coords.shape[1]

    # -- coordinates -------------------------------------------------------------

    def _coords_unchecked(self, b: Cocycle) -> np.ndarray:
        return self._e_mu.conj().T @ (self._EV @ b.stack())

    def coords(self, b: Cocycle, check: bool = True) -> np.ndarray:
        """Coordinates of a cocycle in the measure-orthonormal basis."""
        ev = self._EV @ b.stack()
        c = self._e_mu.conj().T @ ev
        if check:
            res = float(np.linalg.norm(ev - self._e_mu @ c))
            if res > self.res_tol * max(1.0, float(np.linalg.norm(ev))):
                raise ValidationError(
                    f"map is not a cocycle for this presentation (residual {res:.2e})")
        return c

    def from_coords(self, c: np.ndarray) -> Cocycle:
        return Cocycle.from_stack(self.rep, self._z_mu @ np.asarray(c, dtype=complex))

    def z1_cocycles(self) -> list[Cocycle]:
        return [self.from_coords(np.eye(self.dim_z1)[:, i]) for i in range(self.dim_z1)]

    def har_cocycles(self) -> list[Cocycle]:
        return [self.from_coords(self.har_coords[:, i]) for i in range(self.dim_har)]

    def har_subspace(self) -> Subspace:
        return Subspace(self.har_coords, ambient=self.dim_z1)

    def b1_subspace(self) -> Subspace:
        return Subspace(self.b1_coords, ambient=self.dim_z1)

    def random_z1(self, rng: np.random.Generator) -> Cocycle:
        return self.from_coords(random_complex_vector(rng, self.dim_z1))

    def random_harmonic(self, rng: np.random.Generator) -> Cocycle:
        if self.dim_har == 0:
            return Cocycle.zero(self.rep)
        return self.from_coords(self.har_coords @ random_complex_vector(rng, self.dim_har))

    # -- pairings ------------------------------------------------------------------

    def inner(self, b: Cocycle, bp: Cocycle) -> complex:
        return inner_mu(b, bp, self.measure)

    def norm(self, b: Cocycle) -> float:
        return norm_mu(b, self.measure)

    def mean(self, b: Cocycle) -> np.ndarray:
        return m_mu(b, self.measure)

    # -- the harmonic projection -----------------------------------------------------

    def project_harmonic(self, b: Cocycle) -> tuple[Cocycle, np.ndarray]:
        """Split b = b0 + coboundary(v) with b0 harmonic, through the inverse
        of (reduced averaging operator - identity) applied to the mean."""
        mean = self.mean(b)
        if self.reduced.dim == 0:
            v = np.zeros(self.rep.dim, dtype=complex)
        else:
            if self.gap < self.gap_tol:
                raise GapTooSmall(
                    f"spectral gap {self.gap:.3e} below {self.gap_tol:.1e}; "
                    "refusing to invert the averaging operator")
            y = self._m_evecs.conj().T @ (self._m_basis.conj().T @ mean)
            v = self._m_basis @ (self._m_evecs @ (y / (self._m_evals - 1.0)))
        b0 = b - Cocycle.coboundary(self.rep, v)
        return b0, v

    def project_harmonic_oracle(self, b: Cocycle) -> Cocycle:
        """Orthogonal projection onto the harmonic subspace computed from the
        Gram geometry alone; independent of the inversion formula."""
        c = self.coords(b)
        return self.from_coords(self.har_coords @ (self.har_coords.conj().T @ c))

    # -- module structure over the commutant ---------------------------------------------

    def module_matrix(self, T: np.ndarray) -> np.ndarray:
        """Matrix, on the measure-orthonormal basis, of b -> T b."""
        big = np.kron(np.eye(len(self._support)), np.asarray(T, dtype=complex))
        return self._e_mu.conj().T @ (big @ self._e_mu)

    def module_matrix_on_har(self, T: np.ndarray) -> tuple[np.ndarray, float]:
        """Compression of the module action to the harmonic coordinates, with
        the invariance residual."""
        rho = self.module_matrix(T)
        H = self.har_coords
        out = H.conj().T @ rho @ H
        res = operator_norm(rho @ H - H @ out)
        return out, res

    def __repr__(self) -> str:
        return (f"CocycleSpace(dim_z1={self.dim_z1}, dim_b1={self.dim_b1}, "
                f"dim_har={self.dim_har}, gap={self.gap:.3g})")


def cocycle_space(rep: UnitaryRep, mu: FinMeasure, **kwargs) -> CocycleSpace:
    return CocycleSpace(rep, mu, **kwargs)
