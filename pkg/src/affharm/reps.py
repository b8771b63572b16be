"""Finite-dimensional unitary representations: fixed subspaces, averaging
operators, commutants, central block structure, and von Neumann dimension.

Everything is complex; real-entried input is treated as complex.  In finite
dimension the commutant decomposes into full matrix blocks, so only finite
type I factors occur; the infinite and type III cases are structurally
excluded here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateBlock,
    InvalidGroupSpec,
    NotFactor,
    NotInvariant,
    NotUnitary,
    ParseError,
    RelatorViolated,
    UnsupportedGroupKind,
)
from .groups import FinMeasure, GroupModel, TableGroup
from .linalg import (
    Subspace,
    hermitian_residual,
    nullspace,
    operator_norm,
    orthonormal_columns,
    random_unitary,
)

TOL_UNITARY = 1e-10
TOL_RELATOR = 1e-8
MEMBERSHIP_TOL = 1e-8


class UnitaryRep:
    """A unitary representation given by its generator images."""

    def __init__(self, group: GroupModel, images: Mapping[str, np.ndarray]):
        self.group = group
        missing = [s for s in group.generators if s not in images]
        if missing:
            raise InvalidGroupSpec(f"missing images for generators {missing}")
        mats = {}
        dim = None
        for name in group.generators:
            U = np.asarray(images[name], dtype=complex)
            if U.ndim != 2 or U.shape[0] != U.shape[1]:
                raise InvalidGroupSpec(f"image of {name!r} is not square")
            if dim is None:
                dim = U.shape[0]
            elif U.shape[0] != dim:
                raise InvalidGroupSpec("generator images have mixed dimensions")
            mats[name] = U
        self.dim = int(dim)
        self.images = mats
        self._letter_images = {}
        for i, name in enumerate(group.generators, start=1):
            self._letter_images[i] = mats[name]
            self._letter_images[-i] = mats[name].conj().T

    def letter_image(self, letter: int) -> np.ndarray:
        return self._letter_images[letter]

    def image(self, word) -> np.ndarray:
        if not isinstance(word, tuple) or (word and not isinstance(word[0], (int, np.integer))):
            word = self.group.parse_word(word)
        out = np.eye(self.dim, dtype=complex)
        for letter in word:
            out = out @ self._letter_images[letter]
        return out

    def image_of_element(self, g) -> np.ndarray:
        return self.image(self.group.element_to_word(g))

    def validate(self, tol_unitary: float = TOL_UNITARY,
                 tol_rel: float = TOL_RELATOR) -> dict:
        """Check unitarity of generator images and relator residuals."""
        eye = np.eye(self.dim)
        unitarity = {}
        for name in self.group.generators:
            U = self.images[name]
            res = operator_norm(U.conj().T @ U - eye)
            unitarity[name] = res
            if res > tol_unitary:
                raise NotUnitary(name, res)
        relator_residuals = []
        for rel in self.group.relators:
            res = operator_norm(self.image(rel) - eye)
            relator_residuals.append(res)
            if res > tol_rel:
                raise RelatorViolated(self.group.format_word(rel), res)
        return {
            "unitarity": unitarity,
            "max_unitarity_residual": max(unitarity.values()),
            "relator_residuals": relator_residuals,
            "max_relator_residual": max(relator_residuals, default=0.0),
        }

    def direct_sum(self, other: "UnitaryRep") -> "UnitaryRep":
        if other.group is not self.group:
            raise InvalidGroupSpec("direct sum needs a common group")
        images = {}
        for name in self.group.generators:
            A, B = self.images[name], other.images[name]
            block = np.zeros((self.dim + other.dim, self.dim + other.dim), dtype=complex)
            block[:self.dim, :self.dim] = A
            block[self.dim:, self.dim:] = B
            images[name] = block
        return UnitaryRep(self.group, images)

    def conjugate(self, U: np.ndarray) -> "UnitaryRep":
        U = np.asarray(U, dtype=complex)
        return UnitaryRep(self.group, {
            name: U @ A @ U.conj().T for name, A in self.images.items()})

    def multiple(self, copies: int) -> "UnitaryRep":
        """Block-diagonal direct sum of ``copies`` copies."""
        eye = np.eye(copies)
        return UnitaryRep(self.group, {
            name: np.kron(eye, A) for name, A in self.images.items()})

    @classmethod
    def trivial(cls, group: GroupModel, dim: int = 1) -> "UnitaryRep":
        eye = np.eye(dim, dtype=complex)
        return cls(group, {name: eye for name in group.generators})

    @classmethod
    def from_spec(cls, group: GroupModel, spec: dict) -> "UnitaryRep":
        if not isinstance(spec, dict) or "images" not in spec:
            raise ParseError("rep spec must be a dict with an 'images' field")
        images = {}
        for name, mat in spec["images"].items():
            images[name] = decode_matrix(mat)
        return cls(group, images)

    def __repr__(self) -> str:
        return f"UnitaryRep(dim={self.dim}, group={self.group!r})"


def decode_matrix(data) -> np.ndarray:
    """Decode a row-major nested list of [re, im] pairs."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:  # plain real matrix
        return arr.astype(complex)
    raise ParseError("matrix must be a nested list of [re, im] pairs or of reals")


def decode_vector(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 2 and arr.shape[-1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 1:
        return arr.astype(complex)
    raise ParseError("vector must be a list of [re, im] pairs or of reals")


def encode_matrix(A: np.ndarray) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in A]


def encode_vector(v: np.ndarray) -> list:
    v = np.asarray(v, dtype=complex).ravel()
    return [[float(x.real), float(x.imag)] for x in v]


def validate_rep(rep: UnitaryRep, tol_unitary: float = TOL_UNITARY,
                 tol_rel: float = TOL_RELATOR) -> dict:
    return rep.validate(tol_unitary=tol_unitary, tol_rel=tol_rel)


# -- invariant vectors and the averaging operator ------------------------------

def fixed_and_reduced(rep: UnitaryRep) -> tuple[Subspace, Subspace]:
    """The invariant subspace and its orthogonal complement."""
    eye = np.eye(rep.dim)
    stacked = np.vstack([rep.images[name] - eye for name in rep.group.generators])
    fixed = Subspace(nullspace(stacked, floor=1.0), ambient=rep.dim)
    return fixed, fixed.complement()


def markov_operator(rep: UnitaryRep, mu: FinMeasure) -> np.ndarray:
    """The average of the representation against the measure."""
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for g, w in mu.items():
        out += w * rep.image_of_element(g)
    return out


def reduced_markov_eig(rep: UnitaryRep, mu: FinMeasure,
                       reduced: Subspace | None = None):
    """Eigen-decomposition of the averaging operator compressed to the
    complement of the invariant vectors.  Returns (evals, evecs, basis)."""
    if reduced is None:
        _, reduced = fixed_and_reduced(rep)
    B = reduced.basis
    if reduced.dim == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex), B
    M0 = B.conj().T @ markov_operator(rep, mu) @ B
    res = hermitian_residual(M0)
    if res > 1e-9:
        raise InvalidGroupSpec(
            f"averaging operator is not self-adjoint (residual {res:.2e}); "
            "is the measure symmetric?")
    M0 = (M0 + M0.conj().T) / 2
    evals, evecs = np.linalg.eigh(M0)
    return evals, evecs, B


def b1_closed_certificate(rep: UnitaryRep, mu: FinMeasure,
                          reduced: Subspace | None = None) -> float:
    """Distance from 1 to the spectrum of the reduced averaging operator.

    A positive gap certifies that the coboundary space is closed and that the
    reduced averaging operator minus the identity is invertible.  With an
    adapted symmetric measure the gap is positive in finite dimension; the
    value quantifies conditioning.  Infinity is returned when there is no
    reduced space at all.
    """
    evals, _, _ = reduced_markov_eig(rep, mu, reduced)
    if evals.size == 0:
        return float("inf")
    return float(np.min(np.abs(1.0 - evals)))


# -- commutants and block structure -------------------------------------------

def _vec(T: np.ndarray) -> np.ndarray:
    return T.reshape(-1, order="F")


def _unvec(x: np.ndarray, d: int) -> np.ndarray:
    return x.reshape(d, d, order="F")


def matrix_commutant_basis(mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Orthonormal basis (Hilbert-Schmidt) of {T : TM = MT for all M}."""
    mats = [np.asarray(M, dtype=complex) for M in mats]
    d = mats[0].shape[0]
    eye = np.eye(d)
    rows = [np.kron(M.T, eye) - np.kron(eye, M) for M in mats]
    kernel = nullspace(np.vstack(rows), floor=1.0)
    return [_unvec(kernel[:, i], d) for i in range(kernel.shape[1])]


def generated_algebra_basis(mats: Sequence[np.ndarray],
                            include_identity: bool = True) -> list[np.ndarray]:
    """Orthonormal basis of the unital *-algebra generated by the matrices."""
    mats = [np.asarray(M, dtype=complex) for M in mats]
    d = mats[0].shape[0]
    seed = [np.eye(d, dtype=complex)] if include_identity else []
    seed += mats + [M.conj().T for M in mats]
    basis = orthonormal_columns(np.column_stack([_vec(M) for M in seed]))
    while True:
        cols = [basis]
        current = [_unvec(basis[:, i], d) for i in range(basis.shape[1])]
        prods = []
        for A in current:
            for B in current:
                prods.append(_vec(A @ B))
        cols.append(np.column_stack(prods))
        new_basis = orthonormal_columns(np.hstack(cols))
        if new_basis.shape[1] == basis.shape[1]:
            return [_unvec(new_basis[:, i], d) for i in range(new_basis.shape[1])]
        basis = new_basis


@dataclass
class FactorBlock:
    """One minimal central summand: a full matrix algebra of the given size
    acting with the given multiplicity under the central projection."""

    projection: np.ndarray
    size: int
    multiplicity: int

    @property
    def rank(self) -> int:
        return self.size * self.multiplicity

    def normalized_trace(self, T: np.ndarray) -> complex:
        """The trace with tau(identity) = 1 on this block."""
        return complex(np.trace(T @ self.projection)) / self.rank


class VNAlgebra:
    """A *-closed unital operator algebra with its central block structure."""

    def __init__(self, basis: Sequence[np.ndarray], *, validate: bool = True,
                 tol: float = MEMBERSHIP_TOL):
        mats = [np.asarray(M, dtype=complex) for M in basis]
        if not mats:
            raise InvalidGroupSpec("algebra needs at least one basis element")
        self.ambient_dim = mats[0].shape[0]
        stacked = np.column_stack([_vec(M) for M in mats])
        onb = orthonormal_columns(stacked)
        self.basis = [_unvec(onb[:, i], self.ambient_dim) for i in range(onb.shape[1])]
        self._vec_basis = onb
        if validate:
            self._validate_closure(tol)
        self.center_basis = self._center()
        self.blocks = self._blocks()

    @classmethod
    def commutant_of(cls, mats: Sequence[np.ndarray]) -> "VNAlgebra":
        return cls(matrix_commutant_basis(mats), validate=False)

    # -- membership and closure -------------------------------------------

    def membership_residual(self, T: np.ndarray) -> float:
        v = _vec(np.asarray(T, dtype=complex))
        proj = self._vec_basis @ (self._vec_basis.conj().T @ v)
        return float(np.linalg.norm(v - proj))

    def _validate_closure(self, tol: float) -> None:
        m = len(self.basis)
        pairs = [(a, b) for a in range(m) for b in range(m)]
        if len(pairs) > 4096:
            rng = np.random.default_rng(0)
            idx = rng.integers(0, len(pairs), size=512)
            pairs = [pairs[int(i)] for i in idx]
        worst = 0.0
        for M in self.basis:
            worst = max(worst, self.membership_residual(M.conj().T))
        for a, b in pairs:
            worst = max(worst, self.membership_residual(self.basis[a] @ self.basis[b]))
        worst = max(worst, self.membership_residual(np.eye(self.ambient_dim)))
        if worst > tol:
            raise InvalidGroupSpec(
                f"basis is not a unital *-closed algebra (residual {worst:.2e})")

    # -- center and blocks ---------------------------------------------------

    def _center(self) -> list[np.ndarray]:
        m = len(self.basis)
        rows = []
        for B in self.basis:
            block = np.column_stack([_vec(A @ B - B @ A) for A in self.basis])
            rows.append(block)
        kernel = nullspace(np.vstack(rows), floor=1.0)
        out = []
        for i in range(kernel.shape[1]):
            out.append(sum(kernel[j, i] * self.basis[j] for j in range(m)))
        return out

    def _blocks(self) -> list[FactorBlock]:
        d = self.ambient_dim
        m = len(self.center_basis)
        herm = []
        for C in self.center_basis:
            herm.append((C + C.conj().T) / 2)
            herm.append((C - C.conj().T) / 2j)
        rng = np.random.default_rng(902140)
        projections = None
        for _ in range(8):
            Z = sum(rng.standard_normal() * H for H in herm)
            Z = (Z + Z.conj().T) / 2
            evals, evecs = np.linalg.eigh(Z)
            clusters = _cluster(evals, 1e-7 * max(1.0, float(np.abs(evals).max(initial=0.0))))
            if len(clusters) != m:
                continue
            cand = []
            ok = True
            for idx in clusters:
                V = evecs[:, idx]
                P = V @ V.conj().T
                if self.membership_residual(P) > MEMBERSHIP_TOL:
                    ok = False
                    break
                cand.append(P)
            if ok:
                projections = cand
                break
        if projections is None:
            raise DegenerateBlock("could not split the center into minimal projections")
        if operator_norm(sum(projections) - np.eye(d)) > 1e-8:
            raise DegenerateBlock("central projections do not sum to the identity")

        blocks = []
        for P in projections:
            rank_f = float(np.trace(P).real)
            rank = round(rank_f)
            if abs(rank_f - rank) > 1e-8:
                raise DegenerateBlock("central projection has non-integer rank")
            compressed = np.column_stack([_vec(B @ P) for B in self.basis])
            block_dim = orthonormal_columns(compressed).shape[1]
            size = round(np.sqrt(block_dim))
            if size * size != block_dim:
                raise DegenerateBlock(
                    f"block algebra dimension {block_dim} is not a square")
            if rank % size != 0:
                raise DegenerateBlock(
                    f"block rank {rank} is not a multiple of the factor size {size}")
            blocks.append(FactorBlock(P, size, rank // size))
        blocks.sort(key=lambda b: (b.size, b.multiplicity,
                                   tuple(np.round(np.diagonal(b.projection).real, 6))))
        return blocks

    # -- structure queries -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_factor(self) -> bool:
        return len(self.center_basis) == 1

    @property
    def factor_size(self) -> int:
        if not self.is_factor:
            raise NotFactor("algebra has a nontrivial center")
        return self.blocks[0].size

    def amplify(self, copies: int) -> "VNAlgebra":
        """The same algebra acting diagonally on ``copies`` stacked copies."""
        eye = np.eye(copies)
        out = VNAlgebra.__new__(VNAlgebra)
        out.ambient_dim = self.ambient_dim * copies
        out.basis = [np.kron(eye, B) / np.sqrt(copies) for B in self.basis]
        out._vec_basis = np.column_stack([_vec(B) for B in out.basis])
        out.center_basis = [np.kron(eye, C) for C in self.center_basis]
        out.blocks = [FactorBlock(np.kron(eye, b.projection), b.size,
                                  b.multiplicity * copies) for b in self.blocks]
        return out

    def __repr__(self) -> str:
        shape = ", ".join(f"I_{b.size}x{b.multiplicity}" for b in self.blocks)
        return f"VNAlgebra(dim={self.dim}, blocks=[{shape}])"


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted eigenvalues into runs separated by more than tol."""
    if values.size == 0:
        return []
    order = np.argsort(values)
    clusters = [[order[0]]]
    for idx in order[1:]:
        if values[idx] - values[clusters[-1][-1]] <= tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return [np.array(c) for c in clusters]


def commutant(rep: UnitaryRep) -> VNAlgebra:
    """The algebra of operators commuting with every generator image."""
    mats = [rep.images[name] for name in rep.group.generators]
    return VNAlgebra.commutant_of(mats)


def center_blocks(algebra: VNAlgebra) -> list[FactorBlock]:
    return algebra.blocks


def vn_dimension(algebra: VNAlgebra, subspace: Subspace,
                 tol: float = 1e-8) -> Fraction:
    """Coupling constant of an invariant subspace over a finite type I factor.

    For a factor of size n this is dim(K) / n^2, the normalized-trace formula
    evaluated on the projection matrix of K.
    """
    if not algebra.is_factor:
        raise NotFactor("von Neumann dimension needs a factor; decompose first")
    if subspace.ambient != algebra.ambient_dim:
        raise NotInvariant("subspace ambient dimension does not match the algebra")
    P = subspace.projection()
    eye = np.eye(algebra.ambient_dim)
    worst = 0.0
    for T in algebra.basis:
        worst = max(worst, operator_norm((eye - P) @ T @ P))
    if worst > tol:
        raise NotInvariant(f"subspace is not invariant (residual {worst:.2e})")
    n = algebra.factor_size
    return Fraction(subspace.dim, n * n)


# -- catalogue of irreducible representations ---------------------------------

def irreducible_reps(group: TableGroup) -> list[dict[str, np.ndarray]]:
    """Generator-image dictionaries for all irreducibles of a catalogue group."""
    tag = getattr(group, "catalogue", None)
    if tag is None:
        raise UnsupportedGroupKind(
            "irreducible catalogue is only available for cyclic/dihedral/"
            "symmetric(3)/quaternion groups")
    kind, n = tag

    def rot(theta: float) -> np.ndarray:
        return np.array([[np.cos(theta), -np.sin(theta)],
                         [np.sin(theta), np.cos(theta)]], dtype=complex)

    if kind == "cyclic":
        t = group.generators[0]
        omega = np.exp(2j * np.pi / n)
        return [{t: np.array([[omega ** j]])} for j in range(n)]

    if kind in ("dihedral", "symmetric"):
        r, s = group.generators
        out = []
        r_signs = [1.0] + ([-1.0] if n % 2 == 0 else [])
        for er in r_signs:
            for es in (1.0, -1.0):
                out.append({r: np.array([[er + 0j]]), s: np.array([[es + 0j]])})
        refl = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
        for h in range(1, (n - 1) // 2 + 1 if n % 2 else n // 2):
            out.append({r: rot(2 * np.pi * h / n), s: refl})
        return out

    if kind == "quaternion":
        gi, gj = group.generators
        out = []
        for ei in (1.0, -1.0):
            for ej in (1.0, -1.0):
                out.append({gi: np.array([[ei + 0j]]), gj: np.array([[ej + 0j]])})
        out.append({gi: np.array([[1j, 0], [0, -1j]]),
                    gj: np.array([[0, -1], [1, 0]], dtype=complex)})
        return out

    raise UnsupportedGroupKind(f"no irreducible catalogue for {kind!r}")


def random_rep(group: TableGroup, rng: np.random.Generator,
               max_dim: int = 4) -> UnitaryRep:
    """A random unitary representation: a random sum of catalogue irreducibles
    conjugated by a Haar-random unitary."""
    irreps = irreducible_reps(group)
    chosen = []
    remaining = max_dim
    while True:
        fitting = [r for r in irreps if next(iter(r.values())).shape[0] <= remaining]
        if not fitting:
            break
        if chosen and rng.random() < 0.35:
            break
        pick = fitting[int(rng.integers(0, len(fitting)))]
        chosen.append(pick)
        remaining -= next(iter(pick.values())).shape[0]
    images = {name: _block_diag([r[name] for r in chosen])
              for name in group.generators}
    rep = UnitaryRep(group, images)
    return rep.conjugate(random_unitary(rng, rep.dim))


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    total = sum(M.shape[0] for M in mats)
    out = np.zeros((total, total), dtype=complex)
    pos = 0
    for M in mats:
        k = M.shape[0]
        out[pos:pos + k, pos:pos + k] = M
        pos += k
    return out
