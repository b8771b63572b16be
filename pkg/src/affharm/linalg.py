"""Dense linear algebra helpers: rank decisions, orthonormal bases, subspaces.

All rank decisions go through singular values.  Spanning-set ranks use a
relative threshold ``rtol * sigma_max`` with a small absolute floor so that a
spanning set made of pure roundoff noise counts as zero.  Constraint-kernel
ranks use ``rtol * max(sigma_max, floor)`` because a constraint block whose
entries are roundoff must count as the zero map.
"""

from __future__ import annotations

import numpy as np

RANK_RTOL = 1e-9
RANK_ATOL = 1e-10


def as_matrix(a) -> np.ndarray:
    A = np.asarray(a, dtype=complex)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    return A


def operator_norm(A) -> float:
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitian_residual(A) -> float:
    return operator_norm(A - A.conj().T)


def orthonormal_columns(A, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal basis of the column span of ``A``."""
    A = as_matrix(A)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    cut = max(rtol * (s[0] if s.size else 0.0), atol)
    rank = int(np.sum(s > cut))
    return U[:, :rank]


def nullspace(A, rtol: float = RANK_RTOL, floor: float = 1.0) -> np.ndarray:
    """Orthonormal basis (columns) of ker(A)."""
    A = as_matrix(A)
    ncols = A.shape[1]
    if A.size == 0 or A.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, Vh = np.linalg.svd(A)
    cut = rtol * max(s[0] if s.size else 0.0, floor)
    rank = int(np.sum(s > cut))
    return Vh[rank:].conj().T


def principal_angles(A, B) -> np.ndarray:
    """Principal angles (radians, ascending) between the column spans.

    Both arguments must have orthonormal columns.  Cosines come from the SVD
    of A* B and sines from the SVD of (I - A A*) B; combining them through
    arctan2 keeps small angles accurate (plain arccos floors out near 1e-8
    in double precision).
    """
    A = as_matrix(A)
    B = as_matrix(B)
    k = min(A.shape[1], B.shape[1])
    if k == 0:
        return np.zeros(0)
    overlap = A.conj().T @ B
    cosines = np.clip(np.linalg.svd(overlap, compute_uv=False), 0.0, 1.0)
    residual = B - A @ overlap
    sines = np.clip(np.linalg.svd(residual, compute_uv=False), 0.0, 1.0)
    sines = np.sort(sines)[:k]
    return np.arctan2(sines, cosines[:k])


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-random d x d unitary (QR of a complex Gaussian, phases fixed)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_complex_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    return (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2.0)


class Subspace:
    """A linear subspace of C^d held as an orthonormal column basis."""

    __slots__ = ("ambient", "basis")

    def __init__(self, basis, ambient: int | None = None):
        B = as_matrix(basis)
        if ambient is None:
            ambient = B.shape[0]
        if B.shape[0] != ambient:
            raise ValueError("basis rows do not match ambient dimension")
        if B.shape[1]:
            gram = B.conj().T @ B
            if operator_norm(gram - np.eye(B.shape[1])) > 1e-10:
                raise ValueError("basis columns are not orthonormal")
        self.ambient = int(ambient)
        self.basis = B

    @classmethod
    def from_spanning(cls, vectors, ambient: int | None = None,
                      rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> "Subspace":
        if isinstance(vectors, (list, tuple)):
            if len(vectors) == 0:
                if ambient is None:
                    raise ValueError("empty spanning set needs an explicit ambient dimension")
                return cls.zero(ambient)
            A = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in vectors])
        else:
            A = as_matrix(vectors)
        return cls(orthonormal_columns(A, rtol=rtol, atol=atol), ambient=A.shape[0])

    @classmethod
    def from_nullspace(cls, A, rtol: float = RANK_RTOL, floor: float = 1.0) -> "Subspace":
        A = as_matrix(A)
        return cls(nullspace(A, rtol=rtol, floor=floor), ambient=A.shape[1])

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(np.zeros((ambient, 0), dtype=complex), ambient=ambient)

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(np.eye(ambient, dtype=complex), ambient=ambient)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def projection(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def complement(self) -> "Subspace":
        return Subspace(nullspace(self.basis.conj().T, floor=1.0), ambient=self.ambient)

    def project_vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex).ravel()
        return self.basis @ (self.basis.conj().T @ v)

    def distance_to(self, v) -> float:
        """Norm of the component of ``v`` orthogonal to the subspace."""
        v = np.asarray(v, dtype=complex).ravel()
        return float(np.linalg.norm(v - self.project_vector(v)))

    def containment_residual(self, other: "Subspace") -> float:
        """Spectral norm of (I - P_self) applied to the other basis."""
        if other.dim == 0:
            return 0.0
        return operator_norm(other.basis - self.basis @ (self.basis.conj().T @ other.basis))

    def contains(self, other: "Subspace", tol: float = 1e-8) -> bool:
        return self.containment_residual(other) <= tol

    def principal_angles_with(self, other: "Subspace") -> np.ndarray:
        return principal_angles(self.basis, other.basis)

    def same_space(self, other: "Subspace", tol: float = 1e-8) -> bool:
        if self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        return bool(self.principal_angles_with(other).max() <= tol)

    def intersect(self, other: "Subspace") -> "Subspace":
        stacked = np.vstack([
            np.eye(self.ambient) - self.projection(),
            np.eye(self.ambient) - other.projection(),
        ])
        return Subspace(nullspace(stacked, floor=1.0), ambient=self.ambient)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"
