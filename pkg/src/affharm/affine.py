"""Affine isometric actions: evaluation, orbit spans, irreducibility
decisions, separating vectors, and the existence criterion through the
von Neumann dimension of the harmonic module.

An affine action pairs a unitary representation with a cocycle:
``alpha(g) v = pi(g) v + b(g)``.  The action is irreducible when no proper
nonempty closed invariant affine subspace exists; with a positive spectral
gap this is equivalent to the values of the harmonic part of the cocycle
spanning the whole space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cocycles import Cocycle, CocycleSpace
from .errors import InvalidGroupSpec
from .groups import FinMeasure
from .linalg import Subspace, nullspace, random_complex_vector
from .reps import UnitaryRep, VNAlgebra, commutant


class AffineAction:
    """The action g . v = pi(g) v + b(g)."""

    def __init__(self, rep: UnitaryRep, cocycle: Cocycle):
        if cocycle.rep is not rep:
            raise InvalidGroupSpec("cocycle was built for a different representation")
        self.rep = rep
        self.cocycle = cocycle

    def apply_word(self, word, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex).ravel()
        return self.rep.image(word) @ v + self.cocycle.evaluate_word(word)

    def apply(self, g, v) -> np.ndarray:
        return self.apply_word(self.rep.group.element_to_word(g), v)


def invariant_span(rep: UnitaryRep, vectors, *, rtol: float = 1e-9,
                   atol: float = 1e-10) -> Subspace:
    """Smallest subspace containing the vectors and invariant under the
    representation, by adjoining generator images until the rank stabilizes."""
    span = Subspace.from_spanning(list(vectors), ambient=rep.dim,
                                  rtol=rtol, atol=atol)
    letters = [rep.letter_image(letter) for letter in rep.group.letters()]
    for _ in range(rep.dim + 1):
        cols = [span.basis] + [U @ span.basis for U in letters]
        bigger = Subspace.from_spanning(np.hstack(cols), rtol=rtol, atol=atol)
        if bigger.dim == span.dim:
            return span
        span = bigger
    return span


def cocycle_span(b: Cocycle, *, rtol: float = 1e-9, atol: float = 1e-10) -> Subspace:
    """Span of all values of the cocycle: the invariant closure of the
    generator values (values on arbitrary words expand into it)."""
    vectors = [b.values[name] for name in b.group.generators]
    return invariant_span(b.rep, vectors, rtol=rtol, atol=atol)


@dataclass
class IrreducibilityReport:
    irreducible: bool
    span_dim: int
    ambient_dim: int
    harmonic_part: Cocycle
    translation: np.ndarray
    harmonic_norm: float
    sampler_trials: int = 0
    sampler_consistent: bool = True

    def certificate(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "span_dim": self.span_dim,
            "ambient_dim": self.ambient_dim,
            "harmonic_norm": self.harmonic_norm,
            "sampler_trials": self.sampler_trials,
            "sampler_consistent": self.sampler_consistent,
        }


def decide_irreducible(space: CocycleSpace, b: Cocycle, *,
                       sampler_trials: int = 0,
                       rng: np.random.Generator | None = None) -> IrreducibilityReport:
    """Decide irreducibility of the affine action of ``b``.

    The verdict is the exact algebraic criterion: the values of the harmonic
    part of ``b`` span the whole space.  The translate sampler (checking that
    ``b`` shifted by random coboundaries still has full span) is a
    falsification oracle only: it must never contradict an accepted verdict.
    """
    b0, v = space.project_harmonic(b)
    scale = max(space.norm(b), 1.0)
    h_norm = space.norm(b0)
    if h_norm <= space.res_tol * scale:
        span = Subspace.zero(space.rep.dim)
    else:
        span = cocycle_span((1.0 / h_norm) * b0)
    verdict = span.is_full()

    trials = 0
    consistent = True
    if sampler_trials and rng is not None:
        for _ in range(sampler_trials):
            w = random_complex_vector(rng, space.rep.dim)
            shifted = b + Cocycle.coboundary(space.rep, w)
            s_norm = space.norm(shifted)
            if s_norm <= space.res_tol * scale:
                full = False
            else:
                full = cocycle_span((1.0 / s_norm) * shifted).is_full()
            trials += 1
            if verdict and not full:
                consistent = False
                break

    return IrreducibilityReport(
        irreducible=verdict, span_dim=span.dim, ambient_dim=space.rep.dim,
        harmonic_part=b0, translation=v, harmonic_norm=h_norm,
        sampler_trials=trials, sampler_consistent=consistent)


def is_separating(algebra: VNAlgebra, b: Cocycle, *, rtol: float = 1e-9) -> bool:
    """Whether T b = 0 forces T = 0 for T in the algebra (acting on values)."""
    stack = b.stack()
    if np.linalg.norm(stack) == 0.0:
        return False
    cols = np.column_stack([b.apply_operator(T).stack() for T in algebra.basis])
    return nullspace(cols, rtol=rtol, floor=0.0).shape[1] == 0


def separating_kernel_element(algebra: VNAlgebra, b: Cocycle,
                              rtol: float = 1e-9) -> np.ndarray | None:
    """A nonzero algebra element killing ``b``, if one exists."""
    cols = np.column_stack([b.apply_operator(T).stack() for T in algebra.basis])
    kernel = nullspace(cols, rtol=rtol, floor=0.0)
    if kernel.shape[1] == 0:
        return None
    coeffs = kernel[:, 0]
    return sum(coeffs[i] * algebra.basis[i] for i in range(len(algebra.basis)))


@dataclass
class BlockExistence:
    size: int
    multiplicity: int
    dim_har: int
    dim_vn: Fraction
    passes: bool


@dataclass
class ExistenceReport:
    exists: bool
    factor: bool
    blocks: list[BlockExistence]
    dim_har: int
    dim_vn: Fraction | None
    gap: float
    witness: Cocycle | None = None
    note: str = ""
    spaces: list[CocycleSpace] = field(default_factory=list, repr=False)


def exists_irreducible_affine(rep: UnitaryRep, mu: FinMeasure, *,
                              seed: int = 0, max_tries: int = 16,
                              space: CocycleSpace | None = None,
                              algebra: VNAlgebra | None = None) -> ExistenceReport:
    """Decide whether some cocycle makes the affine action irreducible.

    When the commutant is a factor (type I_n here), the criterion is that the
    coupling constant of the harmonic module is at least one.  A nontrivial
    center is handled blockwise: the representation is compressed to each
    minimal central summand and every block must pass, since a separating
    vector must be separating in each block.  On success a random harmonic
    witness is produced and verified (separating, then irreducible).
    """
    if space is None:
        space = CocycleSpace(rep, mu)
    if algebra is None:
        algebra = commutant(rep)

    blocks: list[BlockExistence] = []
    note = ""
    if algebra.is_factor:
        n = algebra.factor_size
        dim_vn = Fraction(space.dim_har, n * n)
        blocks.append(BlockExistence(n, algebra.blocks[0].multiplicity,
                                     space.dim_har, dim_vn, dim_vn >= 1))
        spaces = [space]
    else:
        note = "commutant is not a factor; criterion applied per central block"
        spaces = []
        for blk in algebra.blocks:
            basis = Subspace.from_spanning(blk.projection, atol=1e-10).basis
            sub_images = {name: basis.conj().T @ rep.images[name] @ basis
                          for name in rep.group.generators}
            sub_rep = UnitaryRep(rep.group, sub_images)
            sub_space = CocycleSpace(sub_rep, mu)
            sub_alg = commutant(sub_rep)
            if not sub_alg.is_factor:
                raise InvalidGroupSpec("central block compression is not factorial")
            n = sub_alg.factor_size
            if n != blk.size:
                raise InvalidGroupSpec(
                    f"block factor size changed under compression ({blk.size} -> {n})")
            dim_vn = Fraction(sub_space.dim_har, n * n)
            blocks.append(BlockExistence(n, blk.multiplicity, sub_space.dim_har,
                                         dim_vn, dim_vn >= 1))
            spaces.append(sub_space)

    exists = all(blk.passes for blk in blocks)
    overall = min((blk.dim_vn for blk in blocks), default=None)

    witness = None
    if exists:
        rng = np.random.default_rng(seed)
        for _ in range(max_tries):
            cand = space.random_harmonic(rng)
            if space.norm(cand) < 1e-12:
                continue
            if not is_separating(algebra, cand):
                continue
            if decide_irreducible(space, cand).irreducible:
                witness = cand
                break
        if witness is None:
            raise RuntimeError(
                "existence criterion passed but no random harmonic witness "
                "verified; this indicates an internal inconsistency")

    return ExistenceReport(
        exists=exists, factor=algebra.is_factor, blocks=blocks,
        dim_har=space.dim_har, dim_vn=overall, gap=space.gap,
        witness=witness, note=note, spaces=spaces)


def commutant_on_harmonics(space: CocycleSpace,
                           algebra: VNAlgebra | None = None,
                           tol: float = 1e-8) -> tuple[VNAlgebra, VNAlgebra]:
    """The module image of the commutant on the harmonic coordinates and its
    own commutant there.  Returns (image algebra, commutant of the image)."""
    if algebra is None:
        algebra = commutant(space.rep)
    if space.dim_har == 0:
        raise InvalidGroupSpec("the harmonic space is zero")
    mats = []
    for T in algebra.basis:
        m, res = space.module_matrix_on_har(T)
        if res > tol:
            raise InvalidGroupSpec(
                f"harmonic coordinates are not invariant (residual {res:.2e})")
        mats.append(m)
    image = VNAlgebra(mats)
    return image, VNAlgebra.commutant_of(mats)
