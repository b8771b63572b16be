"""Harmonic 1-cocycles, commutant modules, and irreducible affine isometric
actions for finitely generated groups with finite-dimensional unitary
representations."""

__version__ = "0.1.0"

from .affine import (
    AffineAction,
    ExistenceReport,
    IrreducibilityReport,
    cocycle_span,
    commutant_on_harmonics,
    decide_irreducible,
    exists_irreducible_affine,
    invariant_span,
    is_separating,
    separating_kernel_element,
)
from .cocycles import (
    Cocycle,
    CocycleSpace,
    coboundary,
    cocycle_space,
    inner_mu,
    m_mu,
    norm_mu,
    norm_q,
    z1_dimension_all_pairs,
    z1_stack_basis,
)
from .errors import (
    AffharmError,
    CocycleIdentityViolated,
    DegenerateBlock,
    GapTooSmall,
    InvalidGroupSpec,
    NotAdapted,
    NotFactor,
    NotInvariant,
    NotNormalized,
    NotSymmetric,
    NotUnitary,
    ParseError,
    RelatorViolated,
    UnsupportedGroupKind,
    ValidationError,
)
from .groups import (
    FinMeasure,
    FreeAbelianGroup,
    FreeGroup,
    GroupModel,
    PresentedGroup,
    TableGroup,
    cyclic,
    dihedral,
    equal_normal_form_pair,
    free,
    free_abelian,
    from_cayley_table,
    make_group,
    make_measure,
    presented,
    quaternion,
    random_element,
    random_word,
    symmetric,
    uniform_generator_measure,
)
from .linalg import Subspace, principal_angles, random_unitary
from .reps import (
    FactorBlock,
    UnitaryRep,
    VNAlgebra,
    b1_closed_certificate,
    center_blocks,
    commutant,
    fixed_and_reduced,
    irreducible_reps,
    markov_operator,
    random_rep,
    validate_rep,
    vn_dimension,
)
from .wreath import (
    LiftedCocycle,
    WreathDecomposition,
    WreathElement,
    WreathGroup,
    lift_rep,
    wreath_exists_irreducible,
    wreath_har_decomposition,
    wreath_measure,
)
