"""Jacobi matrices, their spectral distributions, and how they degenerate.

The core correspondence sends a finitely supported distribution with ``d``
atoms to a ``d x d`` Jacobi matrix and back.  Sequences of distributions on
disjoint supports map to block-diagonal limits; the blow-up coordinates and
the sign-glued permutahedral complex describe how those limits fit together.
"""

from types import ModuleType as _ModuleType

from .blowup import (
    BlowupPoint,
    MembershipReport,
    barycentre,
    face_of,
    is_member,
    normalize_affine,
    phi_chain,
    pi,
    rho,
    vanishing_set,
)
from .complex import (
    CellComplex,
    ComplexFace,
    PermutahedronFace,
    build_complex,
    faces_of_permutahedron,
    permutahedron_vertices,
    petrie_polygon,
    surface_report,
)
from .counting import euler_characteristic, ordered_bell, stirling2, tanh_coefficient_scaled
from .limits import (
    ExponentWeights,
    MomentCurve,
    classify_stable,
    fit_exponents,
    limit_of_moment_curve,
    moment_curve_eval,
    numeric_limit_report,
)
from .partitions import Chain, OrderedPartition, enumerate_ordered_partitions, is_refinement
from .spectral import (
    Distribution,
    DistributionSequence,
    NumericalError,
    Spectrum,
    TridiagonalMatrix,
    direct_sum_reconstruct,
    flip_matrix,
    flip_weights,
    mop,
    reconstruct,
    sign_conjugate,
    spectral_distribution,
    split_blocks,
)

__version__ = "0.1.0"

__all__ = sorted(
    name for name, value in globals().items()
    if not name.startswith("_") and not isinstance(value, _ModuleType)
)
