"""Spectral tools for 3-hypermatrices under the Bhattacharya-Mesner product."""

from .core import (
    T,
    T2,
    bm_product,
    bm_product_bg,
    cyclic_orbits,
    cyclic_symmetrize,
    cyclic_transpose,
    delta,
    direct_sum,
    hadamard,
    multilinear_form,
)
from .errors import (
    BMError,
    DegenerateInstanceError,
    DegeneratePatternError,
    DimensionError,
    DocumentError,
    IncompleteBasisError,
    NegativeSquareError,
    NumericRangeError,
    PreconditionError,
    SingularSystemError,
    UnsupportedSizeError,
)
from .orthogonal import OrthParams, orth222, orth_direct_sum, orthogonality_residual
from .polyring import MultiPoly, RationalFunction, cramer_solve
from .elim_matrix import MatrixSpectralData, MuTable, iq_solve, iq_consistency, uv_solve, id_residual
from .elim_hyper import MonomialSystem, charpoly222, forward, spectral_system, general_spectral_system
from .search import SearchConfig, DecompositionReport, decomposability_search
from .spectral import HyperSpectralData, matrix_bound_check, hyper_bound_check, svd3

__version__ = "0.1.0"
