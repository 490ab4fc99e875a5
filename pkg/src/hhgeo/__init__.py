"""Operator geometric means, functional calculus, matrix quadrature, and
randomized checks of Hermite-Hadamard type operator inequalities."""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    Interval,
    SpectralDecomposition,
    block2_psd,
    loewner_leq,
    matrix_function,
    operator_norm,
    spectral_decompose,
    spectrum_in,
    sym_matrix,
)
from .means import Geodesic, gmean, gmean_t  # noqa: E402
from .quad import QuadratureSpec, integrate_matrix  # noqa: E402
from .funcat import ScalarFn, catalogue_fn  # noqa: E402
from .chains import REGISTRY, ChainReport, ChainSpec, check_chain, evaluate_term, get_chain  # noqa: E402

__all__ = [
    "Interval", "SpectralDecomposition", "block2_psd", "loewner_leq", "matrix_function",
    "operator_norm", "spectral_decompose", "spectrum_in", "sym_matrix", "Geodesic", "gmean",
    "gmean_t", "QuadratureSpec", "integrate_matrix", "ScalarFn", "catalogue_fn", "REGISTRY",
    "ChainReport", "ChainSpec", "check_chain", "evaluate_term", "get_chain",
]
