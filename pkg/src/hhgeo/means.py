"""Weighted geometric mean of positive definite matrices.

``A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`` traces the
affine-invariant geodesic from ``A`` (t = 0) to ``B`` (t = 1); the formula
is evaluated for any real ``t``.
"""

from __future__ import annotations

import numpy as np

from .errors import DefinitenessError, DimensionError
from .linalg import SpectralDecomposition, SymMatrix, _sym, eigvalsh, spectral_decompose

PD_FLOOR = 1e-12


def _require_pd(eigenvalues: np.ndarray, operand: str) -> None:
    lo, hi = float(eigenvalues[0]), float(eigenvalues[-1])
    floor = PD_FLOOR * hi
    if not (hi > 0 and lo > floor):
        raise DefinitenessError(operand, lo, max(floor, 0.0))


class Geodesic:
    """Precomputed path ``t -> A #_t B``.

    One decomposition of ``A`` supplies both ``A^{1/2}`` and ``A^{-1/2}``;
    one decomposition of the congruence ``M = A^{-1/2} B A^{-1/2}`` supplies
    every power ``M^t``.  Evaluating the path at many ``t`` (quadrature
    nodes) therefore costs one matrix product per node.
    """

    def __init__(self, A: SymMatrix, B: SymMatrix):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if A.shape != B.shape or A.ndim != 2:
            raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
        dec_a = spectral_decompose(A)
        _require_pd(dec_a.eigenvalues, "A")
        _require_pd(eigvalsh(B), "B")
        root = np.sqrt(dec_a.eigenvalues)
        self.a_half = _sym((dec_a.basis * root) @ dec_a.basis.T)
        a_ihalf = (dec_a.basis / root) @ dec_a.basis.T
        # mandatory: the congruence loses exact symmetry to roundoff
        self.m_dec: SpectralDecomposition = spectral_decompose(_sym(a_ihalf @ B @ a_ihalf))

    def __call__(self, t: float) -> SymMatrix:
        w = self.m_dec.eigenvalues
        v = self.m_dec.basis
        mt = (v * w ** float(t)) @ v.T
        return _sym(self.a_half @ mt @ self.a_half)


def gmean_t(A: SymMatrix, B: SymMatrix, t: float) -> SymMatrix:
    """Weighted geometric mean ``A #_t B``.

    Raises
    ------
    DefinitenessError
        If either operand has ``lambda_min <= 1e-12 * lambda_max``.
    """
    return Geodesic(A, B)(t)


def gmean(A: SymMatrix, B: SymMatrix) -> SymMatrix:
    return gmean_t(A, B, 0.5)
