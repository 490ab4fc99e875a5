"""Dense real-symmetric matrix core.

Symmetric matrices are plain read-only ``numpy.ndarray`` objects of shape
``(n, n)``.  :func:`sym_matrix` is the validating constructor; everything
else in the package returns matrices that went through the same
symmetrization, so downstream code can rely on ``A[i, j] == A[j, i]``
holding bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import (
    AsymmetryError,
    DimensionError,
    DomainError,
    EigenDecompositionError,
    MatrixFormatError,
)

SymMatrix = np.ndarray

ASYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 100


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _sym(a: np.ndarray) -> SymMatrix:
    # internal: trusted input, only roundoff asymmetry expected
    return _freeze(0.5 * (a + a.T))


def sym_matrix(entries) -> SymMatrix:
    """Build a validated, read-only symmetric matrix.

    Small asymmetry (roundoff) is removed by averaging with the transpose;
    asymmetry above ``1e-12 * ||entries||_F`` is treated as caller error.
    Scalars and 1-element sequences become 1x1 matrices.
    """
    a = np.array(entries, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    asym = float(np.max(np.abs(a - a.T)))
    limit = ASYMMETRY_RTOL * float(np.linalg.norm(a))
    if asym > limit:
        raise AsymmetryError(asym, limit)
    return _sym(a)


def identity(n: int) -> SymMatrix:
    return _freeze(np.eye(n))


def diag(*values) -> SymMatrix:
    return _freeze(np.diag(np.asarray(values, dtype=float).ravel()))


@dataclass(frozen=True)
class Interval:
    """Real interval with optional open endpoints (infinite bounds allowed)."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    def contains(self, x: float) -> bool:
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return bool(above and below)

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and the matching orthonormal eigenbasis.

    ``basis[:, i]`` is the eigenvector for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> SymMatrix:
        """Return ``basis @ diag(fn(eigenvalues)) @ basis.T`` (no domain check)."""
        values = np.asarray(fn(self.eigenvalues), dtype=float)
        return _sym((self.basis * values) @ self.basis.T)

    def reconstruct(self) -> SymMatrix:
        return self.apply(lambda w: w)


def jacobi_eigh(
    A: SymMatrix,
    rtol: float = JACOBI_RTOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> SpectralDecomposition:
    """Cyclic Jacobi eigensolver.

    Sweeps over all (p, q) pairs, annihilating ``a[p, q]`` with a plane
    rotation, until the off-diagonal Frobenius norm drops to
    ``rtol * ||A||_F``.

    Raises
    ------
    EigenDecompositionError
        If the residual is still above threshold after ``max_sweeps``.
    """
    a = np.array(A, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    threshold = rtol * float(np.linalg.norm(a))

    def off_norm() -> float:
        return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))

    sweeps = 0
    residual = off_norm()
    while residual > threshold:
        if sweeps == max_sweeps:
            raise EigenDecompositionError(residual, sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        sweeps += 1
        residual = off_norm()

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(_freeze(w[order]), _freeze(v[:, order]))


def spectral_decompose(A: SymMatrix, method: str = "lapack") -> SpectralDecomposition:
    """Eigen-decompose a symmetric matrix.

    Parameters
    ----------
    A : SymMatrix
        Symmetric input.
    method : {"lapack", "jacobi"}
        ``"lapack"`` uses the symmetric tridiagonal QR/divide-and-conquer
        driver behind :func:`numpy.linalg.eigh`; ``"jacobi"`` uses
        :func:`jacobi_eigh`.  Both are orthogonal-transformation methods.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending, orthonormal eigenvector columns.
    """
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver method '{method}'")
    a = np.asarray(A, dtype=float)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError:
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        raise EigenDecompositionError(off, 0) from None
    return SpectralDecomposition(_freeze(w), _freeze(v))


def eigvalsh(A: SymMatrix) -> np.ndarray:
    return np.linalg.eigvalsh(np.asarray(A, dtype=float))


def check_spectrum_domain(eigenvalues: np.ndarray, f) -> None:
    domain = getattr(f, "domain", None)
    if domain is None:
        return
    for lam in eigenvalues:
        if not domain.contains(lam):
            raise DomainError(getattr(f, "id", repr(f)), float(lam), domain)


def matrix_function(A: Union[SymMatrix, SpectralDecomposition], f) -> SymMatrix:
    """Apply a scalar function to a symmetric matrix through its spectrum.

    ``f`` is either a catalogue :class:`~hhgeo.funcat.ScalarFn` (its domain
    is enforced) or any vectorized callable (no domain check).  A
    precomputed :class:`SpectralDecomposition` may be passed instead of the
    matrix.
    """
    dec = A if isinstance(A, SpectralDecomposition) else spectral_decompose(A)
    check_spectrum_domain(dec.eigenvalues, f)
    return dec.apply(f)


def operator_norm(A: SymMatrix) -> float:
    """Spectral norm, i.e. the largest absolute eigenvalue."""
    w = eigvalsh(A)
    return float(max(abs(w[0]), abs(w[-1])))


def lambda_min(A: SymMatrix) -> float:
    return float(eigvalsh(A)[0])


class LoewnerResult(NamedTuple):
    ordered: bool
    slack: float


def _same_dim(*mats: np.ndarray) -> None:
    shapes = {np.shape(m) for m in mats}
    if len(shapes) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(shapes)}")


def loewner_leq(A: SymMatrix, B: SymMatrix, tol: float = 0.0) -> LoewnerResult:
    """Test ``A <= B`` in the Loewner order.

    The slack is ``lambda_min(B - A)``; the pair counts as ordered when the
    slack is at least ``-tol * max(1, ||A||, ||B||)``.
    """
    _same_dim(A, B)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    slack = lambda_min(np.asarray(B) - np.asarray(A))
    scale = max(1.0, operator_norm(A), operator_norm(B))
    return LoewnerResult(slack >= -tol * scale, slack)


def spectrum_in(A: SymMatrix, interval: Interval, tol: float = 0.0) -> bool:
    w = eigvalsh(A)
    scale = max(1.0, abs(interval.lo), abs(interval.hi))
    return bool(w[0] >= interval.lo - tol * scale and w[-1] <= interval.hi + tol * scale)


def block2(A: SymMatrix, X: SymMatrix, B: SymMatrix) -> SymMatrix:
    """The 2n x 2n block matrix [[A, X], [X, B]]."""
    _same_dim(A, X, B)
    return _sym(np.block([[A, X], [X, B]]))


def block2_psd(A: SymMatrix, X: SymMatrix, B: SymMatrix, tol: float = 0.0) -> bool:
    lam = lambda_min(block2(A, X, B))
    scale = max(1.0, operator_norm(A), operator_norm(B))
    return bool(lam >= -tol * scale)


# -- matrix text format ------------------------------------------------------
#
# line 1: dimension n; then n lines of n whitespace-separated decimals.


def format_matrix(A: SymMatrix) -> str:
    a = np.asarray(A, dtype=float)
    lines = [str(a.shape[0])]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in a]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SymMatrix:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    head_no, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise MatrixFormatError(f"expected integer dimension, got '{head}'", head_no) from None
    if n < 1:
        raise MatrixFormatError(f"dimension must be >= 1, got {n}", head_no)
    rows = lines[1:]
    if len(rows) != n:
        where = rows[n][0] if len(rows) > n else (rows[-1][0] if rows else head_no)
        raise MatrixFormatError(f"expected {n} rows, found {len(rows)}", where)
    data = np.empty((n, n))
    for r, (line_no, ln) in enumerate(rows):
        fields = ln.split()
        if len(fields) != n:
            raise MatrixFormatError(f"expected {n} entries, found {len(fields)}", line_no)
        try:
            data[r] = [float(x) for x in fields]
        except ValueError as exc:
            raise MatrixFormatError(str(exc), line_no) from None
    try:
        return sym_matrix(data)
    except AsymmetryError as exc:
        raise MatrixFormatError(str(exc)) from None


def read_matrix(path: Union[str, Path]) -> SymMatrix:
    return parse_matrix(Path(path).read_text())


def write_matrix(path: Union[str, Path], A: SymMatrix) -> None:
    Path(path).write_text(format_matrix(A))
