"""Scalar function catalogue, positive linear maps, and hypothesis predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, UnknownIdError
from .linalg import Interval, SymMatrix, _freeze, _sym, loewner_leq, matrix_function

GEOMETRICALLY_CONVEX = "geometrically_convex"
OPERATOR_GEOMETRICALLY_CONVEX = "operator_geometrically_convex"
OPERATOR_CONVEX = "operator_convex"
CONVEX = "convex"
REQUIRES_CONTRACTION = "requires_contraction"

FLAGS = frozenset(
    {GEOMETRICALLY_CONVEX, OPERATOR_GEOMETRICALLY_CONVEX, OPERATOR_CONVEX, CONVEX, REQUIRES_CONTRACTION}
)

POSITIVE = Interval(0.0, math.inf, lo_open=True, hi_open=True)
REAL_LINE = Interval(-math.inf, math.inf, lo_open=True, hi_open=True)
UNIT_OPEN = Interval(0.0, 1.0, lo_open=True, hi_open=True)

DEFAULT_POLY_COEFFS = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True)
class ScalarFn:
    """A catalogue function.

    Attributes
    ----------
    id : str
        Short name used on the command line and in reports.
    eval : callable
        Vectorized map on real arrays.
    domain : Interval
        Where ``eval`` is defined; enforced by :meth:`check`.
    flags : frozenset of str
        Convexity classifications, see the module constants.
    monotone : {"increasing", "decreasing", None}
        Scalar monotonicity on the positive part of the domain.
    operator_monotone : bool
        Whether ``A <= B`` implies ``f(A) <= f(B)`` (or ``>=`` when
        decreasing) for matrices.
    inverse : callable or None
        Scalar inverse on the range, used to build ``f(A) <= f(B)`` pairs for
        functions that are not operator monotone.
    """

    id: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    domain: Interval
    flags: frozenset = frozenset()
    monotone: Optional[str] = None
    operator_monotone: bool = False
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    formula: str = ""

    def __post_init__(self):
        unknown = set(self.flags) - FLAGS
        if unknown:
            raise ValueError(f"unknown flags {sorted(unknown)}")

    def __call__(self, x):
        return self.eval(x)

    def has(self, flag: str) -> bool:
        return flag in self.flags

    @property
    def requires_contraction(self) -> bool:
        return REQUIRES_CONTRACTION in self.flags

    def check(self, x: float) -> float:
        """Evaluate at a scalar after a domain check."""
        if not self.domain.contains(x):
            raise DomainError(self.id, float(x), self.domain)
        return float(self.eval(np.float64(x)))


def _inv(x):
    return 1.0 / x


def _resolvent(x):
    return 1.0 / (1.0 - x)


def _moebius(x):
    return (1.0 + x) / (1.0 - x)


def poly_nonneg(coeffs: Sequence[float] = DEFAULT_POLY_COEFFS) -> ScalarFn:
    """Polynomial ``c0 + c1 x + ... + ck x^k`` with non-negative coefficients."""
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs or any(c < 0 for c in coeffs) or not any(c > 0 for c in coeffs):
        raise ValueError("poly_nonneg needs non-negative coefficients, at least one positive")
    rev = coeffs[::-1]

    def p(x):
        return np.polyval(rev, x)

    increasing = any(c > 0 for c in coeffs[1:])

    def p_inv(y):
        # bisection: p is strictly increasing on (0, inf) when non-constant
        y = np.asarray(y, dtype=float)
        lo = np.zeros_like(y)
        hi = np.ones_like(y)
        while np.any(p(hi) < y):
            hi = np.where(p(hi) < y, 2 * hi, hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = p(mid) < y
            lo, hi = np.where(below, mid, lo), np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    formula = " + ".join(f"{c:g} t^{k}" for k, c in enumerate(coeffs))
    return ScalarFn(
        "poly_nonneg", p, POSITIVE, frozenset({GEOMETRICALLY_CONVEX}),
        monotone="increasing" if increasing else None,
        inverse=p_inv if increasing else None,
        formula=formula,
    )


def constant(c: float = 2.0) -> ScalarFn:
    if not c > 0:
        raise ValueError("constant control must be positive")
    return ScalarFn(
        "const", lambda x: np.full_like(np.asarray(x, dtype=float), c), POSITIVE,
        frozenset({GEOMETRICALLY_CONVEX, OPERATOR_GEOMETRICALLY_CONVEX, OPERATOR_CONVEX, CONVEX}),
        formula=f"{c:g}",
    )


_CATALOGUE = {
    "inv": ScalarFn(
        "inv", _inv, POSITIVE, frozenset({OPERATOR_GEOMETRICALLY_CONVEX, OPERATOR_CONVEX}),
        monotone="decreasing", operator_monotone=True, inverse=_inv, formula="1/t",
    ),
    "resolvent": ScalarFn(
        "resolvent", _resolvent, UNIT_OPEN,
        frozenset({OPERATOR_GEOMETRICALLY_CONVEX, REQUIRES_CONTRACTION}),
        monotone="increasing", operator_monotone=True,
        inverse=lambda y: 1.0 - 1.0 / y, formula="1/(1-t)",
    ),
    "moebius": ScalarFn(
        "moebius", _moebius, UNIT_OPEN,
        frozenset({OPERATOR_GEOMETRICALLY_CONVEX, REQUIRES_CONTRACTION}),
        monotone="increasing", operator_monotone=True,
        inverse=lambda y: (y - 1.0) / (y + 1.0), formula="(1+t)/(1-t)",
    ),
    "poly_nonneg": poly_nonneg(),
    "exp": ScalarFn(
        "exp", np.exp, POSITIVE, frozenset({GEOMETRICALLY_CONVEX, CONVEX}),
        monotone="increasing", inverse=np.log, formula="e^t",
    ),
    "square": ScalarFn(
        "square", np.square, REAL_LINE, frozenset({CONVEX, OPERATOR_CONVEX, GEOMETRICALLY_CONVEX}),
        monotone="increasing", inverse=np.sqrt, formula="t^2",
    ),
    "identity": ScalarFn(
        "identity", lambda x: np.asarray(x, dtype=float), POSITIVE,
        frozenset({GEOMETRICALLY_CONVEX, OPERATOR_GEOMETRICALLY_CONVEX, OPERATOR_CONVEX, CONVEX}),
        monotone="increasing", operator_monotone=True, inverse=lambda y: y, formula="t",
    ),
    "const": constant(),
}


def known_fns() -> list:
    return sorted(_CATALOGUE)


def catalogue_fn(name: str, poly_coeffs: Optional[Sequence[float]] = None) -> ScalarFn:
    """Look up a catalogue entry by id.

    ``poly_coeffs`` overrides the coefficients of ``poly_nonneg``.
    """
    if name not in _CATALOGUE:
        raise UnknownIdError("function", name, _CATALOGUE)
    if name == "poly_nonneg" and poly_coeffs is not None:
        return poly_nonneg(poly_coeffs)
    return _CATALOGUE[name]


def hypothesis_fA_leq_fB(f: ScalarFn, A: SymMatrix, B: SymMatrix, tol: float = 1e-8) -> bool:
    """Whether ``f(A) <= f(B)`` holds in the Loewner order."""
    return loewner_leq(matrix_function(A, f), matrix_function(B, f), tol).ordered


def scalar_geo_convexity_check(f: ScalarFn, a: float, b: float, lam: float) -> float:
    """Slack ``f(a)^lam f(b)^(1-lam) - f(a^lam b^(1-lam))``; >= 0 when f is geometrically convex."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    fa, fb = f.check(a), f.check(b)
    mid = f.check(a**lam * b ** (1.0 - lam))
    return fa**lam * fb ** (1.0 - lam) - mid


# -- positive linear maps ---------------------------------------------------


@dataclass(frozen=True)
class PositiveLinearMap:
    id: str
    apply: Callable[[SymMatrix], SymMatrix] = field(repr=False)
    output_dim: int

    def __call__(self, X: SymMatrix) -> SymMatrix:
        return self.apply(X)


def _compression_basis(n: int) -> np.ndarray:
    # fixed per dimension, full column rank with probability one
    k = max(1, n - 1)
    rng = np.random.default_rng(1000 + n)
    v = rng.standard_normal((n, k))
    return _freeze(v)


def compression(n: int, V: Optional[np.ndarray] = None) -> PositiveLinearMap:
    """``X -> V^T X V`` for a full-column-rank ``V``."""
    V = _compression_basis(n) if V is None else np.asarray(V, dtype=float)
    if V.shape[0] != n or np.linalg.matrix_rank(V) != V.shape[1]:
        raise ValueError("compression needs an n x k matrix of full column rank")
    return PositiveLinearMap("compression", lambda X: _sym(V.T @ X @ V), V.shape[1])


def pinching(n: int) -> PositiveLinearMap:
    """Keep the two diagonal blocks (split at ceil(n/2)), zero the off-diagonal ones."""
    m = (n + 1) // 2
    mask = np.zeros((n, n))
    mask[:m, :m] = 1.0
    mask[m:, m:] = 1.0
    return PositiveLinearMap("pinching", lambda X: _sym(np.asarray(X) * mask), n)


def trace_map(n: int) -> PositiveLinearMap:
    """``X -> (tr X / n) I``."""
    eye = np.eye(n)
    return PositiveLinearMap("trace", lambda X: _sym(np.trace(X) / n * eye), n)


_MAPS = {"compression": compression, "pinching": pinching, "trace": trace_map}


def known_maps() -> list:
    return sorted(_MAPS)


def catalogue_map(name: str, n: int) -> PositiveLinearMap:
    if name not in _MAPS:
        raise UnknownIdError("positive map", name, _MAPS)
    return _MAPS[name](n)
