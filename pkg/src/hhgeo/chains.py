"""Registry of inequality chains and the checker that evaluates them.

A chain is an ordered list of terms ``T0 R T1 R T2 ...`` where ``R`` is the
Loewner order, the order of the reals, or equality.  Terms are looked up by
label in a small term library; each term is a function of a
:class:`Bindings` object that caches shared subexpressions (``f(A)``, the
geodesic ``t -> A #_t B`` ...) so a chain evaluates every term once.

Slack convention: a link ``lhs R rhs`` has slack ``lambda_min(rhs - lhs)``
(Loewner), ``rhs - lhs`` (scalar) or ``-||lhs - rhs||_F / scale``
(equality).  Non-negative slack means the link holds exactly; the link
passes when ``slack >= -tol * scale`` with ``scale = max(1, |lhs|, |rhs|)``
(operator norms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import HHGeoError, TermEvaluationError, UnknownIdError
from .funcat import (
    CONVEX,
    GEOMETRICALLY_CONVEX,
    OPERATOR_CONVEX,
    OPERATOR_GEOMETRICALLY_CONVEX,
    PositiveLinearMap,
    ScalarFn,
    hypothesis_fA_leq_fB,
)
from .linalg import (
    SymMatrix,
    _sym,
    block2,
    block2_psd,
    eigvalsh,
    lambda_min,
    loewner_leq,
    matrix_function,
    operator_norm,
    spectral_decompose,
)
from .means import Geodesic, gmean, gmean_t
from .quad import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive, integrate_matrix

LOEWNER = "loewner"
SCALAR = "scalar"
EQUALITY = "equality"


@dataclass
class Bindings:
    """Inputs of one chain evaluation plus a per-evaluation cache."""

    A: Optional[SymMatrix] = None
    B: Optional[SymMatrix] = None
    C: Optional[SymMatrix] = None
    D: Optional[SymMatrix] = None
    X: Optional[SymMatrix] = None
    f: Optional[ScalarFn] = None
    psi: Optional[PositiveLinearMap] = None
    t: Optional[float] = None
    s: Optional[float] = None
    u: Optional[float] = None
    nu: Optional[float] = None
    alpha: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    quad: QuadratureSpec = DEFAULT_QUAD
    cache: dict = field(default_factory=dict, repr=False)
    quad_errors: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_inputs(cls, inputs: dict, **extra) -> "Bindings":
        names = cls.__dataclass_fields__
        kw = {k: v for k, v in inputs.items() if k in names}
        kw.update(extra)
        return cls(**kw)

    def memo(self, key, thunk):
        if key not in self.cache:
            self.cache[key] = thunk()
        return self.cache[key]

    # shared subexpressions
    def fn(self, M: SymMatrix) -> SymMatrix:
        return matrix_function(M, self.f)

    @property
    def fA(self):
        return self.memo("fA", lambda: self.fn(self.A))

    @property
    def fB(self):
        return self.memo("fB", lambda: self.fn(self.B))

    @property
    def path(self) -> Geodesic:
        return self.memo("path", lambda: Geodesic(self.A, self.B))

    @property
    def fpath(self) -> Geodesic:
        return self.memo("fpath", lambda: Geodesic(self.fA, self.fB))

    def integral(self, key: str, g, lo: float, hi: float, adaptive: bool = False):
        def run():
            rule = integrate_adaptive if adaptive else integrate_matrix
            res = rule(g, lo, hi, self.quad)
            self.quad_errors[key] = res.err_estimate
            return res.value

        return self.memo(("int", key), run)


# -- term library -------------------------------------------------------------

TERMS: Dict[str, Callable[[Bindings], object]] = {}


def term(label: str):
    def register(fn):
        if label in TERMS:
            raise ValueError(f"duplicate term label '{label}'")
        TERMS[label] = fn
        return fn

    return register


def evaluate_term(expr, bindings: Bindings):
    """Evaluate a term (label or callable) against ``bindings``.

    Results are cached in ``bindings`` so shared terms are computed once.
    """
    label = expr if isinstance(expr, str) else getattr(expr, "__name__", repr(expr))
    fn = expr if callable(expr) else TERMS.get(expr)
    if fn is None:
        raise UnknownIdError("term", label, TERMS)
    try:
        return bindings.memo(("term", label), lambda: fn(bindings))
    except TermEvaluationError:
        raise
    except (HHGeoError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        raise TermEvaluationError(label, exc) from exc


def _avg(bd: Bindings, key: str, g, lo: float, hi: float):
    return bd.integral(key, g, lo, hi) / (hi - lo)


# mean identities
@term("(A#_t B)#_s (A#_u B)")
def _(bd):
    return gmean_t(bd.path(bd.t), bd.path(bd.u), bd.s)


@term("A#_{(1-s)t+su} B")
def _(bd):
    return bd.path((1.0 - bd.s) * bd.t + bd.s * bd.u)


@term("A#_t B")
def _(bd):
    return bd.path(bd.t)


@term("C#_t D")
def _(bd):
    return gmean_t(bd.C, bd.D, bd.t)


# integrals over the geodesic
@term("int_0^1 f(A#_t B)#f(A#_{1-t} B) dt")
def _(bd):
    return bd.integral(
        "f(A#_t B)#f(A#_{1-t} B)",
        lambda t: gmean(bd.fn(bd.path(t)), bd.fn(bd.path(1.0 - t))), 0.0, 1.0,
    )


@term("int_0^1 f(A#_t B) dt")
def _(bd):
    return bd.integral("f(A#_t B)", lambda t: bd.fn(bd.path(t)), 0.0, 1.0)


@term("int_0^1 f(A#_{1-t} B) dt")
def _(bd):
    return bd.integral("f(A#_{1-t} B)", lambda t: bd.fn(bd.path(1.0 - t)), 0.0, 1.0)


@term("(int_0^1 f(A#_t B) dt)#(int_0^1 f(A#_{1-t} B) dt)")
def _(bd):
    return gmean(
        evaluate_term("int_0^1 f(A#_t B) dt", bd),
        evaluate_term("int_0^1 f(A#_{1-t} B) dt", bd),
    )


@term("int_0^1 f(A)#_t f(B) dt")
def _(bd):
    return bd.integral("f(A)#_t f(B)", bd.fpath, 0.0, 1.0)


@term("f(A#B)")
def _(bd):
    return bd.fn(bd.path(0.5))


@term("f(A)#f(B)")
def _(bd):
    return bd.fpath(0.5)


@term("(f(A)#f(B) + f(B))/2")
def _(bd):
    return _sym(0.5 * (bd.fpath(0.5) + bd.fB))


# power comparison: Y = f(A)^{-1/2} f(B) f(A)^{-1/2}
def _congruence(bd: Bindings):
    def build():
        ih = matrix_function(bd.fA, lambda w: 1.0 / np.sqrt(w))
        return spectral_decompose(_sym(ih @ bd.fB @ ih))

    return bd.memo("Ydec", build)


@term("Y^t")
def _(bd):
    return _congruence(bd).apply(lambda w: w**bd.t)


@term("Y^s")
def _(bd):
    return _congruence(bd).apply(lambda w: w**bd.s)


# weighted sub-interval averages
@term("f(A)#_nu f(B)")
def _(bd):
    return bd.fpath(bd.nu)


@term("f(A)#_{1-nu} f(B)")
def _(bd):
    return bd.fpath(1.0 - bd.nu)


@term("avg_[nu,1-nu] f(A)#_t f(B) dt")
def _(bd):
    return _avg(bd, "f(A)#_t f(B) on [nu,1-nu]", bd.fpath, bd.nu, 1.0 - bd.nu)


@term("avg_[1-nu,nu] f(A)#_t f(B) dt")
def _(bd):
    return _avg(bd, "f(A)#_t f(B) on [1-nu,nu]", bd.fpath, 1.0 - bd.nu, bd.nu)


@term("f(A#_nu B)")
def _(bd):
    return bd.fn(bd.path(bd.nu))


@term("f(A#_{1-nu} B)")
def _(bd):
    return bd.fn(bd.path(1.0 - bd.nu))


@term("avg_[nu,1-nu] f(A#_t B) dt")
def _(bd):
    return _avg(bd, "f(A#_t B) on [nu,1-nu]", lambda t: bd.fn(bd.path(t)), bd.nu, 1.0 - bd.nu)


@term("avg_[1-nu,nu] f(A#_t B) dt")
def _(bd):
    return _avg(bd, "f(A#_t B) on [1-nu,nu]", lambda t: bd.fn(bd.path(t)), 1.0 - bd.nu, bd.nu)


# definition and contraction examples
@term("f(A#_t B)")
def _(bd):
    return bd.fn(bd.path(bd.t))


@term("f(A)#_t f(B)")
def _(bd):
    return bd.fpath(bd.t)


def _resolvent(M: SymMatrix) -> SymMatrix:
    return _sym(np.linalg.inv(np.eye(M.shape[0]) - M))


@term("(I-A#B)^-1")
def _(bd):
    return _resolvent(bd.path(0.5))


@term("(I-A)^-1#(I-B)^-1")
def _(bd):
    return gmean(_resolvent(bd.A), _resolvent(bd.B))


@term("X")
def _(bd):
    return bd.X


@term("A#B")
def _(bd):
    return bd.path(0.5)


@term("0")
def _(bd):
    return np.zeros((2 * bd.A.shape[0],) * 2)


@term("[[A, A#B], [A#B, B]]")
def _(bd):
    return block2(bd.A, bd.path(0.5), bd.B)


@term("Psi(A#B)")
def _(bd):
    return bd.psi(bd.path(0.5))


@term("Psi(A)#Psi(B)")
def _(bd):
    return gmean(bd.psi(bd.A), bd.psi(bd.B))


# operator norm chains (scalar)
@term("||A#_alpha B||")
def _(bd):
    return operator_norm(bd.path(bd.alpha))


@term("||A||^(1-alpha) ||B||^alpha")
def _(bd):
    return operator_norm(bd.A) ** (1.0 - bd.alpha) * operator_norm(bd.B) ** bd.alpha


@term("||A#B||")
def _(bd):
    return operator_norm(bd.path(0.5))


@term("int_0^1 ||A#_t B|| dt")
def _(bd):
    # near-crossings of the top two eigenvalues put near-kinks in this integrand
    return bd.integral("||A#_t B||", lambda t: operator_norm(bd.path(t)), 0.0, 1.0, adaptive=True)


@term("(sqrt(||A|| ||B||) + ||B||)/2")
def _(bd):
    na, nb = operator_norm(bd.A), operator_norm(bd.B)
    return 0.5 * (math.sqrt(na * nb) + nb)


# scalar Hermite-Hadamard chains
def _f(bd: Bindings, x: float) -> float:
    return bd.f.check(x)


@term("(b-a) f((a+b)/2)")
def _(bd):
    return (bd.b - bd.a) * _f(bd, 0.5 * (bd.a + bd.b))


@term("int_a^b f(x) dx")
def _(bd):
    return bd.integral("f on [a,b]", lambda x: _f(bd, x), bd.a, bd.b)


@term("(b-a) (f(a)+f(b))/2")
def _(bd):
    return (bd.b - bd.a) * 0.5 * (_f(bd, bd.a) + _f(bd, bd.b))


@term("f((a+b)/2)")
def _(bd):
    return _f(bd, 0.5 * (bd.a + bd.b))


@term("(f((3a+b)/4) + f((a+3b)/4))/2")
def _(bd):
    a, b = bd.a, bd.b
    return 0.5 * (_f(bd, 0.75 * a + 0.25 * b) + _f(bd, 0.25 * a + 0.75 * b))


@term("1/(b-a) int_a^b f(x) dx")
def _(bd):
    return evaluate_term("int_a^b f(x) dx", bd) / (bd.b - bd.a)


@term("(f((a+b)/2) + (f(a)+f(b))/2)/2")
def _(bd):
    return 0.5 * (_f(bd, 0.5 * (bd.a + bd.b)) + 0.5 * (_f(bd, bd.a) + _f(bd, bd.b)))


@term("(f(a)+f(b))/2")
def _(bd):
    return 0.5 * (_f(bd, bd.a) + _f(bd, bd.b))


@term("f(sqrt(ab))")
def _(bd):
    return _f(bd, math.sqrt(bd.a * bd.b))


@term("sqrt(f(a^3/4 b^1/4) f(a^1/4 b^3/4))")
def _(bd):
    a, b = bd.a, bd.b
    return math.sqrt(_f(bd, a**0.75 * b**0.25) * _f(bd, a**0.25 * b**0.75))


@term("exp(1/(ln b - ln a) int_a^b ln f(x)/x dx)")
def _(bd):
    integral = bd.integral("ln f(x)/x on [a,b]", lambda x: math.log(_f(bd, x)) / x, bd.a, bd.b)
    return math.exp(integral / (math.log(bd.b) - math.log(bd.a)))


@term("sqrt(f(sqrt(ab))) f(a)^1/4 f(b)^1/4")
def _(bd):
    return math.sqrt(_f(bd, math.sqrt(bd.a * bd.b))) * (_f(bd, bd.a) * _f(bd, bd.b)) ** 0.25


@term("sqrt(f(a) f(b))")
def _(bd):
    return math.sqrt(_f(bd, bd.a) * _f(bd, bd.b))


# operator-convex chain along the segment (1-t)A + tB
def _seg(bd: Bindings, t: float) -> SymMatrix:
    return _sym((1.0 - t) * bd.A + t * bd.B)


@term("f((A+B)/2)")
def _(bd):
    return bd.fn(_seg(bd, 0.5))


@term("2 int_{1/4}^{3/4} f(tA+(1-t)B) dt")
def _(bd):
    return _sym(2.0 * bd.integral("f(tA+(1-t)B) on [1/4,3/4]", lambda t: bd.fn(_seg(bd, 1.0 - t)), 0.25, 0.75))


@term("(f((3A+B)/4) + f((A+3B)/4))/2")
def _(bd):
    return _sym(0.5 * (bd.fn(_seg(bd, 0.25)) + bd.fn(_seg(bd, 0.75))))


@term("int_0^1 f((1-t)A+tB) dt")
def _(bd):
    return bd.integral("f((1-t)A+tB)", lambda t: bd.fn(_seg(bd, t)), 0.0, 1.0)


@term("(f((A+B)/2) + (f(A)+f(B))/2)/2")
def _(bd):
    return _sym(0.5 * (bd.fn(_seg(bd, 0.5)) + 0.5 * (bd.fA + bd.fB)))


@term("(f(A)+f(B))/2")
def _(bd):
    return _sym(0.5 * (bd.fA + bd.fB))


# -- hypotheses -----------------------------------------------------------------

HYPOTHESES: Dict[str, Callable[[Bindings, float], bool]] = {
    "f(A)<=f(B)": lambda bd, tol: hypothesis_fA_leq_fB(bd.f, bd.A, bd.B, tol),
    "A<=C, B<=D": lambda bd, tol: loewner_leq(bd.A, bd.C, tol).ordered and loewner_leq(bd.B, bd.D, tol).ordered,
    "0<=t<=1": lambda bd, tol: 0.0 <= bd.t <= 1.0,
    "0<=t<=s": lambda bd, tol: 0.0 <= bd.t <= bd.s,
    "0<=nu<1/2": lambda bd, tol: 0.0 <= bd.nu < 0.5,
    "1/2<nu<=1": lambda bd, tol: 0.5 < bd.nu <= 1.0,
    "||A||<1, ||B||<1": lambda bd, tol: operator_norm(bd.A) < 1.0 and operator_norm(bd.B) < 1.0,
    "||A||<=||B||": lambda bd, tol: operator_norm(bd.A) <= operator_norm(bd.B),
    "0<=alpha<=1": lambda bd, tol: 0.0 <= bd.alpha <= 1.0,
    "[[A,X],[X,B]]>=0": lambda bd, tol: block2_psd(bd.A, bd.X, bd.B, tol),
    "Psi(A), Psi(B) PD": lambda bd, tol: lambda_min(bd.psi(bd.A)) > 0 and lambda_min(bd.psi(bd.B)) > 0,
    "a<b": lambda bd, tol: bd.a < bd.b,
}


# -- registry -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainSpec:
    """Declarative description of one chain.

    ``inputs`` names the input recipe in :func:`hhgeo.gen.sample_inputs`;
    ``scalars`` lists ``(name, lo, hi)`` weights drawn per trial;
    ``fn_slot`` lists the catalogue flags admissible for ``f`` (``None``
    when the chain has no function slot).  ``study`` pairs are evaluated
    and reported but never asserted.
    """

    id: str
    relation: str
    statement: str
    terms: Tuple[str, ...]
    inputs: str
    hypotheses: Tuple[str, ...] = ()
    scalars: Tuple[Tuple[str, float, float], ...] = ()
    ordered_scalars: Tuple[str, ...] = ()
    fn_slot: Optional[frozenset] = None
    default_fn: Optional[str] = None
    needs_map: bool = False
    study: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.relation not in (LOEWNER, SCALAR, EQUALITY):
            raise ValueError(f"unknown relation '{self.relation}'")
        if self.relation == EQUALITY and len(self.terms) != 2:
            raise ValueError("equality chains have exactly two terms")
        if len(self.terms) < 2:
            raise ValueError("a chain needs at least two terms")
        for lbl in self.terms + tuple(x for pair in self.study for x in pair):
            if lbl not in TERMS:
                raise ValueError(f"chain '{self.id}' uses unknown term '{lbl}'")
        for h in self.hypotheses:
            if h not in HYPOTHESES:
                raise ValueError(f"chain '{self.id}' uses unknown hypothesis '{h}'")

    @property
    def arity(self) -> Tuple[str, ...]:
        mats = {
            "pair": ("A", "B"), "contraction_pair": ("A", "B"), "norm_pair": ("A", "B"),
            "hyp_pair": ("A", "B"), "commuting_pair": ("A", "B"),
            "dominated_quad": ("A", "B", "C", "D"), "ando": ("A", "B", "X"),
            "interval": ("a", "b"), "log_interval": ("a", "b"),
        }[self.inputs]
        extra = ("f",) if self.fn_slot is not None else ()
        extra += ("psi",) if self.needs_map else ()
        return mats + tuple(n for n, _, _ in self.scalars) + extra

    def admits(self, f: Optional[ScalarFn]) -> bool:
        if self.fn_slot is None:
            return f is None
        return f is not None and bool(self.fn_slot & f.flags)


OGC = frozenset({OPERATOR_GEOMETRICALLY_CONVEX})

_REGISTRY_LIST = [
    ChainSpec(
        "mean-interp", EQUALITY, "(A#_t B)#_s(A#_u B) = A#_{(1-s)t+su} B",
        ("(A#_t B)#_s (A#_u B)", "A#_{(1-s)t+su} B"), "pair",
        scalars=(("t", 0.0, 1.0), ("s", 0.0, 1.0), ("u", 0.0, 1.0)),
    ),
    ChainSpec(
        "mean-mono", LOEWNER, "A<=C, B<=D  =>  A#_t B <= C#_t D",
        ("A#_t B", "C#_t D"), "dominated_quad",
        hypotheses=("A<=C, B<=D", "0<=t<=1"), scalars=(("t", 0.0, 1.0),),
    ),
    ChainSpec(
        "int-superadd", LOEWNER,
        "int f(A#_t B)#f(A#_{1-t} B) dt <= (int f(A#_t B) dt)#(int f(A#_{1-t} B) dt)",
        ("int_0^1 f(A#_t B)#f(A#_{1-t} B) dt", "(int_0^1 f(A#_t B) dt)#(int_0^1 f(A#_{1-t} B) dt)"),
        "pair", fn_slot=frozenset({OPERATOR_GEOMETRICALLY_CONVEX, GEOMETRICALLY_CONVEX}), default_fn="inv",
    ),
    ChainSpec(
        "power-cmp", LOEWNER, "f(A)<=f(B), 0<=t<=s  =>  Y^t <= Y^s,  Y = f(A)^-1/2 f(B) f(A)^-1/2",
        ("Y^t", "Y^s"), "hyp_pair", hypotheses=("f(A)<=f(B)", "0<=t<=s"),
        scalars=(("t", 0.0, 1.0), ("s", 0.0, 1.0)), ordered_scalars=("t", "s"),
        fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "hh-mr", LOEWNER, "f(A#B) <= int f(A#_t B) dt <= int f(A)#_t f(B) dt",
        ("f(A#B)", "int_0^1 f(A#_t B) dt", "int_0^1 f(A)#_t f(B) dt"), "pair",
        fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "hh-mr123", LOEWNER,
        "f(A)<=f(B)  =>  int f(A#_t B) dt <= int f(A)#_t f(B) dt <= (f(A)#f(B) + f(B))/2",
        ("int_0^1 f(A#_t B) dt", "int_0^1 f(A)#_t f(B) dt", "(f(A)#f(B) + f(B))/2"), "hyp_pair",
        hypotheses=("f(A)<=f(B)",), fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "hh-mr222", LOEWNER,
        "f(A)<=f(B)  =>  f(A#B) <= int f(A#_t B) dt <= (f(A)#f(B) + f(B))/2",
        ("f(A#B)", "int_0^1 f(A#_t B) dt", "(f(A)#f(B) + f(B))/2"), "hyp_pair",
        hypotheses=("f(A)<=f(B)",), fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "hh-mche", LOEWNER, "f(A#B) <= int f(A#_t B)#f(A#_{1-t} B) dt <= f(A)#f(B)",
        ("f(A#B)", "int_0^1 f(A#_t B)#f(A#_{1-t} B) dt", "f(A)#f(B)"), "pair",
        fn_slot=OGC, default_fn="inv",
        study=(("int_0^1 f(A#_t B)#f(A#_{1-t} B) dt", "int_0^1 f(A#_t B) dt"),),
    ),
    ChainSpec(
        "sta-low", LOEWNER,
        "f(A)<=f(B), nu in [0,1/2)  =>  f(A)#_nu f(B) <= avg_[nu,1-nu] f(A)#_t f(B) <= f(A)#_{1-nu} f(B)",
        ("f(A)#_nu f(B)", "avg_[nu,1-nu] f(A)#_t f(B) dt", "f(A)#_{1-nu} f(B)"), "hyp_pair",
        hypotheses=("f(A)<=f(B)", "0<=nu<1/2"), scalars=(("nu", 0.0, 0.5),),
        fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "sta-high", LOEWNER,
        "f(A)<=f(B), nu in (1/2,1]  =>  f(A)#_{1-nu} f(B) <= avg_[1-nu,nu] f(A)#_t f(B) <= f(A)#_nu f(B)",
        ("f(A)#_{1-nu} f(B)", "avg_[1-nu,nu] f(A)#_t f(B) dt", "f(A)#_nu f(B)"), "hyp_pair",
        hypotheses=("f(A)<=f(B)", "1/2<nu<=1"), scalars=(("nu", 1.0, 0.5),),
        fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "sta-f-low", LOEWNER,
        "f(A)<=f(B), nu in [0,1/2)  =>  f(A#_nu B) <= avg_[nu,1-nu] f(A#_t B) "
        "<= avg_[nu,1-nu] f(A)#_t f(B) <= f(A)#_{1-nu} f(B)",
        ("f(A#_nu B)", "avg_[nu,1-nu] f(A#_t B) dt", "avg_[nu,1-nu] f(A)#_t f(B) dt", "f(A)#_{1-nu} f(B)"),
        "hyp_pair", hypotheses=("f(A)<=f(B)", "0<=nu<1/2"), scalars=(("nu", 0.0, 0.5),),
        fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "sta-f-high", LOEWNER,
        "f(A)<=f(B), nu in (1/2,1]  =>  f(A#_{1-nu} B) <= avg_[1-nu,nu] f(A#_t B) "
        "<= avg_[1-nu,nu] f(A)#_t f(B) <= f(A)#_nu f(B)",
        ("f(A#_{1-nu} B)", "avg_[1-nu,nu] f(A#_t B) dt", "avg_[1-nu,nu] f(A)#_t f(B) dt", "f(A)#_nu f(B)"),
        "hyp_pair", hypotheses=("f(A)<=f(B)", "1/2<nu<=1"), scalars=(("nu", 1.0, 0.5),),
        fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "geo-def", LOEWNER, "f(A#_t B) <= f(A)#_t f(B)",
        ("f(A#_t B)", "f(A)#_t f(B)"), "pair", hypotheses=("0<=t<=1",),
        scalars=(("t", 0.0, 1.0),), fn_slot=OGC, default_fn="inv",
    ),
    ChainSpec(
        "resolvent-ineq", LOEWNER, "||A||<1, ||B||<1  =>  (I-A#B)^-1 <= (I-A)^-1#(I-B)^-1",
        ("(I-A#B)^-1", "(I-A)^-1#(I-B)^-1"), "contraction_pair", hypotheses=("||A||<1, ||B||<1",),
    ),
    ChainSpec(
        "ando-max", LOEWNER, "[[A,X],[X,B]] >= 0  =>  X <= A#B",
        ("X", "A#B"), "ando", hypotheses=("[[A,X],[X,B]]>=0",),
    ),
    ChainSpec(
        "psd-block", LOEWNER, "[[A, A#B], [A#B, B]] >= 0",
        ("0", "[[A, A#B], [A#B, B]]"), "pair",
    ),
    ChainSpec(
        "pos-map", LOEWNER, "Psi(A#B) <= Psi(A)#Psi(B) for positive linear Psi",
        ("Psi(A#B)", "Psi(A)#Psi(B)"), "pair", hypotheses=("Psi(A), Psi(B) PD",), needs_map=True,
    ),
    ChainSpec(
        "norm-geo", SCALAR, "||A#_alpha B|| <= ||A||^(1-alpha) ||B||^alpha",
        ("||A#_alpha B||", "||A||^(1-alpha) ||B||^alpha"), "pair",
        hypotheses=("0<=alpha<=1",), scalars=(("alpha", 0.0, 1.0),),
    ),
    ChainSpec(
        "norm-cor", SCALAR, "||A||<=||B||  =>  ||A#B|| <= int ||A#_t B|| dt <= (sqrt(||A|| ||B||) + ||B||)/2",
        ("||A#B||", "int_0^1 ||A#_t B|| dt", "(sqrt(||A|| ||B||) + ||B||)/2"), "norm_pair",
        hypotheses=("||A||<=||B||",),
    ),
    ChainSpec(
        "scalar-hh", SCALAR, "(b-a) f((a+b)/2) <= int_a^b f <= (b-a)(f(a)+f(b))/2",
        ("(b-a) f((a+b)/2)", "int_a^b f(x) dx", "(b-a) (f(a)+f(b))/2"), "interval",
        hypotheses=("a<b",), fn_slot=frozenset({CONVEX}), default_fn="square",
    ),
    ChainSpec(
        "scalar-hh-ref", SCALAR,
        "f((a+b)/2) <= (f((3a+b)/4)+f((a+3b)/4))/2 <= avg_[a,b] f <= (f((a+b)/2)+(f(a)+f(b))/2)/2 <= (f(a)+f(b))/2",
        ("f((a+b)/2)", "(f((3a+b)/4) + f((a+3b)/4))/2", "1/(b-a) int_a^b f(x) dx",
         "(f((a+b)/2) + (f(a)+f(b))/2)/2", "(f(a)+f(b))/2"),
        "interval", hypotheses=("a<b",), fn_slot=frozenset({CONVEX}), default_fn="square",
    ),
    ChainSpec(
        "scalar-geo-hh", SCALAR,
        "f(sqrt(ab)) <= sqrt(f(a^3/4 b^1/4) f(a^1/4 b^3/4)) <= exp(avg_[ln a, ln b] ln f(e^s)) "
        "<= sqrt(f(sqrt(ab))) (f(a)f(b))^1/4 <= sqrt(f(a)f(b))",
        ("f(sqrt(ab))", "sqrt(f(a^3/4 b^1/4) f(a^1/4 b^3/4))", "exp(1/(ln b - ln a) int_a^b ln f(x)/x dx)",
         "sqrt(f(sqrt(ab))) f(a)^1/4 f(b)^1/4", "sqrt(f(a) f(b))"),
        "log_interval", hypotheses=("a<b",), fn_slot=frozenset({GEOMETRICALLY_CONVEX}), default_fn="exp",
    ),
    ChainSpec(
        "opconvex-hh", LOEWNER,
        "f((A+B)/2) <= 2 int_{1/4}^{3/4} f(tA+(1-t)B) dt <= (f((3A+B)/4)+f((A+3B)/4))/2 "
        "<= int f((1-t)A+tB) dt <= (f((A+B)/2)+(f(A)+f(B))/2)/2 <= (f(A)+f(B))/2",
        ("f((A+B)/2)", "2 int_{1/4}^{3/4} f(tA+(1-t)B) dt", "(f((3A+B)/4) + f((A+3B)/4))/2",
         "int_0^1 f((1-t)A+tB) dt", "(f((A+B)/2) + (f(A)+f(B))/2)/2", "(f(A)+f(B))/2"),
        "pair", fn_slot=frozenset({OPERATOR_CONVEX}), default_fn="square",
    ),
]

REGISTRY: Dict[str, ChainSpec] = {c.id: c for c in _REGISTRY_LIST}


def get_chain(chain_id: str) -> ChainSpec:
    if chain_id not in REGISTRY:
        raise UnknownIdError("chain", chain_id, REGISTRY)
    return REGISTRY[chain_id]


# -- checking -------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    lhs: str
    rhs: str
    slack: float
    scale: float
    passed: bool

    @property
    def rel_slack(self) -> float:
        return self.slack / self.scale

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "scale": self.scale,
                "rel_slack": self.rel_slack, "pass": self.passed}


PASS = "pass"
FAIL = "fail"
HYPOTHESIS_NOT_MET = "hypothesis-not-met"


@dataclass
class ChainReport:
    chain_id: str
    digest: dict
    verdict: str
    links: list = field(default_factory=list)
    audit: Optional[Link] = None
    study: list = field(default_factory=list)
    quad_errors: dict = field(default_factory=dict)
    unmet: list = field(default_factory=list)

    @property
    def min_rel_slack(self) -> float:
        return min((l.rel_slack for l in self.links), default=math.inf)

    @property
    def worst_link(self) -> Optional[Link]:
        return min(self.links, key=lambda l: l.rel_slack, default=None)

    def to_dict(self) -> dict:
        return {
            "chain_id": self.chain_id,
            "digest": self.digest,
            "verdict": self.verdict,
            "links": [l.to_dict() for l in self.links],
            "audit": self.audit.to_dict() if self.audit else None,
            "study": [l.to_dict() for l in self.study],
            "quad_errors": self.quad_errors,
            "unmet_hypotheses": self.unmet,
        }


def _norm(x) -> float:
    if np.ndim(x) == 0:
        return abs(float(x))
    return operator_norm(x)


def compare(relation: str, lhs, rhs, lhs_label: str, rhs_label: str, tol: float) -> Link:
    """Slack and verdict for one ``lhs R rhs`` link."""
    if relation == EQUALITY:
        scale = max(1.0, _norm(lhs), _norm(rhs))
        slack = -float(np.linalg.norm(np.asarray(lhs) - np.asarray(rhs))) / scale
        return Link(lhs_label, rhs_label, slack, 1.0, slack >= -tol)
    scale = max(1.0, _norm(lhs), _norm(rhs))
    if relation == SCALAR:
        slack = float(rhs) - float(lhs)
    else:
        slack = float(eigvalsh(np.asarray(rhs) - np.asarray(lhs))[0])
    return Link(lhs_label, rhs_label, slack, scale, slack >= -tol * scale)


def _digest(inputs: dict, f: Optional[ScalarFn], psi) -> dict:
    d = {}
    for k, v in inputs.items():
        if isinstance(v, (int, float, str)) and not isinstance(v, bool):
            d[k] = v
    if f is not None:
        d["fn"] = f.id
    if psi is not None:
        d["map"] = psi.id
    return d


def check_chain(
    spec: ChainSpec,
    inputs,
    tol: float = 1e-8,
    quad: QuadratureSpec = DEFAULT_QUAD,
    f: Optional[ScalarFn] = None,
    psi: Optional[PositiveLinearMap] = None,
) -> ChainReport:
    """Evaluate one chain on one input tuple.

    Parameters
    ----------
    spec : ChainSpec
    inputs : dict or Bindings
        Matrices and weights named as in ``spec.arity``; a dict may carry
        extra digest entries (``seed``, ``stream``, ``dim`` ...).
    tol : float
        Relative tolerance of every link.
    quad : QuadratureSpec
        Rule for the integral terms.
    f, psi : optional
        Function and positive map, unless already in ``inputs``.

    Returns
    -------
    ChainReport
        Verdict ``hypothesis-not-met`` when any hypothesis fails (terms are
        then not evaluated), else ``pass`` iff every link passes.

    Raises
    ------
    TermEvaluationError
        When a term cannot be evaluated (domain, definiteness, quadrature).
    """
    if isinstance(inputs, Bindings):
        bd = inputs
        raw = {k: getattr(bd, k) for k in ("t", "s", "u", "nu", "alpha", "a", "b")}
        if f is not None:
            bd.f = f
        if psi is not None:
            bd.psi = psi
    else:
        raw = dict(inputs)
        bd = Bindings.from_inputs(raw, quad=quad)
        if f is not None:
            bd.f = f
        if psi is not None:
            bd.psi = psi
    digest = _digest({k: v for k, v in raw.items() if v is not None}, bd.f, bd.psi)

    unmet = [h for h in spec.hypotheses if not HYPOTHESES[h](bd, tol)]
    if unmet:
        return ChainReport(spec.id, digest, HYPOTHESIS_NOT_MET, unmet=unmet)

    values = [evaluate_term(lbl, bd) for lbl in spec.terms]
    links = [
        compare(spec.relation, values[i], values[i + 1], spec.terms[i], spec.terms[i + 1], tol)
        for i in range(len(values) - 1)
    ]
    audit = None
    if len(values) >= 3:
        audit = compare(spec.relation, values[0], values[-1], spec.terms[0], spec.terms[-1], tol)
    study = [
        compare(spec.relation, evaluate_term(lo, bd), evaluate_term(hi, bd), lo, hi, tol)
        for lo, hi in spec.study
    ]
    ok = all(l.passed for l in links)
    # transitivity: adjacent links passing must imply the end-to-end link
    if audit is not None and ok and not audit.passed:
        ok = False
    return ChainReport(
        spec.id, digest, PASS if ok else FAIL, links, audit, study, dict(bd.quad_errors)
    )


# -- limit behaviour of the sub-interval averages ---------------------------


def nu_limit_profile(f: ScalarFn, A: SymMatrix, B: SymMatrix, nus, quad: QuadratureSpec = DEFAULT_QUAD):
    """Distances of the three weighted-average chain terms from ``f(A)#f(B)``.

    For each ``nu`` (never exactly 1/2) returns the scaled Frobenius
    distances of ``(lower, average, upper)`` to the midpoint mean, where the
    average is always computed as an integral.  Scale is
    ``max(1, ||f(A)#f(B)||)``.
    """
    out = {}
    for nu in nus:
        if nu == 0.5:
            raise ValueError("nu = 1/2 is only reachable as a limit")
        bd = Bindings(A=A, B=B, f=f, nu=float(nu), quad=quad)
        mid = bd.fpath(0.5)
        scale = max(1.0, operator_norm(mid))
        if nu < 0.5:
            labels = ("f(A)#_nu f(B)", "avg_[nu,1-nu] f(A)#_t f(B) dt", "f(A)#_{1-nu} f(B)")
        else:
            labels = ("f(A)#_{1-nu} f(B)", "avg_[1-nu,nu] f(A)#_t f(B) dt", "f(A)#_nu f(B)")
        out[float(nu)] = tuple(
            float(np.linalg.norm(evaluate_term(lbl, bd) - mid)) / scale for lbl in labels
        )
    return out
