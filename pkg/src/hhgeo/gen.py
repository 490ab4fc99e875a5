"""Seeded random inputs: SPD matrices, contractions, commuting pairs, chain inputs.

Every draw comes from a Philox (counter-based) generator keyed by
``(seed, stream)``, so trial ``k`` of a campaign sees the same numbers no
matter how trials are scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, GenerationError
from .funcat import ScalarFn, hypothesis_fA_leq_fB
from .linalg import Interval, SymMatrix, _sym, matrix_function, operator_norm
from .means import gmean

REJECTION_BUDGET = 10_000


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    dim: int = 4
    cond_max: float = 100.0
    spectrum_interval: Interval = Interval(0.1, 10.0)
    norm_cap: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("dim must be >= 1")
        if not self.cond_max >= 1:
            raise ConfigurationError("cond_max must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if self.spectrum_interval.lo <= 0 or not math.isfinite(self.spectrum_interval.hi):
            raise ConfigurationError(
                f"spectrum interval {self.spectrum_interval} must be a finite subset of (0, inf)"
            )
        if self.norm_cap is not None and not 0 < self.norm_cap < 1:
            raise ConfigurationError("norm_cap must lie in (0, 1)")


def rng_for(seed: int, stream: int, *subkeys: int) -> np.random.Generator:
    """Independent generator for trial ``stream`` of run ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), *map(int, subkeys)))
    return np.random.Generator(np.random.Philox(ss))


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def _eigenvalues(rng: np.random.Generator, cfg: GenConfig) -> np.ndarray:
    lo, hi = cfg.spectrum_interval.lo, cfg.spectrum_interval.hi
    if cfg.dim > 1 and cfg.cond_max == 1 and lo < hi:
        raise ConfigurationError("cond_max = 1 is unreachable for continuous eigenvalue draws")
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(REJECTION_BUDGET):
        lam = np.exp(rng.uniform(llo, lhi, cfg.dim))
        if lam.max() / lam.min() <= cfg.cond_max:
            return lam
    raise ConfigurationError(
        f"could not draw eigenvalues in {cfg.spectrum_interval} with condition number "
        f"<= {cfg.cond_max} in {REJECTION_BUDGET} attempts"
    )


def _spd(rng: np.random.Generator, cfg: GenConfig) -> SymMatrix:
    lam = _eigenvalues(rng, cfg)
    q = random_orthogonal(rng, cfg.dim)
    return _sym((q * lam) @ q.T)


def _contraction(rng: np.random.Generator, cfg: GenConfig) -> SymMatrix:
    if cfg.norm_cap is None:
        raise ConfigurationError("contractions need norm_cap")
    a = _spd(rng, cfg)
    target = rng.uniform(0.5, 1.0) * cfg.norm_cap
    return _sym(a * (target / operator_norm(a)))


def random_spd(cfg: GenConfig, stream: int = 0) -> SymMatrix:
    """``Q diag(lam) Q^T`` with log-uniform ``lam`` and near-Haar ``Q``."""
    return _spd(rng_for(cfg.seed, stream), cfg)


def random_contraction_spd(cfg: GenConfig, stream: int = 0) -> SymMatrix:
    """Random SPD matrix rescaled to operator norm ``u * norm_cap``, ``u ~ U[0.5, 1]``."""
    return _contraction(rng_for(cfg.seed, stream), cfg)


def random_commuting_pair(cfg: GenConfig, stream: int = 0):
    rng = rng_for(cfg.seed, stream)
    q = random_orthogonal(rng, cfg.dim)
    la = _eigenvalues(rng, cfg)
    lb = _eigenvalues(rng, cfg)
    return _sym((q * la) @ q.T), _sym((q * lb) @ q.T)


class HypothesisPair(NamedTuple):
    A: SymMatrix
    B: SymMatrix
    draws: int


def _psd_increment(rng: np.random.Generator, cfg: GenConfig, ref: SymMatrix) -> SymMatrix:
    # strictly positive, sized relative to ref so the pair is neither equal nor far apart
    p = _spd(rng, cfg)
    return _sym(p * (rng.uniform(0.05, 1.0) * operator_norm(ref) / operator_norm(p)))


def _base(rng, cfg, f: ScalarFn) -> SymMatrix:
    return _contraction(rng, cfg) if f.requires_contraction else _spd(rng, cfg)


def _construct(rng, cfg: GenConfig, f: ScalarFn):
    if f.monotone is None:
        raise GenerationError(f"'{f.id}' is not monotone; use the reject strategy")
    increasing = f.monotone == "increasing"
    if f.operator_monotone:
        lower = _base(rng, cfg, f)
        upper = _sym(lower + _psd_increment(rng, cfg, lower))
        if f.requires_contraction:
            c = rng.uniform(0.5, 1.0) * cfg.norm_cap / operator_norm(upper)
            lower, upper = _sym(c * lower), _sym(c * upper)
        return (lower, upper) if increasing else (upper, lower)
    if f.inverse is None:
        raise GenerationError(
            f"'{f.id}' is neither operator monotone nor invertible; use the reject strategy"
        )
    # build the order in the image: f(A) <= f(B) by construction
    first = _base(rng, cfg, f)
    f_first = matrix_function(first, f)
    f_second = _sym(f_first + _psd_increment(rng, cfg, f_first))
    second = matrix_function(f_second, f.inverse)
    return (first, second) if increasing else (second, first)


def pair_with_hypothesis(
    f: ScalarFn,
    cfg: GenConfig,
    stream: int = 0,
    strategy: str = "construct",
    tol: float = 1e-8,
    rng: Optional[np.random.Generator] = None,
) -> HypothesisPair:
    """Draw ``(A, B)`` with ``f(A) <= f(B)``.

    ``construct`` builds the order directly: through ``A <= B`` for operator
    monotone ``f`` (reversed when decreasing), otherwise through the image
    ``f(B) = f(A) + P`` and the scalar inverse.  ``reject`` draws
    independent pairs and filters, up to 10^4 draws.
    """
    if f.requires_contraction and cfg.norm_cap is None:
        cfg = replace(cfg, norm_cap=0.9)
    rng = rng_for(cfg.seed, stream) if rng is None else rng
    if strategy == "construct":
        A, B = _construct(rng, cfg, f)
        if not hypothesis_fA_leq_fB(f, A, B, tol):
            raise GenerationError(f"constructed pair violates f(A) <= f(B) for '{f.id}'")
        return HypothesisPair(A, B, 1)
    if strategy != "reject":
        raise ConfigurationError(f"unknown strategy '{strategy}' (construct | reject)")
    for k in range(1, REJECTION_BUDGET + 1):
        A, B = _base(rng, cfg, f), _base(rng, cfg, f)
        if hypothesis_fA_leq_fB(f, A, B, tol):
            return HypothesisPair(A, B, k)
    raise GenerationError(
        f"no pair with f(A) <= f(B) for '{f.id}' in {REJECTION_BUDGET} draws; "
        "try the construct strategy"
    )


# -- chain inputs -----------------------------------------------------------


def _draw_scalars(rng, ranges, params, ordered):
    out = {}
    for name, lo, hi in ranges:
        if name in params:
            out[name] = float(params[name])
        else:
            # lo + (hi - lo) * U[0, 1): hi is excluded, and reversed bounds
            # give a half-open interval closed at lo, e.g. (1/2, 1]
            out[name] = lo + (hi - lo) * rng.random()
    if ordered:
        names = [n for n in ordered if n not in params]
        vals = sorted(out[n] for n in names)
        out.update(zip(names, vals))
    return out


def sample_inputs(
    kind: str,
    f: Optional[ScalarFn],
    cfg: GenConfig,
    stream: int,
    scalar_ranges=(),
    params: Optional[dict] = None,
    ordered=(),
    strategy: str = "construct",
) -> dict:
    """Inputs for one chain trial.

    ``kind`` selects the matrix recipe; ``scalar_ranges`` lists
    ``(name, lo, hi)`` weights to draw; ``params`` pins any of them.
    """
    params = dict(params or {})
    rng = rng_for(cfg.seed, stream)
    contract = (f is not None and f.requires_contraction) or kind == "contraction_pair"
    if contract and cfg.norm_cap is None:
        cfg = replace(cfg, norm_cap=0.9)
    draw = (lambda: _contraction(rng, cfg)) if contract else (lambda: _spd(rng, cfg))
    out: dict = {}

    if kind in ("pair", "contraction_pair", "norm_pair"):
        out["A"], out["B"] = draw(), draw()
        if kind == "norm_pair" and operator_norm(out["A"]) > operator_norm(out["B"]):
            out["A"], out["B"] = out["B"], out["A"]
    elif kind == "commuting_pair":
        q = random_orthogonal(rng, cfg.dim)
        out["A"] = _sym((q * _eigenvalues(rng, cfg)) @ q.T)
        out["B"] = _sym((q * _eigenvalues(rng, cfg)) @ q.T)
    elif kind == "hyp_pair":
        pair = pair_with_hypothesis(f, cfg, stream, strategy=strategy, rng=rng)
        out["A"], out["B"] = pair.A, pair.B
        out["draws"] = pair.draws
    elif kind == "dominated_quad":
        A, B = draw(), draw()
        out.update(A=A, B=B, C=_sym(A + _psd_increment(rng, cfg, A)), D=_sym(B + _psd_increment(rng, cfg, B)))
    elif kind == "ando":
        A, B = draw(), draw()
        G = gmean(A, B)
        H = rng.standard_normal((cfg.dim, cfg.dim))
        H = H + H.T
        H = H / operator_norm(H)
        eps_max = float(params.pop("eps_max", 0.2))
        eps = rng.uniform(0.0, eps_max * operator_norm(G))
        out.update(A=A, B=B, X=_sym(G + eps * H), eps=eps)
    elif kind in ("interval", "log_interval"):
        lo, hi = params.pop("lo", 0.1), params.pop("hi", 10.0 if kind == "log_interval" else 5.0)
        if kind == "log_interval":
            a, b = np.exp(rng.uniform(math.log(lo), math.log(hi), 2))
        else:
            a, b = rng.uniform(lo, hi, 2)
        a, b = sorted((float(a), float(b)))
        if a == b:
            raise GenerationError("degenerate interval draw")
        out.update(a=a, b=b)
    else:
        raise ConfigurationError(f"unknown input kind '{kind}'")

    out.update(_draw_scalars(rng, scalar_ranges, params, ordered))
    return out
