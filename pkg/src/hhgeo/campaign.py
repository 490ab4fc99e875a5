"""Verification campaigns: many seeded trials of one or more chains."""

from __future__ import annotations

import heapq
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .chains import FAIL, HYPOTHESIS_NOT_MET, ChainReport, ChainSpec, check_chain, get_chain, REGISTRY
from .errors import ConfigurationError, HHGeoError
from .funcat import ScalarFn, catalogue_fn, catalogue_map, known_maps
from .gen import GenConfig, sample_inputs
from .linalg import Interval
from .quad import QuadratureSpec

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2
EXIT_VACUOUS = 3


@dataclass
class CampaignConfig:
    chains: Sequence[str] = ("all",)
    fn: Optional[str] = None
    trials: int = 500
    dims: Sequence[int] = (2, 3, 4, 5, 6, 7, 8)
    seed: int = 0
    tol: float = 1e-8
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    cond_max: float = 100.0
    spectrum_interval: Tuple[float, float] = (0.1, 10.0)
    params: dict = field(default_factory=dict)
    strategy: str = "construct"
    poly_coeffs: Optional[Sequence[float]] = None
    map_id: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigurationError("dims must be a non-empty list of positive integers")
        if self.tol < 0:
            raise ConfigurationError("tol must be non-negative")
        if self.map_id is not None and self.map_id not in known_maps():
            raise ConfigurationError(f"unknown positive map '{self.map_id}'; known: {', '.join(known_maps())}")

    def chain_ids(self) -> List[str]:
        if list(self.chains) == ["all"]:
            return list(REGISTRY)
        return [get_chain(c).id for c in self.chains]

    def function_for(self, chain: ChainSpec) -> Optional[ScalarFn]:
        """Resolve the function slot, raising ConfigurationError if inadmissible."""
        if chain.fn_slot is None:
            if self.fn is not None and list(self.chains) != ["all"]:
                raise ConfigurationError(f"chain '{chain.id}' takes no function (got --f {self.fn})")
            return None
        name = self.fn if self.fn is not None else chain.default_fn
        f = catalogue_fn(name, self.poly_coeffs)
        if not chain.admits(f):
            raise ConfigurationError(
                f"function '{f.id}' (flags: {', '.join(sorted(f.flags)) or 'none'}) is not admissible "
                f"for chain '{chain.id}', which requires one of: {', '.join(sorted(chain.fn_slot))}"
            )
        return f

    def gen_config(self, dim: int) -> GenConfig:
        lo, hi = self.spectrum_interval
        return GenConfig(seed=self.seed, dim=dim, cond_max=self.cond_max, spectrum_interval=Interval(lo, hi))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["quad"] = asdict(self.quad)
        d["dims"] = list(self.dims)
        d["chains"] = list(self.chains)
        d["spectrum_interval"] = list(self.spectrum_interval)
        d["poly_coeffs"] = list(self.poly_coeffs) if self.poly_coeffs is not None else None
        d.pop("workers")
        d["version"] = __version__
        return d


def run_trial(chain: ChainSpec, f: Optional[ScalarFn], config: CampaignConfig, stream: int) -> ChainReport:
    dim = config.dims[stream % len(config.dims)]
    cfg = config.gen_config(dim)
    params = dict(config.params)
    inputs = sample_inputs(
        chain.inputs, f, cfg, stream, chain.scalars, params, chain.ordered_scalars, config.strategy
    )
    psi = None
    if chain.needs_map:
        maps = known_maps()
        psi = catalogue_map(config.map_id or maps[stream % len(maps)], dim)
    inputs.update(seed=config.seed, stream=stream, dim=dim)
    return check_chain(chain, inputs, config.tol, config.quad, f=f, psi=psi)


@dataclass
class TrialOutcome:
    stream: int
    dim: int
    report: Optional[ChainReport]
    error: Optional[str] = None


def _trial_job(job) -> TrialOutcome:
    chain_id, config, stream = job
    chain = get_chain(chain_id)
    dim = config.dims[stream % len(config.dims)]
    try:
        f = config.function_for(chain)
        return TrialOutcome(stream, dim, run_trial(chain, f, config, stream))
    except HHGeoError as exc:
        return TrialOutcome(stream, dim, None, f"{type(exc).__name__}: {exc}")


def run_trials(chain_id: str, config: CampaignConfig, streams: Iterable[int]) -> List[TrialOutcome]:
    """Run trials; results come back in stream order whatever the worker count."""
    jobs = [(chain_id, config, s) for s in streams]
    if config.workers <= 1:
        return [_trial_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(_trial_job, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))


@dataclass
class ChainAggregate:
    id: str
    fn: Optional[str]
    trials_run: int = 0
    hypothesis_met: int = 0
    failures: int = 0
    errors: int = 0
    min_slack: Optional[float] = None
    argmin: Optional[dict] = None
    worst_link: Optional[str] = None
    first_error: Optional[str] = None

    def absorb(self, outcome: TrialOutcome, seed: int) -> None:
        self.trials_run += 1
        if outcome.error is not None:
            self.errors += 1
            if self.first_error is None:
                self.first_error = f"stream {outcome.stream}: {outcome.error}"
            return
        rep = outcome.report
        if rep.verdict == HYPOTHESIS_NOT_MET:
            return
        self.hypothesis_met += 1
        if rep.verdict == FAIL:
            self.failures += 1
        link = rep.worst_link
        if link is not None and (self.min_slack is None or link.rel_slack < self.min_slack):
            self.min_slack = link.rel_slack
            self.argmin = {"seed": seed, "stream": outcome.stream, "dim": outcome.dim}
            self.worst_link = f"{link.lhs} <= {link.rhs}"

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["first_error"] is None:
            d.pop("first_error")
        return d


@dataclass
class CampaignReport:
    config: CampaignConfig
    chains: List[ChainAggregate]
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def exit_code(self) -> int:
        if any(c.errors for c in self.chains):
            return EXIT_ERROR
        if any(c.failures for c in self.chains):
            return EXIT_VIOLATION
        if any(c.hypothesis_met == 0 for c in self.chains):
            return EXIT_VACUOUS
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "timestamp": self.timestamp,
            "config": self.config.to_dict(),
            "chains": [c.to_dict() for c in self.chains],
        }


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Run ``config.trials`` trials of every selected chain.

    Function admissibility is checked for all chains before any trial runs.
    """
    ids = config.chain_ids()
    fns = {cid: config.function_for(get_chain(cid)) for cid in ids}
    aggregates = []
    for cid in ids:
        agg = ChainAggregate(cid, fns[cid].id if fns[cid] is not None else None)
        for outcome in run_trials(cid, config, range(config.trials)):
            agg.absorb(outcome, config.seed)
        aggregates.append(agg)
    return CampaignReport(config, aggregates)


# -- stress search ------------------------------------------------------------

SEARCH_COND_MAX = 1e4
SEARCH_INTERVAL = (1e-2, 1e2)


@dataclass
class SearchReport:
    config: CampaignConfig
    chain_id: str
    fn: Optional[str]
    smallest: list
    trials_run: int
    hypothesis_met: int
    violations: int
    errors: list
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def exit_code(self) -> int:
        if self.errors:
            return EXIT_ERROR
        if self.violations:
            return EXIT_VIOLATION
        if self.hypothesis_met == 0:
            return EXIT_VACUOUS
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "timestamp": self.timestamp,
            "config": self.config.to_dict(),
            "chain": self.chain_id,
            "fn": self.fn,
            "trials_run": self.trials_run,
            "hypothesis_met": self.hypothesis_met,
            "violations": self.violations,
            "smallest": self.smallest,
            "errors": self.errors,
        }


def run_search(config: CampaignConfig, budget: int, k: int = 10) -> SearchReport:
    """Hunt for the smallest link slacks of one chain under relaxed conditioning.

    Each entry of ``smallest`` carries ``seed``/``stream``/``dim`` so the
    trial can be replayed exactly.
    """
    if budget < 1:
        raise ConfigurationError("budget must be >= 1")
    ids = config.chain_ids()
    if len(ids) != 1:
        raise ConfigurationError("search takes exactly one chain")
    chain = get_chain(ids[0])
    f = config.function_for(chain)
    entries = []
    errors = []
    met = violations = 0
    for out in run_trials(chain.id, config, range(budget)):
        if out.error is not None:
            errors.append({"seed": config.seed, "stream": out.stream, "dim": out.dim, "error": out.error})
            continue
        rep = out.report
        if rep.verdict == HYPOTHESIS_NOT_MET:
            continue
        met += 1
        violations += rep.verdict == FAIL
        link = rep.worst_link
        entries.append(
            (link.rel_slack, out.stream, {
                "rel_slack": link.rel_slack, "slack": link.slack, "link": f"{link.lhs} <= {link.rhs}",
                "seed": config.seed, "stream": out.stream, "dim": out.dim, "digest": rep.digest,
                "verdict": rep.verdict,
            })
        )
    smallest = [e[2] for e in heapq.nsmallest(k, entries, key=lambda e: (e[0], e[1]))]
    return SearchReport(config, chain.id, f.id if f else None, smallest, budget, met, violations, errors)
