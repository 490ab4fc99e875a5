"""Command-line front end.

Exit codes: 0 pass, 1 configuration or runtime error, 2 inequality
violation, 3 vacuous run (no trial met the chain's hypotheses).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .campaign import (
    EXIT_ERROR,
    EXIT_OK,
    SEARCH_COND_MAX,
    SEARCH_INTERVAL,
    CampaignConfig,
    run_campaign,
    run_search,
)
from .chains import REGISTRY, TERMS, Bindings, evaluate_term
from .errors import HHGeoError
from .funcat import catalogue_fn, known_fns
from .linalg import format_matrix, matrix_function, read_matrix
from .means import gmean_t
from .quad import QuadratureSpec


def _csv_ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _csv_floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _param(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got '{text}'")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter '{name}' needs a numeric value") from None


def _add_run_options(p: argparse.ArgumentParser, trials_flag: str, trials_default: int) -> None:
    p.add_argument("--chain", action="append", default=None,
                   help="chain id (repeatable) or 'all'")
    p.add_argument("--f", dest="fn", default=None, help="catalogue function id")
    p.add_argument(trials_flag, dest="trials", type=int, default=trials_default)
    p.add_argument("--dim", type=int, default=None, help="single dimension")
    p.add_argument("--dims", type=_csv_ints, default=None, help="comma-separated dimensions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--quad-order", type=int, default=16)
    p.add_argument("--quad-tol", type=float, default=1e-11)
    p.add_argument("--quad-refinements", type=int, default=6)
    p.add_argument("--cond-max", type=float, default=None)
    p.add_argument("--spectrum", type=_csv_floats, default=None, metavar="LO,HI",
                   help="eigenvalue interval for random SPD draws")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE",
                   help="pin a chain weight (t, s, u, nu, alpha) or a generator knob (eps_max, lo, hi)")
    p.add_argument("--strategy", choices=("construct", "reject"), default="construct")
    p.add_argument("--poly-coeffs", type=_csv_floats, default=None)
    p.add_argument("--map", dest="map_id", default=None, help="positive map for pos-map")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", type=Path, default=None, help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhgeo",
        description="Geometric means of SPD matrices and randomized checks of operator inequalities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification campaign")
    _add_run_options(verify, "--trials", 500)

    search = sub.add_parser("search", help="hunt for the smallest slacks of one chain")
    _add_run_options(search, "--budget", 1000)
    search.add_argument("--top", type=int, default=10, help="how many smallest slacks to keep")

    compute = sub.add_parser("compute", help="evaluate one quantity on matrix files")
    csub = compute.add_subparsers(dest="subject", required=True)
    g = csub.add_parser("gmean", help="A #_t B")
    g.add_argument("--t", type=float, default=0.5)
    g.add_argument("A", type=Path)
    g.add_argument("B", type=Path)
    fn = csub.add_parser("fn", help="f(A) by functional calculus")
    fn.add_argument("--f", dest="fn", required=True)
    fn.add_argument("--poly-coeffs", type=_csv_floats, default=None)
    fn.add_argument("A", type=Path)
    it = csub.add_parser("integral", help="a chain term, e.g. 'int_0^1 f(A)#_t f(B) dt'")
    it.add_argument("--term", required=True)
    it.add_argument("--f", dest="fn", default=None)
    it.add_argument("--poly-coeffs", type=_csv_floats, default=None)
    for name in ("t", "s", "u", "nu", "alpha"):
        it.add_argument(f"--{name}", type=float, default=None)
    it.add_argument("--quad-order", type=int, default=16)
    it.add_argument("--quad-tol", type=float, default=1e-11)
    it.add_argument("--quad-refinements", type=int, default=6)
    it.add_argument("A", type=Path)
    it.add_argument("B", type=Path)
    for p in (g, fn, it):
        p.add_argument("-o", "--out", type=Path, default=None, help="output matrix file (default stdout)")

    sub.add_parser("list-chains", help="print the chain registry")
    sub.add_parser("list-fns", help="print the function catalogue")
    return parser


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(args.quad_order, args.quad_refinements, args.quad_tol)


def _config(args, search: bool) -> CampaignConfig:
    chains = args.chain or (["all"] if not search else [])
    if search and len(chains) != 1:
        raise HHGeoError("search takes exactly one --chain")
    if args.dims is not None:
        dims = args.dims
    elif args.dim is not None:
        dims = [args.dim]
    else:
        dims = [2, 3, 4, 5, 6, 7, 8]
    cond_max = args.cond_max if args.cond_max is not None else (SEARCH_COND_MAX if search else 100.0)
    if args.spectrum is not None:
        if len(args.spectrum) != 2:
            raise HHGeoError("--spectrum takes exactly LO,HI")
        interval = tuple(args.spectrum)
    else:
        interval = SEARCH_INTERVAL if search else (0.1, 10.0)
    return CampaignConfig(
        chains=chains, fn=args.fn, trials=args.trials, dims=dims, seed=args.seed, tol=args.tol,
        quad=_quad(args), cond_max=cond_max, spectrum_interval=interval, params=dict(args.param),
        strategy=args.strategy, poly_coeffs=args.poly_coeffs, map_id=args.map_id, workers=args.workers,
    )


def _write_report(path: Optional[Path], payload: dict) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _cmd_verify(args) -> int:
    report = run_campaign(_config(args, search=False))
    for c in report.chains:
        status = "ok" if not (c.failures or c.errors) else "FAIL"
        if c.hypothesis_met == 0 and status == "ok":
            status = "vacuous"
        slack = "n/a" if c.min_slack is None else f"{c.min_slack:.3e}"
        print(f"{c.id:15s} fn={c.fn or '-':11s} trials={c.trials_run:5d} met={c.hypothesis_met:5d} "
              f"failures={c.failures} errors={c.errors} min_slack={slack}  {status}")
        if c.first_error:
            print(f"    first error: {c.first_error}", file=sys.stderr)
        if c.hypothesis_met == 0:
            print(f"    warning: no trial of '{c.id}' met its hypotheses", file=sys.stderr)
    _write_report(args.report, report.to_dict())
    return report.exit_code


def _cmd_search(args) -> int:
    report = run_search(_config(args, search=True), budget=args.trials, k=args.top)
    print(f"{report.chain_id} fn={report.fn or '-'} budget={report.trials_run} met={report.hypothesis_met} "
          f"violations={report.violations} errors={len(report.errors)}")
    for e in report.smallest:
        print(f"  rel_slack={e['rel_slack']:+.3e}  stream={e['stream']:6d} dim={e['dim']}  {e['link']}")
    for e in report.errors[:5]:
        print(f"  error at stream {e['stream']}: {e['error']}", file=sys.stderr)
    _write_report(args.report, report.to_dict())
    return report.exit_code


def _emit(out: Optional[Path], matrix) -> None:
    text = format_matrix(matrix)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_compute(args) -> int:
    if args.subject == "gmean":
        _emit(args.out, gmean_t(read_matrix(args.A), read_matrix(args.B), args.t))
    elif args.subject == "fn":
        f = catalogue_fn(args.fn, args.poly_coeffs)
        _emit(args.out, matrix_function(read_matrix(args.A), f))
    else:
        if args.term not in TERMS:
            raise HHGeoError(f"unknown term '{args.term}'; known: {', '.join(sorted(TERMS))}")
        f = catalogue_fn(args.fn, args.poly_coeffs) if args.fn else None
        bd = Bindings(A=read_matrix(args.A), B=read_matrix(args.B), f=f, quad=_quad(args),
                      **{k: getattr(args, k) for k in ("t", "s", "u", "nu", "alpha")})
        value = evaluate_term(args.term, bd)
        for key, err in bd.quad_errors.items():
            print(f"error estimate [{key}]: {err:.3e}", file=sys.stderr)
        if getattr(value, "ndim", 0) == 2:
            _emit(args.out, value)
        else:
            print(f"{float(value):.17g}")
    return EXIT_OK


def _cmd_list_chains(args) -> int:
    for c in REGISTRY.values():
        fn = f" [f: {c.default_fn}]" if c.default_fn else ""
        print(f"{c.id:15s} {c.relation:9s} {c.statement}{fn}")
    return EXIT_OK


def _cmd_list_fns(args) -> int:
    for name in known_fns():
        f = catalogue_fn(name)
        print(f"{f.id:12s} {f.formula:28s} on {str(f.domain):12s} {', '.join(sorted(f.flags))}")
    return EXIT_OK


COMMANDS = {
    "verify": _cmd_verify,
    "search": _cmd_search,
    "compute": _cmd_compute,
    "list-chains": _cmd_list_chains,
    "list-fns": _cmd_list_fns,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (HHGeoError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
