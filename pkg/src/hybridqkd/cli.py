"""Command-line front end.

Subcommands sweep the channel models and emit CSV (one fixed header per
subcommand, '#' comment lines carrying the exact invocation so a file
can be reproduced byte-for-byte), evaluate a key rate from experimental
estimates, and run the verification oracle suites.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 infeasible estimates.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, channels, verify
from .numerics import lambda_coeffs
from .rates import EstimateSet, FeasibilityError, constrained_min_rate, optimize_tau

DEFAULT_NMAX = 24
FLOAT_FMT = "%.12g"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return FLOAT_FMT % x


def _parse_float_list(text: str) -> list[float]:
    """Comma list '0.1,0.2' or linspace range 'lo:hi:count'."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            n = int(count)
            if n < 1:
                raise ValueError("count must be >= 1")
            return [float(v) for v in np.linspace(float(lo), float(hi), n)]
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed value list {text!r}: {exc}")


def _parse_tau(text: str):
    if text.strip().lower() == "opt":
        return "opt"
    return _parse_float_list(text)


def _emit(rows, header: list[str], meta: list[str], out: str | None) -> None:
    lines = [f"# {m}" for m in meta]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _run_points(worker, points, jobs: int):
    if jobs <= 1 or len(points) <= 1:
        return [worker(p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, keeping the output deterministic
        return list(pool.map(worker, points, chunksize=max(1, len(points) // (4 * jobs))))


def _etas_from_args(args) -> list[float]:
    if args.loss_db is not None:
        return [channels.eta_from_loss_db(db) for db in args.loss_db]
    return list(args.eta)


# workers are top-level so they pickle into the process pool


def _w_pure_loss(point):
    eta, tau_spec, tau_lo, tau_hi, nmax = point
    if tau_spec == "opt":
        def rate_of(tau):
            return channels.pure_loss_rate(eta, lambda_coeffs(tau, 1)).rate
        tau, _ = optimize_tau(rate_of, tau_lo, tau_hi)
    else:
        tau = tau_spec
    br = channels.pure_loss_rate(eta, lambda_coeffs(tau, nmax))
    return (eta, tau, br.Q, br.E, br.rate)


def _w_qi(point):
    loss_db, ed, tau_spec, tau_lo, tau_hi, nmax = point
    eta = channels.eta_from_loss_db(loss_db)
    f1 = 1.0 - 1.5 * ed

    def ours_of(tau):
        return channels.passive_rate(eta, f1, lambda_coeffs(tau, nmax)).rate

    def qi_of(tau):
        return channels.qi_rate(eta, ed, lambda_coeffs(tau, 1)).rate

    if tau_spec == "opt":
        _, r_ours = optimize_tau(ours_of, tau_lo, tau_hi)
        _, r_qi = optimize_tau(qi_of, tau_lo, tau_hi)
    else:
        r_ours, r_qi = ours_of(tau_spec), qi_of(tau_spec)
    return (loss_db, ed, r_ours, r_qi, channels.plob_bound(eta))


def _w_gaussian(point):
    loss_db, n_var, tau_spec, tau_lo, tau_hi, nmax = point
    eta = channels.eta_from_loss_db(loss_db)

    def rate_of(tau):
        return channels.gaussian_rate(eta, n_var, lambda_coeffs(tau, nmax)).rate_signed

    if tau_spec == "opt":
        tau_opt, signed = optimize_tau(rate_of, tau_lo, tau_hi)
    else:
        tau_opt, signed = tau_spec, rate_of(tau_spec)
    return (loss_db, n_var, tau_opt, max(signed, 0.0), channels.cv_upper_bound(eta, n_var))


def cmd_pure_loss(args) -> int:
    taus = ["opt"] if args.tau == "opt" else args.tau
    points = [
        (eta, t, args.tau_lo, args.tau_hi, args.nmax)
        for eta in _etas_from_args(args)
        for t in taus
    ]
    rows = _run_points(_w_pure_loss, points, args.jobs)
    _emit(rows, ["eta", "tau", "Q", "E", "rate"], args.meta, args.out)
    return 0


def cmd_region(args) -> int:
    rows = []
    etas = np.linspace(0.0, 1.0, args.eta_points)
    for tau in args.tau:
        region = channels.feasible_region(lambda_coeffs(tau, 4))
        for eta in etas:
            rows.append(
                (
                    tau,
                    eta,
                    region.Q_of_eta(eta),
                    region.c_min(eta),
                    region.c_max(eta),
                    region.c_of(eta, 1.0),
                )
            )
    _emit(
        rows,
        ["tau", "eta", "Q", "c_min", "c_max", "c_passive"],
        args.meta,
        args.out,
    )
    return 0


def cmd_qi_compare(args) -> int:
    taus = ["opt"] if args.tau == "opt" else args.tau
    points = [
        (db, ed, t, args.tau_lo, args.tau_hi, args.nmax)
        for ed in args.Ed
        for db in args.loss_db
        for t in taus
    ]
    rows = _run_points(_w_qi, points, args.jobs)
    _emit(rows, ["loss_db", "Ed", "rate_ours", "rate_qi", "plob"], args.meta, args.out)
    return 0


def cmd_gaussian(args) -> int:
    taus = ["opt"] if args.tau == "opt" else args.tau
    points = [
        (db, n, t, args.tau_lo, args.tau_hi, args.nmax)
        for n in args.N
        for db in args.loss_db
        for t in taus
    ]
    rows = _run_points(_w_gaussian, points, args.jobs)
    _emit(
        rows,
        ["loss_db", "N", "tau_opt", "rate_hybrid", "rate_cv_upper"],
        args.meta,
        args.out,
    )
    return 0


def cmd_lambdas(args) -> int:
    rows = []
    for tau in args.tau:
        coeffs = lambda_coeffs(tau, args.nmax)
        for n in range(args.nmax + 1):
            rows.append((tau, float(n), coeffs.lam[n]))
    _emit(rows, ["tau", "n", "lambda"], args.meta, args.out)
    return 0


def cmd_estimate(args) -> int:
    coeffs = lambda_coeffs(args.tau, args.nmax)
    try:
        est = EstimateSet(
            Q_hat=args.Q,
            P=tuple(args.P),
            c_hat=args.c,
            E_hat=args.E,
        )
        br = constrained_min_rate(est, coeffs, use_inequality=args.inequality)
    except FeasibilityError as exc:
        sys.stderr.write(f"infeasible estimates: {exc}\n")
        if exc.c_lo is not None:
            sys.stderr.write(
                f"attainable c interval: [{_fmt(exc.c_lo)}, {_fmt(exc.c_hi)}]\n"
            )
        return 3
    lines = [
        f"Q = {_fmt(br.Q)}",
        f"c = {_fmt(br.c)}",
        f"E = {_fmt(br.E)}",
        f"D_terms = {','.join(_fmt(v) for v in br.D_terms)}",
        f"leak = {_fmt(br.leak)}",
        f"rate_signed = {_fmt(br.rate_signed)}",
        f"rate = {_fmt(br.rate)}",
        f"tau = {_fmt(br.tau)}",
        f"f_opt = {','.join(_fmt(v) for v in br.f_opt)}",
        f"e_clamped = {br.e_clamped}",
    ]
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return 0


def cmd_verify(args) -> int:
    results = verify.run_suites(perturb_lambda=args.debug_perturb_lambda)
    lines = []
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        if not ok:
            failed += 1
        lines.append(f"{status} {name}: {detail}")
    lines.append(f"{len(results) - failed}/{len(results)} suites passed")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return 1 if failed else 0


def _add_common(p: argparse.ArgumentParser, tau_default) -> None:
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="parallel sweep workers")
    p.add_argument("--nmax", type=int, default=DEFAULT_NMAX,
                   help="lambda table length (photon cutoff for tail checks)")
    if tau_default is not None:
        p.add_argument("--tau", type=_parse_tau, default=tau_default,
                       help="threshold list 'a,b' / range 'lo:hi:n' / 'opt'")
        p.add_argument("--tau-lo", type=float, default=0.2,
                       help="lower end of the threshold optimisation bracket")
        p.add_argument("--tau-hi", type=float, default=2.0,
                       help="upper end of the threshold optimisation bracket")


def _add_loss(p: argparse.ArgumentParser, require_db: bool = False) -> None:
    if require_db:
        p.add_argument("--loss-db", type=_parse_float_list, required=True,
                       help="loss values in dB, list or 'lo:hi:n' range")
    else:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--eta", type=_parse_float_list,
                           help="transmissivities, list or 'lo:hi:n' range")
        group.add_argument("--loss-db", type=_parse_float_list,
                           help="loss values in dB, list or 'lo:hi:n' range")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridqkd",
        description="Asymptotic key rates for hybrid BB84 with heterodyne detection",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pure-loss", help="rate sweep for the pure-loss channel")
    _add_common(p, tau_default="opt")
    _add_loss(p)
    p.set_defaults(fn=cmd_pure_loss)

    p = sub.add_parser("region", help="feasible (Q, c) region boundaries")
    _add_common(p, tau_default=[1.0, 1.5, 2.0])
    p.add_argument("--eta-points", type=int, default=201,
                   help="number of eta samples per boundary polyline")
    p.set_defaults(fn=cmd_region)

    p = sub.add_parser("qi-compare", help="compare with the virtual-detector model")
    _add_common(p, tau_default="opt")
    p.add_argument("--Ed", type=_parse_float_list, default=[0.0, 0.01, 0.05],
                   help="misalignment probabilities")
    _add_loss(p, require_db=True)
    p.set_defaults(fn=cmd_qi_compare)

    p = sub.add_parser("gaussian", help="rate sweep under Gaussian noise")
    _add_common(p, tau_default="opt")
    p.add_argument("--N", type=_parse_float_list, default=[1e-6, 1e-5, 1e-4],
                   help="excess noise variances (shot-noise units)")
    _add_loss(p, require_db=True)
    p.set_defaults(fn=cmd_gaussian)

    p = sub.add_parser("lambdas", help="threshold coefficient table (figure 2 data)")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tau", type=_parse_float_list, default=[0.01] ,
                   help="threshold values, list or 'lo:hi:n' range")
    p.add_argument("--nmax", type=int, default=4)
    p.set_defaults(fn=cmd_lambdas)

    p = sub.add_parser("estimate", help="rate from experimental estimates")
    p.add_argument("--out", default=None)
    p.add_argument("--Q", type=float, required=True, help="measured gain")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--E", type=float, help="measured QBER")
    group.add_argument("--c", type=float, help="measured error parameter")
    p.add_argument("--P", type=_parse_float_list, required=True,
                   help="photon-number distribution 'p0,p1,...'")
    p.add_argument("--tau", type=float, required=True, help="detector threshold")
    p.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    p.add_argument("--inequality", action="store_true",
                   help="keep the error constraint as an inequality")
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("verify", help="run the oracle suites")
    p.add_argument("--out", default=None)
    p.add_argument("--debug-perturb-lambda", type=float, default=0.0,
                   help="debug hook: corrupt lambda_1 fed to closed forms")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    argv_text = " ".join(argv if argv is not None else sys.argv[1:])
    args.meta = [f"hybridqkd {__version__}", f"invocation: {argv_text}"]
    return args.fn(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
