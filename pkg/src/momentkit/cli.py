"""``momentkit`` command line.

Every subcommand prints one JSON document on stdout.  Exit status: 0 when the
check passed or the object was produced, 1 when a check failed (the JSON
explains why and carries witnesses), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .certify import (DEFAULT_CERT_TOL, DEFAULT_MAX_DEGREE, Certificate, counterexample_search,
                      search_certificate, verify_certificate)
from .errors import DegreeOverflowError, MomentKitError, RankDetectionError, RecoveryError
from .fixtures import FIXTURE_KINDS, generate_fixture
from .hausdorff import DEFAULT_RANK_TOL, Sequence1D, is_psd_on_N0, recover_atoms, verify_recovery
from .moments import (DEFAULT_PSD_TOL, AtomicMeasure, MomentSequence, check_ball_criterion,
                      check_binomial_cone, is_psd, moment_matrix, moments_from_measure)
from .poly import parse_polynomial, sum_of_squares
from .vnorm import support_bound, vnorm_ratio, vnorm_root

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


def _clean(obj):
    # JSON has no inf/nan; report them as null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: insertion key order, shortest round-trip floats."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", path=path) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc.msg}", path=path,
                         line=exc.lineno, column=exc.colno) from exc


def _load_moments(args) -> MomentSequence:
    data = _read_json(args.moments)
    try:
        return MomentSequence.from_json(data, normalize=args.normalize)
    except (KeyError, TypeError) as exc:
        raise InputError(f"moment file does not match the schema: missing or bad field {exc}") from exc


def _poly(text: str, s: int):
    return parse_polynomial(text, s)


def cmd_gen_moments(args):
    data = _read_json(args.measure)
    try:
        mu = AtomicMeasure.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"measure file does not match the schema: missing or bad field {exc}") from exc
    L = moments_from_measure(mu, args.max_degree, normalize=args.normalize)
    return EXIT_OK, L.to_json()


def cmd_check_psd(args):
    L = _load_moments(args)
    q = _poly(args.shift, L.num_vars) if args.shift else None
    qdeg = q.degree if q is not None else 0
    top = (L.max_degree - qdeg) // 2 if args.degree is None else args.degree
    if top < 0:
        raise DegreeOverflowError(qdeg, L.max_degree, "check-psd")
    levels = []
    passed = True
    for d in range(top + 1):
        res = is_psd(moment_matrix(L, d, q), args.psd_tol)
        levels.append({"d": d, **res.to_json()})
        passed = passed and res.is_psd
    out = {"passed": passed, "shift": str(q) if q is not None else "1", "verified_degree": 2 * top + qdeg,
           "levels": levels}
    return (EXIT_OK if passed else EXIT_FAIL), out


def cmd_check_ball(args):
    L = _load_moments(args)
    budget = L.max_degree if args.budget is None else args.budget
    res = check_ball_criterion(L, budget, args.tol)
    return (EXIT_OK if res else EXIT_FAIL), res.to_json()


def cmd_check_cone(args):
    L = _load_moments(args)
    a = _poly(args.element, L.num_vars)
    budget = L.max_degree if args.budget is None else args.budget
    res = check_binomial_cone(L, a, args.T, budget, args.tol)
    return (EXIT_OK if res else EXIT_FAIL), {"element": str(a), "T": args.T, **res.to_json()}


def cmd_vnorm(args):
    L = _load_moments(args)
    a = _poly(args.element, L.num_vars)
    deg = max(a.degree, 1)
    if args.kind == "ratio":
        budget = (L.max_degree // deg - 2) // 2 if args.budget is None else args.budget
        est = vnorm_ratio(L, a, max(budget, 0))
    else:
        budget = L.max_degree // (2 * deg) if args.budget is None else args.budget
        est = vnorm_root(L, a, budget)
    return EXIT_OK, {"element": str(a), **est.to_json()}


def cmd_support_bound(args):
    L = _load_moments(args)
    gens = [_poly(g, L.num_vars) for g in args.generators] if args.generators else None
    if gens is None:
        from .poly import Polynomial
        gens = [Polynomial.variable(L.num_vars, i) for i in range(L.num_vars)]
    b = sum_of_squares(gens)
    budget = L.max_degree // max(b.degree, 1) - 1 if args.budget is None else args.budget
    est = support_bound(L, gens, max(budget, 0))
    return EXIT_OK, {"generators": [str(g) for g in gens], "squared_radius": est.value,
                     "radius": math.sqrt(est.value), "level": est.level, "budget": est.budget,
                     "sequence": list(est.sequence), "unbounded_suspect": est.unbounded_suspect}


def cmd_solve_1d(args):
    data = _read_json(args.input)
    try:
        f = Sequence1D(data["values"], normalize=args.normalize)
    except (KeyError, TypeError) as exc:
        raise InputError(f"sequence file does not match the schema: missing or bad field {exc}") from exc
    check = is_psd_on_N0(f, args.psd_tol)
    if not check:
        return EXIT_FAIL, {"status": "not-psd", **check.to_json()}
    try:
        rec = recover_atoms(f, args.rank_tol)
    except (RankDetectionError, RecoveryError) as exc:
        return EXIT_FAIL, {"status": "recovery-failed", "message": str(exc)}
    report = verify_recovery(f, rec)
    return EXIT_OK, {**rec.to_json(), "errors": list(report.errors)}


def cmd_certify(args):
    p = _poly(args.target, args.vars)
    out = {"target": str(p), "region": args.region}
    ce = counterexample_search(p, args.region, args.samples, args.seed)
    if ce is not None:
        out["counterexample"] = ce.to_json()
        if ce.value < 0:
            # every cone element is >= 0 on the region, so no degree can work
            out.update(status="no-certificate-exists", degree=None, coefficients=[], residual=None,
                       message=f"target is negative at {list(ce.point)}")
            return EXIT_FAIL, out
    res = search_certificate(p, args.region, args.max_degree, args.min_degree, args.cert_tol)
    if isinstance(res, Certificate):
        out.update(res.to_json())
        return EXIT_OK, out
    out.update(res.to_json())
    out.update(coefficients=[], residual=None)
    return EXIT_FAIL, out


def cmd_verify_certificate(args):
    cert = Certificate.from_json(_read_json(args.input))
    residual, status = verify_certificate(cert, args.cert_tol)
    return (EXIT_OK if status == "verified" else EXIT_FAIL), {"status": status, "residual": residual}


def cmd_fixture(args):
    return EXIT_OK, generate_fixture(args.kind, args.seed, args.vars, args.max_degree)


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _pos_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("MOMENTKIT_SEED")
    default_seed = int(env_seed) if env_seed else 0

    parser = argparse.ArgumentParser(
        prog="momentkit",
        description="Truncated moment problems: moment matrices, v_L estimates, 1D recovery, cone certificates.",
        epilog="Exit status: 0 passed/produced, 1 check failed, 2 usage or input error. "
               "MOMENTKIT_SEED sets the default --seed.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def moments_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--moments", required=True, help="moment JSON file ('-' for stdin)")
        p.add_argument("--normalize", action="store_true", help="rescale moments so that L(1) = 1")
        return p

    p = sub.add_parser("gen-moments", help="moments of an atomic measure",
                       description="Compute all moments up to --max-degree of a measure JSON file.")
    p.add_argument("--measure", required=True, help="measure JSON file ('-' for stdin)")
    p.add_argument("--max-degree", type=_nonneg_int, required=True, help="truncation degree D")
    p.add_argument("--normalize", action="store_true", help="rescale weights to total mass 1")
    p.set_defaults(func=cmd_gen_moments)

    p = moments_cmd("check-psd", "PSD test of moment or localizing matrices")
    p.add_argument("--degree", type=_nonneg_int, help="largest basis degree d (default: largest feasible)")
    p.add_argument("--shift", help="localizing polynomial q, e.g. '1 - x1^2 - x2^2' (default 1)")
    p.add_argument("--psd-tol", type=_pos_float, default=DEFAULT_PSD_TOL, help="relative eigenvalue tolerance")
    p.set_defaults(func=cmd_check_psd)

    p = moments_cmd("check-ball", "evaluate L on all unit-ball cone generators")
    p.add_argument("--budget", type=_nonneg_int, help="generator degree cap (default: max degree)")
    p.add_argument("--tol", type=_pos_float, default=DEFAULT_PSD_TOL, help="allowed negativity")
    p.set_defaults(func=cmd_check_ball)

    p = moments_cmd("check-cone", "check L((T-a)^p (T+a)^q) >= 0 up to a degree budget")
    p.add_argument("--element", required=True, help="polynomial a")
    p.add_argument("--T", type=_pos_float, required=True, help="bound T > 0")
    p.add_argument("--budget", type=_nonneg_int, help="degree budget (default: max degree)")
    p.add_argument("--tol", type=_pos_float, default=DEFAULT_PSD_TOL, help="allowed negativity")
    p.set_defaults(func=cmd_check_cone)

    p = moments_cmd("vnorm", "truncated estimate of v_L(a)")
    p.add_argument("--element", required=True, help="polynomial a")
    p.add_argument("--budget", type=_nonneg_int, help="largest level n (default: largest feasible)")
    p.add_argument("--kind", choices=("ratio", "root"), default="ratio", help="estimator form")
    p.set_defaults(func=cmd_vnorm)

    p = moments_cmd("support-bound", "squared support radius from v_L(g_1^2 + ... + g_m^2)")
    p.add_argument("--generators", nargs="+", help="generator polynomials (default: x1 ... xs)")
    p.add_argument("--budget", type=_nonneg_int, help="largest level n (default: largest feasible)")
    p.set_defaults(func=cmd_support_bound)

    p = sub.add_parser("solve-1d", help="recover an atomic measure from a 1D moment sequence",
                       description="Read {\"values\": [f(0), ..., f(N)]} and recover atoms.")
    p.add_argument("--input", required=True, help="sequence JSON file ('-' for stdin)")
    p.add_argument("--rank-tol", type=_pos_float, default=DEFAULT_RANK_TOL, help="relative singular-value cutoff")
    p.add_argument("--psd-tol", type=_pos_float, default=DEFAULT_PSD_TOL, help="Hankel PSD tolerance")
    p.add_argument("--normalize", action="store_true", help="divide by f(0) first")
    p.set_defaults(func=cmd_solve_1d)

    p = sub.add_parser("certify", help="search a cone certificate for a target polynomial",
                       description="Degree escalation search for a nonnegative combination of cone generators.")
    p.add_argument("--target", required=True, help="target polynomial, e.g. '1 + x1^2'")
    p.add_argument("--region", choices=("ball", "box"), default="ball", help="cone family")
    p.add_argument("--vars", type=int, required=True, help="number of variables s")
    p.add_argument("--max-degree", type=_nonneg_int, default=DEFAULT_MAX_DEGREE, help="largest degree tried")
    p.add_argument("--min-degree", type=_nonneg_int, help="first degree tried (default: degree of target)")
    p.add_argument("--cert-tol", type=_pos_float, default=DEFAULT_CERT_TOL, help="per-coefficient residual")
    p.add_argument("--samples", type=_nonneg_int, default=20000, help="counterexample pre-filter samples")
    p.add_argument("--seed", type=int, default=default_seed, help="sampling seed")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify-certificate", help="re-verify a certificate JSON by re-expansion")
    p.add_argument("--input", required=True, help="certificate JSON file ('-' for stdin)")
    p.add_argument("--cert-tol", type=_pos_float, default=DEFAULT_CERT_TOL, help="per-coefficient residual")
    p.set_defaults(func=cmd_verify_certificate)

    p = sub.add_parser("fixture", help="emit a deterministic fixture bundle")
    p.add_argument("--kind", choices=FIXTURE_KINDS, required=True)
    p.add_argument("--seed", type=int, default=default_seed, help="generator seed")
    p.add_argument("--vars", type=int, default=2, help="dimension for random-ball-atoms")
    p.add_argument("--max-degree", type=_nonneg_int, help="moment truncation")
    p.set_defaults(func=cmd_fixture)
    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, payload = args.func(args)
    except InputError as exc:
        code, payload = EXIT_USAGE, {"error": "input", "message": str(exc), **exc.details}
    except DegreeOverflowError as exc:
        code, payload = EXIT_USAGE, {"error": "degree-overflow", "message": str(exc),
                                     "required": exc.required, "available": exc.available}
    except (MomentKitError, ValueError) as exc:
        code, payload = EXIT_USAGE, {"error": type(exc).__name__, "message": str(exc)}
    stdout.write(dumps(payload) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
