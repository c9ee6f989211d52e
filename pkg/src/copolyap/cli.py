"""Command-line interface.

Subcommands:
  synth     read a problem JSON, run a synthesis hierarchy, write a
            certificate JSON with an embedded verification report
            (exit 0 when certified, 1 when not found)
  verify    re-check a certificate against a problem
            (exit 0 certified, 1 falsified, 2 unknown)
  simulate  write a trajectory CSV (exit 0)

Malformed inputs exit with code 64 and a diagnostic naming the offending
field.  The environment variable COPOLYAP_THREADS caps the verification
worker count; COPOLYAP_NUMBA=0 selects the pure-numpy kernel backend.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import disc, polya, sim, verify
from .synth import Certificate, ProblemSpec

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_FALSIFIED = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64

logger = logging.getLogger(__name__)


class InputError(Exception):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _load_json(path, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(what, f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(what, f"invalid JSON in {path}: {exc}")


def _load_problem(path) -> ProblemSpec:
    data = _load_json(path, "input")
    for key in ("n", "cone", "field"):
        if key not in data:
            raise InputError(key, "missing required field")
    try:
        return ProblemSpec.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("field", str(exc))


def _load_certificate(path) -> Certificate:
    data = _load_json(path, "cert")
    for key in ("h", "r", "method"):
        if key not in data:
            raise InputError(key, "missing required field")
    try:
        return Certificate.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("cert", str(exc))


def _write_json(path, data: dict):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_x0(text: str, n: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError("x0", f"not a comma-separated vector: {text!r}")
    if len(values) != n:
        raise InputError("x0", f"expected {n} components, got {len(values)}")
    return np.array(values)


def _cmd_synth(args) -> int:
    problem = _load_problem(args.input)
    if args.method == "disc":
        opts = disc.DiscOptions(
            d_max=args.dmax, r_max=args.rmax, delta_min=args.delta_min,
            margin=args.margin, mode=args.mode,
        )
        result = disc.synthesize(problem, opts)
        search = {"d_max": args.dmax, "r_max": args.rmax,
                  "delta_min": args.delta_min, "mode": args.mode}
    elif args.method == "polya":
        opts = polya.PolyaOptions(
            q_max=args.dmax, r_max=args.rmax, d_max=args.polya_dmax,
            margin=args.margin,
        )
        result = polya.synthesize(problem, opts)
        search = {"q_max": args.dmax, "r_max": args.rmax,
                  "lift_max": args.polya_dmax}
    else:
        raise InputError("method", f"unknown method {args.method!r}")
    if not result.found:
        logger.warning("no certificate found (%d nodes tried)", result.nodes_tried)
        print("not found")
        return EXIT_NOT_FOUND
    cert = result.certificate
    # run configuration rides along in the persisted params
    cert.params["search"] = search
    cert.params["seed"] = args.seed
    cert.params["samples"] = args.samples
    report = verify.verify_certificate(problem, cert)
    sampling = verify.sample_decrease_check(
        problem, cert, num_samples=args.samples, seed=args.seed
    )
    from dataclasses import replace

    report = replace(report, sampling=sampling)
    cert = cert.with_report(report)
    if args.out:
        _write_json(args.out, cert.to_json())
    print(f"certificate: degree={cert.h.homogeneous_degree()} r={cert.r} "
          f"params={cert.params} aggregate={report.aggregate}")
    return EXIT_OK if report.certified else EXIT_NOT_FOUND


def _cmd_verify(args) -> int:
    problem = _load_problem(args.input)
    cert = _load_certificate(args.cert)
    report = verify.verify_certificate(
        problem, cert, max_level=args.max_level, polya_dmax=args.polya_dmax
    )
    sampling = verify.sample_decrease_check(
        problem, cert, num_samples=args.samples, seed=args.seed
    )
    from dataclasses import replace

    report = replace(report, sampling=sampling)
    if args.out:
        _write_json(args.out, cert.with_report(report).to_json())
    print(f"verification: {report.aggregate} "
          f"(max sampled derivative {sampling.max_derivative:.3e})")
    if report.aggregate == "certified":
        return EXIT_OK
    if report.aggregate == "falsified":
        return EXIT_FALSIFIED
    return EXIT_UNKNOWN


def _cmd_simulate(args) -> int:
    problem = _load_problem(args.input)
    x0 = _parse_x0(args.x0, problem.n)
    cert = _load_certificate(args.cert) if args.cert else None
    traj = sim.simulate(problem, x0, T=args.T, dt=args.dt)
    if args.out:
        sim.write_csv(traj, args.out, cert=cert)
    final = traj.final_state()
    print(f"simulated {len(traj.times) - 1} steps; final norm "
          f"{np.linalg.norm(final):.6e}" + (" (truncated)" if traj.truncated else ""))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copolyap",
        description="Synthesize, verify and simulate copositive Lyapunov "
                    "certificates for complementarity dynamics on the "
                    "nonnegative orthant.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="search for a certificate")
    p.add_argument("--input", required=True, help="problem JSON")
    p.add_argument("--method", choices=("disc", "polya"), default="disc")
    p.add_argument("--dmax", type=int, default=6,
                   help="maximum numerator degree (default 6)")
    p.add_argument("--rmax", type=int, default=2,
                   help="maximum denominator exponent (default 2)")
    p.add_argument("--delta-min", dest="delta_min", type=float, default=2.0**-6,
                   help="smallest nominal mesh, a power of 1/2 (default 1/64)")
    p.add_argument("--polya-dmax", dest="polya_dmax", type=int, default=8,
                   help="maximum coefficient-positivity lift degree (default 8)")
    p.add_argument("--margin", type=float, default=1e-6,
                   help="strict-positivity margin on h constraints (default 1e-6)")
    p.add_argument("--mode", choices=disc.MODES, default="conservative",
                   help="face constraint handling for the disc method")
    p.add_argument("--samples", type=int, default=2000,
                   help="sampling-check points per region (default 2000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="certificate JSON output path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("verify", help="re-check a certificate")
    p.add_argument("--input", required=True, help="problem JSON")
    p.add_argument("--cert", required=True, help="certificate JSON")
    p.add_argument("--max-level", dest="max_level", type=int, default=8)
    p.add_argument("--polya-dmax", dest="polya_dmax", type=int, default=8)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write certificate+report JSON here")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", help="integrate the constrained dynamics")
    p.add_argument("--input", required=True, help="problem JSON")
    p.add_argument("--x0", required=True, help="comma-separated initial state")
    p.add_argument("--T", type=float, required=True, help="time horizon")
    p.add_argument("--dt", type=float, default=1e-3, help="step size (default 1e-3)")
    p.add_argument("--cert", help="optional certificate for a V column")
    p.add_argument("--out", help="trajectory CSV output path")
    p.set_defaults(func=_cmd_simulate)
    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; fold into the usage exit code
        return EXIT_USAGE if exc.code not in (0, None) else 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
