"""Command-line front end.

Exit codes: 0 Classical, 10 NonClassical, 11 Undecided (``certify``);
2 invalid arguments, 3 calibration failure, 4 internal inconsistency,
5 survey consistency violation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .errors import (
    IndexOutOfRange,
    InternalInconsistency,
    InvalidRank,
    InvalidState,
    QuadratureTooCoarse,
    UndefinedMeanDirection,
)
from .phasespace import (
    adaptive_grid,
    calibrate_lambda,
    default_grid,
    p_min,
    pfunc,
    verify_inverse,
    write_grid_csv,
)
from .separability import (
    CLASSICAL,
    NONCLASSICAL,
    CertifyConfig,
    bloch_correlations,
    certify,
    concurrence,
    ppt_min_eigenvalue,
    reduce_two_qubit,
)
from .survey import run_survey, summarize, write_survey_csv
from .symstate import (
    dicke_state,
    ghz_state,
    maximally_mixed,
    one_axis_twist,
    random_density,
    scs_amplitudes,
    scs_mixture,
)
from .witnesses import collective_moments, squeezing_xi2

EXIT_OK, EXIT_USAGE, EXIT_CALIBRATION, EXIT_INCONSISTENT, EXIT_SURVEY = 0, 2, 3, 4, 5
VERDICT_EXIT = {CLASSICAL: 0, NONCLASSICAL: 10, "Undecided": 11}

DISCLAIMER = ("note: the band-limited P is a diagnostic; negative values do not make a state "
              "non-classical (run `certify` for a verdict)")


class UsageError(Exception):
    """Bad command-line input; the message names the offending parameter."""


def _f(x):
    return io.fmt_float(x)


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for builder '{args.builder}'")


def _parse_atoms(text):
    atoms = []
    for chunk in text.split(","):
        try:
            w, t, p = (float(v) for v in chunk.split(":"))
        except ValueError as exc:
            raise UsageError(f"--atoms entry {chunk!r} is not weight:theta:phi") from exc
        atoms.append((w, t, p))
    return atoms


def build_state(args):
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    b = args.builder
    try:
        if b == "scs":
            _need(args, "theta", "phi")
            return scs_amplitudes(args.n, (args.theta, args.phi))
        if b == "dicke":
            _need(args, "k")
            return dicke_state(args.n, args.k)
        if b == "ghz":
            return ghz_state(args.n)
        if b == "twist":
            _need(args, "theta", "phi", "chi")
            return one_axis_twist(scs_amplitudes(args.n, (args.theta, args.phi)), args.chi)
        if b == "random":
            _need(args, "seed")
            return random_density(args.n, args.seed, args.rank)
        if b == "mixed":
            return maximally_mixed(args.n)
        if b == "mixture":
            _need(args, "atoms")
            atoms = _parse_atoms(args.atoms)
            w = np.array([a[0] for a in atoms])
            if np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
                raise UsageError("--atoms weights must be nonnegative and sum to 1")
            return scs_mixture(args.n, w / w.sum(), [(a[1], a[2]) for a in atoms])
    except IndexOutOfRange as exc:
        raise UsageError(f"--k: {exc}") from exc
    except InvalidRank as exc:
        raise UsageError(f"--rank: {exc}") from exc
    raise UsageError(f"--builder: unknown builder {b!r}")


def _load(path):
    try:
        return io.read_state(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"state file {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_state(args):
    state = build_state(args)
    io.write_state(args.output, state)
    rho = state.density()
    print(f"N = {state.n_qubits}")
    print(f"purity = {_f(rho.purity())}")
    if hasattr(state, "amplitudes"):
        print("amplitudes (M = -S..S):")
        for i, c in enumerate(state.amplitudes):
            print(f"  M={i - state.n_qubits / 2:+g}: {_f(c.real)} {_f(c.imag)}i")
    else:
        print("diagonal (M = -S..S): " + " ".join(_f(x) for x in np.diag(rho.matrix).real))
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_pfunc(args):
    rho = _load(args.state).density()
    grid = adaptive_grid(rho) if args.density is None else default_grid(rho.n_qubits, args.density)
    table = pfunc(rho, grid)
    write_grid_csv(table, args.output)
    lo, where = p_min(rho)
    print(f"grid = {grid.theta_order} x {grid.n_phi} ({len(grid)} nodes)")
    print(f"integral = {table.integral:.9f}")
    print(f"inverse residual = {_f(verify_inverse(rho, grid))}")
    print(f"min P = {_f(lo)} at theta = {_f(where.theta)}, phi = {_f(where.phi)}")
    print(DISCLAIMER)
    print(f"wrote {args.output}")
    return EXIT_OK


def _config(args):
    if args.epsilon_sep <= 0 or args.delta_wit <= 0:
        raise UsageError("--epsilon-sep and --delta-wit must be positive")
    return CertifyConfig(args.epsilon_sep, args.delta_wit, args.grid_size)


def cmd_certify(args):
    rho = _load(args.state).density()
    cert = certify(rho, _config(args))
    if args.output:
        io.write_json(args.output, cert.to_dict())
    print(f"verdict: {cert.verdict}")
    if cert.decomposition is not None:
        print(f"decomposition: {len(cert.decomposition.weights)} atom(s), residual {_f(cert.residual)}")
        for a in cert.decomposition.to_list():
            print(f"  p = {_f(a['weight'])}  theta = {_f(a['theta'])}  phi = {_f(a['phi'])}")
    for w in cert.witnesses:
        print(f"witness {w.type} [{w.cut_or_pair}] = {_f(w.value)}")
    if args.output:
        print(f"wrote {args.output}")
    return VERDICT_EXIT[cert.verdict]


def cmd_witness(args):
    rho = _load(args.state).density()
    n = rho.n_qubits
    for m in range(1, n // 2 + 1):
        print(f"ppt_min[{m}|{n - m}] = {_f(ppt_min_eigenvalue(rho, m))}")
    if n >= 2:
        two = reduce_two_qubit(rho)
        s, t, tr = bloch_correlations(two)
        print(f"pair concurrence = {_f(concurrence(two))}")
        print(f"pair s = [{', '.join(_f(x) for x in s)}]")
        print(f"sum t_mumu = {_f(tr)}")
    mom = collective_moments(rho)
    print(f"<S> = [{', '.join(_f(x) for x in mom.mean)}]")
    try:
        print(f"xi2 = {_f(squeezing_xi2(rho))}")
    except UndefinedMeanDirection:
        print("xi2 = n/a (no mean spin direction)")
    return EXIT_OK


def cmd_calibrate(args):
    table = calibrate_lambda(args.n, args.order, args.n_phi)
    for K, lam in enumerate(table.values):
        print(f"lambda[{K}] = {_f(lam)}")
    print(f"max Q spread = {_f(table.q_spread)}")
    return EXIT_OK


def _n_range(text):
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-"))
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise UsageError(f"--n: {text!r} is not N or N1-N2") from exc
    if lo < 1 or hi < lo:
        raise UsageError(f"--n: bad range {text!r}")
    return list(range(lo, hi + 1))


def cmd_survey(args):
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    records = run_survey(_n_range(args.n), args.count, args.seed, args.controls, _config(args), args.jobs)
    write_survey_csv(records, args.output)
    summary = summarize(records)
    if args.report:
        io.write_json(args.report, summary)
    v = summary["verdicts"]
    print(f"records = {summary['total']}")
    print(f"Classical = {v['Classical']}  NonClassical = {v['NonClassical']}  Undecided = {v['Undecided']}")
    for kind, counts in summary["by_kind"].items():
        print(f"  {kind}: {counts}")
    print(f"consistency violations = {summary['violations']}")
    print(f"wrote {args.output}")
    return EXIT_SURVEY if summary["violations"] else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_tolerances(p):
    p.add_argument("--epsilon-sep", type=float, default=1e-6, help="NNLS max-entry residual threshold")
    p.add_argument("--delta-wit", type=float, default=1e-8, help="witness firing threshold")
    p.add_argument("--grid-size", type=int, default=None, help="certification dictionary size")


def build_parser():
    parser = argparse.ArgumentParser(prog="symsep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="build a symmetric state and write it as JSON")
    p.add_argument("--builder", required=True,
                   choices=["scs", "dicke", "ghz", "twist", "random", "mixed", "mixture"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--chi", type=float)
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--atoms", help="mixture atoms as weight:theta:phi,weight:theta:phi,...")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("pfunc", help="export the band-limited P function on a grid (CSV)")
    p.add_argument("state")
    p.add_argument("--density", type=int, default=None,
                   help="grid multiplier over (2N+2) x (4N+4); default doubles until the inverse is exact")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pfunc)

    p = sub.add_parser("certify", help="classical / non-classical verdict with evidence")
    p.add_argument("state")
    _add_tolerances(p)
    p.add_argument("-o", "--output", help="certificate JSON path")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("witness", help="entanglement witnesses and squeezing report")
    p.add_argument("state")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("calibrate", help="print lambda_K of the diagonal P map")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--n-phi", type=int, default=None)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("survey", help="randomized sweep of the classicality/separability equivalence")
    p.add_argument("--n", required=True, help="N or a range N1-N2")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--controls", type=int, default=0, help="separable SCS-mixture controls per N")
    p.add_argument("--jobs", type=int, default=1)
    _add_tolerances(p)
    p.add_argument("-o", "--output", default="survey.csv")
    p.add_argument("--report", help="aggregate report JSON path")
    p.set_defaults(func=cmd_survey)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidState as exc:
        print(f"error: invalid state: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureTooCoarse as exc:
        print(f"error: calibration failed: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except InternalInconsistency as exc:
        print(f"error: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
