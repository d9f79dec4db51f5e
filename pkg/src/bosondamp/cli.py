"""Command-line front end.

Every subcommand writes flat CSV or JSON to ``--out`` (stdout by default).
Time-grid flags are given in units of ``gamma t``. ``--gamma`` only changes
the physical-time column ``t = (gamma t) / gamma``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
or domain error.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import dynamics, measures, quasiprob, verify
from ._parallel import pmap
from .dynamics import BathParams
from .errors import ConvergenceError, DomainError, TruncationError
from .states import DEFAULT_CUTOFF_TOL, FockDiagonalState, PatsParams

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

MAX_CUTOFF_TOL = 1e-6


class UsageError(Exception):
    pass


def fmt(x):
    """12 significant digits, ``inf``/``nan`` spelled out, ``none`` for missing."""
    if x is None:
        return "none"
    return format(float(x), ".12g")


def _round12(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _order(text):
    try:
        return quasiprob.parse_order(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(parser, times=True):
    parser.add_argument("--nbar", type=float, default=0.5, help="thermal mean of the PATS seed")
    parser.add_argument("--m", type=int, default=1, help="number of added photons")
    parser.add_argument("--nbar-r", type=float, default=0.1, help="reservoir mean occupancy")
    parser.add_argument("--gamma", type=float, default=1.0, help="damping rate (rescales t only)")
    if times:
        parser.add_argument("--t-start", type=float, default=0.0)
        parser.add_argument("--t-stop", type=float, default=5.0)
        parser.add_argument("--t-count", type=int, default=101)
        parser.add_argument("--t-log", action="store_true", help="log-spaced grid (needs t-start > 0)")
    parser.add_argument("--out", default="-", help="output file, '-' for stdout")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--cutoff-tol", type=float, default=DEFAULT_CUTOFF_TOL)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bosondamp",
        description="Thermal damping of Fock-diagonal and photon-added thermal states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="Wigner and P-function positivity times")
    p.add_argument("--nbar-r", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("evolve", help="non-Gaussianity measures along a time grid")
    _common(p)
    p.add_argument("--state", help="JSON file with a Fock-diagonal input (overrides --nbar/--m)")

    p = sub.add_parser("qp", help="radial s-ordered quasiprobability profile")
    _common(p)
    p.add_argument("--s", type=_order, default=quasiprob.WIGNER, help="p, wigner, q or a real <= 1")
    p.add_argument("--t", type=float, default=0.0, help="gamma t of the profile")
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--r-count", type=int, default=512)
    p.add_argument("--scan", action="store_true", help="emit (gamma t, min value) over the time grid")
    p.add_argument("--state", help="JSON file with a Fock-diagonal input (profile mode only)")

    p = sub.add_parser("entropy", help="entropy of the damped PATS and of its Gaussian reference")
    _common(p)

    p = sub.add_parser("table1", help="entropic characterization of the benchmark inputs")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--cutoff-tol", type=float, default=DEFAULT_CUTOFF_TOL)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("level", choices=("fast", "full"), nargs="?", default="fast")
    p.add_argument("--out", default="-")
    return parser


def _provenance(args):
    flags = " ".join(
        f"--{k.replace('_', '-')}={v}" for k, v in sorted(vars(args).items()) if k != "command"
    )
    return f"# bosondamp {args.command} {flags}".rstrip()


def _validate_tol(args):
    if not 0.0 < args.cutoff_tol <= MAX_CUTOFF_TOL:
        raise UsageError(f"--cutoff-tol must lie in (0, {MAX_CUTOFF_TOL}]")


def _validate(args):
    if hasattr(args, "cutoff_tol"):
        _validate_tol(args)
    if hasattr(args, "t_count"):
        if args.t_count < 1:
            raise UsageError("--t-count must be at least 1")
        if args.t_start < 0 or args.t_stop < args.t_start:
            raise UsageError("need 0 <= --t-start <= --t-stop")
        if args.t_log and args.t_start <= 0:
            raise UsageError("--t-log needs --t-start > 0")
    if getattr(args, "m", 0) < 0:
        raise UsageError("--m must be non-negative")
    if getattr(args, "nbar", 0.0) < 0:
        raise UsageError("--nbar must be non-negative")
    if getattr(args, "t", 0.0) < 0:
        raise UsageError("--t must be non-negative")
    if getattr(args, "r_count", 2) < 2:
        raise UsageError("--r-count must be at least 2")
    try:
        bath = BathParams(args.nbar_r, getattr(args, "gamma", 1.0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return bath


def _grid(args):
    if args.t_count == 1:
        return np.array([args.t_start])
    if args.t_log:
        return np.geomspace(args.t_start, args.t_stop, args.t_count)
    return np.linspace(args.t_start, args.t_stop, args.t_count)


def _load_state(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return FockDiagonalState.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read state from {path}: {exc}") from None


def _table(args, columns, rows, extra=None):
    """Render ``rows`` as CSV text or as a JSON document."""
    if args.format == "json":
        doc = {"command": args.command, "flags": {k: v for k, v in sorted(vars(args).items())}}
        if extra:
            doc.update(extra)
        doc["rows"] = [dict(zip(columns, r)) for r in rows]
        return json.dumps(_round12(doc), indent=2) + "\n"
    lines = [_provenance(args)]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}={val if isinstance(val, str) else fmt(val)}")
    lines.append(",".join(columns))
    lines.extend(",".join(v if isinstance(v, str) else fmt(v) for v in r) for r in rows)
    return "\n".join(lines) + "\n"


def cmd_thresholds(args, bath):
    t_w, t_c = dynamics.threshold_times(bath)
    g = bath.gamma
    rows = [
        ("wigner_positive", t_w * g, t_w),
        ("p_positive", t_c * g, t_c),
    ]
    regimes = {
        "regime_" + str(dynamics.RegimeLabel.QUANTUM_SPEEDUP): f"[0,{fmt(t_w * g)})",
        "regime_" + str(dynamics.RegimeLabel.BOUND_UNIVERSAL): f"[{fmt(t_w * g)},{fmt(t_c * g)})",
        "regime_" + str(dynamics.RegimeLabel.CLASSICAL): f"[{fmt(t_c * g)},inf)",
    }
    return _table(args, ("threshold", "gamma_t", "t"), rows, regimes)


def _evolve_source(args, bath):
    if getattr(args, "state", None):
        st = _load_state(args.state)
        return lambda t: dynamics.damped_state_general(st, bath, t, args.cutoff_tol)
    params = PatsParams(args.nbar, args.m)
    return lambda t: dynamics.damped_pats(params, bath, t, args.cutoff_tol)


def cmd_evolve(args, bath):
    evolve = _evolve_source(args, bath)
    g = bath.gamma

    def row(gt):
        t = gt / g
        rep = measures.report(evolve(t), gt).to_dict()
        return (t, *rep.values(), str(dynamics.classify_regime(bath, t)))

    rows = pmap(row, _grid(args))
    return _table(args, ("t",) + measures.CSV_COLUMNS + ("regime",), rows)


def cmd_qp(args, bath):
    g = bath.gamma
    if args.scan:
        if args.state:
            raise UsageError("--scan works on PATS inputs only")
        if args.s not in (quasiprob.WIGNER, quasiprob.P_FUNCTION):
            raise UsageError("--scan needs --s wigner or --s p")
        params = PatsParams(args.nbar, args.m)
        scan = quasiprob.negativity_transition_scan(
            params, bath, args.s, _grid(args) / g, args.r_max, args.r_count
        )
        bracket = quasiprob.sign_change_bracket(scan)
        extra = {
            "bracket": "none" if bracket is None else f"{fmt(bracket[0] * g)},{fmt(bracket[1] * g)}"
        }
        rows = [(t * g, t, m) for t, m in scan]
        return _table(args, ("gamma_t", "t", "min_value"), rows, extra)
    source = _load_state(args.state) if args.state else PatsParams(args.nbar, args.m)
    prof = quasiprob.radial_profile(source, bath, args.t / g, args.s, args.r_max, args.r_count)
    if args.format == "csv":
        return prof.to_csv(_provenance(args))
    neg = prof.first_negative_radius
    extra = {"s": prof.s, "gamma_t": prof.gamma_t, "min_value": prof.min_value,
             "first_negative_radius": "none" if neg is None else neg}
    return _table(args, ("r", "value"), list(zip(prof.radii, prof.values)), extra)


def cmd_entropy(args, bath):
    params = PatsParams(args.nbar, args.m)
    g = bath.gamma
    trace = dynamics.entropy_trace(params, bath, _grid(args) / g, args.cutoff_tol)
    peak = dynamics.entropy_max(params, bath, cutoff_tol=args.cutoff_tol)
    extra = {
        "gamma_t_max": "none" if peak is None else peak[0] * g,
        "entropy_max": "none" if peak is None else peak[1],
    }
    rows = [(t * g, t, s, sg) for t, s, sg in trace]
    return _table(args, ("gamma_t", "t", "entropy", "entropy_gaussian"), rows, extra)


def cmd_table1(args):
    rows = verify.entropy_table_rows(args.cutoff_tol)
    extra = {"nbar": verify.ENTROPY_TABLE_NBAR, "nbar_r": verify.ENTROPY_TABLE_NBAR_R}
    cols = ("m", "mean_n0", "entropy_gaussian", "entropy", "gamma_t_max")
    if args.format == "json":
        rows = [tuple("none" if v is None else v for v in r) for r in rows]
    return _table(args, cols, rows, extra)


def cmd_verify(args):
    ok, results = verify.run(args.level)
    doc = {"level": args.level, "passed": ok, "checks": [r.to_dict() for r in results]}
    failed = [r.name for r in results if not r.passed]
    return json.dumps(_round12(doc), indent=2) + "\n", failed


def _emit(text, out):
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "verify":
            text, failed = cmd_verify(args)
            _emit(text, args.out)
            if failed:
                print("verification failed: " + ", ".join(failed), file=sys.stderr)
                return EXIT_VERIFY_FAILED
            return EXIT_OK
        if args.command == "table1":
            _validate_tol(args)
            text = cmd_table1(args)
        else:
            bath = _validate(args)
            handler = {
                "thresholds": cmd_thresholds,
                "evolve": cmd_evolve,
                "qp": cmd_qp,
                "entropy": cmd_entropy,
            }[args.command]
            text = handler(args, bath)
    except UsageError as exc:
        print(f"bosondamp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ConvergenceError, TruncationError, ArithmeticError, ValueError) as exc:
        print(f"bosondamp {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
