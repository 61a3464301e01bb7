"""Command-line interface: ``juliamanhattan {orbits,dim,curve,count,correlate,check}``.

Exit codes: 0 success, 2 usage error (including missing files), 3 numerical
failure, 4 invariant failure.
"""
import argparse
import logging
import math
import re
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import counting, io, kernels, orbits, thermo
from .errors import (ContinuationError, JuliaManhattanError, UncertifiedThresholdError,
                     UsageError)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INVARIANT = 0, 2, 3, 4
LOW_PERIOD_WARNING = 8

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?|[0-9]+\.(?:[eE][+-]?[0-9]+)?"
_COMPLEX = re.compile(rf"^\s*([+-]?(?:{_NUM}))\s*([+-])\s*((?:{_NUM}))\s*i\s*$")
_REAL = re.compile(rf"^\s*([+-]?(?:{_NUM}))\s*$")
COMPLEX_GRAMMAR = "expected RE+IMi or RE-IMi, e.g. 0.05+0i or -0.1+0.2i"
GRID_GRAMMAR = "expected START:STOP:COUNT:geometric|linear, e.g. 2:1e4:20:geometric"


def parse_complex(text):
    """``re+imi`` literal (a bare real is also accepted)."""
    m = _COMPLEX.match(text)
    if m:
        re_, sign, im = m.groups()
        return complex(float(re_), float(sign + im))
    m = _REAL.match(text)
    if m:
        return complex(float(m.group(1)), 0.0)
    raise argparse.ArgumentTypeError(f"bad complex literal {text!r}: {COMPLEX_GRAMMAR}")


def parse_path(text):
    """Comma-separated complex waypoints."""
    return [parse_complex(t) for t in text.split(",")]


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    kind: str

    def values(self):
        if self.kind == "geometric":
            return counting.geometric_grid(self.start, self.stop, self.count)
        return counting.linear_grid(self.start, self.stop, self.count)


def parse_grid(text):
    parts = text.split(":")
    try:
        if len(parts) != 4 or parts[3] not in ("geometric", "linear"):
            raise ValueError
        spec = GridSpec(float(parts[0]), float(parts[1]), int(parts[2]), parts[3])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {GRID_GRAMMAR}") from None
    if spec.count < 1 or not spec.stop >= spec.start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: need COUNT >= 1 and STOP >= START")
    if spec.kind == "geometric" and spec.start <= 0:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: geometric grids need START > 0")
    return spec


def parse_threads(text):
    if text == "auto":
        return kernels.default_threads()
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    return n


def positive_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


@dataclass
class RunConfig:
    d: int = 2
    c1: complex = 0j
    c2: complex = 0j
    max_period: int = 1
    newton_tol: float = 1e-11
    point_merge_tol: float = 1e-7
    root_tol: float = thermo.ROOT_TOL
    path1: list = None
    path2: list = None
    out: str = None
    threads: int = 1
    allow_uncertified: bool = False
    poisson_fit: bool = False

    def __post_init__(self):
        if self.max_period < 1:
            raise UsageError("max_period must be >= 1")
        if not (self.newton_tol > 0 and self.point_merge_tol > 0 and self.root_tol > 0):
            raise UsageError("tolerances must be positive")


def _out(args, text):
    args.stdout.write(text)


def _load(path):
    try:
        return io.load_database(path)
    except FileNotFoundError:
        raise UsageError(f"database file not found: {path}") from None
    except IsADirectoryError:
        raise UsageError(f"database path is a directory: {path}") from None


# ---------------------------------------------------------------- commands

def cmd_orbits(args):
    cfg = RunConfig(d=args.d, c1=args.c1, c2=args.c2, max_period=args.max_period,
                    newton_tol=args.newton_tol, point_merge_tol=args.point_merge_tol,
                    path1=args.path1, path2=args.path2, out=args.out, threads=args.threads)
    tcfg = orbits.TrackingConfig(newton_tol=cfg.newton_tol, point_merge_tol=cfg.point_merge_tol,
                                 segments=args.segments, max_halvings=args.max_halvings,
                                 enumeration_cap=args.cap)
    db = orbits.build_database(cfg.d, cfg.c1, cfg.c2, cfg.max_period, cfg.path1, cfg.path2,
                               config=tcfg, threads=cfg.threads)
    io.save_database(db, cfg.out)
    counts = db.counts()
    lines = [f"database  {cfg.out}",
             f"d={db.d}  c1={db.c1}  c2={db.c2}  max_period={db.max_period}",
             "primitive orbits per period: " + " ".join(str(counts[p]) for p in sorted(counts)),
             f"total primitive orbits: {len(db)}"]
    if db.excluded:
        lines.append(f"excluded attracting markings: {len(db.excluded)}")
    for i, ev in ((1, db.evidence1), (2, db.evidence2)):
        lines.append(f"map {i}: {ev.verdict}  critical orbit {ev.critical_behaviour}"
                     f" (period {ev.attracting_cycle_period})  min expansion rate "
                     f"{ev.min_expansion_rate:.10g}")
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_dim(args):
    db = _load(args.db)
    which = args.map
    t = thermo.bowen_root(db, which, args.root_tol)
    pe = thermo.pressure(db, t if which == 1 else 0.0, t if which == 2 else 0.0)
    lines = [f"2VD (map {which}) = {t:.12f}",
             f"error_estimate = {pe.error_estimate:.3e}",
             f"n_used = {pe.n_used}",
             "per-period Bowen roots:"]
    lines += [f"  n={n:<3d} t_n={tn:.12f}" for n, tn in thermo.bowen_root_trace(db, which)]
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_curve(args):
    db = _load(args.db)
    samples = thermo.manhattan_curve(db, args.samples, threads=args.threads,
                                     root_tol=args.root_tol)
    cp = thermo.correlation_point(db, root_tol=args.root_tol)
    text = io.write_curve_csv(args.out, samples)
    footer = {"a0": cp.a0, "b0": cp.b0, "alpha": cp.alpha,
              "degenerate_line": cp.degenerate_line, "slope": cp.slope,
              "slope_check_residual": cp.slope_check_residual,
              "slope_check_passed": cp.slope_check_passed,
              "bowen_root_1": thermo.bowen_root(db, 1, args.root_tol),
              "bowen_root_2": thermo.bowen_root(db, 2, args.root_tol)}
    summary = args.summary or (args.out + ".json" if args.out else None)
    js = io.write_json(summary, footer)
    if args.out is None:
        _out(args, text)
    _out(args, js)
    return EXIT_OK


def _T_grid(db, args, which):
    if args.grid is None:
        return counting.default_T_grid(db, which)
    return args.grid.values()


def cmd_count(args):
    db = _load(args.db)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = counting.counting_report(db, args.map, _T_grid(db, args, args.map),
                                       allow_uncertified=args.allow_uncertified)
    text = io.write_count_csv(args.out, rep.records)
    head = [f"# map {args.map}: 2VD = {rep.exponent:.12f}, certified for "
            f"T < {math.exp(rep.certified_limit):.6g}"]
    head += [f"# {n}" for n in rep.notes]
    if rep.hypothesis_violated:
        head.append("# HYPOTHESIS VIOLATED: log|f'| cohomologous to a constant (proxy)")
    if args.out is None:
        _out(args, text)
    _out(args, "\n".join(head) + "\n")
    return EXIT_OK


def cmd_correlate(args):
    db = _load(args.db)
    eps = args.epsilon
    top = min(counting.certified_limit(db, 1), counting.certified_limit(db, 2))
    if args.grid is None:
        grid = counting.correlation_grid(db, eps)
    else:
        grid = args.grid.values()
        beyond = [T for T in grid if not T + eps < top]
        if beyond and not args.allow_uncertified:
            raise UncertifiedThresholdError(
                f"{len(beyond)} bin(s) reach past the certified range {top:.6g} nats")
    bins = counting.correlation_bins(db, eps, grid)
    text = io.write_bins_csv(args.out, bins)
    cp = thermo.correlation_point(db, root_tol=args.root_tol)
    summary = {"alpha_curve": cp.alpha, "degenerate_line": cp.degenerate_line,
               "bin_convention": counting.BIN_NOTE}
    try:
        fit = counting.fit_correlation_exponent(bins, poisson=args.poisson_fit)
        summary.update(alpha_hat=fit.alpha_hat, stderr=fit.stderr, n_bins=fit.n_bins,
                       weighted=fit.weighted,
                       relative_gap=abs(fit.alpha_hat - cp.alpha) / abs(cp.alpha))
    except counting.InsufficientDataError as exc:
        summary.update(alpha_hat=None, stderr=None, relative_gap=None, fit_error=str(exc))
    w = counting.assumption_b_witness(db)
    summary["witness"] = None if w is None else [
        {"marking": [o.marking.period, o.marking.seed_index],
         "lambda1": o.lambda1, "lambda2": o.lambda2} for o in w]
    js = io.write_json(args.summary or (args.out + ".json" if args.out else None), summary)
    if args.out is None:
        _out(args, text)
    _out(args, js)
    return EXIT_OK


def swap_symmetry_check(db, sample=64, seed=0):
    """Track a subsample of orbits back from c2 to c1 and compare.

    Reversing the path must return each cycle to its stored c1 position with
    the two log-multipliers exchanged.
    """
    lam1, lam2, periods, offsets = db.spectrum()
    if lam1.size == 0 or db.c1 == db.c2:
        return True, "vacuous"
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(lam1.size, size=min(sample, lam1.size), replace=False))
    worst_z = worst_l = 0.0
    cfg = orbits.TrackingConfig(newton_tol=db.newton_tol, point_merge_tol=db.point_merge_tol)
    back = orbits.path_nodes(list(reversed(db.path2)), cfg.segments)
    for p in np.unique(periods[pick]):
        idx = pick[periods[pick] == p] - offsets[p - 1]
        blk = db.block(int(p))
        Z = orbits._forward_cycles(blk.z2[idx], db.c2, db.d, int(p))
        try:
            Z = orbits._continue(Z, back, db.d, cfg, 1, None, blk.seed_index[idx])
        except ContinuationError as exc:
            return False, str(exc)
        worst_z = max(worst_z, float(np.max(np.abs(Z[:, 0] - blk.z1[idx]))))
        lam_back = orbits.cycle_log_multipliers(Z, db.d)
        worst_l = max(worst_l, float(np.max(np.abs(lam_back - blk.lambda1[idx]))))
    ok = worst_z <= db.point_merge_tol and worst_l <= 1e-8
    return ok, f"{pick.size} orbits, max |dz| {worst_z:.2e}, max |dlambda| {worst_l:.2e}"


def invariant_suite(db, root_tol=thermo.ROOT_TOL):
    """verify_database plus the thermodynamic spot checks; returns (report, rows)."""
    report = orbits.verify_database(db)
    rows = [(c.name, c.passed, c.detail) for c in report.checks]
    ok, detail = swap_symmetry_check(db)
    rows.append(("swap_symmetry", ok, detail))
    if db.max_period < thermo.MIN_PERIOD or len(db) == 0 or not report.passed:
        rows.append(("thermo_checks", True, "skipped"))
        return report, rows
    grid = [0.0, 0.25, 0.5, 1.0, 1.5]
    P = np.array([[thermo.pressure(db, a, b).value for b in grid] for a in grid])
    mono = bool(np.all(np.diff(P, axis=0) < 0) and np.all(np.diff(P, axis=1) < 0))
    rows.append(("pressure_monotone", mono, f"{len(grid)}x{len(grid)} grid"))
    base = thermo.critical_exponent(db, 0.7, 0.4, root_tol=1e-12)
    dev = max(abs(thermo.critical_exponent(db, 0.7 * t, 0.4 * t, root_tol=1e-12) * t - base)
              for t in (0.5, 2.0, 4.0))
    rows.append(("homogeneity", dev <= 1e-8, f"max deviation {dev:.2e}"))
    b = np.array([s.b for s in thermo.manhattan_curve(db, 11, root_tol=root_tol)])
    second = float(np.min(np.diff(b, 2)))
    rows.append(("curve_convexity", second >= -1e-6, f"min second difference {second:.2e}"))
    return report, rows


def cmd_check(args):
    db = _load(args.db)
    report, rows = invariant_suite(db, args.root_tol)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name:<22} {detail}" for name, ok, detail in rows]
    if db.max_period < LOW_PERIOD_WARNING:
        lines.append(f"WARN  low max_period {db.max_period} < {LOW_PERIOD_WARNING}: "
                     "extrapolated quantities are unreliable")
    lines += [f"WARN  {w}" for w in report.warnings]
    _out(args, "\n".join(lines) + "\n")
    if all(ok for _, ok, _ in rows):
        return EXIT_OK
    return EXIT_INVARIANT


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="juliamanhattan",
                                description="Periodic-orbit thermodynamics of z^d + c pairs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, threads=True):
        sp.add_argument("--root-tol", type=positive_float, default=thermo.ROOT_TOL)
        if threads:
            sp.add_argument("--threads", type=parse_threads, default=kernels.default_threads(),
                            help="worker threads or 'auto' (default: $JULIAMANHATTAN_THREADS)")

    sp = sub.add_parser("orbits", help="build and save an orbit database")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--c1", type=parse_complex, required=True, help=COMPLEX_GRAMMAR)
    sp.add_argument("--c2", type=parse_complex, required=True, help=COMPLEX_GRAMMAR)
    sp.add_argument("--max-period", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--path1", type=parse_path, help="waypoints 0 -> c1, comma separated")
    sp.add_argument("--path2", type=parse_path, help="waypoints c1 -> c2, comma separated")
    sp.add_argument("--newton-tol", type=positive_float, default=1e-11)
    sp.add_argument("--point-merge-tol", type=positive_float, default=1e-7)
    sp.add_argument("--segments", type=int, default=32)
    sp.add_argument("--max-halvings", type=int, default=20)
    sp.add_argument("--cap", type=int, default=orbits.TrackingConfig.enumeration_cap)
    common(sp)
    sp.set_defaults(func=cmd_orbits)

    sp = sub.add_parser("dim", help="Bowen root (2VD) of one map")
    sp.add_argument("db")
    sp.add_argument("--map", type=int, choices=(1, 2), default=1)
    common(sp, threads=False)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("curve", help="sample the Manhattan curve")
    sp.add_argument("db")
    sp.add_argument("--samples", type=int, default=51)
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--summary", help="JSON footer path (default: OUT.json)")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("count", help="N_T against Li(T^{2VD})")
    sp.add_argument("db")
    sp.add_argument("--map", type=int, choices=(1, 2), default=1)
    sp.add_argument("--grid", type=parse_grid, help=GRID_GRAMMAR + " (default: aligned grid)")
    sp.add_argument("--out")
    sp.add_argument("--allow-uncertified", action="store_true")
    common(sp, threads=False)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("correlate", help="joint multiplier bins and exponent fit")
    sp.add_argument("db")
    sp.add_argument("--epsilon", type=positive_float, default=0.25)
    sp.add_argument("--grid", type=parse_grid, help="bin left edges in nats; " + GRID_GRAMMAR)
    sp.add_argument("--out")
    sp.add_argument("--summary")
    sp.add_argument("--allow-uncertified", action="store_true")
    sp.add_argument("--poisson-fit", action="store_true")
    common(sp, threads=False)
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("check", help="run the invariant suite on a database")
    sp.add_argument("db")
    common(sp, threads=False)
    sp.set_defaults(func=cmd_check)
    return p


_VALUE_OPTIONS = ("--c1", "--c2", "--path1", "--path2")


def _attach_negative_values(argv):
    # "--c2 -0.05+0i" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None, stdout=None):
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    args.stdout = stdout or sys.stdout
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except JuliaManhattanError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error (FileNotFoundError): {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error (ValueError): {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
