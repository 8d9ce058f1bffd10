"""Command-line front end.

Exit codes: 0 success, 1 bad arguments or preconditions, 2 numerical
failure, 3 post-validation or verification failure.  Tables go to stdout
(or ``--out``) as CSV with 17 significant digits; log lines, including
cache hits and misses, go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bands, floquet
from .cache import ENV_VAR, ProfileCache
from .core import IntegrationError, make_params
from .delaunay import (DEFAULT_SAMPLES, DEFAULT_TOL, ProfileInvariantError, ShootingError,
                       profile_to_dict, save_profile, verify_profile)
from .families import SingularDomainError, TranslationSpec, expansion_error
from .verify import exit_status, run_checks

log = logging.getLogger("qdelaunay")

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
SUPPORTED_N = range(5, 13)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def write_csv(header: list[str], rows, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(header, rows, fmt: str, out: str | None) -> None:
    if fmt == "json":
        recs = [dict(zip(header, (float(x) if isinstance(x, np.floating) else x for x in r))) for r in rows]
        _emit(json.dumps(recs, indent=1) + "\n", out)
    else:
        buf = io.StringIO()
        write_csv(header, rows, buf)
        _emit(buf.getvalue(), out)


def _degrees(text: str) -> list[int]:
    """``"3"``, ``"0..3"`` or ``"0,2,5"``."""
    try:
        if ".." in text:
            a, b = text.split("..")
            ks = list(range(int(a), int(b) + 1))
        else:
            ks = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad degree list {text!r}")
    if not ks or min(ks) < 0 or max(ks) > 12:
        raise UsageError("degrees must lie in 0..12")
    return ks


def _params(args):
    if args.n not in SUPPORTED_N:
        raise UsageError(f"n must be in {SUPPORTED_N.start}..{SUPPORTED_N.stop - 1}")
    return make_params(args.n)


def _eps(p, text) -> float:
    if str(text) == "cyl":
        return p.eps_n
    try:
        e = float(text)
    except ValueError:
        raise UsageError(f"bad epsilon {text!r}")
    if not (0.05 * p.eps_n <= e <= p.eps_n):
        raise UsageError(f"epsilon must lie in [{0.05 * p.eps_n:.6g}, eps_n = {p.eps_n:.17g}]")
    return e


def _cache(args) -> ProfileCache:
    return ProfileCache(args.cache_dir, enabled=not args.no_cache)


def _profile(args, p, eps):
    if not (1e-14 <= args.tol <= 1e-6):
        raise UsageError("tol must lie in [1e-14, 1e-6]")
    if args.M < 64:
        raise UsageError("M must be at least 64")
    return _cache(args).get(p, eps, args.tol, args.M)


# --------------------------------------------------------------------------
# subcommands

def cmd_delaunay(args) -> int:
    p = _params(args)
    prof = _profile(args, p, _eps(p, args.eps))
    bad = verify_profile(prof)
    if args.profile_out:
        save_profile(prof, args.profile_out)
    if args.format == "json":
        _emit(json.dumps(profile_to_dict(prof), sort_keys=True) + "\n", args.out)
    else:
        _table(["n", "epsilon", "period", "energy", "b_star"],
               [[p.n, prof.epsilon, prof.period, prof.energy, prof.b_star]], "csv", args.out)
    for b in bad:
        log.error("profile check failed: %s", b)
    return EXIT_VALIDATION if bad else EXIT_OK


def cmd_indicial(args) -> int:
    p = _params(args)
    prof = _profile(args, p, _eps(p, args.eps))
    res = [floquet.monodromy(prof, k, args.tol) for k in _degrees(args.k)]
    _table(["n", "epsilon", "k", "gamma_1", "gamma_2", "gamma_3", "gamma_4", "det_err"],
           floquet.indicial_csv_rows(res), args.format, args.out)
    bad = [r.mode.k for r in res if abs(r.det - 1) >= 1e-8]
    if bad:
        log.error("|det A - 1| >= 1e-8 for degrees %s", bad)
    return EXIT_VALIDATION if bad else EXIT_OK


def cmd_bands(args) -> int:
    p = _params(args)
    prof = _profile(args, p, _eps(p, args.eps))
    if args.phi_grid < 2:
        raise UsageError("--phi-grid needs at least 2 points")
    rows, failures = [], []
    for k in _degrees(args.k):
        tab = bands.band_edges(prof, k, args.m_max, args.band_M, args.phi_grid)
        rows += tab.csv_rows()
        failures += bands.check_ordering(tab)
    header = ["n", "epsilon", "k", "phi"] + [f"sigma_{j}" for j in range(args.m_max + 1)]
    _table(header, rows, args.format, args.out)
    for f in failures:
        log.warning("%s", f)
    return EXIT_OK


def cmd_energy_table(args) -> int:
    p = _params(args)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    lo = _eps(p, args.eps_min)
    grid = np.linspace(lo, p.eps_n, args.points)
    rows = []
    for e in grid:
        prof = _profile(args, p, float(e))
        rows.append([p.n, prof.epsilon, prof.period, prof.energy, prof.b_star])
    _table(["n", "epsilon", "period", "energy", "b_star"], rows, args.format, args.out)
    return EXIT_OK


def cmd_expansion(args) -> int:
    p = _params(args)
    prof = _profile(args, p, _eps(p, args.eps))
    if not 0 < args.a <= 0.5:
        raise UsageError("|a| must lie in (0, 0.5]")
    try:
        res = expansion_error(TranslationSpec(prof, args.a), (args.t0, args.t1), args.n_t)
    except SingularDomainError as exc:
        raise UsageError(str(exc))
    _table(["t", "error", "beta"], res.csv_rows(), args.format, args.out)
    log.info("fitted decay rate beta = %.6f", res.beta)
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params(args)
    t0 = time.perf_counter()
    checks = run_checks(p.n, quick=args.quick, cache=_cache(args))
    counts = {s: sum(c.status == s for c in checks) for s in ("PASS", "FAIL", "REFUTED")}
    lines = [f"qdelaunay verify n={p.n} mode={'quick' if args.quick else 'full'}"]
    lines += [c.line() for c in checks]
    lines.append(f"summary: {counts['PASS']} pass, {counts['FAIL']} fail, {counts['REFUTED']} refuted")
    _emit("\n".join(lines) + "\n", args.out)
    log.info("verify finished in %.1f s", time.perf_counter() - t0)
    return exit_status(checks, args.strict)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qdelaunay", description="Delaunay-type solutions of the constant Q-curvature equation.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=6, help="dimension, 5..12 (default 6)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="ODE tolerance")
    common.add_argument("--M", type=int, default=DEFAULT_SAMPLES, help="profile samples per period")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write the table here instead of stdout")
    common.add_argument("--cache-dir", help=f"profile cache (default ${ENV_VAR} or the user data dir)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("delaunay", parents=[common], help="solve for one profile")
    s.add_argument("--eps", required=True, help="necksize, or 'cyl'")
    s.add_argument("--profile-out", help="save the profile JSON here")
    s.set_defaults(func=cmd_delaunay)

    s = sub.add_parser("indicial", parents=[common], help="indicial roots per degree")
    s.add_argument("--eps", required=True)
    s.add_argument("--k", default="0..3", help="degrees: 3, 0..3 or 0,2,5")
    s.set_defaults(func=cmd_indicial)

    s = sub.add_parser("bands", parents=[common], help="band functions on a phase grid")
    s.add_argument("--eps", required=True)
    s.add_argument("--k", default="0")
    s.add_argument("--phi-grid", type=int, default=9)
    s.add_argument("--m-max", type=int, default=bands.DEFAULT_MMAX)
    s.add_argument("--band-M", type=int, default=bands.DEFAULT_M, help="Fourier truncation")
    s.set_defaults(func=cmd_bands)

    s = sub.add_parser("energy-table", parents=[common], help="period and energy over a necksize grid")
    s.add_argument("--points", type=int, default=20)
    s.add_argument("--eps-min", default="0.1")
    s.set_defaults(func=cmd_energy_table)

    s = sub.add_parser("expansion", parents=[common], help="remainder of the first-order translated expansion")
    s.add_argument("--eps", required=True)
    s.add_argument("--a", type=float, required=True, help="translation size |a|")
    s.add_argument("--t0", type=float, default=2.0)
    s.add_argument("--t1", type=float, default=8.0)
    s.add_argument("--n-t", type=int, default=61)
    s.set_defaults(func=cmd_expansion)

    s = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    s.add_argument("--quick", action="store_true")
    s.add_argument("--strict", action="store_true", help="count refuted claims as failures")
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    # cache hits and misses are always reported
    logging.getLogger("qdelaunay.cache").setLevel(logging.INFO)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"qdelaunay: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (ShootingError, IntegrationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"qdelaunay: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ProfileInvariantError as exc:
        print(f"qdelaunay: validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
