"""Command-line front end: ``multoep <command> --spec FILE [options]``.

Exit codes: 0 success, 2 classification error or failed check (the
witness is in the report), 1 usage, input or resource error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import dynamics as D
from . import pretense as P
from . import toeplitz as Tz
from . import verify as V
from .arith import MAX_SIEVE_LIMIT, PrimeTable, sieve
from .characters import enumerate_characters, principal
from .errors import ClassificationError, InconclusiveError, MultoepError
from .multfun import from_character, liouville, load_spec_file
from .series import ScanSeries

SIEVE_ENV = "MULTOEP_SIEVE_LIMIT"
DEFAULT_SIEVE = 10**7
_TABLES: dict = {}


@dataclass
class RunConfig:
    sieve_limit: int = DEFAULT_SIEVE
    tolerance: float = 1e-9
    threads: int = 1
    output: Optional[str] = None
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.sieve_limit < 10**3:
            raise ValueError("sieve limit must be at least 1000")
        if not 0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    def to_json(self) -> dict:
        return asdict(self)


def default_sieve_limit() -> int:
    raw = os.environ.get(SIEVE_ENV)
    if not raw:
        return DEFAULT_SIEVE
    try:
        return int(float(raw))
    except ValueError as exc:
        raise ValueError(f"{SIEVE_ENV}={raw!r} is not a number") from exc


def table_for(limit: int) -> PrimeTable:
    """One cached sieve per process (the most recent limit)."""
    for lim, T in _TABLES.items():
        if lim == limit:
            return T
    T = sieve(limit)
    _TABLES.clear()
    _TABLES[limit] = T
    return T


# -- argument parsing ------------------------------------------------------------
def _num(text: str) -> float:
    v = float(text)
    return int(v) if v.is_integer() and abs(v) < 2**62 else v


def _int(text: str) -> int:
    v = _num(text)
    if not isinstance(v, int):
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return v


def _num_list(text: str) -> list:
    try:
        return [_num(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _int_list(text: str) -> list:
    vals = _num_list(text)
    if any(not isinstance(v, int) for v in vals):
        raise argparse.ArgumentTypeError(f"{text!r} must list integers")
    return vals


def _threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    return _int(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sieve-limit", type=_int, default=None, help=f"sieve limit (default ${SIEVE_ENV} or 1e7)")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--threads", type=_threads, default=1, help="worker threads or 'auto'")
    common.add_argument("-o", "--output", default=None, help="report path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=0)
    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument("--spec", required=True, help="function spec (JSON file)")

    p = argparse.ArgumentParser(prog="multoep", description="Multiplicative functions, Toeplitz structure and pretentious distances.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common, spec], help="Toeplitz, periodic and automatic classification")
    c.add_argument("--N", type=_int, default=10**6)
    c.add_argument("--bound", type=_int, default=Tz.DEFAULT_BOUND)

    c = sub.add_parser("periods", parents=[common, spec], help="period structure and per-position periods")
    c.add_argument("--N", type=_int, default=10**6)
    c.add_argument("--bound", type=_int, default=Tz.DEFAULT_BOUND)
    c.add_argument("--positions", type=_int_list, default=list(range(1, 21)))

    c = sub.add_parser("distance", parents=[common, spec], help="pretentious distance curve")
    c.add_argument("--against", default="principal", help="principal, liouville, chi:M:INDEX or a spec file")
    c.add_argument("--cutoffs", type=_num_list, default=[10**3, 10**4, 10**5, 10**6])

    c = sub.add_parser("scan-aperiodicity", parents=[common, spec], help="grid scan of the aperiodicity functional")
    c.add_argument("--X", type=_num, default=10**6)
    c.add_argument("--mode", choices=("strong", "moderate"), default="strong")
    c.add_argument("--Q", type=_int, default=P.DEFAULT_Q)
    c.add_argument("--A", type=float, default=1.0)
    c.add_argument("--window", type=float, default=P.DEFAULT_WINDOW)
    c.add_argument("--t-step", type=float, default=None)

    c = sub.add_parser("kmt-window", parents=[common, spec], help="windowed distance over [X^eta, X]")
    c.add_argument("--X", type=_num, default=10**7)
    c.add_argument("--eta", type=_num_list, default=list(P.DEFAULT_ETAS))
    c.add_argument("--t", type=float, default=0.0)
    c.add_argument("--chi", default="principal", help="principal or chi:M:INDEX")

    c = sub.add_parser("mean", parents=[common, spec], help="Cesaro means along a progression")
    c.add_argument("--N", type=_int_list, default=[10**4, 10**5, 10**6])
    c.add_argument("--a", type=_int, default=1)
    c.add_argument("--r", type=_int, default=0)

    c = sub.add_parser("correlate", parents=[common, spec], help="multi-shift correlation and its non-convergence diagnostic")
    c.add_argument("--shifts", type=_int_list, default=[0, 1])
    c.add_argument("--powers", type=_int_list, default=None)
    c.add_argument("--conjugate", type=_int_list, default=None, help="0/1 flags per factor")
    c.add_argument("--N", type=_int_list, default=[10**4, 10**5, 10**6])

    c = sub.add_parser("seminorm", parents=[common, spec], help="GHK u1 / u2 estimates")
    c.add_argument("--order", type=int, choices=(1, 2), default=1)
    c.add_argument("--N", type=_int, default=10**6)
    c.add_argument("--H", type=_int, default=None, help="default: 999 for u1, sqrt(N)/10 for u2")

    c = sub.add_parser("rap", parents=[common, spec], help="Besicovitch errors of the best q-periodic approximant")
    c.add_argument("--q", type=_int_list, default=[1, 2, 6, 12, 60])
    c.add_argument("--N", type=_int, default=10**6)

    c = sub.add_parser("l1fu", parents=[common, spec], help="local 1-Fourier uniformity estimate")
    c.add_argument("--M", type=_int, default=10**5)
    c.add_argument("--H", type=_int, default=100)
    c.add_argument("--grid", type=_int, default=None)

    c = sub.add_parser("local-factors", parents=[common, spec], help="Euler-type product of local factors")
    c.add_argument("--chi", default="principal", help="principal or chi:M:INDEX")
    c.add_argument("--a", type=_int, default=1)
    c.add_argument("--P", type=_int, default=1000)

    c = sub.add_parser("verify", parents=[common], help="run invariant batteries")
    c.add_argument("suite", help="characters, toeplitz, pretense, dynamics or all")
    return p


def _character_arg(text: str):
    if text == "principal":
        return principal(1)
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "chi":
        raise ValueError(f"character {text!r}: expected 'principal' or chi:M:INDEX")
    m, i = int(parts[1]), int(parts[2])
    chars = enumerate_characters(m)
    if not 0 <= i < len(chars):
        raise ValueError(f"character {text!r}: index out of range 0..{len(chars) - 1}")
    return chars[i]


def _function_arg(text: str):
    if text == "liouville":
        return liouville()
    if text == "principal" or text.startswith("chi:"):
        return from_character(_character_arg(text))
    return load_spec_file(text)


# -- output ----------------------------------------------------------------------
def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _csv_with_header(body: str, header: dict) -> str:
    lines = [f"# {k}: {json.dumps(_clean(v), sort_keys=True)}" for k, v in header.items()]
    return "\n".join(lines) + "\n" + body


def _rows_csv(columns, rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


@dataclass
class Report:
    body: dict
    csv: Optional[str] = None  # CSV body for series-like commands
    code: int = 0


def render(report: Report, cfg: RunConfig, fmt: str) -> str:
    if fmt == "csv" and report.csv is not None:
        header = {k: report.body[k] for k in ("command", "config", "spec_hash", "function") if k in report.body}
        for k in ("diagnostic", "note", "upper_bound", "min_value"):
            if k in report.body:
                header[k] = report.body[k]
        return _csv_with_header(report.csv, header)
    return dumps(report.body)


# -- commands --------------------------------------------------------------------
def _cap(n: int, T: PrimeTable) -> int:
    return min(int(n), T.limit)


def cmd_classify(args, f, T) -> Report:
    N = _cap(args.N, T)
    body = {"function": f.label, "N": N, "bound": args.bound, "certified": f.certificate is not None}
    try:
        st = Tz.period_structure(f, N, T, args.bound)
    except ClassificationError as exc:
        body.update({"toeplitz": False, "periodic": False, "automatic_nonsingular": False, "error": str(exc), "witness": exc.witness})
        return Report(body, code=2)
    per = Tz.classify_periodic(f, N, T, args.bound, max_period=None if f.certificate is not None else 10**4)
    aut = Tz.classify_automatic(f, N, T, args.bound, periodic=per, structure=st)
    body.update(
        {
            "toeplitz": True,
            "periodic": per.periodic,
            "automatic_nonsingular": aut.automatic_nonsingular,
            "spectrum": st.spectrum,
            "nu": {str(p): v.to_json() for p, v in sorted(st.valuations.items())},
            "structure": st.to_json(),
            "periodicity": per.to_json(),
            "automaticity": aut.to_json(),
        }
    )
    if per.periodic:
        body["M"] = per.M
        body["conductor"] = per.t
    if aut.p is not None:
        body["p"] = aut.p
    return Report(body)


def cmd_periods(args, f, T) -> Report:
    N = _cap(args.N, T)
    try:
        st = Tz.period_structure(f, N, T, args.bound)
        rep = Tz.period_report(f, [n for n in args.positions if 1 <= n <= N], N, T, args.bound)
    except ClassificationError as exc:
        return Report({"function": f.label, "N": N, "error": str(exc), "witness": exc.witness}, code=2)
    body = {"function": f.label, "N": N, **st.to_json(), "positions": rep.to_json()}
    return Report(body)


def cmd_distance(args, f, T) -> Report:
    g = _function_arg(args.against)
    curve = P.distance_curve(f, g, args.cutoffs, T)
    s = curve.series()
    body = {"function": f.label, "against": g.label, "curve": s.to_json(), "quantity": "D^2(f, g; X)"}
    return Report(body, csv=_rows_csv(["cutoff", "value"], zip([_num(repr(x)) for x in s.xs], s.ys)))


def cmd_scan(args, f, T) -> Report:
    if args.mode == "strong":
        scan = P.strong_aperiodicity_scan(f, args.X, T, Q=args.Q, t_step=args.t_step, window=args.window)
    else:
        scan = P.moderate_aperiodicity_scan(f, args.X, T, A=args.A, t_step=args.t_step, window=args.window)
    body = {"function": f.label, "mode": args.mode, **scan.to_json()}
    return Report(body, csv=_rows_csv(["t", "chi_id", "value"], scan.rows()))


def cmd_kmt(args, f, T) -> Report:
    chi = _character_arg(args.chi)
    vals = [(float(eta), P.kmt_window_check(f, args.X, float(eta), args.t, chi, T)) for eta in sorted(args.eta)]
    body = {"function": f.label, "X": args.X, "t": args.t, "chi": chi.label, "windows": [{"eta": e, "value": v} for e, v in vals]}
    return Report(body, csv=_rows_csv(["eta", "value"], vals))


def cmd_mean(args, f, T) -> Report:
    Ns = sorted(args.N)
    vals = [(N, D.mean_progression(f, args.a, args.r, N, T)) for N in Ns]
    body = {"function": f.label, "a": args.a, "r": args.r, "series": ScanSeries("N", vals).to_json()}
    return Report(body, csv=_rows_csv(["N", "re", "im"], [(N, z.real, z.imag) for N, z in vals]))


def cmd_correlate(args, f, T) -> Report:
    conj = tuple(bool(c) for c in args.conjugate) if args.conjugate else ()
    spec = D.CorrelationSpec(tuple(args.shifts), tuple(args.powers or ()), conj)
    rep = D.nonconvergence_diagnostic(f, spec, sorted(args.N), T)
    body = {"function": f.label, "correlation": spec.to_json(), **rep.to_json()}
    return Report(body, csv=_rows_csv(["N", "re", "im"], [(N, z.real, z.imag) for N, z in zip(rep.N_list, rep.values)]))


def cmd_seminorm(args, f, T) -> Report:
    if args.order == 1:
        H = args.H or 999
        est = D.ghk_u1_estimate(f, args.N, H, T)
    else:
        H = args.H or max(1, math.isqrt(args.N) // 10)
        est = D.ghk_u2_estimate(f, args.N, H, T, threads=args.threads)
    body = {"function": f.label, "order": args.order, **est.to_json(), "note": "finite-N estimate, not a limit"}
    return Report(body)


def cmd_rap(args, f, T) -> Report:
    qs = sorted(set(args.q))
    vals = [(q, D.rap_error(f, q, args.N, T)) for q in qs]
    body = {"function": f.label, "N": args.N, "errors": [{"q": q, "value": v} for q, v in vals]}
    return Report(body, csv=_rows_csv(["q", "value"], vals))


def cmd_l1fu(args, f, T) -> Report:
    est = D.l1fu_estimate(f, args.M, args.H, grid=args.grid, table=T, threads=args.threads)
    return Report({"function": f.label, **est.to_json()})


def cmd_local_factors(args, f, T) -> Report:
    chi = _character_arg(args.chi)
    lf = D.local_factor_product(f, chi, args.a, args.P, T)
    body = {"function": f.label, "chi": chi.label, "a": args.a, "P": args.P, **lf.to_json()}
    rows = [(p, z.real, z.imag) for p, z in lf.factors]
    return Report(body, csv=_rows_csv(["p", "re", "im"], rows))


COMMANDS = {
    "classify": cmd_classify,
    "periods": cmd_periods,
    "distance": cmd_distance,
    "scan-aperiodicity": cmd_scan,
    "kmt-window": cmd_kmt,
    "mean": cmd_mean,
    "correlate": cmd_correlate,
    "seminorm": cmd_seminorm,
    "rap": cmd_rap,
    "l1fu": cmd_l1fu,
    "local-factors": cmd_local_factors,
}
SERIES_COMMANDS = {"distance", "scan-aperiodicity", "kmt-window", "mean", "rap"}


def _spec_hash_of_file(path: str, f) -> str:
    try:
        return f.spec_hash()
    except MultoepError:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()


def run(argv=None) -> tuple[int, str, Optional[str]]:
    """Parse ``argv`` and run the command: ``(exit code, report text, output path)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 1), "", None
    fmt = args.format or ("csv" if args.command in SERIES_COMMANDS else "json")
    cfg = RunConfig(
        sieve_limit=args.sieve_limit or default_sieve_limit(),
        tolerance=args.tolerance,
        threads=args.threads,
        output=args.output,
        format=fmt,
        seed=args.seed,
    )
    if cfg.sieve_limit > MAX_SIEVE_LIMIT:
        raise ValueError(f"sieve limit {cfg.sieve_limit} exceeds the resource cap {MAX_SIEVE_LIMIT}")
    if args.command == "verify":
        if args.suite != "all":
            V.suite_batteries(args.suite)  # unknown names fail before sieving
        T = table_for(cfg.sieve_limit)
        body = V.run_suite(args.suite, cfg.seed, T, cfg.threads)
        report = Report({"command": "verify", "config": cfg.to_json(), **body}, code=0 if body["passed"] else 2)
    else:
        f = load_spec_file(args.spec)
        T = table_for(cfg.sieve_limit)
        head = {"command": args.command, "config": cfg.to_json(), "spec_hash": _spec_hash_of_file(args.spec, f)}
        try:
            report = COMMANDS[args.command](args, f, T)
        except (ClassificationError, InconclusiveError) as exc:
            report = Report({"error": str(exc), "witness": getattr(exc, "witness", None)}, code=2)
        report.body = {**head, **report.body}
    return report.code, render(report, cfg, fmt), cfg.output


def main(argv=None) -> int:
    try:
        code, text, out = run(argv)
    except (MultoepError, ValueError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if text:
        try:
            if out:
                with open(out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
