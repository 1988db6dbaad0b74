"""Command-line front end: scans, Wigner grids, oracle checks and figure data."""

from __future__ import annotations

import argparse
import datetime as _dt
import os
import re
import sys
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from . import __version__
from . import analysis
from . import gaussian_core as gc
from .config import PRACTICAL_DEFAULTS, ExperimentConfig, Scheme
from .dense_coding import SignalAlphabet, channel_matrix, mi_scan
from .errors import CutoffTooSmall, DegenerateConditioning
from .sweeps import SweepResult, atomic_write, format_number, parse_grid, _dumps, _RawNumber

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3
EXIT_DEGENERATE = 4

MAX_LAMBDA = 0.99
ORACLE_LAMBDA_LIMIT = 0.6
ORACLE_TOL = 1e-6
MODE_B_TOL = 1e-8
SINGLE_TAP_TOL = 1e-9

DEFAULTS = {
    "T": 0.9,
    "TL": PRACTICAL_DEFAULTS["TL"],
    "eta": PRACTICAL_DEFAULTS["eta"],
    "nu": PRACTICAL_DEFAULTS["nu"],
    "alpha": 1.5,
    "phase": 0.0,
    "scheme": "single",
}

_CONFIG_KEYS = {"lambda", "T", "TL", "eta", "nu", "alpha", "phase", "scheme", "cutoff", "grid"}

# options whose values may start with "-" (negative ranges such as -4:4:161)
_VALUE_OPTIONS = ("--grid", "--lambda", "--phase")
_NEGATIVE = re.compile(r"^-[\d.]")


class UsageError(Exception):
    """Invalid flags or values; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _preprocess(argv: Sequence[str]) -> list[str]:
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is not None and _NEGATIVE.match(nxt):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def _add_config_flags(p: argparse.ArgumentParser, lam_help: str) -> None:
    p.add_argument("--lambda", dest="lam", help=lam_help)
    p.add_argument("--T", type=float, help="tap transmittance (default 0.9)")
    p.add_argument("--TL", type=float, help="path transmittance (default 0.75)")
    p.add_argument("--eta", type=float, help="detector efficiency (default 0.6)")
    p.add_argument("--nu", type=float, help="mean dark counts (default 1e-3)")
    p.add_argument("--ideal", action="store_true", help="lossless paths and perfect detectors")
    p.add_argument("--scheme", choices=("single", "two"), help="single- or two-mode scheme")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--stamp", action="store_true", help="add a timestamp to JSON metadata")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photonsub", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scan = sub.add_parser("scan", help="sweep lambda for one quantity")
    scan.add_argument("--kind", required=True, choices=("variance", "mi", "pdet", "mean-photon"))
    _add_config_flags(scan, "grid min:max:points or a single value")
    scan.add_argument("--alpha", type=float, help="QPSK amplitude for --kind mi (default 1.5)")
    scan.add_argument("--phase", type=float, help="homodyne phase in radians (default 0)")
    scan.add_argument("--cutoff", type=int, help="Fock cutoff where the oracle is used")
    scan.add_argument("--allow-heavy", action="store_true")
    scan.add_argument("--out", help="output path (default stdout)")

    wig = sub.add_parser("wigner", help="Wigner function of the single-mode heralded state")
    _add_config_flags(wig, "squeezing parameter")
    wig.add_argument("--grid", help="min:max:points for both axes")
    wig.add_argument("--verify", action="store_true", help="report the trapezoid integral of the grid")
    wig.add_argument("--out", help="output path (default stdout)")

    orc = sub.add_parser("oracle-check", help="compare closed forms with the Fock-space engine")
    _add_config_flags(orc, "squeezing parameter")
    orc.add_argument("--alpha", type=float, help="QPSK amplitude for the channel-matrix check")
    orc.add_argument("--cutoff", type=int, help="Fock cutoff (default: chosen from lambda)")
    orc.add_argument("--allow-heavy", action="store_true", help="permit lambda above 0.6")
    orc.add_argument("--out", help="report path (default stdout)")

    rep = sub.add_parser("repro", help="write the data behind one figure")
    rep.add_argument("--figure", required=True)
    rep.add_argument("--outdir", default=".")
    rep.add_argument("--format", choices=("csv", "json"), default="csv")
    rep.add_argument("--stamp", action="store_true")
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _settings(args) -> dict:
    """Merge defaults, the optional config file and explicit flags, in that order."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    flags = {
        "lambda": args.lam,
        "T": args.T,
        "TL": args.TL,
        "eta": args.eta,
        "nu": args.nu,
        "scheme": args.scheme,
        "alpha": getattr(args, "alpha", None),
        "phase": getattr(args, "phase", None),
        "cutoff": getattr(args, "cutoff", None),
        "grid": getattr(args, "grid", None),
    }
    explicit_loss = any(flags[k] is not None for k in ("TL", "eta", "nu"))
    merged.update({k: v for k, v in flags.items() if v is not None})
    if args.ideal:
        if explicit_loss:
            raise UsageError("--ideal conflicts with --TL, --eta and --nu")
        merged.update(TL=1.0, eta=1.0, nu=0.0)
    try:
        for key in ("T", "TL", "eta", "nu", "alpha", "phase"):
            merged[key] = float(merged[key])
        if merged.get("cutoff") is not None:
            merged["cutoff"] = int(merged["cutoff"])
        merged["scheme"] = Scheme.parse(merged["scheme"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not 0.0 < merged["T"] < 1.0:
        raise UsageError(f"--T must lie in (0, 1), got {merged['T']}")
    return merged


def _config(settings: dict, lam: float = 0.0) -> ExperimentConfig:
    return ExperimentConfig.create(
        lam,
        T=settings["T"],
        TL=settings["TL"],
        eta=settings["eta"],
        nu=settings["nu"],
        scheme=settings["scheme"],
    )


def _lambda_grid(settings: dict) -> np.ndarray:
    spec = settings.get("lambda")
    if spec is None:
        raise UsageError("--lambda is required")
    grid = parse_grid(spec)
    if np.any(grid < 0.0) or np.any(grid > MAX_LAMBDA):
        raise UsageError(f"lambda values must lie in [0, {MAX_LAMBDA}], got {spec}")
    return grid


def _single_lambda(settings: dict) -> float:
    grid = _lambda_grid(settings)
    if grid.size != 1:
        raise UsageError("this command takes a single --lambda value")
    return float(grid[0])


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _stamp(result: SweepResult, args) -> SweepResult:
    if getattr(args, "stamp", False):
        result.metadata["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return result


def _render(result: SweepResult, fmt: str) -> str:
    return result.to_csv() if fmt == "csv" else result.to_json()


def cmd_scan(args) -> int:
    s = _settings(args)
    grid = _lambda_grid(s)
    cfg = _config(s)
    if args.kind == "variance":
        result = analysis.variance_scan(cfg, grid, s["phase"])
    elif args.kind == "pdet":
        result = analysis.pdet_scan(cfg, grid)
    elif args.kind == "mi":
        if cfg.scheme is not Scheme.TWO:
            raise UsageError("--kind mi needs --scheme two")
        if s["alpha"] < 0:
            raise UsageError("--alpha must be non-negative")
        result = mi_scan(cfg, grid, SignalAlphabet(s["alpha"]))
    else:
        uses_oracle = not (cfg.scheme is Scheme.SINGLE and cfg.is_ideal)
        if uses_oracle and grid.max() > ORACLE_LAMBDA_LIMIT and not args.allow_heavy:
            raise UsageError(f"the Fock engine is limited to lambda <= {ORACLE_LAMBDA_LIMIT} without --allow-heavy")
        result = analysis.mean_photon_scan(cfg, grid, s.get("cutoff"))
    _emit(_render(_stamp(result, args), args.format), args.out)
    return EXIT_OK


def cmd_wigner(args) -> int:
    s = _settings(args)
    lam = _single_lambda(s)
    if s["scheme"] is not Scheme.SINGLE:
        raise UsageError("the Wigner function is available for the single-mode scheme")
    spec = s.get("grid") or "-4:4:161"
    try:
        axis = parse_grid(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cfg = _config(s, lam)
    x, p, w = analysis.wigner_table(cfg, axis, axis)
    if args.format == "csv":
        lines = ["x,p,w"]
        lines += [f"{format_number(a)},{format_number(b)},{format_number(c)}" for a, b, c in zip(x, p, w)]
        text = "\n".join(lines) + "\n"
    else:
        meta = {"quantity": "wigner", "engine_version": __version__, **cfg.as_dict()}
        if args.stamp:
            meta["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        payload = {
            "metadata": meta,
            "x": [_RawNumber(v) for v in x],
            "p": [_RawNumber(v) for v in p],
            "w": [_RawNumber(v) for v in w],
        }
        text = _dumps(payload) + "\n"
    _emit(text, args.out)
    if args.verify:
        n = axis.size
        integral = trapezoid(trapezoid(w.reshape(n, n), axis, axis=1), axis) if n > 1 else float("nan")
        print(f"grid integral {integral:.12g} deviation {integral - 1.0:.3e}", file=sys.stderr)
    return EXIT_OK


def oracle_report(lam: float, settings: dict, cutoff: int | None = None) -> dict:
    """Cross-engine errors at one ``lambda`` for both schemes.

    Returns:
        Flat mapping with the documented report keys.
    """
    from . import fock

    base = _config(settings, lam)
    single = base.with_scheme(Scheme.SINGLE)
    two = base.with_scheme(Scheme.TWO)
    cut_single = cutoff if cutoff is not None else analysis.oracle_cutoff(lam, Scheme.SINGLE)
    cut_two = cutoff if cutoff is not None else analysis.oracle_cutoff(lam, Scheme.TWO)

    rho1, p1 = fock.conditional_state(single, cut_single)
    rho2, p2 = fock.conditional_state(two, cut_two)
    pdet = max(abs(p1 / gc.detection_probability(single) - 1.0), abs(p2 / gc.detection_probability(two) - 1.0))

    xs = np.arange(-4.0, 4.0 + 1e-9, 0.25)
    mode_a = rho1.reduced(0)
    pdf_err = float(np.max(np.abs(fock.quadrature_pdf(rho1, 0, 0.0, xs) - gc.homodyne_mixture(single).pdf(xs))))
    var_err = max(
        abs(fock.quadrature_variance(mode_a) - gc.variance(single)),
        abs(fock.bell_variance(rho2) - gc.variance(two)),
    )
    g5 = np.linspace(-2.0, 2.0, 5)
    X, P = np.meshgrid(g5, g5, indexing="ij")
    w_err = float(np.max(np.abs(fock.wigner(mode_a, g5, g5) - gc.wigner_single(single, X, P))))
    xb = np.arange(-4.0, 4.0 + 1e-9, 0.5)
    XB, PB = np.meshgrid(xb, xb, indexing="ij")
    bell_err = float(np.max(np.abs(fock.bell_pdf(rho2, xb, xb) - gc.homodyne_mixture(two).pdf(XB, PB))))
    alphabet = SignalAlphabet(settings.get("alpha", 1.5))
    cm_oracle = fock.channel_matrix_oracle(two, alphabet, cut_two)
    cm_err = float(np.max(np.abs(cm_oracle.entries - channel_matrix(two, alphabet).entries)))
    overlap = fock.vacuum_overlap(rho1, 1)
    single_tap = None
    if single.is_ideal:
        rho_d, _ = fock.dakna_conditional_state(lam, single.setup.T, cut_single)
        single_tap = fock.trace_distance(mode_a, rho_d)
    return {
        "pdet_rel_err": pdet,
        "pdf_max_abs_err": pdf_err,
        "variance_abs_err": var_err,
        "wigner_max_abs_err": w_err,
        "bell_pdf_max_abs_err": bell_err,
        "channel_matrix_max_abs_err": cm_err,
        "mode_b_vacuum_overlap": overlap,
        "dakna_trace_distance": single_tap,
    }


def report_passes(report: dict, ideal: bool) -> bool:
    keys = (
        "pdet_rel_err",
        "pdf_max_abs_err",
        "variance_abs_err",
        "wigner_max_abs_err",
        "bell_pdf_max_abs_err",
        "channel_matrix_max_abs_err",
    )
    ok = all(report[k] <= ORACLE_TOL for k in keys)
    if ideal:
        # away from the ideal case the overlap is reported, not gated
        ok = ok and report["mode_b_vacuum_overlap"] >= 1.0 - MODE_B_TOL
        ok = ok and report["dakna_trace_distance"] <= SINGLE_TAP_TOL
    return ok


def cmd_oracle_check(args) -> int:
    s = _settings(args)
    lam = _single_lambda(s)
    if lam > ORACLE_LAMBDA_LIMIT and not args.allow_heavy:
        raise UsageError(f"lambda above {ORACLE_LAMBDA_LIMIT} needs --allow-heavy")
    report = oracle_report(lam, s, s.get("cutoff"))
    ideal = _config(s, lam).is_ideal
    text = _dumps({k: (None if v is None else _RawNumber(v)) for k, v in report.items()}) + "\n"
    _emit(text, args.out)
    return EXIT_OK if report_passes(report, ideal) else EXIT_MISMATCH


def cmd_repro(args) -> int:
    if args.figure not in analysis.FIGURES:
        known = ", ".join(analysis.FIGURES)
        raise UsageError(f"unknown figure {args.figure!r}; known: {known}")
    os.makedirs(args.outdir, exist_ok=True)
    data = analysis.figure_data(args.figure)
    path = os.path.join(args.outdir, f"{args.figure}.{args.format}")
    if isinstance(data, SweepResult):
        data.metadata["figure"] = args.figure
        atomic_write(path, _render(_stamp(data, args), args.format))
    else:
        x, p, w = data
        if args.format == "csv":
            rows = [f"{format_number(a)},{format_number(b)},{format_number(c)}" for a, b, c in zip(x, p, w)]
            atomic_write(path, "x,p,w\n" + "\n".join(rows) + "\n")
        else:
            payload = {
                "metadata": {"figure": args.figure, "engine_version": __version__},
                "x": [_RawNumber(v) for v in x],
                "p": [_RawNumber(v) for v in p],
                "w": [_RawNumber(v) for v in w],
            }
            atomic_write(path, _dumps(payload) + "\n")
    print(path)
    return EXIT_OK


_COMMANDS = {
    "scan": cmd_scan,
    "wigner": cmd_wigner,
    "oracle-check": cmd_oracle_check,
    "repro": cmd_repro,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_preprocess(argv))
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"photonsub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateConditioning as exc:
        print(f"photonsub: degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (CutoffTooSmall, ValueError) as exc:
        print(f"photonsub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"photonsub: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
