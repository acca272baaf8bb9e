"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 config parse error, 3 validation error,
4 computation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .asymptotics import all_vertex_asymptotics
from .config import JobConfig, load_config, parse_float_list, target_spectrum
from .errors import ConfigError, GraphValidationError, QuantumGraphError, UnknownVertex
from .mmatrix import DELTA, MatchingScheme, mmatrix_batch
from .spectrum import compute_spectrum
from .trace import check_trace, det_ratio_scan, recover_uniform_alpha_report

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_VALIDATION, EXIT_COMPUTE = 0, 1, 2, 3, 4

COMMANDS = ("spectrum", "mmatrix", "asymptotics", "trace-check", "det-ratio", "recover-alpha")
OUTPUT_NAMES = {
    "spectrum": "spectrum.csv",
    "mmatrix": "mmatrix.json",
    "asymptotics": "asymptotics.json",
    "trace-check": "trace.json",
    "det-ratio": "det_ratio.csv",
    "recover-alpha": "recover_alpha.json",
}
DEFAULT_TAUS = (10.0, 20.0, 40.0, 80.0, 100.0)


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _need_scheme(cfg: JobConfig, which: str = "scheme"):
    s = getattr(cfg, which)
    if s is None:
        raise ConfigError(f"this command needs a [{which}] section")
    return s


def _tolerances(cfg: JobConfig, default: float):
    rtol = cfg.param("tolerance", default)
    return rtol, rtol * 1e-2


def cmd_spectrum(cfg: JobConfig) -> tuple[str, str]:
    scheme = _need_scheme(cfg)
    lam_max = cfg.param("lambda_max")
    if lam_max is None:
        raise ConfigError("spectrum needs lambda_max")
    spec = compute_spectrum(cfg.graph, cfg.potentials, scheme, lam_max)
    return spec.to_csv(), f"{spec.total_count} eigenvalues below {_g(lam_max)}"


def cmd_mmatrix(cfg: JobConfig) -> tuple[str, str]:
    kind = cfg.scheme.kind if cfg.scheme else DELTA
    lams = cfg.param("lambdas")
    if not lams:
        raise ConfigError("mmatrix needs a 'lambdas' list")
    rtol, atol = _tolerances(cfg, 1e-10)
    mats = mmatrix_batch(cfg.graph, cfg.potentials, lams, kind, rtol, atol)
    out = {"kind": kind, "samples": [
        {"lambda": float(l), "matrix": [[float(x) for x in row] for row in m]}
        for l, m in zip(lams, mats)]}
    return _dumps(out), f"{len(lams)} M-matrices of size {cfg.graph.n_vertices}"


def cmd_asymptotics(cfg: JobConfig) -> tuple[str, str]:
    M = cfg.param("order", 2)
    data = [va.as_dict() for va in all_vertex_asymptotics(cfg.graph, cfg.potentials, M)]
    return _dumps({"order": M, "vertices": data}), f"expansions through tau^-{M}"


def cmd_trace_check(cfg: JobConfig) -> tuple[str, str]:
    a, b = _need_scheme(cfg), _need_scheme(cfg, "scheme_b")
    M = cfg.param("order", 2)
    asympt = all_vertex_asymptotics(cfg.graph, cfg.potentials, M)
    report = check_trace(a, b, asympt, M)
    return report.to_json() + "\n", f"max residual {_g(report.max_residual)}"


def cmd_det_ratio(cfg: JobConfig) -> tuple[str, str]:
    a, b = _need_scheme(cfg), _need_scheme(cfg, "scheme_b")
    taus = cfg.param("tau_grid", list(DEFAULT_TAUS))
    rtol, atol = _tolerances(cfg, 1e-12)
    scan = det_ratio_scan(cfg.graph, cfg.potentials, a, b, taus, rtol, atol)
    last = scan.ratios[-1]
    return scan.to_csv(), f"ratio {_g(last)} at tau = {_g(scan.taus[-1])}"


def cmd_recover_alpha(cfg: JobConfig) -> tuple[str, str]:
    kind = cfg.scheme.kind if cfg.scheme else DELTA
    t = cfg.target
    if "eigenvalues" in t:
        target = target_spectrum(t["eigenvalues"])
    elif "alpha" in t:
        lam_max = float(t.get("lambda_max", cfg.param("lambda_max", 100.0)))
        gen = MatchingScheme.uniform(t.get("kind", kind), float(t["alpha"]),
                                     cfg.graph.n_vertices)
        target = compute_spectrum(cfg.graph, cfg.potentials, gen, lam_max)
    else:
        raise ConfigError("recover-alpha needs [target] eigenvalues or alpha")
    interval = cfg.param("search_interval", (-5.0, 5.0))
    xtol = cfg.param("tolerance", 1e-11)
    rec = recover_uniform_alpha_report(cfg.graph, cfg.potentials, target, interval, kind, xtol)
    out = {"alpha": rec.alpha, "kind": kind, "target_lowest": rec.target_lowest,
           "fitted_lowest": rec.fitted_lowest, "max_deviation": rec.max_deviation,
           "evaluations": rec.evaluations}
    if np.isnan(rec.max_deviation):
        out["max_deviation"] = None
    return _dumps(out), _g(rec.alpha)


HANDLERS = {
    "spectrum": cmd_spectrum,
    "mmatrix": cmd_mmatrix,
    "asymptotics": cmd_asymptotics,
    "trace-check": cmd_trace_check,
    "det-ratio": cmd_det_ratio,
    "recover-alpha": cmd_recover_alpha,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgtrace",
                                description="Spectral computations on quantum graphs.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, type=Path, help="TOML job file")
    p.add_argument("--output", type=Path, default=None,
                   help="directory for output files (default: print to stdout)")
    p.add_argument("--lambda-max", type=float, dest="lambda_max")
    p.add_argument("--order", type=int)
    p.add_argument("--tau-grid", dest="tau_grid", help="comma separated, e.g. 10,20,40")
    p.add_argument("--tolerance", type=float)
    return p


def run(command: str, cfg: JobConfig, output: Path | None = None,
        stdout=None) -> int:
    """Execute one command; write its file into ``output`` or print it."""
    stdout = stdout or sys.stdout
    body, summary = HANDLERS[command](cfg)
    if output is None:
        stdout.write(body)
    else:
        output.mkdir(parents=True, exist_ok=True)
        path = output / OUTPUT_NAMES[command]
        path.write_text(body)
        stdout.write(f"{summary}\nwrote {path}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        overrides = {"lambda_max": args.lambda_max, "order": args.order,
                     "tolerance": args.tolerance}
        if args.order is not None and args.order < 0:
            raise ConfigError("--order must be nonnegative")
        if args.tolerance is not None and not args.tolerance > 0:
            raise ConfigError("--tolerance must be positive")
        for k, v in overrides.items():
            if v is not None:
                cfg.params[k] = v
        if args.tau_grid is not None:
            cfg.params["tau_grid"] = parse_float_list(args.tau_grid, "--tau-grid")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GraphValidationError, UnknownVertex, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return run(args.command, cfg, args.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuantumGraphError as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
