"""Command-line driver exposing the package analyses as subcommands.

Every subcommand validates its flags before computing, computes fully before
touching the filesystem, and writes through a temp file plus atomic rename so
a failure never leaves a partial output.  Outputs carry a header line

    # phasequant v<version>, <subcommand>, <flags>

(as a CSV comment, or under the "_meta" key in JSON), and identical flags
plus seed produce byte-identical files.  Exit codes: 0 success, 1 validation
failure, 2 usage error.  PHASEQUANT_THREADS caps the numeric backends'
thread pools.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, bgstates, fockreal, nfm, phaseops, repalg, specfun, verify
from .repalg import RepLabel

_OMEGA = {"plus_one": 1.0, "imaginary_unit": 1j}
_BUILDERS = {
    "k3": repalg.build_k3,
    "kplus": repalg.build_kplus,
    "kminus": repalg.build_kminus,
    "k1": repalg.build_k1,
    "k2": repalg.build_k2,
}


def _positive_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"expected a positive real, got {text!r}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value >= 0.0):
        raise argparse.ArgumentTypeError(f"expected a nonnegative real, got {text!r}")
    return value


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite real, got {text!r}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def _flags_text(args: argparse.Namespace) -> str:
    # destination paths stay out so identical computations give identical bytes
    parts = []
    for key in sorted(vars(args)):
        if key in ("func", "subcommand", "out", "summary"):
            continue
        value = getattr(args, key)
        if value is None:
            continue
        if isinstance(value, float):
            parts.append(f"{key}={value!r}")
        elif isinstance(value, (list, tuple)):
            parts.append(f"{key}={','.join(repr(v) for v in value)}")
        else:
            parts.append(f"{key}={value}")
    return " ".join(parts)


def _meta(args: argparse.Namespace) -> str:
    return f"phasequant v{__version__}, {args.subcommand}, {_flags_text(args)}"


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".phasequant-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(value):
    # stable JSON: NaN becomes null rather than the nonstandard NaN token
    if isinstance(value, float):
        return None if math.isnan(value) else value
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def _emit(args: argparse.Namespace, csv_rows: list[str], json_payload: dict,
          path: str | None) -> None:
    if path is None:
        return
    if getattr(args, "format", "csv") == "json":
        payload = {"_meta": _meta(args)}
        payload.update(_jsonable(json_payload))
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        text = "\n".join([f"# {_meta(args)}"] + csv_rows) + "\n"
    _write_atomic(path, text)


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (exit_code, one-line summary)


def _cmd_repr(args) -> tuple[int, str]:
    label = RepLabel(k=args.k, omega=_OMEGA[args.omega])
    op = _BUILDERS[args.name](label, args.dim)
    _emit(args, repalg.csv_lines(op), repalg.json_envelope(op), args.out)
    return 0, (
        f"{args.name} k={args.k!r} dim={args.dim} bandwidth={op.bandwidth}"
        + (f" -> {args.out}" if args.out else "")
    )


def _cmd_phase_spectrum(args) -> tuple[int, str]:
    pair = phaseops.build_phase_ops(RepLabel(k=args.k), args.dim)
    eigs = phaseops.phase_spectrum(pair)
    top = float(np.max(np.abs(eigs)))
    verdict = phaseops.spectrum_verdict(eigs)
    rows = ["index,eigenvalue"]
    rows += [f"{i},{float(v)!r}" for i, v in enumerate(eigs)]
    payload = {
        "k": args.k,
        "dim": args.dim,
        "max_abs": top,
        "verdict": verdict,
        "eigenvalues": [float(v) for v in eigs],
    }
    _emit(args, rows, payload, args.out)
    return 0, f"max|lambda| = {top!r}, verdict {verdict}"


def _cmd_ground_variance(args) -> tuple[int, str]:
    k_values = args.k
    rows = ["k,analytic,matrix_diag0,abs_gap"]
    entries = []
    for k in k_values:
        analytic = phaseops.ground_state_variance(k)
        pair = phaseops.build_phase_ops(RepLabel(k=k), args.dim)
        cos = pair.cos_op.entries
        matrix = float((cos @ cos)[0, 0].real)
        gap = abs(matrix - analytic)
        rows.append(f"{k!r},{analytic!r},{matrix!r},{gap!r}")
        entries.append({"k": k, "analytic": analytic, "matrix_diag0": matrix,
                        "abs_gap": gap})
    bound = phaseops.k1_bound()
    _emit(args, rows, {"rows": entries, "k1_bound": bound}, args.out)
    first = entries[0]
    return 0, (
        f"gsv({first['k']!r}) = {first['analytic']!r} "
        f"(matrix gap {first['abs_gap']:.2e}); k1 bound {bound!r}"
    )


def _cmd_kbound_scan(args) -> tuple[int, str]:
    k_grid = rho_grid = None
    if args.k_min is not None or args.k_max is not None or args.k_step is not None:
        if None in (args.k_min, args.k_max, args.k_step):
            raise nfm.DomainError("give all of --k-min/--k-max/--k-step or none")
        if args.k_max < args.k_min:
            raise nfm.DomainError("--k-max must be >= --k-min")
        k_grid = np.arange(args.k_min, args.k_max + 0.5 * args.k_step, args.k_step)
    if args.rho_min is not None or args.rho_max is not None or args.rho_points is not None:
        if None in (args.rho_min, args.rho_max, args.rho_points):
            raise nfm.DomainError("give all of --rho-min/--rho-max/--rho-points or none")
        if not 0.0 < args.rho_min < args.rho_max:
            raise nfm.DomainError("need 0 < --rho-min < --rho-max")
        rho_grid = np.geomspace(args.rho_min, args.rho_max, args.rho_points)
    scan = bgstates.kbound_scan(k_grid, rho_grid)
    summary = bgstates.scan_json_summary(scan)
    if args.out:
        text = "\n".join([f"# {_meta(args)}"] + bgstates.scan_csv_lines(scan)) + "\n"
        _write_atomic(args.out, text)
    if args.summary:
        payload = {"_meta": _meta(args)}
        payload.update(_jsonable(summary))
        _write_atomic(args.summary, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    verdicts = [row["verdict"] for row in summary["rows"]]
    bracket = summary["flip_bracket"]
    return 0, (
        f"{verdicts.count('BOUNDED')} BOUNDED, {verdicts.count('EXCEEDS')} EXCEEDS "
        f"over {len(verdicts)} k values; flip bracket {bracket}"
    )


def _cmd_coherent(args) -> tuple[int, str]:
    z = args.rho * cmath.exp(1j * args.phi)
    state = bgstates.make_bg_state(args.k, z)
    m3 = bgstates.k3_moments(state)
    m12 = bgstates.k12_moments(state)
    ph = bgstates.phase_expectations(state)
    payload = {
        "k": args.k,
        "rho": args.rho,
        "phi": args.phi,
        "dim": state.dim,
        "k3_mean": m3.mean,
        "k3_second": m3.second,
        "k3_variance": m3.variance,
        "b_k": m3.b_k,
        "mean_k1": m12.mean_k1,
        "mean_k2": m12.mean_k2,
        "var_k1": m12.var_k1,
        "var_k2": m12.var_k2,
        "cos_mean": ph.cos_mean,
        "sin_mean": ph.sin_mean,
        "tan_ratio": ph.tan_ratio,
        "eigenvector_residual": bgstates.eigenvector_residual(state),
    }
    rows = ["field,value"]
    rows += [f"{key},{value!r}" for key, value in payload.items()]
    _emit(args, rows, payload, args.out)
    return 0, (
        f"dim={state.dim} <K3>={m3.mean!r} <cos>={ph.cos_mean!r} <sin>={ph.sin_mean!r}"
    )


def _cmd_completeness(args) -> tuple[int, str]:
    value = bgstates.completeness_check(args.k, args.n, args.rho_max)
    moment = bgstates.moment_integral(args.k, args.n, args.rho_max)
    expected = math.exp(
        specfun.ln_gamma(args.n + 1.0) + specfun.ln_gamma(2.0 * args.k + args.n)
    ) / 4.0
    rel = abs(moment - expected) / expected
    rows = [
        "k,n,completeness,moment,moment_expected,moment_rel_gap",
        f"{args.k!r},{args.n},{value!r},{moment!r},{expected!r},{rel!r}",
    ]
    payload = {
        "k": args.k, "n": args.n, "completeness": value,
        "moment": moment, "moment_expected": expected, "moment_rel_gap": rel,
    }
    _emit(args, rows, payload, args.out)
    return 0, f"completeness = {value!r} (1 - value = {1.0 - value:.2e}), moment rel gap {rel:.2e}"


def _cmd_oscillator(args) -> tuple[int, str]:
    r = np.linspace(0.0, args.r_max, args.points)
    h2 = fockreal.h2_curve(args.k, r)
    rows = ["r,h2"]
    rows += [f"{float(a)!r},{float(b)!r}" for a, b in zip(r, h2)]
    top = float(np.max(h2))
    payload = {
        "k": args.k,
        "r": [float(v) for v in r],
        "h2": [float(v) for v in h2],
        "max_h2": top,
        "h2_end": float(h2[-1]),
    }
    _emit(args, rows, payload, args.out)
    return 0, f"max h2 = {top!r}, h2({args.r_max!r}) = {float(h2[-1])!r}"


def _cmd_two_mode(args) -> tuple[int, str]:
    ops = fockreal.two_mode(args.dim_per_mode)
    rows = fockreal.sector_table_csv_lines(ops)
    payload = {
        "dim_per_mode": ops.dim_per_mode,
        "sectors": [
            {"n1": e.n1, "n2": e.n2, "sector": e.sector,
             "irrep_k": e.irrep_k, "irrep_n": e.irrep_n}
            for e in ops.sector_table
        ],
    }
    _emit(args, rows, payload, args.out)
    d = ops.dim_per_mode
    return 0, f"{d * d} basis states, sectors -{d - 1}..{d - 1}"


def _cmd_nfm_sim(args) -> tuple[int, str]:
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as handle:
            spec, noise, trials, seed = nfm.parse_run_config(json.load(handle))
    else:
        state: dict = {"kind": args.kind, "k": args.k}
        if args.kind == "number":
            if args.n is None:
                raise nfm.DomainError("--kind number requires --n")
            state["n"] = args.n
        else:
            if args.rho is None:
                raise nfm.DomainError("--kind bg requires --rho")
            state["rho"] = args.rho
            state["phi"] = args.phi
        spec = nfm.parse_state_spec(state)
        noise, trials, seed = args.noise, args.trials, args.seed
    summary = nfm.run_trials(spec, noise=noise, trials=trials, seed=seed)
    if args.out:
        text = "\n".join([f"# {_meta(args)}"] + nfm.trials_csv_lines(summary)) + "\n"
        _write_atomic(args.out, text)
    if args.summary:
        payload = {"_meta": _meta(args)}
        payload.update(_jsonable(nfm.trials_json_summary(summary)))
        _write_atomic(args.summary, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0, (
        f"trials={summary.trials} noise={summary.noise!r} rho_mean={summary.rho_mean!r} "
        f"flat={summary.flat_count}"
    )


def _cmd_verify_all(args) -> tuple[int, str]:
    results = verify.run_all(args.module if args.module else None)
    by_module: dict[str, list] = {}
    for item in results:
        by_module.setdefault(item.module, []).append(item)
    failed_total = 0
    for module, items in by_module.items():
        failures = [item for item in items if not item.passed]
        failed_total += len(failures)
        status = "PASS" if not failures else "FAIL"
        print(f"{module}: {status} ({len(items) - len(failures)}/{len(items)} checks)")
        for item in failures:
            print(f"  FAIL {item.name}: {item.detail}")
    if args.out:
        payload = {
            "_meta": _meta(args),
            "checks": [
                {"module": item.module, "name": item.name,
                 "passed": item.passed, "detail": item.detail}
                for item in results
            ],
        }
        _write_atomic(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    code = 0 if failed_total == 0 else 1
    return code, f"{len(results) - failed_total}/{len(results)} checks passed"


# ---------------------------------------------------------------------------
# parser


def _add_output_flags(sub, formats=("csv", "json")) -> None:
    sub.add_argument("--out", help="output file path")
    sub.add_argument("--format", choices=formats, default="csv",
                     help="output file format (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasequant",
        description="Operator toolkit for phase/modulus pairs on the positive discrete series.",
    )
    parser.add_argument("--version", action="version", version=f"phasequant {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("repr", help="emit a truncated generator matrix")
    p.add_argument("--k", type=_positive_float, required=True)
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--name", choices=sorted(_BUILDERS), default="k3")
    p.add_argument("--omega", choices=sorted(_OMEGA), default="plus_one")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_repr)

    p = subs.add_parser("phase-spectrum", help="eigenvalues of the cos operator")
    p.add_argument("--k", type=_positive_float, required=True)
    p.add_argument("--dim", type=_positive_int, default=2000)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_phase_spectrum)

    p = subs.add_parser("ground-variance", help="ground-state phase variance")
    p.add_argument("--k", type=_positive_float, action="append", required=True,
                   help="representation label; repeatable")
    p.add_argument("--dim", type=_positive_int, default=16,
                   help="dimension for the matrix cross-check (default 16)")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_ground_variance)

    p = subs.add_parser("kbound-scan", help="coherent-state ratio scan over (k, rho)")
    p.add_argument("--k-min", type=_positive_float)
    p.add_argument("--k-max", type=_positive_float)
    p.add_argument("--k-step", type=_positive_float)
    p.add_argument("--rho-min", type=_positive_float)
    p.add_argument("--rho-max", type=_positive_float)
    p.add_argument("--rho-points", type=_positive_int)
    p.add_argument("--out", help="CSV grid output path")
    p.add_argument("--summary", help="JSON verdict summary path")
    p.set_defaults(func=_cmd_kbound_scan)

    p = subs.add_parser("coherent", help="coherent-state moments and phase expectations")
    p.add_argument("--k", type=_positive_float, required=True)
    p.add_argument("--rho", type=_nonneg_float, required=True)
    p.add_argument("--phi", type=_finite_float, default=0.0)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_coherent)

    p = subs.add_parser("completeness", help="resolution-of-identity quadrature")
    p.add_argument("--k", type=_positive_float, required=True)
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.add_argument("--rho-max", type=_positive_float, default=60.0)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_completeness)

    p = subs.add_parser("oscillator", help="single-mode h2 profile over r")
    p.add_argument("--k", type=_positive_float, required=True)
    p.add_argument("--r-max", type=_positive_float, default=20.0)
    p.add_argument("--points", type=_positive_int, default=200)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_oscillator)

    p = subs.add_parser("two-mode", help="two-mode sector decomposition table")
    p.add_argument("--dim-per-mode", type=_positive_int, required=True)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_two_mode)

    p = subs.add_parser("nfm-sim", help="interference simulation and reconstruction")
    p.add_argument("--config", help="JSON run config {state, noise, trials, seed}")
    p.add_argument("--kind", choices=("bg", "number"), default="bg")
    p.add_argument("--k", type=_positive_float, default=1.0)
    p.add_argument("--n", type=_nonneg_int)
    p.add_argument("--rho", type=_nonneg_float)
    p.add_argument("--phi", type=_finite_float, default=0.0)
    p.add_argument("--noise", type=_nonneg_float, default=0.0)
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", help="per-trial CSV path")
    p.add_argument("--summary", help="JSON summary path")
    p.set_defaults(func=_cmd_nfm_sim)

    p = subs.add_parser("verify-all", help="run the per-module invariant battery")
    p.add_argument("--module", action="append", choices=verify.MODULE_ORDER,
                   help="restrict to a module; repeatable")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=_cmd_verify_all)

    return parser


def _apply_thread_cap() -> None:
    raw = os.environ.get("PHASEQUANT_THREADS")
    if raw is None:
        return
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        raise SystemExit(2)
    for name in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(name, str(cap))


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
    except SystemExit:
        print("usage error: PHASEQUANT_THREADS must be a positive integer", file=sys.stderr)
        return 2
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)
    try:
        code, summary = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
