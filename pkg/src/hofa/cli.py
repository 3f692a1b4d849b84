"""hofa: command-line front end.

Usage:
    hofa transform  --in f.csv --group Z8 --out coeffs.csv
    hofa gowers     --in f.csv --group Z8 --k 3
    hofa oracle     --in f.csv --group Z8 --k 3
    hofa denoise    --in f.csv --group Z64 --eps 0.1 --out g.csv
    hofa spectrum   --in f.csv --group Z64 --eps 0.1 --save eig.npz
    hofa regularize --in f.csv --group Z64 --eps 0.1 --rho 0.5 [--continuous] --out freg.csv
    hofa qchar      --in f.csv --group Z64 --eps 0.05 --rho 0.2 --delta 0.05 --seed 1
    hofa certify    --in f.csv --group Z64 --order 2 --R 1
    hofa demo-denoise  --n 500 --sigma 0.3 --eps 0.1 --top-k 6 --seed 7 --out denoise.csv

Every command prints a JSON report (also written to --report when given).
Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import io
from .algorithms import (denoise_experiment, quadratic_character_decomposition, regularize_u3,
                         regularize_u3_continuous)
from .characters import order1_certificate, quadratic_certificate
from .fourier_ops import apply_K_eps, denoise, lift_outer
from .gowers import uk_norm, uk_norm_direct
from .group import GroupFunction, GroupSpec, fourier_transform, set_threads
from .spectral import eigendecompose

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class ValidationError(ValueError):
    pass


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _load(args) -> GroupFunction:
    try:
        group = GroupSpec.parse(args.group)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    return io.read_function_csv(args.input, group)


def _positive(name, value, upper=None):
    if value is None or not value > 0 or (upper is not None and value > upper):
        bound = f" and at most {upper}" if upper is not None else ""
        raise ValidationError(f"--{name} must be positive{bound}, got {value}")


def cmd_transform(args):
    f = _load(args)
    coeffs = fourier_transform(f)
    io.write_function_csv(args.out, GroupFunction(f.group, coeffs))
    return {"coefficients": str(args.out), "parseval_l2": float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))}


def cmd_gowers(args):
    f = _load(args)
    if args.k < 1:
        raise ValidationError("--k must be at least 1")
    return {"k": args.k, "norm": uk_norm(f, args.k), "method": "recursive_fft"}


def cmd_oracle(args):
    f = _load(args)
    if args.k < 1:
        raise ValidationError("--k must be at least 1")
    return {"k": args.k, "norm": uk_norm_direct(f, args.k), "method": "direct"}


def cmd_denoise(args):
    _positive("eps", args.eps)
    f = _load(args)
    g = apply_K_eps(f, args.eps)
    io.write_function_csv(args.out, g)
    return {"output": str(args.out), "input_l2": f.norm(), "output_l2": g.norm()}


def cmd_spectrum(args):
    _positive("eps", args.eps, 1)
    f = _load(args)
    ed = eigendecompose(lift_outer(denoise(args.eps), f))
    out = io.eigen_summary(ed, args.top)
    if args.save:
        out["sha256"] = io.save_decomposition(args.save, ed)
        out["saved"] = str(args.save)
    return out


def cmd_regularize(args):
    _positive("eps", args.eps, 1)
    _positive("rho", args.rho, 1)
    f = _load(args)
    run = regularize_u3_continuous if args.continuous else regularize_u3
    report = run(f, args.rho, args.eps)
    if args.out:
        io.write_function_csv(args.out, report.f_reg)
    return report.to_dict()


def _write_vectors(path, vectors):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["index"]
        for i in range(len(vectors)):
            header += [f"v{i + 1}_re", f"v{i + 1}_im"]
        w.writerow(header)
        if not vectors:
            return
        for j in range(vectors[0].group.order):
            row = [j]
            for v in vectors:
                row += [repr(float(v.values[j].real)), repr(float(v.values[j].imag))]
            w.writerow(row)


def cmd_qchar(args):
    for name in ("eps", "rho", "delta"):
        _positive(name, getattr(args, name), 1)
    f = _load(args)
    report = quadratic_character_decomposition(f, args.rho, args.eps, args.delta, args.seed)
    if args.out:
        _write_vectors(args.out, report.vectors)
    return report.to_dict()


def cmd_certify(args):
    f = _load(args)
    if args.order == 1:
        chi, residual = order1_certificate(f)
        return {"order": 1, "character_index": chi, "character": list(f.group.coords(chi)), "delta": residual}
    if args.R is None or args.R < 0:
        raise ValidationError("--R must be a non-negative integer for order 2")
    return quadratic_certificate(f, args.R).to_dict()


def cmd_demo_denoise(args):
    _positive("eps", args.eps, 1)
    if args.top_k < 0:
        raise ValidationError("--top-k must be non-negative")
    series = denoise_experiment(args.n, args.sigma, args.top_k, args.eps, args.seed)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "f_re", "f_im", "g_re", "g_im", "f2_re", "f2_im", "err"])
        for row in series.rows():
            w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
    return {"rows": int(series.f.size), "output": str(args.out),
            "reconstruction_l2": series.l2(series.f - series.f2), "noise_l2": series.l2(series.noise),
            "top_eigenvalues": series.eigenvalues[:max(args.top_k, 1)].tolist()}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hofa", description="Spectral quadratic Fourier analysis on finite abelian groups")
    p.add_argument("--threads", type=int, default=None, help="cap on FFT worker threads (env HOFA_THREADS)")
    p.add_argument("--report", default=None, help="also write the JSON report here")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp):
        sp.add_argument("--in", dest="input", required=True, help="function CSV (index,re,im)")
        sp.add_argument("--group", required=True, help='group spec such as "Z64" or "Z2xZ4"')
        return sp

    sp = with_input(sub.add_parser("transform", help="Fourier coefficients"))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_transform)

    sp = with_input(sub.add_parser("gowers", help="U^k norm by the derivative recursion"))
    sp.add_argument("--k", type=int, default=2)
    sp.set_defaults(func=cmd_gowers)

    sp = with_input(sub.add_parser("oracle", help="U^k norm by the direct cube average"))
    sp.add_argument("--k", type=int, default=2)
    sp.set_defaults(func=cmd_oracle)

    sp = with_input(sub.add_parser("denoise", help="apply K_eps"))
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_denoise)

    sp = with_input(sub.add_parser("spectrum", help="eigenvalues of the denoised lift of f (x) conj f"))
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--top", type=int, default=10)
    sp.add_argument("--save", default=None, help="write the full decomposition (.npz)")
    sp.set_defaults(func=cmd_spectrum)

    sp = with_input(sub.add_parser("regularize", help="spectral U^3 regularization"))
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--continuous", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_regularize)

    sp = with_input(sub.add_parser("qchar", help="quadratic character decomposition"))
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="CSV of recovered vectors")
    sp.set_defaults(func=cmd_qchar)

    sp = with_input(sub.add_parser("certify", help="order 1 or 2 character certificate"))
    sp.add_argument("--order", type=int, choices=(1, 2), required=True)
    sp.add_argument("--R", type=int, default=1)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("demo-denoise", help="noisy sin(8i^2+3i+1) reconstruction series")
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--sigma", type=float, default=0.3)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--top-k", type=int, default=6)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_demo_denoise)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        if args.threads is not None:
            if args.threads < 1:
                raise ValidationError("--threads must be positive")
            set_threads(args.threads)
        payload = args.func(args)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    finally:
        set_threads(None)
    report = io.report_envelope(args.command, _config(args), payload, started)
    print(io.dump_json(report, args.report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
