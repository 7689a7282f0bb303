"""Command-line front end: subcommands for contour inspection, Mittag-Leffler
values, general solves from a JSON config, the three benchmark problems, and
convergence sweeps.

Exit codes: 0 success, 1 numerical failure, 2 usage/config error.  All numeric
output is printed with 17 significant digits so runs are diffable; every run
emits a metadata record (JSON sidecar next to --out, stderr otherwise), and
files are written atomically via a temp file plus rename.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from ._util import atomic_write_text, fmt17, resolve_workers
from .contour import DEFAULT_A0, DEFAULT_PHI_C, SpectralParams, contour_params
from .experiments import convergence_sweep, ex1_error, ex2_error, ex3_error
from .mittag_leffler import ml
from .operators import (DEFAULT_PHI_S, DiagonalOperator, FdLaplacian1D,
                        ScalarOperator)
from .solver import SeparableRhs, solve


class UsageError(ValueError):
    """Bad flags or config content; maps to exit code 2."""


class RunConfig:
    """Parsed invocation: subcommand, its options, worker count, output path."""

    def __init__(self, command, options, workers, out):
        self.command = command
        self.options = options
        self.workers = workers
        self.out = out


def _alpha_arg(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0 < value < 2:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 2), got {text}")
    return value


def _workers_arg(text):
    if text == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"workers must be an integer or 'auto', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return value


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_common(p):
    p.add_argument("--workers", type=_workers_arg, default=1,
                   help="thread count, or 'auto' (results are identical either way)")
    p.add_argument("--out", default=None, help="CSV output path (stdout if omitted)")


def parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="sincprop",
        description="Exponentially convergent solver for fractional Cauchy problems")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("contour", help="print hyperbolic contour parameters")
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--phi-s", type=float, required=True, dest="phi_s")
    p.add_argument("--a0", type=float, default=DEFAULT_A0)
    p.add_argument("--phi-c", type=float, default=DEFAULT_PHI_C, dest="phi_c")
    _add_common(p)

    p = sub.add_parser("ml", help="evaluate the Mittag-Leffler function")
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--z", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("solve", help="solve a problem described by a JSON config")
    p.add_argument("--config", default=None, help="JSON config path")
    p.add_argument("--alpha", type=_alpha_arg, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--chi", type=float, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--a0", type=float, default=None)
    p.add_argument("--phi-c", type=float, default=None, dest="phi_c")
    p.add_argument("--phi-s", type=float, default=None, dest="phi_s")
    p.add_argument("--t-max", type=float, default=None, dest="t_max")
    p.add_argument("--n-times", type=int, default=None, dest="n_times")
    _add_common(p)

    p = sub.add_parser("ex1", help="homogeneous benchmark error vs closed form")
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--k0", type=int, default=1)
    p.add_argument("--k1", type=int, default=2)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--n-times", type=int, default=41, dest="n_times")
    p.add_argument("--phi-s", type=float, default=DEFAULT_PHI_S, dest="phi_s")
    _add_common(p)

    p = sub.add_parser("ex2", help="inhomogeneous benchmark error vs reference")
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--NI", type=int, default=256, dest="n_i")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n-times", type=int, default=21, dest="n_times")
    p.add_argument("--phi-s", type=float, default=DEFAULT_PHI_S, dest="phi_s")
    _add_common(p)

    p = sub.add_parser("ex3", help="manufactured-solution benchmark on an FD grid")
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--delta", type=float, default=2.0)
    p.add_argument("--b", type=float, default=-0.5)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n-times", type=int, default=41, dest="n_times")
    p.add_argument("--phi-s", type=float, default=DEFAULT_PHI_S, dest="phi_s")
    _add_common(p)

    p = sub.add_parser("sweep", help="error table over an (alpha, N) grid")
    p.add_argument("--problem", choices=("ex1", "ex2", "ex3"), required=True)
    p.add_argument("--alphas", type=_float_list, required=True)
    p.add_argument("--Ns", type=_int_list, required=True, dest="ns")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--NI", type=int, default=256, dest="n_i")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--phi-s", type=float, default=DEFAULT_PHI_S, dest="phi_s")
    _add_common(p)

    if not argv:
        parser.print_help(sys.stderr)
        raise SystemExit(2)
    ns = parser.parse_args(argv)
    options = vars(ns)
    command = options.pop("command")
    workers = options.pop("workers", 1)
    out = options.pop("out", None)
    for a in [a for a in options.values() if isinstance(a, float)]:
        if not math.isfinite(a):
            raise SystemExit(2)
    return RunConfig(command, options, workers, out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _emit(out_path, csv_text, meta):
    meta_text = json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n"
    if out_path:
        atomic_write_text(out_path, csv_text)
        atomic_write_text(out_path + ".meta.json", meta_text)
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(meta_text)


def _report_csv(report, alpha, N):
    lines = ["alpha,N,t,sup_err_x"]
    for t, e in zip(report.t_grid, report.pointwise_sup):
        lines.append(f"{fmt17(alpha)},{N},{fmt17(t)},{fmt17(e)}")
    return "\n".join(lines) + "\n"


def _solve_csv(result):
    lines = ["t,x_index,value_re,value_im"]
    states = result.states
    is_complex = np.iscomplexobj(states)
    for i, t in enumerate(result.times):
        for j in range(states.shape[1]):
            v = states[i, j]
            re, im = (v.real, v.imag) if is_complex else (float(v), 0.0)
            lines.append(f"{fmt17(t)},{j},{fmt17(re)},{fmt17(im)}")
    return "\n".join(lines) + "\n"


_SOLVE_KEYS = {"operator", "alpha", "gamma", "chi", "N", "a0", "phi_c", "phi_s",
               "times", "u0", "u1", "rhs"}
_OPERATOR_KEYS = {"scalar": {"kind", "lam"},
                  "diagonal": {"kind", "eigenvalues"},
                  "fd_laplacian": {"kind", "m", "a", "L"}}


def _check_keys(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise UsageError(f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def _build_operator(spec, phi_s):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise UsageError("config requires operator: {kind: ...}")
    kind = spec["kind"]
    if kind not in _OPERATOR_KEYS:
        raise UsageError(f"unknown operator kind {kind!r}; "
                         f"choose from {sorted(_OPERATOR_KEYS)}")
    _check_keys(spec, _OPERATOR_KEYS[kind], f"operator ({kind})")
    phi = DEFAULT_PHI_S if phi_s is None else float(phi_s)
    if kind == "scalar":
        return ScalarOperator(float(spec["lam"]), phi_s=phi)
    if kind == "diagonal":
        return DiagonalOperator(spec["eigenvalues"], phi_s=phi)
    return FdLaplacian1D(int(spec["m"]), a=float(spec.get("a", 1.0)),
                         L=float(spec.get("L", 1.0)), phi_s=phi)


def _vector(value, dim, name):
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return np.full(dim, float(value))
    arr = np.asarray(value, dtype=float)
    if arr.shape != (dim,):
        raise UsageError(f"{name} must have length {dim}, got shape {arr.shape}")
    return arr


def _build_fprime(spec, dim):
    if spec is None:
        return None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise UsageError("rhs.fprime requires {kind: zero | separable}")
    if spec["kind"] == "zero":
        _check_keys(spec, {"kind"}, "rhs.fprime (zero)")
        return None
    if spec["kind"] != "separable":
        raise UsageError(f"unknown fprime kind {spec['kind']!r}")
    _check_keys(spec, {"kind", "terms"}, "rhs.fprime (separable)")
    rhs = None
    for term in spec.get("terms", []):
        _check_keys(term, {"scale", "power", "vector"}, "fprime term")
        vec = _vector(term["vector"], dim, "fprime term vector")
        one = SeparableRhs.monomial(float(term.get("scale", 1.0)),
                                    float(term.get("power", 0.0)), vec)
        rhs = one if rhs is None else rhs + one
    return rhs


def _times(spec):
    if spec is None:
        raise UsageError("config requires times: [..] or {t_max, n_times}")
    if isinstance(spec, dict):
        _check_keys(spec, {"t_max", "n_times"}, "times")
        return np.linspace(0.0, float(spec["t_max"]), int(spec.get("n_times", 200)))
    return np.asarray(spec, dtype=float)


def _run_solve(cfg: RunConfig):
    merged = {}
    path = cfg.options.get("config")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                merged = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}")
        if not isinstance(merged, dict):
            raise UsageError("config must be a JSON object")
        _check_keys(merged, _SOLVE_KEYS, "config")
    for key in ("alpha", "gamma", "chi", "N", "a0", "phi_c", "phi_s"):
        if cfg.options.get(key) is not None:
            merged[key] = cfg.options[key]
    if cfg.options.get("t_max") is not None:
        merged["times"] = {"t_max": cfg.options["t_max"],
                           "n_times": cfg.options.get("n_times") or 200}
    if "alpha" not in merged:
        raise UsageError("alpha is required (flag or config)")
    alpha = float(merged["alpha"])
    if not 0 < alpha < 2:
        raise UsageError(f"alpha must lie in (0, 2), got {alpha}")
    op = _build_operator(merged.get("operator"), merged.get("phi_s"))
    times = _times(merged.get("times"))
    rhs = merged.get("rhs") or {}
    if rhs:
        _check_keys(rhs, {"f0", "fprime"}, "rhs")
    result = solve(
        op, alpha,
        u0=_vector(merged.get("u0"), op.dim, "u0"),
        u1=_vector(merged.get("u1"), op.dim, "u1"),
        f0=_vector(rhs.get("f0"), op.dim, "rhs.f0"),
        fprime=_build_fprime(rhs.get("fprime"), op.dim),
        gamma=float(merged.get("gamma", 1.0)), chi=float(merged.get("chi", 1.0)),
        N=int(merged.get("N", 128)), times=times,
        phi_s=merged.get("phi_s"), a0=float(merged.get("a0", DEFAULT_A0)),
        phi_c=float(merged.get("phi_c", DEFAULT_PHI_C)), workers=cfg.workers)
    meta = {"command": "solve", "config": merged, "workers": resolve_workers(cfg.workers),
            "result": result.metadata, "version": __version__}
    _emit(cfg.out, _solve_csv(result), meta)


def _run_report(cfg: RunConfig, report, alpha, N):
    meta = {"command": cfg.command, "options": dict(cfg.options),
            "workers": resolve_workers(cfg.workers), "sup_norm": report.sup_norm,
            "result": report.params, "version": __version__}
    _emit(cfg.out, _report_csv(report, alpha, N), meta)


def _sweep_cell(problem, o, workers):
    if problem == "ex1":
        return lambda al, n: ex1_error(al, n, a=o["a"], T=o["T"],
                                       phi_s=o["phi_s"], workers=workers).sup_norm
    if problem == "ex2":
        return lambda al, n: ex2_error(al, n, N_I=o["n_i"], T=o["T"] or 1.0,
                                       phi_s=o["phi_s"], workers=workers).sup_norm
    return lambda al, n: ex3_error(al, n, m=o["m"], T=o["T"] or 1.0,
                                   phi_s=o["phi_s"], workers=workers).sup_norm


def run(cfg: RunConfig) -> int:
    t_wall = time.perf_counter()
    o = cfg.options
    try:
        if cfg.command == "contour":
            params = contour_params(o["alpha"], SpectralParams(1.0, o["phi_s"]),
                                    o["a0"], o["phi_c"])
            for name in ("a0", "a_i", "b_i", "d", "phi_alpha", "phi_c"):
                print(f"{name} = {fmt17(getattr(params, name))}")
        elif cfg.command == "ml":
            print(fmt17(ml(o["alpha"], o["beta"], o["z"])))
        elif cfg.command == "solve":
            _run_solve(cfg)
        elif cfg.command == "ex1":
            report = ex1_error(o["alpha"], o["N"], a=o["a"], L=o["L"], k0=o["k0"],
                               k1=o["k1"], T=o["T"], n_times=o["n_times"],
                               phi_s=o["phi_s"], workers=cfg.workers)
            _run_report(cfg, report, o["alpha"], o["N"])
        elif cfg.command == "ex2":
            report = ex2_error(o["alpha"], o["N"], N_I=o["n_i"], T=o["T"],
                               n_times=o["n_times"], phi_s=o["phi_s"],
                               workers=cfg.workers)
            _run_report(cfg, report, o["alpha"], o["N"])
        elif cfg.command == "ex3":
            report = ex3_error(o["alpha"], o["N"], m=o["m"], delta=o["delta"],
                               b=o["b"], T=o["T"], n_times=o["n_times"],
                               phi_s=o["phi_s"], workers=cfg.workers)
            _run_report(cfg, report, o["alpha"], o["N"])
        elif cfg.command == "sweep":
            cell = _sweep_cell(o["problem"], o, workers=1)
            rows = convergence_sweep(cell, o["alphas"], o["ns"], workers=cfg.workers)
            lines = ["alpha,N,sup_err"]
            lines += [f"{fmt17(r['alpha'])},{r['N']},{fmt17(r['sup_err'])}" for r in rows]
            meta = {"command": "sweep", "options": dict(cfg.options),
                    "workers": resolve_workers(cfg.workers),
                    "notes": [r["note"] for r in rows if r["note"]],
                    "wall_time_s": time.perf_counter() - t_wall,
                    "version": __version__}
            _emit(cfg.out, "\n".join(lines) + "\n", meta)
        else:
            raise UsageError(f"unknown command {cfg.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    cfg = parse_args(argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
