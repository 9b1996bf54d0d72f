"""Command-line front end: phantoms, sinograms, reconstruction, sweeps.

Subcommands: ``phantom``, ``sinogram``, ``reconstruct fbp|art|kernel``,
``sweep`` and ``eval rmse``.  Exit codes: 0 success, 1 usage error,
2 numerical failure.  Every run can emit a flat key=value sidecar report
with enough fields to reproduce the command exactly.
"""

import argparse
import sys
import time

import numpy as np

from . import estimators, imageio, sweep as sweepmod
from .fbp import FILTER_FAMILIES, INTERP_SCHEMES
from .grid import ImageGrid, rmse
from .kernels import KERNEL_FAMILIES
from .numerics import QuadratureError, SingularMatrixError
from .phantom import BUILTIN_NAMES, builtin, rasterize
from .sinogram import NoiseSpec, add_noise, read_csv, sample, write_csv
from .geometry import parallel_beam_samples, scattered_samples

_WINDOW_ALIASES = {"trunc": "truncation", "gauss": "gaussian",
                   "compact": "compact"}


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits with code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_sampling_args(p):
    p.add_argument("--angles", type=int, default=30, metavar="N",
                   help="number of parallel-beam angles")
    p.add_argument("--offsets", type=int, default=20, metavar="M",
                   help="half-count of offsets per angle (2M+1 total)")
    p.add_argument("--spacing", type=float, default=None, metavar="D",
                   help="offset spacing (default 1/M)")
    p.add_argument("--scattered", type=int, default=None, metavar="COUNT",
                   help="use COUNT scattered samples instead of a grid")
    p.add_argument("--noise", default=None, metavar="SPEC",
                   help="gaussian:MEAN,VAR | poisson:SCALE | "
                        "saltpepper:DENSITY[,AMP]")
    p.add_argument("--seed", type=int, default=0)


def _add_io_args(p, out_required=True):
    p.add_argument("--out", required=out_required, metavar="PATH")
    p.add_argument("--report", default=None, metavar="PATH")


def _parse_noise(text, seed):
    if text is None:
        return None
    kind, _, params = text.partition(":")
    vals = [float(v) for v in params.split(",") if v] if params else []
    match kind:
        case "gaussian":
            if len(vals) != 2:
                raise ValueError("gaussian noise needs MEAN,VAR")
            return NoiseSpec("gaussian", mean=vals[0], variance=vals[1], seed=seed)
        case "poisson":
            return NoiseSpec("poisson", scale=vals[0] if vals else 1000.0, seed=seed)
        case "saltpepper":
            if not vals:
                raise ValueError("saltpepper noise needs DENSITY[,AMP]")
            amp = vals[1] if len(vals) > 1 else None
            return NoiseSpec("salt-pepper", density=vals[0], amplitude=amp, seed=seed)
    raise ValueError(f"unknown noise kind: {kind!r}")


def _make_sinogram(args):
    if getattr(args, "infile", None):
        with open(args.infile, "rb") as fh:
            sino = read_csv(fh.read())
    else:
        if args.phantom is None:
            raise ValueError("either --in or --phantom is required")
        ph = builtin(args.phantom)
        if args.scattered:
            samples = scattered_samples(args.scattered, args.seed)
        else:
            d = args.spacing if args.spacing is not None else 1.0 / args.offsets
            samples = parallel_beam_samples(args.angles, args.offsets, d)
        sino = sample(ph, samples)
    noise = _parse_noise(args.noise, args.seed) if hasattr(args, "noise") else None
    if noise is not None:
        sino = add_noise(sino, noise)
    return sino


def _write_report(path, fields):
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        for key, val in fields.items():
            fh.write(f"{key}={val}\n")


def _report_fields(command, args, extra):
    fields = {"command": command}
    for key, val in sorted(vars(args).items()):
        if key in ("func", "report"):
            continue
        fields[f"option.{key}"] = val
    fields.update(extra)
    return fields


def _cmd_phantom(args):
    ph = builtin(args.name)
    t0 = time.perf_counter()
    image = rasterize(ph, args.size)
    imageio.write_image(image, args.out)
    _write_report(args.report, _report_fields("phantom", args, {
        "phantom": args.name, "algorithm": "rasterize",
        "seconds": f"{time.perf_counter() - t0:.6f}",
    }))
    return 0


def _cmd_sinogram(args):
    t0 = time.perf_counter()
    sino = _make_sinogram(args)
    with open(args.out, "wb") as fh:
        fh.write(write_csv(sino))
    _write_report(args.report, _report_fields("sinogram", args, {
        "phantom": sino.provenance.get("phantom", ""),
        "algorithm": "radon-sample",
        "samples": len(sino),
        "seconds": f"{time.perf_counter() - t0:.6f}",
    }))
    return 0


def _finish_reconstruct(args, est, sino, name, extra=()):
    t0 = time.perf_counter()
    est.fit(sino)
    seconds = time.perf_counter() - t0
    image_values = est.predict()
    imageio.write_image(ImageGrid(image_values), args.out)
    fields = {"phantom": sino.provenance.get("phantom", ""),
              "algorithm": name, "samples": len(sino),
              "seconds": f"{seconds:.6f}"}
    fields.update(extra and dict(extra) or {})
    if hasattr(est, "rcond_"):
        fields["rcond"] = repr(est.rcond_)
    if hasattr(est, "residuals_") and len(est.residuals_):
        fields["residual"] = repr(float(est.residuals_[-1]))
    if sino.provenance.get("phantom"):
        reference = rasterize(builtin(str(sino.provenance["phantom"])),
                              image_values.shape[0])
        fields["rmse"] = repr(rmse(image_values, reference.values))
    _write_report(args.report, _report_fields(f"reconstruct {name}", args, fields))
    return 0


def _cmd_reconstruct_fbp(args):
    est = estimators.FilteredBackProjection(
        filter_name=args.filter, interpolation=args.interp, size=args.size,
        algorithm=args.algorithm, band_limit=args.bandlimit)
    return _finish_reconstruct(args, est, _make_sinogram(args), "fbp")


def _cmd_reconstruct_art(args):
    est = estimators.AlgebraicReconstruction(
        size=args.size, method=args.method, relaxation=args.relaxation,
        sweeps=args.sweeps, tolerance=args.tol)
    return _finish_reconstruct(args, est, _make_sinogram(args), "art")


def _cmd_reconstruct_kernel(args):
    est = estimators.KernelReconstruction(
        kernel=args.kernel, window=_WINDOW_ALIASES.get(args.window, args.window),
        mode=args.mode, eps=args.eps, rho=args.rho, support=args.L1,
        length=args.L2, nu=args.nu, scale=args.scale, size=args.size)
    return _finish_reconstruct(args, est, _make_sinogram(args), "kernel")


def _cmd_sweep(args):
    start, stop, step = (float(v) for v in args.range.split(","))
    fixed = {"size": args.size}
    if args.pipeline == "kernel":
        fixed.update(kernel=args.kernel,
                     window=_WINDOW_ALIASES.get(args.window, args.window),
                     mode=args.mode, eps=args.eps, rho=args.rho,
                     support=args.L1, length=args.L2, nu=args.nu,
                     scale=args.scale)
    elif args.pipeline == "fbp":
        fixed.update(filter_name=args.filter, interpolation=args.interp,
                     algorithm=args.algorithm)
    else:
        fixed.update(method=args.method, relaxation=args.relaxation,
                     sweeps=args.sweeps, tolerance=args.tol)
    spec = sweepmod.SweepSpec(args.param, start, stop, step,
                              pipeline=args.pipeline, fixed=fixed)
    rows = sweepmod.run_sweep(spec, _make_sinogram(args))
    csv_text = sweepmod.sweep_csv(rows)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    failed = sum(1 for r in rows if r["status"] != "ok")
    _write_report(args.report, _report_fields("sweep", args, {
        "algorithm": f"sweep:{args.pipeline}", "points": len(rows),
        "failed_points": failed,
    }))
    return 0


def _cmd_eval_rmse(args):
    a = imageio.read_image_csv(args.images[0])
    b = imageio.read_image_csv(args.images[1])
    print(repr(rmse(a, b)))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="radonkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="rasterize a builtin phantom")
    p.add_argument("--name", required=True, choices=BUILTIN_NAMES)
    p.add_argument("--size", type=int, default=64, metavar="K")
    _add_io_args(p)
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("sinogram", help="sample a phantom's Radon transform")
    p.add_argument("--phantom", required=True, choices=BUILTIN_NAMES)
    _add_sampling_args(p)
    _add_io_args(p)
    p.set_defaults(func=_cmd_sinogram)

    rec = sub.add_parser("reconstruct", help="reconstruct an image")
    rsub = rec.add_subparsers(dest="backend", required=True)

    def _rec_common(p):
        p.add_argument("--in", dest="infile", default=None, metavar="SINO.CSV")
        p.add_argument("--phantom", default=None, choices=BUILTIN_NAMES)
        _add_sampling_args(p)
        p.add_argument("--size", type=int, default=64, metavar="K")
        _add_io_args(p)

    p = rsub.add_parser("fbp", help="filtered back-projection")
    _rec_common(p)
    p.add_argument("--filter", default="shepp-logan", choices=FILTER_FAMILIES)
    p.add_argument("--interp", default="linear", choices=INTERP_SCHEMES)
    p.add_argument("--algorithm", default="I", choices=("I", "II"))
    p.add_argument("--bandlimit", type=float, default=None, metavar="L")
    p.set_defaults(func=_cmd_reconstruct_fbp)

    p = rsub.add_parser("art", help="algebraic reconstruction")
    _rec_common(p)
    p.add_argument("--method", default="auto", choices=("auto", "kaczmarz", "lsq"))
    p.add_argument("--lambda", dest="relaxation", type=float, default=1.0)
    p.add_argument("--sweeps", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_reconstruct_art)

    p = rsub.add_parser("kernel", help="kernel collocation reconstruction")
    _rec_common(p)
    p.add_argument("--kernel", default="gaussian", choices=KERNEL_FAMILIES)
    p.add_argument("--window", default=None,
                   choices=("trunc", "gauss", "compact"))
    p.add_argument("--mode", default="all", choices=("all", "diag"))
    p.add_argument("--eps", type=float, default=30.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--L1", type=float, default=20.0)
    p.add_argument("--L2", type=float, default=20.0)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--scale", type=float, default=1.0, metavar="H")
    p.set_defaults(func=_cmd_reconstruct_kernel)

    p = sub.add_parser("sweep", help="sweep one parameter of a pipeline")
    p.add_argument("--param", required=True, choices=tuple(sweepmod.SWEEPABLE))
    p.add_argument("--range", required=True, metavar="START,STOP,STEP")
    p.add_argument("--pipeline", default="kernel",
                   choices=("kernel", "fbp", "art"))
    p.add_argument("--in", dest="infile", default=None, metavar="SINO.CSV")
    p.add_argument("--phantom", default=None, choices=BUILTIN_NAMES)
    _add_sampling_args(p)
    p.add_argument("--size", type=int, default=64, metavar="K")
    p.add_argument("--kernel", default="gaussian", choices=KERNEL_FAMILIES)
    p.add_argument("--window", default=None, choices=("trunc", "gauss", "compact"))
    p.add_argument("--mode", default="all", choices=("all", "diag"))
    p.add_argument("--eps", type=float, default=30.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--L1", type=float, default=20.0)
    p.add_argument("--L2", type=float, default=20.0)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--filter", default="shepp-logan", choices=FILTER_FAMILIES)
    p.add_argument("--interp", default="linear", choices=INTERP_SCHEMES)
    p.add_argument("--algorithm", default="I", choices=("I", "II"))
    p.add_argument("--method", default="auto", choices=("auto", "kaczmarz", "lsq"))
    p.add_argument("--lambda", dest="relaxation", type=float, default=1.0)
    p.add_argument("--sweeps", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_io_args(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("eval", help="evaluate metrics on images")
    esub = p.add_subparsers(dest="metric", required=True)
    e = esub.add_parser("rmse", help="RMSE between two CSV images")
    e.add_argument("images", nargs=2, metavar="IMAGE.CSV")
    e.set_defaults(func=_cmd_eval_rmse)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SingularMatrixError, QuadratureError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"radonkit: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"radonkit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
