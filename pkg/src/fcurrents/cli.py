"""Command-line interface: ``fcurrents <command> ...``.

Errors are reported on stderr as a single line ``error:<kind>:<message>``
with a distinct exit status per kind (see ``EXIT_CODES``).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import synth
from .baselines import colored_current, colored_distance, colored_inner_product, product_space_current
from .core import DimensionMismatchError, FCurrent, FunctionalShape, InvalidShapeError
from .discretization import discretize
from .experiments import CRENEL_KERNELS, crenel_experiment
from .io import (FileFormatError, read_any, read_path, read_shape, write_csv, write_fcurrent,
                 write_registration, write_shape)
from .kernels import KernelConfig, KernelSpecError, fcurrent_distance, fcurrent_norm
from .pursuit import MPConfig, SingularGramError, mp_compress
from .registration import RegistrationConfig, RegistrationError, register
from .transport import FlowDivergenceError, SingularJacobianError, flow_points, transport_shape

EXIT_CODES = {
    "file_format": 3,
    "invalid_shape": 4,
    "kernel_spec": 5,
    "dimension_mismatch": 6,
    "numerical": 7,
    "io": 8,
    "value": 9,
}

TRACE_COLUMNS = "iteration,kinetic,attachment,total"
COMPRESS_COLUMNS = "step,candidate,gamma_norm,residual_ratio,x_0..x_{n-1},m_0..m_{k-1}"
GRID_COLUMNS = "point,x0_0..x0_{n-1},x_0..x_{n-1}"


def _kernels(args) -> KernelConfig:
    return KernelConfig.from_specs(args.kg, args.kf)


def _as_fcurrent(obj) -> FCurrent:
    return obj if isinstance(obj, FCurrent) else discretize(obj)


def cmd_synth(args):
    if args.kind == "circle":
        shape = synth.crenellated_circle(args.segments, args.crenels, args.amplitude, args.rotation)
    elif args.kind == "ellipse-stain":
        shape = synth.ellipse_stain(args.segments, args.a, args.b, args.stain_center, args.stain_width)
    elif args.kind == "fiber-bundle":
        shape = synth.fiber_bundle(args.fibers, args.points, np.random.default_rng(args.seed))
    elif args.kind == "segment":
        shape = synth.straight_segment(args.edges, args.length)
    else:
        shape = synth.sphere_with_caps(args.n_lat, args.n_lon)
    write_shape(shape, args.output)


def cmd_discretize(args):
    C = discretize(read_shape(args.input))
    write_fcurrent(C, args.output)
    if C.dropped:
        print(f"dropped,{C.dropped}", file=sys.stderr)


def cmd_distance(args):
    cfg = _kernels(args)
    a, b = read_any(args.a), read_any(args.b)
    if args.representation == "fcurrent":
        A, B = _as_fcurrent(a), _as_fcurrent(b)
        d = fcurrent_distance(cfg, A, B, threads=args.threads)
        na, nb = fcurrent_norm(cfg, A, threads=args.threads), fcurrent_norm(cfg, B, threads=args.threads)
    elif args.representation == "colored":
        A, B = colored_current(a), colored_current(b)
        d = colored_distance(cfg, A, B)
        na, nb = (max(colored_inner_product(cfg, X, X), 0.0) ** 0.5 for X in (A, B))
    else:
        if not (isinstance(a, FunctionalShape) and isinstance(b, FunctionalShape)):
            raise FileFormatError("product representation needs shape files, not fcurrents")
        geo = cfg.currents_only()
        A, B = product_space_current(a), product_space_current(b)
        d = fcurrent_distance(geo, A, B)
        na, nb = fcurrent_norm(geo, A), fcurrent_norm(geo, B)
    print("representation,distance,norm_a,norm_b")
    print(f"{args.representation},{d!r},{na!r},{nb!r}")


def cmd_compress(args):
    cfg = _kernels(args)
    C = _as_fcurrent(read_any(args.input))
    mp = MPConfig(epsilon=args.eps, max_atoms=args.max_atoms, variant=args.variant,
                  dictionary=args.dictionary, grid_spacing=args.grid_spacing, ridge=args.ridge)
    res = mp_compress(cfg, C, mp)
    write_fcurrent(res.atoms, args.output)
    if args.log:
        n, k = C.ambient_dim, C.signal_dim
        header = (["step", "candidate", "gamma_norm", "residual_ratio"]
                  + [f"x_{i}" for i in range(n)] + [f"m_{i}" for i in range(k)])
        rows = [[s.step, s.candidate, s.gamma_norm, s.residual_ratio, *map(float, s.x), *map(float, s.m)]
                for s in res.steps]
        write_csv(args.log, header, rows)
    print(f"atoms,{res.n_atoms},original,{len(C)},residual_ratio,{res.residual_norms[-1] / res.residual_norms[0]!r},"
          f"converged,{int(res.converged)}")


def _grid_points(shape: FunctionalShape, n: int):
    lo, hi = shape.vertices.min(0), shape.vertices.max(0)
    pad = 0.1 * (hi - lo)
    axes = [np.linspace(l - p, h + p, n) for l, h, p in zip(lo, hi, pad)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, shape.ambient_dim)


def cmd_register(args):
    src, tgt = read_shape(args.source), read_shape(args.target)
    cfg = RegistrationConfig(_kernels(args), sigma_v=args.sigma_v, timesteps=args.timesteps, lam=args.lam,
                             max_iters=args.max_iters, grad_tol=args.grad_tol, integrator=args.integrator)
    res = register(cfg, src, tgt)
    write_registration(res, args.output)
    if args.deformed:
        write_shape(res.deformed_source, args.deformed)
    if args.trace:
        write_csv(args.trace, TRACE_COLUMNS.split(","),
                  [[i, *map(float, e)] for i, e in enumerate(res.energy_trace)])
    if args.grid_csv:
        pts = _grid_points(src, args.grid_n)
        end = flow_points(res.path, pts)[-1]
        n = src.ambient_dim
        write_csv(args.grid_csv, ["point"] + [f"x0_{i}" for i in range(n)] + [f"x_{i}" for i in range(n)],
                  [[p, *map(float, pts[p]), *map(float, end[p])] for p in range(len(pts))])
    k, att, tot = res.energy_trace[-1]
    print(f"iterations,{res.iterations},stop,{res.stop_reason},kinetic,{k!r},attachment,{att!r},total,{tot!r}")


def cmd_transport(args):
    shape = read_shape(args.shape)
    path = read_path(args.result)
    write_shape(transport_shape(shape, path), args.output)


def cmd_experiment(args):
    cfg = _kernels(args) if args.kg else CRENEL_KERNELS
    dthetas = [float(t) for t in args.dthetas.split(",")]
    rows = crenel_experiment(dthetas, args.segments, args.crenels, args.amplitude, cfg, threads=args.threads)
    write_csv(args.output, ["dtheta", "wprime", "l1"], rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fcurrents", description="Functional currents toolkit.")
    p.add_argument("--threads", type=int, default=None, help="maximum worker threads for kernel sums")
    sub = p.add_subparsers(dest="command", required=True)
    raw = argparse.RawDescriptionHelpFormatter

    def kernel_args(sp, required=True):
        sp.add_argument("--kg", required=required, help="geometric kernel, e.g. gaussian:0.04")
        sp.add_argument("--kf", default="constant", help="signal kernel, e.g. gaussian:0.4 or constant")

    s = sub.add_parser("synth", help="write a synthetic functional shape")
    ss = s.add_subparsers(dest="kind", required=True)
    c = ss.add_parser("circle", help="crenellated unit circle")
    c.add_argument("--segments", type=int, default=512)
    c.add_argument("--crenels", type=int, default=16)
    c.add_argument("--amplitude", type=float, default=1.0)
    c.add_argument("--rotation", type=float, default=0.0)
    e = ss.add_parser("ellipse-stain", help="ellipse carrying a binary stain")
    e.add_argument("--segments", type=int, default=96)
    e.add_argument("--a", type=float, default=1.0)
    e.add_argument("--b", type=float, default=0.6)
    e.add_argument("--stain-center", type=float, default=0.0)
    e.add_argument("--stain-width", type=float, default=0.7)
    f = ss.add_parser("fiber-bundle", help="planar fiber bundle with banded signal")
    f.add_argument("--fibers", type=int, default=300)
    f.add_argument("--points", type=int, default=20)
    f.add_argument("--seed", type=int, default=0)
    g = ss.add_parser("segment", help="straight segment with constant signal")
    g.add_argument("--edges", type=int, default=200)
    g.add_argument("--length", type=float, default=1.0)
    h = ss.add_parser("sphere-caps", help="sphere with two signal caps")
    h.add_argument("--n-lat", type=int, default=16)
    h.add_argument("--n-lon", type=int, default=32)
    for sp in (c, e, f, g, h):
        sp.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("discretize", help="shape file -> fcurrent file")
    d.add_argument("input")
    d.add_argument("-o", "--output", required=True)
    d.set_defaults(func=cmd_discretize)

    d = sub.add_parser("distance", help="print distance and norms as CSV: representation,distance,norm_a,norm_b",
                       description="Prints CSV with columns representation,distance,norm_a,norm_b.")
    d.add_argument("a")
    d.add_argument("b")
    kernel_args(d)
    d.add_argument("--representation", choices=("fcurrent", "colored", "product"), default="fcurrent")
    d.set_defaults(func=cmd_distance)

    d = sub.add_parser("compress", help="matching pursuit compression", formatter_class=raw,
                       description=f"Matching pursuit compression.\n\n--log CSV columns:\n  {COMPRESS_COLUMNS}")
    d.add_argument("input")
    kernel_args(d)
    d.add_argument("--eps", type=float, default=0.05)
    d.add_argument("--variant", choices=("greedy", "orthogonal"), default="orthogonal")
    d.add_argument("--max-atoms", type=int, default=1000)
    d.add_argument("--dictionary", choices=("source", "grid"), default="source")
    d.add_argument("--grid-spacing", type=float, default=None)
    d.add_argument("--ridge", type=float, default=None)
    d.add_argument("-o", "--output", required=True)
    d.add_argument("--log", help="per-step CSV log (columns listed above)")
    d.set_defaults(func=cmd_compress)

    d = sub.add_parser("register", help="diffeomorphic registration", formatter_class=raw,
                       description=f"Diffeomorphic registration.\n\n--trace CSV columns:\n  {TRACE_COLUMNS}\n"
                                   f"--grid-csv CSV columns:\n  {GRID_COLUMNS}")
    d.add_argument("source")
    d.add_argument("target")
    kernel_args(d)
    d.add_argument("--sigma-v", type=float, required=True)
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--timesteps", type=int, default=10)
    d.add_argument("--max-iters", type=int, default=200)
    d.add_argument("--grad-tol", type=float, default=1e-6)
    d.add_argument("--integrator", choices=("euler", "rk4"), default="euler")
    d.add_argument("-o", "--output", required=True)
    d.add_argument("--deformed", help="write the deformed source shape here")
    d.add_argument("--trace", help="energy trace CSV")
    d.add_argument("--grid-csv", help="deformed regular grid CSV")
    d.add_argument("--grid-n", type=int, default=21, help="grid points per axis for --grid-csv")
    d.set_defaults(func=cmd_register)

    d = sub.add_parser("transport", help="move a shape through a registration result")
    d.add_argument("shape")
    d.add_argument("result")
    d.add_argument("-o", "--output", required=True)
    d.set_defaults(func=cmd_transport)

    d = sub.add_parser("experiment", help="numerical experiments")
    es = d.add_subparsers(dest="name", required=True)
    cr = es.add_parser("crenel", help="crenel rotation", formatter_class=raw,
                       description="W' and exact L1 distances under rotation.\n\nOutput CSV columns:\n  dtheta,wprime,l1")
    cr.add_argument("--dthetas", default="0.005,0.01,0.02,0.04")
    cr.add_argument("--segments", type=int, default=512)
    cr.add_argument("--crenels", type=int, default=16)
    cr.add_argument("--amplitude", type=float, default=1.0)
    kernel_args(cr, required=False)
    cr.add_argument("-o", "--output", required=True, help="CSV with columns dtheta,wprime,l1")
    d.set_defaults(func=cmd_experiment)
    return p


def _fail(kind, exc):
    msg = " ".join(str(exc).split())
    print(f"error:{kind}:{msg}", file=sys.stderr)
    return EXIT_CODES[kind]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (FileFormatError, json.JSONDecodeError, KeyError) as exc:
        return _fail("file_format", exc)
    except InvalidShapeError as exc:
        return _fail("invalid_shape", exc)
    except KernelSpecError as exc:
        return _fail("kernel_spec", exc)
    except DimensionMismatchError as exc:
        return _fail("dimension_mismatch", exc)
    except (FlowDivergenceError, SingularJacobianError, SingularGramError, RegistrationError,
            ArithmeticError) as exc:
        return _fail("numerical", exc)
    except OSError as exc:
        return _fail("io", exc)
    except ValueError as exc:
        return _fail("value", exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
