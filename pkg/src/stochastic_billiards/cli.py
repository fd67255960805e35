"""Command-line front end.

Every command writes its outputs plus a manifest.json holding the full
config echo, seed, library versions, and wall time, so any published number
can be regenerated bit-for-bit (data files are byte-identical across reruns
with the same seed; only the manifest wall time differs).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._core import COMPILED
from .chain import ChainConfig, run, write_trajectory_csv
from .diagnostics import (
    ArcPartition,
    boundary_fraction,
    capsule_experiment,
    estimate_F,
    mixing_curve,
    overlap_tv,
    s_gamma,
    var_z1_quadrature,
)
from .geometry import (
    ConvexBody,
    GeometryError,
    InputError,
    boundary_point_from_direction,
    default_start,
    load_body,
    make_body,
)
from .sampler import RngStream, sample_unit_ball
from .spectral2d import boundary_curve, build_transition_matrix, spectral_summary

OVERLAP_TV_THRESHOLD = 0.9  # frozen after the first calibration run (see manifest)

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(c) for c in row) + "\n")


def _load_body_arg(spec: str) -> ConvexBody:
    if spec.lstrip().startswith("{"):
        return make_body(json.loads(spec))
    return load_body(spec)


def _manifest(outdir: Path, command: str, args: argparse.Namespace, body, outputs,
              extras=None, t_start=None):
    payload = {
        "command": command,
        "params": {k: v for k, v in vars(args).items() if k != "func"},
        "body": body.to_dict() if body is not None else None,
        "versions": {
            "package": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "compiled_kernel": COMPILED,
        },
        "outputs": [str(o) for o in outputs],
        "wall_time_s": None if t_start is None else time.monotonic() - t_start,
    }
    if extras:
        payload["extras"] = extras
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")


def _outdir(args) -> Path:
    if args.out is None:
        raise InputError("no output directory: pass --out or set STOCHASTIC_BILLIARDS_OUT")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    out = _outdir(args)
    cfg = ChainConfig(body=body, steps=args.steps, burn_in=args.burn_in, thin=args.thin,
                      seed=args.seed, stream=args.stream, law=args.law)
    traj, state = run(cfg)
    path = out / "trajectory.csv"
    write_trajectory_csv(path, traj, replica=args.stream)
    _manifest(out, "run", args, body, [path], {"raws_consumed": state.raws_consumed}, t0)
    return 0


def cmd_spectral(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    out = _outdir(args)
    tm = build_transition_matrix(body, args.bins, args.quad_points)
    summ = spectral_summary(tm)
    eigs_path = out / "eigs.csv"
    _write_csv(eigs_path, ["k", "lambda_k"],
               [(k, lam) for k, lam in enumerate(summ.eigenvalues)])
    sweep_path = out / "sweep.csv"
    _write_csv(sweep_path, ["cut_index", "conductance"],
               list(zip(summ.sweep_lengths, summ.sweep_values)))
    outputs = [eigs_path, sweep_path]
    if args.dump_matrix:
        if args.bins > 1024:
            print("matrix dump limited to 1024 bins", file=sys.stderr)
            return USAGE_ERROR
        mat_path = out / "matrix.csv"
        _write_csv(mat_path, [f"c{j}" for j in range(tm.bins)], tm.P)
        outputs.append(mat_path)
    summary_path = out / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump({
            "bins": tm.bins,
            "spectral_gap": summ.spectral_gap,
            "eigenvalue_gap": summ.eigenvalue_gap,
            "lambda_2": summ.lambda_2,
            "conductance_sweep": summ.conductance,
            "cheeger_lower": summ.cheeger_lower,
            "cheeger_upper": summ.cheeger_upper,
        }, fh, indent=2)
        fh.write("\n")
    outputs.append(summary_path)
    _manifest(out, "spectral", args, body, outputs, None, t0)
    return 0


def cmd_f_quantile(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    out = _outdir(args)
    x = default_start(body)
    est = estimate_F(body, x, args.samples, args.level, RngStream(args.seed, 0))
    path = out / "fquant.csv"
    _write_csv(path, ["body", "n", "level", "F", "ci_lo", "ci_hi"],
               [(body.kind, body.dim, est.level, est.value, est.ci_lo, est.ci_hi)])
    _manifest(out, "f-quantile", args, body, [path], None, t0)
    return 0


def cmd_s_gamma(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    out = _outdir(args)
    x = default_start(body)
    rows = []
    for i, gamma in enumerate(args.gamma):
        est = s_gamma(body, x, gamma, args.mc_points, RngStream(args.seed, i))
        rows.append((gamma, est.value, est.fraction, est.se))
    path = out / "sgamma.csv"
    _write_csv(path, ["gamma", "t", "g_t", "se"], rows)
    _manifest(out, "s-gamma", args, body, [path], None, t0)
    return 0


def cmd_overlap(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    if body.dim != 2:
        print("overlap pairs are placed along 2D boundaries", file=sys.stderr)
        return USAGE_ERROR
    out = _outdir(args)
    curve = boundary_curve(body)
    u = body.boundary_point(curve.points(np.array([0.0]))[0])
    if args.separation is None:
        f_est = estimate_F(body, u, 100_000, rng=RngStream(args.seed, 100))
        sep = f_est.value / (100.0 * math.sqrt(body.dim))
    else:
        sep = args.separation
    v = body.boundary_point(curve.points(np.array([sep]))[0])
    v_far = body.boundary_point(curve.points(np.array([curve.perimeter / 2.0]))[0])
    part = ArcPartition(body, args.bins)
    tv_near = overlap_tv(body, u, v, args.samples, part, RngStream(args.seed, 0))
    tv_far = overlap_tv(body, u, v_far, args.samples, part, RngStream(args.seed, 10))
    path = out / "overlap.csv"
    _write_csv(path, ["pair", "separation", "tv"],
               [("near", sep, tv_near), ("antipodal", curve.perimeter / 2.0, tv_far)])
    extras = {"tv_threshold": OVERLAP_TV_THRESHOLD,
              "near_below_threshold": bool(tv_near <= OVERLAP_TV_THRESHOLD),
              "near_below_antipodal": bool(tv_near < tv_far)}
    _manifest(out, "overlap", args, body, [path], extras, t0)
    return 0


def cmd_mixing(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    out = _outdir(args)
    checkpoints = [int(k) for k in args.checkpoints.split(",")]
    cfg = ChainConfig(body=body, steps=1, seed=args.seed, law=args.law)
    part = ArcPartition(body, args.bins)
    mc = mixing_curve(cfg, part, args.replicas, checkpoints)
    path = out / "mixing.csv"
    _write_csv(path, ["k", "tv", "se"], list(zip(mc.checkpoints, mc.tv, mc.se)))
    _manifest(out, "mixing", args, body, [path],
              {"warm_start_bound": mc.warm_start_bound}, t0)
    return 0


def cmd_capsule(args):
    t0 = time.monotonic()
    out = _outdir(args)
    rows = []
    for n in args.dim:
        rep = capsule_experiment(n, args.half_length, steps=args.steps,
                                 replicas=args.replicas, seed=args.seed,
                                 tau_replicas=args.tau_replicas)
        rows.append((n, args.half_length, rep.var_z1_hat, var_z1_quadrature(n),
                     rep.tau_median if rep.tau_median is not None else ""))
    path = out / "capsule.csv"
    _write_csv(path, ["n", "L", "var_z1_hat", "var_z1_quad", "tau_median"], rows)
    _manifest(out, "capsule", args, None, [path], None, t0)
    return 0


def cmd_fraction(args):
    t0 = time.monotonic()
    body = _load_body_arg(args.body)
    out = _outdir(args)
    if not 1 <= args.coord <= body.dim:
        print(f"coordinate must be in 1..{body.dim}", file=sys.stderr)
        return USAGE_ERROR
    cfg = ChainConfig(body=body, steps=args.steps, burn_in=args.burn_in,
                      seed=args.seed, law=args.law)
    traj, _ = run(cfg)
    frac, se = boundary_fraction(traj, lambda P: P[:, args.coord - 1] > args.threshold)
    path = out / "fraction.csv"
    _write_csv(path, ["coord", "threshold", "fraction", "se", "samples"],
               [(args.coord, args.threshold, frac, se, len(traj))])
    _manifest(out, "fraction", args, body, [path], None, t0)
    return 0


def cmd_validate(args):
    body = _load_body_arg(args.body)
    rng = RngStream(args.seed, 0)
    n, C, D = body.dim, body.curvature_bound, body.diameter
    print(f"type: {body.kind}")
    print(f"dimension: {n}")
    print(f"curvature bound C: {_fmt(C)}")
    print(f"diameter D: {_fmt(D)}")
    npts = 1000
    dirs = sample_unit_ball(n, rng, size=npts)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = np.array([boundary_point_from_direction(body, u).position for u in dirs])
    normals = body.normal_many(pts)
    # curvature witness: a ball of radius 1/C - eps tangent at x fits inside K
    rw = 1.0 / C - 1e-6
    centers = pts + (1.0 / C) * normals
    probe = sample_unit_ball(n, RngStream(args.seed, 1), size=64)
    curvature_ok = True
    for c in centers:
        if not bool(np.all(body.contains_many(c + rw * probe, tol=1e-9))):
            curvature_ok = False
            break
    print(f"curvature witness (1000 points): {'pass' if curvature_ok else 'FAIL'}")
    # diameter witness: pairwise distances of boundary points never exceed D
    dmax = 0.0
    for block in range(0, npts, 250):
        d = np.linalg.norm(pts[block : block + 250, None, :] - pts[None, :, :], axis=2)
        dmax = max(dmax, float(d.max()))
    diameter_ok = dmax <= D + 1e-9
    print(f"diameter witness (max pair distance {_fmt(dmax)}): {'pass' if diameter_ok else 'FAIL'}")
    return 0 if (curvature_ok and diameter_ok) else RUNTIME_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="billiards",
        description="Boundary-chain sampling and diagnostics on curvature-bounded convex bodies",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, body=True):
        if body:
            sp.add_argument("--body", required=True, help="body spec file (JSON) or inline JSON")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=os.environ.get("STOCHASTIC_BILLIARDS_OUT"),
                        help="output directory (default: $STOCHASTIC_BILLIARDS_OUT)")

    sp = sub.add_parser("run", help="run one chain replica, write trajectory.csv")
    common(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--burn-in", type=int, default=0, dest="burn_in")
    sp.add_argument("--thin", type=int, default=1)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--law", default="cosine", choices=["cosine", "uniform_hemisphere"])
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("spectral", help="discretized kernel spectrum and conductance (2D)")
    common(sp)
    sp.add_argument("--bins", type=int, default=512)
    sp.add_argument("--quad-points", type=int, default=4, dest="quad_points")
    sp.add_argument("--dump-matrix", action="store_true", dest="dump_matrix")
    sp.set_defaults(func=cmd_spectral)

    sp = sub.add_parser("f-quantile", help="one-step chord-length quantile from the default start")
    common(sp)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--level", type=float, default=1.0 / 128.0)
    sp.set_defaults(func=cmd_f_quantile)

    sp = sub.add_parser("s-gamma", help="largest radius with >= gamma ball-volume fraction inside")
    common(sp)
    sp.add_argument("--gamma", type=float, nargs="+", default=[0.25])
    sp.add_argument("--mc-points", type=int, default=100_000, dest="mc_points")
    sp.set_defaults(func=cmd_s_gamma)

    sp = sub.add_parser("overlap", help="one-step TV overlap for nearby and antipodal pairs")
    common(sp)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--bins", type=int, default=64)
    sp.add_argument("--separation", type=float, default=None,
                    help="arc distance of the near pair (default: F/(100 sqrt(n)))")
    sp.set_defaults(func=cmd_overlap)

    sp = sub.add_parser("mixing", help="TV mixing curve from a fresh-start replica ensemble")
    common(sp)
    sp.add_argument("--replicas", type=int, default=10_000)
    sp.add_argument("--checkpoints", default="0,1,2,4,8")
    sp.add_argument("--bins", type=int, default=64)
    sp.add_argument("--law", default="cosine", choices=["cosine", "uniform_hemisphere"])
    sp.set_defaults(func=cmd_mixing)

    sp = sub.add_parser("capsule", help="first-coordinate increment variance and passage times")
    common(sp, body=False)
    sp.add_argument("--dim", type=int, nargs="+", required=True)
    sp.add_argument("--half-length", type=float, default=4.0, dest="half_length")
    sp.add_argument("--steps", type=int, default=100_000)
    sp.add_argument("--replicas", type=int, default=100_000)
    sp.add_argument("--tau-replicas", type=int, default=0, dest="tau_replicas")
    sp.set_defaults(func=cmd_capsule)

    sp = sub.add_parser("fraction", help="long-run fraction of states with x_coord > threshold")
    common(sp)
    sp.add_argument("--steps", type=int, default=1_000_000)
    sp.add_argument("--burn-in", type=int, default=1000, dest="burn_in")
    sp.add_argument("--coord", type=int, default=1)
    sp.add_argument("--threshold", type=float, default=0.0)
    sp.add_argument("--law", default="cosine", choices=["cosine", "uniform_hemisphere"])
    sp.set_defaults(func=cmd_fraction)

    sp = sub.add_parser("validate", help="report C, D and run the geometry witness checks")
    sp.add_argument("--body", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_validate)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (GeometryError, RuntimeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
