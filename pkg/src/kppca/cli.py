"""Command-line harness: fit, project, reconstruct, generate, report.

Exit codes: 0 success, 2 usage error, 3 data/IO error, 4 numeric error.
Numeric output files are byte-identical across re-runs with the same flags
and seed; run metadata (which carries a timestamp) lives in a .meta.json
sidecar next to each output set.
"""

import argparse
import math
import os
import re
import sys

import numpy as np

from ._version import __version__
from .dual import (
    DualModel,
    dual_latent_map,
    dual_reconstruct,
    dual_sample,
    explained_variance,
    fit_dual,
    kpca_limit,
    samples_from_noise,
)
from .errors import DataError, NumericError
from .io_datasets import (
    RunMetadata,
    load_csv,
    load_model,
    save_csv,
    save_model,
    write_metadata,
)
from .kernels import KernelSpec, TrainingSet, centered_kernel_vectors, gram
from .plots import pgm_grid, scatter_svg
from .preimage import PreimageConfig, kernel_smoother
from .primal import PrimalModel, feature_reconstruct, latent_map, sample_feature
from .spectral import center_gram


class _UsageError(Exception):
    pass


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kppca",
        description="Probabilistic PCA in kernel space: train, project, reconstruct, generate.",
    )
    parser.add_argument("--version", action="version", version=f"kppca {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="train a kernel-space model from a CSV dataset")
    p_fit.add_argument("--data", required=True, help="CSV file, one sample per row")
    p_fit.add_argument("--kernel", required=True, choices=["linear", "rbf"])
    p_fit.add_argument("--gamma", type=float, help="RBF bandwidth")
    p_fit.add_argument("--q", type=int, help="latent dimension (noise variance deduced)")
    p_fit.add_argument("--sigma2", type=float, help="noise variance (latent dimension deduced)")
    p_fit.add_argument("--out", required=True, help="output directory")
    p_fit.set_defaults(func=cmd_fit)

    p_proj = sub.add_parser("project", help="latent codes for a dataset")
    p_proj.add_argument("--model", required=True)
    p_proj.add_argument("--data", required=True)
    p_proj.add_argument("--out", required=True)
    p_proj.set_defaults(func=cmd_project)

    p_rec = sub.add_parser("reconstruct", help="project, reconstruct, and preimage a dataset")
    p_rec.add_argument("--model", required=True)
    p_rec.add_argument("--data", required=True)
    p_rec.add_argument("--epsilon", type=float, help="preimage normalizer stabilizer (default 1e-3 * N)")
    p_rec.add_argument("--clip-negative", action=argparse.BooleanOptionalAction, default=True,
                       help="clamp negative smoother weights to zero (default on)")
    p_rec.add_argument("--out", required=True)
    p_rec.set_defaults(func=cmd_reconstruct)

    p_gen = sub.add_parser("generate", help="sample kernel representations and preimage them")
    p_gen.add_argument("--model", required=True)
    p_gen.add_argument("--count", type=int, default=100)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--epsilon", type=float, help="preimage normalizer stabilizer (default 1e-3 * N)")
    p_gen.add_argument("--clip-negative", action=argparse.BooleanOptionalAction, default=True,
                       help="clamp negative smoother weights to zero (default on)")
    p_gen.add_argument("--grid", help="AxB sweep of the two leading noise components instead of random draws")
    p_gen.add_argument("--latent-range", default="-1:1", help="LO:HI range for --grid (default -1:1)")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_rep = sub.add_parser("report", help="print hyperparameters and spectrum of a model")
    p_rep.add_argument("--model", required=True)
    p_rep.add_argument("--out", help="directory for spectrum.csv (default: next to the model)")
    p_rep.set_defaults(func=cmd_report)

    return parser


# --- shared helpers -----------------------------------------------------


def _ensure_out(path):
    os.makedirs(path, exist_ok=True)
    return path


def _model_meta(model, seed=None):
    if isinstance(model, DualModel):
        return RunMetadata(seed=seed, kernel=model.spec, q=model.q, sigma2=model.sigma2,
                           explained_variance=explained_variance(model))
    ev = None
    total = float(model.eigenvalues.sum())
    if total > 0:
        ev = float(model.eigenvalues[: model.q].sum() / total)
    return RunMetadata(seed=seed, kernel=None, q=model.q, sigma2=model.sigma2,
                       explained_variance=ev)


def _preimage_cfg(args, n):
    eps = args.epsilon if args.epsilon is not None else 1e-3 * n
    return PreimageConfig(epsilon=eps, clip_negative=args.clip_negative)


def _preimage_columns(model, kc_cols, cfg):
    out = np.empty((model.ts.d_in, kc_cols.shape[1]))
    for i in range(kc_cols.shape[1]):
        out[:, i] = kernel_smoother(model.ts, kc_cols[:, i], cfg)
    return out


def _dual_project(model, x):
    kcs = centered_kernel_vectors(model.spec, model.ts, x.T)
    h = np.empty((model.q, kcs.shape[1]))
    for i in range(kcs.shape[1]):
        h[:, i] = dual_latent_map(model, kcs[:, i])
    return kcs, h


def _dual_reconstruct_columns(model, kcs):
    rec = np.empty_like(kcs)
    for i in range(kcs.shape[1]):
        h = dual_latent_map(model, kcs[:, i])
        rec[:, i] = dual_reconstruct(model, h).kc_vec
    return rec


# --- commands -----------------------------------------------------------


def cmd_fit(args):
    if (args.q is None) == (args.sigma2 is None):
        raise _UsageError("fit needs exactly one of --q and --sigma2")
    if args.kernel == "rbf":
        if args.gamma is None or args.gamma <= 0:
            raise _UsageError("--kernel rbf needs --gamma > 0")
        spec = KernelSpec("rbf", args.gamma)
    else:
        spec = KernelSpec("linear")
    x = load_csv(args.data)
    ts = TrainingSet.from_columns(x)
    kc = center_gram(gram(spec, ts))
    model = fit_dual(kc, spec, ts, q=args.q, sigma2=args.sigma2)
    out = _ensure_out(args.out)
    model_path = os.path.join(out, "model.kppca")
    save_model(model_path, model)
    write_metadata(os.path.join(out, "model.meta.json"), _model_meta(model),
                   extra={"command": "fit", "data": args.data})
    ev = explained_variance(model)
    print(f"fit: N={model.n} d_in={ts.d_in} kernel={spec.family} q={model.q} "
          f"sigma2={model.sigma2:.6g} explained_variance={ev:.6g}")
    print(f"wrote {model_path}")
    return 0


def cmd_project(args):
    model = load_model(args.model)
    x = load_csv(args.data)
    if isinstance(model, DualModel):
        _, h = _dual_project(model, x)
    else:
        h = np.stack([latent_map(model, x[:, i]) for i in range(x.shape[1])], axis=1)
    out = _ensure_out(args.out)
    latent_path = os.path.join(out, "latent.csv")
    save_csv(latent_path, h, header=[f"h{p + 1}" for p in range(h.shape[0])])
    write_metadata(os.path.join(out, "latent.meta.json"), _model_meta(model),
                   extra={"command": "project", "data": args.data})
    print(f"wrote {latent_path} ({h.shape[1]} rows x {h.shape[0]} cols)")
    return 0


def cmd_reconstruct(args):
    model = load_model(args.model)
    x = load_csv(args.data)
    if isinstance(model, DualModel):
        cfg = _preimage_cfg(args, model.n)
        kcs, _ = _dual_project(model, x)
        rec_kc = _dual_reconstruct_columns(model, kcs)
        points = _preimage_columns(model, rec_kc, cfg)
        extra = {"command": "reconstruct", "data": args.data, "weights": "centered",
                 "preimage": {"epsilon": cfg.epsilon, "clip_negative": cfg.clip_negative}}
    else:
        points = np.stack(
            [feature_reconstruct(model, latent_map(model, x[:, i])) for i in range(x.shape[1])],
            axis=1,
        )
        extra = {"command": "reconstruct", "data": args.data}
    out = _ensure_out(args.out)
    rec_path = os.path.join(out, "reconstructed.csv")
    save_csv(rec_path, points, header=[f"x{j + 1}" for j in range(points.shape[0])])
    write_metadata(os.path.join(out, "reconstructed.meta.json"), _model_meta(model), extra=extra)
    print(f"wrote {rec_path} ({points.shape[1]} rows x {points.shape[0]} cols)")
    return 0


def _parse_grid(args):
    m = re.fullmatch(r"(\d+)x(\d+)", args.grid)
    if not m:
        raise _UsageError(f"--grid expects AxB, got {args.grid!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if a < 1 or b < 1:
        raise _UsageError("--grid dimensions must be at least 1")
    r = re.fullmatch(r"([^:]+):([^:]+)", args.latent_range)
    try:
        lo, hi = (float(r.group(1)), float(r.group(2))) if r else (None, None)
    except ValueError:
        r = None
    if r is None:
        raise _UsageError(f"--latent-range expects LO:HI, got {args.latent_range!r}")
    return a, b, lo, hi


def _grid_noise(model, a, b, lo, hi):
    # Sweep the two leading noise components on the eigen-aligned axes so
    # the grid walks the dominant latent directions; the remaining
    # components stay zero.
    u = np.zeros((model.n, a * b))
    first = np.linspace(lo, hi, a)
    second = np.linspace(lo, hi, b)
    for r_i in range(b):
        for c_i in range(a):
            idx = r_i * a + c_i
            u[0, idx] = first[c_i]
            if model.n > 1:
                u[1, idx] = second[r_i]
    return model.e @ u


def cmd_generate(args):
    model = load_model(args.model)
    out = _ensure_out(args.out)
    if isinstance(model, PrimalModel):
        if args.count < 0:
            raise _UsageError("--count must be nonnegative")
        points = sample_feature(model, args.seed, args.count)
        gen_path = os.path.join(out, "generated.csv")
        save_csv(gen_path, points, header=[f"x{j + 1}" for j in range(points.shape[0])])
        write_metadata(os.path.join(out, "generate.meta.json"),
                       _model_meta(model, seed=args.seed), extra={"command": "generate"})
        print(f"wrote {gen_path} ({points.shape[1]} rows)")
        return 0

    cfg = _preimage_cfg(args, model.n)
    grid = None
    if args.grid is not None:
        grid = _parse_grid(args)
        a, b, lo, hi = grid
        noise = _grid_noise(model, a, b, lo, hi)
        kc_cols = samples_from_noise(model, noise)
    else:
        if args.count < 0:
            raise _UsageError("--count must be nonnegative")
        samples = dual_sample(model, args.seed, args.count)
        kc_cols = (np.stack([s.kc_vec for s in samples], axis=1)
                   if samples else np.empty((model.n, 0)))

    ks_path = os.path.join(out, "kernel_samples.csv")
    save_csv(ks_path, kc_cols, header=[f"k{i + 1}" for i in range(model.n)])
    points = _preimage_columns(model, kc_cols, cfg)
    gen_path = os.path.join(out, "generated.csv")
    save_csv(gen_path, points, header=[f"x{j + 1}" for j in range(points.shape[0])])

    written = [ks_path, gen_path]
    d_in = model.ts.d_in
    side = math.isqrt(d_in)
    image_like = side * side == d_in and side >= 8
    if image_like:
        # image data gets tile grids instead of scatter plots
        if points.shape[1] > 0:
            images = points.T.reshape(-1, side, side)
            grid_cols = grid[0] if grid is not None else max(1, math.isqrt(points.shape[1]))
            pgm_path = os.path.join(out, "generated.pgm")
            pgm_grid(pgm_path, images, grid_cols)
            written.append(pgm_path)
    elif d_in >= 2:
        # higher-dimensional points are plotted on their first two coordinates
        train_cols = model.ts.columns()
        rec_kc = _dual_reconstruct_columns(model, model.kc.entries.copy())
        rec_pts = _preimage_columns(model, rec_kc, cfg)
        limit = kpca_limit(model)
        kpca_kc = _dual_reconstruct_columns(limit, model.kc.entries.copy())
        kpca_pts = _preimage_columns(model, kpca_kc, cfg)
        svg_path = os.path.join(out, "scatter.svg")
        scatter_svg(svg_path, [
            ("original", "black", train_cols[:2]),
            ("reconstruction", "blue", rec_pts[:2]),
            ("kpca limit", "red", kpca_pts[:2]),
            ("generated", "grey", points[:2]),
        ])
        written.append(svg_path)

    extra = {"command": "generate", "weights": "centered",
             "preimage": {"epsilon": cfg.epsilon, "clip_negative": cfg.clip_negative},
             "files": [os.path.basename(p) for p in written]}
    if grid is not None:
        extra["grid"] = {"cols": grid[0], "rows": grid[1], "range": [grid[2], grid[3]]}
    write_metadata(os.path.join(out, "generate.meta.json"),
                   _model_meta(model, seed=args.seed), extra=extra)
    for p in written:
        print(f"wrote {p}")
    return 0


def cmd_report(args):
    model = load_model(args.model)
    lam = model.eigenvalues
    if isinstance(model, DualModel):
        ev = explained_variance(model)
        print("kind: dual")
        print(f"N: {model.n}")
        print(f"d_in: {model.ts.d_in}")
        gamma = "" if model.spec.gamma is None else f" gamma={model.spec.gamma!r}"
        print(f"kernel: {model.spec.family}{gamma}")
    else:
        total = float(lam.sum())
        ev = float(lam[: model.q].sum() / total) if total > 0 else float("nan")
        print("kind: primal")
        print(f"N: {model.n}")
        print(f"d: {model.d}")
    print(f"q: {model.q}")
    print(f"sigma2: {model.sigma2!r}")
    print(f"explained_variance: {ev!r}")
    shown = lam[: min(10, lam.size)]
    print("leading eigenvalues: " + ", ".join(f"{v:.6g}" for v in shown))
    out = args.out if args.out is not None else (os.path.dirname(os.path.abspath(args.model)) or ".")
    _ensure_out(out)
    spec_path = os.path.join(out, "spectrum.csv")
    table = np.stack([np.arange(1, lam.size + 1, dtype=float), lam])
    save_csv(spec_path, table, header=["index", "eigenvalue"])
    write_metadata(os.path.join(out, "spectrum.meta.json"), _model_meta(model),
                   extra={"command": "report"})
    print(f"wrote {spec_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
