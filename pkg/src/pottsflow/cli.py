"""Command-line front end.

Subcommands: disparity, flow, potts1d, metrics.  Options can also come
from a key=value config file (--config); explicit flags win over the file,
the file wins over built-in defaults.
"""

import argparse
import os
import sys

import numpy as np

DEFAULTS = {
    "mu": 0,
    "eta0": 0.01,
    "sigma": 1.05,
    "iters": 100,
    "block_radius": 3,
    "median_radius": 1,
    "gt_scale": 1.0,
    "out_scale": 1.0,
    "tau": 1.0,
}


def read_config_file(path):
    """Parse a key=value config file (# starts a comment)."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def _merge_options(args, keys):
    """defaults < config file < explicit flags, for the given keys."""
    merged = {k: DEFAULTS.get(k) for k in keys}
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    for k, v in cfg.items():
        if k == "lambda":
            k = "lam"
        if k not in keys:
            raise ValueError(f"unknown config key {k!r}")
        merged[k] = v
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def _to_float(x):
    return None if x is None else float(x)


def _to_int(x):
    return None if x is None else int(x)


def _axis_bound(raw, name):
    """Search bound: one int (both axes) or two ints (row, col)."""
    if raw is None:
        return None
    if isinstance(raw, str):
        raw = raw.replace(",", " ").split()
    vals = [int(v) for v in (raw if isinstance(raw, (list, tuple)) else [raw])]
    if len(vals) == 1:
        return vals[0]
    if len(vals) == 2:
        return (vals[0], vals[1])
    raise ValueError(f"{name} takes one or two integers, got {vals}")


PIPELINE_KEYS = (
    "lam", "mu", "box_min", "box_max", "eta0", "sigma", "iters",
    "search_min", "search_max", "block_radius", "median_radius",
    "gt", "gt_scale", "out_scale", "tau", "trace", "threads", "color_max",
    "out", "color_out",
)


def _build_spec(args, mode):
    from .blockmatch import MatchConfig
    from .pipeline import RunSpec
    from .solver import SolverConfig

    o = _merge_options(args, PIPELINE_KEYS)
    if o["lam"] is None:
        raise ValueError("--lambda is required (there is no sensible default weight)")
    if o["search_min"] is None or o["search_max"] is None:
        raise ValueError("--search-min and --search-max are required")
    match = MatchConfig(
        search_min=_axis_bound(o["search_min"], "--search-min"),
        search_max=_axis_bound(o["search_max"], "--search-max"),
        block_radius=_to_int(o["block_radius"]),
        median_radius=_to_int(o["median_radius"]),
    )
    solve = SolverConfig(
        lam=float(o["lam"]),
        mu=_to_int(o["mu"]),
        eta0=float(o["eta0"]),
        sigma=float(o["sigma"]),
        iterations=_to_int(o["iters"]),
        box_min=_to_float(o["box_min"]),
        box_max=_to_float(o["box_max"]),
    )
    return RunSpec(
        mode=mode,
        f1=args.f1,
        f2=args.f2,
        match=match,
        solve=solve,
        out=o["out"],
        color_out=o["color_out"],
        trace=o["trace"],
        gt=o["gt"],
        gt_scale=float(o["gt_scale"]),
        out_scale=float(o["out_scale"]),
        tau=float(o["tau"]),
        color_max=_to_float(o["color_max"]),
        threads=_to_int(o["threads"]),
    )


def _add_pipeline_args(p, flow):
    p.add_argument("f1", help="first (left/reference) image")
    p.add_argument("f2", help="second (right/next) image")
    p.add_argument("--lambda", dest="lam", type=float, help="Potts jump weight (required)")
    p.add_argument("--mu", type=int, choices=(0, 1), help="1 enables the box constraint")
    p.add_argument("--box-min", type=float, help="lower box bound (mu=1)")
    p.add_argument("--box-max", type=float, help="upper box bound (mu=1)")
    p.add_argument("--eta0", type=float, help="initial coupling weight (default 0.01)")
    p.add_argument("--sigma", type=float, help="coupling growth factor (default 1.05)")
    p.add_argument("--iters", type=int, help="iteration count (default 100)")
    nargs = "+" if flow else None
    p.add_argument("--search-min", nargs=nargs, help="minimum displacement (flow: one value or row col)")
    p.add_argument("--search-max", nargs=nargs, help="maximum displacement (flow: one value or row col)")
    p.add_argument("--block-radius", type=int, help="matching block radius (default 3, i.e. 7x7)")
    p.add_argument("--median-radius", type=int, help="init median-filter radius (default 1)")
    p.add_argument("--gt", help="ground-truth file (image for disparity, .flo for flow)")
    p.add_argument("--gt-scale", type=float, help="stored gt value = disparity * scale (default 1)")
    p.add_argument("--trace", help="write per-iteration telemetry CSV here")
    p.add_argument("--threads", type=int, help="cap the worker-thread pool")
    p.add_argument("--config", help="key=value config file; flags override it")
    if flow:
        p.add_argument("--out", help="output .flo path")
        p.add_argument("--color-out", help="color-coded PNG path")
        p.add_argument("--color-max", type=float, help="magnitude mapped to full brightness")
    else:
        p.add_argument("--out", help="output 16-bit PGM path")
        p.add_argument("--out-scale", type=float, help="stored value = disparity * scale (default 1)")
        p.add_argument("--tau", type=float, help="bad-pixel threshold (default 1)")


def _cmd_potts1d(args):
    from .potts1d import solve_potts_1d

    signal = np.loadtxt(args.input, delimiter=",", ndmin=2)
    seg = solve_potts_1d(signal, args.gamma)
    values = np.atleast_2d(seg.values.T).T
    rows = np.column_stack([seg.ends, values])
    header = "end," + ",".join(f"value{c}" for c in range(values.shape[1]))
    out = args.out or "-"
    if out == "-":
        sys.stdout.write(header + "\n")
        for r in rows:
            sys.stdout.write(f"{int(r[0])}," + ",".join(f"{x:.17g}" for x in r[1:]) + "\n")
    else:
        with open(out, "w") as f:
            f.write(header + "\n")
            for r in rows:
                f.write(f"{int(r[0])}," + ",".join(f"{x:.17g}" for x in r[1:]) + "\n")
    print(f"{seg.num_segments} segments, energy {seg.energy:.17g}", file=sys.stderr)
    return 0


def _cmd_metrics(args):
    if args.kind == "disparity":
        from .imageio import read_gray_raw
        from .metrics import disparity_metrics
        from .pipeline import load_disparity_gt

        u = read_gray_raw(args.computed) / args.pred_scale
        gt = load_disparity_gt(args.gt, args.gt_scale)

        bad, mae = disparity_metrics(u, gt, tau=args.tau)
        print(f"bad-pixel rate (tau={args.tau:g}): {bad:.6f}")
        print(f"MAE: {mae:.6f}")
    else:
        from .flowio import read_flo
        from .metrics import flow_metrics

        aee, aae = flow_metrics(read_flo(args.computed), read_flo(args.gt))
        print(f"AEE: {aee:.6f}")
        print(f"AAE: {aae:.6f} deg")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pottsflow",
        description="Piecewise-constant disparity and optical-flow partitioning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("disparity", help="partitioned disparity from a stereo pair")
    _add_pipeline_args(p, flow=False)

    p = sub.add_parser("flow", help="partitioned optical flow from a frame pair")
    _add_pipeline_args(p, flow=True)

    p = sub.add_parser("potts1d", help="segment a 1-D signal from CSV")
    p.add_argument("input", help="CSV file, one sample per row, channels as columns")
    p.add_argument("--gamma", type=float, required=True, help="jump penalty")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("metrics", help="compare a result against ground truth")
    p.add_argument("kind", choices=("disparity", "flow"))
    p.add_argument("computed", help="computed result (PGM/PNG or .flo)")
    p.add_argument("gt", help="ground truth (PGM/PNG or .flo)")
    p.add_argument("--pred-scale", type=float, default=1.0, help="stored = disparity * scale")
    p.add_argument("--gt-scale", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    return parser


def _raise_thread_cap(args):
    """--threads above numba's launch cap only works if the cap env var is
    set before numba is first imported, so handle it up front."""
    threads = getattr(args, "threads", None)
    if threads is None and getattr(args, "config", None):
        threads = read_config_file(args.config).get("threads")
    if threads is not None and "numba" not in sys.modules:
        current = os.environ.get("NUMBA_NUM_THREADS")
        if current is None or int(current) < int(threads):
            os.environ["NUMBA_NUM_THREADS"] = str(threads)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _raise_thread_cap(args)
        if args.command in ("disparity", "flow"):
            from .pipeline import run_pipeline

            return run_pipeline(_build_spec(args, args.command))
        if args.command == "potts1d":
            return _cmd_potts1d(args)
        return _cmd_metrics(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
