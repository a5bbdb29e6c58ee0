"""End-to-end runs: images in, partitioned displacement fields out.

The disparity pipeline reads a stereo pair, block-matches an integer
initializer, builds the linearized data term and runs the splitting
solver; the result is written as a 16-bit PGM (value = disparity *
out_scale) plus an optional trace CSV and metrics against ground truth.
The flow pipeline does the analogue with a 2-D search and writes a raw
.flo field plus a color-coded PNG.
"""

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .blockmatch import MatchConfig, init_disparity, init_flow
from .dataterm import build_disparity_data, build_flow_data
from .flowio import write_flo
from .imageio import read_gray_raw, read_image, write_pgm, write_png
from .metrics import disparity_metrics, flow_metrics
from .solver import SolverConfig, run
from .viz import colorize_flow


@dataclass
class RunSpec:
    """Everything one pipeline invocation needs."""

    mode: str  # "disparity" | "flow"
    f1: str
    f2: str
    match: MatchConfig
    solve: SolverConfig
    out: str = None
    color_out: str = None
    trace: str = None
    gt: str = None
    gt_scale: float = 1.0
    out_scale: float = 1.0
    tau: float = 1.0
    color_max: float = None
    threads: int = None


def set_threads(threads):
    """Cap the worker pool.  Results never depend on the thread count."""
    if threads is not None:
        import numba

        cap = numba.config.NUMBA_NUM_THREADS
        n = min(int(threads), cap)
        if n < int(threads):
            print(
                f"note: launch-time thread cap is {cap}, using {n} "
                f"(set NUMBA_NUM_THREADS to raise it)",
                file=sys.stderr,
            )
        numba.set_num_threads(max(n, 1))


def load_disparity_gt(path, scale=1.0):
    """Ground-truth disparity from an image file: raw sample / scale,
    with raw value 0 treated as unknown (NaN)."""
    raw = read_gray_raw(path)
    gt = raw / float(scale)
    gt[raw == 0] = math.nan
    return gt


def run_disparity(spec, log=print):
    f1 = read_image(spec.f1)
    f2 = read_image(spec.f2)
    ubar = init_disparity(f1, f2, spec.match)
    data = build_disparity_data(f1, f2, ubar)
    u, trace = run(data, ubar, spec.solve)
    if spec.out:
        write_pgm(spec.out, u * spec.out_scale, maxval=65535)
        log(f"wrote {spec.out} (disparity x {spec.out_scale:g}, 16-bit PGM)")
    if spec.trace:
        trace.write_csv(spec.trace)
        log(f"wrote {spec.trace}")
    if spec.gt:
        gt = load_disparity_gt(spec.gt, spec.gt_scale)
        bad, mae = disparity_metrics(u, gt, tau=spec.tau)
        log(f"bad-pixel rate (tau={spec.tau:g}): {bad:.4f}   MAE: {mae:.4f}")
    return u, trace


def run_flow(spec, log=print):
    from .flowio import read_flo

    f1 = read_image(spec.f1)
    f2 = read_image(spec.f2)
    ubar = init_flow(f1, f2, spec.match)
    data = build_flow_data(f1, f2, ubar)
    u, trace = run(data, ubar, spec.solve)
    if spec.out:
        write_flo(spec.out, u)
        log(f"wrote {spec.out}")
    if spec.color_out:
        write_png(spec.color_out, colorize_flow(u, spec.color_max))
        log(f"wrote {spec.color_out}")
    if spec.trace:
        trace.write_csv(spec.trace)
        log(f"wrote {spec.trace}")
    if spec.gt:
        gt = read_flo(spec.gt)
        aee, aae = flow_metrics(u, gt)
        log(f"AEE: {aee:.4f}   AAE: {aae:.4f} deg")
    return u, trace


def run_pipeline(spec, log=print):
    """Execute a RunSpec; returns a process exit status (0 on success)."""
    set_threads(spec.threads)
    try:
        if spec.mode == "disparity":
            run_disparity(spec, log=log)
        elif spec.mode == "flow":
            run_flow(spec, log=log)
        else:
            raise ValueError(f"unknown mode {spec.mode!r}")
    except (ValueError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
