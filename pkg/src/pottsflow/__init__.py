"""Piecewise-constant disparity and optical-flow partitioning.

Displacement fields between an image pair are estimated by directly
minimizing a linearized brightness-invariance data term plus a jump-count
(Potts) penalty, via an alternating splitting scheme whose inner problems
are exactly solvable: pixelwise quadratics and univariate Potts problems
along grid lines.
"""

from .blockmatch import EmptySearchError, MatchConfig, init_disparity, init_flow, median_filter, ncc
from .dataterm import LinearizedData, build_disparity_data, build_flow_data, data_energy
from .flowio import BadMagicError, SizeMismatchError, known_mask, read_flo, write_flo
from .grids import (
    OutOfGridError,
    forward_diff_h,
    forward_diff_v,
    grouped_l0,
    sample_shifted,
)
from .imageio import (
    CorruptHeaderError,
    UnsupportedFormatError,
    read_image,
    read_pnm,
    write_pgm,
    write_png,
)
from .metrics import disparity_metrics, flow_metrics
from .pipeline import RunSpec, run_pipeline
from .potts1d import Segmentation1D, brute_force_potts, fit_potts_lines, potts_energy_1d, solve_potts_1d
from .solver import (
    BoxFlowUnsupportedError,
    InvariantViolationError,
    IterationTrace,
    NonfinitePixelError,
    SolverConfig,
    SolverState,
    dual_update,
    run,
    total_energy,
    u_update,
    v_update,
    w_update,
)
from .viz import colorize_flow

__version__ = "0.1.0"

__all__ = [
    "BadMagicError",
    "BoxFlowUnsupportedError",
    "CorruptHeaderError",
    "EmptySearchError",
    "InvariantViolationError",
    "IterationTrace",
    "LinearizedData",
    "MatchConfig",
    "NonfinitePixelError",
    "OutOfGridError",
    "RunSpec",
    "Segmentation1D",
    "SizeMismatchError",
    "SolverConfig",
    "SolverState",
    "UnsupportedFormatError",
    "brute_force_potts",
    "build_disparity_data",
    "build_flow_data",
    "colorize_flow",
    "data_energy",
    "disparity_metrics",
    "dual_update",
    "fit_potts_lines",
    "flow_metrics",
    "forward_diff_h",
    "forward_diff_v",
    "grouped_l0",
    "init_disparity",
    "init_flow",
    "known_mask",
    "median_filter",
    "ncc",
    "potts_energy_1d",
    "read_flo",
    "read_image",
    "read_pnm",
    "run",
    "run_pipeline",
    "sample_shifted",
    "solve_potts_1d",
    "total_energy",
    "u_update",
    "v_update",
    "w_update",
    "write_flo",
    "write_pgm",
    "write_png",
]
