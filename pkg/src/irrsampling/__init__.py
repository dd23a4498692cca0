"""Irregular sampling reconstruction with universal truncation error bounds."""

from .bounds import (
    BoundBreakdown,
    BoundInputs,
    asymptotic_exponent,
    c1,
    c2,
    c3,
    c4,
    delta_star,
    k_bound,
    k_tilde,
    lambert_w0_real,
    pp_constant_1d,
    pp_constant_multi,
)
from .errors import CoincidentNodesError, ConfigError, DomainError, IrrSamplingError
from .kernel import KernelEval, kernel_inside, kernel_outside, kernel_tensor, sinc
from .reconstruct import ErrorReport, GridAxis, ReconstructionRequest, measure_error, truncated_sum
from .sampling_set import (
    JitterSpec,
    NodeSet,
    WindowSpec,
    admissible,
    build_nodes,
    nearest_index,
    separation,
    window_index_set,
)
from .signals import QuadratureSpec, Signal, lq_norm, make_signal

__version__ = "0.1.0"
