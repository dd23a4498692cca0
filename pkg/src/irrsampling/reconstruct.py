"""Truncated sampling sums and measured-vs-certified truncation error."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import BoundBreakdown, BoundInputs, k_bound
from .errors import DomainError
from .kernel import kernel_window_vector
from .sampling_set import JitterSpec, admissible, build_nodes
from .signals import QuadratureSpec, Signal, lq_norm

__all__ = [
    "ErrorReport",
    "GridAxis",
    "ReconstructionRequest",
    "measure_error",
    "rect_grid",
    "truncated_sum",
]


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not self.step > 0 or self.hi < self.lo:
            raise DomainError(f"grid axis needs lo <= hi and step > 0, got {self}")

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """``LO:HI:STEP``."""
        try:
            lo, hi, step = (float(v) for v in text.split(":"))
        except ValueError as exc:
            raise DomainError(f"grid axis must be LO:HI:STEP, got {text!r}") from exc
        return cls(lo, hi, step)

    def values(self) -> np.ndarray:
        count = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return self.lo + self.step * np.arange(count)

    def __str__(self) -> str:
        return f"{self.lo!r}:{self.hi!r}:{self.step!r}"


def rect_grid(axes: Sequence[GridAxis]) -> np.ndarray:
    """Lexicographically ordered points of a rectangular grid, shape ``(m, d)``."""
    vals = [a.values() for a in axes]
    mesh = np.meshgrid(*vals, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _window_terms(f: Signal, x: np.ndarray, N: Sequence[int], jitter: JitterSpec):
    ns = build_nodes(x, N, jitter)
    kernels = []
    nodes = []
    for axis in range(ns.d):
        window = ns.axis_indices(axis)
        t = ns.axis_nodes(axis)
        kernels.append(kernel_window_vector(x[axis], window, t))
        nodes.append(t)
    weight = kernels[0]
    for k in kernels[1:]:
        weight = np.multiply.outer(weight, k)
    mesh = np.meshgrid(*nodes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    samples = np.asarray(f(pts) if ns.d > 1 else f(pts[:, 0]), dtype=float)
    return samples, weight.ravel()


def truncated_sum(f: Signal, x, N: Sequence[int], jitter: JitterSpec) -> float:
    """``Y(f; x)``: the sampling sum restricted to the window around ``x``.

    The node set is rebuilt for every ``x`` (jitter lives only inside the
    current window). Terms are added in lexicographic index order with
    compensated summation.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    N = tuple(int(v) for v in np.atleast_1d(N))
    if f.d != len(x):
        raise DomainError(f"signal dimension {f.d} does not match point dimension {len(x)}")
    samples, weight = _window_terms(f, x, N, jitter)
    return math.fsum(samples * weight)


@dataclass
class ReconstructionRequest:
    signal: Signal
    N: tuple[int, ...]
    jitter: JitterSpec
    grid: np.ndarray
    q: float = 2.0
    certify: bool = True
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    delta: tuple[float, ...] | None = None
    grid_axes: tuple[GridAxis, ...] | None = None

    def __post_init__(self):
        self.N = tuple(int(v) for v in np.atleast_1d(self.N))
        self.grid = np.asarray(self.grid, dtype=float).reshape(-1, len(self.N))
        if not np.all(np.isfinite(self.grid)):
            raise DomainError("grid points must be finite")
        if not (self.signal.d == len(self.N) == self.jitter.d):
            raise DomainError(
                f"dimension mismatch: signal {self.signal.d}, N {len(self.N)}, jitter {self.jitter.d}")

    @classmethod
    def on_grid(cls, signal: Signal, N, jitter: JitterSpec, axes: Sequence[GridAxis], **kw):
        axes = tuple(axes)
        return cls(signal=signal, N=N, jitter=jitter, grid=rect_grid(axes), grid_axes=axes, **kw)

    def separation_bound(self) -> tuple[float, ...]:
        """Separation fed to the bound; ``1 - 2 M_j`` holds for every window."""
        if self.delta is not None:
            return tuple(self.delta)
        return tuple(1.0 - 2.0 * m for m in self.jitter.M)


@dataclass
class ErrorReport:
    points: np.ndarray
    f_values: np.ndarray
    y_values: np.ndarray
    sup_error: float
    argmax: tuple[float, ...] | None
    certified: bool
    bound: BoundBreakdown | None = None
    norm_upper: float | None = None
    reason: str | None = None
    config: dict = field(default_factory=dict)

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.f_values - self.y_values)

    @property
    def k_delta(self) -> float | None:
        return None if self.bound is None else self.bound.k_delta

    @property
    def certified_bound(self) -> float | None:
        if self.bound is None or self.norm_upper is None:
            return None
        return self.bound.k_delta * self.norm_upper

    @property
    def tightness(self) -> float | None:
        cb = self.certified_bound
        if cb is None:
            return None
        return self.sup_error / cb if cb > 0 else math.inf

    @property
    def violated(self) -> bool:
        t = self.tightness
        return t is not None and t > 1.0

    def summary(self) -> dict:
        return {
            "sup_error": self.sup_error,
            "argmax": None if self.argmax is None else list(self.argmax),
            "certified": self.certified,
            "reason": self.reason,
            "k_delta": self.k_delta,
            "norm_upper": self.norm_upper,
            "certified_bound": self.certified_bound,
            "tightness": self.tightness,
            "violated": self.violated,
            "n_points": int(self.points.shape[0]),
            "bound": None if self.bound is None else self.bound.to_json(),
            "config": self.config,
        }


def _argmax_lexicographic(points: np.ndarray, residuals: np.ndarray) -> tuple[float, ...] | None:
    if residuals.size == 0:
        return None
    top = residuals.max()
    ties = points[residuals == top]
    return tuple(float(v) for v in min(map(tuple, ties)))


def measure_error(req: ReconstructionRequest) -> ErrorReport:
    """Residual ``|f(x) - Y(f; x)|`` over the grid, with an optional certificate.

    When certification is requested but the hypotheses fail (``q <= 1``,
    inadmissible jitter, a constant out of domain, a norm that cannot be
    bounded) the measurement still runs and the report is flagged
    uncertified with the reason.
    """
    f = req.signal
    pts = req.grid
    y = np.array([truncated_sum(f, p, req.N, req.jitter) for p in pts], dtype=float)
    fv = np.asarray(f(pts) if f.d > 1 else f(pts[:, 0]), dtype=float).reshape(-1) if len(pts) else np.zeros(0)
    res = np.abs(fv - y)
    sup = float(res.max()) if res.size else 0.0

    config = {
        "N": list(req.N),
        "jitter": req.jitter.to_config(),
        "signal": f.description,
        "q": req.q,
        "grid": [str(a) for a in req.grid_axes] if req.grid_axes else None,
        "quadrature": {"R": req.quadrature.R, "nodes_per_unit": req.quadrature.nodes_per_unit,
                       "rule": req.quadrature.rule},
    }
    report = ErrorReport(points=pts, f_values=fv, y_values=y, sup_error=sup,
                         argmax=_argmax_lexicographic(pts, res), certified=False, config=config)
    if not req.certify:
        report.reason = "certification not requested"
        return report
    try:
        if not admissible(req.jitter.max_amplitude, req.q, f.d, "expansion"):
            raise DomainError(
                f"jitter bound {req.jitter.max_amplitude} violates the expansion condition for q={req.q}")
        bound = k_bound(BoundInputs(N=req.N, M=req.jitter.M, delta=req.separation_bound(),
                                    q=req.q, sigma=f.sigma))
        norm = lq_norm(f, req.q, req.quadrature)
    except DomainError as exc:
        report.reason = str(exc)
        return report
    report.bound = bound
    report.norm_upper = norm.upper
    report.certified = True
    return report
