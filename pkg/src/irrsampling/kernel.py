"""Window canonical product sampling kernel.

For a window ``J`` around ``x`` with jittered nodes ``t_j`` (``j`` in ``J``)
and integer nodes elsewhere, the canonical product is

    G(t) = sin(pi t) * prod_{j in J} (t - t_j) / (t - j)

and the Lagrange-type kernel is ``psi(n, x) = G(x) / (G'(tau_n) (x - tau_n))``
with ``tau_n = t_n`` inside the window and ``tau_n = n`` outside. Writing
``k`` for the integer nearest to ``x`` and ``h_n = tau_n - n`` this is

    psi(n, x) = (-1)^(n+k) sinc(x - k) / sinc(h_n)
                * [(x - t_k)(tau_n - k) / ((x - n)(tau_n - t_k))]   (n != k only)
                * prod_{j in J, j != n, k} (x - t_j)(tau_n - j) / ((x - j)(tau_n - t_j))

which has no removable singularity left: ``sin(pi x)`` is only ever paired
with its nearest integer, and every remaining ``x - j`` is at least 1/2 in
magnitude. Products are accumulated as a sign and a sum of logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CoincidentNodesError, DomainError
from .sampling_set import NodeSet, nearest_index

__all__ = [
    "KernelEval",
    "NODE_TOL",
    "kernel_1d",
    "kernel_inside",
    "kernel_outside",
    "kernel_tensor",
    "kernel_window_vector",
    "sinc",
    "sinpi",
]

# |x - t_n| below NODE_TOL * (1 + |x|) is treated as evaluation at the node
NODE_TOL = 1e-9
ZERO_TOL = 1e-14


def sinpi(t):
    """``sin(pi t)`` with exact argument reduction; zero at every integer."""
    t = np.asarray(t, dtype=float)
    k = np.rint(t)
    half = 0.5 * k
    # (-1)^k from the parity of k: half - floor(half) is 0 or 1/2
    out = np.sin(np.pi * (t - k)) * (1.0 - 4.0 * (half - np.floor(half)))
    return float(out) if out.ndim == 0 else out


def sinc(t):
    """Normalized sinc, ``sin(pi t) / (pi t)`` and 1 at the origin."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t == 0.0, 1.0, t)
    out = np.where(t == 0.0, 1.0, sinpi(safe) / (np.pi * safe))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelEval:
    """A kernel value stored as ``sign * exp(log_abs)``."""

    sign: int
    log_abs: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    @classmethod
    def zero(cls) -> "KernelEval":
        return cls(0, -math.inf)

    @classmethod
    def one(cls) -> "KernelEval":
        return cls(1, 0.0)

    def __mul__(self, other: "KernelEval") -> "KernelEval":
        if self.sign == 0 or other.sign == 0:
            return KernelEval.zero()
        return KernelEval(self.sign * other.sign, self.log_abs + other.log_abs)

    def __float__(self) -> float:
        return self.value


def _log_product(factors: np.ndarray) -> tuple[int, float]:
    if factors.size == 0:
        return 1, 0.0
    mags = np.abs(factors)
    if np.any(mags < ZERO_TOL):
        return 0, -math.inf
    sign = -1 if np.count_nonzero(factors < 0) % 2 else 1
    return sign, math.fsum(np.log(mags))


def kernel_1d(n: int, x: float, window: np.ndarray, nodes: np.ndarray) -> KernelEval:
    """One-axis kernel ``psi(n, x)`` for an arbitrary integer ``n``.

    Parameters
    ----------
    n : int
        Sample index, inside or outside the window.
    x : float
        Evaluation point.
    window : ndarray of int
        Window indices ``J`` (consecutive, increasing).
    nodes : ndarray of float
        Jittered nodes ``t_j`` for ``j`` in ``window``.
    """
    n = int(n)
    x = float(x)
    lo = int(window[0])
    inside = lo <= n <= int(window[-1])
    tau = float(nodes[n - lo]) if inside else float(n)

    hit = np.flatnonzero(np.abs(x - nodes) < NODE_TOL * (1.0 + abs(x)))
    if hit.size:
        return KernelEval.one() if inside and int(window[hit[0]]) == n else KernelEval.zero()

    k = nearest_index(x)
    if not lo <= k <= int(window[-1]):
        raise DomainError(f"window {lo}..{int(window[-1])} does not contain the nearest index {k} of x={x}")
    t_k = float(nodes[k - lo])
    h = tau - n

    keep = (window != n) & (window != k)
    j = window[keep].astype(float)
    tj = nodes[keep]
    den_nodes = tau - tj
    if np.any(den_nodes == 0.0) or (n != k and tau == t_k):
        raise CoincidentNodesError(f"node for index {n} coincides with another window node")
    factors = (x - tj) * (tau - j) / ((x - j) * den_nodes)
    if n != k:
        factors = np.append(factors, (x - t_k) * (tau - k) / ((x - n) * (tau - t_k)))

    sign, log_abs = _log_product(factors)
    if sign == 0:
        return KernelEval.zero()
    # sinc(x - k) > 0 since |x - k| <= 1/2, sinc(h) > 0 since |h| < 1/2
    log_abs += math.log(sinc(x - k)) - math.log(sinc(h))
    if (n + k) % 2:
        sign = -sign
    return KernelEval(sign, log_abs)


def _axis_data(ns: NodeSet, axis: int) -> tuple[np.ndarray, np.ndarray]:
    return ns.axis_indices(axis), ns.axis_nodes(axis)


def _check_n(ns: NodeSet, N: int | None, axis: int = 0) -> None:
    if N is not None and int(N) != ns.radii[axis]:
        raise DomainError(f"radius {N} does not match the node set radius {ns.radii[axis]}")


def kernel_inside(n: int, x: float, ns: NodeSet, N: int | None = None, axis: int = 0) -> KernelEval:
    """Kernel for an index inside the window (one axis of ``ns``)."""
    _check_n(ns, N, axis)
    window, nodes = _axis_data(ns, axis)
    if not window[0] <= n <= window[-1]:
        raise DomainError(f"index {n} is outside the window {window[0]}..{window[-1]}")
    return kernel_1d(n, x, window, nodes)


def kernel_outside(n: int, x: float, ns: NodeSet, N: int | None = None, axis: int = 0) -> KernelEval:
    """Kernel for an index outside the window, where ``t_n = n``."""
    _check_n(ns, N, axis)
    window, nodes = _axis_data(ns, axis)
    if window[0] <= n <= window[-1]:
        raise DomainError(f"index {n} is inside the window {window[0]}..{window[-1]}")
    return kernel_1d(n, x, window, nodes)


def kernel_tensor(n: Sequence[int], x: Sequence[float], ns: NodeSet,
                  N: Sequence[int] | None = None) -> KernelEval:
    """Product over axes of the one-axis kernels."""
    if len(n) != ns.d or len(x) != ns.d:
        raise DomainError("multi-index and point must match the node set dimension")
    if N is not None and tuple(int(v) for v in N) != ns.radii:
        raise DomainError(f"radii {tuple(N)} do not match the node set radii {ns.radii}")
    out = KernelEval.one()
    for axis in range(ns.d):
        window, nodes = _axis_data(ns, axis)
        out = out * kernel_1d(int(n[axis]), float(x[axis]), window, nodes)
        if out.sign == 0:
            break
    return out


def kernel_window_vector(x: float, window: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """``psi(n, x)`` for every ``n`` in the window, as linear-domain values.

    Vectorized counterpart of :func:`kernel_1d` used by the reconstruction
    sum; the two agree to rounding.
    """
    x = float(x)
    hit = np.flatnonzero(np.abs(x - nodes) < NODE_TOL * (1.0 + abs(x)))
    out = np.zeros(window.size)
    if hit.size:
        out[hit[0]] = 1.0
        return out

    lo = int(window[0])
    k = nearest_index(x)
    ik = k - lo
    if not 0 <= ik < window.size:
        raise DomainError(f"window does not contain the nearest index {k} of x={x}")
    t_k = nodes[ik]
    jf = window.astype(float)

    tau = nodes[:, None]
    den = tau - nodes[None, :]
    np.fill_diagonal(den, 1.0)
    if np.any(den == 0.0):
        raise CoincidentNodesError("coincident nodes inside the window")
    # column k and the diagonal may divide by zero; both are overwritten
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (x - nodes)[None, :] * (tau - jf[None, :]) / ((x - jf)[None, :] * den)
        extra = (x - t_k) * (nodes - k) / ((x - jf) * (nodes - t_k))
    np.fill_diagonal(ratio, 1.0)
    ratio[:, ik] = 1.0
    extra[ik] = 1.0
    ratio = np.concatenate([ratio, extra[:, None]], axis=1)

    mags = np.abs(ratio)
    zero_rows = np.any(mags < ZERO_TOL, axis=1)
    neg = np.count_nonzero(ratio < 0, axis=1)
    logs = np.sum(np.log(np.where(zero_rows[:, None], 1.0, mags)), axis=1)
    h = nodes - jf
    logs += math.log(sinc(x - k)) - np.log(sinc(h))
    parity = (neg + (window - k)) % 2
    vals = np.where(parity == 1, -1.0, 1.0) * np.exp(logs)
    vals[zero_rows] = 0.0
    return vals
