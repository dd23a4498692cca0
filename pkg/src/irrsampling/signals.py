"""Bandlimited test signals with exactly known exponential type.

The bank is restricted to closed-form sinc constructions:

* ``SincPower``: ``a * sinc(rho x)^k`` with type ``k pi rho``.
* ``SincCombo``: ``sum_i a_i sinc(x - s_i)`` with type ``pi``.
* ``TensorSignal``: products of one-variable signals, one per axis.

Each one-variable signal carries an envelope ``|f(x)| <= C / (|x| - S)^k``
used to bound the quadrature tail from above, so that norms fed into a
bound certificate never undershoot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .kernel import sinc

__all__ = [
    "NormEstimate",
    "QuadratureSpec",
    "Signal",
    "SincCombo",
    "SincPower",
    "TensorSignal",
    "lq_norm",
    "make_signal",
    "parse_signal",
]

SIGNAL_KINDS = ("sinc_power", "shifted_sinc_combo", "tensor_product")

# int sinc(u)^(2k) du over the real line
_SINC_EVEN_POWER_INTEGRALS = {
    1: Fraction(1),
    2: Fraction(2, 3),
    3: Fraction(11, 20),
    4: Fraction(151, 315),
}


class Signal:
    """Base class; subclasses implement evaluation and norm metadata."""

    d: int = 1
    sigma: tuple[float, ...] = (math.pi,)
    description: str = ""

    def __call__(self, points):
        """Evaluate at a point or an array of points.

        One-variable signals accept scalars, 1-D arrays or ``(m, 1)`` arrays;
        ``d``-variable signals accept a ``(d,)`` point or ``(m, d)`` array.
        """
        pts = np.asarray(points, dtype=float)
        if self.d == 1:
            if pts.ndim >= 2 and pts.shape[-1] == 1:
                pts = pts[..., 0]
            out = self._eval(pts)
        else:
            out = self._eval(pts.reshape(-1, self.d))
            if pts.ndim == 1:
                out = out[0]
        return float(out) if np.ndim(out) == 0 else out

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def in_lq(self, q: float) -> bool:
        raise NotImplementedError

    def exact_norm(self, q: float) -> float | None:
        """Closed-form ``||f||_q`` where one is known (currently ``q = 2``)."""
        return None


class _OneVar(Signal):
    def envelope(self) -> tuple[float, float, float]:
        """``(C, S, k)`` with ``|f(x)| <= C / (|x| - S)^k`` for ``|x| > S``."""
        raise NotImplementedError

    def tail_integral(self, q: float, R: float) -> float:
        """Upper bound on ``int_{|x| > R} |f|^q``."""
        C, S, k = self.envelope()
        if C == 0.0:
            return 0.0
        if k * q <= 1:
            raise DomainError(f"{self.description}: envelope decay |x|^-{k} is not q-integrable for q={q}")
        if R <= S:
            raise DomainError(f"quadrature radius {R} must exceed the envelope offset {S}")
        return 2.0 * C ** q * (R - S) ** (1.0 - k * q) / (k * q - 1.0)


@dataclass(frozen=True, eq=False)
class SincPower(_OneVar):
    k: int
    rate: float
    amplitude: float = 1.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"sinc power must be a positive integer, got {self.k}")
        if self.rate <= 0:
            raise DomainError(f"rate must be positive, got {self.rate}")
        if self.k * self.rate > 1 + 1e-15:
            raise DomainError(
                f"sinc({self.rate} x)^{self.k} has type {self.k * self.rate}*pi > pi; use rate <= 1/{self.k}")

    @property
    def sigma(self) -> tuple[float, ...]:
        return (math.pi * self.k * self.rate,)

    @property
    def description(self) -> str:
        return f"{self.amplitude!r}*sinc({self.rate!r}x)^{self.k}"

    def _eval(self, x):
        return self.amplitude * sinc(self.rate * np.asarray(x, dtype=float)) ** self.k

    def envelope(self):
        return abs(self.amplitude) * (math.pi * self.rate) ** -self.k, 0.0, float(self.k)

    def in_lq(self, q):
        return self.amplitude == 0 or self.k * q > 1

    def exact_norm(self, q):
        if q != 2 or self.k not in _SINC_EVEN_POWER_INTEGRALS:
            return None
        return abs(self.amplitude) * math.sqrt(float(_SINC_EVEN_POWER_INTEGRALS[self.k]) / self.rate)


@dataclass(frozen=True, eq=False)
class SincCombo(_OneVar):
    coeffs: tuple[float, ...]
    shifts: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.shifts):
            raise DomainError("coefficients and shifts must pair up")
        if not all(math.isfinite(v) for v in (*self.coeffs, *self.shifts)):
            raise DomainError("coefficients and shifts must be finite")

    @property
    def description(self) -> str:
        terms = " + ".join(f"{a!r}*sinc(x - {s!r})" for a, s in zip(self.coeffs, self.shifts))
        return terms or "0"

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for a, s in zip(self.coeffs, self.shifts):
            out = out + a * sinc(x - s)
        return out

    def envelope(self):
        C = math.fsum(abs(a) for a in self.coeffs) / math.pi
        S = max((abs(s) for s in self.shifts), default=0.0)
        return C, S, 1.0

    def in_lq(self, q):
        return q > 1 or all(a == 0 for a in self.coeffs)

    def exact_norm(self, q):
        if q != 2:
            return None
        # Gram matrix of shifted sincs: <sinc(.-s), sinc(.-t)> = sinc(s - t)
        a = np.array(self.coeffs, dtype=float)
        s = np.array(self.shifts, dtype=float)
        gram = sinc(s[:, None] - s[None, :]) if s.size else np.zeros((0, 0))
        return math.sqrt(max(0.0, float(a @ gram @ a)))


@dataclass(frozen=True, eq=False)
class TensorSignal(Signal):
    factors: tuple[_OneVar, ...]

    def __post_init__(self):
        if not self.factors:
            raise DomainError("tensor product needs at least one factor")
        if any(not isinstance(f, _OneVar) for f in self.factors):
            raise DomainError("tensor factors must be one-variable signals")

    @property
    def d(self) -> int:
        return len(self.factors)

    @property
    def sigma(self):
        return tuple(f.sigma[0] for f in self.factors)

    @property
    def description(self):
        return " (x) ".join(f"[{f.description}]" for f in self.factors)

    def _eval(self, pts):
        out = np.ones(pts.shape[0])
        for j, f in enumerate(self.factors):
            out = out * f._eval(pts[:, j])
        return out

    def in_lq(self, q):
        return all(f.in_lq(q) for f in self.factors)

    def exact_norm(self, q):
        vals = [f.exact_norm(q) for f in self.factors]
        return None if any(v is None for v in vals) else math.prod(vals)


def _floats(params) -> list[float]:
    if isinstance(params, str):
        return [float(v) for v in params.split(",") if v.strip()]
    return [float(v) for v in params]


def make_signal(kind: str, params=(), q: float | None = None) -> Signal:
    """Build a bank signal.

    Parameters
    ----------
    kind : {"sinc_power", "shifted_sinc_combo", "tensor_product"}
    params
        ``sinc_power``: ``k[, rate[, amplitude]]`` with ``rate`` defaulting
        to ``1/k``. ``shifted_sinc_combo``: flat pairs ``a1, s1, a2, s2, ...``.
        ``tensor_product``: a sequence of one-variable signals.
    q : float, optional
        If given, reject signals that are not in ``L^q``.
    """
    if kind == "sinc_power":
        vals = _floats(params)
        if not vals:
            raise DomainError("sinc_power needs an exponent")
        k = vals[0]
        if int(k) != k:
            raise DomainError(f"sinc power must be an integer, got {k}")
        k = int(k)
        if k < 1:
            raise DomainError(f"sinc power must be a positive integer, got {k}")
        rate = vals[1] if len(vals) > 1 else 1.0 / k
        amp = vals[2] if len(vals) > 2 else 1.0
        sig: Signal = SincPower(k=k, rate=rate, amplitude=amp)
    elif kind == "shifted_sinc_combo":
        vals = _floats(params)
        if len(vals) % 2:
            raise DomainError("shifted_sinc_combo params must be (coefficient, shift) pairs")
        sig = SincCombo(coeffs=tuple(vals[0::2]), shifts=tuple(vals[1::2]))
    elif kind == "tensor_product":
        sig = TensorSignal(factors=tuple(params))
    else:
        raise DomainError(f"unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}")
    if q is not None and not sig.in_lq(q):
        raise DomainError(f"{sig.description} is not in L^{q}")
    return sig


def parse_signal(kind: str, params: str, d: int = 1, q: float | None = None) -> Signal:
    """Signal from config strings.

    For ``tensor_product`` the params are ``|``-separated ``kind:params``
    factors. A one-variable kind with ``d > 1`` is repeated on every axis.
    """
    if kind == "tensor_product":
        factors = []
        for part in params.split("|"):
            fkind, _, fparams = part.partition(":")
            factors.append(make_signal(fkind.strip(), fparams))
        sig = make_signal("tensor_product", factors, q=q)
    else:
        sig = make_signal(kind, params, q=q)
        if d > 1:
            sig = make_signal("tensor_product", [sig] * d, q=q)
    if sig.d != d:
        raise DomainError(f"signal has dimension {sig.d}, expected {d}")
    return sig


@dataclass(frozen=True)
class QuadratureSpec:
    R: float = 2.0 ** 14
    nodes_per_unit: int = 64
    rule: str = "simpson"

    def __post_init__(self):
        if self.rule not in ("simpson", "midpoint"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.R <= 0 or self.nodes_per_unit < 2:
            raise DomainError("quadrature needs R > 0 and at least 2 nodes per unit")


@dataclass(frozen=True)
class NormEstimate:
    """``||f||_q`` from quadrature with an upper estimate safe for certificates."""

    value: float
    upper: float
    integral: float
    quad_error: float
    tail_bound: float
    q: float


def _simpson(y: np.ndarray, h: float) -> float:
    w = np.full(y.size, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return h / 3.0 * float(np.sum(w * y))


def _fine_and_coarse(fn, lo: float, hi: float, n: int, rule: str) -> tuple[float, float]:
    """Composite rule with ``n`` and ``n/2`` panels (``n`` divisible by 4)."""
    h = (hi - lo) / n
    if rule == "midpoint":
        fine = h * float(np.sum(fn(lo + h * (np.arange(n) + 0.5))))
        coarse = 2 * h * float(np.sum(fn(lo + 2 * h * (np.arange(n // 2) + 0.5))))
        return fine, coarse
    # the coarse Simpson nodes are every other fine node
    y = fn(np.linspace(lo, hi, n + 1))
    return _simpson(y, h), _simpson(y[::2], 2 * h)


def _lq_norm_1d(f: _OneVar, q: float, spec: QuadratureSpec) -> NormEstimate:
    tail = f.tail_integral(q, spec.R)
    n = int(round(2 * spec.R * spec.nodes_per_unit))
    n = -(-n // 4) * 4  # even panel counts on both grids

    def integrand(x):
        return np.abs(f._eval(x)) ** q

    fine, coarse = _fine_and_coarse(integrand, -spec.R, spec.R, n, spec.rule)
    err = abs(fine - coarse)
    integral = max(fine, 0.0)
    return NormEstimate(
        value=integral ** (1.0 / q),
        upper=(integral + err + tail) ** (1.0 / q),
        integral=integral,
        quad_error=err,
        tail_bound=tail,
        q=q,
    )


def lq_norm(f: Signal, q: float, spec: QuadratureSpec | None = None) -> NormEstimate:
    """``L^q`` norm by composite quadrature on ``[-R, R]`` plus an envelope tail.

    Tensor products factor exactly, so their norm is the product of the
    per-axis norms (and likewise for the upper estimate).

    Raises
    ------
    DomainError
        If ``q < 1`` or the signal's decay is too slow for ``q`` (for
        instance ``q = 1`` with a plain sinc).
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    spec = spec or QuadratureSpec()
    if isinstance(f, TensorSignal):
        parts = [_lq_norm_1d(g, q, spec) for g in f.factors]
        value = math.prod(p.value for p in parts)
        upper = math.prod(p.upper for p in parts)
        return NormEstimate(
            value=value,
            upper=upper,
            integral=value ** q,
            quad_error=math.fsum(p.quad_error for p in parts),
            tail_bound=math.fsum(p.tail_bound for p in parts),
            q=q,
        )
    if not isinstance(f, _OneVar):
        raise DomainError(f"no quadrature rule for signal type {type(f).__name__}")
    return _lq_norm_1d(f, q, spec)
