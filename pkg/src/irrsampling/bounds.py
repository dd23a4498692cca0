"""Plancherel-Polya constants and the universal truncation error bound.

Every constant built from powers like ``(2N+1)^(2N+1)`` is evaluated in
the log domain. Differences ``a log a - b log b`` of nearly equal huge
terms are rewritten with ``log1p`` so the constants keep full relative
accuracy well past ``N = 10**6``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import DomainError
from .kernel import sinc
from .sampling_set import admissible

__all__ = [
    "BoundBreakdown",
    "BoundInputs",
    "asymptotic_exponent",
    "c1",
    "c2",
    "c3",
    "c4",
    "delta_star",
    "k_bound",
    "k_tilde",
    "lambert_w0_real",
    "log_c1",
    "log_c3",
    "pp_constant_1d",
    "pp_constant_multi",
    "pp_factor",
]

_INV_E = math.exp(-1.0)


def _conjugate(q: float) -> float:
    if not q > 1:
        raise DomainError(f"the truncation bound needs q > 1 (finite conjugate p), got q={q}")
    return q / (q - 1.0)


def _logsumexp(logs: Sequence[float]) -> float:
    top = max(logs)
    if top == -math.inf:
        return top
    return top + math.log(math.fsum(math.exp(v - top) for v in logs))


def _shift_down(a: float, c: float) -> float:
    """``a log a - (a - c) log(a - c)`` for ``a > c >= 0``."""
    if c == 0.0:
        return 0.0
    return c * math.log(a) - (a - c) * math.log1p(-c / a)


def _shift_up(a: float, c: float) -> float:
    """``(a + c) log(a + c) - a log a`` for ``a > 0, c >= 0``."""
    if c == 0.0:
        return 0.0
    return c * math.log(a) + (a + c) * math.log1p(c / a)


# -- Plancherel-Polya -------------------------------------------------------

def pp_constant_1d(r: float, delta: float, sigma: float) -> float:
    """Constant ``B`` in ``sum |f(t_n)|^r <= B ||f||_r^r`` for one variable."""
    if not (r > 0 and delta > 0 and sigma > 0):
        raise DomainError(f"r, delta, sigma must be positive, got {(r, delta, sigma)}")
    return 8.0 * math.expm1(r * delta * sigma / 2.0) / (r * math.pi * sigma * delta * delta)


def pp_constant_multi(r: float, delta: Sequence[float], sigma: Sequence[float]) -> float:
    """Tensor-product Plancherel-Polya constant for ``d`` variables, ``r >= 1``."""
    if r < 1:
        raise DomainError(f"r must be >= 1, got {r}")
    if len(delta) != len(sigma) or not delta:
        raise DomainError("delta and sigma must be non-empty and of equal length")
    if any(v <= 0 for v in (*delta, *sigma)):
        raise DomainError("delta and sigma entries must be positive")
    out = (8.0 / (r * math.pi)) ** len(delta)
    for dl, sg in zip(delta, sigma):
        out *= math.expm1(r * dl * sg / 2.0) / (sg * dl * dl)
    return out


def pp_factor(q: float, delta: float) -> float:
    """``8 (e^(q pi delta / 2) - 1) / (q pi^2 delta^2)``, the one-axis factor at sigma = pi."""
    return pp_constant_1d(q, delta, math.pi)


# -- C1..C4 -----------------------------------------------------------------

def log_c1(N: int, M: float, p: float) -> float:
    if p <= 1:
        raise DomainError(f"C1 needs p > 1, got {p}", "C1")
    if N < 1 or M < 0 or not (1 - M > 0 and 2 * N + 1 - M > 0 and N - M - 0.5 > 0):
        raise DomainError(f"C1 undefined for N={N}, M={M}: needs N >= 1, 0 <= M < 1, N - M - 1/2 > 0", "C1")
    log_inner = math.fsum([
        2 * M * math.log(2.0),
        math.log(M + 0.5),
        (1 - 2 * M) * math.log1p(2 * M),
        -M * math.log1p(-M),
        _shift_down(2 * N + 1.0, M),
        math.log(N - 0.5),
        2 * _shift_up(float(N), M),
        -math.log(N - M - 0.5),
        -math.log(N),
    ])
    return math.log(2.0) + p * log_inner + math.log1p(N / (p - 1.0))


def c1(N: int, M: float, p: float) -> float:
    """Tail constant bounding ``sum_{n outside window} |psi(n, x)|^p``."""
    return math.exp(log_c1(N, M, p))


def log_c3(N: int, M: float) -> float:
    if not 0 <= M < 0.5:
        raise DomainError(f"C3 needs 0 <= M < 1/2, got M={M}", "C3")
    if not N - 1 - 2 * M > 0:
        raise DomainError(f"C3 needs N - 1 - 2M > 0, got N={N}, M={M}", "C3")
    return math.fsum([
        2 * M * math.log(2.0),
        2 * M * math.log1p(-M),
        -math.log(sinc(M)),
        -(2 * M - 1) * math.log1p(2 * M),
        -4 * M * math.log1p(-2 * M),
        2 * _shift_up(N - 1 - 2 * M, M),
        2 * _shift_up(float(N), M),
    ])


def c3(N: int, M: float) -> float:
    """Bound on the kernel at the index nearest to ``x``."""
    return math.exp(log_c3(N, M))


def c2(N: int, M: float, delta: float) -> float:
    """``C3(N, M) (M + 1/2) (1 + M / delta)``."""
    if delta <= 0:
        raise DomainError(f"C2 needs delta > 0, got {delta}", "C2")
    return c3(N, M) * (M + 0.5) * (1.0 + M / delta)


def c4(N: int, p: float) -> float:
    if p <= 1:
        raise DomainError(f"C4 needs p > 1, got {p}", "C4")
    if N < 2:
        raise DomainError(f"C4 needs N >= 2, got {N}", "C4")
    s = 2.0 ** (p - 1) * (2 * p - 1) + p - (N - 0.5) ** (1 - p) - (N - 1.0) ** (1 - p)
    return s / (p - 1)


def asymptotic_exponent(constant: str, M: float = 0.0, p: float = 2.0) -> float:
    """Growth exponent ``a`` in ``C ~ const * N^a`` as ``N -> infinity``."""
    name = constant.upper()
    if name == "C1":
        return 1 + 3 * M * p - p
    if name in ("C2", "C3"):
        return 4 * M
    if name == "C4":
        return 0.0
    raise DomainError(f"unknown constant {constant!r}")


# -- K_delta ----------------------------------------------------------------

@dataclass(frozen=True)
class BoundInputs:
    """Per-axis inputs of the truncation bound.

    ``sigma`` is recorded and checked (``sigma_j <= pi``) but the bound
    itself is always assembled with ``sigma = pi``.
    """

    N: tuple[int, ...]
    M: tuple[float, ...]
    delta: tuple[float, ...]
    q: float
    sigma: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(int(v) for v in self.N))
        object.__setattr__(self, "M", tuple(float(v) for v in self.M))
        object.__setattr__(self, "delta", tuple(float(v) for v in self.delta))
        object.__setattr__(self, "q", float(self.q))
        sigma = self.sigma if self.sigma is not None else (math.pi,) * len(self.N)
        object.__setattr__(self, "sigma", tuple(float(v) for v in sigma))
        if not (len(self.N) == len(self.M) == len(self.delta) == len(self.sigma) >= 1):
            raise DomainError("N, M, delta and sigma must have the same positive length")

    @classmethod
    def uniform(cls, d: int, N: int, M: float, q: float, delta: float | None = None) -> "BoundInputs":
        dl = 1.0 - 2.0 * M if delta is None else delta
        return cls(N=(N,) * d, M=(M,) * d, delta=(dl,) * d, q=q)

    @property
    def d(self) -> int:
        return len(self.N)

    @property
    def p(self) -> float:
        return _conjugate(self.q)


@dataclass(frozen=True)
class BoundBreakdown:
    inputs: BoundInputs
    c1: tuple[float, ...]
    c2: tuple[float, ...]
    c3: tuple[float, ...]
    c4: tuple[float, ...]
    log_a_p: float
    log_b_q: float
    log_c1: tuple[float, ...] = field(default=())
    log_c3: tuple[float, ...] = field(default=())

    @property
    def a_p(self) -> float:
        return math.exp(self.log_a_p)

    @property
    def b_q(self) -> float:
        return math.exp(self.log_b_q)

    @property
    def log_k_delta(self) -> float:
        return self.log_a_p + self.log_b_q

    @property
    def k_delta(self) -> float:
        return math.exp(self.log_k_delta)

    def to_json(self) -> dict:
        inp = asdict(self.inputs)
        inp["p"] = self.inputs.p
        return {
            "inputs": inp,
            "c1": list(self.c1),
            "c2": list(self.c2),
            "c3": list(self.c3),
            "c4": list(self.c4),
            "a_p": self.a_p,
            "b_q": self.b_q,
            "k_delta": self.k_delta,
            "log_a_p": self.log_a_p,
            "log_b_q": self.log_b_q,
            "log_k_delta": self.log_k_delta,
        }


def _log_a_p(N: Sequence[int], M: Sequence[float], delta: Sequence[float], p: float):
    """Per-axis constants and ``log A_p``; ``A_p^p`` is the sum over ``k`` of
    ``C1_k`` times the product over ``j != k`` of ``C1_j + C3_j^p + C4_j C2_j^p``."""
    d = len(N)
    lc1 = [log_c1(n, m, p) for n, m in zip(N, M)]
    lc3 = [log_c3(n, m) for n, m in zip(N, M)]
    k4 = [c4(n, p) for n in N]
    lc2 = [l3 + math.log(m + 0.5) + math.log1p(m / dl) for l3, m, dl in zip(lc3, M, delta)]
    log_inner = [
        _logsumexp([lc1[j], p * lc3[j], math.log(k4[j]) + p * lc2[j]]) for j in range(d)
    ]
    terms = [lc1[k] + math.fsum(log_inner[j] for j in range(d) if j != k) for k in range(d)]
    log_a_pp = _logsumexp(terms)
    return lc1, lc3, lc2, k4, log_a_pp / p


def k_bound(inputs: BoundInputs) -> BoundBreakdown:
    """Universal bound ``K`` with ``sup_x |f(x) - Y(f; x)| <= K ||f||_q``.

    Raises
    ------
    DomainError
        If ``q <= 1``, the jitter violates the expansion condition, a
        separation is below ``1 - 2 M_j``, a ``sigma_j`` exceeds ``pi``, or
        one of C1..C4 is outside its domain (``err.constant`` names it).
    """
    p = inputs.p
    q = inputs.q
    if not admissible(max(inputs.M), q, inputs.d, "expansion"):
        raise DomainError(f"jitter bound {max(inputs.M)} is not admissible for q={q} (needs M < 1/(4q))")
    for m, dl in zip(inputs.M, inputs.delta):
        if not dl > 0 or dl < 1.0 - 2.0 * m - 1e-15:
            raise DomainError(f"separation {dl} must be positive and >= 1 - 2M = {1 - 2 * m}")
    if any(s > math.pi or s <= 0 for s in inputs.sigma):
        raise DomainError(f"exponential types must lie in (0, pi], got {inputs.sigma}")

    lc1, lc3, lc2, k4, log_a = _log_a_p(inputs.N, inputs.M, inputs.delta, p)
    log_b = math.fsum([
        inputs.d / q * math.log(8.0 / (q * math.pi ** 2)),
        *(math.log(math.expm1(q * math.pi * dl / 2.0)) / q - 2.0 * math.log(dl) / q for dl in inputs.delta),
    ])
    return BoundBreakdown(
        inputs=inputs,
        c1=tuple(math.exp(v) for v in lc1),
        c2=tuple(math.exp(v) for v in lc2),
        c3=tuple(math.exp(v) for v in lc3),
        c4=tuple(k4),
        log_a_p=log_a,
        log_b_q=log_b,
        log_c1=tuple(lc1),
        log_c3=tuple(lc3),
    )


def k_tilde(N: Sequence[int], M_tilde: float, delta_lo: float, delta_hi: float, q: float) -> float:
    """Coarse bound using only ``max M_j`` and the extreme separations.

    Dominates :func:`k_bound` for any per-axis inputs with ``M_j <= M_tilde``
    and ``delta_lo <= delta_j <= delta_hi``.
    """
    p = _conjugate(q)
    d = len(N)
    if not 0 < delta_lo <= delta_hi:
        raise DomainError(f"need 0 < delta_lo <= delta_hi, got {(delta_lo, delta_hi)}")
    if not admissible(M_tilde, q, d, "expansion"):
        raise DomainError(f"jitter bound {M_tilde} is not admissible for q={q}")
    *_, log_a = _log_a_p(tuple(N), (M_tilde,) * d, (delta_lo,) * d, p)
    top = max(pp_factor(q, delta_lo), pp_factor(q, delta_hi))
    return math.exp(log_a + d / q * math.log(top))


# -- Lambert W and the separation minimizer -----------------------------------

def lambert_w0_real(y: float, tol: float = 1e-15, max_iter: int = 50) -> float:
    """Principal real branch of Lambert W (``w >= -1``) by Halley iteration."""
    y = float(y)
    if math.isnan(y) or y < -_INV_E:
        # -1/e is not exactly representable; allow rounding slack at the branch point
        if y >= -_INV_E * (1 + 4e-16):
            return -1.0
        raise DomainError(f"Lambert W0 is real only for y >= -1/e, got {y}")
    if y == 0.0:
        return 0.0
    if math.isinf(y):
        return math.inf

    if y < -0.25:
        s = math.sqrt(max(0.0, 2.0 * (math.e * y + 1.0)))
        w = -1.0 + s - s * s / 3.0 + 11.0 / 72.0 * s ** 3
    elif y < 3.0:
        w = math.log1p(y)
    else:
        l1 = math.log(y)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1

    for _ in range(max_iter):
        if w == -1.0:
            break
        ew = math.exp(w)
        f = w * ew - y
        wp1 = w + 1.0
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= tol * (1.0 + abs(w)):
            break
    return w


def delta_star(q: float) -> float:
    """Separation minimizing ``(e^(q pi delta / 2) - 1) / delta^2``.

    Setting the derivative to zero gives ``(2 - z) e^z = 2`` with
    ``z = q pi delta / 2``; its nonzero root is ``W0(-2/e^2) + 2``.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    z = lambert_w0_real(-2.0 * math.exp(-2.0)) + 2.0
    return 2.0 * z / (q * math.pi)
