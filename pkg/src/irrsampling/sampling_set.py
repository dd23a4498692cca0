"""Jittered sampling lattices ``t_n = n + h_n`` with window-local jitter.

A node set is attached to an evaluation point ``x`` and per-axis radii
``N``: indices inside the window ``{n : |x_j - n_j| <= N_j for all j}``
carry jitter, every other index sits exactly on the integer lattice.
Nodes are tensor-product points, ``t_n = (t_{n_1}, ..., t_{n_d})`` where
each coordinate depends only on its own axis index.

Jitter values are produced lazily from ``(seed, axis, index)`` so nothing
outside the window is ever stored.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "JITTER_KINDS",
    "JitterSpec",
    "NodeSet",
    "WindowSpec",
    "admissible",
    "axis_window",
    "build_nodes",
    "nearest_index",
    "separation",
    "window_index_set",
]

JITTER_KINDS = ("constant", "alternating", "uniform")

_U64_MAX = 2**64 - 1


def _unit_uniform(seed: int, axis: int, n: int) -> float:
    """Portable uniform draw in [0, 1) keyed by ``(seed, axis, n)``.

    BLAKE2b over the little-endian packing of the key; the top 53 bits of
    the 64-bit digest give the mantissa. Stable across platforms and
    Python versions.
    """
    key = struct.pack("<QqQ", seed, n, axis)
    word = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return (word >> 11) * 2.0**-53


@dataclass(frozen=True)
class JitterSpec:
    """Per-axis jitter bounds ``M_j`` plus a rule producing ``h_{n_j}``.

    Parameters
    ----------
    M : sequence of float
        Nonnegative per-axis amplitudes; the length fixes the dimension.
    kind : {"constant", "alternating", "uniform"}
        ``constant`` gives ``h_n = +M``, ``alternating`` gives
        ``h_n = (-1)^n M`` and ``uniform`` draws ``h_n`` from ``[-M, M)``.
    seed : int
        Unsigned 64-bit seed, only used by ``uniform``.
    """

    M: tuple[float, ...]
    kind: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        amps = tuple(float(m) for m in np.atleast_1d(self.M))
        if not amps:
            raise DomainError("jitter needs at least one axis")
        if any(not math.isfinite(m) or m < 0 for m in amps):
            raise DomainError(f"jitter amplitudes must be finite and >= 0, got {amps}")
        if self.kind not in JITTER_KINDS:
            raise DomainError(f"unknown jitter kind {self.kind!r}; expected one of {JITTER_KINDS}")
        if not 0 <= int(self.seed) <= _U64_MAX:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        object.__setattr__(self, "M", amps)
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def zero(cls, d: int = 1) -> "JitterSpec":
        return cls(M=(0.0,) * d, kind="constant")

    @property
    def d(self) -> int:
        return len(self.M)

    @property
    def max_amplitude(self) -> float:
        """``max_j M_j``."""
        return max(self.M)

    def offset(self, axis: int, n: int) -> float:
        """Jitter ``h_n`` on ``axis`` for a single integer index."""
        m = self.M[axis]
        if m == 0.0:
            return 0.0
        if self.kind == "constant":
            return m
        if self.kind == "alternating":
            return -m if n % 2 else m
        return m * (2.0 * _unit_uniform(self.seed, axis, int(n)) - 1.0)

    def offsets(self, axis: int, indices: Iterable[int]) -> np.ndarray:
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
        m = self.M[axis]
        if m == 0.0:
            return np.zeros(idx.shape)
        if self.kind == "constant":
            return np.full(idx.shape, m)
        if self.kind == "alternating":
            return np.where(idx % 2 == 0, m, -m)
        return np.array([self.offset(axis, int(n)) for n in idx], dtype=float)

    def to_config(self) -> dict[str, str]:
        return {
            "jitter.kind": self.kind,
            "jitter.M": ",".join(repr(m) for m in self.M),
            "jitter.seed": str(self.seed),
        }

    @classmethod
    def from_config(cls, entries: Mapping[str, str], d: int | None = None) -> "JitterSpec":
        """Parse ``jitter.kind``, ``jitter.M`` and ``jitter.seed`` entries.

        A single amplitude is broadcast to ``d`` axes when ``d`` is given.
        """
        try:
            kind = entries.get("jitter.kind", "uniform").strip()
            amps = [float(v) for v in str(entries.get("jitter.M", "0")).split(",") if v.strip()]
            seed = int(entries.get("jitter.seed", "0"))
        except ValueError as exc:
            raise ConfigError(f"bad jitter entry: {exc}") from exc
        if d is not None:
            if len(amps) == 1:
                amps = amps * d
            elif len(amps) != d:
                raise ConfigError(f"jitter.M has {len(amps)} entries, expected 1 or {d}")
        try:
            return cls(M=tuple(amps), kind=kind, seed=seed)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc


def nearest_index(x: float) -> int:
    """Integer ``j`` with ``j - 1/2 <= x < j + 1/2`` (ties round up)."""
    k = math.floor(x)
    # x - floor(x) is exact in binary floating point
    return k + 1 if x - k >= 0.5 else k


def axis_window(x: float, N: int) -> range:
    """Integers ``n`` with ``|x - n| <= N`` (closed at both ends)."""
    if N < 1:
        raise DomainError(f"window radius must be >= 1, got {N}")
    # N is an integer, so shifting ceil/floor is exact where x - N would round
    return range(math.ceil(x) - N, math.floor(x) + N + 1)


def window_index_set(x: Sequence[float], N: Sequence[int]) -> list[tuple[int, ...]]:
    """All multi-indices in the window around ``x``, lexicographically ordered."""
    if len(x) != len(N):
        raise DomainError("x and N must have the same length")
    return list(itertools.product(*(axis_window(float(xj), int(nj)) for xj, nj in zip(x, N))))


@dataclass(frozen=True)
class WindowSpec:
    radii: tuple[int, ...]
    center: tuple[float, ...]

    def __post_init__(self):
        if len(self.radii) != len(self.center):
            raise DomainError("radii and center must have the same length")
        if any(int(n) < 1 for n in self.radii):
            raise DomainError(f"window radii must be >= 1, got {self.radii}")

    def axis(self, j: int) -> range:
        return axis_window(self.center[j], self.radii[j])

    def indices(self) -> list[tuple[int, ...]]:
        return window_index_set(self.center, self.radii)

    def __len__(self) -> int:
        return math.prod(len(self.axis(j)) for j in range(len(self.radii)))


@dataclass(frozen=True)
class NodeSet:
    """Sampling nodes for one evaluation point; see :func:`build_nodes`."""

    jitter: JitterSpec
    window: WindowSpec
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def d(self) -> int:
        return self.jitter.d

    @property
    def center(self) -> tuple[float, ...]:
        return self.window.center

    @property
    def radii(self) -> tuple[int, ...]:
        return self.window.radii

    def axis_indices(self, axis: int) -> np.ndarray:
        r = self.window.axis(axis)
        return np.arange(r.start, r.stop, dtype=np.int64)

    def axis_nodes(self, axis: int) -> np.ndarray:
        """Jittered nodes ``t_n`` for the window indices on ``axis``."""
        if axis not in self._cache:
            idx = self.axis_indices(axis)
            self._cache[axis] = idx + self.jitter.offsets(axis, idx)
        return self._cache[axis]

    def in_window(self, axis: int, n: int) -> bool:
        return n in self.window.axis(axis)

    def node(self, axis: int, n: int) -> float:
        """``t_n`` on one axis; equals ``n`` outside the window."""
        if self.in_window(axis, n):
            return n + self.jitter.offset(axis, n)
        return float(n)

    def point(self, index: Sequence[int]) -> tuple[float, ...]:
        return tuple(self.node(j, int(n)) for j, n in enumerate(index))

    def points(self, indices: Iterable[Sequence[int]]) -> np.ndarray:
        return np.array([self.point(n) for n in indices], dtype=float).reshape(-1, self.d)


def build_nodes(x: Sequence[float], N: Sequence[int], jitter: JitterSpec) -> NodeSet:
    """Node set with jitter inside the window around ``x`` and none outside.

    Raises
    ------
    DomainError
        If any ``M_j >= 1/2`` (adjacent nodes could touch) or the
        dimensions of ``x``, ``N`` and ``jitter`` disagree.
    """
    x = tuple(float(v) for v in np.atleast_1d(x))
    N = tuple(int(v) for v in np.atleast_1d(N))
    if not (len(x) == len(N) == jitter.d):
        raise DomainError(f"dimension mismatch: x has {len(x)}, N has {len(N)}, jitter has {jitter.d}")
    if any(m >= 0.5 for m in jitter.M):
        raise DomainError(f"jitter amplitudes must be < 1/2 for positive separation, got {jitter.M}")
    return NodeSet(jitter=jitter, window=WindowSpec(radii=N, center=x))


def separation(ns: NodeSet) -> np.ndarray:
    """Per-axis infimum gap between distinct nodes.

    With ``|h_n| < 1/2`` the nodes are increasing in ``n``, so the infimum
    is attained between neighbours; beyond the window the gap is exactly 1.
    """
    gaps = []
    for axis in range(ns.d):
        idx = ns.axis_indices(axis)
        t = np.concatenate(([idx[0] - 1.0], ns.axis_nodes(axis), [idx[-1] + 1.0]))
        gaps.append(min(1.0, float(np.min(np.diff(t)))))
    return np.array(gaps)


def admissible(M_tilde: float, q: float, d: int = 1, mode: str = "expansion") -> bool:
    """Whether the jitter bound satisfies the sampling hypotheses.

    ``mode="expansion"`` is the condition under which the irregular
    sampling series converges (``M <= 1/4`` at ``q = 1``, ``M < 1/(4q)``
    otherwise). ``mode="convergence"`` is the stronger condition that
    makes the truncation bound vanish as the window grows.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if M_tilde < 0:
        return False
    if mode == "expansion":
        return M_tilde <= 0.25 if q == 1 else M_tilde < 1.0 / (4.0 * q)
    if mode == "convergence":
        if q == 1 and d == 1:
            return M_tilde <= 0.25
        return M_tilde < min(1.0 / (4.0 * q), 1.0 / ((4.0 * d - 1.0) * q))
    raise DomainError(f"unknown admissibility mode {mode!r}")
