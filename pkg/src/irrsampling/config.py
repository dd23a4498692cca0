"""Flat ``key = value`` experiment configuration.

Config files hold one ``key = value`` entry per line; ``#`` starts a
comment. Command-line ``--set key=value`` overrides are applied on top.
Recognized keys::

    d                  dimension (default 1)
    q                  integrability exponent; ``signal.q`` is an alias
    N                  window radii, one value or one per axis
    delta              separation fed to the bound (default 1 - 2 M_j)
    jitter.kind        constant | alternating | uniform
    jitter.M           amplitudes, one value or one per axis
    jitter.seed        unsigned 64-bit seed
    signal.kind        sinc_power | shifted_sinc_combo | tensor_product
    signal.params      comma list (tensor_product: ``kind:params|kind:params``)
    grid               LO:HI:STEP, one for all axes or ``;``-separated per axis
    certify            true | false
    quad.R, quad.nodes_per_unit, quad.rule
    sweep.param        N | M | q
    sweep.values       comma list
    sweep.reconstruct  true | false (also measure errors at every sweep point)
    pp.extent          ppcheck sums over |n_j| <= extent
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError, DomainError
from .reconstruct import GridAxis
from .sampling_set import JitterSpec
from .signals import QuadratureSpec, Signal, parse_signal

__all__ = ["ExperimentConfig", "MODES", "load_config", "parse_entries", "parse_overrides"]

MODES = ("bound", "reconstruct", "sweep", "ppcheck")
SWEEP_PARAMS = ("N", "M", "q")

KNOWN_KEYS = {
    "mode", "d", "q", "N", "delta", "certify",
    "jitter.kind", "jitter.M", "jitter.seed",
    "signal.kind", "signal.params", "signal.q",
    "grid",
    "quad.R", "quad.nodes_per_unit", "quad.rule",
    "sweep.param", "sweep.values", "sweep.reconstruct",
    "pp.extent",
}


def parse_entries(lines: Iterable[str], source: str = "<config>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
        entries[key.strip()] = value.strip()
    return entries


def parse_overrides(items: Iterable[str]) -> dict[str, str]:
    return parse_entries(items, source="--set")


def load_config(path: str | Path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_entries(text.splitlines(), source=str(path))


def _bool(value: str, key: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {value!r}")


def _per_axis(value: str, d: int, key: str, cast=float) -> tuple:
    try:
        vals = [cast(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    if len(vals) == 1:
        vals = vals * d
    if len(vals) != d:
        raise ConfigError(f"{key} has {len(vals)} entries, expected 1 or {d}")
    return tuple(vals)


@dataclass
class ExperimentConfig:
    mode: str
    d: int = 1
    q: float = 2.0
    N: tuple[int, ...] = (16,)
    delta: tuple[float, ...] | None = None
    jitter: JitterSpec = field(default_factory=JitterSpec.zero)
    signal_kind: str = "sinc_power"
    signal_params: str = "1"
    grid: tuple[GridAxis, ...] = (GridAxis(-1.0, 1.0, 0.01),)
    certify: bool = True
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = ()
    sweep_reconstruct: bool = False
    pp_extent: int = 1000
    entries: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, mode: str, entries: Mapping[str, str]) -> "ExperimentConfig":
        """Validate raw entries into a config; raises :class:`ConfigError`."""
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
        unknown = sorted(set(entries) - KNOWN_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        e = dict(entries)
        try:
            d = int(e.get("d", "1"))
            q = float(e.get("signal.q", e.get("q", "2")))
            pp_extent = int(e.get("pp.extent", "1000"))
            quad = QuadratureSpec(
                R=float(e.get("quad.R", 2.0 ** 14)),
                nodes_per_unit=int(e.get("quad.nodes_per_unit", "64")),
                rule=e.get("quad.rule", "simpson"),
            )
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from exc
        if d < 1:
            raise ConfigError(f"d must be >= 1, got {d}")
        if not (q >= 1 and math.isfinite(q)):
            raise ConfigError(f"q must be a finite number >= 1, got {q}")
        if pp_extent < 1:
            raise ConfigError("pp.extent must be >= 1")

        N = _per_axis(e.get("N", "16"), d, "N", int)
        if any(n < 1 for n in N):
            raise ConfigError(f"window radii must be >= 1, got {N}")
        delta = _per_axis(e["delta"], d, "delta") if "delta" in e else None
        jitter = JitterSpec.from_config(e, d=d)

        grid_text = e.get("grid", "-1:1:0.01")
        parts = [p for p in grid_text.split(";") if p.strip()]
        if len(parts) == 1:
            parts = parts * d
        if len(parts) != d:
            raise ConfigError(f"grid has {len(parts)} axes, expected 1 or {d}")
        try:
            grid = tuple(GridAxis.parse(p.strip()) for p in parts)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

        sweep_param = e.get("sweep.param")
        sweep_values: tuple[float, ...] = ()
        if mode == "sweep":
            if sweep_param not in SWEEP_PARAMS:
                raise ConfigError(f"sweep.param must be one of {SWEEP_PARAMS}, got {sweep_param!r}")
            try:
                sweep_values = tuple(float(v) for v in e.get("sweep.values", "").split(",") if v.strip())
            except ValueError as exc:
                raise ConfigError(f"sweep.values: {exc}") from exc
            if not sweep_values:
                raise ConfigError("sweep.values must list at least one value")
            if sweep_param == "N" and any(v != int(v) or v < 1 for v in sweep_values):
                raise ConfigError("sweep over N needs positive integers")

        cfg = cls(
            mode=mode, d=d, q=q, N=N, delta=delta, jitter=jitter,
            signal_kind=e.get("signal.kind", "sinc_power"),
            signal_params=e.get("signal.params", "1"),
            grid=grid,
            certify=_bool(e.get("certify", "true"), "certify"),
            quadrature=quad,
            sweep_param=sweep_param,
            sweep_values=sweep_values,
            sweep_reconstruct=_bool(e.get("sweep.reconstruct", "false"), "sweep.reconstruct"),
            pp_extent=pp_extent,
            entries=e,
        )
        if mode in ("reconstruct", "ppcheck") or cfg.sweep_reconstruct:
            cfg.build_signal()
        return cfg

    def build_signal(self) -> Signal:
        try:
            return parse_signal(self.signal_kind, self.signal_params, d=self.d)
        except (DomainError, ValueError) as exc:
            raise ConfigError(f"signal: {exc}") from exc

    def echo(self) -> dict[str, str]:
        """Config entries as given, for report provenance."""
        return dict(sorted(self.entries.items()))
