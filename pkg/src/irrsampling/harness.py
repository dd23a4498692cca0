"""Experiment runner: bound breakdowns, reconstructions, sweeps, PP checks.

Exit-code contract: 0 success, 1 config error, 2 domain or precondition
error, 3 a certified inequality was violated.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from .bounds import BoundInputs, k_bound, pp_constant_multi
from .config import ExperimentConfig
from .errors import ConfigError, DomainError, IrrSamplingError
from .reconstruct import ErrorReport, ReconstructionRequest, measure_error
from .sampling_set import JitterSpec, build_nodes, separation
from .signals import QuadratureSpec, Signal, TensorSignal, lq_norm

__all__ = [
    "EXIT_CONFIG",
    "EXIT_DOMAIN",
    "EXIT_OK",
    "EXIT_VIOLATION",
    "PPCheckResult",
    "SCHEMA_VERSION",
    "emit_report",
    "pp_check",
    "run",
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2
EXIT_VIOLATION = 3

SCHEMA_VERSION = 1
_PP_BLOCK = 1 << 20  # grid points evaluated per block in pp_check
TIMESTAMP_KEY = "generated_at"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _clean(obj: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _document(kind: str, config: dict, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        TIMESTAMP_KEY: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "result": _clean(result),
    }


def _write_json(doc: dict, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_report(report: ErrorReport | dict, fmt: str, path: str | Path,
                kind: str = "reconstruct", config: dict | None = None) -> Path:
    """Write a report as CSV (``ErrorReport`` only) or a versioned JSON document.

    CSV columns are ``x1..xd, f, Y, residual``, one row per grid point, with
    17 significant digits.
    """
    path = Path(path)
    if fmt == "csv":
        if not isinstance(report, ErrorReport):
            raise TypeError("CSV output needs an ErrorReport")
        d = report.points.shape[1] if report.points.ndim == 2 else 1
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow([f"x{j + 1}" for j in range(d)] + ["f", "Y", "residual"])
                for pt, fv, yv, rv in zip(report.points, report.f_values, report.y_values, report.residuals):
                    w.writerow([_fmt(v) for v in pt] + [_fmt(fv), _fmt(yv), _fmt(rv)])
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        return path
    if fmt == "json":
        result = report.summary() if isinstance(report, ErrorReport) else report
        return _write_json(_document(kind, config or {}, result), path)
    raise ValueError(f"unknown report format {fmt!r}")


@dataclass(frozen=True)
class PPCheckResult:
    sample_sum: float
    pp_constant: float
    norm_upper: float
    separation: tuple[float, ...]
    extent: int
    q_exponent: float = 2.0

    @property
    def ratio(self) -> float:
        """``sum |f(t_n)|^q / (B ||f||_q^q)``; at most 1 when the inequality holds."""
        return self.sample_sum / (self.pp_constant * self.norm_upper ** self.q_exponent)

    def to_json(self) -> dict:
        return {
            "sample_sum": self.sample_sum,
            "pp_constant": self.pp_constant,
            "norm_upper": self.norm_upper,
            "separation": list(self.separation),
            "extent": self.extent,
            "q": self.q_exponent,
            "ratio": self.ratio,
            "violated": self.ratio > 1.0,
        }


def pp_check(signal: Signal, q: float, jitter: JitterSpec, extent: int = 1000,
             quadrature: QuadratureSpec | None = None) -> PPCheckResult:
    """Empirical Plancherel-Polya ratio over the jittered nodes with ``|n_j| <= extent``.

    All nodes in the box carry jitter; the separation used in the constant
    is the realized one.
    """
    d = signal.d
    ns = build_nodes((0.0,) * d, (extent,) * d, jitter)
    delta = tuple(float(v) for v in separation(ns))
    axes = [ns.axis_nodes(j) for j in range(d)]
    if d == 1:
        total = float(np.sum(np.abs(signal(axes[0])) ** q))
    elif isinstance(signal, TensorSignal):
        # the node set is a Cartesian product, so tensor values are outer
        # products of per-axis values; sum the grid one leading node at a time
        vals = [np.abs(g(a)) ** q for g, a in zip(signal.factors, axes)]
        rest = vals[1]
        for v in vals[2:]:
            rest = np.multiply.outer(rest, v)
        total = math.fsum(float(np.sum(v0 * rest)) for v0 in vals[0])
    else:
        # blocks of leading-axis nodes keep memory bounded; block sums are
        # pairwise (numpy), the few block totals are combined exactly
        rest = np.stack([m.ravel() for m in np.meshgrid(*axes[1:], indexing="ij")], axis=-1)
        rows = max(1, _PP_BLOCK // rest.shape[0])
        partial = []
        for start in range(0, axes[0].size, rows):
            lead = axes[0][start:start + rows]
            pts = np.column_stack([np.repeat(lead, rest.shape[0]), np.tile(rest, (lead.size, 1))])
            partial.append(float(np.sum(np.abs(signal(pts)) ** q)))
        total = math.fsum(partial)
    const = pp_constant_multi(q, delta, signal.sigma)
    norm = lq_norm(signal, q, quadrature)
    return PPCheckResult(sample_sum=total, pp_constant=const, norm_upper=norm.upper,
                         separation=delta, extent=extent, q_exponent=q)


def _bound_inputs(cfg: ExperimentConfig, N=None, M=None, q=None) -> BoundInputs:
    N = cfg.N if N is None else N
    Ms = cfg.jitter.M if M is None else M
    q = cfg.q if q is None else q
    delta = cfg.delta if cfg.delta is not None else tuple(1.0 - 2.0 * m for m in Ms)
    return BoundInputs(N=N, M=Ms, delta=delta, q=q)


def _bound_or_raise(inputs: BoundInputs):
    if inputs.q == 1:
        raise DomainError("bound not available for q=1 (the bound needs a finite conjugate exponent p)")
    return k_bound(inputs)


def _run_bound(cfg: ExperimentConfig, out: Path):
    bd = _bound_or_raise(_bound_inputs(cfg))
    doc = bd.to_json()
    path = emit_report(doc, "json", out / "bound.json", kind="bound", config=cfg.echo())
    return EXIT_OK, {"bound.json": path}, doc


def _request(cfg: ExperimentConfig, signal: Signal, N=None, jitter=None, q=None) -> ReconstructionRequest:
    return ReconstructionRequest.on_grid(
        signal, cfg.N if N is None else N, cfg.jitter if jitter is None else jitter, cfg.grid,
        q=cfg.q if q is None else q, certify=cfg.certify, quadrature=cfg.quadrature, delta=cfg.delta,
    )


def _run_reconstruct(cfg: ExperimentConfig, out: Path):
    report = measure_error(_request(cfg, cfg.build_signal()))
    report.config = {**report.config, "entries": cfg.echo()}
    paths = {
        "reconstruct.csv": emit_report(report, "csv", out / "reconstruct.csv"),
        "reconstruct.json": emit_report(report, "json", out / "reconstruct.json",
                                        kind="reconstruct", config=cfg.echo()),
    }
    code = EXIT_VIOLATION if report.violated else EXIT_OK
    return code, paths, report.summary()


def _run_sweep(cfg: ExperimentConfig, out: Path):
    signal = cfg.build_signal() if cfg.sweep_reconstruct else None
    rows = []
    violated = False
    for value in cfg.sweep_values:
        N, jitter, q = cfg.N, cfg.jitter, cfg.q
        if cfg.sweep_param == "N":
            N = (int(value),) * cfg.d
        elif cfg.sweep_param == "M":
            jitter = replace(cfg.jitter, M=(float(value),) * cfg.d)
        else:
            q = float(value)
        row: dict[str, Any] = {"param": cfg.sweep_param, "value": value}
        try:
            bd = _bound_or_raise(_bound_inputs(cfg, N=N, M=jitter.M, q=q))
            row.update(k_delta=bd.k_delta, log_k_delta=bd.log_k_delta, a_p=bd.a_p, b_q=bd.b_q, reason=None)
        except DomainError as exc:
            row.update(k_delta=None, log_k_delta=None, a_p=None, b_q=None, reason=str(exc))
        if signal is not None:
            rep = measure_error(_request(cfg, signal, N=N, jitter=jitter, q=q))
            row.update(sup_error=rep.sup_error, certified_bound=rep.certified_bound, tightness=rep.tightness)
            violated |= rep.violated
        rows.append(row)
        log.info("sweep %s=%s k_delta=%s", cfg.sweep_param, value, row["k_delta"])

    cols = ["param", "value", "k_delta", "log_k_delta", "a_p", "b_q"]
    if signal is not None:
        cols += ["sup_error", "certified_bound", "tightness"]
    csv_path = out / "sweep.csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        with csv_path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow(["" if r.get(c) is None else (r[c] if c == "param" else _fmt(r[c])) for c in cols])
    except OSError as exc:
        raise OSError(f"cannot write {csv_path}: {exc}") from exc
    result = {"rows": rows, "violated": violated}
    paths = {"sweep.csv": csv_path,
             "sweep.json": emit_report(result, "json", out / "sweep.json", kind="sweep", config=cfg.echo())}
    return (EXIT_VIOLATION if violated else EXIT_OK), paths, result


def _run_ppcheck(cfg: ExperimentConfig, out: Path):
    res = pp_check(cfg.build_signal(), cfg.q, cfg.jitter, cfg.pp_extent, cfg.quadrature)
    doc = res.to_json()
    path = emit_report(doc, "json", out / "ppcheck.json", kind="ppcheck", config=cfg.echo())
    return (EXIT_VIOLATION if doc["violated"] else EXIT_OK), {"ppcheck.json": path}, doc


_RUNNERS = {
    "bound": _run_bound,
    "reconstruct": _run_reconstruct,
    "sweep": _run_sweep,
    "ppcheck": _run_ppcheck,
}


def run(config: ExperimentConfig, out_dir: str | Path = ".") -> tuple[int, dict[str, Path], dict]:
    """Execute one experiment and write its artifacts under ``out_dir``.

    Returns ``(exit_code, artifact_paths, result)``. Domain errors raised
    by the library propagate; the CLI turns them into exit code 2.
    """
    return _RUNNERS[config.mode](config, Path(out_dir))


def error_document(exc: BaseException) -> tuple[int, dict]:
    """Exit code and machine-readable error payload for an exception."""
    if isinstance(exc, ConfigError):
        code, kind = EXIT_CONFIG, "config"
    elif isinstance(exc, DomainError):
        code, kind = EXIT_DOMAIN, "domain"
    elif isinstance(exc, OSError):
        code, kind = EXIT_CONFIG, "io"
    elif isinstance(exc, IrrSamplingError):
        code, kind = EXIT_DOMAIN, "domain"
    else:
        raise exc
    payload = {"error": kind, "message": str(exc), "exit_code": code}
    constant = getattr(exc, "constant", None)
    if constant:
        payload["constant"] = constant
    return code, payload
