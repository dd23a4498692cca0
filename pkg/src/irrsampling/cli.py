"""Command-line entry point: ``irrsampling {bound,reconstruct,sweep,ppcheck}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ExperimentConfig, load_config, parse_overrides
from .errors import ConfigError
from .harness import EXIT_OK, error_document, run


class _Parser(argparse.ArgumentParser):
    """Usage errors become config errors so they share exit code 1."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _attach_values(argv: list[str]) -> list[str]:
    # grid ranges such as -1:1:0.1 look like options to argparse
    out = []
    it = iter(argv)
    for arg in it:
        if arg == "--grid":
            nxt = next(it, None)
            out.append("--grid" if nxt is None else f"--grid={nxt}")
        else:
            out.append(arg)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key=value config file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    common.add_argument("--seed", metavar="U64", type=int, help="jitter seed, overrides jitter.seed")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], dest="overrides",
                        help="override a config entry (repeatable)")
    common.add_argument("--grid", metavar="LO:HI:STEP", action="append", default=[],
                        help="evaluation grid, once per axis (or once for all axes)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(
        prog="irrsampling",
        description="Irregular sampling reconstruction with universal truncation error bounds.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("bound", parents=[common], help="emit the bound breakdown as JSON")
    sub.add_parser("reconstruct", parents=[common], help="measure truncation error on a grid")
    sub.add_parser("sweep", parents=[common], help="one summary row per sweep value")
    sub.add_parser("ppcheck", parents=[common], help="empirical Plancherel-Polya ratio")
    return parser


def _entries(args) -> dict[str, str]:
    entries = load_config(args.config) if args.config else {}
    entries.update(parse_overrides(args.overrides))
    if args.seed is not None:
        entries["jitter.seed"] = str(args.seed)
    if args.grid:
        entries["grid"] = ";".join(args.grid)
    return entries


def main(argv: list[str] | None = None) -> int:
    argv = _attach_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = ExperimentConfig.from_entries(args.mode, _entries(args))
        code, paths, result = run(cfg, args.out)
    except Exception as exc:  # noqa: BLE001 - unmapped types are re-raised by error_document
        code, payload = error_document(exc)
        print(json.dumps(payload), file=sys.stderr)
        return code
    summary = {"exit_code": code, "artifacts": {k: str(v) for k, v in paths.items()}}
    print(json.dumps(summary))
    if code != EXIT_OK:
        print(json.dumps({"error": "violation", "message": "certified inequality violated",
                          "exit_code": code}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
