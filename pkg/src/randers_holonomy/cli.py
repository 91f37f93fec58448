"""Command-line entry point: ``randers-holonomy {curvature,algebra,holonomy,verify-all}``.

Exit code 0 means every gating check passed. A failed check gives 1, while a
configuration or domain error gives 2. An optional flat ``key = value`` file
(``--config``) overrides the defaults, and explicit flags override the file.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import suites
from .model import DomainError
from .report import dumps

log = logging.getLogger("randers_holonomy")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

COMMANDS = {
    "curvature": suites.cmd_curvature,
    "algebra": suites.cmd_algebra,
    "holonomy": suites.cmd_holonomy,
    "verify-all": suites.cmd_verify_all,
}

_FIELDS = {f.name: f for f in dataclasses.fields(suites.RunConfig)}


def _coerce(key: str, raw: str):
    if key not in _FIELDS:
        raise suites.ConfigError(f"unknown config key {key!r}")
    default = _FIELDS[key].default
    try:
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise suites.ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw.strip()


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise suites.ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="randers-holonomy", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--model", choices=["shen", "klein", "flat"])
    p.add_argument("--a1", type=float)
    p.add_argument("--epsilon", type=int, choices=[1, -1])
    p.add_argument("--n-max", type=int, help="largest n in the span-rank table")
    p.add_argument("--fourier-order", type=int, help="truncation order for algebra generation")
    p.add_argument("--steps", type=int, help="RK4 steps per path segment")
    p.add_argument("--samples", type=int, help="indicatrix samples for holonomy maps")
    p.add_argument("--tol", type=float, help="multiplier applied to every gating tolerance")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="directory for the JSON report and CSV plot data")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of the summary table")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def make_config(args: argparse.Namespace) -> suites.RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in _FIELDS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return suites.RunConfig(**values).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        report = COMMANDS[args.command](cfg)
    except (suites.ConfigError, DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for s in report.get("suites", [report]):
        for w in s.get("warnings", []):
            log.warning(w)
    suites.write_report(cfg, args.command.replace("-", "_"), report)
    if args.json:
        print(dumps(report))
    else:
        print(suites.formula_matrix(report))
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
