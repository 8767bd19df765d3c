"""Command-line entry point: ``cvwork run`` and ``cvwork compare``.

Exit codes: 0 on success, 1 on a usage error, 2 when every grid point failed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys

from cvwork.conditioning import MeasurementSpec
from cvwork.errors import DomainError
from cvwork.sweep import (
    DEFAULT_SWEEP,
    QUANTITIES,
    ConfigError,
    OracleSpec,
    SweepAxis,
    SweepConfig,
    compare_report,
    render_comparison,
    render_sweep,
    run_sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

# flag dest -> key accepted in a config file
_KEYS = ("r", "n_th", "n_ch", "eta", "measurement", "sweep", "quantities", "oracle", "out", "no_timestamp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="FILE", help="key=value file; flags override it")
    p.add_argument("--r", type=float, help="squeezing rate (default 4)")
    p.add_argument("--n-th", dest="n_th", type=float, help="preparation occupation (default 3000)")
    p.add_argument("--n-ch", dest="n_ch", type=float, help="channel occupation (default 3000)")
    p.add_argument("--eta", type=float, help="channel transmissivity (default 0.01)")
    p.add_argument("--measurement", help="homx | homp | het | general:<lambda> (default homx)")
    p.add_argument(
        "--sweep",
        help="<param>:<lo>:<hi>:<n>:{lin|log}, or 'none' for a single point "
        f"(default {DEFAULT_SWEEP}); params: r, n_th, n_th_ratio, n_ch, eta, lambda",
    )
    p.add_argument("--quantities", help=f"comma list from {','.join(QUANTITIES)}")
    p.add_argument("--oracle", help="<n_samples>:<seed> adds Monte Carlo columns")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument(
        "--no-timestamp", dest="no_timestamp", action="store_true", default=None,
        help="omit the generated= header line",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvwork", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    _add_common(sub.add_parser("run", help="evaluate quantities over a parameter grid"))
    _add_common(sub.add_parser("compare", help="quoted closed forms vs first principles"))
    return parser


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _KEYS:
            raise UsageError(f"config: {path}:{num}: unknown or malformed entry {line!r}")
        out[key] = val.strip()
    return out


def _float(name: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name}: not a number: {value!r}") from None


def _truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def resolve_config(args: argparse.Namespace, default_quantities=None) -> tuple[SweepConfig, dict]:
    """Merge config file and flags into a SweepConfig plus output options."""
    merged = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    kwargs = {}
    try:
        for key in ("r", "n_th", "n_ch", "eta"):
            if key in merged:
                kwargs[key] = _float(key, merged[key])
        if "measurement" in merged:
            kwargs["measurement"] = MeasurementSpec.parse(str(merged["measurement"]))
        if "sweep" in merged:
            text = str(merged["sweep"]).strip()
            kwargs["sweep"] = None if text.lower() == "none" else SweepAxis.parse(text)
        elif "n_th" in merged:
            # an explicit n_th pins the axis the default sweep would vary
            kwargs["sweep"] = None
        if "quantities" in merged:
            kwargs["quantities"] = tuple(q.strip() for q in str(merged["quantities"]).split(",") if q.strip())
        elif default_quantities is not None:
            kwargs["quantities"] = default_quantities
        if "oracle" in merged and str(merged["oracle"]).lower() != "none":
            kwargs["oracle"] = OracleSpec.parse(str(merged["oracle"]))
        cfg = SweepConfig(**kwargs)
    except (ConfigError, DomainError) as exc:
        raise UsageError(str(exc)) from None
    opts = {"out": merged.get("out"), "no_timestamp": _truthy(merged.get("no_timestamp", False))}
    return cfg, opts


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "run":
            cfg, opts = resolve_config(args)
        else:
            cfg, opts = resolve_config(args, default_quantities=QUANTITIES)
    except UsageError as exc:
        print(f"cvwork {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    stamp = None if opts["no_timestamp"] else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    if args.command == "run":
        rows = run_sweep(cfg)
        _emit(render_sweep(cfg, rows, stamp), opts["out"])
        failed = all(row["status"] != "ok" for row in rows)
    else:
        rows = compare_report(cfg)
        _emit(render_comparison(cfg, rows, stamp), opts["out"])
        failed = all(row.item == "error" for row in rows)
    if failed:
        print(f"cvwork {args.command}: numeric failure at every grid point", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
