"""Command-line front end.

Exit codes: 0 success (including runs without a shock), 2 configuration or
usage errors, 3 numerical failures, 4 quadrature failures.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from shocklab import __version__
from shocklab.config import describe, parse_config, serialize, with_overrides
from shocklab.errors import ConfigError, ShocklabError
from shocklab.experiments import run_experiment

# flag destination -> config key, per section
FLAG_KEYS = {
    "burgers": {"profile": "profile", "t_max": "t_max", "n_alpha": "n_alpha"},
    "john": {"lam": "lambda", "n_u": "n_u", "U0": "U0", "amplitude": "amplitude"},
    "nullcond": {
        "n_dirs": "n_dirs", "theta_grid": "theta_grid", "lagrangian": "lagrangian",
        "k": "k", "metric": "metric",
    },
    "lifespan": {
        "phi0": "phi0", "phi0_dot": "phi0_dot", "aleph": "aleph", "lam": "lambda",
        "n_dirs": "n_dirs", "n_q": "n_q",
    },
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", "-c", type=Path, help="key = value config file")
    p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )
    p.add_argument("--timing", action="store_true", help="include wall time in the JSON")
    p.add_argument("--show-config", action="store_true", help="print the resolved config and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shocklab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--schema", choices=sorted(FLAG_KEYS), help="print a section's keys and exit")
    sub = parser.add_subparsers(dest="command")

    b = sub.add_parser("burgers", help="characteristic solver for Burgers' equation")
    _common(b)
    b.add_argument("--profile", help="initial datum, name:params or expression in r")
    b.add_argument("--t-max", dest="t_max")
    b.add_argument("--n-alpha", dest="n_alpha")
    b.add_argument("--out", type=Path, help="CSV table (t, alpha, x, jacobian, psi)")
    b.add_argument("--json", type=Path, help="summary JSON (default: stdout)")

    j = sub.add_parser("john", help="spherically symmetric shock-formation solver")
    j.add_argument("action", choices=("solve", "predict", "sweep"))
    _common(j)
    j.add_argument("--lambda", dest="lam", help="comma-separated amplitudes for sweep")
    j.add_argument("--amplitude")
    j.add_argument("--n-u", dest="n_u")
    j.add_argument("--U0")
    j.add_argument("--csv", type=Path, help="per-slice CSV (needs output_every > 0)")
    j.add_argument("--json", type=Path, help="summary JSON (default: stdout)")

    n = sub.add_parser("nullcond", help="null-condition and fluid Lagrangian checks")
    n.add_argument("action", choices=("check", "aleph", "fluid"))
    _common(n)
    n.add_argument("--metric", help="built-in metric family or 'custom'")
    n.add_argument("--n-dirs", dest="n_dirs")
    n.add_argument("--theta-grid", dest="theta_grid")
    n.add_argument("--lagrangian", help="exceptional[:scale], linear, quadratic:a,b")
    n.add_argument("--k")
    n.add_argument("--csv", type=Path, help="aleph sphere map CSV")
    n.add_argument("--json", type=Path, help="summary JSON (default: stdout)")

    s = sub.add_parser("lifespan", help="radiation field and lifespan lower bound")
    _common(s)
    s.add_argument("--phi0")
    s.add_argument("--phi0-dot", dest="phi0_dot")
    s.add_argument("--aleph", help="built-in metric family or [nullcond] file")
    s.add_argument("--lambda", dest="lam", help="comma-separated amplitudes")
    s.add_argument("--n-dirs", dest="n_dirs")
    s.add_argument("--n-q", dest="n_q")
    s.add_argument("--out", type=Path, help="summary JSON (default: stdout)")
    s.add_argument("--csv", type=Path, help="radiation field dump (q, theta1-3, F, d2F)")
    return parser


def _overrides(args: argparse.Namespace, section: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    for dest, key in FLAG_KEYS[section].items():
        value = getattr(args, dest, None)
        if value is not None:
            out[key] = value
    return out


def write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _execute(args: argparse.Namespace) -> int:
    section = args.command
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    cfg = with_overrides(parse_config(text, section), _overrides(args, section))
    if args.show_config:
        sys.stdout.write(serialize(cfg))
        return 0

    action = getattr(args, "action", None)
    dump = section == "lifespan" and args.csv is not None
    summary = run_experiment(cfg, action, dump=dump)
    doc = summary.to_json(include_wall_time=args.timing)

    if section == "burgers":
        if args.out is not None:
            write_csv(args.out, summary.tables["table"])
        _emit(doc, args.json)
    elif section == "lifespan":
        if args.csv is not None:
            write_csv(args.csv, summary.tables["radiation"])
        _emit(doc, args.out)
    else:
        if args.csv is not None:
            rows = summary.tables.get("slices") or summary.tables.get("aleph")
            if rows is None:
                raise ConfigError(f"{section} {action} produces no CSV table")
            write_csv(args.csv, rows)
        _emit(doc, args.json)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(describe(args.schema))
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        return _execute(args)
    except ShocklabError as exc:
        print(f"shocklab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
