"""Command-line entry point: ``mlcop test``, ``mlcop power``, ``mlcop are``.

Exit codes: 0 success, 2 input error, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import dist, power, simulate, stats
from .exceptions import DegenerateDataError, InputError, MlcopError
from .scores import get_family

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv_matrix(path):
    """Read a numeric CSV; a first row with any non-numeric cell is a header.

    Returns ``(header or None, n x d float array)``.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise InputError(f"{path} contains no data")
    header = None
    if not all(_is_number(c.strip()) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise InputError(f"{path} has a header but no data rows")
    width = len(rows[0]) if header is None else len(header)
    values = []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        if len(row) != width:
            raise InputError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
        try:
            parsed = [float(c.strip()) for c in row]
        except ValueError:
            raise InputError(f"{path}: row {lineno} has a non-numeric field") from None
        if any(math.isnan(v) for v in parsed):
            raise InputError(f"{path}: row {lineno} contains NaN")
        values.append(parsed)
    return header, np.array(values, dtype=float)


def _cmd_test(args):
    _, x = read_csv_matrix(args.file)
    families = [f.strip() for f in args.score.split(",") if f.strip()]
    if args.serial:
        if x.shape[1] != 1:
            raise InputError(f"serial mode expects a single column, got {x.shape[1]}")
        if len(families) != 1:
            raise InputError("serial mode takes a single score family")
        y = x[:, 0]
        d = args.d if args.d is not None else min(5, y.size)
        report = stats.test_randomness(y, d, families[0], args.pmax)
        perm_data = y
    else:
        if args.d is not None and args.d != x.shape[1]:
            raise InputError(f"--d {args.d} does not match the {x.shape[1]} data columns")
        report = stats.test_independence(x, families, args.pmax)
        perm_data = x
    out = report.to_dict()
    if args.dependogram:
        out["dependogram"] = {
            "alpha": args.alpha,
            "method": "sidak" if args.sidak else "bonferroni",
            "points": [p._asdict() for p in stats.dependogram(report, args.alpha, sidak=args.sidak)],
        }
    if args.perm:
        pval = stats.permutation_pvalue(
            perm_data,
            args.perm,
            args.seed,
            serial=args.serial,
            d=report.d,
            families=families if not args.serial else families[0],
            pmax=report.pmax,
        )
        out["permutation"] = {"B": args.perm, "seed": args.seed, "pvalue": pval}
    out["reject"] = bool(report.pvalue_chi2 < args.alpha)
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _resolve_config(name):
    if os.path.exists(name):
        return name
    bundled = power.bundled_config_path(os.path.basename(name))
    if bundled.is_file():
        return str(bundled)
    raise InputError(f"config file {name!r} not found")


def _tokens(value):
    return [t.strip() for t in value.split(",") if t.strip()]


def _ints(value):
    return [int(t) for t in _tokens(value)]


# flag name -> (PowerStudyConfig field, converter for string flags)
_POWER_FLAGS = {
    "models": ("models", _tokens),
    "margins": ("margins", _tokens),
    "n": ("n_values", _ints),
    "families": ("families", _tokens),
    "pmax": ("pmax_values", _ints),
    "replications": ("replications", None),
    "alpha": ("alpha", None),
    "d": ("d", None),
    "seed": ("seed", None),
}


def _cmd_power(args):
    overrides = {}
    for flag, (attr, conv) in _POWER_FLAGS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        try:
            overrides[attr] = conv(value) if conv else value
        except ValueError as exc:
            raise InputError(f"invalid --{flag}: {exc}") from exc
    if args.config:
        base = power.load_config(_resolve_config(args.config))
        config = dataclasses.replace(base, **overrides) if overrides else base
    else:
        if "models" not in overrides or "margins" not in overrides:
            raise InputError("give --config or both --models and --margins")
        config = power.PowerStudyConfig(**overrides)
    table = power.run_power_study(config, workers=args.workers)
    sys.stdout.write(table.to_csv())
    return EXIT_OK


def _parse_theoretical_margin(token):
    text = token.strip().lower()
    if text in ("continuous", "uniform", "normal"):
        return dist.TheoreticalMargin.continuous()
    if text.startswith("bernoulli"):
        _, _, spec = text.partition(":")
        p = 0.5
        if spec:
            key, _, val = spec.partition("=")
            try:
                if key.strip() != "p":
                    raise ValueError(key)
                p = float(val)
            except ValueError:
                raise InputError(f"cannot parse margin {token!r}") from None
        if not 0.0 < p < 1.0:
            raise InputError("Bernoulli p must lie in (0, 1)")
        return dist.TheoreticalMargin.bernoulli(p)
    return simulate.parse_margin(text).theoretical()


def _cmd_are(args):
    margin = _parse_theoretical_margin(args.margin)
    k, g = get_family(args.k), get_family(args.g)
    out = {
        "k": k.token,
        "g": g.token,
        "margin": args.margin,
        "card": args.card,
        "are": dist.are(k, g, margin, args.card),
        "cov": dist.local_power_mean(k, margin, g),
        "var_k": dist.local_power_mean(k, margin, k),
        "var_g": dist.local_power_mean(g, margin, g),
    }
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="mlcop", description="Multilinear-copula tests of independence and randomness.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="test a CSV file; prints a JSON report")
    t.add_argument("file")
    mode = t.add_mutually_exclusive_group()
    mode.add_argument("--serial", action="store_true", help="test randomness of a single-column series")
    mode.add_argument("--nonserial", dest="serial", action="store_false", help="test independence of the columns (default)")
    t.add_argument("--d", type=int, default=None, help="serial embedding dimension (default min(5, n))")
    t.add_argument("--pmax", type=int, default=None, help="largest subset size (default d)")
    t.add_argument("--score", default="spearman", help="spearman, vdw, savage or blest; comma list per column")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--perm", type=int, default=0, metavar="B", help="add a permutation p-value with B draws")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--dependogram", action="store_true", help="include per-subset critical values")
    t.add_argument("--sidak", action="store_true", help="Sidak instead of Bonferroni dependogram lines")
    t.set_defaults(func=_cmd_test)

    p = sub.add_parser("power", help="Monte Carlo power study; prints CSV")
    p.add_argument("--config", help="INI file, or the bundled paper_tables_desk.cfg")
    p.add_argument("--models", help="comma list, e.g. indep,tent,clayton:tau=0.1")
    p.add_argument("--margins", help="comma list of f1..f7")
    p.add_argument("--n", help="comma list of series lengths")
    p.add_argument("--replications", "-N", type=int)
    p.add_argument("--families")
    p.add_argument("--pmax")
    p.add_argument("--alpha", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=None, help="processes (default MLCOP_THREADS or 1)")
    p.set_defaults(func=_cmd_power)

    a = sub.add_parser("are", help="asymptotic relative efficiency of two score families")
    a.add_argument("--k", required=True)
    a.add_argument("--g", required=True)
    a.add_argument("--margin", default="continuous", help="continuous, bernoulli:p=0.3, or f1..f7")
    a.add_argument("--card", type=int, default=2)
    a.set_defaults(func=_cmd_are)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "test" and args.perm and args.perm < 99:
            raise InputError("--perm needs at least 99 permutations")
        return args.func(args)
    except DegenerateDataError as exc:
        print(f"mlcop: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, MlcopError) as exc:
        print(f"mlcop: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
