"""Monte Carlo power study for the serial tests.

Each cell ``(model, margin, n)`` simulates N series once and applies every
requested score family and pmax to the same series, counting chi-square
p-values below alpha.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .exceptions import InputError, MlcopError
from .scores import get_family
from .simulate import parse_margin, parse_model, replication_seeds, sample_batch
from .stats import test_randomness

__all__ = [
    "PowerStudyConfig",
    "PowerRow",
    "PowerTable",
    "run_power_study",
    "load_config",
    "bundled_config_path",
    "thread_cap",
]

CSV_COLUMNS = ("model", "margin", "n", "family", "pmax", "reject_pct", "se_pct", "rejections", "replications")


@dataclass(frozen=True)
class PowerStudyConfig:
    models: tuple
    margins: tuple
    n_values: tuple = (100, 250, 500)
    replications: int = 1000
    alpha: float = 0.05
    d: int = 5
    families: tuple = ("spearman", "vdw", "savage")
    pmax_values: tuple = (2, 5)
    seed: int = 20221

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(parse_model(m) for m in self.models))
        object.__setattr__(self, "margins", tuple(parse_margin(m) for m in self.margins))
        object.__setattr__(self, "families", tuple(get_family(f) for f in self.families))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "pmax_values", tuple(int(p) for p in self.pmax_values))
        if self.replications < 1:
            raise InputError("replications must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise InputError("alpha must lie in (0, 1)")
        if not self.models or not self.margins or not self.n_values or not self.families:
            raise InputError("power study needs at least one model, margin, n and family")
        for p in self.pmax_values:
            if not 2 <= p <= self.d:
                raise InputError(f"pmax {p} outside [2, d={self.d}]")
        for n in self.n_values:
            if n < max(10, self.d):
                raise InputError(f"series length {n} too short")


@dataclass(frozen=True)
class PowerRow:
    model: str
    margin: str
    n: int
    family: str
    pmax: int
    rejections: int
    replications: int

    @property
    def reject_pct(self):
        return 100.0 * self.rejections / self.replications

    @property
    def se_pct(self):
        rate = self.reject_pct
        return math.sqrt(rate * (100.0 - rate) / self.replications)


@dataclass
class PowerTable:
    rows: list = field(default_factory=list)

    def lookup(self, model, margin, n, family, pmax):
        family = get_family(family).token
        for row in self.rows:
            if (row.model, row.margin, row.n, row.family, row.pmax) == (model, margin, n, family, pmax):
                return row
        raise KeyError((model, margin, n, family, pmax))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow(
                [r.model, r.margin, r.n, r.family, r.pmax, f"{r.reject_pct:.1f}", f"{r.se_pct:.1f}", r.rejections, r.replications]
            )
        return buf.getvalue()


def thread_cap():
    """Worker count from ``MLCOP_THREADS`` (default 1)."""
    raw = os.environ.get("MLCOP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"MLCOP_THREADS must be an integer, got {raw!r}") from None


def _cell_key(model, margin, n):
    return zlib.crc32(f"{model.label}|{margin.token}|{n}".encode())


def _run_cell(args):
    config, model, margin, n = args
    seeds = replication_seeds(config.seed, config.replications, key=(_cell_key(model, margin, n),))
    label = f"{model.label}/{margin.token}/n={n}"
    try:
        series = sample_batch(model, margin, n, seeds)
    except MlcopError as exc:
        raise type(exc)(f"cell {label}: {exc}") from exc
    top = max(config.pmax_values)
    counts = {(f.token, p): 0 for f in config.families for p in config.pmax_values}
    for k, y in enumerate(series):
        for fam in config.families:
            try:
                report = test_randomness(y, config.d, fam, pmax=top)
            except MlcopError as exc:
                raise type(exc)(f"cell {label}, replication {k}, {fam.token}: {exc}") from exc
            for p in config.pmax_values:
                if report.wald_for(p)[2] < config.alpha:
                    counts[(fam.token, p)] += 1
    return [
        PowerRow(model.label, margin.token, n, f.token, p, counts[(f.token, p)], config.replications)
        for f in config.families
        for p in config.pmax_values
    ]


def run_power_study(config, workers=None):
    """Rejection rates for every (model, margin, n, family, pmax) cell.

    Output is independent of ``workers``: each cell owns its seed streams
    and results are collected in grid order.
    """
    workers = thread_cap() if workers is None else max(1, int(workers))
    cells = [(config, m, g, n) for m in config.models for g in config.margins for n in config.n_values]
    if workers == 1 or len(cells) == 1:
        results = [_run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells))
    table = PowerTable()
    for rows in results:
        table.rows.extend(rows)
    return table


def _split(value):
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def bundled_config_path(name="paper_tables_desk.cfg"):
    return resources.files("mlcop").joinpath("data", name)


def load_config(path):
    """Read a ``[study]`` INI file into a :class:`PowerStudyConfig`."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read power-study config {path}: {exc}") from exc
    if "study" not in parser:
        raise InputError(f"config {path} has no [study] section")
    sec = parser["study"]
    known = {"models", "margins", "n", "replications", "alpha", "d", "families", "pmax", "seed"}
    unknown = set(sec) - known
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        kwargs = dict(
            models=_split(sec["models"]),
            margins=_split(sec["margins"]),
            n_values=[int(v) for v in _split(sec.get("n", "100, 250, 500"))],
            replications=sec.getint("replications", 1000),
            alpha=sec.getfloat("alpha", 0.05),
            d=sec.getint("d", 5),
            families=_split(sec.get("families", "spearman, vdw, savage")),
            pmax_values=[int(v) for v in _split(sec.get("pmax", "2, 5"))],
            seed=sec.getint("seed", 20221),
        )
    except (KeyError, ValueError) as exc:
        raise InputError(f"invalid power-study config {path}: {exc}") from exc
    return PowerStudyConfig(**kwargs)

