"""Subset statistics, standardized coefficients and their combinations.

For score columns ``c_j`` (tie-aware scores minus their mean) and an index
set A, the subset statistic is the row average of ``prod_{j in A} c_j``.
Dividing by ``prod_{j in A} sqrt(s2_j)`` gives a coefficient ``r_A`` with
``sqrt(n) r_A`` asymptotically standard normal and independent across A
under the null, so ``n * sum r_A**2`` is asymptotically chi-square.

Non-serial tests use one column per variable.  Serial tests score the
series once and use circular lags ``Y_t, Y_{t-1}, ..., Y_{t+1-d}`` as the
columns, restricted to sets containing the first lag.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from .dist import chi2_sf, normal_quantile
from .empirical import build_margin, build_serial_frame, score_column
from .exceptions import DegenerateDataError, InputError
from .scores import get_family, quantile
from .subsets import mask_elements, subset_family, subset_label

__all__ = [
    "gamma_stat",
    "standardized",
    "wald_statistic",
    "fisher_combination",
    "FisherResult",
    "TestReport",
    "test_independence",
    "test_randomness",
    "dependogram",
    "DependogramPoint",
    "mobius_process_eval",
    "gamma_via_integral",
    "permutation_pvalue",
    "lag_columns",
]

_FISHER_FLOOR = 1e-300


def _centered(col):
    return np.asarray(getattr(col, "centered", col), dtype=float)


def gamma_stat(columns, mask):
    """Row mean of the product of centered scores over the columns in ``mask``.

    ``columns`` holds :class:`ScoredColumn` objects (or centered arrays)
    aligned by row; element j of the subset selects ``columns[j - 1]``.
    """
    elems = mask_elements(mask)
    if len(elems) < 2:
        raise InputError("subset statistics need |A| >= 2")
    if elems[-1] > len(columns):
        raise InputError(f"subset {subset_label(mask)} exceeds {len(columns)} columns")
    arrays = [_centered(columns[j - 1]) for j in elems]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise InputError("score columns have different lengths")
    prod = arrays[0].copy()
    for a in arrays[1:]:
        prod *= a
    return float(prod.mean())


def standardized(gamma, s2_per_column, mask):
    """Divide ``gamma`` by the product of score standard deviations over A."""
    scale = 1.0
    for j in mask_elements(mask):
        s2 = s2_per_column[j - 1]
        if not s2 > 0.0:
            raise DegenerateDataError(f"column {j} has zero score variance (constant data)", column=j)
        scale *= math.sqrt(s2)
    return gamma / scale


def wald_statistic(rs, n):
    """``(n * sum(r**2), len(rs))``."""
    rs = np.asarray(rs, dtype=float)
    if rs.size == 0:
        raise InputError("no subset coefficients to combine")
    return float(n * np.dot(rs, rs)), int(rs.size)


class FisherResult(NamedTuple):
    statistic: float
    pvalue: float
    df: int
    clamped: bool


def fisher_combination(rs, n):
    """Combine two-sided normal p-values of ``sqrt(n) |r_A|`` by Fisher's method.

    Per-subset p-values that underflow are floored at 1e-300 and the
    result is flagged ``clamped``.
    """
    rs = np.asarray(rs, dtype=float)
    if rs.size == 0:
        raise InputError("no subset coefficients to combine")
    z = math.sqrt(n) * np.abs(rs)
    # 2 - 2 Phi(z) == erfc(z / sqrt 2), without cancellation
    p = erfc(z / math.sqrt(2.0))
    clamped = bool(np.any(p < _FISHER_FLOOR))
    p = np.maximum(p, _FISHER_FLOOR)
    stat = float(-2.0 * np.sum(np.log(p)))
    df = 2 * int(rs.size)
    return FisherResult(stat, chi2_sf(max(stat, 0.0), df), df, clamped)


@dataclass(frozen=True, eq=False)
class TestReport:
    """Outcome of an independence or randomness test."""

    __test__ = False

    serial: bool
    n: int
    d: int
    pmax: int
    families: tuple
    subsets: tuple
    gamma: np.ndarray
    r: np.ndarray
    s2_per_column: tuple
    wald: float
    df: int
    pvalue_chi2: float
    fisher: FisherResult
    extras: dict = field(default_factory=dict)

    @property
    def sqrt_n_r(self):
        return math.sqrt(self.n) * self.r

    def wald_for(self, pmax):
        """Wald statistic, df and p-value over the subsets with ``|A| <= pmax``."""
        keep = np.array([m.bit_count() <= pmax for m in self.subsets])
        if not keep.any():
            raise InputError(f"no subsets with |A| <= {pmax}")
        stat, df = wald_statistic(self.r[keep], self.n)
        return stat, df, chi2_sf(stat, df)

    def to_dict(self):
        out = {
            "serial": self.serial,
            "n": self.n,
            "d": self.d,
            "pmax": self.pmax,
            "family": list(self.families),
            "subsets": [
                {
                    "lags_or_cols": mask_elements(m),
                    "gamma": float(g),
                    "r": float(r),
                    "sqrt_n_r": float(z),
                }
                for m, g, r, z in zip(self.subsets, self.gamma, self.r, self.sqrt_n_r)
            ],
            "wald": {"stat": self.wald, "df": self.df, "pvalue": self.pvalue_chi2},
            "fisher": {
                "stat": self.fisher.statistic,
                "df": self.fisher.df,
                "pvalue": self.fisher.pvalue,
            },
        }
        if self.fisher.clamped:
            out["fisher"]["clamped"] = True
        out.update(self.extras)
        return out

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _report(columns, s2, fams, serial, d, pmax, n):
    family = subset_family(d, pmax, serial=serial)
    gammas = np.array([gamma_stat(columns, m) for m in family])
    rs = np.array([standardized(g, s2, m) for g, m in zip(gammas, family)])
    wald, df = wald_statistic(rs, n)
    return TestReport(
        serial=serial,
        n=n,
        d=d,
        pmax=family.pmax,
        families=tuple(f.token for f in fams),
        subsets=family.subsets,
        gamma=gammas,
        r=rs,
        s2_per_column=tuple(s2),
        wald=wald,
        df=df,
        pvalue_chi2=chi2_sf(wald, df),
        fisher=fisher_combination(rs, n),
    )


def _check_degenerate(s2):
    for j, v in enumerate(s2, start=1):
        if not v > 0.0:
            raise DegenerateDataError(f"column {j} is constant; its score variance is zero", column=j)


def _resolve_families(families, d):
    if isinstance(families, (list, tuple)):
        fams = [get_family(f) for f in families]
        if len(fams) == 1:
            fams *= d
    else:
        fams = [get_family(families)] * d
    if len(fams) != d:
        raise InputError(f"got {len(fams)} score families for {d} columns")
    return fams


def _as_matrix(data):
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise InputError("data must be an n x d matrix")
    if np.isnan(x).any():
        raise InputError("data contains NaN")
    return x


def test_independence(data, families="spearman", pmax=None):
    """Test mutual independence of the columns of an ``n x d`` data matrix.

    Parameters
    ----------
    data : array_like, shape (n, d)
    families : str, ScoreFamily or sequence of d of them
    pmax : int, optional
        Largest subset size; defaults to ``d``.

    Returns
    -------
    TestReport
    """
    x = _as_matrix(data)
    n, d = x.shape
    if n < 2:
        raise InputError("need at least 2 observations")
    fams = _resolve_families(families, d)
    cols = [score_column(build_margin(x[:, j]), fams[j]) for j in range(d)]
    s2 = [c.s2 for c in cols]
    _check_degenerate(s2)
    return _report(cols, s2, fams, False, d, d if pmax is None else pmax, n)


test_independence.__test__ = False


def lag_columns(scored, frame):
    """Centered scores of each lag column of a serial frame."""
    c = _centered(scored)
    return [c[frame.rows[:, j]] for j in range(frame.d)]


def test_randomness(series, d, family="spearman", pmax=None):
    """Test serial independence of a stationary series with lag embedding ``d``."""
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise InputError("series must be one-dimensional")
    if np.isnan(y).any():
        raise InputError("series contains NaN")
    n = y.size
    frame = build_serial_frame(n, d)
    fam = get_family(family)
    scored = score_column(build_margin(y), fam)
    _check_degenerate([scored.s2])
    s2 = [scored.s2] * d
    cols = lag_columns(scored, frame)
    return _report(cols, s2, [fam], True, d, d if pmax is None else pmax, n)


test_randomness.__test__ = False


class DependogramPoint(NamedTuple):
    label: str
    sqrt_n_r: float
    critical: float
    exceeds: bool


def dependogram(report, alpha=0.05, sidak=False):
    """Per-subset ``sqrt(n) r_A`` against a two-sided simultaneous critical value.

    Bonferroni by default: ``z = Phi^{-1}(1 - alpha / (2 m))``; ``sidak=True``
    uses the exact level for m independent normals.
    """
    if not 0.0 < alpha < 1.0:
        raise InputError("alpha must lie in (0, 1)")
    m = len(report.subsets)
    if sidak:
        per = 1.0 - (1.0 - alpha) ** (1.0 / m)
    else:
        per = alpha / m
    crit = normal_quantile(1.0 - per / 2.0)
    return [
        DependogramPoint(subset_label(mask), float(z), crit, bool(abs(z) > crit))
        for mask, z in zip(report.subsets, report.sqrt_n_r)
    ]


def _bounds_columns(margins, frame):
    if frame is None:
        return [(m.lower, m.upper) for m in margins]
    m = margins[0] if isinstance(margins, (list, tuple)) else margins
    return [(m.lower[frame.rows[:, j]], m.upper[frame.rows[:, j]]) for j in range(frame.d)]


def mobius_process_eval(margins, mask, u, frame=None):
    """Row mean of ``prod_{j in A} (J_j(u_j) - u_j)``, the scaled Mobius process at ``u``.

    ``margins`` is one empirical margin per column, or a single margin with
    ``frame`` for the serial case.  ``u`` has one coordinate per column.
    """
    cols = _bounds_columns(margins, frame)
    u = np.asarray(u, dtype=float)
    prod = None
    for j in mask_elements(mask):
        a, b = cols[j - 1]
        uj = u[j - 1]
        term = np.clip((uj - a) / (b - a), 0.0, 1.0) - uj
        prod = term if prod is None else prod * term
    return float(np.mean(prod))


def _stieltjes_grid(family, grid_size):
    s = 0.5 * (1.0 - np.cos(np.pi * np.linspace(0.0, 1.0, grid_size + 1)))
    if not family.bounded:
        s = np.clip(s, 1e-12, 1.0 - 1e-12)
    return s, np.diff(np.asarray(quantile(family, s), dtype=float))


def _integrated_deviation(a, b, family, grid_size):
    """``int (J(u) - u) dq(u)`` for each jump interval ``(a, b]``."""
    u, dq = _stieltjes_grid(family, grid_size)
    a = np.asarray(a)[:, None]
    b = np.asarray(b)[:, None]
    dev = np.clip((u[None, :] - a) / (b - a), 0.0, 1.0) - u[None, :]
    avg = 0.5 * (dev[:, 1:] + dev[:, :-1])
    return avg @ dq


def gamma_via_integral(margins, mask, families, grid_size=2000, frame=None):
    """Subset statistic computed by integrating the Mobius process against the scores.

    Each observation's factor is ``-int (J(u) - u) dq(u)``, evaluated by a
    Stieltjes sum on a grid clustered at 0 and 1.  Unbounded families are
    truncated to ``[1e-12, 1 - 1e-12]``.  Independent of :func:`score_at`.
    """
    if grid_size < 100:
        raise InputError("grid_size must be at least 100")
    cols = _bounds_columns(margins, frame)
    d = len(cols)
    fams = _resolve_families(families, d)
    prod = None
    for j in mask_elements(mask):
        a, b = cols[j - 1]
        pairs, inverse = np.unique(np.column_stack([a, b]), axis=0, return_inverse=True)
        factor = -_integrated_deviation(pairs[:, 0], pairs[:, 1], fams[j - 1], grid_size)
        term = factor[inverse.ravel()]
        prod = term if prod is None else prod * term
    return float(np.mean(prod))


def _wald_from_columns(cols, s2, subsets, n):
    total = 0.0
    for mask in subsets:
        r = standardized(gamma_stat(cols, mask), s2, mask)
        total += r * r
    return n * total


def permutation_pvalue(data, B=999, seed=None, *, serial=False, d=None, families="spearman", pmax=None):
    """Monte Carlo p-value of the Wald statistic under random permutation.

    Non-serial data has each column permuted independently; a serial
    series is permuted as a whole.  Returns ``(1 + #{W_b >= W}) / (B + 1)``.
    """
    if B < 99:
        raise InputError("use at least 99 permutations")
    rng = np.random.default_rng(seed)
    if serial:
        if d is None:
            raise InputError("serial permutation test needs the embedding dimension d")
        report = test_randomness(data, d, families, pmax)
        scored = score_column(build_margin(np.asarray(data, dtype=float)), get_family(families))
        frame = build_serial_frame(report.n, d)
        base = scored.centered

        def draw():
            return lag_columns(rng.permutation(base), frame)

    else:
        report = test_independence(data, families, pmax)
        x = _as_matrix(data)
        fams = _resolve_families(families, x.shape[1])
        base = [score_column(build_margin(x[:, j]), fams[j]).centered for j in range(x.shape[1])]

        def draw():
            return [rng.permutation(c) for c in base]

    s2 = list(report.s2_per_column)
    observed = report.wald
    tol = 1e-12 * max(1.0, abs(observed))
    count = 0
    for _ in range(B):
        if _wald_from_columns(draw(), s2, report.subsets, report.n) >= observed - tol:
            count += 1
    return (1 + count) / (B + 1)
