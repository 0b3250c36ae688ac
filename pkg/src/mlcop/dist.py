"""Distribution utilities and population-level calculators.

Includes the normal and chi-square helpers used for p-values, the
covariance kernel of the multilinear copula process, exact population
limits of the subset statistics for finite joint laws, and the
local-power / asymptotic relative efficiency calculators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .exceptions import DegenerateDataError, DomainError, InputError, NumericalError
from .scores import get_family, quantile, score_at
from .subsets import mask_elements

__all__ = [
    "normal_cdf",
    "normal_quantile",
    "chi2_sf",
    "TheoreticalMargin",
    "DiscreteJoint",
    "gamma_kernel",
    "population_gamma",
    "consistency_check",
    "local_power_mean",
    "are",
    "variance_via_kernel",
    "recommend_score",
]


def normal_cdf(x):
    out = special.ndtr(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def normal_quantile(p):
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("normal_quantile requires p in (0, 1)")
    out = special.ndtri(p)
    return float(out) if out.ndim == 0 else out


def chi2_sf(x, df):
    """Upper tail ``P(X > x)`` of a chi-square with ``df`` degrees of freedom."""
    if df < 1:
        raise DomainError(f"chi-square degrees of freedom must be >= 1, got {df}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise DomainError("chi2_sf requires x >= 0")
    out = special.gammaincc(0.5 * df, 0.5 * x)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# margins and joint laws

_TAIL_EPS = 1e-14


@dataclass(frozen=True, eq=False)
class TheoreticalMargin:
    """A univariate law given by its atoms and its generalized inverse.

    Each atom is a value with the probability interval ``(F(x-), F(x)]`` it
    occupies.  Probability outside the atoms is the continuous part; on it
    the generalized inverse is strictly increasing.
    """

    kind: str
    atom_values: np.ndarray
    atom_lo: np.ndarray
    atom_hi: np.ndarray
    quantile_fn: object = field(repr=False)
    name: str = ""

    def __post_init__(self):
        lo, hi = self.atom_lo, self.atom_hi
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise InputError("atom intervals must have positive width")
        if lo.size and (lo[0] < 0.0 or hi[-1] > 1.0 + 1e-12 or np.any(lo[1:] < hi[:-1] - 1e-15)):
            raise InputError("atom intervals must be sorted, disjoint and inside [0, 1]")

    @property
    def jumps(self):
        return self.atom_hi - self.atom_lo

    def quantile(self, u):
        return self.quantile_fn(np.asarray(u, dtype=float))

    def sample(self, size, rng):
        return self.quantile(rng.random(size))

    def continuous_intervals(self, min_width=1e-15):
        """Sub-intervals of (0, 1) not covered by atoms."""
        edges = np.concatenate([[0.0], np.column_stack([self.atom_lo, self.atom_hi]).ravel(), [1.0]])
        starts, stops = edges[0::2], edges[1::2]
        keep = stops - starts > min_width
        return list(zip(starts[keep].tolist(), stops[keep].tolist()))

    # constructors

    @classmethod
    def continuous(cls, quantile_fn=special.ndtri, name="continuous"):
        empty = np.empty(0)
        return cls("continuous", empty, empty, empty, quantile_fn, name)

    @classmethod
    def discrete(cls, values, probs, name="discrete"):
        values = np.asarray(values, dtype=float)
        probs = np.asarray(probs, dtype=float)
        order = np.argsort(values)
        values, probs = values[order], probs[order]
        if np.any(probs <= 0.0) or abs(probs.sum() - 1.0) > 1e-12:
            raise InputError("discrete probabilities must be positive and sum to 1")
        hi = np.cumsum(probs)
        hi[-1] = 1.0
        lo = np.concatenate([[0.0], hi[:-1]])

        def qf(u):
            idx = np.searchsorted(hi, u, side="left")
            return values[np.minimum(idx, values.size - 1)]

        return cls("finite-discrete", values, lo, hi, qf, name)

    @classmethod
    def bernoulli(cls, p):
        return cls.discrete([0.0, 1.0], [1.0 - p, p], name=f"bernoulli(p={p:g})")

    @classmethod
    def from_cdf(cls, cdf, quantile_fn, support, kind="mixed", name=""):
        """Build from a cdf and generalized inverse; ``support`` lists candidate atom locations.

        Points whose jump is below 1e-300 are dropped, so truncated infinite
        supports leave a negligible continuous remainder.  Atoms starting
        within 1e-14 of 1 cannot be scored in double precision; their mass is
        folded into the last representable atom.
        """
        support = np.asarray(support, dtype=float)
        hi = np.asarray(cdf(support), dtype=float)
        lo = np.asarray(cdf(np.nextafter(support, -np.inf)), dtype=float)
        keep = (hi - lo > 1e-300) & (lo < 1.0 - _TAIL_EPS)
        support, lo, hi = support[keep], lo[keep], hi[keep].copy()
        if hi.size and 1.0 - hi[-1] < _TAIL_EPS:
            hi[-1] = 1.0
        return cls(kind, support, lo, hi, quantile_fn, name)


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """A finitely supported law on R^d."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        probs = np.asarray(self.probs, dtype=float)
        if support.shape[0] != probs.size:
            raise InputError("support and probabilities differ in length")
        if np.any(probs <= 0.0) or abs(probs.sum() - 1.0) > 1e-12:
            raise InputError("joint probabilities must be positive and sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @property
    def d(self):
        return self.support.shape[1]

    def margin_bounds(self, j):
        """``(F_j(x-), F_j(x))`` at the j-th (0-based) coordinate of every support point."""
        x = self.support[:, j]
        values, inverse = np.unique(x, return_inverse=True)
        mass = np.bincount(inverse.ravel(), weights=self.probs, minlength=values.size)
        hi = np.cumsum(mass)
        hi[-1] = 1.0
        lo = np.concatenate([[0.0], hi[:-1]])
        return lo[inverse], hi[inverse]

    def sample(self, n, rng):
        idx = rng.choice(self.probs.size, size=n, p=self.probs)
        return self.support[idx]


def _families_for(families, d):
    if isinstance(families, (list, tuple)):
        fams = [get_family(f) for f in families]
        if len(fams) == 1:
            fams = fams * d
    else:
        fams = [get_family(families)] * d
    if len(fams) != d:
        raise InputError(f"expected {d} score families, got {len(fams)}")
    return fams


# --------------------------------------------------------------------------
# covariance kernel


def gamma_kernel(margin, s, t):
    """Covariance kernel of the limiting multilinear process for a margin.

    ``s ^ t - s t`` minus, for the atom whose interval contains both
    arguments, ``(s ^ t - F(x-)) (F(x) - s v t) / jump``.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    lo_arg = np.minimum(s, t)
    hi_arg = np.maximum(s, t)
    out = lo_arg - s * t
    if margin.atom_lo.size:
        idx = np.searchsorted(margin.atom_hi, lo_arg, side="left")
        idx = np.minimum(idx, margin.atom_hi.size - 1)
        a = margin.atom_lo[idx]
        b = margin.atom_hi[idx]
        inside = (a <= lo_arg) & (hi_arg <= b)
        corr = np.where(inside, (lo_arg - a) * (b - hi_arg) / (b - a), 0.0)
        out = out - corr
    return float(out) if out.ndim == 0 else out


def variance_via_kernel(family, margin, grid_size=400):
    """Double Stieltjes integral of the kernel against the score quantile.

    Approximates ``int int Gamma(s, t) dq(s) dq(t)``; independent route to
    the variance of the tie-aware score.
    """
    family = get_family(family)
    s = 0.5 * (1.0 - np.cos(np.pi * np.linspace(0.0, 1.0, grid_size + 1)))
    if not family.bounded:
        s = np.clip(s, 1e-12, 1.0 - 1e-12)
    dq = np.diff(np.asarray(quantile(family, s)))
    mid = 0.5 * (s[1:] + s[:-1])
    kern = gamma_kernel(margin, mid[:, None], mid[None, :])
    return float(dq @ kern @ dq)


# --------------------------------------------------------------------------
# population limits


def population_gamma(joint, families, mask):
    """Exact ``E[prod_{j in A} (score_j(X_j) - mu_j)]`` under a finite joint law."""
    fams = _families_for(families, joint.d)
    prod = np.ones(joint.probs.size)
    for j in mask_elements(mask):
        if j > joint.d:
            raise InputError(f"subset element {j} exceeds dimension {joint.d}")
        lo, hi = joint.margin_bounds(j - 1)
        f = fams[j - 1]
        prod *= np.asarray(score_at(f, lo, hi)) - f.mean
    return float(np.dot(joint.probs, prod))


def consistency_check(joint, families, mask, n, seed=None):
    """Sample ``n`` draws from ``joint`` and return (empirical gamma, population gamma)."""
    from .empirical import build_margin, score_column
    from .stats import gamma_stat

    rng = np.random.default_rng(seed)
    data = joint.sample(int(n), rng)
    fams = _families_for(families, joint.d)
    cols = [score_column(build_margin(data[:, j]), fams[j]) for j in range(joint.d)]
    return gamma_stat(cols, mask), population_gamma(joint, fams, mask)


def _quad(fn, a, b, what):
    val, err, info = integrate.quad(fn, a, b, epsabs=1e-11, epsrel=1e-10, limit=500, full_output=1)[:3]
    if err > 1e-9:
        raise NumericalError(
            f"quadrature for {what} on ({a:.3g}, {b:.3g}) did not converge: "
            f"estimate {val!r}, error bound {err:.3g}, {info['neval']} evaluations"
        )
    return val


def local_power_mean(k_family, margin, g_family):
    """Covariance of the tie-aware K- and G-scores of ``X ~ margin``.

    Atoms contribute ``jump * (score_K - mu_K) (score_G - mu_G)``; on the
    continuous part the scores are the plain quantiles, integrated by
    adaptive quadrature.
    """
    kf = get_family(k_family)
    gf = get_family(g_family)
    total = 0.0
    if margin.atom_lo.size:
        lo, hi = margin.atom_lo, margin.atom_hi
        ck = np.asarray(score_at(kf, lo, hi)) - kf.mean
        cg = np.asarray(score_at(gf, lo, hi)) - gf.mean
        total += float(np.sum((hi - lo) * ck * cg))

    def integrand(u):
        return (quantile(kf, u) - kf.mean) * (quantile(gf, u) - gf.mean)

    for a, b in margin.continuous_intervals():
        total += _quad(integrand, a, b, f"cov({kf.token}, {gf.token})")
    return total


def are(k_family, g_family, margin, card=2):
    """Asymptotic relative efficiency of the K-test against the G-test for |A| = card."""
    if card < 2:
        raise InputError(f"subset cardinality must be at least 2, got {card}")
    cov = local_power_mean(k_family, margin, g_family)
    vk = local_power_mean(k_family, margin, k_family)
    vg = local_power_mean(g_family, margin, g_family)
    if vk <= 0.0 or vg <= 0.0:
        raise DegenerateDataError("score variance is zero under this margin")
    return (cov * cov / (vk * vg)) ** card


_RECOMMENDED = {
    "gaussian": ("vdw", 2),
    "fgm": ("spearman", None),
    "frank": ("spearman", None),
    "clayton": ("savage", 2),
}


def recommend_score(copula_family):
    """Locally most powerful score family for a copula family.

    Returns ``(family token, pmax)``; ``pmax=None`` means use all subsets
    (the FGM alternative only moves the full set; Frank moves every set).
    """
    key = str(copula_family).strip().lower()
    if key not in _RECOMMENDED:
        raise InputError(f"no recommendation for copula family {copula_family!r}")
    return _RECOMMENDED[key]

