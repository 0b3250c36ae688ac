"""Stationary copula Markov chains and the seven benchmark margins.

A chain of uniforms ``U_t`` is driven by the inverse conditional cdf of a
copula given the previous ``order`` values; the series is ``F^{-1}(U_t)``
for a margin F.  Replication k of a study draws its randomness from a
stream derived from ``(master_seed, *key, k)``, so results do not depend
on batching or scheduling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special, stats

from .dist import TheoreticalMargin
from .exceptions import InputError

__all__ = [
    "CopulaModel",
    "MarginSpec",
    "MARGINS",
    "parse_model",
    "parse_margin",
    "tau_to_param",
    "conditional_inverse",
    "margin_quantile",
    "replication_seeds",
    "simulate_uniforms",
    "sample_series",
    "sample_batch",
]

_TENT_JITTER = 1e-10
_U_MIN = 2.0**-60
_U_MAX = 1.0 - 2.0**-53

_KINDS = {
    "indep": "Independence",
    "independence": "Independence",
    "tent": "TentMap",
    "tentmap": "TentMap",
    "fgm": "FGM",
    "clayton": "Clayton",
    "frank": "Frank",
    "gaussian": "Gaussian",
    "normal": "Gaussian",
}
_TOKENS = {
    "Independence": "indep",
    "TentMap": "tent",
    "FGM": "fgm",
    "Clayton": "clayton",
    "Frank": "frank",
    "Gaussian": "gaussian",
}


@dataclass(frozen=True)
class CopulaModel:
    """A stationary Markov copula model for the uniforms of a series.

    ``param`` is theta for FGM, Clayton and Frank, rho for Gaussian, and
    unused for Independence and TentMap.  FGM is the trivariate
    Farlie-Gumbel-Morgenstern copula driving a 2-Markov chain.
    """

    kind: str
    param: float = 0.0
    label: str = ""

    def __post_init__(self):
        k, p = self.kind, self.param
        if k not in _TOKENS:
            raise InputError(f"unknown copula model {k!r}")
        if k == "Clayton" and not p > 0.0:
            raise InputError("Clayton theta must be positive")
        if k == "Frank" and p == 0.0:
            raise InputError("Frank theta must be nonzero")
        if k == "Gaussian" and not abs(p) < 1.0:
            raise InputError("Gaussian rho must satisfy |rho| < 1")
        if k == "FGM" and not abs(p) <= 1.0:
            raise InputError("FGM theta must satisfy |theta| <= 1")
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self):
        token = _TOKENS[self.kind]
        if self.kind in ("Independence", "TentMap"):
            return token
        name = "rho" if self.kind == "Gaussian" else "theta"
        return f"{token}:{name}={self.param:.10g}"

    @property
    def order(self):
        return 2 if self.kind == "FGM" else 1

    @property
    def token(self):
        return _TOKENS[self.kind]


@lru_cache(maxsize=64)
def _frank_theta(tau):
    def debye1(theta):
        if theta == 0.0:
            return 1.0
        val = integrate.quad(lambda t: t / math.expm1(t) if t != 0.0 else 1.0, 0.0, theta, epsabs=1e-14, epsrel=1e-13)[0]
        return val / theta

    def resid_abs(theta, target):
        return 1.0 - 4.0 / theta * (1.0 - debye1(theta)) - target

    a = abs(tau)
    if a < 1e-12:
        raise InputError("Frank copula requires tau != 0")
    hi = 1.0
    while resid_abs(hi, a) < 0.0 and hi < 1e4:
        hi *= 2.0
    root = optimize.brentq(resid_abs, 1e-10, hi, args=(a,), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    # tau is odd in theta
    return root if tau > 0 else -root


def tau_to_param(kind, tau):
    """Copula parameter matching a Kendall's tau.

    Gaussian: ``rho = sin(pi tau / 2)``; Clayton: ``theta = 2 tau / (1 - tau)``;
    Frank: root of ``tau = 1 - 4 (1 - D_1(theta)) / theta`` with the Debye
    function ``D_1``.
    """
    kind = _KINDS.get(str(kind).lower(), kind)
    tau = float(tau)
    if kind == "Gaussian":
        if not -1.0 < tau < 1.0:
            raise InputError("Gaussian tau must lie in (-1, 1)")
        return math.sin(math.pi * tau / 2.0)
    if kind == "Clayton":
        if not 0.0 < tau < 1.0:
            raise InputError("Clayton tau must lie in (0, 1)")
        return 2.0 * tau / (1.0 - tau)
    if kind == "Frank":
        if not -1.0 < tau < 1.0 or tau == 0.0:
            raise InputError("Frank tau must lie in (-1, 0) or (0, 1)")
        return _frank_theta(tau)
    raise InputError(f"no Kendall's tau parameterization for {kind!r}")


def parse_model(token):
    """Parse ``"clayton:tau=0.1"``, ``"gaussian:rho=0.3"``, ``"fgm"``, ``"tent"`` ..."""
    if isinstance(token, CopulaModel):
        return token
    text = str(token).strip().lower()
    name, _, spec = text.partition(":")
    kind = _KINDS.get(name.strip())
    if kind is None:
        raise InputError(f"unknown copula model {token!r}")
    if kind in ("Independence", "TentMap"):
        if spec:
            raise InputError(f"model {name!r} takes no parameter")
        return CopulaModel(kind)
    if not spec:
        if kind == "FGM":
            return CopulaModel("FGM", 1.0, label="fgm")
        raise InputError(f"model {name!r} needs a strength such as tau=0.1")
    m = re.fullmatch(r"\s*(tau|theta|rho)\s*=\s*([-+0-9.eE]+)\s*", spec)
    if m is None:
        raise InputError(f"cannot parse model strength {spec!r}")
    key, value = m.group(1), float(m.group(2))
    param = tau_to_param(kind, value) if key == "tau" else value
    return CopulaModel(kind, param, label=f"{_TOKENS[kind]}:{key}={m.group(2)}")


def conditional_inverse(model, history, w, jitter=True):
    """Draw ``U_t`` given the previous uniforms by inverting the conditional cdf at ``w``.

    ``history`` lists the previous ``model.order`` uniforms, most recent
    first; entries may be arrays for a batch of chains.  TentMap ignores
    ``w`` except as the source of a 1e-10 jitter that keeps the floating
    point orbit from collapsing onto 0.
    """
    if len(history) != model.order:
        raise InputError(f"{model.kind} needs {model.order} previous values, got {len(history)}")
    w = np.asarray(w, dtype=float)
    v = np.asarray(history[0], dtype=float)
    kind, p = model.kind, model.param
    if kind == "Independence":
        u = w + 0.0 * v
    elif kind == "Gaussian":
        u = special.ndtr(p * special.ndtri(v) + math.sqrt(1.0 - p * p) * special.ndtri(w))
    elif kind == "Clayton":
        u = ((w ** (-p / (1.0 + p)) - 1.0) * v ** (-p) + 1.0) ** (-1.0 / p)
    elif kind == "Frank":
        ratio = w * math.expm1(-p) / (w + (1.0 - w) * np.exp(-p * v))
        u = -np.log1p(ratio) / p
    elif kind == "FGM":
        c = p * (1.0 - 2.0 * v) * (1.0 - 2.0 * np.asarray(history[1], dtype=float))
        # root of c u^2 - (1 + c) u + w = 0 in [0, 1], cancellation-free form
        b = 1.0 + c
        u = 2.0 * w / (b + np.sqrt(b * b - 4.0 * c * w))
    else:  # TentMap
        u = 2.0 * np.minimum(v, 1.0 - v)
        if jitter:
            u = u + (2.0 * w - 1.0) * _TENT_JITTER
    u = np.clip(u, _U_MIN, _U_MAX)
    return float(u) if u.ndim == 0 else u


# --------------------------------------------------------------------------
# margins


def _bernoulli_q(u):
    return np.where(u <= 0.2, 0.0, 1.0)


def _bernoulli_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 0.0, 0.0, np.where(x < 1.0, 0.2, 1.0))


def _poisson6_q(u):
    return stats.poisson.ppf(u, 6.0)


def _nbinom_q(u):
    return stats.nbinom.ppf(u, 1.5, 0.2)


def _poisson6_cdf(x):
    return stats.poisson.cdf(x, 6.0)


def _nbinom_cdf(x):
    return stats.nbinom.cdf(x, 1.5, 0.2)


def _zero_poisson10_q(u):
    inner = np.clip((u - 0.1) / 0.9, 0.0, 1.0)
    return np.where(u <= 0.1, 0.0, stats.poisson.ppf(inner, 10.0))


def _zero_normal_q(u):
    below = special.ndtri(np.clip(u / 0.9, 1e-300, 0.5))
    above = special.ndtri(np.clip((u - 0.1) / 0.9, 0.5, 1.0))
    return np.where(u <= 0.45, below, np.where(u <= 0.55, 0.0, above))


def _discretized_normal_q(u):
    return np.floor(200.0 * special.ndtri(u))


def _pareto_q(u):
    # smallest k >= 1 with 1 - 1/(k+1) >= u
    k = np.maximum(np.ceil(u / (1.0 - u)), 1.0)
    ok_below = 1.0 - 1.0 / k >= u  # k - 1 already suffices
    k = np.where(ok_below & (k > 1.0), k - 1.0, k)
    short = 1.0 - 1.0 / (k + 1.0) < u
    return np.where(short, k + 1.0, k)


def _zero_poisson10_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 0.0, 0.0, 0.1 + 0.9 * stats.poisson.cdf(x, 10.0))


def _zero_normal_cdf(x):
    x = np.asarray(x, dtype=float)
    return 0.1 * (x >= 0.0) + 0.9 * special.ndtr(x)


def _discretized_normal_cdf(x):
    # floor(200 Z) <= x  <=>  Z < (floor(x) + 1) / 200
    return special.ndtr((np.floor(np.asarray(x, dtype=float)) + 1.0) / 200.0)


def _pareto_cdf(x):
    k = np.floor(np.asarray(x, dtype=float))
    return np.where(k < 1.0, 0.0, 1.0 - 1.0 / (k + 1.0))


@dataclass(frozen=True)
class MarginSpec:
    """One of the benchmark margins F1-F7, or a custom :class:`TheoreticalMargin`."""

    token: str
    description: str
    quantile_fn: object
    cdf_fn: object = None
    support: tuple = ()
    custom: TheoreticalMargin = None

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0.0) & (u < 1.0))):
            raise InputError("margin quantile requires u in (0, 1)")
        if self.custom is not None:
            return self.custom.quantile(u)
        out = self.quantile_fn(u)
        return float(out) if np.ndim(out) == 0 else out

    def theoretical(self):
        """Atoms plus generalized inverse, for the population calculators."""
        if self.custom is not None:
            return self.custom
        lo, hi = self.support
        support = np.arange(lo, hi + 1, dtype=float)
        if self.token == "f5":
            support = np.array([0.0])
        kind = {"f1": "finite-discrete", "f5": "mixed"}.get(self.token, "discrete")
        return TheoreticalMargin.from_cdf(self.cdf_fn, self.quantile_fn, support, kind=kind, name=self.token)


MARGINS = {
    "f1": MarginSpec("f1", "Bernoulli(p=0.8)", _bernoulli_q, _bernoulli_cdf, (0, 1)),
    "f2": MarginSpec("f2", "Poisson(6)", _poisson6_q, _poisson6_cdf, (0, 80)),
    "f3": MarginSpec("f3", "NegativeBinomial(r=1.5, p=0.2)", _nbinom_q, _nbinom_cdf, (0, 400)),
    "f4": MarginSpec("f4", "0 w.p. 0.1, else Poisson(10)", _zero_poisson10_q, _zero_poisson10_cdf, (0, 100)),
    "f5": MarginSpec("f5", "0 w.p. 0.1, else N(0, 1)", _zero_normal_q, _zero_normal_cdf, (0, 0)),
    "f6": MarginSpec(
        "f6", "floor(200 * Phi^{-1}(U))", _discretized_normal_q, _discretized_normal_cdf, (-1800, 1800)
    ),
    "f7": MarginSpec("f7", "discrete Pareto, F(k) = 1 - 1/(k+1)", _pareto_q, _pareto_cdf, (1, 1_000_000)),
}


def parse_margin(token):
    if isinstance(token, MarginSpec):
        return token
    if isinstance(token, TheoreticalMargin):
        return MarginSpec(token.name or "custom", token.kind, token.quantile_fn, custom=token)
    key = str(token).strip().lower()
    if key not in MARGINS:
        raise InputError(f"unknown margin {token!r}; expected f1..f7")
    return MARGINS[key]


def margin_quantile(margin, u):
    """Generalized inverse ``inf{x : F(x) >= u}`` of a benchmark margin."""
    return parse_margin(margin).quantile(u)


# --------------------------------------------------------------------------
# sampling


def replication_seeds(master_seed, count, key=()):
    """Seed sequences for replications ``0..count-1`` derived from ``(master_seed, *key, k)``."""
    key = tuple(int(k) for k in key)
    return [np.random.SeedSequence(int(master_seed), spawn_key=key + (k,)) for k in range(count)]


def _as_seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def simulate_uniforms(model, n, seeds):
    """Chains of uniforms, one row per seed.

    Each row's stream supplies ``order`` starting uniforms then the
    ``n - order`` driving uniforms ``w``; rows are independent of each other.
    """
    model = parse_model(model)
    n = int(n)
    order = model.order
    if n <= order:
        raise InputError(f"series length {n} too short for a model of order {order}")
    rows = []
    for s in seeds:
        rng = np.random.default_rng(_as_seed_sequence(s))
        rows.append(rng.random(n))
    draws = np.vstack(rows)
    u = np.empty_like(draws)
    u[:, :order] = draws[:, :order]
    for t in range(order, n):
        history = [u[:, t - 1 - i] for i in range(order)]
        u[:, t] = conditional_inverse(model, history, draws[:, t])
    return u


def sample_batch(model, margin, n, seeds):
    """Series for a batch of seeds, shape ``(len(seeds), n)``."""
    return parse_margin(margin).quantile(simulate_uniforms(model, n, seeds))


def sample_series(model, margin, n, seed=None):
    """One stationary series of length ``n``; deterministic given ``seed``."""
    if int(n) < 10:
        raise InputError("series length must be at least 10")
    return sample_batch(model, margin, n, [seed])[0]
