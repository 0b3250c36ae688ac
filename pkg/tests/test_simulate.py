import math

import numpy as np
import pytest
from scipy import integrate, stats as sps

from mlcop import simulate, stats
from mlcop.exceptions import InputError
from mlcop.simulate import CopulaModel, conditional_inverse, margin_quantile, parse_model, tau_to_param


def _frank_tau(theta):
    # Debye-1 identity, evaluated by plain quadrature
    d1 = integrate.quad(lambda t: t / math.expm1(t), 0.0, theta)[0] / theta
    return 1.0 - 4.0 / theta * (1.0 - d1)


# --- parameterization -----------------------------------------------------------


def test_tau_to_param_examples():
    assert tau_to_param("gaussian", 0.1) == pytest.approx(0.1564345, abs=1e-7)
    assert tau_to_param("clayton", 0.1) == pytest.approx(0.2222222, abs=1e-7)
    theta = tau_to_param("frank", 0.1)
    assert theta == pytest.approx(0.9073675457764795, abs=1e-9)
    assert abs(_frank_tau(theta) - 0.1) < 1e-10


def test_frank_negative_tau_is_odd():
    assert tau_to_param("frank", -0.3) == pytest.approx(-tau_to_param("frank", 0.3), rel=1e-12)


@pytest.mark.parametrize("kind,tau", [("gaussian", 1.0), ("clayton", 0.0), ("clayton", -0.2), ("frank", 0.0), ("fgm", 0.1)])
def test_tau_errors(kind, tau):
    with pytest.raises(InputError):
        tau_to_param(kind, tau)


def test_model_validation():
    with pytest.raises(InputError):
        CopulaModel("Clayton", -1.0)
    with pytest.raises(InputError):
        CopulaModel("Frank", 0.0)
    with pytest.raises(InputError):
        CopulaModel("Gaussian", 1.0)
    with pytest.raises(InputError):
        CopulaModel("FGM", 1.5)


def test_parse_model_tokens():
    assert parse_model("indep").kind == "Independence"
    assert parse_model("tent").kind == "TentMap"
    fgm = parse_model("fgm")
    assert fgm.param == 1.0 and fgm.order == 2
    assert parse_model("clayton:tau=0.1").param == pytest.approx(2 / 9)
    assert parse_model("gaussian:rho=0.3").param == 0.3
    assert parse_model("frank:theta=2").param == 2.0
    assert parse_model("clayton:tau=0.1").label == "clayton:tau=0.1"
    for bad in ("gumbel", "clayton", "tent:theta=1", "frank:beta=2"):
        with pytest.raises(InputError):
            parse_model(bad)


# --- conditional inverse -----------------------------------------------------------


def test_conditional_inverse_examples():
    g0 = CopulaModel("Gaussian", 0.0)
    for v, w in ((0.1, 0.3), (0.8, 0.55)):
        assert conditional_inverse(g0, [v], w) == pytest.approx(w, abs=1e-15)
    assert conditional_inverse(CopulaModel("Clayton", 2.0), [0.5], 0.5) == pytest.approx(0.5464, abs=1e-4)
    for theta in (-3.0, 0.5, 7.0):
        assert conditional_inverse(CopulaModel("Frank", theta), [0.5], 0.5) == pytest.approx(0.5, abs=1e-12)
    fgm = CopulaModel("FGM", 1.0)
    for w in (0.1, 0.5, 0.9):
        assert conditional_inverse(fgm, [0.5, 0.5], w) == pytest.approx(w, abs=1e-15)


def test_tent_map_iteration():
    tent = CopulaModel("TentMap")
    u = 0.3
    for expected in (0.6, 0.8, 0.4):
        u = conditional_inverse(tent, [u], 0.5, jitter=False)
        assert u == pytest.approx(expected, abs=1e-15)


def test_history_length_checked():
    with pytest.raises(InputError):
        conditional_inverse(CopulaModel("FGM", 0.5), [0.3], 0.5)
    with pytest.raises(InputError):
        conditional_inverse(CopulaModel("Clayton", 1.0), [0.3, 0.4], 0.5)


def _conditional_cdf(model, history, u):
    v = history[0]
    p = model.param
    if model.kind == "Gaussian":
        return sps.norm.cdf((sps.norm.ppf(u) - p * sps.norm.ppf(v)) / math.sqrt(1 - p * p))
    if model.kind == "Clayton":
        return v ** (-p - 1) * (u ** (-p) + v ** (-p) - 1) ** (-1 / p - 1)
    if model.kind == "Frank":
        num = math.exp(-p * v) * math.expm1(-p * u)
        return num / (math.expm1(-p) + math.expm1(-p * u) * math.expm1(-p * v))
    if model.kind == "FGM":
        c = p * (1 - 2 * history[0]) * (1 - 2 * history[1])
        return u + c * u * (1 - u)
    raise AssertionError(model.kind)


@pytest.mark.parametrize(
    "model",
    [CopulaModel("Gaussian", 0.6), CopulaModel("Clayton", 1.5), CopulaModel("Frank", -4.0), CopulaModel("Frank", 3.0), CopulaModel("FGM", -0.8)],
)
def test_inverse_inverts_conditional_cdf(model):
    rng = np.random.default_rng(0)
    for _ in range(50):
        hist = list(rng.uniform(0.02, 0.98, size=model.order))
        w = rng.uniform(0.01, 0.99)
        u = conditional_inverse(model, hist, w)
        assert _conditional_cdf(model, hist, u) == pytest.approx(w, abs=1e-9)


@pytest.mark.parametrize("model", [CopulaModel("Gaussian", 0.4), CopulaModel("Clayton", 2.0), CopulaModel("Frank", 5.0), CopulaModel("Frank", -5.0)])
def test_inverse_strictly_increasing_in_w(model):
    w = np.linspace(0.001, 0.999, 400)
    for v in (0.05, 0.3, 0.5, 0.9):
        u = conditional_inverse(model, [np.full_like(w, v)], w)
        assert np.all(np.diff(u) > 0)


# --- margins ----------------------------------------------------------------------


@pytest.mark.parametrize("token,u,expected", [("f1", 0.1, 0), ("f1", 0.5, 1), ("f6", 0.5, 0), ("f7", 0.5, 1)])
def test_margin_quantile_examples(token, u, expected):
    assert margin_quantile(token, u) == expected


def test_margin_quantile_domain():
    with pytest.raises(InputError):
        margin_quantile("f2", 0.0)
    with pytest.raises(InputError):
        margin_quantile("f9", 0.5)


def test_pareto_generalized_inverse():
    k = np.arange(1, 200)
    cdf = 1 - 1 / (k + 1)
    assert np.all(margin_quantile("f7", cdf) == k)
    assert np.all(margin_quantile("f7", np.minimum(cdf + 1e-9, 1 - 1e-12))[:-1] == k[:-1] + 1)


@pytest.mark.parametrize(
    "token,dist",
    [
        ("f1", sps.bernoulli(0.8)),
        ("f2", sps.poisson(6)),
        ("f3", sps.nbinom(1.5, 0.2)),
    ],
)
def test_margin_quantile_matches_scipy(token, dist):
    u = np.linspace(0.001, 0.999, 997)
    np.testing.assert_array_equal(margin_quantile(token, u), dist.ppf(u))


def test_margin_means():
    u = (np.arange(200_000) + 0.5) / 200_000
    assert margin_quantile("f3", u).mean() == pytest.approx(6.0, abs=0.05)
    assert margin_quantile("f4", u).mean() == pytest.approx(9.0, abs=0.05)
    f5 = margin_quantile("f5", u)
    assert np.mean(f5 == 0.0) == pytest.approx(0.1, abs=1e-4)


def test_zero_inflated_atom():
    x = margin_quantile("f4", np.array([0.05, 0.099, 0.2]))
    assert x[0] == 0 and x[1] == 0


def test_theoretical_margins_agree_with_quantiles():
    for token in simulate.MARGINS:
        m = simulate.parse_margin(token)
        t = m.theoretical()
        assert np.all(np.diff(t.atom_lo) > 0)
        inside = (t.atom_lo + t.atom_hi) / 2
        sel = (inside > 1e-9) & (inside < 1 - 1e-9)
        np.testing.assert_array_equal(m.quantile(inside[sel]), t.atom_values[sel])


# --- sampling -------------------------------------------------------------------


def test_independence_poisson_mean():
    y = simulate.sample_series("indep", "f2", 100_000, seed=1)
    assert abs(y.mean() - 6.0) < 6 / math.sqrt(100_000) * math.sqrt(6)


def test_sampling_deterministic():
    a = simulate.sample_series("clayton:tau=0.1", "f3", 300, seed=42)
    b = simulate.sample_series("clayton:tau=0.1", "f3", 300, seed=42)
    c = simulate.sample_series("clayton:tau=0.1", "f3", 300, seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_batch_rows_match_single_series():
    seeds = simulate.replication_seeds(7, 3, key=(11,))
    batch = simulate.sample_batch("fgm", "f6", 50, seeds)
    for k in range(3):
        assert np.array_equal(batch[k], simulate.sample_series("fgm", "f6", 50, seed=seeds[k]))


def test_sample_series_minimum_length():
    with pytest.raises(InputError):
        simulate.sample_series("indep", "f1", 9)


@pytest.mark.parametrize("token", ["indep", "tent", "fgm", "clayton:tau=0.1", "frank:tau=0.1", "gaussian:tau=0.1", "gaussian:rho=0.9"])
def test_stationary_uniformity(token):
    u = simulate.simulate_uniforms(token, 100_000, [123])[0]
    counts = np.histogram(u, bins=20, range=(0, 1))[0]
    chi2 = ((counts - 5000) ** 2 / 5000).sum()
    assert chi2 < sps.chi2.ppf(0.999, 19)


@pytest.mark.parametrize("kind", ["clayton", "frank", "gaussian"])
def test_kendall_tau_round_trip(kind):
    model = parse_model(f"{kind}:tau=0.1")
    rng = np.random.default_rng(2024)
    v = rng.random(200_000)
    u = conditional_inverse(model, [v], rng.random(200_000))
    tau = sps.kendalltau(v, u).statistic
    assert tau == pytest.approx(0.1, abs=0.01)


def test_tent_map_rank_dependence_without_correlation():
    # T(u) = T(1 - u), so any score odd about 1/2 (Spearman, vdW) is
    # uncorrelated with its successor; the asymmetric Savage and Blest
    # scores see the deterministic dependence at once
    u = simulate.simulate_uniforms("tent", 10_000, [5])[0]
    assert abs(np.corrcoef(u[1:], u[:-1])[0, 1]) < 0.05
    y = sps.norm.ppf(u)
    assert abs(stats.test_randomness(y, 2, "spearman").r[0]) < 0.05
    for fam in ("savage", "blest"):
        rep = stats.test_randomness(y, 2, fam)
        assert abs(rep.r[0]) > 0.2
        assert rep.pvalue_chi2 < 1e-6


def test_tent_map_orbit_does_not_collapse():
    u = simulate.simulate_uniforms("tent", 5000, [9])[0]
    assert np.all((u > 0) & (u < 1))
    assert u[-1000:].std() > 0.2


def test_fgm_pairs_uncorrelated_but_triples_dependent():
    u = simulate.simulate_uniforms("fgm", 200_000, [3])[0]
    c = u - 0.5
    lag1 = np.mean(c[1:] * c[:-1])
    trip = np.mean(c[2:] * c[1:-1] * c[:-2])
    assert abs(lag1) < 0.002
    # E prod(U - 1/2) = theta * (-1/6)^3 for the trivariate FGM density
    assert trip == pytest.approx(-1 / 216, abs=0.0015)
