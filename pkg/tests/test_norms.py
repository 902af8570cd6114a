import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from betamix.mixing import FiniteMarkov, GaussianAR1, MixingSequence, simulate
from betamix.norms import (
    AnalyticQuantile,
    AnalyticTail,
    FiniteLaw,
    StepQuantile,
    autocovariance_abs_sum,
    beta_inverse,
    default_bandwidth,
    moment_sufficiency,
    hac_variance,
    longrun_covariance,
    longrun_matrix,
    longrun_variance,
    moment_norm_2rP,
    norm_2beta,
    norm_2beta_sup_check,
    norm_l2,
    quantile_of,
    weight_quantile,
)


def two_state(p, q, values=(0.0, 1.0)):
    return FiniteMarkov(np.array([[1 - p, p], [q, 1 - q]]), np.array(values))


@st.composite
def step_quantiles(draw):
    k = draw(st.integers(1, 6))
    vals = sorted({round(v, 6) for v in draw(st.lists(st.floats(0.01, 10.0), min_size=k, max_size=k))}, reverse=True)
    masses = draw(st.lists(st.floats(0.01, 1.0), min_size=len(vals), max_size=len(vals)))
    return StepQuantile(np.array(vals), np.array(masses))


@st.composite
def mixing_sequences(draw):
    kind = draw(st.sampled_from(["geometric", "finite", "power"]))
    if kind == "geometric":
        return MixingSequence.geometric(draw(st.floats(0.01, 0.95)))
    steps = draw(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8))
    vals = np.concatenate([[1.0], np.cumprod(steps)])
    if kind == "power":
        vals = np.maximum(vals, 1e-6)
        return MixingSequence(vals, tail_power=draw(st.floats(1.2, 4.0)))
    return MixingSequence(vals)


# -- quantile functions ------------------------------------------------------


def test_quantile_constant():
    q = quantile_of(FiniteLaw(np.array([0.0, 1.0, 2.0]), np.array([0.2, 0.5, 0.3])), lambda x: -3.0)
    assert np.all(q(np.array([0.0, 0.3, 0.99])) == 3.0)


def test_quantile_indicator():
    law = FiniteLaw(np.array([0.0, 1.0]), np.array([0.75, 0.25]))
    q = quantile_of(law, lambda x: float(x == 1.0))
    assert q(0.1) == 1.0 and q(0.2499) == 1.0
    assert q(0.25) == 0.0 and q(0.9) == 0.0


def test_quantile_exponential_tail():
    q = quantile_of(AnalyticTail(lambda t: math.exp(-t)))
    for u in (0.01, 0.3, 0.9):
        assert q(u) == pytest.approx(-math.log(u), abs=1e-10)


def test_quantile_empty_support():
    with pytest.raises(ValueError):
        quantile_of(np.array([]), lambda x: x)


def test_quantile_from_sample_matches_sorted_abs():
    x = np.array([-3.0, 1.0, 2.0, -0.5])
    q = quantile_of(x, lambda v: v)
    assert q(0.0) == 3.0 and q(0.26) == 2.0 and q(0.99) == 0.5


# -- beta inverse ------------------------------------------------------------


def test_beta_inverse_examples():
    assert beta_inverse(MixingSequence.iid())(0.3) == 1
    assert beta_inverse(MixingSequence([1.0, 0.5, 0.25]))(0.3) == 2
    assert beta_inverse(MixingSequence.geometric(0.5))(1.0) == 0


def test_beta_inverse_geometric_tail():
    inv = beta_inverse(MixingSequence.geometric(0.5))
    # 0.5^m > 0.1 for m = 0..3
    assert inv(0.1) == 4


# -- norm --------------------------------------------------------------------


def test_norm_constant():
    q = StepQuantile(np.array([2.0]), np.array([1.0]))
    r = norm_2beta(q, MixingSequence.geometric(0.5))
    assert r.value == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-14)
    assert r.status == "exact"


def test_norm_indicator_two_layers():
    q = StepQuantile(np.array([1.0]), np.array([0.25]))
    # masses are normalised; supply the zero level explicitly instead
    q = StepQuantile(np.array([1.0, 0.0]), np.array([0.25, 0.75]))
    r = norm_2beta(q, MixingSequence([1.0, 0.1, 0.0]))
    assert r.value == pytest.approx(math.sqrt(0.35), abs=1e-12)


def test_norm_truncated_flag():
    q = StepQuantile(np.array([1.0]), np.array([1.0]))
    assert norm_2beta(q, MixingSequence([1.0, 0.5])).status == "truncated"


def test_norm_divergent_power_tail():
    q = StepQuantile(np.array([1.0]), np.array([1.0]))
    r = norm_2beta(q, MixingSequence([1.0, 0.5], tail_power=0.8))
    assert r.status == "divergent" and math.isinf(r.value) and not r.finite


def test_norm_power_tail_closed_form():
    q = StepQuantile(np.array([1.0]), np.array([1.0]))
    r = norm_2beta(q, MixingSequence([1.0, 1.0], tail_power=2.0))
    # 1 + sum_{m>=1} m^-2
    assert r.squared == pytest.approx(1.0 + math.pi**2 / 6, rel=1e-12)


def test_norm_iid_analytic_equals_l2():
    q = quantile_of(AnalyticTail(lambda t: math.exp(-t), quantile=lambda u: -math.log(u)))
    assert norm_2beta(q, MixingSequence.iid()).value == pytest.approx(math.sqrt(2.0), abs=1e-8)
    assert norm_l2(q) == pytest.approx(math.sqrt(2.0), abs=1e-8)


def test_norm_analytic_geometric():
    # Q(u) = 1 - u: G(b) = (1 - (1-b)^3) / 3, summed over b = 0.5^m
    q = AnalyticQuantile(lambda u: 1.0 - u)
    r = norm_2beta(q, MixingSequence.geometric(0.5))
    expect = math.fsum((1 - (1 - 0.5**m) ** 3) / 3 for m in range(200))
    assert r.squared == pytest.approx(expect, abs=1e-9)


@given(step_quantiles(), mixing_sequences())
def test_norm_dominates_l2(q, seq):
    r = norm_2beta(q, seq)
    assert r.value >= norm_l2(q) * (1 - 1e-12)


@given(step_quantiles(), mixing_sequences(), st.floats(0.1, 10.0))
def test_norm_homogeneous(q, seq, c):
    r1 = norm_2beta(q, seq)
    r2 = norm_2beta(StepQuantile(c * q.values, q.masses), seq)
    assert r2.value == pytest.approx(c * r1.value, rel=1e-10)


@given(st.integers(0, 2**31), mixing_sequences())
def test_norm_triangle(seed, seq):
    rng = np.random.default_rng(seed)
    law = FiniteLaw(np.arange(5.0), rng.dirichlet(np.ones(5)))
    f, g = rng.normal(size=5), rng.normal(size=5)
    nf = norm_2beta(quantile_of(law, lambda x: f[int(x)]), seq).value
    ng = norm_2beta(quantile_of(law, lambda x: g[int(x)]), seq).value
    nfg = norm_2beta(quantile_of(law, lambda x: f[int(x)] + g[int(x)]), seq).value
    assert nfg <= nf + ng + 1e-10


# -- supremum representation -------------------------------------------------


def test_sup_check_constant():
    spec = two_state(0.2, 0.3)
    seq = MixingSequence([1.0, 0.5, 0.2, 0.0])
    out = norm_2beta_sup_check(lambda x: 1.5, spec, seq)
    assert out["norm"] == pytest.approx(1.5 * math.sqrt(1.7), rel=1e-12)
    assert out["abs_diff"] < 1e-6


def test_sup_check_indicator_chain():
    spec = two_state(0.2, 0.3)
    seq = MixingSequence(spec.mixing_sequence().values[:31])
    out = norm_2beta_sup_check(lambda x: float(x == 1.0), spec, seq)
    assert out["abs_diff"] < 1e-6


def test_sup_check_iid_is_l2():
    spec = FiniteMarkov(np.tile([0.3, 0.7], (2, 1)), np.array([-1.0, 2.0]))
    out = norm_2beta_sup_check(lambda x: x, spec, MixingSequence.iid())
    assert out["sup"] == pytest.approx(math.sqrt(0.3 + 0.7 * 4), abs=1e-9)


@given(st.integers(0, 2**31))
def test_sup_check_random(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 5))
    P = rng.random((k, k)) + 0.1
    spec = FiniteMarkov(P / P.sum(1, keepdims=True), rng.normal(size=k))
    seq = MixingSequence(spec.mixing_sequence().values[:21])
    assert norm_2beta_sup_check(lambda x: x, spec, seq)["abs_diff"] < 1e-6


# -- moments -----------------------------------------------------------------


def test_moment_gaussian():
    assert moment_norm_2rP(stats.norm(), 0.5, 2.0) == pytest.approx(6 ** 0.25, abs=1e-8)


def test_moment_point_mass_and_bounded():
    assert moment_norm_2rP(FiniteLaw(np.array([0.0]), np.array([1.0])), 1.7, 3.0) == 1.0
    law = FiniteLaw(np.array([-1.0, 0.5, 2.0]), np.array([0.2, 0.3, 0.5]))
    assert moment_norm_2rP(law, 0.5, 2.0) <= 5.0**0.5


def test_moment_rejects_r():
    with pytest.raises(ValueError):
        moment_norm_2rP(stats.norm(), 0.5, 1.0)


def test_moment_heavy_tail_infinite():
    assert math.isinf(moment_norm_2rP(stats.t(3), 1.0, 2.0))


def test_weight_quantile_normal():
    q = weight_quantile(stats.norm(), 1.0)
    t = stats.norm.isf(0.05)
    assert q(0.1) == pytest.approx(1 + t * t, rel=1e-12)


def test_moment_sufficiency():
    ok, _ = moment_sufficiency(MixingSequence.geometric(0.7), 2.0, 3.0)
    assert ok
    ok, rep = moment_sufficiency(MixingSequence([1.0, 1.0], tail_power=1.5), 2.0, 3.0)
    assert not ok and rep["summability"] == "divergent"
    assert not moment_sufficiency(MixingSequence.geometric(0.5), 2.0, math.inf)[0]
    assert not moment_sufficiency(MixingSequence.geometric(0.5), 2.0, None)[0]


# -- long-run variance -------------------------------------------------------


def test_default_bandwidth():
    assert default_bandwidth(100) == 4
    assert default_bandwidth(1000) == 6


def test_lrv_iid():
    spec = FiniteMarkov(np.tile([0.2, 0.8], (2, 1)), np.array([0.0, 1.0]))
    assert longrun_variance(lambda x: x, spec) == pytest.approx(0.16, abs=1e-14)


@given(st.floats(0.02, 0.98), st.floats(0.02, 0.98))
def test_lrv_two_state_closed_form(p, q):
    spec = two_state(p, q)
    lam = 1 - p - q
    var = p * q / (p + q) ** 2
    assert longrun_variance(lambda x: x, spec) == pytest.approx(var * (1 + lam) / (1 - lam), rel=1e-10)


def test_lrv_markov_bruteforce():
    rng = np.random.default_rng(3)
    P = rng.random((4, 4)) + 0.1
    spec = FiniteMarkov(P / P.sum(1, keepdims=True), rng.normal(size=4))
    pi, g = spec.stationary, spec.values - spec.stationary @ spec.values
    total, h = pi @ g**2, g.copy()
    for _ in range(2000):
        h = spec.transition @ h
        total += 2 * (pi * g) @ h
    assert longrun_variance(lambda x: x, spec) == pytest.approx(total, rel=1e-10)


def test_lrv_ar1_exact():
    a = 0.5
    # Var(x) (1 + a)/(1 - a) for the identity
    assert longrun_variance(lambda x: x, GaussianAR1(a)) == pytest.approx(4 / 3 * 3, rel=1e-10)
    # x^2: Cov(x0^2, xt^2) = 2 Var^2 a^(2t)
    v = 4 / 3
    expect = 2 * v * v * (1 + a * a) / (1 - a * a)
    assert longrun_variance(lambda x: x**2, GaussianAR1(a)) == pytest.approx(expect, rel=1e-10)


def test_hac_on_ar1_path():
    path = simulate(GaussianAR1(0.5), 100_000, 17)
    est = longrun_variance(lambda x: x, path, lags=60)
    assert abs(est / 4.0 - 1) < 0.1


def test_hac_bandwidth_errors():
    with pytest.raises(ValueError):
        hac_variance(np.ones(5), 5)


def test_hac_lag_zero_is_sample_cov():
    z = np.random.default_rng(0).normal(size=(50, 2))
    np.testing.assert_allclose(hac_variance(z, 0), np.cov(z, rowvar=False, ddof=0), atol=1e-14)


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=60), st.integers(0, 10))
def test_hac_nonnegative(vals, L):
    z = np.array(vals)
    if L >= z.size:
        return
    assert hac_variance(z, L) >= 0


def test_polarization_symmetric_and_consistent():
    spec = two_state(0.3, 0.2, values=(-1.0, 2.0))
    f, g = (lambda x: x), (lambda x: x**2)
    G = longrun_matrix([f, g], spec)
    assert G[0, 1] == G[1, 0]
    assert longrun_covariance(f, f, spec) == pytest.approx(G[0, 0], rel=1e-12)


def test_abs_cov_sum_two_state():
    spec = two_state(0.6, 0.7)  # negative eigenvalue
    lam = 1 - 1.3
    var = 0.6 * 0.7 / 1.3**2
    assert autocovariance_abs_sum(lambda x: x, spec) == pytest.approx(var * (1 + abs(lam)) / (1 - abs(lam)), rel=1e-10)
