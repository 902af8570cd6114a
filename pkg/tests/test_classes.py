import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from betamix.classes import (
    ClassParams,
    MomentInfo,
    NormDivergent,
    WeightedFunction,
    angle_weight,
    besov_seminorm_estimate,
    bracket_cover,
    constant_family,
    entropy_scaling,
    fclt_condition_oracle,
    hausman_class_oracle,
    holder_ball_members,
    holder_norm_estimate,
    net_log_count,
    net_parameters,
    predicted_entropy_exponent,
    validate_cover,
)
from betamix.mixing import MixingSequence, summability_report

GEO = MixingSequence.geometric(0.5)


# -- norms of individual functions -------------------------------------------


def test_angle_weight():
    assert angle_weight(0.0) == 1.0
    assert angle_weight(np.array([[1.0, 1.0]]))[0] == 3.0
    assert angle_weight(3.0) == 10.0


def test_holder_estimates():
    grid = np.linspace(-1, 1, 201)
    assert holder_norm_estimate(lambda x: np.zeros_like(x), 0.7, grid) == 0.0
    assert holder_norm_estimate(lambda x: np.ones_like(x), 0.5, grid) == pytest.approx(1.0)
    assert holder_norm_estimate(np.abs, 1.0, grid) == pytest.approx(2.0, rel=1e-12)


def test_holder_empty_grid():
    with pytest.raises(ValueError):
        holder_norm_estimate(np.abs, 1.0, np.array([]))


def test_besov_estimates():
    grid = np.linspace(0, 1, 101)
    assert besov_seminorm_estimate(lambda x: np.zeros_like(x), 0.5, 2, 2, grid) == 0.0
    assert besov_seminorm_estimate(lambda x: x, 0.5, math.inf, math.inf, grid) == pytest.approx(1.0, rel=1e-12)
    # constant c on [0, 1] with p = 2: sup term c * 1^(1/2), difference term 0
    assert besov_seminorm_estimate(lambda x: np.full_like(x, 2.0), 0.5, 2, 2, grid) == pytest.approx(2.0, rel=1e-6)


def test_besov_coarse_grid():
    with pytest.raises(ValueError):
        besov_seminorm_estimate(lambda x: x, 0.5, 2, 2, np.linspace(0, 1, 5))


def test_class_params_validation():
    with pytest.raises(ValueError):
        ClassParams(s=0.4, p=2)  # s <= d/p
    with pytest.raises(ValueError):
        ClassParams(s=0.5, radius=0)
    with pytest.raises(ValueError):
        ClassParams(s=0.5, p=2, space="holder")


# -- bracket covers ----------------------------------------------------------


def test_zero_family_one_bracket():
    params = ClassParams(s=1.0, domain=(0.0, 1.0))
    fam = [WeightedFunction(lambda x: np.zeros_like(x), 0.0)]
    cover = bracket_cover(fam, 0.1, params, GEO)
    assert cover.count == 1
    chk = validate_cover(cover, fam, GEO)
    assert chk["ordered"] and chk["covered"] and chk["width_ok"]


def test_constant_family_count_scales_inverse_delta():
    params = ClassParams(s=1.0, domain=(0.0, 1.0))
    counts = []
    for delta in (0.4, 0.2, 0.1, 0.05):
        fam = constant_family(np.linspace(-1, 1, 2001))
        cover = bracket_cover(fam, delta, params, GEO)
        chk = validate_cover(cover, fam, GEO)
        assert chk["covered"] and chk["width_ok"]
        assert cover.count == 2 * cover.net.V + 1
        counts.append(cover.count)
    ratios = np.diff(np.log(counts)) / math.log(2)
    assert np.all(np.abs(ratios - 1) < 0.2)


def test_width_formula_positive_theta():
    params = ClassParams(s=0.8, theta=1.0, radius=1.0)
    seq = MixingSequence.geometric(0.3)
    net = net_parameters(0.1, params, seq)
    # constant envelope: width 2 delta' sqrt(sum beta)
    assert 2 * net.delta_prime * math.sqrt(1 / 0.7) == pytest.approx(0.1, rel=1e-12)


@pytest.mark.parametrize(
    "params,law",
    [
        (ClassParams(s=0.8, domain=(-1.0, 2.0)), None),
        (ClassParams(s=0.6, theta=2.0), None),
        (ClassParams(s=1.0, theta=0.5), None),
        (ClassParams(s=0.8, theta=-1.0, gamma=0.5), stats.norm()),
    ],
)
def test_random_members_are_covered(params, law):
    rng = np.random.default_rng(1)
    dom = params.domain or (-4.0, 4.0)
    fam = holder_ball_members(rng, 15, params.s, params.radius, dom, params.theta)
    for delta in (0.3, 0.1):
        cover = bracket_cover(fam, delta, params, GEO, law)
        chk = validate_cover(cover, fam, GEO, law)
        assert chk["ordered"] and chk["covered"] and chk["width_ok"], chk


def test_members_within_radius():
    rng = np.random.default_rng(5)
    grid = np.linspace(0, 1, 801)
    for fw in holder_ball_members(rng, 10, 0.7, 1.0, (0.0, 1.0)):
        # the ball bounds sup|g| and [g]_s separately; the estimate is their sum
        sup = float(np.max(np.abs(fw(grid))))
        assert sup <= 1.0 + 1e-12
        assert holder_norm_estimate(fw, 0.7, grid) - sup <= 1.0 + 1e-9


def test_divergent_envelope():
    params = ClassParams(s=0.8, theta=0.5)
    with pytest.raises(NormDivergent):
        net_parameters(0.1, params, MixingSequence([1.0, 0.5], tail_power=0.5))


def test_unbounded_needs_gamma():
    with pytest.raises(ValueError):
        net_parameters(0.1, ClassParams(s=0.8, theta=-1.0), GEO)


def test_higher_smoothness_not_supported():
    with pytest.raises(NotImplementedError):
        net_parameters(0.1, ClassParams(s=1.5, domain=(0, 1)), GEO)


@given(st.floats(0.6, 1.0), st.floats(0.05, 0.5), st.floats(1.05, 3.0))
def test_net_size_nonincreasing_in_delta(s, delta, factor):
    params = ClassParams(s=s, domain=(0.0, 1.0))
    h_small = net_log_count(net_parameters(delta, params, GEO))
    h_large = net_log_count(net_parameters(delta * factor, params, GEO))
    assert h_large <= h_small + 1e-9


# -- entropy rates -----------------------------------------------------------


def test_predicted_exponents():
    assert predicted_entropy_exponent(ClassParams(s=1.0, domain=(0, 1))) == 1.0
    assert predicted_entropy_exponent(ClassParams(s=0.5, theta=1.0)) == 2.0
    assert predicted_entropy_exponent(ClassParams(s=2.0, p=2, theta=1.0)) == pytest.approx(2 / 3)
    assert predicted_entropy_exponent(ClassParams(s=0.8, theta=0.8)) is None


def test_entropy_fit_c1_ball():
    params = ClassParams(s=1.0, domain=(0.0, 1.0))
    fit = entropy_scaling(None, params, [0.2, 0.1, 0.05, 0.02], GEO)
    assert abs(fit.fitted - 1.0) < 0.2


def test_entropy_grid_validation():
    params = ClassParams(s=1.0, domain=(0.0, 1.0))
    with pytest.raises(ValueError):
        entropy_scaling(None, params, [0.2, 0.1, 0.05], GEO)
    with pytest.raises(ValueError):
        entropy_scaling(None, params, [0.2, 0.15, 0.12, 0.1], GEO)


# -- condition oracle --------------------------------------------------------

GEO_REP = summability_report(GEO, 2.0)


def test_oracle_case_i():
    v = fclt_condition_oracle(ClassParams(s=0.8, theta=1.0), GEO_REP)
    assert v.status("fclt_i") == "holds"


def test_oracle_small_s():
    v = fclt_condition_oracle(ClassParams(s=0.4, theta=1.0), GEO_REP)
    assert v.holds == []
    assert "s/d > 1/2" in v.status("fclt_i")


def test_oracle_two_dimensional():
    v = fclt_condition_oracle(ClassParams(s=1.5, p=2, d=2, theta=0.75), GEO_REP)
    assert v.status("fclt_i") == "holds"


def test_oracle_undetermined_without_mixing():
    v = fclt_condition_oracle(ClassParams(s=0.8, theta=1.0))
    assert v.kind("fclt_i") == "undetermined"


def test_oracle_boundary():
    v = fclt_condition_oracle(ClassParams(s=0.8, theta=0.8), GEO_REP)
    assert v.status("fclt_i") == "boundary"


@given(st.floats(0.55, 1.0), st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_oracle_monotone_in_gamma_above(s, g1, g2):
    # raising gamma never removes a clause that asks for gamma > s - d/p
    lo, hi = sorted((g1, g2))
    mom = MomentInfo(True, True, True)
    v_lo = fclt_condition_oracle(ClassParams(s=s, theta=0.0, gamma=lo), GEO_REP, mom)
    v_hi = fclt_condition_oracle(ClassParams(s=s, theta=0.0, gamma=hi), GEO_REP, mom)
    for clause in ("fclt_iii", "fclt_moment_beta_i", "fclt_2r_i"):
        if v_lo.status(clause) == "holds":
            assert v_hi.status(clause) == "holds"


@given(st.floats(0.55, 1.0), st.floats(0.1, 3.0), st.booleans())
def test_oracle_monotone_in_summability(s, theta, bounded):
    params = ClassParams(s=s, theta=theta, domain=(0, 1) if bounded else None)
    weak = fclt_condition_oracle(params, summability_report(MixingSequence([1.0, 0.5]), 2.0))
    strong = fclt_condition_oracle(params, GEO_REP)
    assert set(weak.holds) <= set(strong.holds)


def test_hausman_class_oracle():
    mom = MomentInfo(shifted_norm_finite=True)
    v = hausman_class_oracle(1.0, -2.0, 2.0, GEO_REP, mom)
    assert v.holds == ["hc1_i"]
    v = hausman_class_oracle(1.0, -2.0, 0.7, GEO_REP, mom)
    assert v.holds == ["hc1_iii"]
    v = hausman_class_oracle(1.0, -1.0, 2.0, GEO_REP, mom)
    assert v.holds == []
    assert hausman_class_oracle(1.0, -2.0, 1.0, GEO_REP, mom).status("hc1_i") == "boundary"
