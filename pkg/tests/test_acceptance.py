"""Acceptance gate.  Each test records one PASS/FAIL line for the terminal summary."""
import math
import time

import numpy as np
import pytest

from betamix import classes as C
from betamix import harness
from betamix.empirical import fidi_experiment
from betamix.hausman import SieveBasis, TimeSeriesSample, design_blocks, series_psi1, z_estimators
from betamix.mixing import FiniteMarkov, MixingSequence, exact_beta_markov, summability_report
from betamix.norms import (
    AnalyticTail,
    FiniteLaw,
    StepQuantile,
    autocovariance_abs_sum,
    longrun_variance,
    norm_2beta,
    norm_l2,
    quantile_of,
)

from pathlib import Path

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def random_sequence(rng):
    kind = rng.integers(3)
    if kind == 0:
        return MixingSequence.geometric(float(rng.uniform(0.01, 0.95)))
    vals = np.concatenate([[1.0], np.cumprod(rng.uniform(0.0, 1.0, rng.integers(1, 10)))])
    if kind == 1:
        return MixingSequence(vals)
    return MixingSequence(np.maximum(vals, 1e-6), tail_power=float(rng.uniform(1.2, 4.0)))


def random_chain(rng, k):
    P = rng.random((k, k)) + 0.02
    return P / P.sum(axis=1, keepdims=True)


def test_ac1_constant_identity(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(50):
        c = float(rng.uniform(-10, 10))
        seq = random_sequence(rng)
        got = norm_2beta(StepQuantile(np.array([abs(c)]), np.array([1.0])), seq).value
        want = abs(c) * math.sqrt(summability_report(seq, 2.0).sum_beta)
        worst = max(worst, abs(got - want) / max(1.0, want))
    dt = time.perf_counter() - t0
    ok = acceptance("AC1 constant-norm identity", worst <= 1e-12 and dt < 1, f"max rel err {worst:.2e} over 50 pairs, {dt:.2f}s")
    assert ok


def test_ac2_iid_reduction(acceptance):
    t0 = time.perf_counter()
    iid = MixingSequence.iid()
    rng = np.random.default_rng(102)
    errs = []
    for _ in range(20):
        k = int(rng.integers(1, 7))
        law = FiniteLaw(rng.normal(size=k) * 3, rng.dirichlet(np.ones(k)))
        q = quantile_of(law, lambda x: x)
        errs.append(abs(norm_2beta(q, iid).value - math.sqrt(float(law.probs @ law.points**2))))
    tails = [
        (AnalyticTail(lambda t: math.exp(-t), lambda u: -math.log(u)), math.sqrt(2.0)),
        (AnalyticTail(lambda t: max(0.0, 1 - t), lambda u: 1 - u), math.sqrt(1 / 3)),
        (AnalyticTail(lambda t: math.exp(-2 * t), lambda u: -math.log(u) / 2), math.sqrt(0.5)),
    ]
    for tail, l2 in tails:
        q = quantile_of(tail)
        errs.append(abs(norm_2beta(q, iid).value - l2))
        errs.append(abs(norm_l2(q) - l2))
    dt = time.perf_counter() - t0
    worst = max(errs)
    ok = acceptance("AC2 iid reduction", worst <= 1e-8 and dt < 1, f"max abs err {worst:.2e} (20 step, 3 analytic), {dt:.2f}s")
    assert ok


def test_ac3_two_state_closed_form(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(100):
        p, q = rng.uniform(0.01, 0.99, 2)
        P = np.array([[1 - p, p], [q, 1 - q]])
        pi0, pi1, lam = q / (p + q), p / (p + q), 1 - p - q
        for m in range(1, 51):
            worst = max(worst, abs(exact_beta_markov(P, m) - 2 * pi0 * pi1 * abs(lam) ** m))
    dt = time.perf_counter() - t0
    ok = acceptance("AC3 two-state beta closed form", worst <= 1e-12 and dt < 5, f"max abs err {worst:.2e}, {dt:.2f}s")
    assert ok


def test_ac4_covariance_inequality(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(104)
    violations, tightest = 0, 0.0
    chains = 120
    for _ in range(chains):
        k = int(rng.integers(2, 6))
        spec = FiniteMarkov(random_chain(rng, k), rng.normal(size=k) * rng.uniform(0.1, 5))
        f = lambda x: x  # noqa: E731
        bound = 4 * norm_2beta(quantile_of(FiniteLaw.from_markov(spec), f), spec.mixing_sequence()).squared
        G = longrun_variance(f, spec)
        A = autocovariance_abs_sum(f, spec)
        violations += int(G > bound * (1 + 1e-12)) + int(A > bound * (1 + 1e-12))
        tightest = max(tightest, A / bound)
    dt = time.perf_counter() - t0
    ok = acceptance(
        "AC4 covariance inequality", violations == 0 and dt < 30, f"{violations} violations on {chains} chains, max sum|Cov|/bound {tightest:.3f}, {dt:.2f}s"
    )
    assert ok


def test_ac5_brackets_and_entropy(acceptance):
    t0 = time.perf_counter()
    seq = MixingSequence.geometric(0.5)
    parts, ok = [], True
    for i, s in enumerate((0.6, 0.8, 1.0)):
        params = C.ClassParams(s=s, domain=(0.0, 1.0))

        def gen(delta, s=s, i=i):
            return C.holder_ball_members(np.random.default_rng([105, i, int(delta * 1e6)]), 20, s, 1.0, (0.0, 1.0))

        fit = C.entropy_scaling(gen, params, [0.2, 0.1, 0.05, 0.02], seq)
        rel = abs(fit.fitted - 1 / s) * s
        ok &= bool(fit.covers_valid) and rel <= 0.2
        parts.append(f"s={s}: slope {fit.fitted:.3f} vs {1 / s:.3f}, covers {'valid' if fit.covers_valid else 'INVALID'}")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    assert acceptance("AC5 bracket validity and entropy rates", ok, "; ".join(parts) + f", {dt:.2f}s")


def test_ac6_fidi_clt(acceptance):
    t0 = time.perf_counter()
    spec = FiniteMarkov(np.array([[0.8, 0.2], [0.3, 0.7]]), np.array([0.0, 1.0]))
    res = fidi_experiment([lambda x: x], spec, 4096, 2000, 7)
    ratio, pv = float(res.var_ratio[0]), float(res.ks_pvalue[0])
    dt = time.perf_counter() - t0
    ok = abs(ratio - 1) <= 0.1 and pv > 0.01 and dt < 120
    assert acceptance("AC6 fidi CLT", ok, f"Var ratio {ratio:.4f}, KS p {pv:.3f}, {dt:.1f}s")


@pytest.fixture(scope="module")
def size_result():
    cfg = harness.load_config(str(CONFIGS / "size.ini"), {"threads": 4}, env={})
    t0 = time.perf_counter()
    return harness.run_size(cfg), time.perf_counter() - t0


def test_ac7_size(acceptance, size_result):
    res, dt = size_result
    rows = {r["statistic"]: r for r in res.rows}
    h2, ks1 = rows["H2"]["rate"], rows["H1"]["ks_chi2_1"]
    ok = 0.035 <= h2 <= 0.065 and ks1 < 0.05 and dt < 300
    detail = f"H2 rate {h2:.4f}, H1 KS {ks1:.4f} (H1 rate {rows['H1']['rate']:.4f}, H_reg rate {rows['H_reg']['rate']:.4f}), {dt:.1f}s"
    assert acceptance("AC7 Hausman size", ok, detail)


def test_ac8_power(acceptance):
    cfg = harness.load_config(str(CONFIGS / "power.ini"), {"threads": 4}, env={})
    t0 = time.perf_counter()
    res = harness.run_power(cfg)
    dt = time.perf_counter() - t0
    cell = {(r["statistic"], r["c"]): r for r in res.rows}
    grid = sorted({r["c"] for r in res.rows})
    monotone, match, ordering = True, True, True
    worst_gap = 0.0
    for name in ("H1", "H2", "H_reg"):
        for c0, c1 in zip(grid, grid[1:]):
            a, b = cell[(name, c0)], cell[(name, c1)]
            monotone &= b["rate"] >= a["rate"] - 2 * math.hypot(a["se"], b["se"])
        for c in grid:
            gap = abs(cell[(name, c)]["rate"] - cell[(name, c)]["predicted"])
            worst_gap = max(worst_gap, gap)
            match &= gap <= 0.05
    for c in grid:
        reg = cell[("H_reg", c)]
        for name in ("H1", "H2"):
            ordering &= cell[(name, c)]["rate"] >= reg["rate"] - 2 * reg["se"]
    ok = monotone and match and ordering and dt < 600
    top = grid[-1]
    detail = (
        f"monotone={monotone}, max |emp-pred| {100 * worst_gap:.1f}pp, Z>=reg-2se={ordering}; "
        f"c={top:g}: H1 {cell[('H1', top)]['rate']:.3f}, H2 {cell[('H2', top)]['rate']:.3f}, H_reg {cell[('H_reg', top)]['rate']:.3f}, {dt:.1f}s"
    )
    assert acceptance("AC8 power and efficiency ordering", ok, detail)


def test_ac9_estimator_algebra(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(109)
    worst_series, worst_identity = 0.0, 0.0
    for _ in range(200):
        kappa = int(rng.integers(2, 7))
        n = int(rng.integers(kappa + 8, 200))
        x = rng.uniform(-1.5, 1.5, n)
        s = TimeSeriesSample(rng.normal(size=n) + np.sin(2 * x), x)
        basis = SieveBasis(kappa)
        X = np.column_stack([np.ones(n), x[:, None] ** np.arange(1, kappa + 1)[None, :]])
        full = np.linalg.lstsq(X, s.y, rcond=None)[0][1]
        b = design_blocks(s, basis)
        ser = series_psi1(s, basis, b)
        worst_series = max(worst_series, abs(ser - full) / max(abs(full), 1e-12))
        _, zk = z_estimators(s, basis, b)
        lhs, rhs = zk * b.D11, ser * b.schur
        worst_identity = max(worst_identity, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    dt = time.perf_counter() - t0
    # the identity is exact in real arithmetic; two divisions leave a few ulp
    ok = worst_series <= 1e-9 and worst_identity <= 1e-13 and dt < 10
    detail = f"series vs full regression rel {worst_series:.1e}, identity rel {worst_identity:.1e}, {dt:.2f}s"
    assert acceptance("AC9 estimator algebra", ok, detail)


GEO = summability_report(MixingSequence.geometric(0.5), 2.0)
POLY3 = summability_report(MixingSequence([1.0, 0.5], tail_power=3.0), 2.0)
POLY09 = summability_report(MixingSequence([1.0, 0.5], tail_power=0.9), 2.0)
MOM = C.MomentInfo(True, True, True)

ORACLE_TABLE = [
    ("i", C.ClassParams(s=0.8, theta=1.0), GEO, None, ["fclt_i"], {}),
    ("s_small", C.ClassParams(s=0.4, theta=1.0), GEO, None, [], {}),
    ("i_d2", C.ClassParams(s=1.5, p=2, d=2, theta=0.75), GEO, None, ["fclt_i"], {}),
    ("ii", C.ClassParams(s=2.0, p=2, theta=1.0), GEO, None, ["fclt_ii"], {}),
    ("iii", C.ClassParams(s=0.8, theta=0.0, gamma=1.0), GEO, MOM, ["fclt_iii", "fclt_moment_beta_i", "fclt_2r_i"], {}),
    ("iv", C.ClassParams(s=2.0, p=2, theta=-1.0, gamma=1.0), GEO, MOM, ["fclt_iv", "fclt_moment_beta_ii", "fclt_2r_ii"], {}),
    ("bounded", C.ClassParams(s=0.8, theta=0.0, domain=(0, 1)), GEO, None, ["fclt_bounded"], {}),
    ("mb_holder", C.ClassParams(s=0.8, theta=0.0, gamma=1.0, space="holder"), POLY3, MOM, ["fclt_iii", "fclt_moment_beta_i"], {}),
    ("2r", C.ClassParams(s=0.8, theta=0.5, gamma=1.0), POLY3, MOM, ["fclt_2r_i"], {}),
    ("bd_theta", C.ClassParams(s=0.8, theta=0.8), GEO, None, [], {"fclt_i": "boundary"}),
    ("bd_gamma", C.ClassParams(s=0.8, theta=0.0, gamma=0.8), GEO, MOM, [], {"fclt_iii": "boundary"}),
    ("div", C.ClassParams(s=0.8, theta=1.0), POLY09, None, [], {"fclt_i": "fails: sum of beta_m finite"}),
]


def test_ac10_condition_oracle(acceptance):
    t0 = time.perf_counter()
    bad = []
    for name, params, mix, mom, holds, statuses in ORACLE_TABLE:
        v = C.fclt_condition_oracle(params, mix, mom)
        if sorted(v.holds) != sorted(holds) or any(v.status(k) != want for k, want in statuses.items()):
            bad.append(name)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1
    assert acceptance("AC10 condition-oracle table", ok, f"{len(ORACLE_TABLE) - len(bad)}/{len(ORACLE_TABLE)} tuples match, {dt:.3f}s" + (f", mismatched {bad}" if bad else ""))
