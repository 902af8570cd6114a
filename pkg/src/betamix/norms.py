"""The beta-mixing L2 norm, quantile functions, moments and long-run variances.

The norm is

    ||f||_{2,beta}^2 = int_0^1 beta^{-1}(u) Q_f(u)^2 du
                     = sum_{m >= 0} int_0^{beta_m} Q_f(u)^2 du,

and every routine here evaluates it through the second (layer-sum) form, in
which each layer only needs the primitive G(b) = int_0^b Q^2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate, optimize, stats

from .mixing import FiniteMarkov, GaussianAR1, MixingSequence, SamplePath, summability_report

__all__ = [
    "FiniteLaw",
    "AnalyticTail",
    "StepQuantile",
    "AnalyticQuantile",
    "BetaInverse",
    "NormResult",
    "quantile_of",
    "beta_inverse",
    "norm_2beta",
    "norm_l2",
    "norm_2beta_sup_check",
    "weight_quantile",
    "moment_norm_2rP",
    "moment_sufficiency",
    "default_bandwidth",
    "hac_variance",
    "longrun_variance",
    "longrun_covariance",
    "longrun_matrix",
    "autocovariance_abs_sum",
]

_QUAD_ABS = 1e-10


# ---------------------------------------------------------------------------
# laws and quantile functions


@dataclass(frozen=True)
class FiniteLaw:
    """Discrete law on finitely many points in R (or R^d, one row per atom)."""

    points: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        pr = np.asarray(self.probs, dtype=float)
        if pts.shape[0] == 0:
            raise ValueError("empty support")
        if pr.shape != (pts.shape[0],) or np.any(pr < 0) or not np.isclose(pr.sum(), 1.0, atol=1e-12):
            raise ValueError("probabilities must be >= 0, one per point, summing to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", pr)

    @classmethod
    def from_markov(cls, spec: FiniteMarkov) -> "FiniteLaw":
        return cls(spec.values, spec.stationary)


@dataclass(frozen=True)
class AnalyticTail:
    """Law of |f(chi)| given by its survival function t -> P(|f| > t).

    ``quantile`` may supply the inverse in closed form; otherwise it is found
    by bracketing root search.
    """

    survival: Callable[[float], float]
    quantile: Optional[Callable[[float], float]] = None


@dataclass(frozen=True)
class StepQuantile:
    """Q(u) = values[i] on [cum[i-1], cum[i]) with values strictly decreasing."""

    values: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        w = np.asarray(self.masses, dtype=float)
        if v.size == 0 or v.shape != w.shape:
            raise ValueError("need matching nonempty values and masses")
        if np.any(v < 0) or np.any(np.diff(v) >= 0):
            raise ValueError("step quantile values must be >= 0 and strictly decreasing")
        if np.any(w <= 0):
            raise ValueError("masses must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "masses", w / w.sum())

    @property
    def cum(self) -> np.ndarray:
        return np.cumsum(self.masses)

    @property
    def sup(self) -> float:
        return float(self.values[0])

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.cum, u, side="right")
        return np.where(idx < self.values.size, self.values[np.minimum(idx, self.values.size - 1)], 0.0)

    def primitive(self, b):
        """G(b) = int_0^b Q(u)^2 du (exact, piecewise linear and concave)."""
        b = np.clip(np.asarray(b, dtype=float), 0.0, 1.0)
        c = np.concatenate([[0.0], self.cum])
        sq = self.values**2
        # contribution of each piece: sq_i * clip(b - c_{i-1}, 0, mass_i)
        part = np.clip(b[..., None] - c[:-1], 0.0, self.masses)
        return np.sum(part * sq, axis=-1)


@dataclass(frozen=True)
class AnalyticQuantile:
    """Q(u) as a closure; integrals use adaptive quadrature."""

    func: Callable[[float], float]

    def __call__(self, u):
        return np.vectorize(self.func, otypes=[float])(u)

    def primitive(self, b) -> float:
        b = float(min(max(b, 0.0), 1.0))
        if b == 0.0:
            return 0.0
        with np.errstate(all="ignore"):
            val, _ = integrate.quad(lambda u: self.func(u) ** 2, 0.0, b, epsabs=_QUAD_ABS, epsrel=1e-12, limit=500)
        return float(val)

    @property
    def sup(self) -> float:
        return float(self.func(1e-300))


QuantileFn = Union[StepQuantile, AnalyticQuantile]


def _step_from_atoms(vals: np.ndarray, probs: np.ndarray) -> StepQuantile:
    a = np.abs(np.asarray(vals, dtype=float))
    p = np.asarray(probs, dtype=float)
    keep = p > 0
    a, p = a[keep], p[keep]
    if a.size == 0:
        raise ValueError("empty support")
    uniq, inv = np.unique(a, return_inverse=True)
    mass = np.bincount(inv, weights=p, minlength=uniq.size)
    order = np.argsort(-uniq)
    return StepQuantile(uniq[order], mass[order])


def quantile_of(distribution, f: Optional[Callable] = None) -> QuantileFn:
    """Quantile function of |f(chi)|, Q(u) = inf{t : P(|f(chi)| > t) <= u}.

    ``distribution`` may be a ``FiniteLaw`` (exact step function), a
    ``FiniteMarkov`` spec (its stationary law), a 1-d array of draws (the
    empirical law), or an ``AnalyticTail`` describing |f(chi)| directly
    (``f`` is then ignored).
    """
    if isinstance(distribution, AnalyticTail):
        if distribution.quantile is not None:
            return AnalyticQuantile(distribution.quantile)
        S = distribution.survival

        def q(u):
            if S(0.0) <= u:
                return 0.0
            hi = 1.0
            while S(hi) > u:
                hi *= 2.0
                if hi > 1e300:
                    return math.inf
            return optimize.brentq(lambda t: S(t) - u, 0.0, hi, xtol=1e-14, rtol=1e-14)

        return AnalyticQuantile(q)
    if isinstance(distribution, FiniteMarkov):
        distribution = FiniteLaw.from_markov(distribution)
    if isinstance(distribution, FiniteLaw):
        pts = distribution.points
        vals = np.array([f(x) for x in pts], dtype=float) if f is not None else pts.astype(float)
        return _step_from_atoms(vals, distribution.probs)
    sample = np.asarray(distribution, dtype=float)
    if sample.size == 0:
        raise ValueError("empty support")
    vals = np.asarray(f(sample), dtype=float) if f is not None else sample
    return _step_from_atoms(vals.ravel(), np.full(vals.size, 1.0 / vals.size))


# ---------------------------------------------------------------------------
# beta inverse


@dataclass(frozen=True)
class BetaInverse:
    """u -> #{m >= 0 : beta_m > u}, a nonincreasing integer step function."""

    seq: MixingSequence

    def __call__(self, u: float) -> float:
        v = self.seq.values
        count = int(np.sum(v > u))
        last = float(v[-1])
        if last <= u:
            return count
        if self.seq.tail_rate is not None:
            if u <= 0:
                return math.inf
            # last * rho^j > u  <=>  j < log(u/last)/log(rho)
            j = math.log(u / last) / math.log(self.seq.tail_rate)
            return count + max(0, math.ceil(j) - 1)
        if self.seq.tail_power is not None:
            if u <= 0:
                return math.inf
            M, p = self.seq.M, self.seq.tail_power
            # last * (M/m)^p > u  <=>  m < M (last/u)^(1/p)
            mmax = M * (last / u) ** (1.0 / p)
            return count + max(0, math.ceil(mmax) - 1 - M)
        return count

    def breakpoints(self) -> np.ndarray:
        """Distinct stored beta values in increasing order (jump locations)."""
        return np.unique(self.seq.values)


def beta_inverse(seq: MixingSequence) -> BetaInverse:
    return BetaInverse(seq)


# ---------------------------------------------------------------------------
# the norm


@dataclass(frozen=True)
class NormResult:
    """Value of ||f||_{2,beta} and how it was obtained.

    status: "exact" (all layers summed, closed-form tail included),
    "truncated" (stored layers only; a lower bound) or "divergent" (value inf).
    """

    value: float
    squared: float
    status: str

    def __float__(self):
        return self.value

    @property
    def finite(self) -> bool:
        return self.status != "divergent"


def _tail_beta_sum(seq: MixingSequence, m0: int) -> float:
    """sum_{m >= m0} beta_m for m0 > M under the tail model."""
    last = float(seq.values[-1])
    M = seq.M
    if last == 0.0 or not seq.has_tail:
        return 0.0
    if seq.tail_rate is not None:
        rho = seq.tail_rate
        return last * rho ** (m0 - M) / (1.0 - rho)
    p = seq.tail_power
    if p <= 1:
        return math.inf
    from mpmath import zeta

    return last * M**p * float(zeta(p, m0))


def _tail_first_below(seq: MixingSequence, level: float) -> int:
    """Smallest m > M with beta_m < level (tail model assumed)."""
    last = float(seq.values[-1])
    M = seq.M
    if last < level:
        return M + 1
    if seq.tail_rate is not None:
        j = math.floor(math.log(level / last) / math.log(seq.tail_rate)) + 1
        return M + max(1, j)
    mcut = M * (last / level) ** (1.0 / seq.tail_power)
    return max(M + 1, math.floor(mcut) + 1)


_MAX_EXPLICIT = 2_000_000


def norm_2beta(q: QuantileFn, seq: MixingSequence) -> NormResult:
    """||f||_{2,beta} from the quantile function of |f| via the layer sum."""
    betas = seq.values
    if isinstance(q, StepQuantile):
        head = math.fsum(q.primitive(betas))
        if not seq.has_tail or betas[-1] == 0.0:
            status = "truncated" if seq.is_truncated else "exact"
            return NormResult(math.sqrt(head), head, status)
        # beyond the first mass G is linear: G(b) = v_1^2 b for b <= c_1
        c1 = float(q.cum[0])
        m_star = _tail_first_below(seq, c1)
        mid = 0.0
        if m_star > seq.M + 1:
            if m_star - seq.M > _MAX_EXPLICIT:
                return NormResult(math.inf, math.inf, "divergent")
            ms = np.arange(seq.M + 1, m_star)
            mid = math.fsum(q.primitive(np.array([seq[m] for m in ms])))
        tail = q.values[0] ** 2 * _tail_beta_sum(seq, m_star)
        total = head + mid + tail
        if not math.isfinite(total):
            return NormResult(math.inf, math.inf, "divergent")
        return NormResult(math.sqrt(total), total, "exact")

    # analytic quantile: layers until they are negligible
    terms = [q.primitive(b) for b in betas]
    if any(not math.isfinite(t) for t in terms):
        return NormResult(math.inf, math.inf, "divergent")
    total = math.fsum(terms)
    status = "truncated" if seq.is_truncated else "exact"
    if seq.has_tail and betas[-1] > 0:
        if seq.tail_power is not None and seq.tail_power <= 1:
            return NormResult(math.inf, math.inf, "divergent")
        m = seq.M + 1
        status = "truncated"
        while m - seq.M <= 100_000:
            t = q.primitive(seq[m])
            total += t
            if t <= 1e-17 * max(total, 1e-300):
                status = "exact"
                break
            m += 1
    return NormResult(math.sqrt(total), total, status)


def norm_l2(q: QuantileFn) -> float:
    """||f||_{2,P} = sqrt(int_0^1 Q^2)."""
    g = q.primitive(1.0)
    return math.sqrt(float(g))


def norm_2beta_sup_check(f: Callable, spec: FiniteMarkov, seq: MixingSequence) -> dict:
    """Compare the layer-sum norm with sup_b sqrt(E[b f^2]).

    b ranges over integer random variables with P(b > n) = beta_n, jointly
    distributed with chi in any way.  Over a finite state space the supremum
    is a transportation LP between the law of b and the stationary law, which
    is solved directly.  Sequences with an infinite tail are cut after the
    stored values (P(b = M+1) = beta_M).
    """
    if not isinstance(spec, FiniteMarkov):
        raise TypeError("the supremum representation is only computable for finite state chains")
    if seq.values[0] < 1.0:
        raise ValueError("the coupling needs beta_0 = 1")
    stored = MixingSequence(seq.values)
    q = quantile_of(spec, f)
    layer = norm_2beta(q, stored)

    vals = np.abs(np.array([f(x) for x in spec.values], dtype=float)) ** 2
    pi = spec.stationary
    b = np.append(seq.values, 0.0)
    pb = b[:-1] - b[1:]  # P(b = n) for n = 1..M+1
    levels = np.arange(1, pb.size + 1, dtype=float)
    keep_b = pb > 0
    pb, levels = pb[keep_b], levels[keep_b]
    nb, ns = pb.size, pi.size
    # variables w[n, i]; maximise sum n * f_i^2 * w
    c = -(levels[:, None] * vals[None, :]).ravel()
    A_eq = np.zeros((nb + ns, nb * ns))
    for n in range(nb):
        A_eq[n, n * ns : (n + 1) * ns] = 1.0
    for i in range(ns):
        A_eq[nb + i, i::ns] = 1.0
    b_eq = np.concatenate([pb, pi])
    res = optimize.linprog(c, A_eq=A_eq[:-1], b_eq=b_eq[:-1], bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"coupling LP failed: {res.message}")
    sup_val = math.sqrt(max(-res.fun, 0.0))
    return {"norm": layer.value, "sup": sup_val, "abs_diff": abs(layer.value - sup_val)}


# ---------------------------------------------------------------------------
# moments


def weight_quantile(law, exponent: float) -> QuantileFn:
    """Quantile function of <chi>^exponent = (1 + chi^2)^exponent.

    ``law`` may be a FiniteLaw/FiniteMarkov, a sample array, or a normal
    distribution (``scipy.stats.norm`` frozen, or a GaussianAR1 spec whose
    stationary marginal is used).  Only exponent >= 0 is supported for
    continuous laws.
    """
    if isinstance(law, GaussianAR1):
        law = stats.norm(0.0, law.marginal_sd)
    if hasattr(law, "dist") and getattr(law.dist, "name", None) == "norm":
        mu, sd = law.mean(), law.std()
        if mu != 0:
            raise ValueError("closed-form weight quantile needs a centred normal law")
        if exponent < 0:
            raise ValueError("continuous laws need exponent >= 0")

        def q(u):
            # |chi| > t with prob 2(1 - Phi(t/sd))
            if u >= 1:
                return 1.0 if exponent >= 0 else 0.0
            t = sd * stats.norm.isf(u / 2.0)
            return (1.0 + t * t) ** exponent

        return AnalyticQuantile(q)

    def w(x):
        x = np.asarray(x, dtype=float)
        sq = x**2 if x.ndim <= 1 else np.sum(x**2, axis=-1)
        return (1.0 + sq) ** exponent

    if isinstance(law, FiniteMarkov):
        law = FiniteLaw.from_markov(law)
    if isinstance(law, FiniteLaw):
        vals = w(law.points if law.points.ndim > 1 else law.points)
        return _step_from_atoms(np.atleast_1d(vals), law.probs)
    sample = np.asarray(law, dtype=float)
    return _step_from_atoms(np.atleast_1d(w(sample)), np.full(len(sample), 1.0 / len(sample)))


def moment_norm_2rP(distribution, exponent: float, r: float) -> float:
    """||<chi>^exponent||_{2r,P} = (E[<chi>^(2 r exponent)])^(1/(2r)).

    With exponent = (gamma - theta)/2 this is the moment in the bounded-class
    CLT condition.  Returns inf when the expectation diverges.
    """
    if not r > 1:
        raise ValueError("r must be > 1")
    power = 2.0 * r * exponent
    if isinstance(distribution, GaussianAR1):
        distribution = stats.norm(0.0, distribution.marginal_sd)
    if isinstance(distribution, FiniteMarkov):
        distribution = FiniteLaw.from_markov(distribution)
    if isinstance(distribution, FiniteLaw):
        pts = distribution.points
        sq = pts**2 if pts.ndim == 1 else np.sum(pts**2, axis=1)
        m = float(np.sum(distribution.probs * (1.0 + sq) ** power))
    elif hasattr(distribution, "expect"):
        # quad only warns on a divergent integral; treat that as infinite
        with np.errstate(all="ignore"), warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                m = float(distribution.expect(lambda x: (1.0 + x * x) ** power, epsabs=_QUAD_ABS, epsrel=1e-12, limit=500))
            except (OverflowError, ValueError, integrate.IntegrationWarning):
                m = math.inf
        if not math.isfinite(m):
            m = math.inf
    else:
        x = np.asarray(distribution, dtype=float)
        if x.size == 0:
            raise ValueError("empty support")
        sq = x**2 if x.ndim == 1 else np.sum(x**2, axis=1)
        m = float(np.mean((1.0 + sq) ** power))
    if not math.isfinite(m):
        return math.inf
    return m ** (1.0 / (2.0 * r))


def moment_sufficiency(seq: MixingSequence, r: float, moment: Optional[float]) -> tuple[bool, dict]:
    """Sufficient condition for a finite weighted beta-norm.

    Holds when sum_m m^(1/(r-1)) beta_m is finite and the 2r moment is finite.
    A ``moment`` of None or inf counts as not finite.
    """
    rep = summability_report(seq, r)
    moment_ok = moment is not None and math.isfinite(moment)
    ok = rep.weighted_finite and moment_ok
    return ok, {
        "r": r,
        "sum_weighted": rep.sum_weighted,
        "summability": rep.status,
        "moment": moment,
        "moment_finite": moment_ok,
    }


# ---------------------------------------------------------------------------
# long-run variance


def default_bandwidth(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def hac_variance(z: np.ndarray, bandwidth: Optional[int] = None, center: bool = True) -> np.ndarray:
    """Bartlett-kernel long-run covariance of the rows of z (n x k or length n).

    Returns a k x k matrix (a scalar for 1-d input).
    """
    z = np.asarray(z, dtype=float)
    one_d = z.ndim == 1
    Z = z[:, None] if one_d else z
    n = Z.shape[0]
    L = default_bandwidth(n) if bandwidth is None else int(bandwidth)
    if L < 0:
        raise ValueError("bandwidth must be >= 0")
    if L >= n:
        raise ValueError(f"bandwidth {L} must be smaller than the sample size {n}")
    if center:
        Z = Z - Z.mean(axis=0)
    S = Z.T @ Z / n
    for j in range(1, L + 1):
        w = 1.0 - j / (L + 1.0)
        C = Z[j:].T @ Z[:-j] / n
        S += w * (C + C.T)
    S = 0.5 * (S + S.T)
    return float(max(S[0, 0], 0.0)) if one_d else S


def _state_vector(f, spec: FiniteMarkov) -> np.ndarray:
    if callable(f):
        return np.array([f(x) for x in spec.values], dtype=float)
    g = np.asarray(f, dtype=float)
    if g.shape != (spec.n_states,):
        raise ValueError("need one function value per state")
    return g


def _markov_lrv(g: np.ndarray, spec: FiniteMarkov) -> float:
    P, pi = spec.transition, spec.stationary
    k = P.shape[0]
    gc = g - pi @ g
    Z = np.linalg.inv(np.eye(k) - P + np.outer(np.ones(k), pi))
    var = float(pi @ gc**2)
    return float(2.0 * (pi * gc) @ (Z @ gc) - var)


_HERMITE_NODES = 160
_HERMITE_TERMS = 80


def _gaussian_ar1_lrv(f: Callable, spec: GaussianAR1) -> float:
    # Mehler: Cov(f(X_0), f(X_t)) = sum_k c_k^2 k! a^(t k) for f(sd z) = sum c_k He_k(z)
    z, w = np.polynomial.hermite_e.hermegauss(_HERMITE_NODES)
    w = w / w.sum()
    fz = np.asarray(f(spec.marginal_sd * z), dtype=float)
    total = 0.0
    a = spec.a
    # orthonormal Hermite polynomials h_k = He_k / sqrt(k!)
    h_prev, h = np.ones_like(z), z.copy()
    for k in range(1, _HERMITE_TERMS + 1):
        coef2 = float(w @ (fz * h)) ** 2  # c_k^2 k!
        ak = a**k
        total += coef2 * (1.0 + ak) / (1.0 - ak)
        h_prev, h = h, (z * h - math.sqrt(k) * h_prev) / math.sqrt(k + 1)
    return total


def longrun_variance(f, source, lags: Optional[int] = None) -> float:
    """Gamma(f, f) = sum_t Cov(f(chi_0), f(chi_t)).

    ``source`` is a FiniteMarkov spec (exact, via the fundamental matrix), a
    GaussianAR1 spec (exact up to Hermite truncation) or a SamplePath / raw
    array (Bartlett HAC with bandwidth ``lags``).
    """
    if isinstance(source, FiniteMarkov):
        return _markov_lrv(_state_vector(f, source), source)
    if isinstance(source, GaussianAR1):
        return _gaussian_ar1_lrv(f, source)
    if isinstance(source, SamplePath):
        obs = source.observations
    elif isinstance(source, np.ndarray):
        obs = source
    else:
        raise TypeError(f"no long-run variance for {type(source).__name__}; pass a sample path")
    vals = np.asarray(f(obs), dtype=float) if callable(f) else np.asarray(f, dtype=float)
    return hac_variance(vals, lags)


def longrun_covariance(f, g, source, lags: Optional[int] = None) -> float:
    """Gamma(f, g) by polarization: (Gamma(f+g) - Gamma(f-g)) / 4."""

    def add(a, b, sign):
        if callable(a) and callable(b):
            return lambda x: np.asarray(a(x), dtype=float) + sign * np.asarray(b(x), dtype=float)
        return np.asarray(a, dtype=float) + sign * np.asarray(b, dtype=float)

    return 0.25 * (longrun_variance(add(f, g, 1.0), source, lags) - longrun_variance(add(f, g, -1.0), source, lags))


def longrun_matrix(funcs: Sequence, source, lags: Optional[int] = None) -> np.ndarray:
    k = len(funcs)
    G = np.empty((k, k))
    for i in range(k):
        G[i, i] = longrun_variance(funcs[i], source, lags)
        for j in range(i + 1, k):
            G[i, j] = G[j, i] = longrun_covariance(funcs[i], funcs[j], source, lags)
    return G


def autocovariance_abs_sum(f, spec: FiniteMarkov, tol: float = 1e-16, max_lag: int = 100_000) -> float:
    """sum_{t in Z} |Cov(f(chi_0), f(chi_t))| for a finite chain."""
    g = _state_vector(f, spec)
    P, pi = spec.transition, spec.stationary
    gc = g - pi @ g
    var = float(pi @ gc**2)
    total = var
    h = gc.copy()
    for _ in range(max_lag):
        # re-centre so rounding does not leave a constant that never decays
        h = P @ h
        h -= pi @ h
        c = float((pi * gc) @ h)
        total += 2.0 * abs(c)
        if np.max(np.abs(h)) < tol * max(1.0, np.max(np.abs(gc))):
            break
    return total
