"""Weighted Hoelder/Besov classes: norms, bracket covers, entropy rates, CLT conditions.

Conventions: <x> = 1 + |x|^2, and a function f belongs to the weighted class
with weight exponent theta when g = f <x>^(theta/2) belongs to the unweighted
class.  Covers are built for d = 1 and smoothness s in (0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .mixing import MixingSequence, SummabilityReport
from .norms import StepQuantile, norm_2beta, weight_quantile

__all__ = [
    "ClassParams",
    "WeightedFunction",
    "BracketCover",
    "EntropyFit",
    "MomentInfo",
    "OracleVerdict",
    "NormDivergent",
    "angle_weight",
    "holder_norm_estimate",
    "besov_seminorm_estimate",
    "holder_ball_members",
    "constant_family",
    "net_parameters",
    "net_log_count",
    "bracket_cover",
    "validate_cover",
    "predicted_entropy_exponent",
    "entropy_scaling",
    "fclt_condition_oracle",
    "hausman_class_oracle",
]


class NormDivergent(ValueError):
    """The bracket envelope has infinite beta-mixing norm."""


def angle_weight(x) -> np.ndarray:
    """<x> = 1 + |x|^2; the last axis holds coordinates when x is 2-d."""
    x = np.asarray(x, dtype=float)
    if x.ndim >= 2:
        return 1.0 + np.sum(x**2, axis=-1)
    return 1.0 + x**2


def _d_over_p(d: int, p: float) -> float:
    return 0.0 if math.isinf(p) else d / p


@dataclass(frozen=True)
class ClassParams:
    """Parameters of a bounded subset of a weighted function space.

    space: "besov", "sobolev" or "holder" (for which p = q = inf).
    gamma: auxiliary tail exponent, used when theta <= 0.
    domain: (lo, hi) when the underlying law lives on a bounded set.
    """

    s: float
    p: float = math.inf
    q: float = math.inf
    d: int = 1
    theta: float = 0.0
    gamma: Optional[float] = None
    radius: float = 1.0
    space: str = "besov"
    domain: Optional[tuple] = None

    def __post_init__(self):
        if self.space not in ("besov", "sobolev", "holder"):
            raise ValueError(f"unknown space {self.space!r}")
        if not self.s > 0 or self.d < 1:
            raise ValueError("need s > 0 and d >= 1")
        if not (1 <= self.p <= math.inf and 1 <= self.q <= math.inf):
            raise ValueError("p and q must lie in [1, inf]")
        if self.space == "sobolev" and not self.p > 1:
            raise ValueError("Sobolev classes need p > 1")
        if self.space == "holder" and not (math.isinf(self.p) and math.isinf(self.q)):
            raise ValueError("Hoelder classes use p = q = inf")
        if not self.s > _d_over_p(self.d, self.p):
            raise ValueError("need s > d/p")
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if self.domain is not None:
            lo, hi = self.domain
            if not hi > lo:
                raise ValueError("domain must be a nondegenerate interval")

    @property
    def s_eff(self) -> float:
        """s - d/p, the exponent the tail weight is compared with."""
        return self.s - _d_over_p(self.d, self.p)

    @property
    def envelope_gamma(self) -> Optional[float]:
        """gamma used by the bracket envelope.

        theta itself when theta > 0; on a bounded domain without a declared
        gamma also theta, which makes the envelope constant.
        """
        if self.theta > 0:
            return self.theta
        if self.gamma is None and self.bounded:
            return self.theta
        return self.gamma

    @property
    def bounded(self) -> bool:
        return self.domain is not None


@dataclass(frozen=True)
class WeightedFunction:
    """f with declared weighted sup bound K = sup |f(x) <x>^(theta/2)|."""

    func: Callable[[np.ndarray], np.ndarray]
    K: float
    label: str = ""

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


# ---------------------------------------------------------------------------
# norm estimates


def _pairwise_holder(g: np.ndarray, x: np.ndarray, s: float, chunk: int = 2048) -> float:
    best = 0.0
    n = x.size
    for i0 in range(0, n, chunk):
        xi = x[i0 : i0 + chunk, None]
        gi = g[i0 : i0 + chunk, None]
        dx = np.abs(xi - x[None, :])
        dg = np.abs(gi - g[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(dx > 0, dg / dx**s, 0.0)
        best = max(best, float(np.max(r)))
    return best


def holder_norm_estimate(f: Callable, s: float, grid, theta: float = 0.0) -> float:
    """Grid estimate of the weighted Hoelder norm of f (d = 1).

    For s <= 1: sup|g| + sup_{x != y} |g(x) - g(y)| / |x - y|^s with
    g = f <x>^(theta/2).  For 1 < s < 2 the derivative is taken by finite
    differences and sup|g| + sup|g'| + [g']_{s-1} is returned.  Being a
    maximum over grid points this never exceeds the true norm (up to the
    finite-difference error when s > 1).
    """
    x = np.sort(np.asarray(grid, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("empty grid")
    if not 0 < s < 2:
        raise ValueError("supported smoothness range is 0 < s < 2")
    g = np.asarray(f(x), dtype=float) * angle_weight(x) ** (theta / 2.0)
    if s <= 1:
        return float(np.max(np.abs(g))) + _pairwise_holder(g, x, s)
    if x.size < 3:
        raise ValueError("need at least 3 grid points for s > 1")
    dg = np.gradient(g, x)
    return float(np.max(np.abs(g)) + np.max(np.abs(dg))) + _pairwise_holder(dg, x, s - 1.0)


def _lp(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    a = np.abs(values)
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(a))
    return float(np.sum(weights * a**p) ** (1.0 / p))


def _trap_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    if n > 1:
        w[0] = w[-1] = h / 2.0
    return w


def besov_seminorm_estimate(f: Callable, s: float, p: float, q: float, grid) -> float:
    """Quadrature estimate of the second-difference Besov norm on a 1-d grid.

    sum_{k <= [s]^-} ||D^k f||_p + (int |z|^(-{s}^+ q - 1) ||Delta_z^2 D^m f||_p^q dz)^(1/q)
    where m = [s]^- is the largest integer below s and {s}^+ = s - m.  The
    grid must be uniform; z runs over multiples of the grid step (both signs),
    so |z| is bounded away from 0 by the step.  p or q = inf use maxima.
    """
    x = np.asarray(grid, dtype=float).ravel()
    if x.size < 8:
        raise ValueError("grid too coarse: need at least 8 points")
    if not 0 < s < 2:
        raise ValueError("supported smoothness range is 0 < s < 2")
    h = float(x[1] - x[0])
    if not h > 0 or not np.allclose(np.diff(x), h, rtol=1e-9, atol=1e-12):
        raise ValueError("grid must be uniform and increasing")
    m = 0 if s <= 1 else 1
    frac = s - m
    F = [np.asarray(f(x), dtype=float)]
    if m == 1:
        F.append(np.gradient(F[0], h))
    n = x.size
    w = _trap_weights(n, h)
    total = sum(_lp(Fk, w, p) for Fk in F)
    top = F[m]
    terms = []
    for k in range(1, (n - 1) // 2 + 1):
        d2 = top[2 * k :] - 2.0 * top[k:-k] + top[: n - 2 * k]
        nrm = _lp(d2, _trap_weights(d2.size, h), p)
        z = k * h
        terms.append((z, nrm))
    if not terms:
        return total
    if math.isinf(q):
        diff = max(z ** (-frac) * nrm for z, nrm in terms)
    else:
        # +z and -z give the same restricted norm in one dimension
        integral = 2.0 * sum(h * z ** (-frac * q - 1.0) * nrm**q for z, nrm in terms)
        diff = integral ** (1.0 / q)
    return float(total + diff)


# ---------------------------------------------------------------------------
# families


def holder_ball_members(
    rng: np.random.Generator,
    count: int,
    s: float,
    radius: float = 1.0,
    domain: tuple = (0.0, 1.0),
    theta: float = 0.0,
    n_terms: int = 4,
) -> list[WeightedFunction]:
    """Random members of {f : sup|g| <= R, [g]_s <= R}, g = f <x>^(theta/2).

    Half are sums b0 + sum_j a_j |x - c_j|^s with |b0| + sum|a_j| <= R (valid
    on any interval of length <= 1 around the c_j, sup |x - c|^s <= 1 there
    when the domain has unit length), half are sawtooth functions
    A dist(x, tau Z)^s + b0, which stress the net at the finest scale.
    """
    if not 0 < s <= 1:
        raise ValueError("members are generated for 0 < s <= 1")
    lo, hi = domain
    span = hi - lo
    out = []
    for i in range(count):
        if i % 2 == 0:
            c = rng.uniform(lo, hi, n_terms)
            raw = rng.uniform(-1.0, 1.0, n_terms + 1)
            # sup of |x - c|^s on the domain is span^s; keep both bounds <= R
            scale = max(1.0, span**s)
            raw *= rng.uniform(0.5, 1.0) * radius / (np.abs(raw[0]) + scale * np.abs(raw[1:]).sum())
            b0, a = float(raw[0]), raw[1:].copy()

            def g(x, b0=b0, a=a, c=c):
                # clipping to the domain is 1-Lipschitz, so the bounds hold on all of R
                xc = np.clip(np.asarray(x), lo, hi)
                return b0 + np.sum(a[:, None] * np.abs(xc[None, :] - c[:, None]) ** s, axis=0)

            label = "powersum"
        else:
            tau = float(rng.uniform(0.002, 0.3)) * span
            A = float(rng.uniform(0.5, 1.0)) * radius
            A = min(A, radius / (tau / 2.0) ** s)
            peak = A * (tau / 2.0) ** s
            b0 = float(rng.uniform(-1.0, 1.0)) * max(radius - peak, 0.0)
            shift = float(rng.uniform(0, tau))

            def g(x, tau=tau, A=A, b0=b0, shift=shift):
                y = np.mod(np.asarray(x) - shift, tau)
                return b0 + A * np.minimum(y, tau - y) ** s

            label = "sawtooth"

        def f(x, g=g):
            return g(x) * angle_weight(x) ** (-theta / 2.0)

        out.append(WeightedFunction(f, radius, label))
    return out


def constant_family(values: Sequence[float]) -> list[WeightedFunction]:
    return [WeightedFunction(lambda x, c=float(c): np.full(np.shape(x), c), abs(float(c)), f"const {c}") for c in values]


# ---------------------------------------------------------------------------
# bracket covers


@dataclass(frozen=True)
class NetParameters:
    """Grid-quantization net for the Hoelder ball of g = f <x>^(theta/2).

    eps: sup-norm accuracy for g; step: node spacing h with R (h/2)^s = eps/2;
    V: quantized levels run over -V..V; J: max jump between neighbours.
    """

    delta: float
    delta_prime: float
    envelope_norm: float
    eps: float
    step: float
    nodes: np.ndarray
    V: int
    J: int
    lo: float
    hi: float
    envelope_exponent: float


def _envelope_norm(params: ClassParams, seq: MixingSequence, law) -> float:
    gam = params.envelope_gamma
    if gam is None:
        raise ValueError("theta <= 0 needs gamma > 0 for the bracket envelope")
    e = (gam - params.theta) / 2.0
    if e == 0.0:
        res = norm_2beta(StepQuantile([1.0], [1.0]), seq)
    elif law is not None:
        res = norm_2beta(weight_quantile(law, e), seq)
    elif params.bounded:
        lo, hi = params.domain
        wmax = float(np.max(angle_weight(np.array([lo, hi, 0.0 if lo < 0 < hi else lo])) ** e))
        res = norm_2beta(StepQuantile([wmax], [1.0]), seq)
    else:
        raise ValueError("an unbounded class with gamma != theta needs the marginal law")
    if not res.finite or not math.isfinite(res.value):
        raise NormDivergent("envelope <x>^((gamma - theta)/2) has infinite beta-mixing norm")
    return res.value


def net_parameters(delta: float, params: ClassParams, seq: MixingSequence, law=None) -> NetParameters:
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if params.d != 1:
        raise NotImplementedError("bracket covers are implemented for d = 1")
    if not params.s <= 1:
        raise NotImplementedError("bracket covers are implemented for 0 < s <= 1")
    W = _envelope_norm(params, seq, law)
    dp = delta / (2.0 * W)
    R, s = params.radius, params.s
    gam = params.envelope_gamma
    if params.bounded:
        lo, hi = params.domain
    else:
        # outside [-L, L]: |f| <= R <x>^(-theta/2) <= dp <x>^((gamma-theta)/2)
        L = math.sqrt(max((R / dp) ** (2.0 / gam) - 1.0, 0.0))
        lo, hi = -L, L
    # |g - g_hat| <= eps must give |f - center| <= dp <x>^((gamma-theta)/2)
    wmin = float(np.min(angle_weight(np.array([lo, hi, min(max(0.0, lo), hi)])) ** (gam / 2.0)))
    eps = dp * min(wmin, 1.0) if gam < 0 else dp
    step = 2.0 * (eps / (2.0 * R)) ** (1.0 / s)
    K = max(1, math.ceil((hi - lo) / step - 1e-12))
    nodes = lo + (np.arange(K) + 0.5) * step
    V = int(math.floor(R / eps + 0.5))
    J = int(math.floor(2.0 ** (s - 1.0) + 1.0))
    return NetParameters(delta, dp, W, eps, step, nodes, V, J, lo, hi, (gam - params.theta) / 2.0)


def net_log_count(net: NetParameters) -> float:
    """log #{(q_1..q_K) : |q_k| <= V, |q_{k+1} - q_k| <= J}.

    This is the size of the whole net, an upper bound on the bracketing
    number of the ball.  Computed with a scaled transfer-matrix recursion.
    """
    n = 2 * net.V + 1
    v = np.ones(n)
    log_scale = 0.0
    for _ in range(net.nodes.size - 1):
        c = np.cumsum(np.concatenate([[0.0], v]))
        idx = np.arange(n)
        hi = np.minimum(idx + net.J, n - 1) + 1
        lo = np.maximum(idx - net.J, 0)
        v = c[hi] - c[lo]
        m = v.max()
        v /= m
        log_scale += math.log(m)
    return log_scale + math.log(v.sum())


@dataclass
class BracketCover:
    """Brackets [lower_i, upper_i] on ``grid`` with assignment of family members."""

    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    signatures: list
    assignment: np.ndarray
    delta: float
    width: float
    net: NetParameters
    log_net_size: float

    @property
    def count(self) -> int:
        return len(self.signatures)


def _node_index(net: NetParameters, x: np.ndarray) -> np.ndarray:
    k = np.floor((x - net.lo) / net.step).astype(np.int64)
    return np.clip(k, 0, net.nodes.size - 1)


def _signature(fw: WeightedFunction, net: NetParameters, theta: float) -> np.ndarray:
    gx = fw(net.nodes) * angle_weight(net.nodes) ** (theta / 2.0)
    q = np.rint(gx / net.eps).astype(np.int64)
    return np.clip(q, -net.V, net.V)


def _bracket_on_grid(sig: np.ndarray, net: NetParameters, theta: float, grid: np.ndarray):
    inside = (grid >= net.lo) & (grid <= net.hi)
    center = np.where(inside, net.eps * sig[_node_index(net, grid)] * angle_weight(grid) ** (-theta / 2.0), 0.0)
    half = net.delta_prime * angle_weight(grid) ** net.envelope_exponent
    return center - half, center + half


def bracket_cover(
    family: Sequence[WeightedFunction],
    delta: float,
    params: ClassParams,
    seq: MixingSequence,
    law=None,
    grid: Optional[np.ndarray] = None,
    points_per_cell: int = 3,
) -> BracketCover:
    """delta-brackets in ||.||_{2,beta} covering a finite family.

    Members are mapped to the net point obtained by quantizing g at the
    nodes; members with the same quantized values share a bracket, so the
    count is the number of distinct net points hit.  Brackets are
    center +- delta' <x>^((gamma - theta)/2) with delta' chosen so the
    bracket width 2 delta' ||<x>^((gamma-theta)/2)||_{2,beta} equals delta.
    """
    for fw in family:
        if fw.K > params.radius * (1 + 1e-12):
            raise ValueError(f"member {fw.label!r} declares K = {fw.K} above the class radius")
    net = net_parameters(delta, params, seq, law)
    if grid is None:
        span = net.hi - net.lo
        pad = 0.0 if params.bounded else 0.25 * span + 1.0
        npts = net.nodes.size * points_per_cell + 1
        grid = np.linspace(net.lo - pad, net.hi + pad, npts + (0 if params.bounded else 2 * points_per_cell))
    grid = np.asarray(grid, dtype=float)
    sigs = {}
    order = []
    assign = np.empty(len(family), dtype=np.int64)
    for i, fw in enumerate(family):
        key = _signature(fw, net, params.theta).tobytes()
        if key not in sigs:
            sigs[key] = len(order)
            order.append(np.frombuffer(key, dtype=np.int64))
        assign[i] = sigs[key]
    lower = np.empty((len(order), grid.size))
    upper = np.empty_like(lower)
    for j, sig in enumerate(order):
        lower[j], upper[j] = _bracket_on_grid(sig, net, params.theta, grid)
    return BracketCover(grid, lower, upper, order, assign, delta, 2.0 * net.delta_prime * net.envelope_norm, net, net_log_count(net))


def validate_cover(cover: BracketCover, family: Sequence[WeightedFunction], seq: MixingSequence, law=None) -> dict:
    """Check ordering, coverage and width of every bracket.

    The width is recomputed from the quantile function of u - l: exactly for
    a constant envelope, through ``law`` otherwise.
    """
    ordered = bool(np.all(cover.lower <= cover.upper))
    worst = 0.0
    for i, fw in enumerate(family):
        j = cover.assignment[i]
        y = fw(cover.grid)
        worst = max(worst, float(np.max(np.maximum(cover.lower[j] - y, y - cover.upper[j]))))
    covered = worst <= 1e-12
    e = cover.net.envelope_exponent
    if e == 0.0:
        width = norm_2beta(StepQuantile([2.0 * cover.net.delta_prime], [1.0]), seq).value
    elif law is not None:
        width = 2.0 * cover.net.delta_prime * norm_2beta(weight_quantile(law, e), seq).value
    else:
        width = cover.width
    return {
        "ordered": ordered,
        "covered": covered,
        "max_excess": worst,
        "width": width,
        "width_ok": width <= cover.delta * (1 + 1e-9),
        "count": cover.count,
    }


# ---------------------------------------------------------------------------
# entropy rates


def predicted_entropy_exponent(params: ClassParams) -> Optional[float]:
    """Exponent a in H(delta) <~ delta^(-a); None on the excluded boundary.

    Bounded domains: the weight is bounded above and below there, so theta can
    be taken as large as needed and the rate is d/s.
    """
    d, se = params.d, params.s_eff
    if params.bounded:
        return d / params.s
    t = params.theta if params.theta > 0 else params.gamma
    if t is None:
        raise ValueError("theta <= 0 needs gamma")
    if t > se:
        return d / params.s
    if t < se:
        return 1.0 / (t / d + _inv(params.p))
    return None


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


@dataclass(frozen=True)
class EntropyFit:
    deltas: np.ndarray
    log_counts: np.ndarray
    fitted: float
    intercept: float
    predicted: Optional[float]
    covers_valid: Optional[bool] = None
    checks: list = field(default_factory=list)

    @property
    def relative_error(self) -> Optional[float]:
        if self.predicted is None:
            return None
        return abs(self.fitted - self.predicted) / self.predicted


def entropy_scaling(
    family_generator: Optional[Callable[[float], Sequence[WeightedFunction]]],
    params: ClassParams,
    deltas: Sequence[float],
    seq: MixingSequence,
    law=None,
) -> EntropyFit:
    """Fit the slope of log H(delta) against log(1/delta).

    H(delta) is the log size of the net covering the whole ball.  When
    ``family_generator`` is given, covers of the generated members are also
    built and validated at every delta.
    """
    d = np.asarray(sorted(deltas, reverse=True), dtype=float)
    if d.size < 4:
        raise ValueError("need at least 4 delta values")
    if np.any(d <= 0) or np.ptp(np.log(d)) == 0:
        raise ValueError("delta values must be positive and not all equal")
    if d.max() / d.min() < 10 * (1 - 1e-9):
        raise ValueError("delta values must span at least one decade")
    H = []
    checks = []
    for delta in d:
        net = net_parameters(float(delta), params, seq, law)
        H.append(net_log_count(net))
        if family_generator is not None:
            fam = family_generator(float(delta))
            cover = bracket_cover(fam, float(delta), params, seq, law)
            checks.append(validate_cover(cover, fam, seq, law))
    H = np.asarray(H)
    if np.any(H <= 0):
        raise ValueError("net has a single element at some delta; use smaller deltas")
    slope, intercept = np.polyfit(np.log(1.0 / d), np.log(H), 1)
    valid = None
    if checks:
        valid = all(c["ordered"] and c["covered"] and c["width_ok"] for c in checks)
    return EntropyFit(d, H, float(slope), float(intercept), predicted_entropy_exponent(params), valid, checks)


# ---------------------------------------------------------------------------
# CLT condition oracle


@dataclass(frozen=True)
class MomentInfo:
    """Marginal-law facts the CLT conditions need; None means unknown.

    weighted_norm_finite: ||<chi>^((gamma - theta)/2)||_{2,beta} < inf.
    moment_2r_finite: E <chi>^(r (gamma - theta)) < inf (equivalently
        E |chi|^(2 r (gamma - theta)) < inf), r taken from the mixing report.
    shifted_norm_finite: ||<chi>^((gamma - theta - 1)/2)||_{2,beta} < inf.
    """

    weighted_norm_finite: Optional[bool] = None
    moment_2r_finite: Optional[bool] = None
    shifted_norm_finite: Optional[bool] = None


@dataclass
class OracleVerdict:
    clauses: dict

    @property
    def holds(self) -> list:
        return [k for k, v in self.clauses.items() if v == "holds"]

    def status(self, clause: str) -> str:
        return self.clauses[clause]

    def kind(self, clause: str) -> str:
        return self.clauses[clause].split(":")[0]


class _Clause:
    def __init__(self):
        self.fail = []
        self.missing = []
        self.boundary = False

    def need(self, ok: Optional[bool], what: str):
        if ok is None:
            self.missing.append(what)
        elif not ok:
            self.fail.append(what)

    def compare(self, a: Optional[float], b: float, sign: int, what: str):
        """Require sign * (a - b) > 0; equality marks the excluded boundary."""
        if a is None:
            self.missing.append(what)
        elif a == b:
            self.boundary = True
        elif sign * (a - b) < 0:
            self.fail.append(what)

    def verdict(self) -> str:
        if self.fail:
            return "fails: " + "; ".join(self.fail)
        if self.boundary:
            return "boundary"
        if self.missing:
            return "undetermined: " + "; ".join(self.missing)
        return "holds"


def _beta_sum(mixing: Optional[SummabilityReport]) -> Optional[bool]:
    return None if mixing is None else mixing.beta_finite


def _weighted_sum(mixing: Optional[SummabilityReport]) -> Optional[bool]:
    return None if mixing is None else mixing.weighted_finite


def fclt_condition_oracle(
    params: ClassParams,
    mixing: Optional[SummabilityReport] = None,
    moments: Optional[MomentInfo] = None,
) -> OracleVerdict:
    """Evaluate every functional-CLT hypothesis set against the inputs.

    Each clause gets "holds", "fails: <reason>", "boundary" (the excluded
    equality case, on which no statement is made) or "undetermined: <missing
    input>".  Clause names:

    * fclt_i .. fclt_iv: summable beta with the four smoothness/weight regimes
    * fclt_bounded: bounded support with summable beta
    * fclt_moment_beta_i/ii: theta <= 0 with polynomial beta decay and moments
      (Besov and Hoelder)
    * fclt_2r_i/ii: polynomial beta decay plus a 2r-moment of the weight (Besov)
    """
    mo = moments or MomentInfo()
    P = params
    d, s, th, gam = P.d, P.s, P.theta, P.gamma
    holder = P.space == "holder"
    se = s if holder else P.s_eff
    ip = 0.0 if holder else _inv(P.p)
    out = {}

    def base():
        c = _Clause()
        c.need(_beta_sum(mixing), "sum of beta_m finite")
        return c

    # weight > 0 regimes
    c = base()
    c.need(th > 0, "theta > 0")
    c.compare(th, se, +1, "theta > s - d/p")
    c.need(s / d > 0.5, "s/d > 1/2")
    out["fclt_i"] = c.verdict()

    c = base()
    c.need(th > 0, "theta > 0")
    c.compare(th, se, -1, "theta < s - d/p")
    c.need(th / d + ip > 0.5, "theta/d + 1/p > 1/2")
    out["fclt_ii"] = c.verdict()

    # weight <= 0 regimes
    c = base()
    c.need(th <= 0, "theta <= 0")
    c.need(mo.weighted_norm_finite, "weighted beta-norm of <chi>^((gamma-theta)/2) finite")
    c.compare(gam, se, +1, "gamma > s - d/p")
    c.need(s / d > 0.5, "s/d > 1/2")
    out["fclt_iii"] = c.verdict()

    c = base()
    c.need(th <= 0, "theta <= 0")
    c.need(mo.weighted_norm_finite, "weighted beta-norm of <chi>^((gamma-theta)/2) finite")
    c.compare(gam, se, -1, "gamma < s - d/p")
    if gam is not None:
        c.need(gam / d + ip > 0.5, "gamma/d + 1/p > 1/2")
    out["fclt_iv"] = c.verdict()

    c = base()
    c.need(P.bounded, "bounded support")
    c.need(s / d > 0.5, "s/d > 1/2")
    out["fclt_bounded"] = c.verdict()

    if P.space in ("besov", "holder"):
        r = None if mixing is None else mixing.r
        for tag, sign in (("i", +1), ("ii", -1)):
            c = _Clause()
            c.need(_weighted_sum(mixing), "sum of m^(1/(r-1)) beta_m finite")
            c.need(th <= 0, "theta <= 0")
            c.need(None if gam is None or r is None else r * (gam - th) > 1, "r (gamma - theta) > 1")
            c.need(mo.moment_2r_finite, "2r(gamma-theta) moment finite")
            c.compare(gam, se, sign, "gamma > s - d/p" if sign > 0 else "gamma < s - d/p")
            if sign > 0:
                c.need(s / d > 0.5, "s/d > 1/2")
            elif gam is not None:
                c.need(gam / d + ip > 0.5, "gamma/d + 1/p > 1/2")
            out[f"fclt_moment_beta_{tag}"] = c.verdict()

    if P.space == "besov":
        for tag, sign in (("i", +1), ("ii", -1)):
            c = _Clause()
            c.need(_weighted_sum(mixing), "sum of m^(1/(r-1)) beta_m finite")
            c.need(mo.moment_2r_finite, "2r-moment of <chi>^((gamma-theta)/2) finite")
            c.compare(gam, se, sign, "gamma > s - d/p" if sign > 0 else "gamma < s - d/p")
            if sign > 0:
                c.need(s / d > 0.5, "s/d > 1/2")
            elif gam is not None:
                c.need(gam / d + ip > 0.5, "gamma/d + 1/p > 1/2")
            out[f"fclt_2r_{tag}"] = c.verdict()

    return OracleVerdict(out)


def hausman_class_oracle(
    s: float,
    theta: float,
    gamma: Optional[float],
    mixing: Optional[SummabilityReport] = None,
    moments: Optional[MomentInfo] = None,
) -> OracleVerdict:
    """Conditions on the local-alternative class (B^s_{inf,inf}(R, theta)).

    Two alternative clauses, both with theta <= -2, summable beta and a finite
    beta-norm of <chi>^((gamma - theta - 1)/2): "hc1_i" (gamma > s, s > 1/2)
    and "hc1_iii" (gamma < s, gamma > 1/2).
    """
    mo = moments or MomentInfo()
    out = {}
    for tag, sign in (("i", +1), ("iii", -1)):
        c = _Clause()
        c.need(_beta_sum(mixing), "sum of beta_m finite")
        c.need(theta <= -2, "theta <= -2")
        c.need(mo.shifted_norm_finite, "weighted beta-norm of <chi>^((gamma-theta-1)/2) finite")
        c.compare(gamma, s, sign, "gamma > s" if sign > 0 else "gamma < s")
        if sign > 0:
            c.need(s > 0.5, "s > 1/2")
        elif gamma is not None:
            c.need(gamma > 0.5, "gamma > 1/2")
        out[f"hc1_{tag}"] = c.verdict()
    return OracleVerdict(out)
