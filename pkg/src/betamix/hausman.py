"""Hausman-type test for linearity of E[y | x] against a series alternative.

Two estimators of the linear coefficient are compared: the simple regression
slope and the coefficient on x in a regression of y on x plus further sieve
terms p_2(x), ..., p_kappa(x).  All blocks are built from the centred design,
so the intercept never appears explicitly.

Notation (raw sums over the sample, xc = x - mean(x)):

    D11 = xc'xc,   delta_hat = projection of xc on the centred extra columns,
    D = D12 D22^-1 D21 = |delta_hat|^2,   S = D11 - D (Schur complement).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import stats

from .mixing import FiniteMarkov, GaussianAR1, NonlinearAR, ProcessSpec, simulate_many, substream_seed
from .norms import default_bandwidth, hac_variance

__all__ = [
    "HausmanError",
    "CollinearBasis",
    "DegenerateVariance",
    "NoIdentifyingNonlinearity",
    "TimeSeriesSample",
    "SieveBasis",
    "DesignBlocks",
    "HausmanReport",
    "LocalAltDGP",
    "Noncentrality",
    "default_kappa",
    "design_blocks",
    "ols_psi1",
    "series_psi1",
    "z_estimators",
    "gamma_hat",
    "h1_statistic",
    "h2_statistic",
    "regression_statistic",
    "hausman_test",
    "read_sample_csv",
    "simulate_local_alt",
    "simulate_local_alt_many",
    "population_blocks",
    "noncentrality",
    "predicted_power",
    "ncx2_sf",
]


class HausmanError(ValueError):
    pass


class CollinearBasis(HausmanError):
    pass


class DegenerateVariance(HausmanError):
    pass


class NoIdentifyingNonlinearity(HausmanError):
    pass


_COND_LIMIT = 1e12
_REL_ZERO = 1e-12


@dataclass(frozen=True)
class TimeSeriesSample:
    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        x = np.asarray(self.x, dtype=float).ravel()
        if y.shape != x.shape:
            raise HausmanError("y and x must have equal length")
        if y.size < 3:
            raise HausmanError("need at least 3 observations")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise HausmanError("observations must be finite")
        if np.ptp(x) == 0:
            raise HausmanError("x has zero sample variance")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.y.size


def default_kappa(n: int) -> int:
    return max(3, math.ceil(2.0 * n ** 0.2))


@dataclass(frozen=True)
class SieveBasis:
    """P^kappa(z) = (z, p_2(z), ..., p_kappa(z)).

    family "power": p_j(z) = z^j; "hermite": probabilists' Hermite He_j(z).
    ``transform`` (kappa-1 square) replaces the extra columns P2 by P2 @ transform.
    """

    kappa: int
    family: str = "power"
    transform: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.family not in ("power", "hermite"):
            raise ValueError(f"unknown basis family {self.family!r}")
        if self.transform is not None:
            T = np.asarray(self.transform, dtype=float)
            if T.shape != (self.kappa - 1, self.kappa - 1):
                raise ValueError("transform must be (kappa-1) x (kappa-1)")
            object.__setattr__(self, "transform", T)

    def extra(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        k = self.kappa
        if k == 1:
            return np.empty((z.size, 0))
        if self.family == "power":
            P2 = np.stack([z**j for j in range(2, k + 1)], axis=1)
        else:
            cols = []
            h_prev, h = np.ones_like(z), z.copy()
            for j in range(1, k):
                h_prev, h = h, z * h - j * h_prev
                cols.append(h)
            P2 = np.stack(cols, axis=1)
        if self.transform is not None:
            P2 = P2 @ self.transform
        return P2

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.column_stack([z, self.extra(z)])


@dataclass(frozen=True)
class DesignBlocks:
    """Blocks of P'MP with the extra columns centred and scaled to unit variance."""

    n: int
    kappa: int
    xc: np.ndarray
    P2c: np.ndarray
    D11: float
    D12: np.ndarray
    D22: np.ndarray
    delta_hat: np.ndarray
    D: float  # D12 D22^-1 D21
    schur: float  # D11 - D
    cond: float

    @property
    def Q_hat(self) -> np.ndarray:
        return np.eye(2) * self.D11 / self.n


def design_blocks(sample: TimeSeriesSample, basis: SieveBasis) -> DesignBlocks:
    """Centred design blocks and the projection delta_hat of xc on the extra columns."""
    n = sample.n
    if n <= basis.kappa + 1:
        raise HausmanError(f"need n > kappa + 1 (n = {n}, kappa = {basis.kappa})")
    xc = sample.x - sample.x.mean()
    D11 = float(xc @ xc)
    P2 = basis.extra(sample.x)
    if P2.shape[1] == 0:
        empty = np.empty((n, 0))
        return DesignBlocks(n, basis.kappa, xc, empty, D11, np.empty(0), np.empty((0, 0)), np.zeros(n), 0.0, D11, 1.0)
    P2c = P2 - P2.mean(axis=0)
    sd = P2c.std(axis=0)
    if np.any(sd <= _REL_ZERO * max(1.0, float(np.max(np.abs(P2))))):
        raise CollinearBasis(f"kappa = {basis.kappa}: a basis column is constant on the sample")
    P2c = P2c / sd
    U, sv, Vt = np.linalg.svd(P2c, full_matrices=False)
    cond = float((sv[0] / sv[-1]) ** 2) if sv[-1] > 0 else math.inf
    if not cond < _COND_LIMIT:
        raise CollinearBasis(f"kappa = {basis.kappa}: extra basis columns are collinear (cond {cond:.3g})")
    delta_hat = U @ (U.T @ xc)
    D = float(delta_hat @ delta_hat)
    schur = D11 - D
    if not schur > _REL_ZERO * D11:
        raise CollinearBasis(f"kappa = {basis.kappa}: x lies in the span of the extra columns")
    return DesignBlocks(n, basis.kappa, xc, P2c, D11, P2c.T @ xc, P2c.T @ P2c, delta_hat, D, schur, cond)


def ols_psi1(sample: TimeSeriesSample) -> float:
    xc = sample.x - sample.x.mean()
    yc = sample.y - sample.y.mean()
    return float(xc @ yc / (xc @ xc))


def series_psi1(sample: TimeSeriesSample, basis: SieveBasis, blocks: Optional[DesignBlocks] = None) -> float:
    """Coefficient on x in the regression of y on (1, x, p_2(x), ..., p_kappa(x))."""
    b = blocks or design_blocks(sample, basis)
    yc = sample.y - sample.y.mean()
    return float((b.xc - b.delta_hat) @ yc / b.schur)


def z_estimators(sample: TimeSeriesSample, basis: SieveBasis, blocks: Optional[DesignBlocks] = None):
    """Roots of the two empirical moment equations.

    The first equation gives the regression slope.  The second plugs in the
    series fit of y on the extra columns and divides by D11, not by the Schur
    complement, so psi_kappa_z * D11 = psi_series * S.
    """
    b = blocks or design_blocks(sample, basis)
    yc = sample.y - sample.y.mean()
    return float(b.xc @ yc / b.D11), float((b.xc - b.delta_hat) @ yc / b.D11)


def _series_residuals(sample: TimeSeriesSample, b: DesignBlocks) -> np.ndarray:
    yc = sample.y - sample.y.mean()
    X = np.column_stack([b.xc, b.P2c])
    coef, *_ = np.linalg.lstsq(X, yc, rcond=None)
    return yc - X @ coef


def _leverage(b: DesignBlocks) -> np.ndarray:
    Z = np.column_stack([np.ones(b.n), b.xc, b.P2c])
    Qz, _ = np.linalg.qr(Z)
    return np.minimum(np.einsum("ij,ij->i", Qz, Qz), 1.0 - 1e-12)


def gamma_hat(
    sample: TimeSeriesSample,
    basis: SieveBasis,
    bandwidth: Optional[int] = None,
    blocks: Optional[DesignBlocks] = None,
    residuals: Optional[np.ndarray] = None,
    leverage_adjust: bool = True,
) -> np.ndarray:
    """Bartlett HAC of v_t = u_t (xc_t, xc_t - delta_hat_t) using series residuals.

    Residuals are divided by 1 - h_tt (h the hat-matrix diagonal of the full
    series design).  The raw residuals shrink exactly where delta_hat is large,
    which biases the variance down and inflates H1 in samples of a few thousand.
    Set ``leverage_adjust=False`` for the unadjusted estimate.
    """
    b = blocks or design_blocks(sample, basis)
    u = _series_residuals(sample, b) if residuals is None else residuals
    if leverage_adjust:
        u = u / (1.0 - _leverage(b))
    V = u[:, None] * np.column_stack([b.xc, b.xc - b.delta_hat])
    L = default_bandwidth(sample.n) if bandwidth is None else bandwidth
    return hac_variance(V, L, center=False)


def _chi2_p(H: float) -> float:
    return float(stats.chi2.sf(H, 1))


def h1_statistic(diff: float, G: np.ndarray, b: DesignBlocks) -> tuple[float, float]:
    """n (psi_z - psi_kappa_z)^2 / e'Q^-1 G Q^-1 e with e = (1, -1)."""
    e = np.array([1.0, -1.0])
    Qi = np.linalg.inv(b.Q_hat)
    var = float(e @ Qi @ G @ Qi @ e)
    scale = (b.n / b.D11) ** 2 * max(float(np.max(np.abs(G))), 0.0)
    if not var > _REL_ZERO * max(scale, 1e-300):
        raise DegenerateVariance("variance of the estimator difference is not positive")
    H = b.n * diff**2 / var
    return H, _chi2_p(H)


def h2_statistic(diff: float, sigma2: float, b: DesignBlocks) -> tuple[float, float]:
    """(psi_z - psi_kappa_z)^2 / (sigma2 D / D11^2)."""
    if not b.D > _REL_ZERO * b.D11:
        raise NoIdentifyingNonlinearity("extra basis columns carry no information about x (D12 = 0)")
    if not sigma2 > 0:
        raise DegenerateVariance("residual variance is zero")
    H = diff**2 / (sigma2 * b.D / b.D11**2)
    return H, _chi2_p(H)


def regression_statistic(diff: float, sigma2: float, b: DesignBlocks) -> tuple[float, float]:
    """(psi_ols - psi_series)^2 / (sigma2 (1/S - 1/D11)), the classical contrast."""
    if not b.D > _REL_ZERO * b.D11:
        raise NoIdentifyingNonlinearity("extra basis columns carry no information about x (D12 = 0)")
    if not sigma2 > 0:
        raise DegenerateVariance("residual variance is zero")
    H = diff**2 / (sigma2 * (1.0 / b.schur - 1.0 / b.D11))
    return H, _chi2_p(H)


@dataclass
class HausmanReport:
    n: int
    kappa: int
    bandwidth: int
    psi1_ols: float
    psi1_series: float
    psi1_z: float
    psi1_kappa_z: float
    sigma2: float
    gamma_hat: np.ndarray
    D11: float
    D: float
    schur: float
    H1: Optional[float] = None
    p1: Optional[float] = None
    H2: Optional[float] = None
    p2: Optional[float] = None
    H_reg: Optional[float] = None
    p_reg: Optional[float] = None
    status: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def num(v):
            return None if v is None or not math.isfinite(v) else float(v)

        return {
            "psi1_ols": num(self.psi1_ols),
            "psi1_series": num(self.psi1_series),
            "psi1_z": num(self.psi1_z),
            "psi1_kappa_z": num(self.psi1_kappa_z),
            "H1": num(self.H1),
            "H2": num(self.H2),
            "p1": num(self.p1),
            "p2": num(self.p2),
            "kappa": self.kappa,
            "sigma2": num(self.sigma2),
            "bandwidth": self.bandwidth,
            "H_reg": num(self.H_reg),
            "p_reg": num(self.p_reg),
            "n": self.n,
            "gamma_hat": [[float(v) for v in row] for row in self.gamma_hat],
            "status": dict(self.status),
        }

    @property
    def degenerate(self) -> bool:
        return self.H1 is None or self.H2 is None


def hausman_test(
    sample: TimeSeriesSample,
    kappa: Optional[int] = None,
    family: str = "power",
    bandwidth: Optional[int] = None,
    basis: Optional[SieveBasis] = None,
) -> HausmanReport:
    """Estimates, H1, H2, the regression contrast and their chi^2_1 p-values.

    Degenerate statistics are reported as None with a reason in ``status``;
    a collinear basis raises ``CollinearBasis``.
    """
    basis = basis or SieveBasis(kappa if kappa is not None else default_kappa(sample.n), family)
    L = default_bandwidth(sample.n) if bandwidth is None else int(bandwidth)
    if L >= sample.n:
        raise HausmanError(f"bandwidth {L} must be smaller than n = {sample.n}")
    b = design_blocks(sample, basis)
    yc = sample.y - sample.y.mean()
    psi_ols = float(b.xc @ yc / b.D11)
    num = float((b.xc - b.delta_hat) @ yc)
    psi_series = num / b.schur
    psi_kz = num / b.D11
    u = _series_residuals(sample, b)
    sigma2 = float(np.mean(u**2))
    G = gamma_hat(sample, basis, L, b, u)
    rep = HausmanReport(sample.n, basis.kappa, L, psi_ols, psi_series, psi_ols, psi_kz, sigma2, G, b.D11, b.D, b.schur)
    # an exact fit leaves rounding noise in u; treat it as zero
    if sigma2 <= 1e-24 * max(float(np.mean(yc**2)), 1e-300):
        rep.status = {"H1": "degenerate variance", "H2": "degenerate variance", "H_reg": "degenerate variance"}
        return rep
    diff = psi_ols - psi_kz
    for name, fn, args in (
        ("H1", h1_statistic, (diff, G, b)),
        ("H2", h2_statistic, (diff, sigma2, b)),
        ("H_reg", regression_statistic, (psi_ols - psi_series, sigma2, b)),
    ):
        try:
            H, p = fn(*args)
        except NoIdentifyingNonlinearity:
            rep.status[name] = "no identifying nonlinearity"
            continue
        except DegenerateVariance:
            rep.status[name] = "degenerate variance"
            continue
        rep.status[name] = "ok"
        if name == "H1":
            rep.H1, rep.p1 = H, p
        elif name == "H2":
            rep.H2, rep.p2 = H, p
        else:
            rep.H_reg, rep.p_reg = H, p
    return rep


def read_sample_csv(path) -> TimeSeriesSample:
    """Read a "y,x" CSV.  Errors name the offending line."""
    ys, xs = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HausmanError("empty file") from None
        cols = [h.strip().lower() for h in header]
        if "y" not in cols or "x" not in cols:
            raise HausmanError(f"header must contain columns y and x, got {header}")
        iy, ix = cols.index("y"), cols.index("x")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(cols):
                raise HausmanError(f"line {lineno}: expected {len(cols)} fields, got {len(row)}")
            try:
                y, x = float(row[iy]), float(row[ix])
            except ValueError:
                raise HausmanError(f"line {lineno}: could not parse {row!r}") from None
            if not (math.isfinite(y) and math.isfinite(x)):
                raise HausmanError(f"line {lineno}: non-finite value")
            ys.append(y)
            xs.append(x)
    return TimeSeriesSample(np.array(ys), np.array(xs))


# ---------------------------------------------------------------------------
# local alternatives


def _h_zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


H_FUNCTIONS: dict[str, Callable] = {
    "zero": _h_zero,
    "tanh": np.tanh,
    "square": np.square,
    "cube": lambda x: np.asarray(x) ** 3,
    "abs": np.abs,
    "sin": np.sin,
}


@dataclass(frozen=True)
class LocalAltDGP:
    """y_t = psi0 + psi1 x_t + c h0(x_t) / sqrt(n) + error_sd * u_t, u_t iid N(0, 1)."""

    x_spec: ProcessSpec
    h0: Union[str, Callable] = "zero"
    c: float = 0.0
    psi0: float = 0.0
    psi1: float = 0.0
    error_sd: float = 1.0

    def __post_init__(self):
        if isinstance(self.h0, str) and self.h0 not in H_FUNCTIONS:
            raise ValueError(f"unknown h0 {self.h0!r}; choose from {sorted(H_FUNCTIONS)}")
        if not self.error_sd > 0:
            raise ValueError("error_sd must be > 0")

    @property
    def h(self) -> Callable:
        return H_FUNCTIONS[self.h0] if isinstance(self.h0, str) else self.h0


def simulate_local_alt_many(dgp: LocalAltDGP, n: int, seeds) -> tuple[np.ndarray, np.ndarray]:
    """(Y, X) arrays of shape (reps, n); replication r uses seeds[r] only."""
    seeds = list(seeds)
    X, _ = simulate_many(dgp.x_spec, n, [substream_seed(s, 0) for s in seeds])
    U = np.stack([np.random.default_rng(substream_seed(s, 1)).standard_normal(n) for s in seeds])
    Y = dgp.psi0 + dgp.psi1 * X + dgp.c * dgp.h(X) / math.sqrt(n) + dgp.error_sd * U
    return Y, X


def simulate_local_alt(dgp: LocalAltDGP, n: int, seed: int) -> TimeSeriesSample:
    Y, X = simulate_local_alt_many(dgp, n, [seed])
    return TimeSeriesSample(Y[0], X[0])


# ---------------------------------------------------------------------------
# noncentrality


def _marginal_nodes(spec: ProcessSpec):
    if isinstance(spec, GaussianAR1):
        z, w = np.polynomial.hermite_e.hermegauss(160)
        return spec.marginal_sd * z, w / w.sum()
    if isinstance(spec, FiniteMarkov):
        return np.asarray(spec.values, dtype=float), spec.stationary
    raise TypeError(f"population moments need a known marginal law, not {type(spec).__name__}")


def population_blocks(spec: ProcessSpec, basis: SieveBasis) -> dict:
    """Per-observation population analogues of the design blocks.

    Returns Var(x) (D11), D = D12 D22^-1 D21, S = D11 - D and the projection
    coefficients of x on the centred extra columns.
    """
    x, w = _marginal_nodes(spec)
    mx = float(w @ x)
    xc = x - mx
    P2 = basis.extra(x)
    P2c = P2 - w @ P2
    D11 = float(w @ xc**2)
    if P2.shape[1] == 0:
        return {"D11": D11, "D": 0.0, "S": D11, "coef": np.empty(0), "mean_x": mx}
    D22 = P2c.T @ (w[:, None] * P2c)
    D21 = P2c.T @ (w * xc)
    coef = np.linalg.solve(D22, D21)
    D = float(D21 @ coef)
    return {"D11": D11, "D": D, "S": D11 - D, "coef": coef, "mean_x": mx}


@dataclass(frozen=True)
class Noncentrality:
    """Mean shifts lambda of the N(lambda, 1) limits behind each statistic (per unit c).

    The b-only values use b(h) = E[(x - mu) h(x)] only; the finite-kappa
    values use the exact drifts g = E[delta(x) h(x)] and e = E[(x - mu - delta(x)) h(x)]
    of the fixed-kappa estimators.  Both agree when h is orthogonal to
    x - mu - delta(x).
    """

    b: float
    g: float
    e: float
    D11: float
    D: float
    S: float
    sigma2: float
    lambda1: float
    lambda2: float
    lambda_reg_b: float
    lambda_z: float
    lambda_reg: float

    def scaled(self, c: float) -> dict:
        return {k: c * getattr(self, k) for k in ("lambda1", "lambda2", "lambda_reg_b", "lambda_z", "lambda_reg")}


def noncentrality(dgp: LocalAltDGP, basis: SieveBasis) -> Noncentrality:
    """Noncentralities for c = 1 under the DGP's marginal law of x.

    With errors iid and independent of x the long-run variance of v_t is
    sigma^2 times the Lambda block, so lambda1 = lambda2.
    """
    if dgp.psi1 != 0:
        # the kappa-Z contrast is shifted by psi1 D / D11 when psi1 != 0
        raise ValueError("noncentrality predictions assume psi1 = 0")
    x, w = _marginal_nodes(dgp.x_spec)
    pb = population_blocks(dgp.x_spec, basis)
    xc = x - pb["mean_x"]
    hx = np.asarray(dgp.h(x), dtype=float)
    if pb["coef"].size:
        P2 = basis.extra(x)
        delta = (P2 - w @ P2) @ pb["coef"]
    else:
        delta = np.zeros_like(x)
    b = float(w @ (xc * hx))
    g = float(w @ (delta * hx))
    e = float(w @ ((xc - delta) * hx))
    D11, D, S = pb["D11"], pb["D"], pb["S"]
    s2 = dgp.error_sd**2
    sig = math.sqrt(s2)
    # relative guard: symmetric x with only even extra terms gives D = 0 up to rounding
    if not D > 1e-12 * D11:
        raise NoIdentifyingNonlinearity("population D12 D22^-1 D21 is zero")
    if not S > 0:
        raise HausmanError("population Schur complement is zero")
    lam2 = b / (sig * math.sqrt(D))
    # Gamma = sigma^2 Lambda, e'Lambda e = D11 - 2 S + S = D
    lam1 = b / math.sqrt(s2 * (D11 - 2 * S + S))
    lam_reg_b = b * math.sqrt(S) / (sig * math.sqrt(D11 * D))
    lam_z = g / (sig * math.sqrt(D))
    lam_reg = (g * S - e * D) / (sig * math.sqrt(D * S * D11))
    return Noncentrality(b, g, e, D11, D, S, s2, lam1, lam2, lam_reg_b, lam_z, lam_reg)


def predicted_power(lam: float, alpha: float = 0.05) -> float:
    """P((Z + lam)^2 > c_alpha) for standard normal Z."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    c = math.sqrt(stats.chi2.isf(alpha, 1))
    return float(stats.norm.cdf(-c - lam) + stats.norm.sf(c - lam))


def ncx2_sf(x: float, df: float, nc: float, rtol: float = 1e-12) -> float:
    """Noncentral chi^2 survival function as a Poisson mixture of central ones.

    sum_j Pois(j; nc/2) P(chi^2_{df+2j} > x), stopped once the Poisson tail
    mass beyond j falls below ``rtol`` times the accumulated sum.
    """
    if nc < 0 or df <= 0:
        raise ValueError("need df > 0 and nc >= 0")
    if x <= 0:
        return 1.0
    if nc == 0:
        return float(stats.chi2.sf(x, df))
    mu = nc / 2.0
    pois = stats.poisson(mu)
    # start at the mode and sum outwards so large nc does not underflow
    j0 = int(math.floor(mu))
    total = 0.0
    j = j0
    while j >= 0:
        t = pois.pmf(j) * stats.chi2.sf(x, df + 2 * j)
        total += t
        if pois.cdf(j - 1) <= rtol * max(total, 1e-300):
            break
        j -= 1
    j = j0 + 1
    while True:
        t = pois.pmf(j) * stats.chi2.sf(x, df + 2 * j)
        total += t
        if pois.sf(j) <= rtol * max(total, 1e-300):
            break
        j += 1
    return float(min(total, 1.0))
