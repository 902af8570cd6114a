"""Stationary beta-mixing processes: specs, path simulation and mixing coefficients.

Three process families are supported:

* ``FiniteMarkov`` -- finite state chain with a primitive transition matrix.
  Mixing coefficients are exact.
* ``GaussianAR1`` -- x_t = a x_{t-1} + sigma e_t.  Only a geometric envelope
  (rate |a|) is available for beta_m.
* ``NonlinearAR`` -- x_t = m(x_{t-1}) + sigma e_t for a contracting map m.
  Again only a geometric envelope is provided.

Paths are reproducible: ``simulate(spec, n, seed)`` is a pure function of its
arguments, and ``simulate_many`` generates replications from independent
substreams so that replication r does not depend on how many others are run.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import mpmath
import numpy as np
from scipy import signal

__all__ = [
    "FiniteMarkov",
    "GaussianAR1",
    "NonlinearAR",
    "ProcessSpec",
    "MixingSequence",
    "SamplePath",
    "SummabilityReport",
    "substream_seed",
    "simulate",
    "simulate_many",
    "stationary_distribution",
    "exact_beta_markov",
    "beta_sequence_markov",
    "mixing_triplet_markov",
    "summability_report",
]

_ROW_TOL = 1e-12


def _check_stochastic(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise ValueError("transition matrix must be square and non-empty")
    if not np.all(np.isfinite(P)) or np.any(P < 0):
        raise ValueError("transition matrix entries must be finite and >= 0")
    if np.max(np.abs(P.sum(axis=1) - 1.0)) > _ROW_TOL:
        raise ValueError("transition matrix rows must sum to 1")
    return P


def _is_primitive(P: np.ndarray) -> bool:
    # Wielandt: a primitive k x k matrix has P^((k-1)^2 + 1) > 0.
    k = P.shape[0]
    A = (P > 0).astype(np.int64)
    B = A.copy()
    for _ in range((k - 1) ** 2):
        B = np.minimum(B @ A, 1)
    return bool(np.all(B > 0))


def stationary_distribution(P) -> np.ndarray:
    """Unique stationary law of a primitive stochastic matrix."""
    P = _check_stochastic(P)
    k = P.shape[0]
    A = np.vstack([P.T - np.eye(k), np.ones((1, k))])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@dataclass(frozen=True)
class FiniteMarkov:
    """Finite-state stationary Markov chain.

    ``values`` are the real numbers attached to the states; a path stores the
    state values, ``SamplePath.states`` the indices.
    """

    transition: np.ndarray
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        P = _check_stochastic(self.transition)
        if not _is_primitive(P):
            raise ValueError("FiniteMarkov chain must be irreducible and aperiodic")
        vals = np.arange(P.shape[0], dtype=float) if self.values is None else np.asarray(self.values, dtype=float)
        if vals.shape != (P.shape[0],) or not np.all(np.isfinite(vals)):
            raise ValueError("need one finite value per state")
        P.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_pi", stationary_distribution(P))

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def stationary(self) -> np.ndarray:
        return self._pi

    @property
    def dimension(self) -> int:
        return 1

    def mixing_sequence(self, tol: float = 1e-15, max_lag: int = 20000) -> "MixingSequence":
        """Exact beta_0..beta_M, stopping once beta_m < tol (the rest is ~0)."""
        return MixingSequence(beta_sequence_markov(self.transition, tol=tol, max_lag=max_lag))

    def to_dict(self) -> dict:
        return {
            "kind": "finite_markov",
            "transition": self.transition.tolist(),
            "values": self.values.tolist(),
        }

    def __eq__(self, other):
        return (
            isinstance(other, FiniteMarkov)
            and np.array_equal(self.transition, other.transition)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.transition.tobytes(), self.values.tobytes()))


@dataclass(frozen=True)
class GaussianAR1:
    a: float
    sigma: float = 1.0

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise ValueError("GaussianAR1 needs |a| < 1")
        if not self.sigma > 0:
            raise ValueError("GaussianAR1 needs sigma > 0")

    @property
    def dimension(self) -> int:
        return 1

    @property
    def marginal_sd(self) -> float:
        return self.sigma / math.sqrt(1.0 - self.a**2)

    def mixing_sequence(self) -> "MixingSequence":
        """Geometric envelope beta_m <= |a|^m; not the exact coefficients."""
        if self.a == 0:
            return MixingSequence([1.0, 0.0])
        return MixingSequence([1.0], tail_rate=abs(self.a))

    def to_dict(self) -> dict:
        return {"kind": "gaussian_ar1", "a": self.a, "sigma": self.sigma}


def _map_tanh(x, c):
    return c * np.tanh(x)


def _map_expar(x, c):
    return c * x * np.exp(-(x**2))


NONLINEAR_MAPS = {"tanh": _map_tanh, "expar": _map_expar}


@dataclass(frozen=True)
class NonlinearAR:
    """x_t = m(x_{t-1}) + noise_std * e_t with m from ``NONLINEAR_MAPS``.

    Both built-in maps are Lipschitz with constant |coef| < 1, so the chain is
    geometrically ergodic with envelope rate |coef|.  The stationary law is not
    available in closed form; paths start at 0 and discard ``burn_in`` steps.
    """

    map: str
    coef: float
    noise_std: float = 1.0
    burn_in: int = 500

    def __post_init__(self):
        if self.map not in NONLINEAR_MAPS:
            raise ValueError(f"unknown nonlinear map {self.map!r}; choose from {sorted(NONLINEAR_MAPS)}")
        if not abs(self.coef) < 1:
            raise ValueError("NonlinearAR needs |coef| < 1")
        if not self.noise_std > 0:
            raise ValueError("NonlinearAR needs noise_std > 0")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")

    @property
    def dimension(self) -> int:
        return 1

    def mixing_sequence(self) -> "MixingSequence":
        if self.coef == 0:
            return MixingSequence([1.0, 0.0])
        return MixingSequence([1.0], tail_rate=abs(self.coef))

    def to_dict(self) -> dict:
        return {
            "kind": "nonlinear_ar",
            "map": self.map,
            "coef": self.coef,
            "noise_std": self.noise_std,
            "burn_in": self.burn_in,
        }


ProcessSpec = Union[FiniteMarkov, GaussianAR1, NonlinearAR]


def spec_from_dict(d: dict) -> ProcessSpec:
    kind = d.get("kind")
    if kind == "finite_markov":
        return FiniteMarkov(np.asarray(d["transition"], dtype=float), d.get("values"))
    if kind == "gaussian_ar1":
        return GaussianAR1(float(d["a"]), float(d.get("sigma", 1.0)))
    if kind == "nonlinear_ar":
        return NonlinearAR(
            str(d["map"]), float(d["coef"]), float(d.get("noise_std", 1.0)), int(d.get("burn_in", 500))
        )
    raise ValueError(f"unknown process kind {kind!r}")


@dataclass(frozen=True)
class SamplePath:
    observations: np.ndarray
    seed: int
    spec: ProcessSpec
    states: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.observations)


# ---------------------------------------------------------------------------
# simulation


def substream_seed(master: int, index: int) -> int:
    """64-bit seed for replication ``index`` derived from ``master``.

    Pure function of (master, index), so replications are identical no matter
    the order or parallelism in which they are generated.
    """
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def _markov_from_uniforms(spec: FiniteMarkov, U: np.ndarray) -> np.ndarray:
    # U has shape (reps, n); column 0 draws the initial state from pi.
    k = spec.n_states
    cum_pi = np.cumsum(spec.stationary)
    cum_P = np.cumsum(spec.transition, axis=1)
    reps, n = U.shape
    S = np.empty((reps, n), dtype=np.int64)
    S[:, 0] = np.minimum(np.searchsorted(cum_pi, U[:, 0], side="right"), k - 1)
    for t in range(1, n):
        rows = cum_P[S[:, t - 1]]
        S[:, t] = np.minimum((U[:, t : t + 1] >= rows).sum(axis=1), k - 1)
    return S


def _ar1_from_normals(spec: GaussianAR1, E: np.ndarray) -> np.ndarray:
    # E[:, 0] scaled to the stationary sd gives an exact stationary start.
    x0 = E[:, 0] * spec.marginal_sd
    innov = spec.sigma * E[:, 1:]
    X = np.empty_like(E)
    X[:, 0] = x0
    if E.shape[1] > 1:
        zi = (spec.a * x0)[:, None]
        X[:, 1:], _ = signal.lfilter([1.0], [1.0, -spec.a], innov, axis=1, zi=zi)
    return X


def _nlar_from_normals(spec: NonlinearAR, E: np.ndarray) -> np.ndarray:
    m = NONLINEAR_MAPS[spec.map]
    reps, total = E.shape
    x = np.zeros(reps)
    out = np.empty((reps, total - spec.burn_in))
    for t in range(total):
        x = m(x, spec.coef) + spec.noise_std * E[:, t]
        if t >= spec.burn_in:
            out[:, t - spec.burn_in] = x
    return out


def simulate_many(spec: ProcessSpec, n: int, seeds: Sequence[int]):
    """Simulate one path per seed, vectorised across replications.

    Returns ``(observations, states)`` with shape ``(len(seeds), n)``; ``states``
    is None for continuous-state specs.  Row r equals ``simulate(spec, n, seeds[r])``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    seeds = list(seeds)
    if isinstance(spec, FiniteMarkov):
        U = np.stack([_rng(s).random(n) for s in seeds]) if seeds else np.empty((0, n))
        S = _markov_from_uniforms(spec, U)
        return spec.values[S], S
    if isinstance(spec, GaussianAR1):
        E = np.stack([_rng(s).standard_normal(n) for s in seeds]) if seeds else np.empty((0, n))
        return _ar1_from_normals(spec, E), None
    if isinstance(spec, NonlinearAR):
        total = n + spec.burn_in
        E = np.stack([_rng(s).standard_normal(total) for s in seeds]) if seeds else np.empty((0, total))
        return _nlar_from_normals(spec, E), None
    raise TypeError(f"unsupported process spec {type(spec).__name__}")


def simulate(spec: ProcessSpec, n: int, seed: int) -> SamplePath:
    """Draw a stationary path of length n.

    FiniteMarkov and GaussianAR1 start exactly in the stationary law.
    """
    obs, states = simulate_many(spec, n, [seed])
    return SamplePath(obs[0], int(seed), spec, None if states is None else states[0])


# ---------------------------------------------------------------------------
# mixing coefficients


def _beta_raw(P: np.ndarray, pi: np.ndarray, Pm: np.ndarray) -> float:
    return float(0.5 * np.sum(pi[:, None] * np.abs(Pm - pi[None, :])))


def exact_beta_markov(P, m: int) -> float:
    """beta_m of the stationary chain with transition matrix P.

    beta_m = sum_i pi_i * TV((P^m)_{i.}, pi); beta_0 is 1 by convention.
    """
    if m < 0:
        raise ValueError("lag must be >= 0")
    P = _check_stochastic(P)
    if not _is_primitive(P):
        raise ValueError("chain must be irreducible and aperiodic")
    if m == 0:
        return 1.0
    pi = stationary_distribution(P)
    return min(1.0, _beta_raw(P, pi, np.linalg.matrix_power(P, m)))


def beta_sequence_markov(P, tol: float = 1e-15, max_lag: int = 20000) -> np.ndarray:
    """beta_0..beta_M by iterated powers, stopping when beta_m < tol."""
    P = _check_stochastic(P)
    pi = stationary_distribution(P)
    out = [1.0]
    Pm = np.eye(P.shape[0])
    for _ in range(max_lag):
        Pm = Pm @ P
        b = min(1.0, _beta_raw(P, pi, Pm))
        # enforce monotonicity against rounding noise
        b = min(b, out[-1])
        out.append(b)
        if b < tol:
            break
    return np.array(out)


def mixing_triplet_markov(P, m: int):
    """(alpha_m, beta_m, phi_m) for a stationary finite chain.

    For Markov chains the past/future sigma-fields may be replaced by those
    of X_0 and X_m.  At m = 0 the coordinate values are returned (not the
    beta_0 = 1 convention), so 2 alpha <= beta <= phi <= 1 holds for every m.
    alpha enumerates all subsets of the state space: fine for small chains.
    """
    if m < 0:
        raise ValueError("lag must be >= 0")
    P = _check_stochastic(P)
    if not _is_primitive(P):
        raise ValueError("chain must be irreducible and aperiodic")
    k = P.shape[0]
    pi = stationary_distribution(P)
    Pm = np.linalg.matrix_power(P, m)
    C = pi[:, None] * Pm - np.outer(pi, pi)  # P(X0=i, Xm=j) - pi_i pi_j
    beta = 0.5 * float(np.abs(C).sum())
    # For fixed A, sup_D |sum_{j in D} c_j| = half the l1 norm (columns sum to 0).
    alpha = 0.0
    for r in range(1, k + 1):
        for A in itertools.combinations(range(k), r):
            alpha = max(alpha, 0.5 * float(np.abs(C[list(A)].sum(axis=0)).sum()))
    # TV is convex, so the sup over conditioning events is attained at atoms.
    phi = float(np.max(0.5 * np.abs(Pm - pi[None, :]).sum(axis=1)))
    return min(alpha, 0.25), min(beta, 1.0), min(phi, 1.0)


# ---------------------------------------------------------------------------
# mixing sequences


@dataclass(frozen=True)
class MixingSequence:
    """beta_0..beta_M plus an optional tail model for m > M.

    Tail models: ``tail_rate`` (geometric, beta_m = beta_M * rate^(m-M)) or
    ``tail_power`` (beta_m = beta_M * (M/m)^power).  Without a tail model the
    sequence is treated as truncated unless its last stored value is 0.
    """

    values: np.ndarray
    tail_rate: Optional[float] = None
    tail_power: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or v.size == 0:
            raise ValueError("need at least beta_0")
        if not np.all(np.isfinite(v)) or np.any(v < 0) or v[0] > 1:
            raise ValueError("mixing coefficients must lie in [0, 1]")
        if np.any(np.diff(v) > 0):
            raise ValueError("mixing coefficients must be nonincreasing")
        if self.tail_rate is not None and self.tail_power is not None:
            raise ValueError("choose one tail model")
        if self.tail_rate is not None and not 0 < self.tail_rate < 1:
            raise ValueError("geometric tail rate must be in (0, 1)")
        if self.tail_power is not None:
            if not self.tail_power > 0:
                raise ValueError("power tail exponent must be > 0")
            if v.size < 2:
                raise ValueError("power tail needs beta_1 stored")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def geometric(cls, rate: float, head: int = 1) -> "MixingSequence":
        """beta_m = rate^m with beta_0 = 1."""
        return cls(rate ** np.arange(head), tail_rate=rate)

    @classmethod
    def iid(cls) -> "MixingSequence":
        return cls([1.0, 0.0])

    @property
    def M(self) -> int:
        return self.values.size - 1

    @property
    def has_tail(self) -> bool:
        return self.tail_rate is not None or self.tail_power is not None

    @property
    def is_finite_support(self) -> bool:
        return not self.has_tail and self.values[-1] == 0.0

    @property
    def is_truncated(self) -> bool:
        return not self.has_tail and self.values[-1] > 0.0

    def __getitem__(self, m: int) -> float:
        if m < 0:
            raise IndexError(m)
        if m <= self.M:
            return float(self.values[m])
        last = float(self.values[-1])
        if self.tail_rate is not None:
            return last * self.tail_rate ** (m - self.M)
        if self.tail_power is not None:
            return last * (self.M / m) ** self.tail_power
        return 0.0

    def head(self, upto: int) -> np.ndarray:
        return np.array([self[m] for m in range(upto + 1)])

    def to_dict(self) -> dict:
        d = {"values": self.values.tolist()}
        if self.tail_rate is not None:
            d["tail_rate"] = self.tail_rate
        if self.tail_power is not None:
            d["tail_power"] = self.tail_power
        return d


@dataclass(frozen=True)
class SummabilityReport:
    r: float
    sum_beta: float
    sum_weighted: float
    status: str  # "finite" | "truncated" | "divergent"
    beta_finite: bool = field(default=False)
    weighted_finite: bool = field(default=False)


def _tail_sum(seq: MixingSequence, a: float) -> float:
    """sum_{m > M} m^a beta_m for the declared tail model (a >= 0)."""
    M = seq.M
    last = float(seq.values[-1])
    if last == 0.0:
        return 0.0
    if seq.tail_rate is not None:
        rho = seq.tail_rate
        if a == 0:
            return last * rho / (1 - rho)
        # sum_{k>=1} (M+k)^a rho^k = rho * Phi(rho, -a, M+1)
        return last * float(rho * mpmath.lerchphi(rho, -a, M + 1))
    if seq.tail_power is not None:
        p = seq.tail_power
        if p - a <= 1:
            return math.inf
        # last * M^p * sum_{m >= M+1} m^(a-p)
        return last * M**p * float(mpmath.zeta(p - a, M + 1))
    return 0.0


def summability_report(seq: MixingSequence, r: float) -> SummabilityReport:
    """sum_m beta_m and sum_m m^(1/(r-1)) beta_m (both starting at m = 0)."""
    if not r > 1:
        raise ValueError("r must be > 1")
    a = 1.0 / (r - 1.0)
    m = np.arange(seq.M + 1, dtype=float)
    head_b = math.fsum(seq.values)
    head_w = math.fsum(m**a * seq.values)
    if seq.has_tail:
        sb = head_b + _tail_sum(seq, 0.0)
        sw = head_w + _tail_sum(seq, a)
        bf, wf = math.isfinite(sb), math.isfinite(sw)
        status = "finite" if (bf and wf) else "divergent"
    else:
        sb, sw = head_b, head_w
        if seq.is_finite_support:
            bf = wf = True
            status = "finite"
        else:
            bf = wf = False
            status = "truncated"
    return SummabilityReport(r, sb, sw, status, bf, wf)
