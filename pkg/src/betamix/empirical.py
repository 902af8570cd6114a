"""Centred empirical process v_n(f) = n^(-1/2) sum_t (f(chi_t) - E f), with Monte Carlo probes."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .mixing import FiniteMarkov, GaussianAR1, MixingSequence, ProcessSpec, SamplePath, simulate_many, substream_seed
from .norms import longrun_matrix, norm_2beta, quantile_of

__all__ = [
    "vn",
    "exact_mean",
    "FidiSample",
    "FidiResult",
    "fidi_experiment",
    "EquicontinuityResult",
    "equicontinuity_probe",
]

_BATCH = 250


def vn(f: Callable, path, mean: float) -> float:
    """n^(-1/2) sum_t (f(chi_t) - mean) along a path (SamplePath or array)."""
    obs = path.observations if isinstance(path, SamplePath) else np.asarray(path, dtype=float)
    vals = np.asarray(f(obs), dtype=float)
    return float(np.sum(vals - mean) / math.sqrt(vals.size))


def exact_mean(f: Callable, spec: ProcessSpec) -> float:
    """E f(chi_t) under the stationary marginal."""
    if isinstance(spec, FiniteMarkov):
        return float(spec.stationary @ np.asarray(f(spec.values), dtype=float))
    if isinstance(spec, GaussianAR1):
        # adaptive quadrature: Gauss-Hermite loses ~1e-3 on kinked f, which sqrt(n) amplifies
        sd = spec.marginal_sd
        g = lambda z: float(f(np.asarray(sd * z, dtype=float))) * math.exp(-0.5 * z * z)
        val = sum(integrate.quad(g, lo, hi, limit=500, epsabs=1e-13, epsrel=1e-12)[0] for lo, hi in ((-40, 0), (0, 40)))
        return val / math.sqrt(2 * math.pi)
    raise TypeError(f"no exact mean available for {type(spec).__name__}; supply means explicitly")


def _vn_matrix(funcs: Sequence[Callable], means: np.ndarray, spec: ProcessSpec, n: int, seeds: Sequence[int]) -> np.ndarray:
    """Rows are replications, columns functions."""
    out = np.empty((len(seeds), len(funcs)))
    root = math.sqrt(n)
    for b0 in range(0, len(seeds), _BATCH):
        chunk = seeds[b0 : b0 + _BATCH]
        obs, states = simulate_many(spec, n, chunk)
        if states is not None:
            # sum over t of f(state) = sum over states of count * f(value)
            k = spec.n_states
            counts = np.stack([np.bincount(row, minlength=k) for row in states]).astype(float)
            for j, f in enumerate(funcs):
                g = np.asarray(f(spec.values), dtype=float)
                out[b0 : b0 + len(chunk), j] = (counts @ (g - means[j])) / root
        else:
            for j, f in enumerate(funcs):
                vals = np.asarray(f(obs), dtype=float)
                out[b0 : b0 + len(chunk), j] = (vals - means[j]).sum(axis=1) / root
    return out


@dataclass(frozen=True)
class FidiSample:
    values: np.ndarray  # reps x k
    labels: tuple
    n: int
    seed: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["rep", *self.labels])
            for r, row in enumerate(self.values):
                w.writerow([r, *[repr(float(v)) for v in row]])


@dataclass(frozen=True)
class FidiResult:
    sample: FidiSample
    gamma: np.ndarray
    sample_cov: np.ndarray
    cov_delta: np.ndarray
    var_ratio: np.ndarray  # nan where Gamma(f, f) = 0
    ks_stat: np.ndarray
    ks_pvalue: np.ndarray
    flags: tuple


def fidi_experiment(
    funcs: Sequence[Callable],
    spec: ProcessSpec,
    n: int,
    reps: int,
    seed: int,
    labels: Optional[Sequence[str]] = None,
    means: Optional[Sequence[float]] = None,
) -> FidiResult:
    """Replicate (v_n(f_1), ..., v_n(f_k)) and compare with N(0, Gamma).

    Gamma is exact for finite chains and Gaussian AR(1) (the off-diagonal
    entries by polarization).  Coordinates with Gamma(f, f) = 0 skip the
    variance ratio and KS test and are flagged.
    """
    if not funcs:
        raise ValueError("need at least one function")
    if reps < 2:
        raise ValueError("need at least 2 replications")
    labels = tuple(labels) if labels is not None else tuple(f"f{i}" for i in range(len(funcs)))
    mu = np.array([exact_mean(f, spec) for f in funcs]) if means is None else np.asarray(means, dtype=float)
    seeds = [substream_seed(seed, r) for r in range(reps)]
    V = _vn_matrix(funcs, mu, spec, n, seeds)
    G = longrun_matrix(funcs, spec)
    C = np.cov(V, rowvar=False, ddof=1).reshape(len(funcs), len(funcs))
    k = len(funcs)
    ratio = np.full(k, np.nan)
    ks = np.full(k, np.nan)
    pv = np.full(k, np.nan)
    flags = []
    scale = max(1.0, float(np.max(np.abs(np.diag(G)))))
    for j in range(k):
        if G[j, j] <= 1e-12 * scale:
            flags.append(f"{labels[j]}: Gamma is zero, variance ratio and KS skipped")
            continue
        ratio[j] = C[j, j] / G[j, j]
        res = stats.kstest(V[:, j], "norm", args=(0.0, math.sqrt(G[j, j])))
        ks[j], pv[j] = res.statistic, res.pvalue
    if np.linalg.matrix_rank(G) < k:
        flags.append("Gamma is singular; compare covariances elementwise")
    return FidiResult(FidiSample(V, labels, n, seed), G, C, C - G, ratio, ks, pv, tuple(flags))


@dataclass(frozen=True)
class EquicontinuityResult:
    probability: float
    se: float
    reps: int
    eps: float
    pair_norms: Optional[np.ndarray]
    max_abs: np.ndarray


def equicontinuity_probe(
    pairs: Sequence[tuple],
    spec: ProcessSpec,
    n: int,
    eps: float,
    reps: int,
    seed: int,
    delta: Optional[float] = None,
    seq: Optional[MixingSequence] = None,
) -> EquicontinuityResult:
    """Estimate P(max_pairs |v_n(f) - v_n(g)| > eps) by simulation.

    When ``delta`` and ``seq`` are given (finite chains only) every pair is
    first certified to satisfy ||f - g||_{2,beta} <= delta.
    """
    if reps < 1:
        raise ValueError("need at least 1 replication")
    diffs = [lambda x, f=f, g=g: np.asarray(f(x), dtype=float) - np.asarray(g(x), dtype=float) for f, g in pairs]
    norms = None
    if delta is not None:
        if seq is None or not isinstance(spec, FiniteMarkov):
            raise ValueError("certifying pair distances needs a finite chain and its mixing sequence")
        norms = np.array([norm_2beta(quantile_of(spec, h), seq).value for h in diffs])
        if np.any(norms > delta * (1 + 1e-12)):
            raise ValueError("some pair is farther apart than delta")
    mu = np.array([exact_mean(h, spec) for h in diffs])
    seeds = [substream_seed(seed, r) for r in range(reps)]
    V = _vn_matrix(diffs, mu, spec, n, seeds)
    m = np.max(np.abs(V), axis=1)
    p = float(np.mean(m > eps))
    return EquicontinuityResult(p, math.sqrt(p * (1 - p) / reps), reps, eps, norms, m)
