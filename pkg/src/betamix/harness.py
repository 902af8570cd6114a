"""Experiment configuration, Monte Carlo runners and result emission.

Configs are INI files (``configparser``) with a ``schema_version`` key in the
``[experiment]`` section.  Any key can be overridden from the environment as
``BETAMIX_<SECTION>__<KEY>`` (for example ``BETAMIX_EXPERIMENT__SEED=7``).

Replication r always uses ``substream_seed(master_seed, r)``, and tables are
written with exact float reprs, so output files are byte-identical for a given
config whatever the thread count.
"""
from __future__ import annotations

import configparser
import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from . import classes, empirical, hausman, mixing, norms

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "DataError",
    "DegeneracyError",
    "ExperimentConfig",
    "ExperimentResult",
    "load_config",
    "config_from_mapping",
    "parse_function",
    "run_experiment",
    "run_size",
    "run_power",
    "run_clt",
    "run_equicontinuity",
    "run_entropy",
    "run_simulate",
    "run_norm",
    "run_hausman_on_file",
    "write_result",
]

SCHEMA_VERSION = 1
ENV_PREFIX = "BETAMIX_"
KINDS = ("size", "power", "clt", "equicontinuity", "entropy", "hausman", "simulate", "norm")


class ConfigError(ValueError):
    """Invalid or incomplete configuration; the message names the field."""


class DataError(ValueError):
    """Malformed input data."""


class DegeneracyError(RuntimeError):
    """A statistic is numerically degenerate."""


# ---------------------------------------------------------------------------
# config


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 0
    n: int = 1000
    reps: int = 1000
    alpha: float = 0.05
    kappa: Optional[int] = None
    basis: str = "power"
    bandwidth: Optional[int] = None
    threads: int = 1
    out: Optional[str] = None
    process: Optional[mixing.ProcessSpec] = None
    sections: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    def echo(self) -> dict:
        d = {
            "kind": self.kind,
            "seed": self.seed,
            "n": self.n,
            "reps": self.reps,
            "alpha": self.alpha,
            "kappa": self.kappa,
            "basis": self.basis,
            "bandwidth": self.bandwidth,
            "schema_version": SCHEMA_VERSION,
        }
        if self.process is not None:
            d["process"] = self.process.to_dict()
        for k, v in sorted(self.sections.items()):
            if k not in ("experiment", "process"):
                d[k] = dict(sorted(v.items()))
        return d


def _get(sec: dict, key: str, conv, default=None, where: str = ""):
    if key not in sec or sec[key] == "":
        if default is _REQUIRED:
            raise ConfigError(f"missing required field {where}{key}")
        return default
    try:
        return conv(sec[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {where}{key}: cannot parse {sec[key]!r} ({exc})") from None


_REQUIRED = object()


def _floats(text: str) -> list:
    return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]


def _matrix(text: str) -> np.ndarray:
    rows = [r for r in str(text).split(";") if r.strip()]
    return np.array([[float(t) for t in r.split(",") if t.strip()] for r in rows])


def _process_from_section(sec: dict) -> Optional[mixing.ProcessSpec]:
    if not sec:
        return None
    kind = _get(sec, "kind", str, _REQUIRED, "process.")
    try:
        if kind == "finite_markov":
            P = _get(sec, "transition", _matrix, _REQUIRED, "process.")
            vals = _get(sec, "values", _floats, None, "process.")
            return mixing.FiniteMarkov(P, None if vals is None else np.array(vals))
        if kind == "gaussian_ar1":
            return mixing.GaussianAR1(_get(sec, "a", float, _REQUIRED, "process."), _get(sec, "sigma", float, 1.0, "process."))
        if kind == "nonlinear_ar":
            return mixing.NonlinearAR(
                _get(sec, "map", str, _REQUIRED, "process."),
                _get(sec, "coef", float, _REQUIRED, "process."),
                _get(sec, "noise_std", float, 1.0, "process."),
                _get(sec, "burn_in", int, 500, "process."),
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"process: {exc}") from None
    raise ConfigError(f"field process.kind: unknown process kind {kind!r}")


def config_from_mapping(sections: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Build a config from {section: {key: str}} plus flat CLI overrides."""
    sections = {k.lower(): {kk.lower(): str(vv) for kk, vv in v.items()} for k, v in sections.items()}
    exp = sections.setdefault("experiment", {})
    for k, v in (overrides or {}).items():
        if v is not None:
            exp[k] = str(v)
    ver = _get(exp, "schema_version", int, SCHEMA_VERSION, "experiment.")
    if ver != SCHEMA_VERSION:
        raise ConfigError(f"field experiment.schema_version: expected {SCHEMA_VERSION}, got {ver}")
    kind = _get(exp, "kind", str, _REQUIRED, "experiment.")
    if kind == "hausman-on-file":
        kind = "hausman"
    if kind not in KINDS:
        raise ConfigError(f"field experiment.kind: unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    cfg = ExperimentConfig(
        kind=kind,
        seed=_get(exp, "seed", int, 0, "experiment."),
        n=_get(exp, "n", int, 1000, "experiment."),
        reps=_get(exp, "reps", int, 1000, "experiment."),
        alpha=_get(exp, "alpha", float, 0.05, "experiment."),
        kappa=_get(exp, "kappa", int, None, "experiment."),
        basis=_get(exp, "basis", str, "power", "experiment."),
        bandwidth=_get(exp, "bandwidth", int, None, "experiment."),
        threads=_get(exp, "threads", int, 1, "experiment."),
        out=_get(exp, "out", str, None, "experiment."),
        process=_process_from_section(sections.get("process", {})),
        sections=sections,
    )
    if cfg.reps < 1:
        raise ConfigError("field experiment.reps: must be >= 1")
    if cfg.n < 1:
        raise ConfigError("field experiment.n: must be >= 1")
    if not 0 < cfg.alpha <= 1:
        raise ConfigError("field experiment.alpha: must lie in (0, 1]")
    if cfg.threads < 1:
        raise ConfigError("field experiment.threads: must be >= 1")
    if cfg.kappa is not None and cfg.kappa < 1:
        raise ConfigError("field experiment.kappa: must be >= 1")
    if cfg.basis not in ("power", "hermite"):
        raise ConfigError("field experiment.basis: must be power or hermite")
    return cfg


def _env_overrides(env) -> dict:
    out = {}
    for key, val in env.items():
        if key.startswith(ENV_PREFIX) and "__" in key:
            sec, _, name = key[len(ENV_PREFIX) :].partition("__")
            out.setdefault(sec.lower(), {})[name.lower()] = val
    return out


def load_config(path: Optional[str], overrides: Optional[dict] = None, env=None) -> ExperimentConfig:
    """Read an INI config; environment variables then CLI overrides take precedence."""
    sections: dict = {}
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        sections = {s: dict(cp[s]) for s in cp.sections()}
    for sec, kv in _env_overrides(os.environ if env is None else env).items():
        sections.setdefault(sec, {}).update(kv)
    return config_from_mapping(sections, overrides)


# ---------------------------------------------------------------------------
# function registry


def parse_function(name: str) -> Callable:
    """Named test functions: identity, square, abs, tanh, cos, const:<c>,
    indicator:<v> (x == v), step:<t> (x > t), holder:<s>:<a> (|x - a|^s)."""
    head, *args = name.strip().split(":")
    try:
        if head == "identity":
            return lambda x: np.asarray(x, dtype=float)
        if head == "square":
            return lambda x: np.asarray(x, dtype=float) ** 2
        if head == "abs":
            return lambda x: np.abs(np.asarray(x, dtype=float))
        if head == "tanh":
            return lambda x: np.tanh(np.asarray(x, dtype=float))
        if head == "cos":
            return lambda x: np.cos(np.asarray(x, dtype=float))
        if head == "const":
            c = float(args[0])
            return lambda x: np.full(np.shape(x), c)
        if head == "indicator":
            v = float(args[0])
            return lambda x: (np.asarray(x, dtype=float) == v).astype(float)
        if head == "step":
            t = float(args[0])
            return lambda x: (np.asarray(x, dtype=float) > t).astype(float)
        if head == "holder":
            s, a = float(args[0]), float(args[1])
            return lambda x: np.abs(np.asarray(x, dtype=float) - a) ** s
    except (IndexError, ValueError):
        pass
    raise ConfigError(f"unknown or malformed function {name!r}")


def _names(text: str) -> list:
    return [t.strip() for t in str(text).split(",") if t.strip()]


# ---------------------------------------------------------------------------
# results


@dataclass
class ExperimentResult:
    kind: str
    seed: int
    columns: list
    rows: list
    summary: dict
    config: dict
    warnings: list = field(default_factory=list)
    runtime: float = 0.0

    def basename(self) -> str:
        return f"{self.kind}_seed{self.seed}"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_result(result: ExperimentResult, out_dir) -> list:
    """Write <kind>_seed<seed>.csv (the table) and .json (summary, config echo)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if result.rows:
        p = out / f"{result.basename()}.csv"
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(result.columns)
            for row in result.rows:
                w.writerow([_fmt(row.get(c)) for c in result.columns])
        paths.append(p)
    p = out / f"{result.basename()}.json"
    doc = {"kind": result.kind, "seed": result.seed, "summary": result.summary, "warnings": result.warnings, "config": result.config}
    with open(p, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(p)
    return paths


# ---------------------------------------------------------------------------
# replication helpers


def _chunks(seq: Sequence, size: int) -> list:
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _parallel_map(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _rate(hits: np.ndarray) -> tuple:
    R = hits.size
    r = float(np.mean(hits)) if R else math.nan
    return r, math.sqrt(r * (1.0 - r) / R) if R else math.nan


def _hausman_pvalues(cfg: ExperimentConfig, dgp: hausman.LocalAltDGP) -> np.ndarray:
    """(reps x 3) p-values for H1, H2 and the regression contrast (nan if degenerate)."""
    kappa = cfg.kappa if cfg.kappa is not None else hausman.default_kappa(cfg.n)
    basis = hausman.SieveBasis(kappa, cfg.basis)
    seeds = [mixing.substream_seed(cfg.seed, r) for r in range(cfg.reps)]

    def work(chunk):
        Y, X = hausman.simulate_local_alt_many(dgp, cfg.n, chunk)
        out = np.full((len(chunk), 6), np.nan)
        for i in range(len(chunk)):
            rep = hausman.hausman_test(hausman.TimeSeriesSample(Y[i], X[i]), bandwidth=cfg.bandwidth, basis=basis)
            out[i] = [_nan(rep.p1), _nan(rep.p2), _nan(rep.p_reg), _nan(rep.H1), _nan(rep.H2), _nan(rep.H_reg)]
        return out

    return np.vstack(_parallel_map(work, _chunks(seeds, 100), cfg.threads))


def _nan(v):
    return math.nan if v is None else v


def _dgp_from_config(cfg: ExperimentConfig, c: float) -> hausman.LocalAltDGP:
    sec = cfg.section("dgp")
    if cfg.process is None:
        raise ConfigError("missing required section [process] for the regressor process")
    try:
        return hausman.LocalAltDGP(
            cfg.process,
            _get(sec, "h0", str, "zero", "dgp."),
            c,
            _get(sec, "psi0", float, 0.0, "dgp."),
            _get(sec, "psi1", float, 0.0, "dgp."),
            _get(sec, "error_sd", float, 1.0, "dgp."),
        )
    except ValueError as exc:
        raise ConfigError(f"dgp: {exc}") from None


_STATS = ("H1", "H2", "H_reg")


def run_size(cfg: ExperimentConfig) -> ExperimentResult:
    """Null rejection rates of H1, H2 and the regression contrast at level alpha."""
    t0 = time.perf_counter()
    c = _get(cfg.section("dgp"), "c", float, 0.0, "dgp.")
    if c != 0:
        raise ConfigError("field dgp.c: a size experiment needs c = 0")
    dgp = _dgp_from_config(cfg, 0.0)
    P = _hausman_pvalues(cfg, dgp)
    rows = []
    for j, name in enumerate(_STATS):
        p = P[:, j]
        ok = ~np.isnan(p)
        rate, se = _rate(p[ok] <= cfg.alpha)
        Hs = P[ok, 3 + j]
        ks = float(stats.kstest(Hs, "chi2", args=(1,)).statistic) if Hs.size else math.nan
        rows.append({"statistic": name, "rate": rate, "se": se, "R": int(ok.sum()), "alpha": cfg.alpha, "ks_chi2_1": ks, "degenerate": int((~ok).sum())})
    return ExperimentResult("size", cfg.seed, ["statistic", "rate", "se", "R", "alpha", "ks_chi2_1", "degenerate"], rows, {}, cfg.echo(), runtime=time.perf_counter() - t0)


def run_power(cfg: ExperimentConfig) -> ExperimentResult:
    """Rejection rates over a grid of drift scales c with noncentrality predictions."""
    t0 = time.perf_counter()
    grid = _get(cfg.section("dgp"), "c_grid", _floats, [0.0, 2.0, 4.0, 8.0], "dgp.")
    kappa = cfg.kappa if cfg.kappa is not None else hausman.default_kappa(cfg.n)
    basis = hausman.SieveBasis(kappa, cfg.basis)
    warnings = []
    nc = None
    try:
        nc = hausman.noncentrality(_dgp_from_config(cfg, 1.0), basis)
    except TypeError as exc:
        warnings.append(f"no power prediction: {exc}")
    except hausman.HausmanError as exc:
        warnings.append(f"no power prediction: {exc}")
    if nc is not None and abs(nc.b) < 1e-10 and abs(nc.g) < 1e-10:
        warnings.append("test has no local power against this direction: b(h0) = 0 under the marginal of x")
    rows = []
    for c in grid:
        P = _hausman_pvalues(cfg, _dgp_from_config(cfg, c))
        for j, name in enumerate(_STATS):
            p = P[:, j]
            ok = ~np.isnan(p)
            rate, se = _rate(p[ok] <= cfg.alpha)
            pred = pred_b = math.nan
            if nc is not None and cfg.alpha < 1:
                lam = c * (nc.lambda_reg if name == "H_reg" else nc.lambda_z)
                lam_b = c * (nc.lambda_reg_b if name == "H_reg" else (nc.lambda1 if name == "H1" else nc.lambda2))
                pred, pred_b = hausman.predicted_power(lam, cfg.alpha), hausman.predicted_power(lam_b, cfg.alpha)
            rows.append({"c": c, "statistic": name, "rate": rate, "se": se, "R": int(ok.sum()), "predicted": pred, "predicted_b_only": pred_b})
    summary = {}
    if nc is not None:
        summary = {k: getattr(nc, k) for k in ("b", "g", "e", "D11", "D", "S", "lambda1", "lambda2", "lambda_reg_b", "lambda_z", "lambda_reg")}
        summary["kappa"] = kappa
    return ExperimentResult("power", cfg.seed, ["c", "statistic", "rate", "se", "R", "predicted", "predicted_b_only"], rows, summary, cfg.echo(), warnings, time.perf_counter() - t0)


def run_clt(cfg: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    if cfg.process is None:
        raise ConfigError("missing required section [process]")
    names = _get(cfg.section("clt"), "functions", _names, ["identity"], "clt.")
    funcs = [parse_function(nm) for nm in names]
    try:
        res = empirical.fidi_experiment(funcs, cfg.process, cfg.n, cfg.reps, cfg.seed, labels=names)
    except TypeError as exc:
        raise ConfigError(f"process: {exc}") from None
    rows = []
    for j, nm in enumerate(names):
        rows.append(
            {
                "function": nm,
                "gamma": res.gamma[j, j],
                "sample_var": res.sample_cov[j, j],
                "var_ratio": res.var_ratio[j],
                "ks_stat": res.ks_stat[j],
                "ks_pvalue": res.ks_pvalue[j],
                "R": cfg.reps,
                "n": cfg.n,
            }
        )
    summary = {"gamma": res.gamma, "sample_cov": res.sample_cov}
    return ExperimentResult("clt", cfg.seed, ["function", "gamma", "sample_var", "var_ratio", "ks_stat", "ks_pvalue", "R", "n"], rows, summary, cfg.echo(), list(res.flags), time.perf_counter() - t0)


def run_equicontinuity(cfg: ExperimentConfig) -> ExperimentResult:
    """P(max |v_n(f_a) - v_n(f_b)|> eps) over pairs of |x - a|^s shifted by at most delta.

    Section [equicontinuity]: s, eps, deltas, shifts (base shift points).
    Pairs are (|x - a|^s, |x - a - d|^s) for a in shifts and d = delta.
    """
    t0 = time.perf_counter()
    if cfg.process is None:
        raise ConfigError("missing required section [process]")
    sec = cfg.section("equicontinuity")
    s = _get(sec, "s", float, 0.8, "equicontinuity.")
    eps = _get(sec, "eps", float, 0.25, "equicontinuity.")
    deltas = _get(sec, "deltas", _floats, [0.4, 0.2, 0.1], "equicontinuity.")
    shifts = _get(sec, "shifts", _floats, [0.0, 0.5, 1.0], "equicontinuity.")
    rows = []
    for d in deltas:
        pairs = [
            (lambda x, a=a: np.abs(np.asarray(x) - a) ** s, lambda x, a=a, d=d: np.abs(np.asarray(x) - a - d) ** s)
            for a in shifts
        ]
        try:
            res = empirical.equicontinuity_probe(pairs, cfg.process, cfg.n, eps, cfg.reps, cfg.seed)
        except TypeError as exc:
            raise ConfigError(f"process: {exc}") from None
        rows.append({"shift": d, "eps": eps, "probability": res.probability, "se": res.se, "R": res.reps})
    return ExperimentResult("equicontinuity", cfg.seed, ["shift", "eps", "probability", "se", "R"], rows, {}, cfg.echo(), runtime=time.perf_counter() - t0)


def _params_from_section(sec: dict) -> classes.ClassParams:
    lo = _get(sec, "domain_lo", float, None, "entropy.")
    hi = _get(sec, "domain_hi", float, None, "entropy.")
    try:
        return classes.ClassParams(
            s=_get(sec, "s", float, 1.0, "entropy."),
            theta=_get(sec, "theta", float, 0.0, "entropy."),
            gamma=_get(sec, "gamma", float, None, "entropy."),
            radius=_get(sec, "radius", float, 1.0, "entropy."),
            domain=None if lo is None or hi is None else (lo, hi),
        )
    except ValueError as exc:
        raise ConfigError(f"entropy: {exc}") from None


def _mixing_from_section(sec: dict, where: str) -> mixing.MixingSequence:
    rate = _get(sec, "beta_rate", float, None, where)
    values = _get(sec, "beta", _floats, None, where)
    try:
        if values is not None:
            return mixing.MixingSequence(values, tail_rate=rate)
        return mixing.MixingSequence.geometric(rate if rate is not None else 0.5)
    except ValueError as exc:
        raise ConfigError(f"{where}beta: {exc}") from None


def run_entropy(cfg: ExperimentConfig) -> ExperimentResult:
    """Log net size per delta, fitted exponent, and validation of random-member covers."""
    t0 = time.perf_counter()
    sec = cfg.section("entropy")
    params = _params_from_section(sec)
    seq = _mixing_from_section(sec, "entropy.")
    deltas = _get(sec, "deltas", _floats, [0.2, 0.1, 0.05, 0.02], "entropy.")
    members = _get(sec, "members", int, 20, "entropy.")
    rng_seed = mixing.substream_seed(cfg.seed, 0)
    dom = params.domain if params.bounded else (-3.0, 3.0)

    def gen(delta):
        rng = np.random.default_rng([rng_seed, int(round(delta * 1e9))])
        return classes.holder_ball_members(rng, members, params.s, params.radius, dom, params.theta)

    try:
        fit = classes.entropy_scaling(gen, params, deltas, seq)
    except classes.NormDivergent as exc:
        raise DegeneracyError(str(exc)) from None
    except (ValueError, NotImplementedError) as exc:
        raise ConfigError(f"entropy: {exc}") from None
    rows = []
    for d, H, chk in zip(fit.deltas, fit.log_counts, fit.checks):
        rows.append({"delta": d, "log_count": H, "cover_count": chk["count"], "covered": chk["covered"], "width_ok": chk["width_ok"]})
    summary = {"fitted_exponent": fit.fitted, "predicted_exponent": fit.predicted, "relative_error": fit.relative_error, "covers_valid": fit.covers_valid}
    return ExperimentResult("entropy", cfg.seed, ["delta", "log_count", "cover_count", "covered", "width_ok"], rows, summary, cfg.echo(), runtime=time.perf_counter() - t0)


def run_simulate(cfg: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    if cfg.process is None:
        raise ConfigError("missing required section [process]")
    path = mixing.simulate(cfg.process, cfg.n, cfg.seed)
    rows = [{"t": t, "value": float(v)} for t, v in enumerate(path.observations)]
    cols = ["t", "value"]
    if path.states is not None:
        for r, s in zip(rows, path.states):
            r["state"] = int(s)
        cols.append("state")
    return ExperimentResult("simulate", cfg.seed, cols, rows, {"n": cfg.n}, cfg.echo(), runtime=time.perf_counter() - t0)


def run_norm(cfg: ExperimentConfig) -> ExperimentResult:
    """Beta-mixing norm, L2 norm, long-run variance and the covariance bound for one f."""
    t0 = time.perf_counter()
    if not isinstance(cfg.process, mixing.FiniteMarkov):
        raise ConfigError("field process.kind: the norm report needs a finite_markov process")
    sec = cfg.section("norm")
    name = _get(sec, "function", str, "identity", "norm.")
    f = parse_function(name)
    spec = cfg.process
    seq = spec.mixing_sequence()
    q = norms.quantile_of(spec, f)
    nr = norms.norm_2beta(q, seq)
    sup = norms.norm_2beta_sup_check(f, spec, mixing.MixingSequence(seq.values[: min(seq.values.size, 61)]))
    gamma = norms.longrun_variance(f, spec)
    summary = {
        "function": name,
        "norm_2beta": nr.value,
        "status": nr.status,
        "norm_l2": norms.norm_l2(q),
        "sum_beta": mixing.summability_report(seq, 2.0).sum_beta,
        "sup_check_truncated_M60": sup,
        "gamma": gamma,
        "abs_cov_sum": norms.autocovariance_abs_sum(f, spec),
        "covariance_bound": 4.0 * nr.squared,
    }
    return ExperimentResult("norm", cfg.seed, [], [], summary, cfg.echo(), runtime=time.perf_counter() - t0)


def run_hausman_on_file(path, cfg: Optional[ExperimentConfig] = None) -> hausman.HausmanReport:
    """Read a y,x CSV and run the test.  Malformed files raise DataError."""
    try:
        sample = hausman.read_sample_csv(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except hausman.HausmanError as exc:
        raise DataError(str(exc)) from None
    kappa = None if cfg is None else cfg.kappa
    basis = "power" if cfg is None else cfg.basis
    bw = None if cfg is None else cfg.bandwidth
    try:
        return hausman.hausman_test(sample, kappa=kappa, family=basis, bandwidth=bw)
    except hausman.CollinearBasis as exc:
        raise DegeneracyError(str(exc)) from None
    except hausman.HausmanError as exc:
        raise DataError(str(exc)) from None


RUNNERS = {
    "size": run_size,
    "power": run_power,
    "clt": run_clt,
    "equicontinuity": run_equicontinuity,
    "entropy": run_entropy,
    "simulate": run_simulate,
    "norm": run_norm,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.kind not in RUNNERS:
        raise ConfigError(f"field experiment.kind: {cfg.kind!r} is not a table experiment")
    return RUNNERS[cfg.kind](cfg)
