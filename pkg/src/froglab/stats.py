"""Monte Carlo harness: standardization, normality diagnostics, oracle comparison.

The CLT statistic is ``(V - q n) / (sigma sqrt(n))``. Its finite-n behaviour is
summarized by mean, standard deviation, skewness and the Kolmogorov-Smirnov
distance to the standard normal. Thresholds are engineering choices; the
limit theorem carries no finite-n rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import chi2

from . import analysis, simulate
from .oracle import ExactLaw


@dataclass(frozen=True)
class CltThresholds:
    mean: float = 0.1
    sd: float = 0.05
    ks: float = 0.03


@dataclass(frozen=True)
class CltReport:
    n: int
    replicates: int
    seed: int
    mode: str
    mean_z: float
    sd_z: float
    skew_z: float
    ks: float
    mean_v_over_n: float
    passed: bool

    def to_dict(self, constants: analysis.ModelConstants | None = None) -> dict:
        c = constants or analysis.model_constants()
        return {
            "experiment": "clt",
            "n": self.n,
            "replicates": self.replicates,
            "seed": self.seed,
            "mode": self.mode,
            "q": c.q,
            "sigma": c.sigma,
            "mean_z": self.mean_z,
            "sd_z": self.sd_z,
            "skew_z": self.skew_z,
            "ks": self.ks,
            "mean_v_over_n": self.mean_v_over_n,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class EventReport:
    n: int
    replicates: int
    seed: int
    freq_b0: float
    freq_b1: float
    freq_b2: float
    clamped_b2_range: int
    tau_checked: int
    tau_violations: int
    tau_bound: float

    def to_dict(self) -> dict:
        return {"experiment": "events", **asdict(self)}


def standardize(v, n: int, constants: analysis.ModelConstants | None = None):
    """``(v - q n) / (sigma sqrt(n))``; works elementwise on arrays."""
    c = constants or analysis.model_constants()
    return (v - c.q * n) / (c.sigma * math.sqrt(n))


_SQRT_HALF = math.sqrt(0.5)


def normal_cdf(x: float) -> float:
    """Standard normal CDF as ``erfc(-x/sqrt 2)/2`` (libm erfc, ~1e-16 absolute)."""
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    return 0.5 * math.erfc(-x * _SQRT_HALF)


def ks_statistic(z_samples) -> float:
    z = np.sort(np.asarray(z_samples, dtype=np.float64))
    m = z.size
    if m == 0:
        raise ValueError("KS statistic needs at least one sample")
    cdf = np.array([normal_cdf(x) for x in z.tolist()])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


def moments(x) -> tuple[float, float, float]:
    """Mean, sample standard deviation and skewness, two-pass with fsum."""
    x = np.asarray(x, dtype=np.float64)
    m = x.size
    mean = math.fsum(x) / m
    d = x - mean
    m2 = math.fsum(d * d)
    sd = math.sqrt(m2 / (m - 1)) if m > 1 else 0.0
    pop_var = m2 / m
    skew = math.fsum(d ** 3) / m / pop_var ** 1.5 if pop_var > 0 else 0.0
    return mean, sd, skew


def sample_v(n, replicates, seed, mode, threads=None):
    if mode == "chain":
        v, _, _ = simulate.chain_batch(n, seed, replicates, track_b0=False, threads=threads)
    elif mode == "level":
        v, _ = simulate.level_batch(n, seed, replicates, threads=threads)
    else:
        raise ValueError(f"mode must be 'chain' or 'level', got {mode!r}")
    return v


def clt_report(v, n, seed, mode, thresholds=CltThresholds(), constants=None) -> tuple[CltReport, np.ndarray]:
    c = constants or analysis.model_constants()
    z = standardize(np.asarray(v, dtype=np.float64), n, c)
    mean_z, sd_z, skew_z = moments(z)
    ks = ks_statistic(z)
    passed = abs(mean_z) <= thresholds.mean and abs(sd_z - 1.0) <= thresholds.sd and ks <= thresholds.ks
    mean_v = math.fsum(np.asarray(v, dtype=np.float64)) / len(v)
    report = CltReport(n, len(v), seed, mode, mean_z, sd_z, skew_z, ks, mean_v / n, passed)
    return report, z


def run_clt_experiment(n: int, replicates: int, seed: int, mode: str = "level",
                       thresholds: CltThresholds = CltThresholds(), threads=None,
                       constants=None) -> CltReport:
    """Simulate substreams (seed, 0..replicates-1) and summarize the CLT statistic."""
    if replicates < 100:
        raise ValueError("need at least 100 replicates")
    v = sample_v(n, replicates, seed, mode, threads)
    return clt_report(v, n, seed, mode, thresholds, constants)[0]


def histogram(v, n: int) -> np.ndarray:
    """Counts indexed like ``ExactLaw.pmf``: entry v-1 counts outcome v."""
    return np.bincount(np.asarray(v) - 1, minlength=n)


def pooled_cells(expected, observed, min_expected=5.0):
    """Merge adjacent cells left to right until each expects >= ``min_expected``.

    A short remainder at the right end is merged into the last emitted cell.
    """
    exp_cells, obs_cells = [], []
    acc_e = acc_o = 0.0
    for e, o in zip(expected, observed):
        acc_e += e
        acc_o += o
        if acc_e >= min_expected:
            exp_cells.append(acc_e)
            obs_cells.append(acc_o)
            acc_e = acc_o = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp_cells:
            exp_cells[-1] += acc_e
            obs_cells[-1] += acc_o
        else:
            exp_cells.append(acc_e)
            obs_cells.append(acc_o)
    return np.array(exp_cells), np.array(obs_cells)


def compare_to_oracle(counts, law: ExactLaw) -> tuple[float, float]:
    """Total variation distance and chi-square p-value of counts against the exact law."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size != law.n:
        raise ValueError(f"histogram covers n={counts.size}, law is for n={law.n}")
    total = counts.sum()
    if total <= 0:
        raise ValueError("empty histogram")
    tv = 0.5 * math.fsum(np.abs(counts / total - law.pmf))
    exp_cells, obs_cells = pooled_cells(total * law.pmf, counts)
    if exp_cells.size < 2:
        return tv, 1.0
    stat = math.fsum((obs_cells - exp_cells) ** 2 / exp_cells)
    return tv, float(chi2.sf(stat, exp_cells.size - 1))


def oracle_compare_report(n, replicates, seed, mode, tv, p_value) -> dict:
    return {"experiment": "oracle-compare", "n": n, "replicates": replicates, "seed": seed,
            "mode": mode, "tv": tv, "chi_square_p": p_value}


def run_event_experiment(n: int, replicates: int, seed: int,
                         constants: analysis.ModelConstants | None = None,
                         threads=None) -> EventReport:
    """Frequencies of B0 (chain mode) and B1, B2 (ideal mode) over ``replicates`` runs.

    Also counts, among replicates where both B1 and B2 hold, those where tau
    strays from its prediction by more than 2 (ln n)^3 n^{1/4}.
    """
    if n < 16:
        raise ValueError("events need n >= 16")
    c = constants or analysis.model_constants()
    _, _, b0 = simulate.chain_batch(n, seed, replicates, track_b0=True, threads=threads)
    tau, _, b1, b2, pred = simulate.ideal_batch(n, seed, replicates, c, threads=threads)
    par = simulate.IdealParams.build(n, c)
    both = b1 & b2
    off = np.abs(tau - pred) > par.tau_bound
    return EventReport(
        n=n,
        replicates=replicates,
        seed=seed,
        freq_b0=float(b0.mean()),
        freq_b1=float(b1.mean()),
        freq_b2=float(b2.mean()),
        clamped_b2_range=par.b2_len,
        tau_checked=int(both.sum()),
        tau_violations=int((off & both).sum()),
        tau_bound=par.tau_bound,
    )


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=False)
