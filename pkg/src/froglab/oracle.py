"""Exact law of the number of visited vertices by dynamic programming.

The chain is tracked on states (v, a) = (visited, active). From (v, a) with
a >= 1 one jump moves mass to (v+1, a+1) with probability (n-v)/n and to
(v, a-1) with probability v/n; mass reaching a = 0 is absorbed at v.
Sweeping v upward and a downward inside each column is a topological order,
so two columns of length n+3 suffice.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import analysis
from ._backend import kernels as _default_kernels

DEFAULT_CAP = 20_000
MASS_TOLERANCE = 1e-12


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactLaw:
    n: int
    pmf: np.ndarray  # pmf[v - 1] = P(V = v), v = 1..n
    mean: float
    variance: float
    expected_jumps: float

    def prob(self, v: int) -> float:
        return float(self.pmf[v - 1])

    def support(self) -> np.ndarray:
        return np.arange(1, self.n + 1)

    def moments_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "variance": self.variance,
                "expected_jumps": self.expected_jumps}

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("v", "probability"))
        for v, p in zip(range(1, self.n + 1), self.pmf.tolist()):
            writer.writerow((v, repr(p)))

    def to_json(self) -> str:
        return json.dumps({**self.moments_dict(), "pmf": self.pmf.tolist()})


def exact_law(n: int, cap: int = DEFAULT_CAP, kernels=None) -> ExactLaw:
    """Probability mass function and moments of V_inf on K_n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds the oracle cap {cap} (O(n^2) sweep)")
    kern = kernels or _default_kernels
    pmf = np.asarray(kern.exact_pmf(n), dtype=np.float64)[1:]
    total = math.fsum(pmf)
    if abs(total - 1.0) > MASS_TOLERANCE:
        raise ArithmeticError(f"exact law mass {total!r} deviates from 1 beyond {MASS_TOLERANCE}")
    v = np.arange(1, n + 1, dtype=np.float64)
    mean = math.fsum(pmf * v)
    variance = math.fsum(pmf * (v - mean) ** 2)
    return ExactLaw(n=n, pmf=pmf, mean=mean, variance=variance, expected_jumps=2.0 * mean - 1.0)


class MomentRow(NamedTuple):
    n: int
    mean: float
    centering_error: float  # |mean - qn| / sqrt(n)
    sd_ratio: float  # sd / (sigma sqrt(n))


def moment_scaling(ns, constants: analysis.ModelConstants | None = None, cap: int = DEFAULT_CAP) -> list[MomentRow]:
    c = constants or analysis.model_constants()
    rows = []
    for n in ns:
        law = exact_law(n, cap)
        root = math.sqrt(n)
        rows.append(MomentRow(n, law.mean, abs(law.mean - c.q * n) / root,
                              math.sqrt(law.variance) / (c.sigma * root)))
    return rows


def conditional_moments(law: ExactLaw, v_min: int) -> tuple[float, float, float]:
    """``(P(V >= v_min), mean, variance)`` of V given V >= v_min.

    Separates the O(1/n) early-extinction atom (first jumps dying) from the
    bulk of the law around qn.
    """
    v = law.support()
    mask = v >= v_min
    mass = math.fsum(law.pmf[mask])
    w = law.pmf[mask] / mass
    mean = math.fsum(w * v[mask])
    return mass, mean, math.fsum(w * (v[mask] - mean) ** 2)
