"""Deterministic numerics for the frog model on the complete graph.

Constants of the limit theorem (``q``, the drift ``mu_r`` at level ``qn``,
the CLT scale ``sigma``, the MGF exponent ``kappa``), the level drift and
variance sums, and exhaustive checkers for the inequalities used to control
them. Every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np


class ConfigurationError(ValueError):
    """A check was asked to run outside the region where it is defined."""


def h(p: float) -> float:
    """``2p + ln(1-p)``; its nonzero root is the limiting infected fraction."""
    return 2.0 * p + math.log1p(-p)


def solve_q(tolerance: float = 1e-12) -> float:
    """Root of ``2p + ln(1-p)`` in (1/2, 1) by bisection.

    ``h`` increases on [0, 1/2] from h(0) = 0 to 1 - ln 2 > 0 and decreases
    to -inf afterwards, so [1/2, 1 - 1e-3] brackets the unique nonzero root.
    Stops at the first midpoint with ``|h| <= tolerance``.
    """
    if not (0.0 < tolerance <= 1e-3):
        raise ValueError(f"tolerance must lie in (0, 1e-3], got {tolerance!r}")
    lo, hi = 0.5, 1.0 - 1e-3
    while True:
        mid = 0.5 * (lo + hi)
        value = h(mid)
        if abs(value) <= tolerance:
            return mid
        if mid in (lo, hi):
            raise ValueError(f"tolerance {tolerance!r} is below double-precision resolution of h near its root")
        if value > 0.0:
            lo = mid
        else:
            hi = mid


def variance_integral(q: float) -> float:
    """Closed form of the integral of x/(1-x)^2 over [0, q]."""
    return 1.0 / (1.0 - q) + math.log1p(-q) - 1.0


@dataclass(frozen=True)
class ModelConstants:
    q: float
    mu_r: float
    sigma: float
    sigma_sq: float
    kappa: float
    q_residual: float

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=None)
def model_constants(tolerance: float = 1e-12) -> ModelConstants:
    q = solve_q(tolerance)
    mu_r = 2.0 - 1.0 / (1.0 - q)
    return ModelConstants(
        q=q,
        mu_r=mu_r,
        sigma=sigma("integral", q),
        sigma_sq=variance_integral(q) / mu_r ** 2,
        kappa=kappa(q),
        q_residual=h(q),
    )


def _default_q(q):
    return solve_q(1e-12) if q is None else q


def sigma(method: str = "integral", q: float | None = None) -> float:
    """CLT scale, divided by ``|mu_r|`` so that it is positive.

    ``integral`` uses the antiderivative of x/(1-x)^2; ``closed_form`` uses
    ``(q - 2q^2)/(q - 1)``, which equals it once ln(1-q) = -2q.
    """
    q = _default_q(q)
    mu_r = 2.0 - 1.0 / (1.0 - q)
    if method == "integral":
        numerator = variance_integral(q)
    elif method == "closed_form":
        numerator = (q - 2.0 * q * q) / (q - 1.0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return math.sqrt(numerator) / abs(mu_r)


def _check_level(s, n, name="s"):
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not (0 <= s < n):
        raise ValueError(f"{name} must satisfy 0 <= {name} < n, got {name}={s}, n={n}")


def drift_mu(s: int, n: int) -> float:
    """Mean increment ``2 - 1/(1 - s/n)`` of the idealized walk at level s."""
    _check_level(s, n)
    return 2.0 - 1.0 / (1.0 - s / n)


def drift_terms(upto: int, n: int) -> np.ndarray:
    """``drift_mu(i, n)`` for i = 1..upto as an array."""
    i = np.arange(1, upto + 1, dtype=np.float64)
    return 2.0 - 1.0 / (1.0 - i / n)


def drift_sum_w(s: int, n: int) -> float:
    """Expected walk position: sum of ``drift_mu(i, n)`` for i = 1..s (correctly rounded)."""
    _check_level(s, n)
    return math.fsum(2.0 - 1.0 / (1.0 - i / n) for i in range(1, s + 1))


def w_integral_approx(s: int, n: int) -> float:
    _check_level(s, n)
    x = s / n
    return n * (2.0 * x + math.log1p(-x))


def variance_term(i: int, n: int) -> float:
    """Variance ``(i/n)/(1 - i/n)^2`` of the geometric step at level i."""
    if not (1 <= i < n):
        raise ValueError(f"i must satisfy 1 <= i < n, got i={i}, n={n}")
    x = i / n
    return x / (1.0 - x) ** 2


def fourth_root_ceil(n: int) -> int:
    """Smallest integer k with k**4 >= n."""
    k = max(1, math.isqrt(math.isqrt(n)))
    while k ** 4 < n:
        k += 1
    while k > 1 and (k - 1) ** 4 >= n:
        k -= 1
    return k


def floor_qn(n: int, q: float | None = None) -> int:
    return math.floor(_default_q(q) * n)


def b2_window(n: int, q: float | None = None) -> int:
    """Clamped half-width of the window around level floor(qn).

    The asymptotic width (ln n)^2 sqrt(n) is cut back so that every level used
    stays in [1, n-1], where the step law has p = (n-s)/n > 0.
    """
    qn = floor_qn(n, q)
    width = math.floor(math.log(n) ** 2 * math.sqrt(n))
    return max(0, min(width, n - 1 - qn, qn - 1))


@dataclass
class BoundCheckReport:
    lemma: str
    n: int
    checked_range: tuple[int, int]
    max_slack: float
    violations: list[tuple[int, float, float]] = field(default_factory=list)
    applicable: bool = True
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.applicable and not self.violations

    def to_dict(self) -> dict:
        out = {
            "lemma": self.lemma,
            "n": self.n,
            "checked_range": list(self.checked_range),
            "max_slack": self.max_slack,
            "violations": [[int(i), float(lhs), float(rhs)] for i, lhs, rhs in self.violations],
            "applicable": self.applicable,
        }
        if self.details:
            out["details"] = self.details
        return out


def _collect(lemma, n, index, lhs, rhs, strict=False, **details):
    """Build a report for the inequality ``lhs <= rhs`` (``lhs < rhs`` if strict)."""
    index = np.asarray(index)
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    margin = rhs - lhs
    bad = margin <= 0 if strict else margin < 0
    violations = [(int(i), float(a), float(b)) for i, a, b in zip(index[bad], lhs[bad], rhs[bad])]
    lo, hi = (int(index.min()), int(index.max())) if index.size else (0, -1)
    return BoundCheckReport(
        lemma=lemma,
        n=n,
        checked_range=(lo, hi),
        max_slack=float(margin.min()) if margin.size else math.inf,
        violations=violations,
        details=details,
    )


def check_lemma_ws(n: int) -> BoundCheckReport:
    """|w_s - n h(s/n)| <= 3 + 1/(1 - s/n) for every s in [1, n-1]."""
    if n < 2:
        raise ValueError("n must be at least 2")
    s = np.arange(1, n, dtype=np.int64)
    x = s / n
    w = np.cumsum(drift_terms(n - 1, n))
    approx = n * (2.0 * x + np.log1p(-x))
    return _collect("ws", n, s, np.abs(w - approx), 3.0 + 1.0 / (1.0 - x))


def check_lemma_var(n: int, q: float | None = None) -> BoundCheckReport:
    """Riemann-sum error of the variance integral up to level floor(qn).

    |sum_{i<=floor(qn)} (i/n)/(1-i/n)^2 - n * integral_0^q| <= q/(1-q)^2,
    one inequality per (n, q); ``q`` defaults to the model constant.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    q = _default_q(q)
    if not (0.0 < q < 1.0):
        raise ValueError("q must lie in (0, 1)")
    m = floor_qn(n, q)
    i = np.arange(1, m + 1, dtype=np.float64)
    x = i / n
    total = math.fsum(x / (1.0 - x) ** 2)
    lhs = abs(total - n * variance_integral(q))
    report = _collect("var", n, [m], [lhs], [q / (1.0 - q) ** 2], q=q)
    report.checked_range = (1, m)
    return report


def check_lemma_wbigger(n: int) -> BoundCheckReport:
    """w_s > ln(s) sqrt(s) on [ceil(n^{1/4}), floor(qn - (ln n)^2 sqrt(n))].

    The lemma only claims this for large n; when the interval is empty the
    report is marked not applicable rather than passed or failed.
    """
    lo = fourth_root_ceil(n)
    hi = math.floor(solve_q(1e-12) * n - math.log(n) ** 2 * math.sqrt(n)) if n > 1 else 0
    if not lo < hi:
        return BoundCheckReport("wbigger", n, (lo, hi), math.nan, applicable=False)
    w = np.cumsum(drift_terms(hi, n))[lo - 1:]
    s = np.arange(lo, hi + 1, dtype=np.int64)
    sf = s.astype(np.float64)
    return _collect("wbigger", n, s, np.log(sf) * np.sqrt(sf), w, strict=True)


def check_mu_sum(n: int) -> BoundCheckReport:
    """Drift sums next to level floor(qn) against i * mu_r, budget (ln n)^5.

    Both sides ``|sum_{j<=i} mu_{qn+j} - i mu_r|`` and
    ``|sum_{j<=i} mu_{qn-j} - i mu_r|`` are checked for i in [0, L] with L from
    :func:`b2_window`. Violations on the lower side carry index ``-i``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    c = model_constants()
    qn = floor_qn(n)
    width = b2_window(n)
    budget = math.log(n) ** 5
    i = np.arange(0, width + 1, dtype=np.int64)
    j = np.arange(1, width + 1, dtype=np.float64)
    upper = np.concatenate(([0.0], np.cumsum(2.0 - 1.0 / (1.0 - (qn + j) / n))))
    lower = np.concatenate(([0.0], np.cumsum(2.0 - 1.0 / (1.0 - (qn - j) / n))))
    upper_dev = np.abs(upper - i * c.mu_r)
    lower_dev = np.abs(lower - i * c.mu_r)
    rhs = np.full(i.size, budget)
    report = _collect(
        "musum",
        n,
        np.concatenate((i, -i[1:])),
        np.concatenate((upper_dev, lower_dev[1:])),
        np.concatenate((rhs, rhs[1:])),
        qn=qn,
        window=width,
        unclamped_window=math.floor(math.log(n) ** 2 * math.sqrt(n)),
    )
    report.checked_range = (0, width)
    return report


def kappa_objective(p):
    """``p^3 / (1.1 (1-p)(0.1+p))``; +inf at p = 1."""
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return p ** 3 / (1.1 * (1.0 - p) * (0.1 + p))


KAPPA_GRID = 10_001


def kappa(q: float | None = None, grid: int = KAPPA_GRID) -> float:
    """Minimum of :func:`kappa_objective` over p in [1-q, 1].

    Evaluated on ``grid`` evenly spaced points including both endpoints. The
    objective is checked to be strictly increasing there, so the minimum is
    the left endpoint value.
    """
    q = _default_q(q)
    if grid < 2:
        raise ValueError("grid needs at least two points")
    values = kappa_objective(np.linspace(1.0 - q, 1.0, grid))
    if not np.all(np.diff(values) > 0):
        raise ArithmeticError("kappa objective is not increasing on the grid")
    return float(values.min())


def mgf_upper(p, delta, kap):
    """E exp((X - 1/p - delta) kap delta) for X ~ Geometric(p) on {1, 2, ...}.

    Written as p e^{-kap delta^2} / (p + expm1(a) - (1-p) expm1(b)) with
    a = kap delta (1-p)/p and b = kap delta / p, equal to 1 at delta = 0.
    """
    t = kap * delta
    denom = p + np.expm1(t * (1.0 - p) / p) - (1.0 - p) * np.expm1(t / p)
    return p * np.exp(-t * delta) / denom


def mgf_lower(p, delta, kap):
    """E exp((-X + 1/p - delta) kap delta) = p e^{t/p - t delta} / (p + expm1(t))."""
    t = kap * delta
    return p * np.exp(t / p - t * delta) / (p + np.expm1(t))


def _condition_one(p, delta, kap):
    d = delta ** 2 * kap ** 2 * (1.0 - p) * (0.1 + p) / (2.0 * p ** 3)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.log1p(-d) >= -1.1 * d


def _condition_two(p, delta, kap):
    s = delta * kap / p
    return np.exp(s) <= 1.0 + s + 1.1 * s ** 2 / 2.0


def _largest_prefix(deltas, ok):
    """Largest delta whose grid prefix satisfies the condition at every p."""
    good = np.all(ok, axis=0)
    if not good[0]:
        return 0.0
    failing = np.flatnonzero(~good)
    return float(deltas[-1] if failing.size == 0 else deltas[failing[0] - 1])


def check_mgf_bound(grid_p: int = 64, grid_delta: int = 64, p_max: float = 0.999) -> BoundCheckReport:
    """Large-deviation bound for geometric steps on a (p, delta) grid.

    p runs over [1-q, p_max]. The admissible delta range [0, c] is found by
    scanning ``grid_delta`` points of (0, 1] for the two Taylor-type conditions
    (c = min(c1, c2)); then both E e^{(X-1/p-d)kd} and E e^{(-X+1/p-d)kd} are
    compared with e^{-kd^2/2} on the grid p x linspace(0, c, grid_delta).
    Flattened index = ip * grid_delta + id; lower-tail entries are offset by
    grid_p * grid_delta.
    """
    if grid_p < 16 or grid_delta < 16:
        raise ValueError("grids need at least 16 points each")
    c = model_constants()
    kap = c.kappa
    p = np.linspace(1.0 - c.q, p_max, grid_p)[:, None]
    scan = np.linspace(0.0, 1.0, grid_delta + 1)[1:]
    c1 = _largest_prefix(scan, _condition_one(p, scan[None, :], kap))
    c2 = _largest_prefix(scan, _condition_two(p, scan[None, :], kap))
    cmax = min(c1, c2)
    if cmax <= 0.0:
        raise ConfigurationError("no positive delta satisfies both conditions on the scan grid")
    delta = np.linspace(0.0, cmax, grid_delta)[None, :]
    if np.any(np.exp(kap * delta) * (1.0 - p) >= 1.0):
        raise ConfigurationError("geometric MGF series diverges at some grid point")
    rhs = np.broadcast_to(np.exp(-0.5 * delta ** 2 * kap), (grid_p, grid_delta))
    upper = mgf_upper(p, delta, kap)
    lower = mgf_lower(p, delta, kap)
    size = grid_p * grid_delta
    index = np.arange(2 * size)
    report = _collect(
        "mgf",
        0,
        index,
        np.concatenate((upper.ravel(), lower.ravel())),
        np.concatenate((rhs.ravel(), rhs.ravel())),
        c1=c1,
        c2=c2,
        c=cmax,
        kappa=kap,
        p_range=[float(p[0, 0]), float(p[-1, 0])],
    )
    report.n = grid_p * grid_delta
    return report
