"""Samplers of the frog-model epidemic on the complete graph K_n.

Three views of the same dynamics:

* ``chain``: the exact per-jump chain on (active, dead, inactive) counts;
* ``level``: jumps grouped by the number s of visited vertices; the jumps
  spent at level s form a geometric variable with success (n-s)/n, truncated
  by the current number of active particles;
* ``ideal``: the untruncated independent walk W_s = sum_{i<=s} (2 - X_i)
  with X_i ~ Geometric((n-i)/n), its zero tau, and the events B1/B2 that
  control how far tau can stray from its linear prediction.

Chain and level outcomes have the same law. With a shared substream the
level outcome and the ideal zero coincide: v_inf == tau.

Batches split replicates into chunks run on a thread pool; the compiled
kernels release the GIL. Results are always returned in replicate order.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

import numpy as np

from . import analysis
from ._backend import kernels as _default_kernels
from .rng import RngStream

MODES = ("chain", "level", "ideal")
CHUNK = 256


@dataclass(frozen=True)
class ChainState:
    active: int
    dead: int
    inactive: int
    jumps: int
    n: int

    @classmethod
    def initial(cls, n: int) -> "ChainState":
        if n < 1:
            raise ValueError("n must be positive")
        return cls(active=1, dead=0, inactive=n - 1, jumps=0, n=n)

    @property
    def visited(self) -> int:
        return self.active + self.dead


@dataclass(frozen=True)
class RunOutcome:
    v_inf: int
    rho: int
    b0: bool | None
    mode: str
    replicate: int


@dataclass(frozen=True)
class IdealOutcome:
    tau: int
    w_star_qn: float
    b1: bool
    b2: bool
    tau_predicted: float
    replicate: int


def chain_step(state: ChainState, u: float) -> ChainState:
    """One jump: a fresh vertex is hit with probability inactive/n."""
    if state.active < 1:
        raise RuntimeError("chain is absorbed: no active particle left to jump")
    if u < state.inactive / state.n:
        return replace(state, active=state.active + 1, inactive=state.inactive - 1, jumps=state.jumps + 1)
    return replace(state, active=state.active - 1, dead=state.dead + 1, jumps=state.jumps + 1)


def sample_geometric(p: float, u: float) -> int:
    """Inversion draw ``ceil(ln(1-u)/ln(1-p))`` on {1, 2, ...}."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if not (0.0 < u < 1.0):
        raise ValueError(f"u must lie in (0, 1), got {u!r}")
    return int(_default_kernels.sample_geometric(p, u))


def b0_length(n: int) -> int:
    return analysis.fourth_root_ceil(n)


def _threads(threads):
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ValueError("threads must be positive")
    return threads


def _chunked(kernel, count, threads, chunk, *args):
    """Run ``kernel(rep0, k, *args)`` over replicate chunks and concatenate in order."""
    if count < 1:
        raise ValueError("need at least one replicate")
    starts = list(range(0, count, chunk))
    sizes = [min(chunk, count - s) for s in starts]
    workers = min(_threads(threads), len(starts)) if starts else 1
    if workers <= 1:
        parts = [kernel(s, k, *args) for s, k in zip(starts, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda sk: kernel(sk[0], sk[1], *args), zip(starts, sizes)))
    return tuple(np.concatenate(cols) for cols in zip(*parts))


@dataclass(frozen=True)
class IdealParams:
    """Level indices and thresholds shared by all ideal-mode replicates at one n."""

    n: int
    q: float
    mu_r: float
    qn: int
    b1_lo: int
    b2_len: int
    b2_slack: float
    tau_bound: float

    @classmethod
    def build(cls, n: int, constants: analysis.ModelConstants) -> "IdealParams":
        if n < 16:
            raise ValueError("ideal mode needs n >= 16")
        log_n = math.log(n)
        slack = log_n ** 3 * n ** 0.25
        return cls(
            n=n,
            q=constants.q,
            mu_r=constants.mu_r,
            qn=analysis.floor_qn(n, constants.q),
            b1_lo=b0_length(n),
            b2_len=analysis.b2_window(n, constants.q),
            b2_slack=slack,
            tau_bound=2.0 * slack,
        )

    def predict(self, w_star_qn):
        return self.q * self.n - w_star_qn / self.mu_r


def chain_batch(n, seed, replicates, track_b0=True, start=0, threads=None, kernels=None):
    """Arrays ``(v_inf, rho, b0)`` for replicates start..start+replicates-1."""
    kern = kernels or _default_kernels
    b0_len = b0_length(n) if track_b0 else 0
    out = _chunked(lambda r0, k: kern.chain_batch(n, seed, start + r0, k, b0_len), replicates, threads, CHUNK)
    v, rho, b0 = out
    return v, rho, b0.astype(bool)


def level_batch(n, seed, replicates, start=0, threads=None, kernels=None):
    """Arrays ``(v_inf, rho)`` for replicates start..start+replicates-1."""
    kern = kernels or _default_kernels
    if n < 1:
        raise ValueError("n must be positive")
    return _chunked(lambda r0, k: kern.level_batch(n, seed, start + r0, k), replicates, threads, CHUNK)


def ideal_batch(n, seed, replicates, constants=None, start=0, threads=None, kernels=None):
    """Arrays ``(tau, w_star_qn, b1, b2, tau_predicted)``."""
    kern = kernels or _default_kernels
    par = IdealParams.build(n, constants or analysis.model_constants())
    tau, wstar, b1, b2 = _chunked(
        lambda r0, k: kern.ideal_batch(
            n, seed, start + r0, k, par.qn, par.b1_lo, par.b2_len, par.mu_r, par.b2_slack
        ),
        replicates,
        threads,
        # ideal replicates are long; small chunks keep threads balanced
        16,
    )
    return tau, wstar, b1.astype(bool), b2.astype(bool), par.predict(wstar)


def run_chain(n: int, stream: RngStream, track_b0: bool = True, kernels=None) -> RunOutcome:
    if n < 1:
        raise ValueError("n must be positive")
    v, rho, b0 = chain_batch(n, stream.seed, 1, track_b0, start=stream.replicate, threads=1, kernels=kernels)
    return RunOutcome(int(v[0]), int(rho[0]), bool(b0[0]) if track_b0 else None, "chain", stream.replicate)


def run_level(n: int, stream: RngStream, kernels=None) -> RunOutcome:
    v, rho = level_batch(n, stream.seed, 1, start=stream.replicate, threads=1, kernels=kernels)
    return RunOutcome(int(v[0]), int(rho[0]), None, "level", stream.replicate)


def run_ideal(n: int, stream: RngStream, constants: analysis.ModelConstants | None = None,
              kernels=None) -> IdealOutcome:
    tau, wstar, b1, b2, pred = ideal_batch(
        n, stream.seed, 1, constants, start=stream.replicate, threads=1, kernels=kernels
    )
    return IdealOutcome(int(tau[0]), float(wstar[0]), bool(b1[0]), bool(b2[0]), float(pred[0]), stream.replicate)


def run_chain_stepwise(n: int, stream: RngStream, track_b0: bool = True) -> RunOutcome:
    """Reference path: :func:`chain_step` driven directly by the substream."""
    state = ChainState.initial(n)
    b0_len = b0_length(n) if track_b0 else 0
    b0 = True
    draws = stream.uniforms()
    while state.active > 0:
        nxt = chain_step(state, next(draws))
        if nxt.dead > state.dead and nxt.jumps <= b0_len:
            b0 = False
        state = nxt
    return RunOutcome(state.dead, state.jumps, b0 if track_b0 else None, "chain", stream.replicate)


CSV_HEADERS = {
    "chain": ("replicate", "n", "v_inf", "rho", "b0"),
    "level": ("replicate", "n", "v_inf", "rho", "b0"),
    "ideal": ("replicate", "n", "tau", "w_star_qn", "tau_predicted", "b1", "b2"),
}


def iter_rows(mode: str, n: int, seed: int, replicates: int, threads=None,
              block: int = 4096, constants=None) -> Iterator[tuple]:
    """Per-replicate rows in replicate order, generated block by block.

    Level mode has no B0 flag; its ``b0`` column is left empty.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    for start in range(0, replicates, block):
        k = min(block, replicates - start)
        reps = range(start, start + k)
        if mode == "chain":
            v, rho, b0 = chain_batch(n, seed, k, True, start=start, threads=threads)
            yield from zip(reps, [n] * k, v.tolist(), rho.tolist(), b0.astype(int).tolist())
        elif mode == "level":
            v, rho = level_batch(n, seed, k, start=start, threads=threads)
            yield from zip(reps, [n] * k, v.tolist(), rho.tolist(), [""] * k)
        else:
            tau, wstar, b1, b2, pred = ideal_batch(n, seed, k, constants, start=start, threads=threads)
            yield from zip(reps, [n] * k, tau.tolist(), wstar.tolist(), pred.tolist(),
                           b1.astype(int).tolist(), b2.astype(int).tolist())


def write_csv(stream, mode: str, rows: Iterable[tuple]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADERS[mode])
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
