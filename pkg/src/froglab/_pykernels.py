"""Pure-Python kernels, bit-identical to ``froglab._core``.

Selected automatically when the compiled extension is missing, or forced with
``FROGLAB_BACKEND=python``. Substream arithmetic is inlined for speed; see
``froglab.rng`` for its definition.
"""

import math

import numpy as np
from scipy.signal import lfilter

from .rng import GOLDEN, MASK64, stream_key

_TO_UNIT = 2.0 ** -52
_log1p = math.log1p
_ceil = math.ceil


def _uniforms(seed, replicate):
    state = stream_key(seed, replicate)
    while True:
        state = (state + GOLDEN) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        yield ((z >> 12) + 0.5) * _TO_UNIT


def sample_geometric(p, u):
    if p >= 1.0:
        return 1
    return int(_ceil(_log1p(-u) / _log1p(-p)))


def chain_batch(n, seed, rep0, count, b0_len):
    v_out = np.empty(count, dtype=np.int64)
    rho_out = np.empty(count, dtype=np.int64)
    b0_out = np.empty(count, dtype=np.uint8)
    for k in range(count):
        draws = _uniforms(seed, rep0 + k)
        active, dead, inactive, jumps, b0 = 1, 0, n - 1, 0, 1
        while active > 0:
            u = next(draws)
            jumps += 1
            if u < inactive / n:
                active += 1
                inactive -= 1
            else:
                active -= 1
                dead += 1
                if jumps <= b0_len:
                    b0 = 0
        v_out[k] = dead
        rho_out[k] = jumps
        b0_out[k] = b0
    return v_out, rho_out, b0_out


def level_batch(n, seed, rep0, count):
    v_out = np.empty(count, dtype=np.int64)
    rho_out = np.empty(count, dtype=np.int64)
    for k in range(count):
        draws = _uniforms(seed, rep0 + k)
        s, active, jumps = 1, 1, 0
        while True:
            if s >= n:
                jumps += active
                break
            p = (n - s) / n
            u = next(draws)
            g = 1 if p >= 1.0 else _ceil(_log1p(-u) / _log1p(-p))
            if g > active:
                jumps += active
                break
            jumps += g
            active += 2 - g
            s += 1
        v_out[k] = s
        rho_out[k] = jumps
    return v_out, rho_out


def ideal_batch(n, seed, rep0, count, qn, b1_lo, b2_len, mu_r, b2_slack):
    tau_out = np.empty(count, dtype=np.int64)
    wstar_out = np.empty(count, dtype=np.float64)
    b1_out = np.empty(count, dtype=np.uint8)
    b2_out = np.empty(count, dtype=np.uint8)
    path = [0] * (qn + 1)
    horizon = qn + b2_len
    for k in range(count):
        draws = _uniforms(seed, rep0 + k)
        walk, drift, tau, w_qn, wstar, b1, b2, s = 0, 0.0, 0, 0, 0.0, 1, 1, 0
        while True:
            s += 1
            if s >= n:
                if tau == 0:
                    tau = n
                break
            p = (n - s) / n
            x = sample_geometric(p, next(draws))
            walk += 2 - x
            drift += 2.0 - 1.0 / (1.0 - s / n)
            if s <= qn:
                path[s] = walk
                if s >= b1_lo and abs(walk - drift) > math.log(s) * math.sqrt(s):
                    b1 = 0
                if s == qn:
                    w_qn = walk
                    wstar = walk - drift
            elif s <= horizon:
                if abs((walk - w_qn) - (s - qn) * mu_r) > b2_slack:
                    b2 = 0
            if tau == 0 and walk <= 0:
                tau = s
            if tau != 0 and s >= horizon:
                break
        for i in range(1, b2_len + 1):
            if abs((path[qn - 1] - path[qn - 1 - i]) - i * mu_r) > b2_slack:
                b2 = 0
                break
        tau_out[k] = tau
        wstar_out[k] = wstar
        b1_out[k] = b1
        b2_out[k] = b2
    return tau_out, wstar_out, b1_out, b2_out


def sweep_columns(n):
    """Yield ``(v, absorbed_at_v, in_flight_after_v)`` for v = 1..n.

    Column v holds the mass that enters level v at each active count a; within
    the column, mass at a drains to a-1 with probability v/n, so the total
    mass ever sitting at (v, a) solves ``x_a = inflow_a + (v/n) x_{a+1}``,
    a first-order recurrence run from the top of the column downward.
    """
    inflow = np.zeros(n + 2)
    inflow[1] = 1.0
    for v in range(1, n + 1):
        die = v / n
        hit = (n - v) / n
        # x[a] for a = v..1, computed as a linear filter over the reversed column
        x = lfilter([1.0], [1.0, -die], inflow[v:0:-1])[::-1]
        absorbed = x[0] * die
        nxt = np.zeros(n + 2)
        nxt[2:v + 2] = x * hit
        inflow = nxt
        yield v, absorbed, float(inflow.sum())


def exact_pmf(n):
    pmf = np.zeros(n + 1)
    for v, absorbed, _ in sweep_columns(n):
        pmf[v] = absorbed
    return pmf
