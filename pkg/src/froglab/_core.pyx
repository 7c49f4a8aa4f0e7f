# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the frog-model samplers and the exact-law sweep.

Signatures and draw order mirror ``froglab._pykernels`` exactly; see
``froglab.rng`` for the substream definition. All loops run without the GIL.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, fabs, log, log1p, sqrt
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t REPLICATE_SALT = 0xD1B54A32D192ED03ULL
cdef double TO_UNIT = 2.220446049250313e-16  # 2**-52


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t stream_key(uint64_t seed, uint64_t replicate) noexcept nogil:
    return mix64(seed ^ mix64(replicate + REPLICATE_SALT))


cdef inline double next_uniform(uint64_t* state) noexcept nogil:
    state[0] += GOLDEN
    return (<double>(mix64(state[0]) >> 12) + 0.5) * TO_UNIT


cdef inline double geometric(double p, double u) noexcept nogil:
    # support {1, 2, ...}; returned as a double so huge draws cannot overflow
    if p >= 1.0:
        return 1.0
    return ceil(log1p(-u) / log1p(-p))


def sample_geometric(double p, double u):
    return int(geometric(p, u))


def chain_batch(int64_t n, uint64_t seed, uint64_t rep0, int64_t count, int64_t b0_len):
    cdef cnp.ndarray[int64_t, ndim=1] v_out = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] rho_out = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[uint8_t, ndim=1] b0_out = np.empty(count, dtype=np.uint8)
    cdef int64_t[::1] v_view = v_out
    cdef int64_t[::1] rho_view = rho_out
    cdef uint8_t[::1] b0_view = b0_out
    cdef int64_t k, active, dead, inactive, jumps
    cdef uint8_t b0
    cdef uint64_t state
    cdef double u
    with nogil:
        for k in range(count):
            state = stream_key(seed, rep0 + <uint64_t>k)
            active = 1
            dead = 0
            inactive = n - 1
            jumps = 0
            b0 = 1
            while active > 0:
                u = next_uniform(&state)
                jumps += 1
                if u < <double>inactive / <double>n:
                    active += 1
                    inactive -= 1
                else:
                    active -= 1
                    dead += 1
                    if jumps <= b0_len:
                        b0 = 0
            v_view[k] = dead
            rho_view[k] = jumps
            b0_view[k] = b0
    return v_out, rho_out, b0_out


def level_batch(int64_t n, uint64_t seed, uint64_t rep0, int64_t count):
    cdef cnp.ndarray[int64_t, ndim=1] v_out = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] rho_out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] v_view = v_out
    cdef int64_t[::1] rho_view = rho_out
    cdef int64_t k, s, active, jumps
    cdef uint64_t state
    cdef double p, g
    with nogil:
        for k in range(count):
            state = stream_key(seed, rep0 + <uint64_t>k)
            s = 1
            active = 1
            jumps = 0
            while True:
                if s >= n:
                    # p = 0: every remaining jump dies
                    jumps += active
                    break
                p = <double>(n - s) / <double>n
                g = geometric(p, next_uniform(&state))
                if g > <double>active:
                    jumps += active
                    break
                jumps += <int64_t>g
                active += 2 - <int64_t>g
                s += 1
            v_view[k] = s
            rho_view[k] = jumps
    return v_out, rho_out


def ideal_batch(int64_t n, uint64_t seed, uint64_t rep0, int64_t count,
                int64_t qn, int64_t b1_lo, int64_t b2_len,
                double mu_r, double b2_slack):
    cdef cnp.ndarray[int64_t, ndim=1] tau_out = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] wstar_out = np.empty(count, dtype=np.float64)
    cdef cnp.ndarray[uint8_t, ndim=1] b1_out = np.empty(count, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] b2_out = np.empty(count, dtype=np.uint8)
    cdef cnp.ndarray[int64_t, ndim=1] path = np.zeros(qn + 1, dtype=np.int64)
    cdef int64_t[::1] tau_view = tau_out
    cdef double[::1] wstar_view = wstar_out
    cdef uint8_t[::1] b1_view = b1_out
    cdef uint8_t[::1] b2_view = b2_out
    cdef int64_t[::1] w_path = path
    cdef int64_t k, s, i, tau, walk, w_qn, x, horizon = qn + b2_len
    cdef uint8_t b1, b2
    cdef uint64_t state
    cdef double drift, p, dev, wstar
    with nogil:
        for k in range(count):
            state = stream_key(seed, rep0 + <uint64_t>k)
            walk = 0
            drift = 0.0
            tau = 0
            w_qn = 0
            wstar = 0.0
            b1 = 1
            b2 = 1
            s = 0
            while True:
                s += 1
                if s >= n:
                    # p = 0 sentinel: X = +inf, the walk drops below zero
                    if tau == 0:
                        tau = n
                    break
                p = <double>(n - s) / <double>n
                x = <int64_t>geometric(p, next_uniform(&state))
                walk += 2 - x
                drift += 2.0 - 1.0 / (1.0 - <double>s / <double>n)
                if s <= qn:
                    w_path[s] = walk
                    if s >= b1_lo and fabs(<double>walk - drift) > log(<double>s) * sqrt(<double>s):
                        b1 = 0
                    if s == qn:
                        w_qn = walk
                        wstar = <double>walk - drift
                elif s <= horizon:
                    dev = <double>(walk - w_qn) - <double>(s - qn) * mu_r
                    if fabs(dev) > b2_slack:
                        b2 = 0
                if tau == 0 and walk <= 0:
                    tau = s
                if tau != 0 and s >= horizon:
                    break
            for i in range(1, b2_len + 1):
                dev = <double>(w_path[qn - 1] - w_path[qn - 1 - i]) - <double>i * mu_r
                if fabs(dev) > b2_slack:
                    b2 = 0
                    break
            tau_view[k] = tau
            wstar_view[k] = wstar
            b1_view[k] = b1
            b2_view[k] = b2
    return tau_out, wstar_out, b1_out, b2_out


def exact_pmf(int64_t n):
    """Law of the number of visited vertices; ``pmf[v]`` for v in 1..n, pmf[0] = 0."""
    cdef cnp.ndarray[double, ndim=1] pmf_arr = np.zeros(n + 1, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] col_a = np.zeros(n + 3, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] col_b = np.zeros(n + 3, dtype=np.float64)
    cdef double[::1] pmf = pmf_arr
    cdef double[::1] cur = col_a
    cdef double[::1] nxt = col_b
    cdef double[::1] tmp
    cdef int64_t v, a
    cdef double die, hit, mass
    cur[1] = 1.0
    with nogil:
        for v in range(1, n + 1):
            die = <double>v / <double>n
            hit = <double>(n - v) / <double>n
            for a in range(v, 0, -1):
                mass = cur[a]
                if a > 1:
                    cur[a - 1] += mass * die
                else:
                    pmf[v] = mass * die
                nxt[a + 1] = mass * hit
                cur[a] = 0.0
            tmp = cur
            cur = nxt
            nxt = tmp
    return pmf_arr
