# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulated-annealing kernel.

Mirrors ``_kernels_py`` operation for operation; any change here must be
made there too (tests compare both backends bit-for-bit).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log
from libc.stdint cimport uint64_t

cnp.import_array()

cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline double _uniform(uint64_t* state) noexcept nogil:
    # splitmix64
    cdef uint64_t z
    state[0] += <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return <double>(z >> 11) * TWO_M53


cdef inline double _plogp(double p) noexcept nogil:
    if p > 0.0:
        return p * log(p)
    return 0.0


cdef double _full_state(const double[:, ::1] G, const double[::1] f_emp,
                        double[::1] p, double[::1] r, double[::1] pl,
                        double* q_out, double* s_out) noexcept nogil:
    cdef Py_ssize_t n = G.shape[0], m = G.shape[1], j, k
    cdef double q = 0.0, s = 0.0, cond = 0.0
    for k in range(m):
        r[k] = -f_emp[k]
    for j in range(n):
        for k in range(m):
            r[k] += G[j, k] * p[j]
        pl[j] = _plogp(p[j])
        q += pl[j]
        s += p[j]
    for k in range(m):
        cond += r[k] * r[k]
    q_out[0] = q
    s_out[0] = s
    return cond


cdef inline double _entropy(double q, double s, bint normalized) noexcept nogil:
    if normalized:
        return log(s) - q / s
    return -q


def anneal_kernel(const double[:, ::1] G, const double[::1] f_emp,
                  const double[::1] p0, double k_h, bint normalized,
                  double t_initial, double cooling, Py_ssize_t steps_per_temp,
                  double t_min, double step_size, bint adaptive,
                  unsigned long long seed):
    """Minimise the relaxed cost over nonnegative weights.

    ``G`` is the condition matrix transposed and divided by ``n_points``
    (shape ``(n_points, n_conditions)``).  Returns the best weights seen at a
    temperature-level boundary, the per-level cost trace, the best cost and
    the number of accepted moves.
    """
    cdef Py_ssize_t n = G.shape[0], m = G.shape[1], j, k, it
    cdef uint64_t state = <uint64_t>seed
    cdef double[::1] p = np.array(p0, dtype=np.float64)
    cdef double[::1] r = np.empty(m, dtype=np.float64)
    cdef double[::1] pl = np.empty(n, dtype=np.float64)
    cdef double q, s, h, cond, cur, best
    cdef double old, new, delta, d, dcond, pl_new, qn, sn, hn, de
    cdef double temp = t_initial, step = step_size, rate
    cdef long long acc, total_acc = 0
    cdef bint accept

    cond = _full_state(G, f_emp, p, r, pl, &q, &s)
    h = _entropy(q, s, normalized)
    cur = cond - k_h * h
    best = cur
    best_p = np.array(p, dtype=np.float64)
    trace = []

    while temp >= t_min:
        acc = 0
        with nogil:
            for it in range(steps_per_temp):
                j = <Py_ssize_t>(_uniform(&state) * n)
                if j >= n:
                    j = n - 1
                delta = step * (2.0 * _uniform(&state) - 1.0)
                old = p[j]
                new = old + delta
                if new < 0.0:
                    new = -new
                delta = new - old
                dcond = 0.0
                for k in range(m):
                    d = delta * G[j, k]
                    dcond += d * (2.0 * r[k] + d)
                pl_new = _plogp(new)
                qn = q + pl_new - pl[j]
                sn = s + delta
                hn = _entropy(qn, sn, normalized)
                de = dcond - k_h * (hn - h)
                accept = de <= 0.0
                if not accept:
                    accept = _uniform(&state) < exp(-de / temp)
                if accept:
                    p[j] = new
                    pl[j] = pl_new
                    for k in range(m):
                        r[k] += delta * G[j, k]
                    q = qn
                    s = sn
                    h = hn
                    acc += 1
            # resynchronise the running sums to avoid drift
            cond = _full_state(G, f_emp, p, r, pl, &q, &s)
        h = _entropy(q, s, normalized)
        cur = cond - k_h * h
        trace.append(cur)
        if cur < best:
            best = cur
            best_p = np.array(p, dtype=np.float64)
        total_acc += acc
        if adaptive:
            rate = <double>acc / <double>steps_per_temp
            if rate < 0.2:
                step = step * 0.5
            elif rate > 0.5:
                step = step * 2.0
                if step > step_size:
                    step = step_size
        temp = temp * cooling

    return best_p, np.array(trace, dtype=np.float64), best, total_acc
