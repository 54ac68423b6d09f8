"""Pure-Python annealing kernel, used when the compiled extension is absent.

Performs the same floating-point operations in the same order as
``_kernels.pyx`` and draws from the same splitmix64 stream, so both backends
return identical results for identical inputs.  It is roughly two orders of
magnitude slower.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_TWO_M53 = 1.0 / 9007199254740992.0


class SplitMix64:
    """splitmix64 generator yielding doubles in [0, 1) with 53-bit resolution."""

    def __init__(self, seed):
        self.state = seed & _MASK

    def uniform(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        z = z ^ (z >> 31)
        return (z >> 11) * _TWO_M53


def _plogp(p):
    if p > 0.0:
        return p * math.log(p)
    return 0.0


def _entropy(q, s, normalized):
    if normalized:
        return math.log(s) - q / s
    return -q


def _full_state(G, f_emp, p, r, pl):
    m = len(f_emp)
    for k in range(m):
        r[k] = -f_emp[k]
    q = 0.0
    s = 0.0
    for j, row in enumerate(G):
        pj = p[j]
        for k in range(m):
            r[k] += row[k] * pj
        pl[j] = _plogp(pj)
        q += pl[j]
        s += pj
    cond = 0.0
    for k in range(m):
        cond += r[k] * r[k]
    return cond, q, s


def anneal_kernel(G, f_emp, p0, k_h, normalized, t_initial, cooling,
                  steps_per_temp, t_min, step_size, adaptive, seed):
    G = [list(map(float, row)) for row in np.asarray(G, dtype=np.float64)]
    f_emp = [float(v) for v in f_emp]
    p = [float(v) for v in p0]
    n, m = len(p), len(f_emp)
    r = [0.0] * m
    pl = [0.0] * n
    rng = SplitMix64(int(seed))
    uniform = rng.uniform
    log, exp = math.log, math.exp

    cond, q, s = _full_state(G, f_emp, p, r, pl)
    h = _entropy(q, s, normalized)
    best = cond - k_h * h
    best_p = list(p)
    trace = []
    temp = t_initial
    step = step_size
    total_acc = 0

    while temp >= t_min:
        acc = 0
        for _ in range(steps_per_temp):
            j = int(uniform() * n)
            if j >= n:
                j = n - 1
            delta = step * (2.0 * uniform() - 1.0)
            old = p[j]
            new = old + delta
            if new < 0.0:
                new = -new
            delta = new - old
            row = G[j]
            dcond = 0.0
            for k in range(m):
                d = delta * row[k]
                dcond += d * (2.0 * r[k] + d)
            pl_new = new * log(new) if new > 0.0 else 0.0
            qn = q + pl_new - pl[j]
            sn = s + delta
            hn = (log(sn) - qn / sn) if normalized else -qn
            de = dcond - k_h * (hn - h)
            accept = de <= 0.0
            if not accept:
                accept = uniform() < exp(-de / temp)
            if accept:
                p[j] = new
                pl[j] = pl_new
                for k in range(m):
                    r[k] += delta * row[k]
                q = qn
                s = sn
                h = hn
                acc += 1
        cond, q, s = _full_state(G, f_emp, p, r, pl)
        h = _entropy(q, s, normalized)
        cur = cond - k_h * h
        trace.append(cur)
        if cur < best:
            best = cur
            best_p = list(p)
        total_acc += acc
        if adaptive:
            rate = acc / steps_per_temp
            if rate < 0.2:
                step = step * 0.5
            elif rate > 0.5:
                step = step * 2.0
                if step > step_size:
                    step = step_size
        temp = temp * cooling

    return np.array(best_p), np.array(trace, dtype=np.float64), best, total_acc
