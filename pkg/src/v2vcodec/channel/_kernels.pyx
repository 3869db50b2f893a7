# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trellis and Tanner-graph kernels.

Same signatures and results as ``_kernels_py``; see that module for the
algorithm notes.  LLR convention: positive means bit 0.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport tanh, atanh, fabs, INFINITY

cnp.import_array()

DEF MAX_STATES = 64
cdef double NEG_INF = -1e300
cdef double LLR_CLIP = 30.0


def viterbi(llr, next_state, outbits):
    cdef const double[::1] L = np.ascontiguousarray(llr, dtype=np.float64)
    cdef const int[:, ::1] ns = np.ascontiguousarray(next_state, dtype=np.int32)
    cdef const unsigned char[:, :, ::1] ob = np.ascontiguousarray(outbits, dtype=np.uint8)
    cdef int n_states = ob.shape[0]
    cdef int n_out = ob.shape[2]
    cdef Py_ssize_t steps = L.shape[0] // n_out
    if n_states > MAX_STATES:
        raise ValueError("too many states")

    cdef int src[MAX_STATES][2]
    cdef int inp[MAX_STATES][2]
    cdef int fill[MAX_STATES]
    cdef double metric[MAX_STATES]
    cdef double nxt[MAX_STATES]
    cdef int s, u, t2, k, j, state
    cdef Py_ssize_t t
    cdef double c0, c1, bm

    for s in range(n_states):
        fill[s] = 0
    for s in range(n_states):
        for u in range(2):
            t2 = ns[s, u]
            src[t2][fill[t2]] = s
            inp[t2][fill[t2]] = u
            fill[t2] += 1

    for s in range(n_states):
        metric[s] = INFINITY
    metric[0] = 0.0

    choice_arr = np.empty((steps, n_states), dtype=np.int8)
    cdef signed char[:, ::1] choice = choice_arr
    for t in range(steps):
        for s in range(n_states):
            bm = 0.0
            for j in range(n_out):
                if ob[src[s][0], inp[s][0], j]:
                    bm += L[t * n_out + j]
            c0 = metric[src[s][0]] + bm
            bm = 0.0
            for j in range(n_out):
                if ob[src[s][1], inp[s][1], j]:
                    bm += L[t * n_out + j]
            c1 = metric[src[s][1]] + bm
            if c1 < c0:
                choice[t, s] = 1
                nxt[s] = c1
            else:
                choice[t, s] = 0
                nxt[s] = c0
        for s in range(n_states):
            metric[s] = nxt[s]

    out_arr = np.empty(steps, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    state = 0
    for t in range(steps - 1, -1, -1):
        k = choice[t, state]
        out[t] = inp[state][k]
        state = src[state][k]
    return out_arr


def max_log_map(sys_llr, par_llr, apriori, next_state, parity, bint terminated):
    cdef const double[::1] Ls = np.ascontiguousarray(sys_llr, dtype=np.float64)
    cdef const double[::1] Lp = np.ascontiguousarray(par_llr, dtype=np.float64)
    cdef const double[::1] La = np.ascontiguousarray(apriori, dtype=np.float64)
    cdef const int[:, ::1] ns = np.ascontiguousarray(next_state, dtype=np.int32)
    cdef const unsigned char[:, ::1] par = np.ascontiguousarray(parity, dtype=np.uint8)
    cdef int n_states = ns.shape[0]
    cdef Py_ssize_t steps = Ls.shape[0]
    cdef Py_ssize_t t
    cdef int s, u, d
    cdef double g, v, mx, m0, m1, a, b
    cdef double gam[MAX_STATES][2]
    if n_states > MAX_STATES:
        raise ValueError("too many states")

    alpha_arr = np.full((steps + 1, n_states), NEG_INF)
    beta_arr = np.full((steps + 1, n_states), NEG_INF)
    cdef double[:, ::1] alpha = alpha_arr
    cdef double[:, ::1] beta = beta_arr
    out_arr = np.empty(steps)
    cdef double[::1] out = out_arr

    alpha[0, 0] = 0.0
    for t in range(steps):
        for s in range(n_states):
            for u in range(2):
                gam[s][u] = 0.5 * ((Ls[t] + La[t]) * (1.0 - 2.0 * u) + Lp[t] * (1.0 - 2.0 * par[s, u]))
        for s in range(n_states):
            a = alpha[t, s]
            for u in range(2):
                d = ns[s, u]
                v = a + gam[s][u]
                if v > alpha[t + 1, d]:
                    alpha[t + 1, d] = v
        mx = NEG_INF
        for s in range(n_states):
            if alpha[t + 1, s] > mx:
                mx = alpha[t + 1, s]
        for s in range(n_states):
            alpha[t + 1, s] -= mx

    if terminated:
        beta[steps, 0] = 0.0
    else:
        for s in range(n_states):
            beta[steps, s] = 0.0
    for t in range(steps - 1, -1, -1):
        mx = NEG_INF
        for s in range(n_states):
            m0 = 0.5 * ((Ls[t] + La[t]) + Lp[t] * (1.0 - 2.0 * par[s, 0])) + beta[t + 1, ns[s, 0]]
            m1 = 0.5 * (-(Ls[t] + La[t]) + Lp[t] * (1.0 - 2.0 * par[s, 1])) + beta[t + 1, ns[s, 1]]
            b = m0 if m0 >= m1 else m1
            beta[t, s] = b
            if b > mx:
                mx = b
        for s in range(n_states):
            beta[t, s] -= mx

    for t in range(steps):
        m0 = NEG_INF
        m1 = NEG_INF
        for s in range(n_states):
            a = alpha[t, s]
            v = a + 0.5 * ((Ls[t] + La[t]) + Lp[t] * (1.0 - 2.0 * par[s, 0])) + beta[t + 1, ns[s, 0]]
            if v > m0:
                m0 = v
            v = a + 0.5 * (-(Ls[t] + La[t]) + Lp[t] * (1.0 - 2.0 * par[s, 1])) + beta[t + 1, ns[s, 1]]
            if v > m1:
                m1 = v
        out[t] = m0 - m1
    return out_arr


cdef inline double _clip(double x, double lim) nogil:
    if x > lim:
        return lim
    if x < -lim:
        return -lim
    return x


def sum_product(llr, row_ptr, col_idx, int max_iters):
    cdef const double[::1] L0 = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    cdef const int[::1] rp = np.ascontiguousarray(row_ptr, dtype=np.int32)
    cdef const int[::1] ci = np.ascontiguousarray(col_idx, dtype=np.int32)
    cdef Py_ssize_t n = L0.shape[0]
    cdef int n_checks = rp.shape[0] - 1
    cdef int n_edges = ci.shape[0]
    cdef int r, e, e2, it
    cdef Py_ssize_t v
    cdef double prod, tv, ratio
    cdef bint ok
    cdef unsigned char acc

    hard_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] hard = hard_arr
    v2c_arr = np.empty(n_edges)
    c2v_arr = np.empty(n_edges)
    t_arr = np.empty(n_edges)
    post_arr = np.empty(n)
    cdef double[::1] v2c = v2c_arr
    cdef double[::1] c2v = c2v_arr
    cdef double[::1] tt = t_arr
    cdef double[::1] post = post_arr

    for v in range(n):
        hard[v] = 1 if L0[v] < 0 else 0
    ok = True
    for r in range(n_checks):
        acc = 0
        for e in range(rp[r], rp[r + 1]):
            acc ^= hard[ci[e]]
        if acc:
            ok = False
            break
    if ok:
        return hard_arr, True, 0

    for e in range(n_edges):
        v2c[e] = L0[ci[e]]

    for it in range(1, max_iters + 1):
        for e in range(n_edges):
            tv = tanh(_clip(v2c[e], LLR_CLIP) / 2.0)
            if fabs(tv) < 1e-300:
                tv = 1e-300
            tt[e] = tv
        for r in range(n_checks):
            prod = 1.0
            for e in range(rp[r], rp[r + 1]):
                prod *= tt[e]
            for e in range(rp[r], rp[r + 1]):
                ratio = _clip(prod / tt[e], 1.0 - 1e-15)
                c2v[e] = 2.0 * atanh(ratio)
        for v in range(n):
            post[v] = L0[v]
        for e in range(n_edges):
            post[ci[e]] += c2v[e]
        for e in range(n_edges):
            v2c[e] = post[ci[e]] - c2v[e]
        for v in range(n):
            hard[v] = 1 if post[v] < 0 else 0
        ok = True
        for r in range(n_checks):
            acc = 0
            for e in range(rp[r], rp[r + 1]):
                acc ^= hard[ci[e]]
            if acc:
                ok = False
                break
        if ok:
            return hard_arr, True, it
    return hard_arr, False, max_iters
