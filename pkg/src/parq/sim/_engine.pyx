# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event loop, the hot twin of ``_engine_py``.

Consumes the same pre-drawn variate arrays in the same order and does
the same double-precision arithmetic as the pure-Python engine, so
runs are bit-identical across the two.  Compiled without fast-math for
exactly that reason.
"""

from libc.math cimport INFINITY, isfinite

import numpy as np

from ..errors import SimulationError


cdef inline void _heap_push(double[::1] ht, long long[::1] hs,
                            long long[::1] hk, Py_ssize_t size,
                            double t, long long s, long long k) noexcept:
    cdef Py_ssize_t i = size, p
    ht[i] = t
    hs[i] = s
    hk[i] = k
    while i > 0:
        p = (i - 1) >> 1
        if ht[p] < ht[i] or (ht[p] == ht[i] and hs[p] < hs[i]):
            break
        ht[p], ht[i] = ht[i], ht[p]
        hs[p], hs[i] = hs[i], hs[p]
        hk[p], hk[i] = hk[i], hk[p]
        i = p
cdef inline void _heap_pop(double[::1] ht, long long[::1] hs,
                           long long[::1] hk, Py_ssize_t size) noexcept:
    cdef Py_ssize_t i = 0, c
    ht[0] = ht[size - 1]
    hs[0] = hs[size - 1]
    hk[0] = hk[size - 1]
    size -= 1
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and (ht[c + 1] < ht[c]
                             or (ht[c + 1] == ht[c] and hs[c + 1] < hs[c])):
            c += 1
        if ht[i] < ht[c] or (ht[i] == ht[c] and hs[i] < hs[c]):
            break
        ht[c], ht[i] = ht[i], ht[c]
        hs[c], hs[i] = hs[i], hs[c]
        hk[c], hk[i] = hk[i], hk[c]
        i = c


def run(long long tandem, long long n_nodes, double[::1] arr_times,
        long long[::1] routes, long long[::1] visits, double[::1] services,
        long long[::1] svc_offsets, long long warmup):
    """Event loop with the same contract as ``_engine_py.run``."""
    cdef Py_ssize_t n = arr_times.shape[0]
    cdef Py_ssize_t K = n_nodes

    qhead_a = np.full(K, -1, dtype=np.int64)
    qtail_a = np.full(K, -1, dtype=np.int64)
    nxt_a = np.full(n, -1, dtype=np.int64)
    cur_a = np.full(K, -1, dtype=np.int64)
    since_a = np.zeros(K, dtype=np.float64)
    busy_a = np.zeros(K, dtype=np.float64)
    cursor_a = np.asarray(svc_offsets).copy()
    rem_a = np.asarray(visits).copy()
    arr_cnt_a = np.zeros(K, dtype=np.int64)
    comp_cnt_a = np.zeros(K, dtype=np.int64)
    res_a = np.empty(n, dtype=np.float64)
    snap_w_a = np.zeros(K, dtype=np.float64)
    snap_e_a = np.zeros(K, dtype=np.float64)
    heap_t_a = np.zeros(K + 1, dtype=np.float64)
    heap_s_a = np.zeros(K + 1, dtype=np.int64)
    heap_k_a = np.zeros(K + 1, dtype=np.int64)

    cdef long long[::1] qhead = qhead_a
    cdef long long[::1] qtail = qtail_a
    cdef long long[::1] nxt = nxt_a
    cdef long long[::1] cur = cur_a
    cdef double[::1] since = since_a
    cdef double[::1] busy = busy_a
    cdef long long[::1] cursor = cursor_a
    cdef long long[::1] rem = rem_a
    cdef long long[::1] arr_cnt = arr_cnt_a
    cdef long long[::1] comp_cnt = comp_cnt_a
    cdef double[::1] res = res_a
    cdef double[::1] snap_w = snap_w_a
    cdef double[::1] snap_e = snap_e_a
    cdef double[::1] ht = heap_t_a
    cdef long long[::1] hs = heap_s_a
    cdef long long[::1] hk = heap_k_a

    cdef Py_ssize_t heap_size = 0
    cdef long long seq = 0
    cdef Py_ssize_t a = 0
    cdef long long departed = 0
    cdef double t = 0.0, t_w = 0.0, t_e = 0.0, tc, ta, done, b
    cdef long long i, k, k0
    cdef Py_ssize_t j
    cdef bint drained

    while True:
        tc = ht[0] if heap_size > 0 else INFINITY
        ta = arr_times[a] if a < n else INFINITY
        if ta == INFINITY and tc == INFINITY:
            break
        if ta < tc:
            t = ta
            k0 = routes[a]
            # enqueue at tail of k0
            if qtail[k0] < 0:
                qhead[k0] = a
            else:
                nxt[qtail[k0]] = a
            qtail[k0] = a
            nxt[a] = -1
            arr_cnt[k0] += 1
            if cur[k0] < 0:
                i = qhead[k0]
                qhead[k0] = nxt[i]
                if qhead[k0] < 0:
                    qtail[k0] = -1
                cur[k0] = i
                since[k0] = t
                done = t + services[cursor[k0]]
                cursor[k0] += 1
                _heap_push(ht, hs, hk, heap_size, done, seq, k0)
                heap_size += 1
                seq += 1
            if a == n - 1:
                t_e = t
                for j in range(K):
                    b = busy[j]
                    if cur[j] >= 0:
                        b = b + (t - since[j])
                    snap_e[j] = b
            a += 1
        else:
            t = ht[0]
            k = hk[0]
            _heap_pop(ht, hs, hk, heap_size)
            heap_size -= 1
            i = cur[k]
            busy[k] += t - since[k]
            cur[k] = -1
            comp_cnt[k] += 1
            rem[i] -= 1
            if rem[i] > 0:
                if qtail[k] < 0:
                    qhead[k] = i
                else:
                    nxt[qtail[k]] = i
                qtail[k] = i
                nxt[i] = -1
                arr_cnt[k] += 1
            elif tandem and k + 1 < K:
                if qtail[k + 1] < 0:
                    qhead[k + 1] = i
                else:
                    nxt[qtail[k + 1]] = i
                qtail[k + 1] = i
                nxt[i] = -1
                arr_cnt[k + 1] += 1
                if cur[k + 1] < 0:
                    i = qhead[k + 1]
                    qhead[k + 1] = nxt[i]
                    if qhead[k + 1] < 0:
                        qtail[k + 1] = -1
                    cur[k + 1] = i
                    since[k + 1] = t
                    done = t + services[cursor[k + 1]]
                    cursor[k + 1] += 1
                    _heap_push(ht, hs, hk, heap_size, done, seq, k + 1)
                    heap_size += 1
                    seq += 1
            else:
                res[departed] = t - arr_times[i]
                departed += 1
                if departed == warmup:
                    t_w = t
                    for j in range(K):
                        b = busy[j]
                        if cur[j] >= 0:
                            b = b + (t - since[j])
                        snap_w[j] = b
            if cur[k] < 0 and qhead[k] >= 0:
                i = qhead[k]
                qhead[k] = nxt[i]
                if qhead[k] < 0:
                    qtail[k] = -1
                cur[k] = i
                since[k] = t
                done = t + services[cursor[k]]
                cursor[k] += 1
                _heap_push(ht, hs, hk, heap_size, done, seq, k)
                heap_size += 1
                seq += 1

    drained = departed == n and heap_size == 0
    if drained:
        for j in range(K):
            if qhead[j] >= 0:
                drained = False
                break
    if not drained:
        raise SimulationError("event loop finished with jobs still queued")
    if not isfinite(t):
        raise SimulationError("event clock overflowed")

    return (res_a, snap_w_a, snap_e_a, t_w, t_e, arr_cnt_a, comp_cnt_a)
