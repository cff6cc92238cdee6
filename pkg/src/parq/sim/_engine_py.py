"""Pure-Python event loop, the fallback twin of the compiled engine.

Both engines consume the same pre-drawn variate arrays in the same
order and perform the same double-precision arithmetic, so a run is
bit-identical regardless of which engine executes it.
"""

import heapq
import math

import numpy as np

from ..errors import SimulationError


def run(tandem, n_nodes, arr_times, routes, visits, services, svc_offsets,
        warmup):
    """Replay pre-drawn variates through a single-clock FIFO event loop.

    ``tandem`` selects the completion rule: 0 re-enqueues a job at its
    current node until its visit budget is spent (parallel arrays and
    feedback queues), 1 advances it to the next stage.  Node ``k``
    consumes ``services[svc_offsets[k]:]`` sequentially in service-start
    order.  Returns departure-ordered residence times, busy-time
    snapshots at the warmup boundary and at the last arrival, the two
    snapshot clocks, and per-node arrival/completion counts.
    """
    n = arr_times.shape[0]
    nodes = range(n_nodes)

    qhead = [-1] * n_nodes
    qtail = [-1] * n_nodes
    nxt = [-1] * n
    cur = [-1] * n_nodes
    since = [0.0] * n_nodes
    busy = [0.0] * n_nodes
    cursor = [int(svc_offsets[k]) for k in nodes]
    rem = [int(v) for v in visits]
    arr_cnt = [0] * n_nodes
    comp_cnt = [0] * n_nodes

    res = np.empty(n, dtype=np.float64)
    snap_w = np.zeros(n_nodes, dtype=np.float64)
    snap_e = np.zeros(n_nodes, dtype=np.float64)
    t_w = 0.0
    t_e = 0.0

    heap = []
    seq = 0
    a = 0
    departed = 0
    t = 0.0

    def enqueue(k, i):
        if qtail[k] < 0:
            qhead[k] = i
        else:
            nxt[qtail[k]] = i
        qtail[k] = i
        nxt[i] = -1
        arr_cnt[k] += 1

    def start(k, now):
        nonlocal seq
        i = qhead[k]
        qhead[k] = nxt[i]
        if qhead[k] < 0:
            qtail[k] = -1
        cur[k] = i
        since[k] = now
        done = now + float(services[cursor[k]])
        cursor[k] += 1
        heapq.heappush(heap, (done, seq, k))
        seq += 1

    def snapshot(out, now):
        for k in nodes:
            b = busy[k]
            if cur[k] >= 0:
                b = b + (now - since[k])
            out[k] = b

    while True:
        tc = heap[0][0] if heap else math.inf
        ta = float(arr_times[a]) if a < n else math.inf
        if ta == math.inf and tc == math.inf:
            break
        if ta < tc:
            t = ta
            k0 = int(routes[a])
            enqueue(k0, a)
            if cur[k0] < 0:
                start(k0, t)
            if a == n - 1:
                t_e = t
                snapshot(snap_e, t)
            a += 1
        else:
            t, _, k = heapq.heappop(heap)
            i = cur[k]
            busy[k] += t - since[k]
            cur[k] = -1
            comp_cnt[k] += 1
            rem[i] -= 1
            if rem[i] > 0:
                enqueue(k, i)
            elif tandem and k + 1 < n_nodes:
                enqueue(k + 1, i)
                if cur[k + 1] < 0:
                    start(k + 1, t)
            else:
                res[departed] = t - float(arr_times[i])
                departed += 1
                if departed == warmup:
                    t_w = t
                    snapshot(snap_w, t)
            if cur[k] < 0 and qhead[k] >= 0:
                start(k, t)

    if departed != n or heap or any(h >= 0 for h in qhead):
        raise SimulationError("event loop finished with jobs still queued")
    if not math.isfinite(t):
        raise SimulationError("event clock overflowed")

    arrivals = np.asarray(arr_cnt, dtype=np.int64)
    completions = np.asarray(comp_cnt, dtype=np.int64)
    return res, snap_w, snap_e, t_w, t_e, arrivals, completions
