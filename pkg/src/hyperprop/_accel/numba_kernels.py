"""Compiled kernels.

Every function here has a twin with the same signature and the same output in
``numpy_kernels``.  State arrays are one-element ``uint64`` arrays advanced in
place; see ``hyperprop.rng`` for the generator.
"""
import math

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_INV_2_53 = 1.0 / 9007199254740992.0

BINOMIAL_INVERSION_MAX_MEAN = 30.0


# --------------------------------------------------------------------- random


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def _next_u64(state):
    s = state[0] + _GOLDEN
    state[0] = s
    return _mix64(s)


@njit(cache=True)
def _next_double(state):
    return (np.float64(_next_u64(state) >> _S11) + 0.5) * _INV_2_53


@njit(cache=True)
def _uniform_index(state, n):
    i = np.int64(_next_double(state) * n)
    if i >= n:
        i = n - 1
    return i


@njit(cache=True)
def _child_seed(seed, i):
    return _mix64(_mix64(seed) ^ _mix64(np.uint64(i) + _GOLDEN))


@njit(cache=True)
def doubles(state, count):
    out = np.empty(count, np.float64)
    for k in range(count):
        out[k] = _next_double(state)
    return out


# ------------------------------------------------------------------- sampling


@njit(cache=True)
def sample_indices(seed, total, p):
    """Indices in ``[0, total)`` kept by independent Bernoulli(p) trials."""
    if p <= 0.0 or total <= 0:
        return np.empty(0, np.int64)
    if p >= 1.0:
        return np.arange(total)
    state = np.empty(1, np.uint64)
    state[0] = seed
    lq = math.log1p(-p)
    ftotal = float(total)
    mean = total * p
    cap = int(mean + 10.0 * math.sqrt(mean) + 16.0)
    if cap > total:
        cap = total
    out = np.empty(cap, np.int64)
    cnt = 0
    idx = np.int64(-1)
    while True:
        g = math.log(_next_double(state)) / lq
        if g > ftotal:
            g = ftotal
        idx += 1 + np.int64(math.floor(g))
        if idx >= total:
            break
        if cnt == out.size:
            bigger = np.empty(2 * out.size, np.int64)
            bigger[:cnt] = out[:cnt]
            out = bigger
        out[cnt] = idx
        cnt += 1
    return out[:cnt].copy()


@njit(cache=True)
def _c2(x):
    return x * (x - 1) // 2


@njit(cache=True)
def _c3(x):
    return x * (x - 1) * (x - 2) // 6


@njit(cache=True)
def unrank_pairs(idx):
    out = np.empty((idx.size, 2), np.int32)
    for k in range(idx.size):
        i = idx[k]
        v = np.int64(math.sqrt(2.0 * i))
        if v < 1:
            v = 1
        while _c2(v + 1) <= i:
            v += 1
        while _c2(v) > i:
            v -= 1
        out[k, 0] = i - _c2(v)
        out[k, 1] = v
    return out


@njit(cache=True)
def unrank_triples(idx):
    # sorted input (the sampler's output) lets w advance incrementally
    out = np.empty((idx.size, 3), np.int32)
    w = np.int64(2)
    cw = np.int64(0)
    cw1 = np.int64(1)
    prev = np.int64(-1)
    for k in range(idx.size):
        i = idx[k]
        if i < prev:
            w = np.int64(np.cbrt(6.0 * i))
            if w < 2:
                w = 2
            while _c3(w) > i:
                w -= 1
            cw = _c3(w)
            cw1 = _c3(w + 1)
        prev = i
        while cw1 <= i:
            w += 1
            cw = cw1
            cw1 = cw1 + w * (w - 1) // 2
        rem = i - cw
        v = np.int64(math.sqrt(2.0 * rem))
        if v < 1:
            v = 1
        while _c2(v + 1) <= rem:
            v += 1
        while _c2(v) > rem:
            v -= 1
        out[k, 0] = rem - _c2(v)
        out[k, 1] = v
        out[k, 2] = w
    return out


# ---------------------------------------------------------------- incidence


@njit(cache=True)
def build_adj2(n, edges2):
    """CSR neighbour lists.  ``edges2`` must be in colex order, which makes
    every row come out sorted without an explicit sort."""
    ptr = np.zeros(n + 1, np.int64)
    m = edges2.shape[0]
    for e in range(m):
        ptr[edges2[e, 0] + 1] += 1
        ptr[edges2[e, 1] + 1] += 1
    for x in range(n):
        ptr[x + 1] += ptr[x]
    fill = ptr[:-1].copy()
    nbr = np.empty(2 * m, np.int32)
    eid = np.empty(2 * m, np.int32)
    for e in range(m):
        u = edges2[e, 0]
        v = edges2[e, 1]
        nbr[fill[u]] = v
        eid[fill[u]] = e
        fill[u] += 1
        nbr[fill[v]] = u
        eid[fill[v]] = e
        fill[v] += 1
    return ptr, nbr, eid


@njit(cache=True)
def build_inc3(n, edges3):
    ptr = np.zeros(n + 1, np.int64)
    m = edges3.shape[0]
    for e in range(m):
        for j in range(3):
            ptr[edges3[e, j] + 1] += 1
    for x in range(n):
        ptr[x + 1] += ptr[x]
    fill = ptr[:-1].copy()
    eid = np.empty(3 * m, np.int32)
    for e in range(m):
        for j in range(3):
            x = edges3[e, j]
            eid[fill[x]] = e
            fill[x] += 1
    return ptr, eid


# ------------------------------------------------------------------- closure


@njit(cache=True)
def _closure_core(
    a2p, a2n, a2e, i3p, i3e, e3, seeds, cap, order, state,
    marked, cnt3, pend, mlist, touched, seq_kind, seq_eid, seq_vtx,
):
    size = 0
    nseq = 0
    nt = 0
    lo = 0
    hi = 0
    for s in seeds:
        if not marked[s]:
            marked[s] = True
            mlist[size] = s
            size += 1
            pend[hi] = s
            hi += 1
    processed = 0
    truncated = False
    while lo < hi:
        if size >= cap:
            truncated = True
            break
        if order == 0:
            v = pend[lo]
            lo += 1
        elif order == 1:
            hi -= 1
            v = pend[hi]
        else:
            j = lo + _uniform_index(state, hi - lo)
            v = pend[j]
            hi -= 1
            pend[j] = pend[hi]
        processed += 1
        for k in range(a2p[v], a2p[v + 1]):
            u = a2n[k]
            if not marked[u]:
                marked[u] = True
                mlist[size] = u
                size += 1
                pend[hi] = u
                hi += 1
                seq_kind[nseq] = 2
                seq_eid[nseq] = a2e[k]
                seq_vtx[nseq] = u
                nseq += 1
        for k in range(i3p[v], i3p[v + 1]):
            e = i3e[k]
            c = cnt3[e]
            if c == 0:
                touched[nt] = e
                nt += 1
            c += 1
            cnt3[e] = c
            if c == 2:
                for j in range(3):
                    w = e3[e, j]
                    if not marked[w]:
                        marked[w] = True
                        mlist[size] = w
                        size += 1
                        pend[hi] = w
                        hi += 1
                        seq_kind[nseq] = 3
                        seq_eid[nseq] = e
                        seq_vtx[nseq] = w
                        nseq += 1
    return size, nseq, nt, processed, truncated


@njit(cache=True)
def _reset(marked, cnt3, mlist, size, touched, nt):
    for i in range(size):
        marked[mlist[i]] = False
    for i in range(nt):
        cnt3[touched[i]] = 0


@njit(cache=True)
def closure(n, a2p, a2n, a2e, i3p, i3e, e3, seeds, cap, order, state):
    """Marked vertices (in marking order), the witness sequence, the number
    of processed vertices and whether ``cap`` stopped the run early."""
    marked = np.zeros(n, np.bool_)
    cnt3 = np.zeros(e3.shape[0], np.int8)
    pend = np.empty(n, np.int32)
    mlist = np.empty(n, np.int32)
    touched = np.empty(e3.shape[0], np.int64)
    seq_kind = np.empty(n, np.int8)
    seq_eid = np.empty(n, np.int64)
    seq_vtx = np.empty(n, np.int32)
    size, nseq, nt, processed, truncated = _closure_core(
        a2p, a2n, a2e, i3p, i3e, e3, seeds, cap, order, state,
        marked, cnt3, pend, mlist, touched, seq_kind, seq_eid, seq_vtx,
    )
    return (
        mlist[:size].copy(), seq_kind[:nseq].copy(), seq_eid[:nseq].copy(),
        seq_vtx[:nseq].copy(), processed, truncated,
    )


@njit(cache=True)
def closure_sizes(n, a2p, a2n, a2e, i3p, i3e, e3, seed_rows, cap):
    """FIFO closure size from every row of ``seed_rows`` (-1 pads short rows)."""
    marked = np.zeros(n, np.bool_)
    cnt3 = np.zeros(e3.shape[0], np.int8)
    pend = np.empty(n, np.int32)
    mlist = np.empty(n, np.int32)
    touched = np.empty(e3.shape[0], np.int64)
    seq_kind = np.empty(n, np.int8)
    seq_eid = np.empty(n, np.int64)
    seq_vtx = np.empty(n, np.int32)
    state = np.zeros(1, np.uint64)
    out = np.empty(seed_rows.shape[0], np.int64)
    for r in range(seed_rows.shape[0]):
        k = 0
        while k < seed_rows.shape[1] and seed_rows[r, k] >= 0:
            k += 1
        size, nseq, nt, processed, truncated = _closure_core(
            a2p, a2n, a2e, i3p, i3e, e3, seed_rows[r, :k], cap, 0, state,
            marked, cnt3, pend, mlist, touched, seq_kind, seq_eid, seq_vtx,
        )
        out[r] = size
        _reset(marked, cnt3, mlist, size, touched, nt)
    return out


@njit(cache=True)
def connectivity_search(n, a2p, a2n, a2e, i3p, i3e, e2, e3):
    """Edge-seeded closures with containment pruning.

    Returns ``(found, kind, edge, rec_kind, rec_eid, rec_size)`` where the
    ``rec_*`` arrays describe every closure actually computed.
    """
    m2 = e2.shape[0]
    m3 = e3.shape[0]
    marked = np.zeros(n, np.bool_)
    cnt3 = np.zeros(m3, np.int8)
    pend = np.empty(n, np.int32)
    mlist = np.empty(n, np.int32)
    touched = np.empty(m3, np.int64)
    seq_kind = np.empty(n, np.int8)
    seq_eid = np.empty(n, np.int64)
    seq_vtx = np.empty(n, np.int32)
    state = np.zeros(1, np.uint64)
    label = np.full(n, -1, np.int64)
    rec_kind = np.empty(m2 + m3, np.int8)
    rec_eid = np.empty(m2 + m3, np.int64)
    rec_size = np.empty(m2 + m3, np.int64)
    seeds = np.empty(3, np.int32)
    nrec = 0
    for kind in (2, 3):
        m = m2 if kind == 2 else m3
        for e in range(m):
            if kind == 2:
                seeds[0] = e2[e, 0]
                seeds[1] = e2[e, 1]
            else:
                seeds[0] = e3[e, 0]
                seeds[1] = e3[e, 1]
                seeds[2] = e3[e, 2]
            lab = label[seeds[0]]
            if lab >= 0:
                inside = True
                for j in range(1, kind):
                    if label[seeds[j]] != lab:
                        inside = False
                if inside:
                    continue
            size, nseq, nt, processed, truncated = _closure_core(
                a2p, a2n, a2e, i3p, i3e, e3, seeds[:kind], n + 1, 0, state,
                marked, cnt3, pend, mlist, touched, seq_kind, seq_eid, seq_vtx,
            )
            rec_kind[nrec] = kind
            rec_eid[nrec] = e
            rec_size[nrec] = size
            nrec += 1
            if size == n:
                _reset(marked, cnt3, mlist, size, touched, nt)
                return True, kind, e, rec_kind[:nrec].copy(), rec_eid[:nrec].copy(), rec_size[:nrec].copy()
            for i in range(size):
                v = mlist[i]
                lv = label[v]
                if lv < 0 or rec_size[lv] < size:
                    label[v] = nrec - 1
            _reset(marked, cnt3, mlist, size, touched, nt)
    return False, 0, -1, rec_kind[:nrec].copy(), rec_eid[:nrec].copy(), rec_size[:nrec].copy()


# --------------------------------------------------------------- exploration


@njit(cache=True)
def _explore_core(
    a2p, a2n, a2e, i3p, i3e, e3, seeds, max_steps,
    status, queue, ys, zs, seq_kind, seq_eid, seq_vtx,
):
    head = 0
    tail = 0
    for s in seeds:
        if status[s] == 0:
            status[s] = 1
            queue[tail] = s
            tail += 1
    nseq = 0
    t = 0
    ys[0] = tail
    while head < tail and t < max_steps:
        v = queue[head]
        head += 1
        z = 0
        for k in range(a2p[v], a2p[v + 1]):
            u = a2n[k]
            if status[u] == 0:
                status[u] = 1
                queue[tail] = u
                tail += 1
                z += 1
                seq_kind[nseq] = 2
                seq_eid[nseq] = a2e[k]
                seq_vtx[nseq] = u
                nseq += 1
        for k in range(i3p[v], i3p[v + 1]):
            e = i3e[k]
            a = -1
            b = -1
            for j in range(3):
                x = e3[e, j]
                if x != v:
                    if a < 0:
                        a = x
                    else:
                        b = x
            new = -1
            if status[a] == 2 and status[b] == 0:
                new = b
            elif status[b] == 2 and status[a] == 0:
                new = a
            if new >= 0:
                status[new] = 1
                queue[tail] = new
                tail += 1
                z += 1
                seq_kind[nseq] = 3
                seq_eid[nseq] = e
                seq_vtx[nseq] = new
                nseq += 1
        status[v] = 2
        zs[t] = z
        t += 1
        ys[t] = tail - head
    return t, tail, nseq


@njit(cache=True)
def explore(n, a2p, a2n, a2e, i3p, i3e, e3, seeds, max_steps):
    """FIFO run of the active/inactive exploration.

    Returns the activated vertices in order, ``Y_0..Y_t``, ``Z_0..Z_{t-1}``
    and the witness sequence.
    """
    status = np.zeros(n, np.int8)
    queue = np.empty(n, np.int32)
    ys = np.empty(n + 1, np.int64)
    zs = np.empty(n, np.int64)
    seq_kind = np.empty(n, np.int8)
    seq_eid = np.empty(n, np.int64)
    seq_vtx = np.empty(n, np.int32)
    t, size, nseq = _explore_core(
        a2p, a2n, a2e, i3p, i3e, e3, seeds, max_steps,
        status, queue, ys, zs, seq_kind, seq_eid, seq_vtx,
    )
    return (
        queue[:size].copy(), ys[: t + 1].copy(), zs[:t].copy(),
        seq_kind[:nseq].copy(), seq_eid[:nseq].copy(), seq_vtx[:nseq].copy(),
    )


@njit(cache=True)
def explore_sizes(n, a2p, a2n, a2e, i3p, i3e, e3, seed_rows, max_steps):
    """Number of activated vertices from each seed row (-1 pads short rows)."""
    status = np.zeros(n, np.int8)
    queue = np.empty(n, np.int32)
    ys = np.empty(n + 1, np.int64)
    zs = np.empty(n, np.int64)
    seq_kind = np.empty(n, np.int8)
    seq_eid = np.empty(n, np.int64)
    seq_vtx = np.empty(n, np.int32)
    out = np.empty(seed_rows.shape[0], np.int64)
    for r in range(seed_rows.shape[0]):
        k = 0
        while k < seed_rows.shape[1] and seed_rows[r, k] >= 0:
            k += 1
        t, size, nseq = _explore_core(
            a2p, a2n, a2e, i3p, i3e, e3, seed_rows[r, :k], max_steps,
            status, queue, ys, zs, seq_kind, seq_eid, seq_vtx,
        )
        out[r] = size
        for i in range(size):
            status[queue[i]] = 0
    return out


# --------------------------------------------------------------------- chain


@njit(cache=True)
def _binomial_inversion(m, p, state):
    q = 1.0 - p
    ratio = p / q
    f = math.exp(m * math.log1p(-p))
    u = _next_double(state)
    k = 0
    while u > f and k < m:
        u -= f
        f *= ratio * (m - k) / (k + 1)
        k += 1
    return k


@njit(cache=True)
def _binomial_btrs(m, p, state):
    q = 1.0 - p
    spq = math.sqrt(m * p * q)
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.01 * p
    c = m * p + 0.5
    vr = 0.92 - 4.2 / b
    alpha = (2.83 + 5.1 / b) * spq
    lpq = math.log(p / q)
    mode = math.floor((m + 1) * p)
    h = math.lgamma(mode + 1.0) + math.lgamma(m - mode + 1.0)
    while True:
        u = _next_double(state) - 0.5
        v = _next_double(state)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > m:
            continue
        if us >= 0.07 and v <= vr:
            return np.int64(k)
        v = math.log(v * alpha / (a / (us * us) + b))
        if v <= h - math.lgamma(k + 1.0) - math.lgamma(m - k + 1.0) + (k - mode) * lpq:
            return np.int64(k)


@njit(cache=True)
def binomial(m, p, state):
    if m <= 0 or p <= 0.0:
        return np.int64(0)
    if p >= 1.0:
        return np.int64(m)
    flip = p > 0.5
    pp = 1.0 - p if flip else p
    if m * pp <= BINOMIAL_INVERSION_MAX_MEAN:
        k = np.int64(_binomial_inversion(m, pp, state))
    else:
        k = _binomial_btrs(m, pp, state)
    return m - k if flip else k


@njit(cache=True)
def binomial_many(m, p, state, count):
    out = np.empty(count, np.int64)
    for i in range(count):
        out[i] = binomial(m, p, state)
    return out


@njit(cache=True)
def _chain_core(n, p2, p3, y0, horizon, state, ys, zs):
    lq3 = math.log1p(-p3)
    y = y0
    ys[0] = y
    t = 0
    while t < horizon and y > 0:
        m = n - t - y
        p = 1.0 - (1.0 - p2) * math.exp(t * lq3)
        z = binomial(m, p, state)
        zs[t] = z
        y = y + z - 1
        t += 1
        ys[t] = y
    return t


@njit(cache=True)
def chain(n, p2, p3, y0, horizon, state):
    ys = np.empty(horizon + 1, np.int64)
    zs = np.empty(horizon, np.int64)
    t = _chain_core(n, p2, p3, y0, horizon, state, ys, zs)
    return ys[: t + 1].copy(), zs[:t].copy()


@njit(cache=True)
def chain_survival(n, p2, p3, y0, horizon, seed, trials):
    """Per-trial final ``(steps, Y)``; trial ``i`` uses child stream ``i``."""
    ys = np.empty(horizon + 1, np.int64)
    zs = np.empty(horizon, np.int64)
    steps = np.empty(trials, np.int64)
    final = np.empty(trials, np.int64)
    state = np.empty(1, np.uint64)
    for i in range(trials):
        state[0] = _child_seed(seed, i)
        t = _chain_core(n, p2, p3, y0, horizon, state, ys, zs)
        steps[i] = t
        final[i] = ys[t]
    return steps, final
