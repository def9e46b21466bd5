"""Reference kernels without numba.

Sampling, unranking and incidence building are vectorised with numpy.  The
propagation and chain loops are inherently sequential and run as plain Python
over lists; they are slow but give the same answers as ``numba_kernels``
draw for draw.
"""
import math

import numpy as np

from ..rng import block_doubles, derive_seed, next_double

BINOMIAL_INVERSION_MAX_MEAN = 30.0


def _uniform_index(state, n):
    i = int(next_double(state) * n)
    return n - 1 if i >= n else i


def doubles(state, count):
    s0 = int(state[0])
    out = block_doubles(s0, 0, count)
    state[0] = np.uint64((s0 + count * 0x9E3779B97F4A7C15) & ((1 << 64) - 1))
    return out


# ------------------------------------------------------------------- sampling


def sample_indices(seed, total, p):
    if p <= 0.0 or total <= 0:
        return np.empty(0, np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    lq = math.log1p(-p)
    ftotal = float(total)
    mean = total * p
    block = int(min(max(1024, 1.1 * mean + 64), 1 << 20, (1 << 62) // (total + 1)))
    block = max(block, 1)
    chunks = []
    idx = -1
    start = 0
    while True:
        g = np.minimum(np.log(block_doubles(seed, start, block)) / lq, ftotal)
        start += block
        pos = idx + np.cumsum(1 + np.floor(g).astype(np.int64))
        stop = int(np.searchsorted(pos, total))
        chunks.append(pos[:stop])
        if stop < block:
            break
        idx = int(pos[-1])
    return np.concatenate(chunks)


def _c2(x):
    return x * (x - 1) // 2


def _c3(x):
    return x * (x - 1) * (x - 2) // 6


def _fix_up(guess, target, f):
    while True:
        up = f(guess + 1) <= target
        if not up.any():
            break
        guess[up] += 1
    while True:
        down = f(guess) > target
        if not down.any():
            break
        guess[down] -= 1
    return guess


def unrank_pairs(idx):
    idx = np.asarray(idx, dtype=np.int64)
    v = np.maximum(np.sqrt(2.0 * idx).astype(np.int64), 1)
    v = _fix_up(v, idx, _c2)
    return np.column_stack([idx - _c2(v), v]).astype(np.int32).reshape(-1, 2)


def unrank_triples(idx):
    idx = np.asarray(idx, dtype=np.int64)
    w = np.maximum(np.cbrt(6.0 * idx).astype(np.int64), 2)
    w = _fix_up(w, idx, _c3)
    rem = idx - _c3(w)
    v = np.maximum(np.sqrt(2.0 * rem).astype(np.int64), 1)
    v = _fix_up(v, rem, _c2)
    return np.column_stack([rem - _c2(v), v, w]).astype(np.int32).reshape(-1, 3)


# ---------------------------------------------------------------- incidence


def _csr(n, ends, payload):
    order = np.argsort(ends, kind="stable")
    ptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(ends, minlength=n), out=ptr[1:])
    return ptr, order, payload[order]


def build_adj2(n, edges2):
    m = edges2.shape[0]
    ends = np.concatenate([edges2[:, 0], edges2[:, 1]]).astype(np.int64)
    others = np.concatenate([edges2[:, 1], edges2[:, 0]]).astype(np.int32)
    eids = np.concatenate([np.arange(m), np.arange(m)]).astype(np.int32)
    order = np.lexsort((others, ends))
    ptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(ends, minlength=n), out=ptr[1:])
    return ptr, others[order], eids[order]


def build_inc3(n, edges3):
    m = edges3.shape[0]
    ends = edges3.reshape(-1).astype(np.int64)
    eids = np.repeat(np.arange(m, dtype=np.int32), 3)
    ptr, _, eid = _csr(n, ends, eids)
    return ptr, eid


# ------------------------------------------------------------------- closure


class _Graph:
    """Python-list view of the CSR arrays for the sequential loops."""

    __slots__ = ("a2p", "a2n", "a2e", "i3p", "i3e", "e3")

    def __init__(self, a2p, a2n, a2e, i3p, i3e, e3):
        self.a2p = a2p.tolist()
        self.a2n = a2n.tolist()
        self.a2e = a2e.tolist()
        self.i3p = i3p.tolist()
        self.i3e = i3e.tolist()
        self.e3 = e3.tolist()


def _closure_py(g, n, seeds, cap, order, state):
    marked = bytearray(n)
    cnt3 = {}
    mlist = []
    pend = []
    seq = []
    for s in seeds:
        s = int(s)
        if not marked[s]:
            marked[s] = 1
            mlist.append(s)
            pend.append(s)
    lo = 0
    processed = 0
    truncated = False
    a2p, a2n, a2e, i3p, i3e, e3 = g.a2p, g.a2n, g.a2e, g.i3p, g.i3e, g.e3
    while lo < len(pend):
        if len(mlist) >= cap:
            truncated = True
            break
        if order == 0:
            v = pend[lo]
            lo += 1
        elif order == 1:
            v = pend.pop()
        else:
            j = lo + _uniform_index(state, len(pend) - lo)
            v = pend[j]
            pend[j] = pend[-1]
            pend.pop()
        processed += 1
        for k in range(a2p[v], a2p[v + 1]):
            u = a2n[k]
            if not marked[u]:
                marked[u] = 1
                mlist.append(u)
                pend.append(u)
                seq.append((2, a2e[k], u))
        for k in range(i3p[v], i3p[v + 1]):
            e = i3e[k]
            c = cnt3.get(e, 0) + 1
            cnt3[e] = c
            if c == 2:
                for w in e3[e]:
                    if not marked[w]:
                        marked[w] = 1
                        mlist.append(w)
                        pend.append(w)
                        seq.append((3, e, w))
    return mlist, seq, processed, truncated


def _seq_arrays(seq):
    if not seq:
        return np.empty(0, np.int8), np.empty(0, np.int64), np.empty(0, np.int32)
    kind, eid, vtx = zip(*seq)
    return np.array(kind, np.int8), np.array(eid, np.int64), np.array(vtx, np.int32)


def closure(n, a2p, a2n, a2e, i3p, i3e, e3, seeds, cap, order, state):
    g = _Graph(a2p, a2n, a2e, i3p, i3e, e3)
    mlist, seq, processed, truncated = _closure_py(g, n, seeds, cap, order, state)
    return (np.array(mlist, np.int32), *_seq_arrays(seq), processed, truncated)


def _rows(seed_rows):
    for row in seed_rows:
        yield [int(x) for x in row if x >= 0]


def closure_sizes(n, a2p, a2n, a2e, i3p, i3e, e3, seed_rows, cap):
    g = _Graph(a2p, a2n, a2e, i3p, i3e, e3)
    out = [len(_closure_py(g, n, row, cap, 0, None)[0]) for row in _rows(seed_rows)]
    return np.array(out, np.int64)


def connectivity_search(n, a2p, a2n, a2e, i3p, i3e, e2, e3):
    g = _Graph(a2p, a2n, a2e, i3p, i3e, e3)
    label = [-1] * n
    rec = []
    edge_lists = ((2, e2.tolist()), (3, g.e3))
    for kind, edges in edge_lists:
        for e, verts in enumerate(edges):
            lab = label[verts[0]]
            if lab >= 0 and all(label[x] == lab for x in verts[1:]):
                continue
            mlist = _closure_py(g, n, verts, n + 1, 0, None)[0]
            size = len(mlist)
            rec.append((kind, e, size))
            if size == n:
                return (True, kind, e, *_rec_arrays(rec))
            j = len(rec) - 1
            for v in mlist:
                if label[v] < 0 or rec[label[v]][2] < size:
                    label[v] = j
    return (False, 0, -1, *_rec_arrays(rec))


def _rec_arrays(rec):
    if not rec:
        return np.empty(0, np.int8), np.empty(0, np.int64), np.empty(0, np.int64)
    kind, eid, size = zip(*rec)
    return np.array(kind, np.int8), np.array(eid, np.int64), np.array(size, np.int64)


# --------------------------------------------------------------- exploration


def _explore_py(g, n, seeds, max_steps):
    status = bytearray(n)
    queue = []
    for s in seeds:
        s = int(s)
        if status[s] == 0:
            status[s] = 1
            queue.append(s)
    ys = [len(queue)]
    zs = []
    seq = []
    head = 0
    a2p, a2n, a2e, i3p, i3e, e3 = g.a2p, g.a2n, g.a2e, g.i3p, g.i3e, g.e3
    while head < len(queue) and len(zs) < max_steps:
        v = queue[head]
        head += 1
        z = 0
        for k in range(a2p[v], a2p[v + 1]):
            u = a2n[k]
            if status[u] == 0:
                status[u] = 1
                queue.append(u)
                z += 1
                seq.append((2, a2e[k], u))
        for k in range(i3p[v], i3p[v + 1]):
            e = i3e[k]
            a, b = [x for x in e3[e] if x != v]
            new = -1
            if status[a] == 2 and status[b] == 0:
                new = b
            elif status[b] == 2 and status[a] == 0:
                new = a
            if new >= 0:
                status[new] = 1
                queue.append(new)
                z += 1
                seq.append((3, e, new))
        status[v] = 2
        zs.append(z)
        ys.append(len(queue) - head)
    return queue, ys, zs, seq


def explore(n, a2p, a2n, a2e, i3p, i3e, e3, seeds, max_steps):
    g = _Graph(a2p, a2n, a2e, i3p, i3e, e3)
    queue, ys, zs, seq = _explore_py(g, n, seeds, max_steps)
    return (
        np.array(queue, np.int32), np.array(ys, np.int64), np.array(zs, np.int64),
        *_seq_arrays(seq),
    )


def explore_sizes(n, a2p, a2n, a2e, i3p, i3e, e3, seed_rows, max_steps):
    g = _Graph(a2p, a2n, a2e, i3p, i3e, e3)
    out = [len(_explore_py(g, n, row, max_steps)[0]) for row in _rows(seed_rows)]
    return np.array(out, np.int64)


# --------------------------------------------------------------------- chain


def _binomial_inversion(m, p, state):
    ratio = p / (1.0 - p)
    f = math.exp(m * math.log1p(-p))
    u = next_double(state)
    k = 0
    while u > f and k < m:
        u -= f
        f *= ratio * (m - k) / (k + 1)
        k += 1
    return k


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
        u = next_double(state) - 0.5
        v = next_double(state)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > m:
            continue
        if us >= 0.07 and v <= vr:
            return k
        v = math.log(v * alpha / (a / (us * us) + b))
        if v <= h - math.lgamma(k + 1.0) - math.lgamma(m - k + 1.0) + (k - mode) * lpq:
            return k


def binomial(m, p, state):
    m = int(m)
    if m <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return m
    flip = p > 0.5
    pp = 1.0 - p if flip else p
    if m * pp <= BINOMIAL_INVERSION_MAX_MEAN:
        k = _binomial_inversion(m, pp, state)
    else:
        k = _binomial_btrs(m, pp, state)
    return m - k if flip else k


def binomial_many(m, p, state, count):
    return np.array([binomial(m, p, state) for _ in range(count)], np.int64)


def _chain_py(n, p2, p3, y0, horizon, state):
    lq3 = math.log1p(-p3)
    y = int(y0)
    ys = [y]
    zs = []
    t = 0
    while t < horizon and y > 0:
        m = n - t - y
        p = 1.0 - (1.0 - p2) * math.exp(t * lq3)
        z = binomial(m, p, state)
        zs.append(z)
        y = y + z - 1
        t += 1
        ys.append(y)
    return ys, zs


def chain(n, p2, p3, y0, horizon, state):
    ys, zs = _chain_py(n, p2, p3, y0, horizon, state)
    return np.array(ys, np.int64), np.array(zs, np.int64)


def chain_survival(n, p2, p3, y0, horizon, seed, trials):
    steps = np.empty(trials, np.int64)
    final = np.empty(trials, np.int64)
    state = np.empty(1, np.uint64)
    for i in range(trials):
        state[0] = derive_seed(int(seed), i)
        ys, _ = _chain_py(n, p2, p3, y0, horizon, state)
        steps[i] = len(ys) - 1
        final[i] = ys[-1]
    return steps, final
