"""Propagation on a fixed hypergraph.

Two engines live here and are deliberately kept apart:

``closure``
    The marking rule: whenever an edge has every vertex but one marked, mark
    the remaining vertex.  The result is the unique maximal set reachable from
    the seed, independent of firing order.
``explore_paper``
    The active / inactive / unexplored exploration.  Exploring an active
    vertex ``v`` activates an unexplored ``u`` if ``{v, u}`` is a 2-edge or
    ``{v, u, w}`` is a 3-edge with ``w`` already *inactive*.  Having ``w``
    merely active is not enough, so at a fixed step it can lag behind the
    closure (run to extinction it reaches the same set), but its step
    increments are exactly binomial on a random graph.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .hypergraph import Hypergraph, generate
from .model import ModelParams, k0
from .rng import RngStream, next_double

__all__ = [
    "Order",
    "StartMode",
    "Engine",
    "PropagationRun",
    "Connectivity",
    "ComponentCensus",
    "closure",
    "explore_paper",
    "check_witness",
    "is_propagation_connected",
    "oracle_bruteforce",
    "census",
    "draw_seeds",
    "format_certificate",
    "explore_survival",
    "SizeLimitError",
    "ORACLE_MAX_N",
]

ORACLE_MAX_N = 10


class SizeLimitError(ValueError):
    pass


class Order(enum.IntEnum):
    FIFO = 0
    LIFO = 1
    RANDOM = 2


class StartMode(str, enum.Enum):
    SINGLE = "single-vertex"
    PAIR = "pair"
    EDGE = "edge-seed"


class Engine(str, enum.Enum):
    CLOSURE = "closure"
    PAPER = "paper-process"


@dataclass(frozen=True)
class PropagationRun:
    """One run of either engine.

    ``sequence`` lists ``(kind, edge_id, new_vertex)`` in firing order, where
    ``kind`` is 2 or 3 and ``edge_id`` indexes ``edges2``/``edges3``.
    ``survived_to`` counts processed (closure) or explored (exploration)
    vertices.  ``ys``/``zs`` hold the active counts and increments of an
    exploration and are empty for closures.
    """

    n: int
    seed: tuple[int, ...]
    order: np.ndarray
    seq_kind: np.ndarray
    seq_eid: np.ndarray
    seq_vtx: np.ndarray
    survived_to: int
    truncated: bool = False
    ys: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    zs: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    @property
    def size(self) -> int:
        return int(self.order.size)

    @property
    def marked(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[self.order] = True
        return m

    @property
    def marked_set(self) -> frozenset[int]:
        return frozenset(self.order.tolist())

    @property
    def hitting_time(self) -> int | None:
        """First ``t`` with no active vertex (explorations only)."""
        if self.ys.size and self.ys[-1] == 0:
            return int(self.ys.size - 1)
        return None

    def sequence(self, h: Hypergraph) -> list[tuple[tuple[int, ...], int]]:
        return [
            (h.edge(int(k), int(e)), int(v))
            for k, e, v in zip(self.seq_kind, self.seq_eid, self.seq_vtx)
        ]


def _seed_array(h: Hypergraph, seed) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(list(seed) if isinstance(seed, (set, frozenset)) else seed, dtype=np.int64))
    if arr.size == 0:
        raise ValueError("seed must be nonempty")
    if arr.min() < 0 or arr.max() >= h.n:
        raise ValueError(f"seed vertex outside [0, {h.n})")
    return arr.astype(np.int32)


def closure(
    h: Hypergraph,
    seed,
    order: Order = Order.FIFO,
    cap: int | None = None,
    rng: RngStream | None = None,
) -> PropagationRun:
    """Maximal marked set reachable from ``seed``.

    ``order`` only changes the witness sequence, never the marked set.
    ``cap`` stops the run as soon as that many vertices are marked, in which
    case ``truncated`` is set and the result is a subset of the closure.
    ``rng`` drives ``Order.RANDOM``.
    """
    seeds = _seed_array(h, seed)
    state = (rng or RngStream(0)).state()
    cap = h.n + 1 if cap is None else int(cap)
    mlist, kind, eid, vtx, processed, truncated = _accel.kernels().closure(
        h.n, *h.csr(), seeds, cap, int(order), state
    )
    return PropagationRun(
        h.n, tuple(int(s) for s in seeds), mlist, kind, eid, vtx, int(processed), bool(truncated)
    )


def explore_paper(h: Hypergraph, seed, max_steps: int | None = None) -> PropagationRun:
    """FIFO exploration from ``seed`` (one vertex, or two for the 3-uniform case).

    Runs until no vertex is active, or for ``max_steps`` steps.  When run to
    the end, ``size`` equals the hitting time.
    """
    seeds = _seed_array(h, seed)
    steps = h.n if max_steps is None else int(max_steps)
    queue, ys, zs, kind, eid, vtx = _accel.kernels().explore(h.n, *h.csr(), seeds, steps)
    return PropagationRun(
        h.n, tuple(int(s) for s in seeds), queue, kind, eid, vtx, int(zs.size),
        truncated=bool(ys[-1] > 0), ys=ys, zs=zs,
    )


def check_witness(h: Hypergraph, run: PropagationRun) -> bool:
    """Replay ``run`` and confirm each fired edge had exactly one unmarked vertex."""
    marked = set(run.seed)
    for verts, new in run.sequence(h):
        if new not in verts or new in marked:
            return False
        if any(x not in marked for x in verts if x != new):
            return False
        marked.add(new)
    return marked == run.marked_set


# -------------------------------------------------------------- connectivity


@dataclass(frozen=True)
class Connectivity:
    connected: bool
    first_edge: tuple[int, ...] | None
    run: PropagationRun | None
    closures_computed: int
    max_closure: int
    _records: tuple = ()
    _graph: Hypergraph | None = None

    def __bool__(self) -> bool:
        return self.connected

    def obstruction(self) -> list[frozenset[int]]:
        """Inclusion-maximal closed sets among the closures computed."""
        h = self._graph
        sets = {closure(h, h.edge(k, e)).marked_set for k, e in self._records}
        ordered = sorted(sets, key=len, reverse=True)
        maximal: list[frozenset[int]] = []
        for s in ordered:
            if not any(s <= big for big in maximal):
                maximal.append(s)
        return sorted(maximal, key=lambda s: (-len(s), sorted(s)))


def is_propagation_connected(h: Hypergraph) -> Connectivity:
    """Decide whether some edge ordering propagates over every vertex.

    Tries each edge as the first one (2-edges first, colex order) and computes
    its closure; an edge lying inside an earlier closure that missed some
    vertex is skipped, because its own closure cannot leave that set.
    """
    if h.n < 2:
        raise ValueError("connectivity needs n >= 2")
    found, kind, eid, rec_kind, rec_eid, rec_size = _accel.kernels().connectivity_search(
        h.n, *h.csr()[:5], h.edges2, h.edges3
    )
    records = tuple(zip(rec_kind.tolist(), rec_eid.tolist()))
    max_closure = int(rec_size.max()) if rec_size.size else 0
    if found:
        first = h.edge(int(kind), int(eid))
        return Connectivity(True, first, closure(h, first), len(records), max_closure, records, h)
    return Connectivity(False, None, None, len(records), max_closure, records, h)


def format_certificate(h: Hypergraph, result: Connectivity) -> str:
    """``step k: e2|e3 <vertices> -> <new vertex>`` lines, or closed sets."""
    lines = []
    if result.connected:
        first = result.first_edge
        tag = f"e{len(first)}"
        verts = " ".join(map(str, first))
        lines.append(f"step 1: {tag} {verts} -> {verts}")
        for k, (edge, new) in enumerate(result.run.sequence(h), 2):
            lines.append(f"step {k}: e{len(edge)} {' '.join(map(str, edge))} -> {new}")
    else:
        for s in result.obstruction():
            lines.append(f"closed {len(s)}: {' '.join(map(str, sorted(s)))}")
    return "\n".join(lines) + ("\n" if lines else "")


def oracle_bruteforce(h: Hypergraph) -> bool:
    """Backtracking search over edge sequences on vertex bitmasks.

    Independent of ``closure``: it enumerates which edge may come next,
    memoising marked sets already known to be dead ends.
    """
    if h.n > ORACLE_MAX_N:
        raise SizeLimitError(f"oracle limited to n <= {ORACLE_MAX_N} (got {h.n})")
    full = (1 << h.n) - 1
    masks = [sum(1 << x for x in e) for e in h.edges()]
    sizes = [bin(m).count("1") for m in masks]
    dead: set[int] = set()

    def extend(mask: int) -> bool:
        if mask == full:
            return True
        if mask in dead:
            return False
        for em, sz in zip(masks, sizes):
            inside = bin(em & mask).count("1")
            if inside == sz - 1 and extend(mask | em):
                return True
        dead.add(mask)
        return False

    return any(extend(m) for m in masks)


# -------------------------------------------------------------------- census


@dataclass(frozen=True)
class ComponentCensus:
    seeds: np.ndarray
    sizes: np.ndarray
    good_threshold: float
    engine: Engine
    mode: StartMode

    @property
    def samples(self) -> int:
        return int(self.sizes.size)

    @property
    def max_size(self) -> int:
        return int(self.sizes.max()) if self.sizes.size else 0

    @property
    def good_count(self) -> int:
        return int((self.sizes >= self.good_threshold).sum())

    @property
    def histogram(self) -> dict[int, int]:
        """Counts per power-of-two bucket: key ``b`` covers ``[2^b, 2^(b+1))``."""
        buckets = np.floor(np.log2(np.maximum(self.sizes, 1))).astype(int)
        keys, counts = np.unique(buckets, return_counts=True)
        return dict(zip(keys.tolist(), counts.tolist()))

    def rows(self):
        for seed, size in zip(self.seeds.tolist(), self.sizes.tolist()):
            yield " ".join(str(x) for x in seed if x >= 0), size


def draw_seeds(h: Hypergraph, mode: StartMode, samples: int, rng: RngStream) -> np.ndarray:
    """``(samples, width)`` seed rows, padded with -1, drawn uniformly."""
    mode = StartMode(mode)
    state = rng.state()
    n = h.n

    def index(k: int) -> int:
        return min(int(next_double(state) * k), k - 1)

    if mode is StartMode.SINGLE:
        return np.array([[index(n)] for _ in range(samples)], np.int32).reshape(-1, 1)
    if mode is StartMode.PAIR:
        rows = []
        for _ in range(samples):
            a = index(n)
            b = index(n - 1)
            rows.append([a, b + (b >= a)])
        return np.array(rows, np.int32).reshape(-1, 2)
    m = h.m2 + h.m3
    if m == 0:
        raise ValueError("edge-seeded census needs at least one edge")
    rows = np.full((samples, 3), -1, np.int32)
    for i in range(samples):
        j = index(m)
        e = h.edges2[j] if j < h.m2 else h.edges3[j - h.m2]
        rows[i, : e.size] = e
    return rows


def census(
    h: Hypergraph,
    params: ModelParams,
    samples: int,
    rng: RngStream,
    mode: StartMode = StartMode.SINGLE,
    engine: Engine = Engine.CLOSURE,
    cap: int | None = None,
) -> ComponentCensus:
    """Component sizes from ``samples`` uniformly drawn seeds.

    A seed counts as good when its component reaches ``K0 ln n`` vertices.
    ``cap`` truncates closures (sizes become lower bounds) and is ignored by
    the exploration engine.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    engine = Engine(engine)
    seeds = draw_seeds(h, mode, samples, rng)
    k = _accel.kernels()
    if engine is Engine.CLOSURE:
        c = h.n + 1 if cap is None else int(cap)
        sizes = k.closure_sizes(h.n, *h.csr(), seeds, c)
    else:
        sizes = k.explore_sizes(h.n, *h.csr(), seeds, h.n)
    return ComponentCensus(seeds, sizes, k0(params) * math.log(h.n), engine, StartMode(mode))


def explore_survival(
    params: ModelParams, horizon: int, trials: int, rng: RngStream, y0: int = 1
) -> tuple[float, float]:
    """Fraction of fresh random graphs on which an exploration from ``y0``
    random vertices still has active vertices after ``horizon`` steps.

    Trial ``i`` samples its graph from ``rng.child(2 i)`` and its start from
    ``rng.child(2 i + 1)``.  Returns the estimate and its standard error.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mode = StartMode.SINGLE if y0 == 1 else StartMode.PAIR
    if y0 not in (1, 2):
        raise ValueError("y0 must be 1 or 2")
    k = _accel.kernels()
    alive = 0
    for i in range(trials):
        h = generate(params, rng.child(2 * i))
        seeds = draw_seeds(h, mode, 1, rng.child(2 * i + 1))[0]
        _, ys, zs, *_ = k.explore(h.n, *h.csr(), seeds, horizon)
        alive += int(zs.size == horizon and ys[-1] > 0)
    est = alive / trials
    return est, math.sqrt(est * (1.0 - est) / trials)
