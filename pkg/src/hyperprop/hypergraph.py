"""Storage, sampling and text I/O for hypergraphs with 2-edges and 3-edges.

Edges are kept in colexicographic order: the pair ``u < v`` has rank
``C(v,2) + u`` and the triple ``u < v < w`` has rank ``C(w,3) + C(v,2) + u``.
Sampling walks these index spaces with geometric gaps, so each of the
``C(n,2)`` pairs and ``C(n,3)`` triples is kept independently with its
probability and the work is proportional to the number of edges kept.
"""
from __future__ import annotations

import os
from math import comb
from pathlib import Path

import numpy as np

from . import _accel
from .model import ModelParams
from .rng import RngStream, derive_seed

__all__ = [
    "Hypergraph",
    "CapacityError",
    "HypergraphFormatError",
    "MalformedLineError",
    "VertexRangeError",
    "DuplicateVertexError",
    "NonCanonicalError",
    "DuplicateEdgeError",
    "generate",
    "sample",
    "rank_pair",
    "rank_triple",
    "unrank_pairs",
    "unrank_triples",
    "save",
    "load",
    "MAX_VERTICES",
]

MAGIC = "hpg"
FORMAT_VERSION = 1


def _max_vertices() -> int:
    # the unranking kernels evaluate (n+1) n (n-1) in signed 64-bit
    lo, hi = 3, 1 << 22
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if (mid + 1) * mid * (mid - 1) < (1 << 63):
            lo = mid
        else:
            hi = mid - 1
    return lo


MAX_VERTICES = _max_vertices()


class CapacityError(OverflowError):
    """The triple index space does not fit the 64-bit kernels."""


class HypergraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class MalformedLineError(HypergraphFormatError):
    pass


class VertexRangeError(HypergraphFormatError):
    pass


class DuplicateVertexError(HypergraphFormatError):
    pass


class NonCanonicalError(HypergraphFormatError):
    pass


class DuplicateEdgeError(HypergraphFormatError):
    pass


def rank_pair(u: int, v: int) -> int:
    return comb(v, 2) + u


def rank_triple(u: int, v: int, w: int) -> int:
    return comb(w, 3) + comb(v, 2) + u


def unrank_pairs(idx) -> np.ndarray:
    """Colex unranking of pair indices, shape ``(k, 2)``."""
    return _accel.kernels().unrank_pairs(np.ascontiguousarray(idx, dtype=np.int64))


def unrank_triples(idx) -> np.ndarray:
    return _accel.kernels().unrank_triples(np.ascontiguousarray(idx, dtype=np.int64))


def _ranks2(edges: np.ndarray) -> np.ndarray:
    v = edges[:, 1].astype(np.int64)
    return v * (v - 1) // 2 + edges[:, 0]


def _ranks3(edges: np.ndarray) -> np.ndarray:
    v = edges[:, 1].astype(np.int64)
    w = edges[:, 2].astype(np.int64)
    return w * (w - 1) * (w - 2) // 6 + v * (v - 1) // 2 + edges[:, 0]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class Hypergraph:
    """Immutable hypergraph on vertices ``0..n-1``.

    ``edges2`` is an ``(m2, 2)`` and ``edges3`` an ``(m3, 3)`` int32 array of
    canonical (strictly increasing) rows in colex order.  Incidence is held in
    CSR form: the neighbours of ``v`` through 2-edges are
    ``adj2_nbr[adj2_ptr[v]:adj2_ptr[v+1]]`` (sorted, with matching edge ids in
    ``adj2_eid``) and the 3-edges containing ``v`` are
    ``inc3_eid[inc3_ptr[v]:inc3_ptr[v+1]]``.
    """

    __slots__ = (
        "n", "edges2", "edges3",
        "adj2_ptr", "adj2_nbr", "adj2_eid", "inc3_ptr", "inc3_eid",
    )

    def __init__(self, n: int, edges2=None, edges3=None, *, _trusted: bool = False):
        n = int(n)
        if n < 1:
            raise ValueError(f"n must be positive (got {n})")
        if n > MAX_VERTICES:
            raise CapacityError(f"n = {n} exceeds the 64-bit index capacity ({MAX_VERTICES})")
        e2 = np.zeros((0, 2), np.int32) if edges2 is None else np.asarray(edges2).reshape(-1, 2)
        e3 = np.zeros((0, 3), np.int32) if edges3 is None else np.asarray(edges3).reshape(-1, 3)
        e2 = e2.astype(np.int32, copy=False)
        e3 = e3.astype(np.int32, copy=False)
        if not _trusted:
            e2 = self._canonical(n, e2)
            e3 = self._canonical(n, e3)
        k = _accel.kernels()
        a2p, a2n, a2e = k.build_adj2(n, np.ascontiguousarray(e2))
        i3p, i3e = k.build_inc3(n, np.ascontiguousarray(e3))
        setter = object.__setattr__
        setter(self, "n", n)
        for name, arr in (
            ("edges2", e2), ("edges3", e3),
            ("adj2_ptr", a2p), ("adj2_nbr", a2n), ("adj2_eid", a2e),
            ("inc3_ptr", i3p), ("inc3_eid", i3e),
        ):
            setter(self, name, _frozen(arr))

    @staticmethod
    def _canonical(n: int, edges: np.ndarray) -> np.ndarray:
        if edges.size == 0:
            return edges.copy()
        if edges.min() < 0 or edges.max() >= n:
            raise VertexRangeError(f"edge vertex outside [0, {n})")
        edges = np.sort(edges, axis=1)
        if (np.diff(edges, axis=1) == 0).any():
            raise DuplicateVertexError("edge repeats a vertex")
        ranks = _ranks2(edges) if edges.shape[1] == 2 else _ranks3(edges)
        order = np.argsort(ranks, kind="stable")
        if (np.diff(ranks[order]) == 0).any():
            raise DuplicateEdgeError("duplicate edge")
        return edges[order]

    def __setattr__(self, name, value):
        raise AttributeError("Hypergraph is immutable")

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, m2={self.m2}, m3={self.m3})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edges2, other.edges2)
            and np.array_equal(self.edges3, other.edges3)
        )

    __hash__ = None

    @property
    def m2(self) -> int:
        return int(self.edges2.shape[0])

    @property
    def m3(self) -> int:
        return int(self.edges3.shape[0])

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj2_nbr[self.adj2_ptr[v]:self.adj2_ptr[v + 1]]

    def incident3(self, v: int) -> np.ndarray:
        return self.inc3_eid[self.inc3_ptr[v]:self.inc3_ptr[v + 1]]

    def edge(self, kind: int, eid: int) -> tuple[int, ...]:
        arr = self.edges2 if kind == 2 else self.edges3
        return tuple(int(x) for x in arr[eid])

    def edges(self):
        """All edges as vertex tuples, 2-edges first, each block in colex order."""
        for row in self.edges2.tolist():
            yield tuple(row)
        for row in self.edges3.tolist():
            yield tuple(row)

    def csr(self) -> tuple[np.ndarray, ...]:
        """The argument tuple the propagation kernels expect."""
        return (
            self.adj2_ptr, self.adj2_nbr, self.adj2_eid,
            self.inc3_ptr, self.inc3_eid, self.edges3,
        )

    def check_consistency(self) -> None:
        """Rebuild incidence from the edge lists and compare; raise on mismatch."""
        fresh = Hypergraph(self.n, self.edges2, self.edges3)
        for name in ("edges2", "edges3", "adj2_ptr", "adj2_nbr", "adj2_eid", "inc3_ptr", "inc3_eid"):
            if not np.array_equal(getattr(self, name), getattr(fresh, name)):
                raise AssertionError(f"inconsistent {name}")
        for v in range(self.n):
            for e in self.incident3(v):
                if v not in self.edges3[e]:
                    raise AssertionError(f"vertex {v} not in 3-edge {e}")
            for u, e in zip(self.neighbors(v), self.adj2_eid[self.adj2_ptr[v]:self.adj2_ptr[v + 1]]):
                if sorted((v, int(u))) != self.edges2[e].tolist():
                    raise AssertionError(f"2-edge {e} does not join {v} and {u}")


def sample(n: int, p2: float, p3: float, rng: RngStream) -> Hypergraph:
    """``G(n, p2, p3)`` for arbitrary probabilities (used directly by tests)."""
    if n > MAX_VERTICES:
        raise CapacityError(f"n = {n} exceeds the 64-bit index capacity ({MAX_VERTICES})")
    if not (0.0 <= p2 <= 1.0 and 0.0 <= p3 <= 1.0):
        raise ValueError("edge probabilities must lie in [0, 1]")
    k = _accel.kernels()
    seed = rng.seed
    idx2 = k.sample_indices(np.uint64(derive_seed(seed, 2)), comb(n, 2), float(p2))
    idx3 = k.sample_indices(np.uint64(derive_seed(seed, 3)), comb(n, 3), float(p3))
    return Hypergraph(n, k.unrank_pairs(idx2), k.unrank_triples(idx3), _trusted=True)


def generate(params: ModelParams, rng: RngStream) -> Hypergraph:
    """Draw one hypergraph from the model."""
    return sample(params.n, params.p2, params.p3, rng)


# ------------------------------------------------------------------------ I/O


def dumps(h: Hypergraph) -> str:
    lines = [f"{MAGIC} {FORMAT_VERSION}", f"n {h.n}"]
    lines.extend(f"e2 {u} {v}" for u, v in h.edges2.tolist())
    lines.extend(f"e3 {u} {v} {w}" for u, v, w in h.edges3.tolist())
    return "\n".join(lines) + "\n"


def save(h: Hypergraph, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps(h), encoding="ascii")


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MalformedLineError(f"expected an integer, got {tok!r}", lineno) from None


def loads(text: str) -> Hypergraph:
    header: list[tuple[int, list[str]]] = []
    e2: list[tuple[int, ...]] = []
    e3: list[tuple[int, ...]] = []
    seen: dict[tuple[int, ...], int] = {}
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(header) < 2:
            header.append((lineno, toks))
            if len(header) == 1:
                if toks[0] != MAGIC or len(toks) != 2:
                    raise MalformedLineError(f"expected '{MAGIC} {FORMAT_VERSION}' header", lineno)
                if _int(toks[1], lineno) != FORMAT_VERSION:
                    raise MalformedLineError(f"unsupported format version {toks[1]}", lineno)
            else:
                if toks[0] != "n" or len(toks) != 2:
                    raise MalformedLineError("expected 'n <N>' line", lineno)
                n = _int(toks[1], lineno)
                if n < 1:
                    raise MalformedLineError("vertex count must be positive", lineno)
            continue
        tag = toks[0]
        arity = {"e2": 2, "e3": 3}.get(tag)
        if arity is None:
            raise MalformedLineError(f"unknown record {tag!r}", lineno)
        if len(toks) != arity + 1:
            raise MalformedLineError(f"{tag} needs {arity} vertices", lineno)
        verts = tuple(_int(t, lineno) for t in toks[1:])
        for x in verts:
            if not 0 <= x < n:
                raise VertexRangeError(f"vertex {x} outside [0, {n})", lineno)
        if len(set(verts)) != arity:
            raise DuplicateVertexError(f"edge {' '.join(toks[1:])} repeats a vertex", lineno)
        if list(verts) != sorted(verts):
            raise NonCanonicalError("vertices must be strictly increasing", lineno)
        if verts in seen:
            raise DuplicateEdgeError(f"edge repeats line {seen[verts]}", lineno)
        seen[verts] = lineno
        (e2 if arity == 2 else e3).append(verts)
    if n is None:
        raise MalformedLineError("missing header", None)
    return Hypergraph(n, np.array(e2, np.int32).reshape(-1, 2), np.array(e3, np.int32).reshape(-1, 3))


def load(path: str | os.PathLike) -> Hypergraph:
    return loads(Path(path).read_text(encoding="ascii"))
