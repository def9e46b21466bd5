import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperprop.hypergraph import (
    MAX_VERTICES,
    CapacityError,
    DuplicateEdgeError,
    DuplicateVertexError,
    Hypergraph,
    MalformedLineError,
    NonCanonicalError,
    VertexRangeError,
    dumps,
    generate,
    load,
    loads,
    rank_pair,
    rank_triple,
    sample,
    save,
    unrank_pairs,
    unrank_triples,
)
from hyperprop.model import ModelParams
from hyperprop.rng import RngStream

from conftest import hypergraphs


@pytest.mark.parametrize("n", [3, 10, 50])
def test_unrank_pairs_bijection(n):
    expected = list(itertools.combinations(range(n), 2))
    ranks = sorted(rank_pair(*e) for e in expected)
    assert ranks == list(range(math.comb(n, 2)))
    got = unrank_pairs(np.arange(math.comb(n, 2))).tolist()
    assert sorted(map(tuple, got)) == expected
    assert all(rank_pair(*e) == i for i, e in enumerate(got))


@pytest.mark.parametrize("n", [3, 10, 50])
def test_unrank_triples_bijection(n):
    total = math.comb(n, 3)
    got = unrank_triples(np.arange(total)).tolist()
    assert sorted(map(tuple, got)) == list(itertools.combinations(range(n), 3))
    assert all(rank_triple(*e) == i for i, e in enumerate(got))


@settings(max_examples=200)
@given(st.integers(0, math.comb(MAX_VERTICES, 3) - 1))
def test_unrank_triples_large_ranks(idx):
    (row,) = unrank_triples(np.array([idx], np.int64)).tolist()
    u, v, w = row
    assert 0 <= u < v < w < MAX_VERTICES
    assert rank_triple(u, v, w) == idx


def test_unrank_unsorted_input():
    idx = np.array([500, 3, 10_000_000, 0, 77], np.int64)
    rows = unrank_triples(idx).tolist()
    assert [rank_triple(*r) for r in rows] == idx.tolist()


def test_capacity():
    assert (MAX_VERTICES + 1) * MAX_VERTICES * (MAX_VERTICES - 1) < 2**63
    m = MAX_VERTICES + 1
    assert (m + 1) * m * (m - 1) >= 2**63
    with pytest.raises(CapacityError):
        Hypergraph(MAX_VERTICES + 1)


def test_canonicalization_and_immutability():
    h = Hypergraph(5, [(3, 1), (0, 2)], [(4, 0, 2), (2, 1, 0)])
    assert h.edges2.tolist() == [[0, 2], [1, 3]]
    assert h.edges3.tolist() == [[0, 1, 2], [0, 2, 4]]
    with pytest.raises(AttributeError):
        h.n = 7
    with pytest.raises(ValueError):
        h.edges2[0, 0] = 1


@pytest.mark.parametrize(
    "e2, e3, err",
    [
        ([(0, 5)], [], VertexRangeError),
        ([(1, 1)], [], DuplicateVertexError),
        ([(0, 1), (1, 0)], [], DuplicateEdgeError),
        ([], [(0, 1, 1)], DuplicateVertexError),
    ],
)
def test_constructor_validation(e2, e3, err):
    with pytest.raises(err):
        Hypergraph(4, np.array(e2).reshape(-1, 2), np.array(e3).reshape(-1, 3))


@settings(max_examples=80, deadline=None)
@given(hypergraphs())
def test_incidence_consistent(h):
    h.check_consistency()
    for v in range(h.n):
        nb = h.neighbors(v).tolist()
        assert nb == sorted(nb)
        expected3 = {i for i, e in enumerate(h.edges3.tolist()) if v in e}
        assert set(h.incident3(v).tolist()) == expected3
    assert list(h.edges()) == [tuple(e) for e in h.edges2.tolist()] + [tuple(e) for e in h.edges3.tolist()]


@settings(max_examples=80, deadline=None)
@given(hypergraphs(min_n=1))
def test_text_round_trip(h):
    assert loads(dumps(h)) == h


def test_file_round_trip(tmp_path):
    h = generate(ModelParams(300, 0.5, 1.0), RngStream(3))
    path = tmp_path / "g.hpg"
    save(h, path)
    assert load(path) == h


def test_loader_accepts_comments_and_any_line_order():
    text = "# sample\nhpg 1\nn 4\ne3 1 2 3  # trailing\n\ne2 0 1\n"
    h = loads(text)
    assert h.m2 == 1 and h.m3 == 1


@pytest.mark.parametrize(
    "text, err, line",
    [
        ("hpg 2\nn 4\n", MalformedLineError, 1),
        ("graph 1\nn 4\n", MalformedLineError, 1),
        ("hpg 1\nm 4\n", MalformedLineError, 2),
        ("hpg 1\nn 4\ne4 0 1 2 3\n", MalformedLineError, 3),
        ("hpg 1\nn 4\ne2 0\n", MalformedLineError, 3),
        ("hpg 1\nn 4\ne2 0 x\n", MalformedLineError, 3),
        ("hpg 1\nn 4\ne2 0 4\n", VertexRangeError, 3),
        ("hpg 1\nn 4\ne3 0 0 1\n", DuplicateVertexError, 3),
        ("hpg 1\nn 4\ne3 0 2 1\n", NonCanonicalError, 3),
        ("hpg 1\nn 4\ne2 0 1\ne2 1 2\ne2 0 1\n", DuplicateEdgeError, 5),
        ("", MalformedLineError, None),
    ],
)
def test_loader_errors(text, err, line):
    with pytest.raises(err) as info:
        loads(text)
    assert info.value.line == line


def test_sample_deterministic_and_seed_sensitive():
    p = ModelParams(200, 0.5, 1.0)
    assert generate(p, RngStream(1)) == generate(p, RngStream(1))
    assert generate(p, RngStream(1)) != generate(p, RngStream(2))


def test_sample_extreme_probabilities():
    h = sample(6, 1.0, 1.0, RngStream(0))
    assert h.m2 == 15 and h.m3 == 20
    h = sample(6, 0.0, 0.0, RngStream(0))
    assert h.m2 == 0 and h.m3 == 0


def test_sampler_edge_frequencies():
    """Every possible edge appears with its own probability, within 4 sigma."""
    n, p2, p3, reps = 5, 0.3, 0.2, 100_000
    c2 = np.zeros(math.comb(n, 2))
    c3 = np.zeros(math.comb(n, 3))
    base = RngStream(2024)
    for i in range(reps):
        h = sample(n, p2, p3, base.child(i))
        for u, v in h.edges2.tolist():
            c2[rank_pair(u, v)] += 1
        for u, v, w in h.edges3.tolist():
            c3[rank_triple(u, v, w)] += 1
    for counts, p in ((c2, p2), (c3, p3)):
        sigma = math.sqrt(reps * p * (1 - p))
        assert np.abs(counts - reps * p).max() < 4 * sigma
