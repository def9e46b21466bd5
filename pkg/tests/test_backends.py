"""The numba kernels and the pure-numpy fallback must agree bit for bit."""
import math

import numpy as np
import pytest

from hyperprop import _accel
from hyperprop.hypergraph import generate, sample
from hyperprop.model import ModelParams
from hyperprop.rng import RngStream


def both(fn):
    out = {}
    for name in ("numba", "numpy"):
        with _accel.using(name):
            out[name] = fn(_accel.kernels())
    return out["numba"], out["numpy"]


def assert_same(a, b):
    if isinstance(a, tuple):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert_same(x, y)
    else:
        np.testing.assert_array_equal(np.asarray(a), np.asarray(b))


def test_backend_switch():
    with _accel.using("numpy"):
        assert _accel.backend_name() == "numpy"
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


@pytest.mark.parametrize("total, p", [(10, 0.5), (10**6, 1e-3), (10**9, 1e-6), (50, 1.0), (50, 0.0)])
def test_sample_indices(total, p):
    a, b = both(lambda k: k.sample_indices(np.uint64(99), total, p))
    assert_same(a, b)
    assert (np.diff(a) > 0).all() and (a.size == 0 or a[-1] < total)


def test_unrank():
    idx = np.array(sorted({0, 1, 5, 1000, 10**6, 10**9, 10**12}), np.int64)
    assert_same(*both(lambda k: k.unrank_triples(idx)))
    assert_same(*both(lambda k: k.unrank_triples(idx[::-1].copy())))
    assert_same(*both(lambda k: k.unrank_pairs(idx)))


def test_sampled_graph_identical():
    p = ModelParams(400, 0.5, 1.5)
    g1, g2 = both(lambda k: generate(p, RngStream(4)))
    assert g1 == g2
    for name in ("adj2_ptr", "adj2_nbr", "adj2_eid", "inc3_ptr", "inc3_eid"):
        np.testing.assert_array_equal(getattr(g1, name), getattr(g2, name))


@pytest.mark.parametrize("order", [0, 1, 2])
def test_closure_and_exploration(order):
    h = sample(150, 2.0 / 150, 3.0 / (150 * math.log(150)), RngStream(12))
    csr = h.csr()
    seeds = np.array([3, 7], np.int32)
    assert_same(*both(lambda k: k.closure(h.n, *csr, seeds, h.n + 1, order, RngStream(1).state())))
    assert_same(*both(lambda k: k.explore(h.n, *csr, seeds, h.n)))
    rows = np.array([[0, -1], [1, 2], [5, -1]], np.int32)
    assert_same(*both(lambda k: k.closure_sizes(h.n, *csr, rows, 40)))
    assert_same(*both(lambda k: k.explore_sizes(h.n, *csr, rows, h.n)))


@pytest.mark.parametrize("r", [0.3, 2.0])
def test_connectivity(r):
    h = generate(ModelParams(120, 1.0, r), RngStream(3))
    assert_same(*both(lambda k: k.connectivity_search(h.n, *h.csr()[:5], h.edges2, h.edges3)))


def test_chain_and_binomial():
    p = ModelParams(4096, 0.5, 1.0)
    assert_same(*both(lambda k: k.chain(p.n, p.p2, p.p3, 2, 30, RngStream(8).state())))
    assert_same(*both(lambda k: k.chain_survival(p.n, p.p2, p.p3, 1, 8, np.uint64(5), 300)))
    for m, q in ((7, 0.3), (400, 0.4), (1000, 0.97)):
        assert_same(*both(lambda k: k.binomial_many(m, q, RngStream(m).state(), 2000)))
