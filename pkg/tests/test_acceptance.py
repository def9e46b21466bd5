"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N PASS|FAIL`` line (collected again in
the terminal summary).  The statistical ones use fixed seeds, so reruns give
the same verdict.
"""
import math
import time
from collections import defaultdict

import numpy as np
import pytest
from scipy import stats

from hyperprop import _accel
from hyperprop.chain import (
    FiniteDistribution,
    default_cycle_suite,
    default_dominance_suite,
    survival_prob,
    verify_cycle_lemma,
    verify_dominance_lemma,
)
from hyperprop.hypergraph import generate
from hyperprop.model import ModelParams, critical_r, k1, p_of_t, threshold_I, threshold_I_quadrature
from hyperprop.propagation import (
    Order,
    StartMode,
    census,
    closure,
    explore_survival,
    is_propagation_connected,
    oracle_bruteforce,
)
from hyperprop.rng import RngStream

from conftest import random_hypergraph


def pooled_chi2(counts: np.ndarray, expected: np.ndarray, min_expected: float = 5.0):
    """Merge adjacent bins until each expected count reaches ``min_expected``."""
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(counts, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if obs:
            obs[-1] += acc_o
            exp[-1] += acc_e
        else:
            obs, exp = [acc_o], [acc_e]
    obs, exp = np.array(obs), np.array(exp)
    return float(((obs - exp) ** 2 / exp).sum()), len(obs) - 1


def test_c01_threshold_identity(criterion):
    I = threshold_I(1.0, 0.25)
    rc = critical_r(1.0, -2.0)
    ok = abs(I + 2.0) <= 1e-12 and abs(rc - 0.25) <= 1e-9
    criterion(1, "closed-form threshold at eps=1, r=0.25", ok, f"I={I!r}, critical_r={rc!r}")


def test_c02_quadrature_agreement(criterion):
    start = time.perf_counter()
    worst = 0.0
    for i in range(1, 10):
        for j in range(1, 21):
            eps, r = i / 10, j / 10
            worst = max(worst, abs(threshold_I(eps, r) - threshold_I_quadrature(eps, r)))
    secs = time.perf_counter() - start
    criterion(2, "closed form vs quadrature on 9x20 grid", worst <= 1e-8,
              f"max |diff|={worst:.2e} (tol 1e-8), {secs:.2f}s")


def test_c03_oracle_equivalence(criterion):
    gen = np.random.default_rng(20240503)
    agree = connected = 0
    total = 1000
    for _ in range(total):
        n = int(gen.integers(4, 9))
        d2 = gen.choice([0.0, 0.1, 0.25, 0.5])
        d3 = gen.choice([0.05, 0.15, 0.3, 0.6])
        h = random_hypergraph(gen, n, d2, d3)
        fast = is_propagation_connected(h).connected
        agree += fast == oracle_bruteforce(h)
        connected += fast
    criterion(3, "connectivity decision vs brute-force oracle", agree == total,
              f"{agree}/{total} agree ({connected} connected instances)")


def test_c04_confluence(criterion):
    gen = np.random.default_rng(7)
    same = 0
    total = 500
    for i in range(total):
        n = int(gen.integers(3, 65))
        h = random_hypergraph(gen, n, gen.uniform(0, 2.0 / n), gen.uniform(0, 12.0 / n**2))
        width = int(gen.integers(1, 3))
        seed = gen.choice(n, size=width, replace=False)
        sets = {closure(h, seed, order=o, rng=RngStream(i)).marked_set for o in Order}
        same += len(sets) == 1
    criterion(4, "closure independent of firing order", same == total, f"{same}/{total} identical")


@pytest.mark.slow
def test_c05_increment_law(criterion):
    params = ModelParams(512, 0.5, 1.0)
    t_slice, reps = 3, 100_000
    base = RngStream(505)
    k = _accel.kernels()
    start_vertex = np.array([0], np.int32)
    by_y: dict[int, list[int]] = defaultdict(list)
    for i in range(reps):
        h = generate(params, base.child(i))
        _, ys, zs, *_ = k.explore(h.n, *h.csr(), start_vertex, t_slice + 1)
        if zs.size > t_slice:
            by_y[int(ys[t_slice])].append(int(zs[t_slice]))
    p = p_of_t(params, t_slice)
    chi2 = 0.0
    dof = 0
    used = 0
    for y, zs in sorted(by_y.items()):
        m = params.n - t_slice - y
        counts = np.bincount(np.array(zs), minlength=m + 1).astype(float)
        expected = stats.binom.pmf(np.arange(m + 1), m, p) * len(zs)
        s, d = pooled_chi2(counts, expected)
        if d > 0:
            chi2 += s
            dof += d
            used += len(zs)
    pval = float(stats.chi2.sf(chi2, dof)) if dof else float("nan")
    criterion(5, "exploration increments at t=3 are Binomial(n-t-Y_t, p(t))", dof > 0 and pval >= 0.001,
              f"{used} samples over {len(by_y)} Y_3 slices, chi2={chi2:.2f} on {dof} dof, p={pval:.4f}")


@pytest.mark.slow
def test_c06_chain_vs_graph(criterion):
    params = ModelParams(4096, 0.5, 1.0)
    horizon = int(math.floor(math.log(params.n)))
    trials = 10_000
    ce, cse = survival_prob(params, 1, horizon, trials, RngStream(606))
    ge, gse = explore_survival(params, horizon, trials, RngStream(607))
    combined = math.sqrt(cse**2 + gse**2)
    ok = abs(ce - ge) <= 3 * combined
    criterion(6, "chain vs graph survival to floor(ln n)", ok,
              f"chain {ce:.4f}+-{cse:.4f}, graph {ge:.4f}+-{gse:.4f}, "
              f"|diff|={abs(ce - ge):.4f} <= 3*{combined:.4f}={3 * combined:.4f}")


def test_c07_lemma_suites(criterion):
    fair = verify_cycle_lemma(FiniteDistribution.uniform((-1, 1)), 2)
    exact_ok = fair.pr_a == 0.5 and fair.pr_b == 0.75
    cycles = [verify_cycle_lemma(d, n, name=name) for name, d, n in default_cycle_suite()]
    doms = [verify_dominance_lemma(c) for c in default_dominance_suite()]
    ok = exact_ok and all(r.holds for r in cycles) and all(r.status == "holds" for r in doms)
    criterion(7, "cycle and dominance lemma suites (exact)", ok,
              f"Pr(A)={fair.pr_a}, Pr(B)={fair.pr_b} at n=2; {sum(r.holds for r in cycles)}/{len(cycles)} "
              f"cycle cases, {sum(r.status == 'holds' for r in doms)}/{len(doms)} dominance cases hold")


@pytest.mark.slow
def test_c08_subcritical_smallness(criterion):
    params = ModelParams(4096, 1.0, 0.1)
    I = threshold_I(1.0, 0.1)
    bound = k1(params, 2.0 - I) * math.log(params.n)
    graphs, starts = 200, 50
    base = RngStream(808)
    big_runs = 0
    within = 0
    largest = 0
    largest_pair = 0
    for g in range(graphs):
        stream = base.child(g)
        h = generate(params, stream.child(0))
        cen = census(h, params, starts, stream.child(1), mode=StartMode.SINGLE)
        big_runs += int((cen.sizes >= 0.5 * params.n).sum())
        within += cen.max_size <= bound
        largest = max(largest, cen.max_size)
        # p2 = 0 at eps = 1, so single starts stay put; pair starts show the
        # 3-edges do not carry the process far either
        pair = census(h, params, starts, stream.child(2), mode=StartMode.PAIR)
        largest_pair = max(largest_pair, pair.max_size)
    ok = big_runs == 0 and within >= 0.99 * graphs
    criterion(8, "subcritical components stay small (eps=1, r=0.1)", ok,
              f"{big_runs} runs >= n/2, {within}/{graphs} graphs with max <= K1 ln n = {bound:.0f}; "
              f"largest single-start {largest}, largest pair-start {largest_pair}")


@pytest.mark.slow
def test_c09_monotone_transition(criterion):
    n, trials = 16384, 100
    grid = (0.1, 0.25, 0.5, 1.0)
    medians, fractions = [], []
    for j, r in enumerate(grid):
        params = ModelParams(n, 1.0, r)
        base = RngStream(909, j)
        sizes, conn = [], 0
        for t in range(trials):
            res = is_propagation_connected(generate(params, base.child(t)))
            sizes.append(res.max_closure)
            conn += res.connected
        medians.append(float(np.median(sizes)))
        fractions.append(conn / trials)
    monotone = all(b >= a for a, b in zip(medians, medians[1:]))
    gap = fractions[-1] - fractions[0]
    detail = ", ".join(f"r={r}: median {m:g}, connected {f:.2f}" for r, m, f in zip(grid, medians, fractions))
    criterion(9, "larger r gives larger closures and more connectivity", monotone and gap >= 0.3,
              f"{detail}; gap {gap:.2f}")


@pytest.mark.slow
def test_c10_sampler_calibration(criterion):
    params = ModelParams(1000, 0.5, 1.0)
    reps = 10_000
    base = RngStream(1010)
    m2 = np.empty(reps)
    m3 = np.empty(reps)
    for i in range(reps):
        h = generate(params, base.child(i))
        m2[i], m3[i] = h.m2, h.m3
    verdicts = []
    for name, counts, total, p in (
        ("2-edges", m2, math.comb(1000, 2), params.p2),
        ("3-edges", m3, math.comb(1000, 3), params.p3),
    ):
        mean = total * p
        se = math.sqrt(total * p * (1 - p) / reps)
        z = (counts.mean() - mean) / se
        verdicts.append((name, z, counts.mean(), mean))
    ok = all(abs(z) <= 3 for _, z, _, _ in verdicts)
    criterion(10, "edge counts match binomial means", ok,
              "; ".join(f"{nm}: mean {got:.2f} vs {exp:.2f} (z={z:+.2f})" for nm, z, got, exp in verdicts))
