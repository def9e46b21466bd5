"""Graph-free active-count chain and exact checks of the two coupling lemmas.

The chain is ``Y_0 = y0``, ``Y_{t+1} = Y_t + Z_t - 1`` with
``Z_t ~ Binomial(n - t - Y_t, p(t))``; it has the law of the exploration's
active count on a random hypergraph without building the graph.

The lemma verifiers never sample: they enumerate outcomes or push exact
distributions forward, with ``fractions.Fraction`` arithmetic whenever the
inputs are rational, so the inequalities are checked with zero tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from numbers import Real
from typing import Callable, Sequence

import numpy as np

from . import _accel
from .model import ModelParams
from .rng import RngStream

__all__ = [
    "ChainTrajectory",
    "FiniteDistribution",
    "EnumerationBudgetExceeded",
    "simulate",
    "survival_prob",
    "sample_binomial",
    "dominates",
    "CycleLemmaReport",
    "verify_cycle_lemma",
    "DominanceCase",
    "DominanceReport",
    "verify_dominance_lemma",
    "default_cycle_suite",
    "default_dominance_suite",
]

DEFAULT_BUDGET = 4**8


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ChainTrajectory:
    y0: int
    ys: np.ndarray
    zs: np.ndarray
    horizon: int

    @property
    def hitting_time(self) -> int | None:
        if self.ys[-1] == 0:
            return int(self.ys.size - 1)
        return None

    @property
    def survived_to(self) -> int:
        return int(self.zs.size)

    @property
    def steps(self) -> list[tuple[int, int, int]]:
        return [(t, int(self.ys[t]), int(self.zs[t])) for t in range(self.zs.size)]


def _probs(params: ModelParams, p2: float | None, p3: float | None) -> tuple[float, float]:
    return (params.p2 if p2 is None else float(p2), params.p3 if p3 is None else float(p3))


def simulate(
    params: ModelParams,
    y0: int,
    horizon: int,
    rng: RngStream,
    *,
    p2: float | None = None,
    p3: float | None = None,
) -> ChainTrajectory:
    """One trajectory, stopped at extinction or after ``horizon`` steps.

    ``p2``/``p3`` override the model's edge probabilities.
    """
    if y0 < 1 or y0 > params.n:
        raise ValueError(f"y0 must lie in [1, n] (got {y0})")
    if not 0 <= horizon <= params.n:
        raise ValueError(f"horizon must lie in [0, n] (got {horizon})")
    q2, q3 = _probs(params, p2, p3)
    ys, zs = _accel.kernels().chain(params.n, q2, q3, int(y0), int(horizon), rng.state())
    return ChainTrajectory(int(y0), ys, zs, int(horizon))


def survival_prob(
    params: ModelParams,
    y0: int,
    horizon: int,
    trials: int,
    rng: RngStream,
    *,
    p2: float | None = None,
    p3: float | None = None,
) -> tuple[float, float]:
    """Fraction of trajectories with ``Y_t > 0`` for every ``t <= horizon``.

    Trial ``i`` draws from ``rng.child(i)``.  Returns the estimate and its
    binomial standard error.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= horizon <= params.n:
        raise ValueError(f"horizon must lie in [0, n] (got {horizon})")
    q2, q3 = _probs(params, p2, p3)
    steps, final = _accel.kernels().chain_survival(
        params.n, q2, q3, int(y0), int(horizon), np.uint64(rng.seed), int(trials)
    )
    alive = (steps == horizon) & (final > 0)
    est = float(alive.mean())
    return est, math.sqrt(est * (1.0 - est) / trials)


def sample_binomial(m: int, p: float, count: int, rng: RngStream) -> np.ndarray:
    """``count`` draws from Binomial(m, p) with the chain's sampler."""
    return _accel.kernels().binomial_many(int(m), float(p), rng.state(), int(count))


# --------------------------------------------------------------- dominance


@dataclass(frozen=True)
class FiniteDistribution:
    """Integer-valued distribution with finite support."""

    support: tuple[int, ...]
    probabilities: tuple[Real, ...]

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probabilities) or not self.support:
            raise ValueError("support and probabilities must be nonempty and of equal length")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValueError("support must be strictly increasing")
        if any(not p > 0 for p in self.probabilities):
            raise ValueError("probabilities must be positive")
        if abs(sum(self.probabilities) - 1) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    @classmethod
    def from_pmf(cls, pmf: dict[int, Real]) -> "FiniteDistribution":
        items = sorted((int(k), v) for k, v in pmf.items() if v > 0)
        return cls(tuple(k for k, _ in items), tuple(v for _, v in items))

    @classmethod
    def binomial(cls, m: int, p: Real) -> "FiniteDistribution":
        """Exact when ``p`` is a ``Fraction``."""
        q = 1 - p
        return cls.from_pmf({k: math.comb(m, k) * p**k * q ** (m - k) for k in range(m + 1)})

    @classmethod
    def uniform(cls, values: Sequence[int]) -> "FiniteDistribution":
        w = Fraction(1, len(values))
        return cls.from_pmf({v: w for v in values})

    def cdf(self, t: float) -> Real:
        total = 0
        for x, p in zip(self.support, self.probabilities):
            if x > t:
                break
            total += p
        return total

    def exact(self) -> "FiniteDistribution":
        """Same distribution with every probability as a ``Fraction``."""
        return FiniteDistribution(self.support, tuple(Fraction(p) for p in self.probabilities))


def dominates(f: FiniteDistribution, g: FiniteDistribution, atol: float = 0.0) -> bool:
    """``F(t) <= G(t)`` at every point of either support (non-strict order).

    With floating-point probabilities pass a small ``atol``; rational inputs
    compare exactly.
    """
    points = sorted(set(f.support) | set(g.support))
    if atol:
        return all(f.cdf(t) <= g.cdf(t) + atol for t in points)
    # no float slack here, so Fraction inputs stay exact
    return all(f.cdf(t) <= g.cdf(t) for t in points)


# -------------------------------------------------------------- cycle lemma


@dataclass(frozen=True)
class CycleLemmaReport:
    name: str
    n: int
    pr_a: Fraction
    pr_b: Fraction

    @property
    def holds(self) -> bool:
        return self.pr_b / self.n <= self.pr_a <= self.pr_b

    def text(self) -> str:
        mark = "ok" if self.holds else "VIOLATED"
        return (
            f"cycle[{self.name}] n={self.n}: Pr(B)/n={float(self.pr_b / self.n):.6f} "
            f"<= Pr(A)={float(self.pr_a):.6f} <= Pr(B)={float(self.pr_b):.6f} {mark}"
        )

    def key_values(self) -> str:
        return (
            f"lemma=cycle name={self.name} n={self.n} pr_a={self.pr_a} "
            f"pr_b={self.pr_b} holds={int(self.holds)}"
        )


def verify_cycle_lemma(
    dist: FiniteDistribution, n: int, budget: int = DEFAULT_BUDGET, name: str = ""
) -> CycleLemmaReport:
    """Enumerate all ``n``-tuples of i.i.d. draws and compute

    ``Pr(A)``: every prefix sum is nonnegative, and
    ``Pr(B)``: the total is nonnegative.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(dist.support) ** n > budget:
        raise EnumerationBudgetExceeded(
            f"{len(dist.support)}^{n} outcomes exceed the budget of {budget}"
        )
    d = dist.exact()
    outcomes = list(zip(d.support, d.probabilities))
    pr_a = Fraction(0)
    pr_b = Fraction(0)
    for tup in product(outcomes, repeat=n):
        prob = Fraction(1)
        s = 0
        prefix_ok = True
        for x, p in tup:
            prob *= p
            s += x
            if s < 0:
                prefix_ok = False
        if s >= 0:
            pr_b += prob
            if prefix_ok:
                pr_a += prob
    return CycleLemmaReport(name or f"support={list(d.support)}", n, pr_a, pr_b)


# ---------------------------------------------------------- dominance lemma


Family = Callable[[int, int], FiniteDistribution]


@dataclass(frozen=True)
class DominanceCase:
    """Two chains ``S_{k+1} = S_k + X_k - q`` and ``T_{k+1} = T_k + Y_k - q``
    from ``S_0 = T_0 = b`` with ``X_k ~ F(k, S_k)``, ``Y_k ~ G(k, T_k)``,
    compared on the event that every ``S_k > thresholds[k-1]``."""

    name: str
    F: Family
    G: Family
    q: int
    b: int
    M: int
    thresholds: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class DominanceReport:
    name: str
    status: str  # "holds", "violated" or "hypotheses unmet"
    pr_s: Fraction | None
    pr_t: Fraction | None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "violated"

    def text(self) -> str:
        if self.pr_s is None:
            return f"dominance[{self.name}]: {self.status} ({self.detail})"
        return (
            f"dominance[{self.name}]: Pr[S>l]={float(self.pr_s):.6f} "
            f">= Pr[T>l]={float(self.pr_t):.6f} {self.status}"
        )

    def key_values(self) -> str:
        return (
            f"lemma=dominance name={self.name} status={self.status.replace(' ', '_')} "
            f"pr_s={self.pr_s} pr_t={self.pr_t}"
        )


def _state_window(case: DominanceCase) -> list[tuple[int, int]]:
    """Per step ``k``, the range of states either chain can occupy."""
    lo = hi = case.b
    out = []
    for k in range(case.horizon):
        out.append((lo, hi))
        zs = range(lo, hi + 1)
        mins = [min(fam(k, z).support[0] for fam in (case.F, case.G)) for z in zs]
        maxs = [max(fam(k, z).support[-1] for fam in (case.F, case.G)) for z in zs]
        lo, hi = lo + min(mins) - case.q, hi + max(maxs) - case.q
    return out


def _check_hypotheses(case: DominanceCase) -> str:
    for k, l in enumerate(case.thresholds, 1):
        if l > case.M - k * case.q:
            return f"threshold l_{k}={l} exceeds M - kq = {case.M - k * case.q}"
    for k, (lo, hi) in enumerate(_state_window(case)):
        for z in range(lo, hi + 1):
            g, g_prev = case.G(k, z), case.G(k, z - 1)
            pts = range(min(g.support[0], g_prev.support[0]) - 2, max(g.support[-1], g_prev.support[-1]) + 2)
            if any(g.cdf(l) > g_prev.cdf(l + 1) for l in pts):
                return f"shift condition fails at k={k}, z={z}"
            if z <= case.M - k * case.q and not dominates(case.F(k, z), g):
                return f"F does not dominate G at k={k}, z={z}"
    return ""


def _survival(family: Family, case: DominanceCase) -> Fraction:
    dist = {case.b: Fraction(1)}
    for k, l in enumerate(case.thresholds):
        nxt: dict[int, Fraction] = {}
        for z, pz in dist.items():
            d = family(k, z).exact()
            for x, px in zip(d.support, d.probabilities):
                z2 = z + x - case.q
                if z2 > l:
                    nxt[z2] = nxt.get(z2, Fraction(0)) + pz * px
        dist = nxt
    return sum(dist.values(), Fraction(0))


def verify_dominance_lemma(case: DominanceCase) -> DominanceReport:
    """Check the hypotheses, then compare both survival probabilities exactly."""
    if case.q < 0:
        raise ValueError("q must be a nonnegative integer")
    if case.horizon > 4 or case.horizon < 1:
        raise EnumerationBudgetExceeded("dominance verifier supports horizons 1..4")
    problem = _check_hypotheses(case)
    if problem:
        return DominanceReport(case.name, "hypotheses unmet", None, None, problem)
    ps = _survival(case.F, case)
    pt = _survival(case.G, case)
    return DominanceReport(case.name, "holds" if ps >= pt else "violated", ps, pt)


# ------------------------------------------------------------ shipped suites


def default_cycle_suite() -> list[tuple[str, FiniteDistribution, int]]:
    suite = []
    for name, values in (("pm1", (-1, 1)), ("m101", (-1, 0, 1))):
        for n in range(2, 7):
            suite.append((name, FiniteDistribution.uniform(values), n))
    suite.append(("point+1", FiniteDistribution((1,), (Fraction(1),)), 5))
    return suite


def _clamped_binomial(m: int, p: Fraction) -> FiniteDistribution:
    return FiniteDistribution.binomial(m, min(max(p, Fraction(0)), Fraction(1)))


def default_dominance_suite() -> list[DominanceCase]:
    half = FiniteDistribution.binomial(2, Fraction(1, 2))
    hi = FiniteDistribution.binomial(2, Fraction(3, 5))
    lo = FiniteDistribution.binomial(2, Fraction(2, 5))

    def g_state(k: int, z: int) -> FiniteDistribution:
        return _clamped_binomial(2, min(Fraction(9, 10), Fraction(3, 10) + Fraction(z, 10)))

    def f_state(k: int, z: int) -> FiniteDistribution:
        p = min(Fraction(9, 10), Fraction(3, 10) + Fraction(z, 10))
        return _clamped_binomial(2, max(p, Fraction(0)) + Fraction(1, 10))

    return [
        DominanceCase("identical", lambda k, z: half, lambda k, z: half, 1, 1, 100, (0, 0, 0)),
        DominanceCase("binomial-p", lambda k, z: hi, lambda k, z: lo, 1, 1, 100, (0, 0, 0)),
        DominanceCase("state-dependent", f_state, g_state, 1, 1, 100, (0, 0, 0)),
    ]
