"""Closed-form quantities of the mixed 2/3-edge random hypergraph model.

The model has ``n`` vertices, every pair present with probability
``p2 = (1 - epsilon) / n`` and every triple with probability
``p3 = r / (n ln n)``.  Everything here is a pure function of
``(n, epsilon, r)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import integrate

__all__ = [
    "InvalidParameters",
    "HorizonError",
    "QuadratureError",
    "ModelParams",
    "Regime",
    "ThresholdReport",
    "p_of_t",
    "lambda_fns",
    "area",
    "threshold_I",
    "threshold_I_quadrature",
    "critical_r",
    "k0",
    "k1",
    "classify",
    "threshold_report",
]

NEAR_CRITICAL_TOL = 0.05


class InvalidParameters(ValueError):
    """A model parameter is outside its domain."""


class HorizonError(ValueError):
    """A time index beyond the number of vertices."""


class QuadratureError(RuntimeError):
    pass


def _check_eps_r(epsilon: float, r: float) -> None:
    if not (0.0 < epsilon <= 1.0) or math.isnan(epsilon):
        raise InvalidParameters(f"epsilon must satisfy 0 < epsilon <= 1 (got {epsilon!r})")
    if not (r > 0.0) or math.isinf(r):
        raise InvalidParameters(f"r must be a positive finite real (got {r!r})")


@dataclass(frozen=True)
class ModelParams:
    """Parameters ``(n, epsilon, r)`` with the derived edge probabilities.

    ``epsilon = 1`` is admitted and gives the pure 3-uniform model (``p2 = 0``).
    """

    n: int
    epsilon: float
    r: float

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidParameters(f"n must be an integer (got {self.n!r})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "r", float(self.r))
        if self.n < 3:
            raise InvalidParameters(f"n must be >= 3 (got {self.n})")
        _check_eps_r(self.epsilon, self.r)
        if not self.p3 < 1.0:
            raise InvalidParameters(f"p3 = r/(n ln n) must be < 1 (got {self.p3!r})")

    @property
    def p2(self) -> float:
        return (1.0 - self.epsilon) / self.n

    @property
    def p3(self) -> float:
        return self.r / (self.n * math.log(self.n))

    @property
    def log_n(self) -> float:
        return math.log(self.n)


def p_of_t(params: ModelParams, t: int) -> float:
    """Activation probability of an unexplored vertex at exploration step ``t``.

    ``p(t) = 1 - (1 - p2)(1 - p3)^t``, with the power taken in the log domain.
    """
    if t < 0:
        raise HorizonError(f"t must be nonnegative (got {t})")
    if t > params.n:
        raise HorizonError(f"t = {t} exceeds the horizon n = {params.n}")
    if t == 0:
        return params.p2
    miss = (1.0 - params.p2) * math.exp(t * math.log1p(-params.p3))
    return 1.0 - miss


def lambda_fns(params: ModelParams, x: float) -> tuple[float, float, float]:
    """The affine helpers ``lambda``, ``lambda_1`` and ``lambda_2`` at ``x``."""
    if x < 0:
        raise ValueError(f"x must be nonnegative (got {x})")
    eps, r = params.epsilon, params.r
    return (1.0 - eps + r * x, 1.0 - eps + 0.5 * r * x, 0.5 * (1.0 - eps) + r * x / 6.0)


def area(epsilon: float) -> float:
    """``eps - eps^2/2 + (1 - eps) ln(1 - eps)``, continuous at ``eps = 1``."""
    if epsilon == 1.0:
        return 0.5
    return epsilon - 0.5 * epsilon * epsilon + (1.0 - epsilon) * math.log1p(-epsilon)


def threshold_I(epsilon: float, r: float) -> float:
    """Closed form of the threshold integral, ``-area(epsilon) / r``."""
    _check_eps_r(epsilon, r)
    return -area(epsilon) / r


def threshold_I_quadrature(epsilon: float, r: float, tol: float = 1e-10) -> float:
    """Threshold integral evaluated by adaptive quadrature.

    Integrates ``1 - lambda(w) + ln lambda(w)`` over ``[0, epsilon/r]``.  At
    ``epsilon = 1`` the integrand has an integrable log singularity at 0; the
    extrapolating Gauss-Kronrod rule never evaluates the endpoint and copes.
    """
    _check_eps_r(epsilon, r)
    if tol <= 0:
        raise ValueError("tol must be positive")
    base = 1.0 - epsilon
    upper = epsilon / r

    def integrand(w: float) -> float:
        lam = base + r * w
        return 1.0 - lam + math.log(lam)

    value, err, info = integrate.quad(
        integrand, 0.0, upper, epsabs=tol, epsrel=tol, limit=500, full_output=True
    )[:3]
    if err > max(tol, tol * abs(value)) * 10:
        raise QuadratureError(
            f"quadrature did not converge for epsilon={epsilon}, r={r}: error estimate {err:.3e}"
        )
    return value


def critical_r(epsilon: float, target: float = -1.0) -> float:
    """The ``r`` at which the threshold integral equals ``target``."""
    if not target < 0:
        raise InvalidParameters(f"target must be negative (got {target!r})")
    _check_eps_r(epsilon, 1.0)
    return area(epsilon) / -target


def _k0(epsilon: float, r: float) -> float:
    return max(1.0, 2.0 * (9.0 + epsilon) / r)


def _k1(epsilon: float, r: float, c: float) -> float:
    kk = _k0(epsilon, r)
    return (math.e - 1.0) * ((1.0 - epsilon) * kk + c * kk * kk / 2.0)


def k0(params: ModelParams) -> float:
    """``max(1, x)`` where ``lambda_1(x) = 10``."""
    return _k0(params.epsilon, params.r)


def k1(params: ModelParams, c: float) -> float:
    return _k1(params.epsilon, params.r, c)


class Regime(enum.Enum):
    SUBCRITICAL = "Subcritical"
    SUPERCRITICAL = "Supercritical"
    NEAR_CRITICAL = "NearCritical"

    def __str__(self) -> str:
        return self.value


def classify(I: float, tol: float = NEAR_CRITICAL_TOL) -> Regime:
    if I < -1.0 - tol:
        return Regime.SUBCRITICAL
    if I > -1.0 + tol:
        return Regime.SUPERCRITICAL
    return Regime.NEAR_CRITICAL


@dataclass(frozen=True)
class ThresholdReport:
    I: float
    regime: Regime
    critical_r: float
    k0: float
    k1: float
    tol: float = NEAR_CRITICAL_TOL

    @property
    def regime_label(self) -> str:
        if self.regime is Regime.NEAR_CRITICAL:
            return f"NearCritical({self.tol:g})"
        return self.regime.value


def threshold_report(
    epsilon: float, r: float, c: float | None = None, tol: float = NEAR_CRITICAL_TOL
) -> ThresholdReport:
    """Threshold value, regime and the constants used by the size bounds.

    ``c`` defaults to ``2 - I``, the value the subcritical argument uses.
    """
    I = threshold_I(epsilon, r)
    cc = 2.0 - I if c is None else c
    return ThresholdReport(
        I=I,
        regime=classify(I, tol),
        critical_r=critical_r(epsilon, -1.0),
        k0=_k0(epsilon, r),
        k1=_k1(epsilon, r, cc),
        tol=tol,
    )
