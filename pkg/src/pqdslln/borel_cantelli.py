"""Deterministic second-moment Borel-Cantelli diagnostics.

Everything here is computed analytically from the copula and the marginal;
Monte Carlo lives in :mod:`pqdslln.simulate`.  The objects of interest are
the threshold-exceedance events A_k = {X_k > k^(1/p)} (upper side) and
B_k = {X_k <= -k^(1/p)} (lower side, identically null for supports above 0),
their exact pairwise joint probabilities, the Renyi-Lamperti pair-sum ratio

    sum_{k,j<=n} P(A_k n A_j) / (sum_{k<=n} P(A_k))^2

with the diagonal convention P(A_k n A_k) = P(A_k), the epsilon-bracket
lower bound that converts joint-survival integrals into joint tail
probabilities, and the ceiling-scaled tail-ratio chain

    1 <= sum_{k<=n} P{eps X > k^(1/p)} / sum_{k<=n} P{X > k^(1/p)}
      <= eps^p + eps^p / sum_{k<=n} P{X > k^(1/p)}.

Double sums use cumulative prefix reductions in fixed index order, so
results are reproducible to well under 1e-12 regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .copulas import GfmCopula, ThetaSchedule
from .errors import DomainError, NumericError, ParameterError, UndefinedRatioError
from .marginals import ParetoMarginal
from .quadrature import adaptive_quad_2d

__all__ = [
    "GfmDependence",
    "EventSystem",
    "BracketCheck",
    "ScaledTailRatio",
    "event_prob",
    "event_probs",
    "pair_event_prob",
    "renyi_lamperti_ratio",
    "renyi_lamperti_ratios",
    "epsilon_bracket_check",
    "scaled_tail_ratio",
]

UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class GfmDependence:
    """Pairwise power-family dependence with a pair-indexed strength schedule."""

    r: float
    s: float
    schedule: ThetaSchedule

    def copula(self, k: int, j: int) -> GfmCopula:
        lo, hi = (k, j) if k < j else (j, k)
        return GfmCopula(theta=self.schedule.theta(lo, hi), r=self.r, s=self.s)


@dataclass(frozen=True)
class EventSystem:
    """Threshold-exceedance event family for one normalising exponent p.

    ``dependence`` is None for independent coordinates.  The lower side is
    vacuous for marginals supported above 0: every probability is exactly 0.
    """

    p: float
    marginal: ParetoMarginal
    dependence: GfmDependence | None = None
    side: str = UPPER

    def __post_init__(self):
        if not 1.0 <= self.p < 2.0:
            raise ParameterError(f"event system requires 1 <= p < 2, got p={self.p!r}")
        if self.side not in (UPPER, LOWER):
            raise ParameterError(f"side must be {UPPER!r} or {LOWER!r}, got {self.side!r}")

    def threshold(self, k: int) -> float:
        return float(k) ** (1.0 / self.p)


def event_prob(es: EventSystem, k: int) -> float:
    """P(A_k) = P{X > k^(1/p)} (upper side) or P(B_k) = P{X <= -k^(1/p)} (lower)."""
    if k < 1:
        raise DomainError(f"event index must be a positive integer, got {k!r}")
    t = es.threshold(k)
    if es.side == UPPER:
        return float(es.marginal.survival(t))
    return float(es.marginal.cdf(-t))


def event_probs(es: EventSystem, n: int) -> np.ndarray:
    """Vector of event probabilities for k = 1..n."""
    if n < 1:
        raise DomainError(f"event count must be positive, got {n!r}")
    t = np.arange(1, n + 1, dtype=float) ** (1.0 / es.p)
    if es.side == UPPER:
        return np.asarray(es.marginal.survival(t), dtype=float)
    return np.asarray(es.marginal.cdf(-t), dtype=float)


def _perturbation_at_thresholds(es: EventSystem, n: int) -> np.ndarray:
    """Factor h_k = F^s (1 - F)^r evaluated at the k-th threshold, k = 1..n."""
    if es.dependence is None:
        return np.zeros(n)
    t = np.arange(1, n + 1, dtype=float) ** (1.0 / es.p)
    sign = 1.0 if es.side == UPPER else -1.0
    f = np.asarray(es.marginal.cdf(sign * t), dtype=float)
    return f**es.dependence.s * (1.0 - f) ** es.dependence.r


def pair_event_prob(es: EventSystem, k: int, j: int) -> float:
    """Exact joint probability of the k-th and j-th events (k != j).

    Uses the survival-form / CDF-form identity of the gap:
    P(A_k n A_j) = P(A_k) P(A_j) + delta(k^(1/p), j^(1/p)), which is at
    least the product for any nonnegative dependence strength.
    """
    if k == j:
        raise DomainError("pair events require k != j")
    pk = event_prob(es, k)
    pj = event_prob(es, j)
    if es.dependence is None:
        return pk * pj
    lo, hi = (k, j) if k < j else (j, k)
    theta = es.dependence.schedule.theta(lo, hi)
    sign = 1.0 if es.side == UPPER else -1.0
    fk = float(es.marginal.cdf(sign * es.threshold(k)))
    fj = float(es.marginal.cdf(sign * es.threshold(j)))
    hk = fk**es.dependence.s * (1.0 - fk) ** es.dependence.r
    hj = fj**es.dependence.s * (1.0 - fj) ** es.dependence.r
    return pk * pj + theta * hk * hj


def renyi_lamperti_ratios(es: EventSystem, ns) -> np.ndarray:
    """Pair-sum ratio at each requested n (diagonal terms enter as P(A_k)).

    For the power schedule the dependent part of the double sum is separable,
    so the whole grid costs one pass of cumulative sums up to max(ns).
    """
    ns = np.asarray(ns, dtype=int)
    if ns.size == 0 or np.any(ns < 1):
        raise DomainError("ratio grid must contain positive integers")
    n_max = int(ns.max())
    probs = event_probs(es, n_max)
    s1 = np.cumsum(probs)
    s2 = np.cumsum(probs * probs)
    if es.dependence is None:
        dep = np.zeros(n_max)
    else:
        h = _perturbation_at_thresholds(es, n_max)
        idx = np.arange(1, n_max + 1, dtype=float)
        k_part = idx**es.dependence.schedule.mu * h
        j_part = idx**es.dependence.schedule.nu * h
        prefix = np.cumsum(k_part) - k_part
        dep = 2.0 * np.cumsum(j_part * prefix)
    denom = s1[ns - 1]
    if np.any(denom <= 0.0):
        raise UndefinedRatioError("all event probabilities vanish; the pair-sum ratio is undefined")
    numer = s1[ns - 1] + s1[ns - 1] ** 2 - s2[ns - 1] + dep[ns - 1]
    return numer / denom**2


def renyi_lamperti_ratio(es: EventSystem, n: int) -> float:
    """Pair-sum ratio at a single n."""
    return float(renyi_lamperti_ratios(es, [n])[0])


class BracketCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool
    quad_error: float


def _joint_survival_fn(es: EventSystem, k: int, j: int):
    """P{X_k > x, X_j > y} as a broadcastable function of (x, y)."""
    marginal = es.marginal
    if es.dependence is None:

        def fn(x, y):
            return np.asarray(marginal.survival(x)) * np.asarray(marginal.survival(y))

        return fn
    lo, hi = (k, j) if k < j else (j, k)
    copula = GfmCopula(theta=es.dependence.schedule.theta(lo, hi), r=es.dependence.r, s=es.dependence.s)

    def fn(x, y):
        sx = np.asarray(marginal.survival(x))
        sy = np.asarray(marginal.survival(y))
        fx = 1.0 - sx
        fy = 1.0 - sy
        return sx * sy + copula.perturbation_factor(fx) * copula.perturbation_factor(fy) * copula.theta

    return fn


def _segments(lo: float, hi: float, cut: float) -> list[tuple[float, float]]:
    """Split [lo, hi] at an interior kink point."""
    if lo < cut < hi:
        return [(lo, cut), (cut, hi)]
    return [(lo, hi)]


def epsilon_bracket_check(
    es: EventSystem, k: int, j: int, eps: float, *, abs_tol: float = 1e-9
) -> BracketCheck:
    """Check the bracket inequality for one pair and one eps > 1.

    lhs  = integral of the joint survival over
           [k^(1/p)/eps, k^(1/p)] x [j^(1/p)/eps, j^(1/p)]
    rhs  = ((eps-1)/eps)^2 k^(1/p) j^(1/p) P(A_k n A_j)

    holds is lhs >= rhs - 1e-9; the joint survival dominates the joint tail
    probability on the whole bracket, so the inequality is exact.
    """
    if k == j:
        raise DomainError("bracket check requires k != j")
    if not eps > 1.0:
        raise DomainError(f"bracket check requires eps > 1, got {eps!r}")
    xk, xj = es.threshold(k), es.threshold(j)
    fn = _joint_survival_fn(es, k, j)
    cut = es.marginal.support_min
    pieces = []
    errors = []
    for x0, x1 in _segments(xk / eps, xk, cut):
        for y0, y1 in _segments(xj / eps, xj, cut):
            val, err = adaptive_quad_2d(fn, x0, x1, y0, y1, abs_tol=abs_tol / 4.0)
            pieces.append(val)
            errors.append(err)
    lhs = math.fsum(pieces)
    quad_error = math.fsum(errors)
    rhs = ((eps - 1.0) / eps) ** 2 * xk * xj * pair_event_prob(es, k, j)
    return BracketCheck(lhs=lhs, rhs=rhs, holds=bool(lhs >= rhs - 1e-9), quad_error=quad_error)


class ScaledTailRatio(NamedTuple):
    ratio: float
    lower: float
    upper: float


def scaled_tail_ratio(es: EventSystem, eps: float, n: int) -> ScaledTailRatio:
    """Ratio of scaled to unscaled tail sums together with its sandwich bounds.

    ratio = sum_{k<=n} P{eps X > k^(1/p)} / sum_{k<=n} P{X > k^(1/p)}; the
    chain gives 1 <= ratio <= eps^p + eps^p / sum_{k<=n} P{X > k^(1/p)}.
    """
    if not eps > 1.0:
        raise DomainError(f"tail-ratio chain requires eps > 1, got {eps!r}")
    if n < 1:
        raise DomainError(f"tail-ratio chain requires n >= 1, got {n!r}")
    t = np.arange(1, n + 1, dtype=float) ** (1.0 / es.p)
    denom = math.fsum(np.asarray(es.marginal.survival(t), dtype=float))
    if denom <= 0.0:
        raise UndefinedRatioError("unscaled tail sum vanishes; the ratio is undefined")
    numer = math.fsum(np.asarray(es.marginal.survival(t / eps), dtype=float))
    ratio = numer / denom
    upper = eps**es.p + eps**es.p / denom
    if not (1.0 - 1e-12 <= ratio <= upper * (1.0 + 1e-12)):
        raise NumericError(
            f"tail-ratio chain violated: ratio={ratio!r} outside [1, {upper!r}]"
        )
    return ScaledTailRatio(ratio=ratio, lower=1.0, upper=upper)
