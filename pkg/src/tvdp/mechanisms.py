"""Concrete mechanisms: dominating pairs, Laplace, Gaussian, and staircase.

The dominating constructions realize a target (epsilon, delta, eta) budget
with equality, which makes them the worst case for composition.  For the
additive-noise mechanisms only their closed-form total variation (and, for
the Gaussian, the delta(epsilon) profile) is needed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, log_ndtr

from .curves import PrivacyBudget, TradeoffCurve, curve_from_budget
from .divergences import DiscretePair
from .errors import ValidationError


@dataclass(frozen=True)
class DominatingSpec:
    """Parameters of a dominating mechanism: the DP pair plus the probability
    alpha parked on the uninformative symbol."""

    epsilon: float
    delta: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha must lie in [0, 1]")

    @classmethod
    def from_budget(cls, budget: PrivacyBudget) -> "DominatingSpec":
        """Spec realizing the budget with equality; eta = delta maps to
        alpha = 1 for any epsilon (all non-delta mass uninformative)."""
        if budget.eta < budget.delta:
            raise ValidationError(
                "eta must be at least delta for a dominating mechanism"
            )
        if budget.eta == budget.delta:
            alpha = 1.0
        else:
            alpha = alpha_from_budget(budget)
        return cls(budget.epsilon, budget.delta, alpha)


@dataclass(frozen=True)
class GaussianParams:
    """Gaussian mechanism summarized by mu = sensitivity / sigma."""

    mu: float

    def __post_init__(self):
        if not (self.mu >= 0.0 and math.isfinite(self.mu)):
            raise ValidationError("mu must be finite and >= 0")


@dataclass(frozen=True)
class StaircaseSpec:
    """Staircase noise: step-width fraction gamma, privacy epsilon, sensitivity."""

    gamma: float
    epsilon: float
    sensitivity: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValidationError("gamma must be positive")
        if self.epsilon <= 0.0:
            raise ValidationError("epsilon must be positive")
        if self.sensitivity <= 0.0:
            raise ValidationError("sensitivity must be positive")

    @property
    def a_gamma(self) -> float:
        """Normalizing density value on the innermost step."""
        q = math.exp(-self.epsilon)
        return (1.0 - q) / (2.0 * self.sensitivity * (self.gamma + q * (1.0 - self.gamma)))


def _mu(params) -> float:
    return params.mu if isinstance(params, GaussianParams) else float(params)


def alpha_from_budget(budget: PrivacyBudget) -> float:
    """Uninformative-symbol mass realizing the budget with equality.

    alpha = 1 - (eta - delta)(1 + e^eps) / ((1 - delta)(e^eps - 1)),
    restricted to eps > 0 and delta <= eta <= feasibility cap.
    """
    eps, delta, eta = budget.epsilon, budget.delta, budget.eta
    if eps <= 0.0:
        raise ValidationError("alpha is undefined at epsilon = 0")
    if eta < delta:
        raise ValidationError("eta must be at least delta for a dominating mechanism")
    if eta > budget.tv_cap + 1e-12:
        raise ValidationError("eta exceeds delta + (1-delta)(e^eps-1)/(e^eps+1)")
    if delta >= 1.0:
        return 1.0
    alpha = 1.0 - (eta - delta) / ((1.0 - delta) * math.tanh(eps / 2.0))
    if alpha < 1e-12:  # eta at its cap up to float noise
        return 0.0
    if alpha > 1.0 - 1e-12:
        return 1.0
    return alpha


def dominating_pure(epsilon: float, eta: float) -> DiscretePair:
    """Three-symbol pair meeting (epsilon, 0)-DP and eta-TV with equality.

    P0 = [(1-a) e^eps/(1+e^eps), a, (1-a)/(1+e^eps)] with the mirror image
    for P1, where a = 1 - eta (e^eps+1)/(e^eps-1).
    """
    if epsilon < 0.0:
        raise ValidationError("epsilon must be >= 0")
    if epsilon == 0.0:
        if eta != 0.0:
            raise ValidationError("epsilon = 0 forces eta = 0")
        alpha = 1.0
    else:
        cap = math.tanh(epsilon / 2.0)
        if not -1e-15 <= eta <= cap + 1e-12:
            raise ValidationError("eta exceeds (e^eps-1)/(e^eps+1)")
        alpha = min(1.0, max(0.0, 1.0 - max(eta, 0.0) / cap))
        if alpha < 1e-12:
            alpha = 0.0
    hi = (1.0 - alpha) * expit(epsilon)
    lo = (1.0 - alpha) * expit(-epsilon)
    p0 = np.array([hi, alpha, lo])
    return DiscretePair(p0, p0[::-1].copy())


def dominating_approx(budget: PrivacyBudget) -> DiscretePair:
    """Five-symbol pair meeting (epsilon, delta)-DP and eta-TV with equality.

    Outer symbols carry the delta mass one-sidedly; the inner three symbols
    reproduce the pure construction scaled by (1 - delta).  Requires
    eta >= delta; at epsilon = 0 only eta = delta is representable.
    """
    spec = DominatingSpec.from_budget(budget)
    eps, delta, alpha = spec.epsilon, spec.delta, spec.alpha
    hi = (1.0 - delta) * (1.0 - alpha) * expit(eps)
    lo = (1.0 - delta) * (1.0 - alpha) * expit(-eps)
    p0 = np.array([delta, hi, alpha * (1.0 - delta), lo, 0.0])
    return DiscretePair(p0, p0[::-1].copy())


def laplace_tv(epsilon: float) -> float:
    """Total variation of the Laplace mechanism: 1 - e^{-eps/2}."""
    if epsilon <= 0.0:
        raise ValidationError("epsilon must be positive")
    return -math.expm1(-epsilon / 2.0)


def gaussian_delta(params, epsilon: float) -> float:
    """delta(eps) profile of a mu-GDP mechanism.

    Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2), evaluated through
    log-CDFs so the near-cancellation at large eps stays accurate.
    mu = 0 gives perfect privacy, hence 0 by continuity.
    """
    mu = _mu(params)
    if mu < 0.0:
        raise ValidationError("mu must be >= 0")
    if epsilon < 0.0:
        raise ValidationError("epsilon must be >= 0")
    if mu == 0.0:
        return 0.0
    log_a = float(log_ndtr(-epsilon / mu + mu / 2.0))
    log_b = epsilon + float(log_ndtr(-epsilon / mu - mu / 2.0))
    if log_b >= log_a:
        return 0.0
    return max(0.0, -math.exp(log_a) * math.expm1(log_b - log_a))


def gaussian_tv(params) -> float:
    """Total variation of a mu-GDP mechanism: 2 Phi(mu/2) - 1."""
    return gaussian_delta(params, 0.0)


def staircase_tv(spec: StaircaseSpec) -> float:
    """Total variation of the staircase mechanism (two branches, continuous
    at gamma = 1/2)."""
    gamma, q = spec.gamma, math.exp(-spec.epsilon)
    den = 2.0 * (gamma + q * (1.0 - gamma))
    if gamma < 0.5:
        return (1.0 - q) * (2.0 * gamma * (1.0 - q) + q) / den
    return (1.0 - q) / den


def staircase_gamma_for_alpha(epsilon: float, alpha: float) -> float:
    """Step width whose staircase matches the dominating mechanism with the
    given uninformative mass: solves staircase_tv = (1-alpha) tanh(eps/2).

    The TV is increasing on (0, 1/2] and decreasing on [1/2, inf); the
    narrow-step branch is preferred when it contains a solution.
    """
    if epsilon <= 0.0:
        raise ValidationError("epsilon must be positive")
    if not 0.0 <= alpha < 1.0:
        raise ValidationError("alpha must lie in [0, 1)")
    target = (1.0 - alpha) * math.tanh(epsilon / 2.0)
    max_tv = math.tanh(epsilon / 2.0)
    if target > max_tv + 1e-12:
        raise ValidationError("target total variation exceeds the staircase maximum")
    if alpha == 0.0:
        return 0.5

    def resid(g):
        return staircase_tv(StaircaseSpec(g, epsilon)) - target

    q = math.exp(-epsilon)
    tv_at_zero = (1.0 - q) / 2.0
    if target >= tv_at_zero:
        root = brentq(resid, 1e-300, 0.5, xtol=1e-15, rtol=8.9e-16)
    else:
        hi = 1.0
        while staircase_tv(StaircaseSpec(hi, epsilon)) > target:
            hi *= 2.0
        root = brentq(resid, 0.5, hi, xtol=1e-12, rtol=8.9e-16)
    if abs(resid(root)) > 1e-10:
        raise ValidationError("staircase solve did not reach the 1e-10 TV tolerance")
    return float(root)


def staircase_curve(spec: StaircaseSpec) -> TradeoffCurve:
    """Tradeoff curve of the staircase mechanism.

    The two deterministic threshold tests give the curve's kinks; chords
    between them (randomized tests) complete it, which is exactly the
    (epsilon, 0)-DP eta-TV boundary at eta = staircase_tv(spec).
    """
    return curve_from_budget(PrivacyBudget(spec.epsilon, 0.0, staircase_tv(spec)))
