"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately naive (quadrature, enumeration, direct
summation) and shares no code path with the implementations it checks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


def tv_bruteforce(p0, p1) -> float:
    """Total variation as half the L1 distance."""
    return 0.5 * float(np.sum(np.abs(np.asarray(p0) - np.asarray(p1))))


def product_tv(p0, p1, k: int) -> float:
    """TV between k-fold product distributions by full enumeration."""
    p0k, p1k = np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)
    for _ in range(k - 1):
        p0k = np.kron(p0k, p0)
        p1k = np.kron(p1k, p1)
    return float(np.maximum(0.0, p0k - p1k).sum())


def laplace_tv_quadrature(epsilon: float) -> float:
    """TV between Lap(0, 1/eps) and Lap(1, 1/eps) by numeric integration."""

    def density(x, loc):
        return 0.5 * epsilon * math.exp(-epsilon * abs(x - loc))

    # densities cross at the midpoint 1/2
    val, _ = quad(lambda x: density(x, 0.0) - density(x, 1.0), -np.inf, 0.5)
    return val


def gaussian_tv_quadrature(mu: float) -> float:
    """TV between N(0,1) and N(mu,1) by numeric integration."""

    def phi(x):
        return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    val, _ = quad(lambda x: phi(x) - phi(x - mu), -np.inf, mu / 2.0)
    return val


def staircase_density(x: float, gamma: float, epsilon: float) -> float:
    """Staircase noise density with unit sensitivity."""
    a = (1.0 - math.exp(-epsilon)) / (
        2.0 * (gamma + math.exp(-epsilon) * (1.0 - gamma))
    )
    ax = abs(x)
    k = math.floor(ax)
    level = a * math.exp(-k * epsilon)
    if ax - k >= gamma:
        level *= math.exp(-epsilon)
    return level


def staircase_tv_quadrature(gamma: float, epsilon: float) -> float:
    """TV between a staircase density and its unit shift.

    Both densities are piecewise constant, so the integral is an exact sum
    over cells delimited by the breakpoints {n, n + gamma} of each copy;
    the support is truncated once e^{-k eps} drops below 1e-15.
    """
    k_max = int(math.ceil(35.0 / epsilon)) + 2
    points = set()
    for n in range(-k_max - 1, k_max + 2):
        for shift in (0.0, 1.0):
            points.add(n + shift)
            points.add(n + gamma + shift)
            points.add(-n - gamma + shift)
    grid = np.array(sorted(p for p in points if -k_max <= p <= k_max + 1))
    total = 0.0
    for lo, hi in zip(grid[:-1], grid[1:]):
        mid = 0.5 * (lo + hi)
        d = staircase_density(mid, gamma, epsilon) - staircase_density(
            mid - 1.0, gamma, epsilon
        )
        if d > 0.0:
            total += d * (hi - lo)
    return total


def log_slope_integrals(curve) -> tuple[float, float, float]:
    """(kl, kappa2, kappa3) of a piecewise-linear curve by direct
    integration of the log-slope over each segment."""
    xs, ys = curve.xs, curve.ys
    widths = np.diff(xs)
    slopes = np.diff(ys) / widths
    logs = np.log(np.abs(slopes))
    kl = -float(np.sum(widths * logs))
    k2 = float(np.sum(widths * logs**2))
    k3 = float(np.sum(widths * np.abs(logs) ** 3))
    return kl, k2, k3


def random_pair(rng: np.random.Generator, size: int, full_support: bool = False):
    """Random pmf pair via Dirichlet draws; optionally bounded away from 0."""
    if full_support:
        p0 = rng.dirichlet(np.full(size, 2.0)) + 0.01
        p1 = rng.dirichlet(np.full(size, 2.0)) + 0.01
        return p0 / p0.sum(), p1 / p1.sum()
    return rng.dirichlet(np.ones(size)), rng.dirichlet(np.ones(size))
