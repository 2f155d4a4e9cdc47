"""Exact k-fold composition under joint (epsilon, delta, eta) constraints.

The composed guarantee is a family of (j*eps, delta'_j) statements for
j = 0..k plus the composed total variation.  All sums run in log space:
binomials go through log-gamma, and every bracket e^x - e^y is evaluated
in the cancellation-free form e^y(e^{x-y} - 1) with x > y.  A brute-force
oracle (the k-fold product of a dominating pair) and a type-class
approximation cross-check the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .curves import (
    _MAX_LOG_SLOPE,
    PrivacyBudget,
    TradeoffCurve,
    _roc_from_atoms,
    _upper_envelope,
    curve_from_pair,
)
from .divergences import DiscretePair
from .errors import CapacityError, ValidationError
from .mechanisms import DominatingSpec

_DIRECT_LIMIT = 10**7
_TYPED_LIMIT = 10**4


@dataclass(frozen=True)
class LedgerEntry:
    """One composed DP statement: (epsilon_j, delta_j) at level j.

    ``log_one_minus_delta`` preserves log(1 - delta_j) so that curve
    intercepts survive when delta_j rounds to 1 in double precision.
    """

    j: int
    epsilon: float
    delta: float
    clamped: bool = False
    log_one_minus_delta: float | None = None


@dataclass(frozen=True)
class CompositionLedger:
    """Family of composed DP statements plus the composed total variation."""

    k: int
    base: PrivacyBudget
    entries: tuple[LedgerEntry, ...]
    composed_eta: float
    method: str = "exact"

    def __post_init__(self):
        deltas = [e.delta for e in self.entries]
        if any(not 0.0 <= d <= 1.0 for d in deltas):
            raise ValidationError("ledger deltas must lie in [0, 1]")
        if any(b > a + 1e-9 for a, b in zip(deltas, deltas[1:])):
            raise ValidationError("ledger deltas must be non-increasing in j")

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "entries": [
                {"j": e.j, "eps": e.epsilon, "delta": e.delta} for e in self.entries
            ],
            "eta": self.composed_eta,
        }


def _check_k(k) -> int:
    if not float(k).is_integer() or k < 1:
        raise ValueError("k must be an integer >= 1")
    return int(k)


def _validate_composable(budget: PrivacyBudget):
    if budget.eta < budget.delta:
        raise ValidationError("composition requires eta >= delta")
    if budget.epsilon == 0.0 and budget.eta > budget.delta:
        raise ValidationError("epsilon = 0 composes only with eta = delta")


def _log_binom(n, r):
    n = np.asarray(n, dtype=float)
    r = np.asarray(r, dtype=float)
    return gammaln(n + 1.0) - gammaln(r + 1.0) - gammaln(n - r + 1.0)


def _log_expm1(x):
    """log(e^x - 1) for x > 0, stable at both ends."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = x > 33.0
    out[big] = x[big] + np.log1p(-np.exp(-x[big]))
    with np.errstate(divide="ignore"):
        out[~big] = np.log(np.expm1(x[~big]))
    return out


def _log1m_exp(log_p: float) -> float:
    """log(1 - e^L) for L <= 0."""
    if log_p >= 0.0:
        return -math.inf
    if log_p > -math.log(2.0):
        return math.log(-math.expm1(log_p))
    return math.log1p(-math.exp(log_p))


def _wrap_entries(k: int, eps: float, delta: float, log_delta_j: dict[int, float]):
    """Apply the 1 - (1-delta)^k (1-delta_j) wrapper to raw inner sums.

    Inner sums carry ~k ulps of log-space rounding; a delta_j within that
    noise of 1 is pinned to exactly 1 (and flagged) so the curve never
    reports privacy that is only accumulated float error.
    """
    log_keep = k * math.log1p(-delta) if delta < 1.0 else -math.inf
    noise_floor = -4e-16 * k
    entries = []
    for j in sorted(log_delta_j):
        log_dj = min(log_delta_j[j], 0.0)
        pinned = log_dj >= noise_floor and log_dj > -math.inf
        raw = -math.inf if pinned else log_keep + _log1m_exp(log_dj)
        dp = -math.expm1(raw)
        entries.append(
            LedgerEntry(
                j,
                j * eps,
                min(dp, 1.0),
                clamped=pinned or dp > 1.0,
                log_one_minus_delta=raw,
            )
        )
    return tuple(entries)


def _exact_log_delta(k: int, j: int, eps: float, alpha: float) -> float:
    """Inner sum of the composition formula for one j, in log space."""
    a_hi = k - j - 1
    if a_hi < 0:
        return -math.inf
    if alpha >= 1.0:
        return -math.inf
    log_base = math.log1p(-alpha) - np.logaddexp(0.0, eps)
    a_vals = np.array([0]) if alpha == 0.0 else np.arange(a_hi + 1)
    counts = (k - j - a_vals + 1) // 2  # ceil((k-j-a)/2), >= 1 in range
    a_rep = np.repeat(a_vals, counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    l_arr = np.arange(int(counts.sum())) - np.repeat(offsets, counts)
    logs = (
        _log_binom(k, a_rep)
        + _log_binom(k - a_rep, l_arr)
        + (k - a_rep) * log_base
        + _log_expm1(eps * (k - 2 * l_arr - a_rep - j))
        + eps * (l_arr + j)
    )
    if alpha > 0.0:
        logs = logs + np.where(a_rep == 0, 0.0, a_rep * math.log(alpha))
    return float(logsumexp(logs))


def compose_exact(budget: PrivacyBudget, k: int) -> CompositionLedger:
    """Exact k-fold adaptive composition of the budget's mechanism class.

    delta_j is the double sum over uninformative-symbol counts a and
    minority-symbol counts l; empty ranges contribute nothing, so j = k
    always yields the raw (k*eps, wrapper-only) statement.
    """
    k = _check_k(k)
    _validate_composable(budget)
    eps, delta = budget.epsilon, budget.delta
    alpha = DominatingSpec.from_budget(budget).alpha
    log_delta_j = {j: _exact_log_delta(k, j, eps, alpha) for j in range(k + 1)}
    entries = _wrap_entries(k, eps, delta, log_delta_j)
    return CompositionLedger(
        k=k,
        base=budget,
        entries=entries,
        composed_eta=entries[0].delta,
        method="exact",
    )


def compose_kairouz(epsilon: float, delta: float, k: int) -> CompositionLedger:
    """Baseline composition that ignores total variation.

    Only levels j with the same parity as k appear; the composed eta is
    read off the resulting envelope since the j = 0 statement exists only
    for even k.
    """
    k = _check_k(k)
    if epsilon < 0.0:
        raise ValidationError("epsilon must be >= 0")
    if not 0.0 <= delta <= 1.0:
        raise ValidationError("delta must lie in [0, 1]")
    log_norm = k * np.logaddexp(0.0, epsilon)
    log_delta_j: dict[int, float] = {}
    for j in range(k % 2, k + 1, 2):
        n_terms = (k - j) // 2
        if n_terms == 0:
            log_delta_j[j] = -math.inf
            continue
        l_arr = np.arange(n_terms)
        logs = (
            _log_binom(k, l_arr)
            + _log_expm1(epsilon * (k - 2 * l_arr - j))
            + epsilon * (l_arr + j)
            - log_norm
        )
        log_delta_j[j] = float(logsumexp(logs))
    entries = _wrap_entries(k, epsilon, delta, log_delta_j)
    curve = _entries_to_curve(entries)
    return CompositionLedger(
        k=k,
        base=PrivacyBudget.from_dp(epsilon, delta),
        entries=entries,
        composed_eta=curve.tv(),
        method="kairouz",
    )


def _entries_to_curve(entries) -> TradeoffCurve:
    slopes = [0.0]
    intercepts = [0.0]
    for e in entries:
        # the log form keeps intercepts alive once delta_j rounds to 1
        if e.log_one_minus_delta is not None:
            shift = math.exp(e.log_one_minus_delta)
        else:
            shift = 1.0 - e.delta
        slopes.append(-math.exp(min(e.epsilon, _MAX_LOG_SLOPE)))
        intercepts.append(shift)
        down = math.exp(-e.epsilon)  # underflow to 0 is the harmless flat line
        slopes.append(-down)
        intercepts.append(shift * down)
    return _upper_envelope(slopes, intercepts)


def ledger_to_curve(ledger: CompositionLedger) -> TradeoffCurve:
    """Envelope of the two half-plane constraints of every ledger entry."""
    return _entries_to_curve(ledger.entries)


def composed_tv(budget: PrivacyBudget, k: int) -> float:
    """Total variation after k-fold composition: 1 - (1-delta)^k (1-delta_0)."""
    return compose_exact(budget, k).composed_eta


# ---------------------------------------------------------------------------
# Brute-force oracle: the k-fold product of an explicit pair.


def _support_reduced(pair: DiscretePair):
    keep = (pair.p0 > 0.0) | (pair.p1 > 0.0)
    return pair.p0[keep], pair.p1[keep]


def _lattice_structure(p0: np.ndarray, p1: np.ndarray):
    """Decompose a pair into one-sided masses plus finite log-ratios on a
    common grid; returns None when the ratios are not commensurate."""
    finite = (p0 > 0.0) & (p1 > 0.0)
    d0 = float(p0[(p0 > 0.0) & (p1 <= 0.0)].sum())
    d1 = float(p1[(p1 > 0.0) & (p0 <= 0.0)].sum())
    lam = np.log(p0[finite]) - np.log(p1[finite])
    nonzero = np.abs(lam) > 1e-12
    if not np.any(nonzero):
        base = 0.0
        offsets = np.zeros(lam.size, dtype=int)
    else:
        base = float(np.min(np.abs(lam[nonzero])))
        ratio = lam / base
        offsets = np.round(ratio).astype(int)
        if np.any(np.abs(lam - offsets * base) > 1e-9 * np.maximum(1.0, np.abs(lam))):
            return None
    return base, offsets, p0[finite], p1[finite], d0, d1


def _conv_power(kernel: np.ndarray, k: int) -> np.ndarray:
    """k-fold self-convolution by binary exponentiation (non-negative, exact)."""
    result = None
    power = kernel
    n = k
    while n:
        if n & 1:
            result = power.copy() if result is None else np.convolve(result, power)
        n >>= 1
        if n:
            power = np.convolve(power, power)
    return result


def _oracle_typed(p0, p1, k: int) -> TradeoffCurve:
    lattice = _lattice_structure(p0, p1)
    if lattice is None:
        raise CapacityError(
            "pair log-ratios do not lie on a common grid; use mode='direct'"
        )
    base, offsets, f0, f1, d0, d1 = lattice
    if offsets.size:
        shift = int(offsets.min())
        span = int(offsets.max()) - shift
        q0 = np.zeros(span + 1)
        q1 = np.zeros(span + 1)
        np.add.at(q0, offsets - shift, f0)
        np.add.at(q1, offsets - shift, f1)
        w0 = _conv_power(q0, k)
        w1 = _conv_power(q1, k)
        ms = (np.arange(w0.size) + k * shift).astype(float)
        lr = ms * base if base > 0.0 else np.zeros_like(ms)
    else:
        w0 = np.array([])
        w1 = np.array([])
        lr = np.array([])
    mass0 = list(w0)
    mass1 = list(w1)
    ratios = list(lr)
    if d0 > 0.0:
        mass0.append(-math.expm1(k * math.log1p(-d0)))
        mass1.append(0.0)
        ratios.append(math.inf)
    if d1 > 0.0:
        mass0.append(0.0)
        mass1.append(-math.expm1(k * math.log1p(-d1)))
        ratios.append(-math.inf)
    return _roc_from_atoms(mass0, mass1, ratios)


def _oracle_direct(p0, p1, k: int) -> TradeoffCurve:
    p0k, p1k = p0, p1
    for _ in range(k - 1):
        p0k = np.kron(p0k, p0)
        p1k = np.kron(p1k, p1)
    return curve_from_pair(DiscretePair(p0k, p1k))


def oracle_compose(pair: DiscretePair, k: int, mode: str = "auto") -> TradeoffCurve:
    """Exact tradeoff curve of the k-fold product of ``pair``.

    direct mode enumerates all alphabet^k outcomes (capped at 10^7); typed
    mode collapses outcomes with equal likelihood ratio, which requires the
    finite log-ratios to sit on a common grid (true for dominating pairs)
    and supports k up to 10^4.
    """
    k = _check_k(k)
    p0, p1 = _support_reduced(pair)
    direct_ok = k * math.log(max(2, p0.size)) <= math.log(_DIRECT_LIMIT)
    if mode == "auto":
        if direct_ok:
            mode = "direct"
        elif _lattice_structure(p0, p1) is not None and k <= _TYPED_LIMIT:
            mode = "typed"
        else:
            raise CapacityError(
                "product too large for mode='direct' and pair not collapsible "
                "for mode='typed'"
            )
    if mode == "direct":
        if not direct_ok:
            raise CapacityError(
                f"alphabet^k exceeds {_DIRECT_LIMIT}; use mode='typed'"
            )
        return _oracle_direct(p0, p1, k)
    if mode == "typed":
        if k > _TYPED_LIMIT:
            raise CapacityError(f"typed mode supports k <= {_TYPED_LIMIT}")
        return _oracle_typed(p0, p1, k)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Method-of-types approximation of the exact ledger.

_STIRLING_LOG_2PI = math.log(2.0 * math.pi)


def _log_factorials(k: int, tol: float) -> np.ndarray:
    """Table of log n! for n = 0..k.

    Entries below a tolerance-derived threshold are exact log-gamma values;
    the rest use the Stirling series through the n^-5 term, whose remainder
    1/(1680 n^7) keeps every class probability within the requested
    relative tolerance.
    """
    n_exact = max(8, math.ceil((8.0 / (1680.0 * tol)) ** (1.0 / 7.0)))
    n = np.arange(k + 1, dtype=float)
    out = np.empty(k + 1)
    small = n < n_exact
    out[small] = gammaln(n[small] + 1.0)
    nb = n[~small]
    out[~small] = (
        nb * np.log(nb)
        - nb
        + 0.5 * (np.log(nb) + _STIRLING_LOG_2PI)
        + 1.0 / (12.0 * nb)
        - 1.0 / (360.0 * nb**3)
        + 1.0 / (1260.0 * nb**5)
    )
    return out


def compose_types_approx(
    budget: PrivacyBudget, k: int, tol: float = 1e-6
) -> CompositionLedger:
    """Composition ledger via type classes with Stirling-corrected log masses.

    All (a, l) classes are binned by their composed log-likelihood-ratio
    level m, so the whole ledger costs O(k^2) instead of O(k^3); entrywise
    relative agreement with compose_exact is within ``tol`` by the choice
    of the exact-count threshold.
    """
    k = _check_k(k)
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    _validate_composable(budget)
    eps, delta = budget.epsilon, budget.delta
    alpha = DominatingSpec.from_budget(budget).alpha

    log_w = np.full(2 * k + 1, -np.inf)  # index m + k for m = n0 - l
    if alpha >= 1.0:
        log_w[k] = 0.0
    else:
        lf = _log_factorials(k, tol)
        log_p00 = math.log1p(-alpha) + eps - float(np.logaddexp(0.0, eps))
        log_p02 = math.log1p(-alpha) - float(np.logaddexp(0.0, eps))
        a_iter = (0,) if alpha == 0.0 else range(k + 1)
        for a in a_iter:
            l_arr = np.arange(k - a + 1)
            n0 = k - a - l_arr
            log_mass = lf[k] - lf[a] - lf[l_arr] - lf[n0] + n0 * log_p00 + l_arr * log_p02
            if a:
                log_mass = log_mass + a * math.log(alpha)
            idx = n0 - l_arr + k  # distinct within a fixed a
            log_w[idx] = np.logaddexp(log_w[idx], log_mass)

    # delta_j = sum_{m > j} W(m) (1 - e^{(j-m) eps}); every term positive.
    with np.errstate(divide="ignore"):
        log_gap = np.log(-np.expm1(-eps * np.arange(1, k + 1, dtype=float)))
    log_delta_j: dict[int, float] = {}
    for j in range(k + 1):
        tail = log_w[k + j + 1 :]
        if tail.size == 0 or np.all(np.isinf(tail)):
            log_delta_j[j] = -math.inf
            continue
        log_delta_j[j] = float(logsumexp(tail + log_gap[: k - j]))
    entries = _wrap_entries(k, eps, delta, log_delta_j)
    return CompositionLedger(
        k=k,
        base=budget,
        entries=entries,
        composed_eta=entries[0].delta,
        method="types",
    )
