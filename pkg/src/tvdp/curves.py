"""Tradeoff-curve algebra for joint (epsilon, delta, eta) privacy guarantees.

A tradeoff curve maps a bound t on the type I error of a binary
distinguishing test to the smallest achievable type II error f(t).  A
privacy guarantee corresponds to the region on or above such a curve, so
stronger guarantees mean higher curves.  Everything here is piecewise
linear and convex: curves are stored as vertex lists, constructions are
exact, and region intersection reduces to an upper envelope of the
supporting lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergences import DiscretePair
from .errors import ValidationError

# Absolute tolerance for geometric predicates (vertex checks, convexity).
GEOM_TOL = 1e-9

# Slopes steeper than -exp(_MAX_LOG_SLOPE) are capped; such lines only matter
# on an interval of width below 1e-304 next to t = 0.
_MAX_LOG_SLOPE = 700.0


def tv_feasibility_cap(epsilon: float, delta: float) -> float:
    """Largest total variation consistent with an (epsilon, delta)-DP guarantee."""
    return delta + (1.0 - delta) * math.tanh(epsilon / 2.0)


@dataclass(frozen=True)
class PrivacyBudget:
    """Joint privacy parameters: epsilon (nats), delta, and total variation eta."""

    epsilon: float
    delta: float
    eta: float

    def __post_init__(self):
        if not (self.epsilon >= 0.0 and math.isfinite(self.epsilon)):
            raise ValidationError("epsilon must be finite and >= 0")
        if not 0.0 <= self.delta <= 1.0:
            raise ValidationError("delta must lie in [0, 1]")
        if not 0.0 <= self.eta <= 1.0:
            raise ValidationError("eta must lie in [0, 1]")
        if self.eta > self.tv_cap + 1e-12:
            raise ValidationError(
                "eta exceeds delta + (1-delta)(e^eps-1)/(e^eps+1)"
            )

    @property
    def tv_cap(self) -> float:
        """Feasibility ceiling for eta at this (epsilon, delta)."""
        return tv_feasibility_cap(self.epsilon, self.delta)

    @classmethod
    def pure(cls, epsilon: float, eta: float | None = None) -> "PrivacyBudget":
        """(epsilon, 0)-DP budget; eta defaults to its maximum feasible value."""
        if eta is None:
            eta = tv_feasibility_cap(epsilon, 0.0)
        return cls(epsilon, 0.0, eta)

    @classmethod
    def from_dp(cls, epsilon: float, delta: float) -> "PrivacyBudget":
        """(epsilon, delta)-DP budget carrying no total-variation information."""
        return cls(epsilon, delta, tv_feasibility_cap(epsilon, delta))


class TradeoffCurve:
    """Piecewise-linear convex tradeoff curve on [0, 1].

    Vertices have strictly increasing x covering [0, 1]; segments have
    non-increasing values and non-decreasing slopes.  Instances are
    immutable; all operations return new curves.
    """

    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys, validate: bool = True):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if validate:
            self._validate()

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("TradeoffCurve is immutable")

    def _validate(self):
        xs, ys = self.xs, self.ys
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValidationError("curve needs matching 1-d vertex arrays, >= 2 points")
        if not (abs(xs[0]) <= 1e-12 and abs(xs[-1] - 1.0) <= 1e-12):
            raise ValidationError("curve must span x = 0 to x = 1")
        if np.any(np.diff(xs) <= 0):
            raise ValidationError("vertex x-coordinates must be strictly increasing")
        if np.any(ys < -1e-12) or np.any(ys > 1.0 + 1e-12):
            raise ValidationError("vertex values must lie in [0, 1]")
        if np.any(ys > 1.0 - xs + 1e-12):
            raise ValidationError("curve must satisfy f(x) <= 1 - x")
        slopes = np.diff(ys) / np.diff(xs)
        if np.any(slopes > 1e-9):
            raise ValidationError("curve must be non-increasing")
        # Convexity with slope-magnitude-scaled tolerance.
        scale = np.maximum(1.0, np.abs(slopes[:-1]))
        if np.any(np.diff(slopes) < -GEOM_TOL * scale):
            raise ValidationError("curve must be convex")

    @classmethod
    def from_vertices(cls, vertices) -> "TradeoffCurve":
        pts = np.asarray(vertices, dtype=float)
        return cls(pts[:, 0], pts[:, 1])

    @classmethod
    def identity(cls) -> "TradeoffCurve":
        """The no-information curve f(t) = 1 - t."""
        return cls(np.array([0.0, 1.0]), np.array([1.0, 0.0]), validate=False)

    @property
    def vertices(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < -1e-12) or np.any(t_arr > 1.0 + 1e-12):
            raise ValidationError("evaluation point must lie in [0, 1]")
        vals = np.interp(np.clip(t_arr, 0.0, 1.0), self.xs, self.ys)
        return float(vals) if np.isscalar(t) or t_arr.ndim == 0 else vals

    def tv(self) -> float:
        """Tightest eta such that t + f(t) >= 1 - eta everywhere.

        The minimum of t + f(t) over a convex piecewise-linear curve is
        attained at a vertex.
        """
        return float(1.0 - np.min(self.xs + self.ys))

    def check_budget(self, budget: PrivacyBudget, tol: float = GEOM_TOL) -> bool:
        """True iff the curve satisfies all three budget inequalities.

        Linear constraints hold on a segment iff they hold at its endpoints,
        so vertex checks are sufficient.
        """
        xs, ys = self.xs, self.ys
        ee = math.exp(min(budget.epsilon, _MAX_LOG_SLOPE))
        lo = 1.0 - budget.delta - tol
        if np.any(xs + ee * ys < lo) or np.any(ee * xs + ys < lo):
            return False
        return not np.any(xs + ys < 1.0 - budget.eta - tol)

    def mirror(self) -> "TradeoffCurve":
        """Reflection of the privacy region across the diagonal y = x."""
        xs = self.ys[::-1]
        ys = self.xs[::-1]
        # Flat segments of the original become vertical after reflection:
        # keep the lowest value at each repeated x (ys descends in reverse).
        keep = np.ones(xs.size, dtype=bool)
        keep[:-1] = np.diff(xs) > 0
        out_x = list(xs[keep])
        out_y = list(ys[keep])
        if out_x[-1] < 1.0:
            out_x.append(1.0)
            out_y.append(0.0)
        return TradeoffCurve(np.array(out_x), np.array(out_y))

    def as_dict(self) -> dict:
        return {"vertices": [[x, y] for x, y in self.vertices]}

    @classmethod
    def from_dict(cls, payload: dict) -> "TradeoffCurve":
        return cls.from_vertices(payload["vertices"])

    def __repr__(self):
        return f"TradeoffCurve({self.xs.size} vertices, tv={self.tv():.6g})"

    def __eq__(self, other):
        if not isinstance(other, TradeoffCurve):
            return NotImplemented
        return self.xs.shape == other.xs.shape and bool(
            np.all(self.xs == other.xs) and np.all(self.ys == other.ys)
        )

    def __hash__(self):
        return hash((self.xs.tobytes(), self.ys.tobytes()))


def _lower_hull(xs: np.ndarray, ys: np.ndarray):
    """Lower convex hull of points sorted by strictly increasing x.

    Drops collinear interior points and any ulp-level convexity violations
    (flat runs where the true descent is below float resolution); the
    result changes values by at most a few ulps.
    """
    if xs.size <= 2:
        return xs, ys
    hx: list[float] = []
    hy: list[float] = []
    for x, y in zip(xs, ys):
        while len(hx) >= 2:
            term_a = (hy[-1] - hy[-2]) * (x - hx[-2])
            term_b = (y - hy[-2]) * (hx[-1] - hx[-2])
            # on or above the chord, up to relative float noise
            if term_a - term_b >= -4e-16 * (abs(term_a) + abs(term_b)):
                hx.pop()
                hy.pop()
            else:
                break
        hx.append(x)
        hy.append(y)
    return np.array(hx), np.array(hy)


def _upper_envelope(slopes, intercepts) -> TradeoffCurve:
    """Upper envelope of lines y = m x + b restricted to [0, 1].

    Classic convex-hull scan over lines sorted by slope; O(n log n).
    Callers must supply a line family whose envelope is a valid curve
    (non-increasing, bounded by 1 - x... enforced by validation).
    """
    m = np.asarray(slopes, dtype=float)
    b = np.asarray(intercepts, dtype=float)
    order = np.lexsort((-b, m))
    m, b = m[order], b[order]
    # One line per slope: the one with the largest intercept.
    first = np.ones(m.size, dtype=bool)
    first[1:] = np.diff(m) > 0
    m, b = m[first], b[first]

    stack: list[int] = []
    cross: list[float] = []  # cross[i]: x where stack[i] hands over to stack[i+1]
    for i in range(m.size):
        while stack:
            top = stack[-1]
            # x where the new line overtakes the top of the stack
            x_new = (b[top] - b[i]) / (m[i] - m[top])
            if cross and x_new <= cross[-1]:
                stack.pop()
                cross.pop()
            else:
                stack.append(i)
                cross.append(x_new)
                break
        if not stack:
            stack.append(i)
    # Breakpoints inside (0, 1) delimit the active pieces.
    knots = [0.0]
    for x in cross:
        if 0.0 < x < 1.0:
            knots.append(x)
    knots.append(1.0)
    kx = np.array(knots)
    # Active line at each knot: piece i of the stack covers [cross[i-1], cross[i]].
    piece = np.searchsorted(np.array(cross), kx, side="left") if cross else np.zeros(
        kx.size, dtype=int
    )
    piece = np.clip(piece, 0, len(stack) - 1)
    idx = np.array(stack)[piece]
    ky = m[idx] * kx + b[idx]
    # Collapse float-coincident breakpoints (degenerate tangents).
    keep = np.ones(kx.size, dtype=bool)
    keep[1:] = np.diff(kx) > 0
    kx, ky = kx[keep], ky[keep]
    ky = np.clip(ky, 0.0, 1.0)
    kx, ky = _lower_hull(kx, ky)
    return TradeoffCurve(kx, ky)


def _budget_lines(budget: PrivacyBudget):
    ee = math.exp(min(budget.epsilon, _MAX_LOG_SLOPE))
    een = math.exp(-budget.epsilon)
    one_m_delta = 1.0 - budget.delta
    slopes = [-ee, -een, -1.0, 0.0]
    intercepts = [one_m_delta, one_m_delta * een, 1.0 - budget.eta, 0.0]
    return slopes, intercepts


def curve_from_budget(budget: PrivacyBudget) -> TradeoffCurve:
    """Boundary of the region cut out by the two DP lines and the TV line.

    The result is the pointwise maximum of 1-delta-e^eps*t,
    (1-delta-t)e^{-eps} and 1-eta-t, clipped to the unit square; it is
    symmetric about the diagonal.
    """
    return _upper_envelope(*_budget_lines(budget))


def check_budget(curve: TradeoffCurve, budget: PrivacyBudget) -> bool:
    """Whether ``curve`` meets every constraint encoded by ``budget``."""
    return curve.check_budget(budget)


def intersect(curves) -> TradeoffCurve:
    """Intersection of privacy regions, i.e. the pointwise maximum of curves.

    A convex piecewise-linear function equals the maximum of the lines
    through its segments, so the envelope over all segment lines of all
    curves is exact.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("intersect requires at least one curve")
    slopes, intercepts = [], []
    for c in curves:
        seg_m = np.diff(c.ys) / np.diff(c.xs)
        seg_b = c.ys[:-1] - seg_m * c.xs[:-1]
        slopes.append(seg_m)
        intercepts.append(seg_b)
    return _upper_envelope(np.concatenate(slopes), np.concatenate(intercepts))


def _roc_from_atoms(mass0, mass1, log_ratios) -> TradeoffCurve:
    """Exact ROC of a discrete pair given per-atom masses and log likelihood ratios.

    Likelihood-ratio tests are optimal, so the curve's vertices are the
    cumulative masses over atoms sorted by decreasing ratio; atoms with
    equal ratio merge into one step (randomized tests fill the chord).
    """
    mass0 = np.asarray(mass0, dtype=float)
    mass1 = np.asarray(mass1, dtype=float)
    lr = np.asarray(log_ratios, dtype=float)
    keep = (mass0 > 0.0) | (mass1 > 0.0)
    mass0, mass1, lr = mass0[keep], mass1[keep], lr[keep]
    if mass0.size == 0:
        raise ValidationError("pair carries no probability mass")
    order = np.argsort(-lr, kind="stable")
    mass0, mass1, lr = mass0[order], mass1[order], lr[order]
    # Merge atoms whose ratios agree (the tolerance only matters for product
    # constructions where equal ratios differ by a few ulps).  inf - inf is
    # nan, which compares False, i.e. equal infinities merge.
    if lr.size > 1:
        new_group = np.ones(lr.size, dtype=bool)
        with np.errstate(invalid="ignore"):
            new_group[1:] = (lr[:-1] - lr[1:]) > 1e-9
        starts = np.flatnonzero(new_group)
        mass0 = np.add.reduceat(mass0, starts)
        mass1 = np.add.reduceat(mass1, starts)
    # Vertex i (largest-ratio prefix of size i accepted): x = mass of p0 left
    # outside the prefix, y = mass of p1 inside.  x comes from suffix sums so
    # tiny tail masses survive where slopes are steep; y error stays within
    # a few ulps absolute.
    suffix0 = np.concatenate((np.cumsum(mass0[::-1])[::-1], [0.0]))
    prefix1 = np.concatenate(([0.0], np.cumsum(mass1)))
    xs = np.clip(suffix0[::-1], 0.0, 1.0)
    xs[-1] = 1.0
    ys = np.clip(prefix1[::-1], 0.0, 1.0)
    # Keep the lowest value at each repeated x (a zero-p0-mass group pins
    # x = 0); ys descend along the list, so keep the last of each run.
    keep = np.ones(xs.size, dtype=bool)
    keep[:-1] = np.diff(xs) > 0
    xs, ys = _lower_hull(xs[keep], ys[keep])
    return TradeoffCurve(xs, ys)


def curve_from_pair(pair: DiscretePair) -> TradeoffCurve:
    """Exact tradeoff curve of a discrete binary-hypothesis pair."""
    p0, p1 = pair.p0, pair.p1
    lr = np.full(p0.shape, -np.inf)
    both = (p0 > 0.0) & (p1 > 0.0)
    lr[both] = np.log(p0[both]) - np.log(p1[both])
    lr[(p0 > 0.0) & (p1 <= 0.0)] = np.inf
    return _roc_from_atoms(p0, p1, lr)


def tv_of_curve(curve: TradeoffCurve) -> float:
    """Total variation implied by a curve: 1 - min_t (t + f(t))."""
    return curve.tv()


def sup_norm(a: TradeoffCurve, b: TradeoffCurve) -> float:
    """Supremum distance between two curves (exact for piecewise-linear)."""
    xs = np.union1d(a.xs, b.xs)
    return float(np.max(np.abs(a(xs) - b(xs))))


def min_gap(a: TradeoffCurve, b: TradeoffCurve) -> float:
    """Minimum of a - b over [0, 1]; >= 0 means a dominates b."""
    xs = np.union1d(a.xs, b.xs)
    return float(np.min(a(xs) - b(xs)))


def max_gap(a: TradeoffCurve, b: TradeoffCurve) -> float:
    """Maximum of a - b over [0, 1]."""
    xs = np.union1d(a.xs, b.xs)
    return float(np.max(a(xs) - b(xs)))


def strict_improvement(
    a: TradeoffCurve, b: TradeoffCurve, threshold: float = 1e-9
) -> bool:
    """Whether a exceeds b somewhere by more than ``threshold`` times the
    curves' overall scale (their value at 0).

    Separation below that scale is indistinguishable from accumulated
    rounding in the constructions, so it does not count as strict.
    """
    xs = np.union1d(a.xs, b.xs)
    va, vb = a(xs), b(xs)
    scale = max(float(a(0.0)), float(b(0.0)), 1e-300)
    return bool(np.any(va - vb > threshold * scale))


def delta_at_epsilon(curve: TradeoffCurve, epsilon: float) -> float:
    """Smallest delta such that the curve satisfies (epsilon, delta)-DP."""
    xs, ys = curve.xs, curve.ys
    ee = math.exp(min(epsilon, _MAX_LOG_SLOPE))
    lo = min(np.min(xs + ee * ys), np.min(ee * xs + ys))
    return float(max(0.0, 1.0 - lo))
