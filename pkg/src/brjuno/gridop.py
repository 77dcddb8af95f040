"""Piecewise-linear bench for the even transfer operator on [0, 1/2].

A grid function stores values at the nodes j/(2n), j = 0..n.  It is read
anywhere on the real line through the even 1-periodic extension
f_ext(y) = f(|y - round(y)|) with linear interpolation between nodes.

The operator acts by (Tf)(x) = x * f_ext(1/x); the extension supplies the
fold of 1/x back into the carrier, so the window parameter of the
underlying continued fraction drops out and `alpha` is validated, then
ignored.  Iterating T on the constant 1 reproduces the cycle-weight
products of the nearest-integer expansion, and the Neumann series of
(1 - T)^(-1) applied to -log is the even Brjuno function on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cf import _check_alpha
from .errors import BadWeights, DomainError, NoConvergence
from .exactreal import QuadraticSurd, as_real

__all__ = [
    "GridFunction",
    "apply_T",
    "neumann_inverse",
    "neumann_term_ratios",
    "neg_log_grid",
    "holder_seminorm",
    "holder_norm",
    "ContractionReport",
    "contraction_check",
    "LemmaReport",
    "lemma_check",
    "bmo_seminorm",
]


class GridFunction:
    """Values at the nodes j/(2n) on [0, 1/2], extended evenly and 1-periodically.

    Instances are immutable snapshots: the value buffer is marked read-only
    so operator sweeps can share them across workers.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values) -> None:
        if n < 2:
            raise DomainError("need at least two cells on [0, 1/2]")
        vals = np.asarray(values, dtype=float)
        if vals.shape != (n + 1,):
            raise DomainError(f"expected {n + 1} node values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("node values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("GridFunction is immutable")

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) / (2.0 * self.n)

    @property
    def step(self) -> float:
        return 1.0 / (2.0 * self.n)

    @classmethod
    def from_callable(cls, fn: Callable[[float], float], n: int) -> "GridFunction":
        xs = np.arange(n + 1) / (2.0 * n)
        try:
            vals = np.asarray(fn(xs), dtype=float)
            if vals.shape != xs.shape:
                raise TypeError
        except Exception:
            vals = np.array([float(fn(float(x))) for x in xs])
        return cls(n, vals)

    @classmethod
    def constant(cls, c: float, n: int) -> "GridFunction":
        return cls(n, np.full(n + 1, float(c)))

    def eval(self, x):
        """Evaluate the extension at x (scalar or array).

        The fold |x - round(x)| uses round-half-to-even ties, which is
        harmless here because both half-integer images coincide.
        """
        arr = np.asarray(x, dtype=float)
        r = np.abs(arr - np.round(arr))
        out = np.interp(r, self.nodes, self.values)
        return float(out) if np.isscalar(x) or arr.shape == () else out

    def eval_cell(self, x: float) -> int:
        """Index of the carrier cell that the fold of x lands in."""
        r = abs(x - round(x))
        return min(self.n - 1, int(r * 2 * self.n))

    def __call__(self, x):
        return self.eval(x)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            if other.n != self.n:
                raise DomainError("grid sizes differ")
            return GridFunction(self.n, op(self.values, other.values))
        if isinstance(other, (int, float)):
            return GridFunction(self.n, op(self.values, float(other)))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return GridFunction(self.n, self.values * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.n, -self.values)

    def to_rows(self) -> list:
        xs = self.nodes
        return [(float(xs[j]), float(self.values[j])) for j in range(self.n + 1)]

    def __repr__(self) -> str:
        return f"GridFunction(n={self.n}, sup={self.sup_norm():.6g})"


def apply_T(f: GridFunction, alpha=Fraction(1, 2)) -> GridFunction:
    """One application of (Tf)(x) = x * f_ext(1/x) at the nodes.

    alpha is validated against [1/2, 1] for interface symmetry with the
    expansion routines; on this carrier the even periodic extension fixes
    the fold, so the result does not depend on it.  Node 0 maps to 0
    (the x factor wins against any bounded extension value).
    """
    _check_alpha(as_real(alpha))
    xs = f.nodes
    out = np.empty(f.n + 1)
    out[0] = 0.0
    out[1:] = xs[1:] * f.eval(1.0 / xs[1:])
    return GridFunction(f.n, out)


def neumann_inverse(f: GridFunction, alpha=Fraction(1, 2), tol: float = 1e-12,
                    max_terms: int = 1000):
    """Sum the Neumann series (1 - T)^(-1) f = f + Tf + T^2 f + ...

    Stops once the sup norm of the latest term drops to tol; raises
    NoConvergence after max_terms terms.  Returns the partial sum and the
    number of terms it contains.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    term = f
    acc = f.values.copy()
    terms = 1
    while term.sup_norm() > tol:
        if terms >= max_terms:
            raise NoConvergence(
                f"Neumann series still above tol={tol:g} after {terms} terms")
        term = apply_T(term, alpha)
        acc += term.values
        terms += 1
    return GridFunction(f.n, acc), terms


def neumann_term_ratios(f: GridFunction, alpha=Fraction(1, 2), count: int = 20):
    """Sup-norm ratios of consecutive Neumann terms, for decay diagnostics."""
    ratios = []
    term = f
    prev = term.sup_norm()
    for _ in range(count):
        term = apply_T(term, alpha)
        cur = term.sup_norm()
        if prev == 0.0:
            break
        ratios.append(cur / prev)
        prev = cur
    return ratios


def neg_log_grid(n: int) -> GridFunction:
    """-log on the grid with the node-0 clamp log(2n) + 1.

    The clamp keeps the endpoint singularity out of the linear algebra; it
    is one grid step past the last honest value, so comparisons against
    series evaluations are meaningful at interior nodes only.
    """
    xs = np.arange(n + 1) / (2.0 * n)
    vals = np.empty(n + 1)
    vals[0] = math.log(2.0 * n) + 1.0
    vals[1:] = -np.log(xs[1:])
    return GridFunction(n, vals)


def interp_error_bound(f: GridFunction, x: float, halfwidth: int = 4,
                       factor: float = 3.0, floor: float = 1e-3) -> float:
    """Honest local bound for |f_true(x) - f(x)| when f samples f_true.

    Piecewise-linear readout is off by at most the oscillation of the true
    function over the containing cell; that oscillation is estimated from
    the grid itself over a window of `halfwidth` cells each side and
    inflated by `factor`, since the grid can only under-resolve a spike.
    Useful for targets like the even Brjuno function, whose local
    regularity collapses near low-denominator rationals.
    """
    j = int(f.eval_cell(x))
    lo = max(0, j - halfwidth)
    hi = min(f.n, j + 1 + halfwidth)
    w = f.values[lo:hi + 1]
    return max(floor, factor * float(w.max() - w.min()))


def holder_seminorm(f: GridFunction, gamma: float) -> float:
    """sup |f(x)-f(y)| / |x-y|^gamma over node pairs.

    For piecewise-linear data the sup over the whole carrier is attained
    at a pair of nodes (along any segment the difference quotient has no
    interior maximum), so scanning pairs is exact, not a lower bound.
    """
    if not 0.0 < gamma <= 1.0:
        raise DomainError("gamma must lie in (0, 1]")
    xs = f.nodes
    vs = f.values
    best = 0.0
    for i in range(f.n):
        d = np.abs(vs[i + 1:] - vs[i]) / (xs[i + 1:] - xs[i]) ** gamma
        m = float(d.max())
        if m > best:
            best = m
    return best


def holder_norm(f: GridFunction, gamma: float, A: float, B: float) -> float:
    """Weighted norm A * (Holder seminorm) + B * (sup norm)."""
    if A <= 0 or B <= 0:
        raise BadWeights("weights must be positive")
    return A * holder_seminorm(f, gamma) + B * f.sup_norm()


@dataclass(frozen=True)
class ContractionReport:
    gamma: float
    A: float
    B: float
    lhs: float
    rhs: float
    slack: float
    ok: bool

    def to_dict(self):
        return {
            "gamma": self.gamma, "A": self.A, "B": self.B,
            "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
            "ok": self.ok,
        }


def contraction_check(f: GridFunction, gamma: float, A: float, B: float) -> ContractionReport:
    """Check ||Tf|| <= 2^(2*gamma-1) ||f|| + slack in the weighted norm.

    Requires 0 < gamma <= 1/2 and B/A > 1/(2^gamma - 2^(-gamma)); the
    second condition is what lets the seminorm growth of T be absorbed by
    the sup-norm decay, and without it no weight balance of this shape
    contracts.  The slack 2 * h^(1-gamma) * sup|f| covers the grid's
    piecewise-linear replacement of the true image.
    """
    if not 0.0 < gamma <= 0.5:
        raise DomainError("gamma must lie in (0, 1/2]")
    if A <= 0 or B <= 0:
        raise BadWeights("weights must be positive")
    threshold = 1.0 / (2.0 ** gamma - 2.0 ** (-gamma))
    if B / A <= threshold:
        raise BadWeights(
            f"need B/A > {threshold:.6g} for gamma={gamma:g}, got {B / A:.6g}")
    tf = apply_T(f)
    lhs = holder_norm(tf, gamma, A, B)
    c = 2.0 ** (2.0 * gamma - 1.0)
    slack = 2.0 * f.step ** (1.0 - gamma) * f.sup_norm()
    rhs = c * holder_norm(f, gamma, A, B) + slack
    return ContractionReport(gamma, A, B, lhs, rhs, slack, lhs <= rhs)


@dataclass(frozen=True)
class LemmaReport:
    ok: bool
    lhs: object
    rhs: object
    x1: object
    y1: object

    def to_dict(self):
        return {"ok": self.ok, "lhs": float(self.lhs), "rhs": float(self.rhs)}


def _nearest_remainder(t):
    # remainder in [-1/2, 1/2); the exact tie goes down, matching the
    # signed-digit convention used by the expansion code
    return t - math.floor(t + Fraction(1, 2))


def lemma_check(x, y) -> LemmaReport:
    """Nearest-integer remainders move no faster than 1/x does.

    With x1 = 1/x - round(1/x) and likewise y1, checks
    | |x1| - |y1| | <= (x - y)/(x y) for 0 < y < x <= 1/2.  Inputs are
    taken to exact carriers (floats exactly, as the rationals they are),
    so the verdict involves no rounding at all.
    """
    ex, ey = as_real(x), as_real(y)
    for v in (ex, ey):
        if not isinstance(v, (int, Fraction, QuadraticSurd)):
            raise DomainError("lemma_check needs an exact carrier")
    if not (0 < ey < ex and ex <= Fraction(1, 2)):
        raise DomainError("need 0 < y < x <= 1/2")
    x1 = _nearest_remainder(Fraction(1) / ex if isinstance(ex, (int, Fraction)) else 1 / ex)
    y1 = _nearest_remainder(Fraction(1) / ey if isinstance(ey, (int, Fraction)) else 1 / ey)
    lhs = abs(abs(x1) - abs(y1))
    rhs = (ex - ey) / (ex * ey)
    return LemmaReport(lhs <= rhs, lhs, rhs, x1, y1)


def bmo_seminorm(f: GridFunction, max_windows: int = 1 << 14) -> float:
    """Mean-oscillation sup over dyadic subintervals of one period.

    The extension is sampled on a dyadic refinement of [0, 1], each window
    mean and the oscillation integral are taken with the trapezoid rule on
    that grid, and windows are enumerated from the full period downward
    until max_windows is reached (the deepest levels are dropped first).
    """
    if max_windows < 1:
        raise DomainError("max_windows must be positive")
    cells = 2 * f.n
    levels = max(2, math.ceil(math.log2(cells)))
    fine = 1 << levels
    ts = np.arange(fine + 1) / fine
    vals = f.eval(ts)
    best = 0.0
    total = 0
    for lev in range(levels + 1):
        nwin = 1 << lev
        if total + nwin > max_windows and lev > 0:
            break
        total += nwin
        width = fine >> lev  # cells per window
        if width < 1:
            break
        # endpoints of every cell, grouped by window
        left = vals[:-1].reshape(nwin, width)
        right = vals[1:].reshape(nwin, width)
        cell_int = (left + right) / (2.0 * fine)
        means = cell_int.sum(axis=1) * nwin
        u = left - means[:, None]
        v = right - means[:, None]
        same = u * v >= 0.0
        absint = np.where(
            same,
            np.abs(u + v) / (2.0 * fine),
            (u * u + v * v) / (2.0 * fine * np.maximum(np.abs(u - v), 1e-300)),
        )
        osc = absint.sum(axis=1) * nwin
        m = float(osc.max())
        if m > best:
            best = m
    return best
