"""Continued fractions with a shifted digit window.

For a window parameter alpha in [1/2, 1] the integer part of y is taken as
``floor(y - alpha + 1)``, so the fractional remainder lies in
[alpha-1, alpha).  Each step records the digit a_n >= 1, the sign eps_n of
the signed remainder, and the folded remainder x_n = |frac| in [0, alpha).
alpha = 1 recovers the classical Gauss map (eps always +1), alpha = 1/2 the
nearest-integer map.

Expansions carry convergents p_n/q_n built by

    p_n = a_n p_{n-1} + eps_{n-1} p_{n-2},   p_0 = a_0, p_{-1} = 1
    q_n = a_n q_{n-1} + eps_{n-1} q_{n-2},   q_0 = 1,   q_{-1} = 0

and the approximation errors beta_n = x_0 x_1 ... x_n = |q_n x - p_n|.

Three input carriers are supported: Fraction (exact, always terminates),
QuadraticSurd (exact, eventually periodic; the period is detected), and
MPFloat (finite precision; the expansion stops with a recorded reason once
digits can no longer be certified).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .errors import DomainError
from .exactreal import MPFloat, QuadraticSurd, as_float, as_real, golden_mean, to_mpf

__all__ = [
    "CFExpansion",
    "expand",
    "gauss_step",
    "floor_shift",
    "reconstruct",
    "value_from_digits",
    "growth_rate",
    "beta_growth_check",
    "sandwich_check",
]

_SQRT2_MINUS_1 = QuadraticSurd(-1, 1, 2, 1)


def _check_alpha(alpha):
    alpha = as_real(alpha)
    if isinstance(alpha, MPFloat):
        raise DomainError("alpha must be exact (rational or quadratic surd)")
    if not (Fraction(1, 2) <= alpha <= 1):
        raise DomainError(f"alpha must lie in [1/2, 1], got {alpha}")
    return alpha


def floor_shift(y, alpha):
    """Digit [y] for the shifted window: floor(y - alpha + 1)."""
    return math.floor(y - alpha + 1)


def gauss_step(x, alpha=1):
    """One step of the shifted Gauss map applied to x in (0, alpha).

    Returns (a, eps, x_next) with a = floor(1/x - alpha + 1),
    eps = sign(1/x - a) (+1 on an exact hit), x_next = |1/x - a|.
    """
    alpha = _check_alpha(alpha)
    x = as_real(x)
    if isinstance(x, MPFloat):
        raise DomainError("gauss_step needs an exact operand; use expand for MPFloat")
    if not (0 < x < 1):
        raise DomainError("gauss_step expects 0 < x < 1")
    r = 1 / x
    a = floor_shift(r, alpha)
    frac = r - a
    if frac == 0:
        return a, 1, frac
    eps = 1 if frac > 0 else -1
    return a, eps, abs(frac)


def growth_rate(alpha):
    """Worst-case geometric rate for beta_n at this alpha, as an exact surd.

    (sqrt(5)-1)/2 for alpha above the golden mean, sqrt(2)-1 at or below it.
    The comparison is done exactly via the sign of alpha^2 + alpha - 1.
    """
    alpha = _check_alpha(alpha)
    if alpha * alpha + alpha - 1 > 0:
        return golden_mean()
    return _SQRT2_MINUS_1


@dataclass
class CFExpansion:
    """Record of a shifted-window continued fraction expansion."""

    alpha: object
    x: object
    a: list = field(default_factory=list)
    eps: list = field(default_factory=list)
    xs: list = field(default_factory=list)
    p: list = field(default_factory=list)
    q: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    terminated_at: Optional[int] = None
    period: Optional[tuple] = None  # (start, length) into xs
    truncated: bool = False
    truncation_reason: Optional[str] = None

    def __len__(self):
        return len(self.a)

    @property
    def depth(self):
        return len(self.a)

    def convergent(self, n):
        return Fraction(self.p[n], self.q[n])

    def x_floats(self):
        return [as_float(v) if not isinstance(v, mp.mpf) else float(v) for v in self.xs]

    def beta_floats(self):
        return [as_float(v) if not isinstance(v, mp.mpf) else float(v) for v in self.beta]

    def period_remainder_product(self):
        """Product of x_n over one period, or None if no period was found."""
        if self.period is None:
            return None
        start, length = self.period
        out = self.xs[start]
        for j in range(start + 1, start + length):
            out = out * self.xs[j]
        return out

    def to_dict(self):
        d = {
            "alpha": str(self.alpha),
            "x": str(self.x) if not isinstance(self.x, MPFloat) else str(self.x.value),
            "a": list(self.a),
            "eps": list(self.eps),
            "x_n": self.x_floats(),
            "p": list(self.p),
            "q": list(self.q),
            "beta": self.beta_floats(),
            "terminated_at": self.terminated_at,
            "period": list(self.period) if self.period else None,
            "truncated": self.truncated,
            "truncation_reason": self.truncation_reason,
        }
        return d


def _push_convergent(exp, n, a, eps_prev):
    if n == 0:
        exp.p.append(a)
        exp.q.append(1)
    elif n == 1:
        exp.p.append(a * exp.p[0] + eps_prev * 1)
        exp.q.append(a * exp.q[0] + eps_prev * 0)
    else:
        exp.p.append(a * exp.p[n - 1] + eps_prev * exp.p[n - 2])
        exp.q.append(a * exp.q[n - 1] + eps_prev * exp.q[n - 2])


def _expand_exact(x, alpha, max_depth, stop_at_period):
    exp = CFExpansion(alpha=alpha, x=x)
    track_period = isinstance(x, QuadraticSurd) and not x.is_rational
    seen = {}
    r = x
    for n in range(max_depth):
        a = floor_shift(r, alpha)
        frac = r - a
        exp.a.append(a)
        _push_convergent(exp, n, a, exp.eps[n - 1] if n else 0)
        if frac == 0:
            exp.eps.append(1)
            exp.xs.append(frac)
            exp.beta.append(frac * 0)
            exp.terminated_at = n
            return exp
        eps = 1 if frac > 0 else -1
        xn = abs(frac)
        exp.eps.append(eps)
        exp.xs.append(xn)
        exp.beta.append(abs(exp.q[n] * x - exp.p[n]))
        if track_period:
            key = xn
            if key in seen:
                exp.period = (seen[key], n - seen[key])
                if stop_at_period:
                    return exp
                track_period = False
            else:
                seen[key] = n
        r = 1 / xn
    exp.truncated = True
    exp.truncation_reason = "max_depth reached"
    return exp


def _expand_mpfloat(x, alpha, max_depth):
    bits = x.bits
    exp = CFExpansion(alpha=alpha, x=x)
    with mp.workprec(bits):
        af = to_mpf(alpha, bits)
        ulp = mp.mpf(2) ** (1 - bits)
        r = +x.value
        rerr = +x.err
        betaprod = mp.mpf(1)
        for n in range(max_depth):
            a = int(mp.floor(r - af + 1))
            lo = int(mp.floor(r - rerr - af + 1))
            hi = int(mp.floor(r + rerr - af + 1))
            if lo != hi:
                exp.truncated = True
                exp.truncation_reason = "digit ambiguous at available precision"
                return exp
            frac = r - a
            exp.a.append(a)
            _push_convergent(exp, n, a, exp.eps[n - 1] if n else 0)
            if frac == 0:
                exp.eps.append(1)
                exp.xs.append(mp.mpf(0))
                exp.beta.append(mp.mpf(0))
                exp.terminated_at = n
                return exp
            eps = 1 if frac > 0 else -1
            xn = abs(frac)
            xerr = rerr + ulp * max(abs(r), mp.mpf(1))
            exp.eps.append(eps)
            exp.xs.append(xn)
            betaprod *= xn
            exp.beta.append(+betaprod)
            if xn <= xerr:
                exp.truncated = True
                exp.truncation_reason = "remainder indistinguishable from zero"
                return exp
            if xerr / xn > mp.mpf(2) ** -8:
                exp.truncated = True
                exp.truncation_reason = "relative error budget exhausted"
                return exp
            r = 1 / xn
            rerr = xerr / (xn * xn) + 4 * ulp * max(r, mp.mpf(1))
        exp.truncated = True
        exp.truncation_reason = "max_depth reached"
    return exp


def expand(x, alpha=1, max_depth=256, stop_at_period=True):
    """Expand x in the shifted-window continued fraction at this alpha.

    Rationals terminate exactly (last remainder 0); quadratic surds stop at
    the first repeated remainder with ``period`` set, unless
    stop_at_period=False keeps going to max_depth; MPFloat inputs stop when
    the next digit can no longer be certified, with the reason recorded.
    """
    alpha = _check_alpha(alpha)
    x = as_real(x)
    if max_depth < 1:
        raise DomainError("max_depth must be >= 1")
    if isinstance(x, MPFloat):
        return _expand_mpfloat(x, alpha, max_depth)
    return _expand_exact(x, alpha, max_depth, stop_at_period)


def value_from_digits(a, eps, tail=0):
    """Exact value of a finite digit/sign string, with optional tail remainder.

    Inverts the expansion: x = a_0 + eps_0 / (a_1 + eps_1 / (... + tail)).
    """
    if len(a) != len(eps):
        raise DomainError("digit and sign lists must have equal length")
    if not a:
        raise DomainError("need at least one digit")
    v = Fraction(tail) if isinstance(tail, int) else as_real(tail)
    for k in range(len(a) - 1, 0, -1):
        v = 1 / (a[k] + eps[k] * v)
    return a[0] + eps[0] * v


def reconstruct(exp):
    """Rebuild the expanded number from digits and the last stored remainder.

    For terminated or periodic exact expansions this returns x itself; for
    truncated ones it returns the exact value of the recorded prefix seeded
    with the final remainder (a float-backed value for MPFloat input).
    """
    if not exp.a:
        raise DomainError("empty expansion")
    v = exp.xs[-1] if exp.xs else 0
    for k in range(len(exp.a) - 1, 0, -1):
        v = 1 / (exp.a[k] + exp.eps[k] * v)
    return exp.a[0] + exp.eps[0] * v


def beta_growth_check(exp, rate=None):
    """Compare beta_n against c * rate^n and q_n against growth from below.

    Returns a dict with the fitted envelope constants and whether
    beta_n <= c1 * rate^n and q_n >= c2 / rate^n hold with the returned
    c1 = max beta_n / rate^n and c2 = min q_n * rate^n (tautologically true;
    the point is the size of c1, c2, which tests pin down).
    """
    lam = as_float(rate) if rate is not None else as_float(growth_rate(exp.alpha))
    betas = exp.beta_floats()
    c1 = 0.0
    c2 = math.inf
    for n, b in enumerate(betas):
        if b == 0:
            break
        c1 = max(c1, b / lam**n)
        c2 = min(c2, exp.q[n] * lam**n)
    return {"c1": c1, "c2": c2, "rate": lam, "ok": c1 < math.inf and c2 > 0}


def sandwich_check(exp):
    """Extremes of beta_n * q_{n+1} against the window bounds.

    For every n with a successor digit, beta_n * q_{n+1} should lie in
    [1/(1+alpha), 1/alpha].  Returns observed min/max and the bounds.
    """
    af = as_float(exp.alpha)
    lo_bound, hi_bound = 1.0 / (1.0 + af), 1.0 / af
    lo, hi = math.inf, -math.inf
    betas = exp.beta_floats()
    for n in range(len(exp.a) - 1):
        if betas[n] == 0:
            break
        v = betas[n] * exp.q[n + 1]
        lo, hi = min(lo, v), max(hi, v)
    return {"min": lo, "max": hi, "lower_bound": lo_bound, "upper_bound": hi_bound}
