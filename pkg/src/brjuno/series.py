"""Brjuno-type series over shifted-window continued fraction orbits.

The central object is B_f(x) = sum_n beta_{n-1} f(x_n), where x_n are the
folded remainders of the expansion of x at a window alpha and beta_n their
running products (beta_{-1} = 1).  f defaults to -log, giving the Brjuno
function for alpha = 1 and its nearest-integer variant at alpha = 1/2.

Tail policy by carrier:

* rationals terminate: the orbit hits 0, so the value is +inf for f
  unbounded at 0 and an exact finite sum otherwise;
* quadratic surds are eventually periodic: the tail is a geometric series
  summed in closed form, so the result is exact up to roundoff;
* MPFloat carriers get a truncated sum plus a geometric *heuristic* tail
  bound beta_last * max_observed_f / (1 - rate); it uses observed orbit
  statistics and is not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath as mp

from .cf import expand, growth_rate
from .errors import DomainError, NoConvergence, InsufficientDepth, PrecisionExhausted
from .exactreal import MPFloat, as_float, as_real, to_mpf

__all__ = [
    "SeriesFunction",
    "neg_log",
    "power",
    "log_power",
    "custom",
    "BrjunoEval",
    "brjuno_series",
    "brjuno_B",
    "brjuno_Be",
    "odd_part",
    "even_part",
    "odd_part_reflection",
    "odd_part_closed_form",
    "odd_identity_residual",
    "even_identity_residual",
    "bnu_series",
    "diophantine_estimate",
]


@dataclass(frozen=True)
class SeriesFunction:
    """Weight function f in the series, with behaviour at 0 declared."""

    tag: str
    evaluator: object
    unbounded_at_zero: bool
    value_at_zero: float = 0.0
    params: dict = dc_field(default_factory=dict)

    def __call__(self, t):
        return self.evaluator(t)


def neg_log():
    """f(t) = -log t, the classical Brjuno weight."""
    return SeriesFunction("neg_log", lambda t: -mp.log(t), True)


def power(nu):
    """f(t) = t**(-nu) for nu > 0."""
    nu = float(nu)
    if nu <= 0:
        raise DomainError("power weight needs nu > 0")
    return SeriesFunction("power", lambda t: mp.power(t, -nu), True, params={"nu": nu})


def log_power(p):
    """f(t) = (-log t)**p for p >= 1."""
    p = float(p)
    if p < 1:
        raise DomainError("log_power weight needs p >= 1")
    return SeriesFunction("log_power", lambda t: (-mp.log(t)) ** p, True, params={"p": p})


def custom(fn, tag="custom", unbounded_at_zero=True, value_at_zero=0.0, params=None):
    return SeriesFunction(tag, fn, unbounded_at_zero, value_at_zero, params or {})


@dataclass
class BrjunoEval:
    """Value of a Brjuno-type series together with how it was obtained."""

    value: float
    partial_sum: float
    tail_bound: float
    depth: int
    alpha: object
    diverged: bool
    uncertainty: float
    tail_kind: str  # "terminated" | "periodic-exact" | "geometric-heuristic"
    expansion: object = None

    def to_dict(self):
        return {
            "value": self.value,
            "partial_sum": self.partial_sum,
            "tail_bound": self.tail_bound,
            "depth": self.depth,
            "alpha": str(self.alpha),
            "diverged": self.diverged,
            "uncertainty": self.uncertainty,
            "tail_kind": self.tail_kind,
        }


def _term_values(exp, f, prec):
    """Evaluate f on each positive remainder; returns (fvals, betas) as mpf."""
    fvals = []
    betas = []
    with mp.workprec(prec):
        for n, xn in enumerate(exp.xs):
            if isinstance(xn, mp.mpf):
                xv = +xn
                bv = +exp.beta[n]
            else:
                xv = to_mpf(xn, prec)
                bv = to_mpf(exp.beta[n], prec)
            fvals.append(f(xv) if xv > 0 else None)
            betas.append(bv)
    return fvals, betas


def brjuno_series(x, alpha=1, f=None, max_depth=256, prec=96):
    """Evaluate B_f(x) at the given window, with a tail policy per carrier.

    Returns a BrjunoEval; .value is +inf with .diverged set when the orbit
    terminates at 0 and f is unbounded there (rationals with the default
    weight).
    """
    if f is None:
        f = neg_log()
    x = as_real(x)
    exp = expand(x, alpha, max_depth=max_depth)
    if isinstance(x, Fraction) and exp.truncated:
        raise NoConvergence(
            f"rational did not terminate within max_depth={max_depth}; raise it"
        )
    if not exp.xs:
        raise PrecisionExhausted("could not certify even one digit of the orbit")
    fvals, betas = _term_values(exp, f, prec)

    with mp.workprec(prec):
        one = mp.mpf(1)

        def beta_before(n):
            return one if n == 0 else betas[n - 1]

        if exp.terminated_at is not None:
            n_end = exp.terminated_at
            partial = mp.fsum(beta_before(n) * fvals[n] for n in range(n_end))
            if f.unbounded_at_zero:
                value = mp.inf
                diverged = True
            else:
                partial += beta_before(n_end) * mp.mpf(f.value_at_zero)
                value = partial
                diverged = False
            ev = BrjunoEval(
                value=float(value),
                partial_sum=float(partial),
                tail_bound=0.0,
                depth=len(exp.a),
                alpha=exp.alpha,
                diverged=diverged,
                uncertainty=0.0 if diverged else float(abs(partial)) * 2.0 ** (8 - prec),
                tail_kind="terminated",
                expansion=exp,
            )
            return ev

        if exp.period is not None:
            m, plen = exp.period
            pre = mp.fsum(beta_before(n) * fvals[n] for n in range(m))
            block = mp.fsum(beta_before(m + j) * fvals[m + j] for j in range(plen))
            prod = one
            for j in range(m, m + plen):
                prod *= to_mpf(exp.xs[j], prec)
            value = pre + block / (one - prod)
            unc = float(abs(value)) * (len(exp.a) + 4) * 2.0 ** (6 - prec)
            return BrjunoEval(
                value=float(value),
                partial_sum=float(pre + block),
                tail_bound=0.0,
                depth=len(exp.a),
                alpha=exp.alpha,
                diverged=False,
                uncertainty=unc,
                tail_kind="periodic-exact",
                expansion=exp,
            )

        # truncated orbit: partial sum plus a heuristic geometric tail
        partial = mp.fsum(
            beta_before(n) * fvals[n] for n in range(len(exp.xs)) if fvals[n] is not None
        )
        lam = to_mpf(growth_rate(exp.alpha), prec)
        fmax = max(fv for fv in fvals if fv is not None)
        fmax = max(fmax, mp.mpf(1))
        tail = betas[-1] * fmax / (one - lam)
        return BrjunoEval(
            value=float(partial),
            partial_sum=float(partial),
            tail_bound=float(tail),
            depth=len(exp.a),
            alpha=exp.alpha,
            diverged=False,
            uncertainty=float(tail),
            tail_kind="geometric-heuristic",
            expansion=exp,
        )


def brjuno_B(x, **kw):
    """Brjuno function: B_{-log} at the classical window alpha = 1."""
    return brjuno_series(x, alpha=1, **kw)


def brjuno_Be(x, **kw):
    """Nearest-integer variant: B_{-log} at alpha = 1/2."""
    return brjuno_series(x, alpha=Fraction(1, 2), **kw)


# -- parity pieces of the alpha = 1 function ------------------------------


def _B_val(x, f, prec, max_depth):
    ev = brjuno_series(x, alpha=1, f=f, max_depth=max_depth, prec=prec)
    if ev.diverged:
        return mp.inf
    return mp.mpf(ev.value)


def _check_parity_arg(x):
    x = as_real(x)
    if isinstance(x, MPFloat):
        raise DomainError("parity pieces need an exact carrier (Fraction or surd)")
    if isinstance(x, Fraction) or x.is_rational:
        raise DomainError("parity pieces need an irrational x (B is +inf at rationals)")
    if not (0 < x < 1):
        raise DomainError("parity pieces need x in (0, 1)")
    return x


def odd_part(x, f=None, prec=96, max_depth=256):
    """(B_f(x) - B_f(1-x)) / 2 for irrational x in (0, 1)."""
    x = _check_parity_arg(x)
    f = f or neg_log()
    return 0.5 * float(_B_val(x, f, prec, max_depth) - _B_val(1 - x, f, prec, max_depth))


def even_part(x, f=None, prec=96, max_depth=256):
    """(B_f(x) + B_f(1-x)) / 2 for irrational x in (0, 1)."""
    x = _check_parity_arg(x)
    f = f or neg_log()
    return 0.5 * float(_B_val(x, f, prec, max_depth) + _B_val(1 - x, f, prec, max_depth))


def odd_part_reflection(x, f=None, prec=96):
    """Series-free expression for the odd part on (0, 1/2):

    (f(x) - f(1-x) - (1-x) f(x/(1-x))) / 2
    """
    x = as_real(x)
    if isinstance(x, MPFloat):
        raise DomainError("reflection form needs an exact carrier")
    if not (0 < x < Fraction(1, 2)):
        raise DomainError("reflection form needs x in (0, 1/2)")
    f = f or neg_log()
    with mp.workprec(prec):
        xv = to_mpf(x, prec)
        val = 0.5 * (f(xv) - f(1 - xv) - (1 - xv) * f(xv / (1 - xv)))
    return float(val)


def odd_part_closed_form(x, prec=96):
    """Odd part for the -log weight: x*log((1-x)/x)/2 on (0, 1/2)."""
    x = as_real(x)
    if isinstance(x, MPFloat):
        raise DomainError("closed form needs an exact carrier")
    if not (0 < x < Fraction(1, 2)):
        raise DomainError("closed form needs x in (0, 1/2)")
    with mp.workprec(prec):
        xv = to_mpf(x, prec)
        val = 0.5 * xv * mp.log((1 - xv) / xv)
    return float(val)


def odd_identity_residual(x, f=None, prec=96, max_depth=256):
    """odd_part(x) minus its reflection form; should vanish on (0, 1/2)."""
    return odd_part(x, f, prec, max_depth) - odd_part_reflection(x, f, prec)


def even_identity_residual(x, f=None, prec=96, max_depth=256):
    """Residual of the even-part reflection relation on (0, 1/2).

    B+(x) - x*B+(1/x) - G(x)/2 with
    G = f(x) + f(1-x) + (1-x) f(x/(1-x)) + 2x*B-(1/x),
    where B+ and B- at 1/x are taken through the 1-periodic extension.
    """
    x = _check_parity_arg(x)
    if not (x < Fraction(1, 2)):
        raise DomainError("identity stated on (0, 1/2)")
    f = f or neg_log()
    inv = 1 / x
    fr = inv - math.floor(inv)
    if fr == 0:
        raise DomainError("1/x is an integer; parity pieces blow up")
    bp_inv = even_part(fr, f, prec, max_depth)
    bm_inv = odd_part(fr, f, prec, max_depth)
    bp_x = even_part(x, f, prec, max_depth)
    with mp.workprec(prec):
        xv = to_mpf(x, prec)
        G = f(xv) + f(1 - xv) + (1 - xv) * f(xv / (1 - xv)) + 2 * xv * bm_inv
        res = bp_x - xv * bp_inv - G / 2
    return float(res)


# -- power-weight series and its convergent bracket ------------------------


def bnu_series(x, nu, max_depth=160, prec=96):
    """B_{t^-nu}(x) at alpha = 1 with the convergent-sum bracket.

    Returns a dict holding the series value, the bracket
    K = sum q_{n+1}^nu / q_n^(1+nu), and provable constants for
    2^-(1+nu) K <= B <= 2^nu K.
    """
    nu = float(nu)
    if nu <= 0:
        raise DomainError("bnu_series needs nu > 0")
    x = as_real(x)
    ev = brjuno_series(x, alpha=1, f=power(nu), max_depth=max_depth, prec=prec)
    exp = expand(x, alpha=1, max_depth=max_depth, stop_at_period=False)
    K = 0.0
    for n in range(len(exp.q) - 1):
        term = exp.q[n + 1] ** nu / exp.q[n] ** (1.0 + nu)
        K += term
        if term < 1e-17 * K:
            break
    lower = 2.0 ** -(1.0 + nu) * K
    upper = 2.0**nu * K
    ok = None
    if not ev.diverged and ev.tail_kind == "periodic-exact":
        ok = lower <= ev.value <= upper
    return {
        "eval": ev,
        "value": ev.value,
        "bracket": K,
        "lower": lower,
        "upper": upper,
        "ok": ok,
        "nu": nu,
    }


def diophantine_estimate(x, alpha=1, depth=48):
    """Fit q_{n+1} ~ c * q_n^(1+tau) from the expansion and return estimates.

    Uses a least-squares line through (log q_n, log q_{n+1}) for n >= 2.
    Raises InsufficientDepth with fewer than 3 usable points.
    """
    import numpy as np

    exp = expand(x, alpha, max_depth=depth, stop_at_period=False)
    qs = exp.q
    pts = [
        (math.log(qs[n]), math.log(qs[n + 1]))
        for n in range(2, len(qs) - 1)
        if qs[n] > 0 and qs[n + 1] > 0
    ]
    if len(pts) < 3:
        raise InsufficientDepth(f"only {len(pts)} points; need >= 3")
    lx = np.array([p[0] for p in pts])
    ly = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    tau = max(0.0, float(slope) - 1.0)
    return {
        "tau_hat": tau,
        "slope": float(slope),
        "c_hat": float(math.exp(intercept)),
        "points": len(pts),
        "q_last": qs[-1],
    }
