"""Perturbation series for the standard family of twist maps.

The conjugacy taking the dynamics to a rigid rotation with rotation
number rho is built order by order in the forcing strength.  Each order
is a trigonometric polynomial whose Fourier modes get divided by the
small divisor 2(cos(2 pi nu rho) - 1); that factor nearly vanishes
whenever nu is a convergent denominator of rho, so coefficients grow
roughly like exp(2 n B(rho)) and are computed in extended precision.
The convergence radius is then read off a root test.  A root test at
order K only feels divisors with nu <= K; the weighted-log contribution
of the deeper continued fraction levels is added back explicitly before
quoting the radius, which makes the estimate stable under doubling of
the computed order.
"""

import math
import statistics
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath as mp

from .cf import expand
from .errors import (
    DomainError,
    SmallDivisorZero,
    SolvabilityViolation,
    UnstableEstimate,
)
from .exactreal import MPFloat, QuadraticSurd, as_real, to_mpf


def default_bits(order):
    """Working precision for a series of the given order.

    Divisors at convergent denominators inflate coefficients so fast
    that doubles lose the radius signal beyond order ~30; 8 bits per
    order keeps a wide margin.
    """
    return max(160, 8 * int(order))


def _rational_q(rho):
    """Denominator when the carrier is exactly rational, else None."""
    if isinstance(rho, Fraction):
        return rho.denominator
    if isinstance(rho, QuadraticSurd) and rho.is_rational:
        return rho.as_fraction().denominator
    return None


@dataclass(frozen=True)
class SmallDivisor:
    """One Fourier-mode denominator 2(cos(2 pi nu rho) - 1)."""

    nu: int
    value: float


def small_divisor(nu, rho, prec=96):
    """Small divisor at integer mode nu; exact zero for resonant rationals."""
    nu = int(nu)
    rho = as_real(rho)
    if nu == 0:
        return SmallDivisor(0, 0.0)
    q = _rational_q(rho)
    if q is not None and abs(nu) % q == 0:
        return SmallDivisor(nu, 0.0)
    with mp.workprec(prec):
        t = abs(nu) * to_mpf(rho, prec)
        t -= mp.floor(t)
        val = -4 * mp.sin(mp.pi * t) ** 2
    return SmallDivisor(nu, float(val))


class _DivisorTable:
    """Small divisors for one rho at a fixed working precision.

    Raises SmallDivisorZero for exact resonances (rational carriers) and
    for modes an MPFloat carrier cannot resolve from a resonance.
    """

    def __init__(self, rho, prec):
        self.rho = rho
        self.prec = prec
        self.q = _rational_q(rho)
        self.err = rho.err if isinstance(rho, MPFloat) else None
        self.rho_mp = to_mpf(rho, prec)

    def gamma(self, nu, order_label, mode_label=None):
        nu = abs(int(nu))
        if self.q is not None and nu % self.q == 0:
            raise SmallDivisorZero(order_label, mode_label)
        t = nu * self.rho_mp
        t -= mp.floor(t)
        s = mp.sin(mp.pi * t)
        if self.err is not None and abs(s) < 4 * mp.pi * nu * self.err:
            raise SmallDivisorZero(
                order_label,
                mode_label,
                msg=f"small divisor at mode nu={nu} is below the input's "
                f"precision ({float(abs(s)):.3e} vs error bound "
                f"{float(4 * mp.pi * nu * self.err):.3e}); supply more bits",
            )
        return -4 * s * s


@dataclass
class LindstedtSeries:
    """Coefficient table of a conjugacy series plus root-test data.

    For the one-sided forcing the order-n term carries the single mode
    nu = n and ``coeffs`` is a list of mpc; for the full sine forcing
    ``coeffs`` is a list of mode dicts {nu: mpc} with conjugate-symmetric
    entries and no zero mode.  ``radius_estimates[k-1]`` is |c_k|**(-1/k)
    (sup over modes at order k for the full forcing).
    """

    map_kind: str
    rho: object
    order: int
    coeffs: list
    radius_estimates: list
    bits: int

    def eval_order(self, k, phi):
        """Order-k term evaluated at angle phi (unit forcing strength)."""
        if not 1 <= k <= self.order:
            raise DomainError(f"order {k} outside 1..{self.order}")
        with mp.workprec(self.bits):
            ph = to_mpf(as_real(phi), self.bits)
            if self.map_kind == "semi_standard":
                return self.coeffs[k - 1] * mp.e ** (2j * mp.pi * k * ph)
            return mp.fsum(
                (v * mp.e ** (2j * mp.pi * nu * ph) for nu, v in self.coeffs[k - 1].items()),
                absolute=False,
            )

    def ln_coeff_mags(self):
        """ln of the per-order coefficient magnitude driving the root test."""
        return [-(k + 1) * math.log(r) for k, r in enumerate(self.radius_estimates)]

    def to_dict(self):
        return {
            "map_kind": self.map_kind,
            "rho": str(self.rho),
            "order": self.order,
            "bits": self.bits,
            "radius_estimates": list(self.radius_estimates),
            "ln_coeff_mags": self.ln_coeff_mags(),
        }


def _root_test(ln_mag, k):
    # r_k = |c_k|^(-1/k) without overflowing doubles
    return math.exp(-ln_mag / k)


def semi_standard_series(rho, order, prec=None):
    """Conjugacy series for the one-sided (positive frequency) forcing.

    The order-n coefficient c_n solves gamma_n c_n = [w^n] of
    w/(4 pi i) * exp(2 pi i sum_{m<n} c_m w^m), with the exponential
    expanded by the usual power-series recurrence.
    """
    order = int(order)
    if order < 1:
        raise DomainError("order must be >= 1")
    rho = as_real(rho)
    bits = int(prec) if prec else default_bits(order)
    table = _DivisorTable(rho, bits)
    with mp.workprec(bits):
        four_pi_i = 4 * mp.pi * mp.mpc(0, 1)
        two_pi_i = 2 * mp.pi * mp.mpc(0, 1)
        coeffs = []
        exp_tail = [mp.mpc(1)]  # [w^j] exp(2 pi i sum c_m w^m)
        radii = []
        for n in range(1, order + 1):
            g = table.gamma(n, n)
            c = exp_tail[n - 1] / (four_pi_i * g)
            coeffs.append(c)
            radii.append(_root_test(float(mp.log(abs(c))), n))
            s = mp.fsum(
                (m * two_pi_i * coeffs[m - 1] * exp_tail[n - m] for m in range(1, n + 1)),
                absolute=False,
            )
            exp_tail.append(s / n)
    return LindstedtSeries("semi_standard", rho, order, coeffs, radii, bits)


def standard_map_series(rho, order, prec=None, mode0_tol=1e-10):
    """Conjugacy series for the full sine forcing, as mode tables.

    At order k the right-hand side is the order-(k-1) part of
    sin(2 pi (phi + u))/(2 pi), assembled from the power-series
    recurrence for exp(2 pi i u).  The zero mode of the right-hand side
    must vanish (checked against mode0_tol relative to the largest mode,
    SolvabilityViolation otherwise) and u keeps no zero mode.  Negative
    modes are filled by conjugation so each order is exactly real.
    """
    order = int(order)
    if order < 1:
        raise DomainError("order must be >= 1")
    if not 0 < mode0_tol < 1:
        raise DomainError("mode0_tol must be in (0, 1)")
    rho = as_real(rho)
    bits = int(prec) if prec else default_bits(order)
    table = _DivisorTable(rho, bits)
    with mp.workprec(bits):
        four_pi_i = 4 * mp.pi * mp.mpc(0, 1)
        two_pi_i = 2 * mp.pi * mp.mpc(0, 1)
        u = []  # u[k-1]: dict nu -> mpc
        P = [{0: mp.mpc(1)}]  # P[k]: modes of order-k part of exp(2 pi i u)
        radii = []
        for k in range(1, order + 1):
            prev = P[k - 1]
            rhs = {}
            for nu, v in prev.items():
                rhs[nu + 1] = rhs.get(nu + 1, mp.mpc(0)) + v / four_pi_i
                m = -nu - 1
                rhs[m] = rhs.get(m, mp.mpc(0)) - mp.conj(v) / four_pi_i
            scale = max(abs(v) for v in rhs.values())
            zero = rhs.get(0)
            if zero is not None and abs(zero) > mode0_tol * scale:
                raise SolvabilityViolation(
                    f"zero-mode forcing at order {k} is "
                    f"{float(abs(zero) / scale):.3e} of the largest mode; "
                    "the difference equation has no periodic solution"
                )
            uk = {}
            for nu in sorted(n for n in rhs if n > 0):
                g = table.gamma(nu, k, nu)
                val = rhs[nu] / g
                uk[nu] = val
                uk[-nu] = mp.conj(val)
            u.append(uk)
            sup = max(abs(v) for v in uk.values())
            radii.append(_root_test(float(mp.log(sup)), k))
            nxt = {}
            for m in range(1, k + 1):
                for nu1, a in u[m - 1].items():
                    for nu2, b in P[k - m].items():
                        key = nu1 + nu2
                        nxt[key] = nxt.get(key, mp.mpc(0)) + m * a * b
            for nu in nxt:
                nxt[nu] *= two_pi_i / k
            P.append(nxt)
    return LindstedtSeries("standard", rho, order, u, radii, bits)


def _cf_ladder(rho, depth=160, prec=200):
    """[(q_k, term_k)] of the alpha=1 weighted-log sum, term paired with
    the convergent denominator that resolves it, plus the total."""
    exp = expand(rho, 1, max_depth=depth, stop_at_period=False)
    terms = []
    with mp.workprec(prec):
        beta_prev = mp.mpf(1)
        floor_beta = mp.mpf(2) ** -120
        for n, xn in enumerate(exp.xs):
            xv = to_mpf(xn, prec)
            if not xv > 0:
                break
            terms.append((int(exp.q[n]), float(beta_prev * (-mp.log(xv)))))
            beta_prev *= xv
            if beta_prev < floor_beta:
                break
    return terms


def _block_slope(lnc, width):
    b2 = lnc[-width:]
    b1 = lnc[-2 * width:-width]
    return (statistics.fmean(b2) - statistics.fmean(b1)) / width


def _ls_slope(lnc):
    K = len(lnc)
    ns = range(K - max(6, K // 2) + 1, K + 1)
    ys = [lnc[n - 1] for n in ns]
    xbar = statistics.fmean(ns)
    ybar = statistics.fmean(ys)
    num = sum((n - xbar) * (y - ybar) for n, y in zip(ns, ys))
    den = sum((n - xbar) ** 2 for n in ns)
    return num / den


def critical_constant_estimate(series, unstable_tol=0.75):
    """Radius of convergence of a Lindstedt series, with diagnostics.

    Two slope estimates of ln|c_n| (a block mean over one continued
    fraction period and a least-squares fit over the last half) are
    averaged, the weighted-log tail of the continued fraction levels
    deeper than the computed order is added, and the result is
    exponentiated.  Rational rotation numbers get radius 0 outright.
    Raises UnstableEstimate when the two slopes disagree by more than
    unstable_tol, i.e. when the root test has not settled.
    """
    if series.order < 10:
        raise DomainError("need order >= 10 to extrapolate a radius")
    rho = series.rho
    rs = list(series.radius_estimates)
    if _rational_q(rho) is not None:
        return 0.0, {
            "k_hat": 0.0,
            "r_raw": rs,
            "reason": "rational rotation number: the series cannot converge",
            "two_B": math.inf,
            "delta": None,
        }
    lnc = series.ln_coeff_mags()
    K = series.order
    ladder = _cf_ladder(rho)
    two_B = 2.0 * math.fsum(t for _, t in ladder)
    tail = 2.0 * math.fsum(t for qk, t in ladder if qk > K)
    width = max((qk for qk, _ in ladder if qk <= max(2, K // 3)), default=3)
    width = max(3, min(width, K // 2))
    s_block = _block_slope(lnc, width)
    s_ls = _ls_slope(lnc)
    diagnostics = {
        "r_raw": rs,
        "slope_block": s_block,
        "slope_ls": s_ls,
        "block_width": width,
        "resolution_tail": tail,
        "two_B": two_B,
    }
    if abs(s_block - s_ls) > unstable_tol:
        raise UnstableEstimate(
            f"root-test slopes disagree ({s_block:.3f} vs {s_ls:.3f}); "
            "the coefficient sequence is still oscillating at this order",
            diagnostics,
        )
    ln_k_inv = 0.5 * (s_block + s_ls) + tail
    k_hat = math.exp(-ln_k_inv)
    diagnostics["k_hat"] = k_hat
    diagnostics["delta"] = ln_k_inv - two_B
    return k_hat, diagnostics
