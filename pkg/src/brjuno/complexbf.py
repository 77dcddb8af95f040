"""Complex Brjuno function on the upper half plane.

The boundary function -ln x on (0, 1) is lifted to the holomorphic
representative F(z) = -Li2(1/z)/pi, whose imaginary part on the two sides
of the slit [0, 1] reproduces +/- the boundary data.  Periodizing F over
integer translates and summing the weighted Moebius actions

    (L_g F)(z) = (a - cz) { F((dz - b)/(a - cz)) - F(-d/c) } - (det g / c) F'(-d/c)

over the monoid generated by the matrices (0 1; 1 m), m >= 1, yields a
holomorphic function whose imaginary part tends to the Brjuno function on
the boundary and whose real part jumps by pi/q across each rational p/q.

Truncation strategy: the monoid is cut at matrix entry d <= q_max and the
translation sum at |n| <= n_max.  For each element the n-window is summed
in closed form through digamma/trigamma evaluations of the two leading
terms of L_g F in powers of 1/(a - cz); only the few (g, n) pairs whose
denominator a - c(z + n) is small are evaluated through the dilogarithm
directly.  This keeps the literal double sum exact to far beyond the
reported tail estimate without an element-by-shell product loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np
import mpmath as mp

from .errors import (
    BranchCutError,
    DomainError,
    OnSlitError,
    PoleProximityError,
)
from .series import SeriesFunction, neg_log

__all__ = [
    "dilog",
    "DilogRep",
    "QuadratureRep",
    "cauchy_F",
    "PeriodizeResult",
    "periodize",
    "MonoidElement",
    "monoid_enumerate",
    "monoid_filter_enumerate",
    "Lg_action",
    "TruncationPolicy",
    "ComplexBrjunoResult",
    "complex_brjuno",
    "ScanRow",
    "JumpEstimate",
    "ScanResult",
    "boundary_scan",
]

_PI = math.pi
_ZETA2 = _PI * _PI / 6.0


# ---------------------------------------------------------------------------
# dilogarithm

def _bern_coeffs(count=64):
    # coefficients of Li2 as a series in u = -ln(1-z): sum B_k u^(k+1)/((k+1) k!)
    out = np.empty(count)
    fact = 1.0
    for k in range(count):
        if k > 0:
            fact *= k
        out[k] = float(mp.bernoulli(k)) / ((k + 1) * fact)
    return out


_BC = _bern_coeffs()


def _li2_u_series(z):
    # valid while |ln(1-z)| stays well inside 2 pi; callers arrange that
    u = -np.log1p(-z)
    acc = np.zeros_like(u)
    for k in range(len(_BC) - 1, -1, -1):
        acc = acc * u + _BC[k]
    return acc * u


def _li2_vec(z):
    """Principal-branch Li2 on complex arrays staying off [1, inf)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    az = np.abs(z)
    big = az >= 1.9
    if np.any(big):
        w = 1.0 / z[big]
        lg = np.log(-z[big])
        out[big] = -_li2_u_series(w) - _ZETA2 - 0.5 * lg * lg
    rest = ~big
    if np.any(rest):
        zr = z[rest]
        near1 = np.abs(1.0 - zr) < 0.5
        sub = np.empty_like(zr)
        if np.any(near1):
            w = 1.0 - zr[near1]
            # the z -> 1-z reflection; w = 0 (z = 1) gives pi^2/6 by limit
            lw = np.where(w == 0, 1.0, w)
            term = np.where(w == 0, 0.0, np.log(zr[near1]) * np.log(lw))
            sub[near1] = _ZETA2 - term - _li2_u_series(w)
        if np.any(~near1):
            sub[~near1] = _li2_u_series(zr[~near1])
        out[rest] = sub
    return out


def dilog(z) -> complex:
    """Principal-branch dilogarithm of a single point.

    Real arguments above 1 sit on the branch cut and are rejected; z = 1
    returns the limit value pi^2/6.
    """
    zc = complex(z)
    if zc.imag == 0.0:
        if zc.real > 1.0:
            raise BranchCutError("Li2 is cut along (1, inf) on the real axis")
        if zc.real == 1.0:
            return complex(_ZETA2)
    return complex(_li2_vec(np.array([zc]))[0])


# ---------------------------------------------------------------------------
# holomorphic representatives of boundary data

class DilogRep:
    """F(z) = -Li2(1/z)/pi, the representative of -ln x on (0, 1).

    Carries the analytic derivatives needed by the Moebius action and its
    far-field expansion.  All methods accept scalars or arrays.
    """

    tag = "neg_log"

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return -_li2_vec(1.0 / z) / _PI

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return -np.log(1.0 - 1.0 / z) / z / _PI

    def second(self, z):
        z = np.asarray(z, dtype=complex)
        lg = np.log(1.0 - 1.0 / z)
        return -(1.0 / (z * z * (z - 1.0)) - lg / (z * z)) / _PI

    def third(self, z):
        z = np.asarray(z, dtype=complex)
        lg = np.log(1.0 - 1.0 / z)
        g2 = (-3.0 / (z ** 3 * (z - 1.0))
              - 1.0 / (z ** 2 * (z - 1.0) ** 2)
              + 2.0 * lg / z ** 3)
        return -g2 / _PI

    def __call__(self, z):
        return self.value(z)


def _gauss_legendre_panels(n_points=16, panels_per_side=40):
    # dyadic panels toward both endpoints of (0, 1); nodes cached
    xg, wg = np.polynomial.legendre.leggauss(n_points)
    nodes = []
    weights = []
    edges = [0.5 * 2.0 ** (-k) for k in range(panels_per_side)] + [0.0]
    for i in range(panels_per_side):
        hi, lo = edges[i], edges[i + 1]
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        nodes.append(mid + half * xg)
        weights.append(half * wg)
        nodes.append(1.0 - (mid + half * xg))
        weights.append(half * wg)
    return np.concatenate(nodes), np.concatenate(weights)


_QUAD_NODES, _QUAD_WEIGHTS = _gauss_legendre_panels()


class QuadratureRep:
    """Cauchy-type representative (1/pi) * integral of f(t)/(t - z) dt.

    Endpoint-singularity-aware: dyadic Gauss-Legendre panels accumulate
    toward both endpoints, so integrable blowups like -ln t are handled at
    full accuracy.  Derivatives differentiate the kernel under the sign.
    """

    def __init__(self, f: SeriesFunction):
        self.f = f
        self.tag = getattr(f, "tag", "custom")
        self._fv = np.array([float(f(t)) for t in _QUAD_NODES])

    def _kernel_sum(self, z, power):
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        out = np.empty(flat.shape, dtype=complex)
        for i, zz in enumerate(flat):
            out[i] = np.sum(self._fv * _QUAD_WEIGHTS / (_QUAD_NODES - zz) ** power)
        return out.reshape(z.shape) / _PI

    def value(self, z):
        return self._kernel_sum(z, 1)

    def deriv(self, z):
        return self._kernel_sum(z, 2)

    def second(self, z):
        return 2.0 * self._kernel_sum(z, 3)

    def third(self, z):
        return 6.0 * self._kernel_sum(z, 4)

    def __call__(self, z):
        return self.value(z)


def cauchy_F(f: SeriesFunction, z) -> complex:
    """The transform (1/pi) * integral_0^1 f(t)/(t - z) dt off the slit.

    For the -ln boundary function the closed dilogarithm form is used;
    any other SeriesFunction goes through panel quadrature.
    """
    zc = complex(z)
    if zc.imag == 0.0 and 0.0 <= zc.real <= 1.0:
        raise OnSlitError("z lies on the slit [0, 1]")
    if getattr(f, "tag", None) == "neg_log":
        return complex(DilogRep().value(zc))
    return complex(QuadratureRep(f).value(zc))


# ---------------------------------------------------------------------------
# periodization

@dataclass(frozen=True)
class PeriodizeResult:
    value: complex
    tail_estimate: float
    n_max: int


def periodize(F, z, n_max: int) -> PeriodizeResult:
    """Symmetric translate sum sum_{|n| <= n_max} F(z + n).

    The tail estimate is the difference against the half-range partial
    sum, which dominates the O(1/n_max) defect of the symmetric sum for
    representatives decaying like 1/z.
    """
    zc = complex(z)
    if zc.imag <= 0:
        raise DomainError("periodize needs Im z > 0")
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    ns = np.arange(-n_max, n_max + 1)
    pts = zc + ns
    fn = F.value if hasattr(F, "value") else F
    try:
        vals = np.asarray(fn(pts), dtype=complex)
        if vals.shape != pts.shape:
            raise TypeError
    except Exception:
        vals = np.array([complex(fn(p)) for p in pts])
    half = n_max // 2
    mask = np.abs(ns) <= half
    s_full = complex(vals.sum())
    s_half = complex(vals[mask].sum())
    # shifting z by 1 slides the window one slot, so the periodicity defect
    # is exactly the edge terms; include them so the estimate covers it
    edges = abs(complex(fn(zc + n_max + 1))) + abs(complex(fn(zc - n_max)))
    return PeriodizeResult(s_full, abs(s_full - s_half) + edges, n_max)


def transfer_once(F, z, m_max: int = 240) -> complex:
    """One application of the complexified Gauss-map transfer operator.

    Computes -z * sum_m { F(1/z - m) - F(-m) } + sum_m F'(-m), both sums
    truncated at m_max with an Euler-Maclaurin tail correction: the large-m
    leading terms of the two sums cancel, leaving -F'(-(m_max+1/2))/(2z).
    """
    zc = complex(z)
    if zc.imag == 0.0 and 0.0 <= zc.real <= 1.0:
        raise OnSlitError("z lies on the slit [0, 1]")
    ms = np.arange(1, m_max + 1, dtype=float)
    fv = F.value if hasattr(F, "value") else F
    total = -zc * np.sum(np.asarray(fv(1.0 / zc - ms)) - np.asarray(fv(-ms + 0j)))
    total += np.sum(np.asarray(F.deriv(-ms + 0j)))
    tail = -complex(F.deriv(complex(-(m_max + 0.5)))) / (2.0 * zc)
    return complex(total + tail)


# ---------------------------------------------------------------------------
# the monoid

@dataclass(frozen=True)
class MonoidElement:
    a: int
    b: int
    c: int
    d: int
    word: tuple = ()

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def passes_membership(self) -> bool:
        if self.is_identity:
            return True
        return (self.d >= self.c >= self.a >= 0
                and self.d >= self.b >= self.a >= 0
                and abs(self.det) == 1)


_MONOID_CACHE: dict = {}


def monoid_enumerate(q_max: int):
    """All generator products with entry d <= q_max, by breadth-first search.

    Right-multiplication by the generator (0 1; 1 m) strictly increases d,
    so the search terminates; factorization into generators is unique, so
    no deduplication is needed.  The identity is included.  Results are
    cached and returned sorted by d.
    """
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    if q_max in _MONOID_CACHE:
        return _MONOID_CACHE[q_max]
    out = [MonoidElement(1, 0, 0, 1)]
    frontier = [(1, 0, 0, 1, ())]
    while frontier:
        nxt = []
        for a, b, c, d, w in frontier:
            m = 1
            while c + d * m <= q_max:
                g = (b, a + b * m, d, c + d * m, w + (m,))
                nxt.append(g)
                out.append(MonoidElement(*g[:4], word=g[4]))
                m += 1
        frontier = nxt
    out.sort(key=lambda g: (g.d, g.c, g.a, g.b))
    _MONOID_CACHE[q_max] = out
    return out


def monoid_filter_enumerate(q_max: int):
    """Independent enumeration by the inequality membership test.

    Scans all candidate integer matrices with d <= q_max and keeps those
    passing the two inequality chains with determinant +-1; serves as a
    cross-check oracle against the BFS generation.
    """
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    out = [MonoidElement(1, 0, 0, 1)]
    for d in range(1, q_max + 1):
        for c in range(1, d + 1):
            for a in range(0, c + 1):
                # need |ad - bc| = 1 with a <= b <= d
                for b in range(a, d + 1):
                    if abs(a * d - b * c) == 1:
                        out.append(MonoidElement(a, b, c, d))
    out.sort(key=lambda g: (g.d, g.c, g.a, g.b))
    return out


def Lg_action(g: MonoidElement, F, z) -> complex:
    """The weighted Moebius action of one monoid element at one point.

    The identity acts as F itself; for c >= 1 the two subtraction terms
    pin each term to vanish at +i*infinity.  F must expose value() and
    deriv(); the derivative at -d/c is taken analytically.  Any z off the
    slit [0, 1] is accepted so that composite representatives can be
    probed at the real pole points that composition requires.
    """
    zc = complex(z)
    if zc.imag == 0.0 and 0.0 <= zc.real <= 1.0:
        raise OnSlitError("z lies on the slit [0, 1]")
    if g.is_identity:
        fn = F.value if hasattr(F, "value") else F
        return complex(fn(zc))
    if g.c == 0:
        raise DomainError("non-identity elements with c = 0 are not in the monoid")
    den = g.a - g.c * zc
    if abs(den) < 1e-15:
        raise PoleProximityError(f"a - cz = {den} too close to a pole")
    u = (g.d * zc - g.b) / den
    pole = -g.d / g.c
    fv = F.value if hasattr(F, "value") else F
    val = den * (complex(fv(u)) - complex(fv(pole)))
    return val - (g.det / g.c) * complex(F.deriv(pole))


# ---------------------------------------------------------------------------
# digamma / trigamma on complex arrays

_B2K = np.array([float(mp.bernoulli(2 * k)) for k in range(1, 8)])


def _psi0_shifted(w):
    # asymptotic digamma after pushing |w| up by ten recurrence steps
    acc = np.zeros_like(w)
    for j in range(10):
        acc += 1.0 / (w + j)
    ws = w + 10.0
    inv2 = 1.0 / (ws * ws)
    s = np.zeros_like(w)
    for k in range(len(_B2K) - 1, -1, -1):
        s = (s + _B2K[k] / (2 * (k + 1))) * inv2
    return np.log(ws) - 0.5 / ws - s - acc


def _cot_pi(w):
    # exact +-i limit beyond |Im| = 20 (correct to ~1e-55) avoids overflow
    out = np.empty_like(w)
    far = np.abs(w.imag) >= 20.0
    if np.any(far):
        out[far] = -1j * np.sign(w.imag[far])
    if np.any(~far):
        out[~far] = 1.0 / np.tan(_PI * w[~far])
    return out


def _inv_sin2_pi(w):
    out = np.zeros_like(w)
    near = np.abs(w.imag) < 20.0
    if np.any(near):
        s = np.sin(_PI * w[near])
        out[near] = 1.0 / (s * s)
    return out


def _psi0(w):
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    neg = w.real < 0.5
    if np.any(neg):
        out[neg] = _psi0_shifted(1.0 - w[neg]) - _PI * _cot_pi(w[neg])
    if np.any(~neg):
        out[~neg] = _psi0_shifted(w[~neg])
    return out


def _psi1_shifted(w):
    acc = np.zeros_like(w)
    for j in range(10):
        acc += 1.0 / (w + j) ** 2
    ws = w + 10.0
    inv = 1.0 / ws
    inv2 = inv * inv
    s = np.zeros_like(w)
    for k in range(len(_B2K) - 1, -1, -1):
        s = (s + _B2K[k]) * inv2
    return inv + 0.5 * inv2 + s * inv + acc


def _psi1(w):
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    neg = w.real < 0.5
    if np.any(neg):
        out[neg] = -_psi1_shifted(1.0 - w[neg]) + _PI * _PI * _inv_sin2_pi(w[neg])
    if np.any(~neg):
        out[~neg] = _psi1_shifted(w[~neg])
    return out


# ---------------------------------------------------------------------------
# the monoid-periodization double sum

@dataclass(frozen=True)
class TruncationPolicy:
    """Knobs for the double-sum truncation.

    q_max bounds the matrix entry d; n_max is the symmetric translation
    range; series_tol feeds internal series cutoffs.  switch_radius is the
    size of |a - c(z+n)| below which a pair is evaluated through the
    dilogarithm instead of the two-term far expansion; bits > 53 switches
    to the slow arbitrary-precision path, required once Im z < 1e-6.
    """

    q_max: int = 240
    n_max: int = 1024
    series_tol: float = 1e-12
    bits: int = 53
    switch_radius: float = 32.0

    def __post_init__(self):
        if self.q_max < 1 or self.n_max < 1:
            raise DomainError("q_max and n_max must be >= 1")
        if self.series_tol <= 0:
            raise DomainError("series_tol must be positive")


@dataclass(frozen=True)
class ComplexBrjunoResult:
    value: complex
    tail_estimate: float
    shells: tuple
    unreliable: bool
    q_max: int
    n_max: int

    def to_dict(self):
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "tail_estimate": self.tail_estimate,
            "shell_decay": list(self.shells),
            "unreliable": self.unreliable,
            "q_max": self.q_max,
            "n_max": self.n_max,
        }


_REP = DilogRep()


class _MonoidTables:
    """Element arrays plus pole-local F data, shared across evaluations."""

    def __init__(self, q_max: int):
        elems = [g for g in monoid_enumerate(q_max) if not g.is_identity]
        self.a = np.array([g.a for g in elems], dtype=float)
        self.b = np.array([g.b for g in elems], dtype=float)
        self.c = np.array([g.c for g in elems], dtype=float)
        self.d = np.array([g.d for g in elems], dtype=float)
        self.det = np.array([g.det for g in elems], dtype=float)
        pole = -self.d / self.c
        self.F_pole = np.asarray(_REP.value(pole + 0j))
        self.dF_pole = np.asarray(_REP.deriv(pole + 0j))
        # far-field weights: L_gF ~ P2/(a-cw) + P3/(a-cw)^2
        self.P2 = np.asarray(_REP.second(pole + 0j)) / (2.0 * self.c * self.c)
        self.P3 = self.det * np.asarray(_REP.third(pole + 0j)) / (6.0 * self.c ** 3)
        self.dvals = np.array([g.d for g in elems], dtype=int)

    def shell_slices(self, q_max: int):
        # head plus dyadic shells in d: [1, Q/8], (Q/8, Q/4], (Q/4, Q/2], (Q/2, Q]
        edges = sorted({0, q_max // 8, q_max // 4, q_max // 2, q_max})
        slices = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            i0 = np.searchsorted(self.dvals, lo, side="right")
            i1 = np.searchsorted(self.dvals, hi, side="right")
            if i1 > i0:
                slices.append(slice(i0, i1))
        return slices


_TABLE_CACHE: dict = {}


def _tables(q_max: int) -> _MonoidTables:
    if q_max not in _TABLE_CACHE:
        _TABLE_CACHE[q_max] = _MonoidTables(q_max)
    return _TABLE_CACHE[q_max]


def _window_sums(zc, a, c, P2, P3, n_max):
    # sum over |n| <= n_max of P2/(a - c(z+n)) + P3/(a - c(z+n))^2,
    # in closed form: a - c(z+n) = -c (zeta + n) with zeta = z - a/c
    zeta = zc - a / c
    s1 = _psi0(zeta + (n_max + 1.0)) - _psi0(zeta - float(n_max))
    s2 = _psi1(zeta - float(n_max)) - _psi1(zeta + (n_max + 1.0))
    return -(P2 / c) * s1 + (P3 / (c * c)) * s2


def _near_pairs(zc, a, c, radius, n_max):
    # integer translates n with |a - c(z+n)| < radius, per element
    mu = a / c - zc.real
    half = radius / c
    lo = np.ceil(mu - half).astype(int)
    hi = np.floor(mu + half).astype(int)
    np.clip(lo, -n_max, n_max + 1, out=lo)
    np.clip(hi, -n_max - 1, n_max, out=hi)
    counts = np.maximum(0, hi - lo + 1)
    total = int(counts.sum())
    if total == 0:
        return (np.empty(0, dtype=int), np.empty(0, dtype=int))
    idx = np.repeat(np.arange(len(a)), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    pos = np.arange(total) - np.repeat(starts, counts)
    ns = np.repeat(lo, counts) + pos
    return idx, ns


def _eval_slice(zc, T: _MonoidTables, sl: slice, policy: TruncationPolicy):
    a, b = T.a[sl], T.b[sl]
    c, det = T.c[sl], T.det[sl]
    Fp, dFp = T.F_pole[sl], T.dF_pole[sl]
    P2, P3 = T.P2[sl], T.P3[sl]
    n_max = policy.n_max

    far_full = _window_sums(zc, a, c, P2, P3, n_max)
    far_half = _window_sums(zc, a, c, P2, P3, n_max // 2)

    idx, ns = _near_pairs(zc, a, c, policy.switch_radius, n_max)
    exact = asym = 0.0
    asym_half = 0.0
    if len(idx):
        w = zc + ns
        den = a[idx] - c[idx] * w
        small = np.abs(den) < 1e-15
        if np.any(small):
            raise PoleProximityError("a - c(z+n) vanished within 1e-15")
        u = (T.d[sl][idx] * w - b[idx]) / den
        terms = den * (_li2_vec(1.0 / u) * (-1.0 / _PI) - Fp[idx]) \
            - (det[idx] / c[idx]) * dFp[idx]
        exact = complex(terms.sum())
        asym_terms = P2[idx] / den + P3[idx] / (den * den)
        asym = complex(asym_terms.sum())
        in_half = np.abs(ns) <= n_max // 2
        asym_half = complex(asym_terms[in_half].sum())
        exact_half = complex(terms[in_half].sum())
    else:
        exact_half = 0.0

    total = complex(far_full.sum()) - asym + exact
    total_half = complex(far_half.sum()) - asym_half + exact_half
    return total, total_half


def _identity_sums(zc, n_max):
    ns = np.arange(-n_max, n_max + 1)
    vals = _REP.value(zc + ns)
    half = np.abs(ns) <= n_max // 2
    return complex(vals.sum()), complex(vals[half].sum())


def _complex_brjuno_double(zc, policy):
    T = _tables(policy.q_max)
    shells = []
    total = 0.0 + 0.0j
    total_half = 0.0 + 0.0j
    id_full, id_half = _identity_sums(zc, policy.n_max)
    first = True
    for sl in T.shell_slices(policy.q_max):
        s, sh = _eval_slice(zc, T, sl, policy)
        if first:
            s, sh = s + id_full, sh + id_half
            first = False
        shells.append(abs(s))
        total += s
        total_half += sh
    if first:  # no non-identity elements at all (q_max = 0 impossible; safety)
        total, total_half = id_full, id_half
        shells.append(abs(total))
    tail = abs(total - total_half)
    mags = shells[1:] if len(shells) > 1 else shells
    unreliable = any(mags[i + 1] > mags[i] * 1.2 + policy.series_tol
                     for i in range(len(mags) - 1))
    tail_estimate = (shells[-1] if len(shells) > 1 else 0.0) + tail
    return ComplexBrjunoResult(total, tail_estimate, tuple(shells), unreliable,
                               policy.q_max, policy.n_max)


def _complex_brjuno_mp(zc, policy):
    """Arbitrary-precision path for evaluations very close to the boundary."""
    with mp.workprec(policy.bits):
        z = mp.mpc(zc.real, zc.imag)
        n_max = policy.n_max

        def F(w):
            return -mp.polylog(2, 1 / w) / mp.pi

        def dF(w):
            return -mp.log(1 - 1 / w) / w / mp.pi

        def d2F(w):
            lg = mp.log(1 - 1 / w)
            return -(1 / (w * w * (w - 1)) - lg / (w * w)) / mp.pi

        def d3F(w):
            lg = mp.log(1 - 1 / w)
            g2 = (-3 / (w ** 3 * (w - 1)) - 1 / (w ** 2 * (w - 1) ** 2)
                  + 2 * lg / w ** 3)
            return -g2 / mp.pi

        total = mp.mpc(0)
        total_half = mp.mpc(0)
        shells_acc = []
        elems = monoid_enumerate(policy.q_max)
        edges = sorted({0, policy.q_max // 8, policy.q_max // 4,
                        policy.q_max // 2, policy.q_max})
        half_n = n_max // 2
        for lo_d, hi_d in zip(edges[:-1], edges[1:]):
            s = mp.mpc(0)
            sh = mp.mpc(0)
            if lo_d == 0:
                for n in range(-n_max, n_max + 1):
                    v = F(z + n)
                    s += v
                    if abs(n) <= half_n:
                        sh += v
            for g in elems:
                if g.is_identity or not (lo_d < g.d <= hi_d):
                    continue
                pole = mp.mpf(-g.d) / g.c
                Fp, dFp = F(pole), dF(pole)
                P2 = d2F(pole) / (2 * g.c * g.c)
                P3 = g.det * d3F(pole) / (6 * g.c ** 3)
                zeta = z - mp.mpf(g.a) / g.c
                for N, acc_is_full in ((n_max, True), (half_n, False)):
                    s1 = mp.psi(0, zeta + N + 1) - mp.psi(0, zeta - N)
                    s2 = mp.psi(1, zeta - N) - mp.psi(1, zeta + N + 1)
                    contrib = -(P2 / g.c) * s1 + (P3 / (g.c * g.c)) * s2
                    if acc_is_full:
                        s += contrib
                    else:
                        sh += contrib
                mu = float(mp.mpf(g.a) / g.c) - zc.real
                halfw = policy.switch_radius / g.c
                for n in range(math.ceil(mu - halfw), math.floor(mu + halfw) + 1):
                    if abs(n) > n_max:
                        continue
                    w = z + n
                    den = g.a - g.c * w
                    if abs(den) < mp.mpf("1e-15") * mp.mpf(2) ** (53 - policy.bits):
                        raise PoleProximityError("pole hit in extended-precision path")
                    u = (g.d * w - g.b) / den
                    term = den * (F(u) - Fp) - mp.mpf(g.det) / g.c * dF(pole)
                    corr = P2 / den + P3 / (den * den)
                    s += term - corr
                    if abs(n) <= half_n:
                        sh += term - corr
            shells_acc.append(abs(s))
            total += s
            total_half += sh
        value = complex(total)
        tail = float(abs(total - total_half))
        mags = [float(m) for m in shells_acc[1:]] or [float(m) for m in shells_acc]
        unreliable = any(mags[i + 1] > mags[i] * 1.2 + policy.series_tol
                         for i in range(len(mags) - 1))
        tail_estimate = (float(shells_acc[-1]) if len(shells_acc) > 1 else 0.0) + tail
    return ComplexBrjunoResult(value, tail_estimate,
                               tuple(float(m) for m in shells_acc),
                               unreliable, policy.q_max, policy.n_max)


def complex_brjuno(z, policy: Optional[TruncationPolicy] = None) -> ComplexBrjunoResult:
    """Truncated double sum for the complexified Brjuno function at z.

    Requires Im z > 0.  Points with Im z < 1e-6 need policy.bits > 53:
    cancellation against the boundary grows like |ln Im z| and the double
    path is no longer trustworthy there.  The result carries the last-
    shell magnitude plus the half-range window difference as an empirical
    tail estimate and flags non-decreasing shell contributions.
    """
    if policy is None:
        policy = TruncationPolicy()
    zc = complex(z)
    if zc.imag <= 0.0:
        raise DomainError("complex_brjuno needs Im z > 0")
    if zc.imag < 1e-6:
        if policy.bits <= 53:
            raise DomainError(
                "Im z < 1e-6 requires an extended-precision policy (bits > 53)")
        return _complex_brjuno_mp(zc, policy)
    if policy.bits > 53:
        return _complex_brjuno_mp(zc, policy)
    return _complex_brjuno_double(zc, policy)


# ---------------------------------------------------------------------------
# boundary scans

@dataclass(frozen=True)
class ScanRow:
    x: float
    re: float
    im: float
    tail_estimate: float
    unreliable: bool


@dataclass(frozen=True)
class JumpEstimate:
    p: int
    q: int
    x: float
    jump: float
    expected: float


@dataclass(frozen=True)
class ScanResult:
    eps: float
    rows: tuple
    jumps: tuple

    @property
    def any_unreliable(self):
        return any(r.unreliable for r in self.rows)


def _rationals_in(x0, x1, q_cap, limit):
    found = []
    for q in range(1, q_cap + 1):
        p_lo = math.floor(x0 * q) + 1
        p_hi = math.ceil(x1 * q) - 1
        for p in range(p_lo, p_hi + 1):
            if math.gcd(abs(p), q) == 1 and x0 < p / q < x1:
                found.append((p, q))
    found.sort(key=lambda pq: (pq[1], pq[0]))
    return found[:limit]


def boundary_scan(x0: float, x1: float, eps: float, samples: int,
                  policy: Optional[TruncationPolicy] = None,
                  jump_q_max: int = 12, jump_delta: float = 1e-3,
                  max_jumps: int = 64) -> ScanResult:
    """Sample the boundary behavior of the double sum along Im z = eps.

    Emits (x, Re, Im) rows over [x0, x1] and, for each rational p/q with
    q <= jump_q_max inside the window, estimates the decreasing real-part
    jump by differencing at p/q -+ jump_delta; the expected size is pi/q.
    """
    if policy is None:
        policy = TruncationPolicy()
    if samples < 2:
        raise DomainError("need at least two samples")
    if eps <= 0:
        raise DomainError("eps must be positive")
    xs = np.linspace(x0, x1, samples)
    rows = []
    for x in xs:
        r = complex_brjuno(complex(x, eps), policy)
        rows.append(ScanRow(float(x), r.value.real, r.value.imag,
                            r.tail_estimate, r.unreliable))
    jumps = []
    # a step smeared by the Poisson kernel at height eps recovers only the
    # fraction (2/pi) atan(delta/eps) of its size when differenced at -+delta
    capture = (2.0 / _PI) * math.atan(jump_delta / eps)
    for p, q in _rationals_in(x0, x1, jump_q_max, max_jumps):
        x = p / q
        left = complex_brjuno(complex(x - jump_delta, eps), policy)
        right = complex_brjuno(complex(x + jump_delta, eps), policy)
        raw = left.value.real - right.value.real
        jumps.append(JumpEstimate(p, q, x, raw / capture, _PI / q))
    return ScanResult(eps, tuple(rows), tuple(jumps))
