import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brjuno.cf import expand
from brjuno.errors import (
    DomainError,
    SmallDivisorZero,
    SolvabilityViolation,
    UnstableEstimate,
)
from brjuno.exactreal import MPFloat, QuadraticSurd, golden_mean, to_mpf
from brjuno.lindstedt import (
    LindstedtSeries,
    critical_constant_estimate,
    default_bits,
    semi_standard_series,
    small_divisor,
    standard_map_series,
)

# frozen oracles, mpmath 40 dps:
#   2 (cos(2 pi (sqrt(5)-1)/2) - 1)
SMALLDIV1_GOLD = -3.47473775615663980303648076273
#   ln(1/g)/(1-g) at the golden mean g
B_GOLDEN = 1.25982891379441021985842991132

GOLDEN = golden_mean()
SQRT2M1 = QuadraticSurd(-1, 1, 2, 1)


def _prefixed_surd(prefix):
    """Quadratic surd whose expansion starts with the given digits and
    continues with the golden tail."""
    x = GOLDEN
    for a in reversed(prefix):
        x = (a + x).reciprocal()
    return x


def _cf_fraction(digits):
    x = Fraction(0)
    for a in reversed(digits):
        x = 1 / (a + x)
    return x


class TestSmallDivisor:
    def test_half_resonances(self):
        assert small_divisor(1, Fraction(1, 2)).value == -4.0
        assert small_divisor(2, Fraction(1, 2)).value == 0.0
        assert small_divisor(0, GOLDEN).value == 0.0

    def test_golden_value(self):
        assert abs(small_divisor(1, GOLDEN, prec=120).value - SMALLDIV1_GOLD) < 1e-14

    def test_sign_symmetry(self):
        for nu in (1, 3, 7):
            assert small_divisor(nu, GOLDEN).value == small_divisor(-nu, GOLDEN).value

    def test_irrational_range(self):
        for nu in range(1, 60):
            v = small_divisor(nu, GOLDEN, prec=120).value
            assert -4.0 < v < 0.0

    @given(st.integers(min_value=1, max_value=400), st.fractions(min_value=0, max_value=1))
    @settings(max_examples=120, deadline=None)
    def test_rational_zero_iff_divides(self, nu, rho):
        v = small_divisor(nu, rho).value
        if (nu * rho.numerator) % rho.denominator == 0:
            assert v == 0.0
        else:
            assert -4.0 <= v < 0.0

    def test_minima_at_convergent_denominators(self):
        mags = [abs(small_divisor(nu, GOLDEN, prec=200).value) for nu in range(1, 201)]
        running, mins = 5.0, []
        for nu, v in enumerate(mags, start=1):
            if v < running:
                running = v
                mins.append(nu)
        qs = {q for q in expand(GOLDEN, 1, max_depth=12, stop_at_period=False).q if q <= 200}
        assert set(mins) == qs

    def test_divisor_beta_sandwich(self):
        exp = expand(GOLDEN, 1, max_depth=12, stop_at_period=False)
        betas = exp.beta_floats()
        for n in range(1, len(exp.q)):
            q = exp.q[n]
            if not 2 <= q <= 200:
                continue
            gam = abs(small_divisor(q, GOLDEN, prec=200).value)
            assert 16 * betas[n] ** 2 <= gam <= 4 * math.pi ** 2 * betas[n] ** 2


class TestSemiStandard:
    def test_first_coefficient(self):
        s = semi_standard_series(GOLDEN, 3)
        g1 = small_divisor(1, GOLDEN, prec=120).value
        want = 1.0 / (4 * math.pi * 1j * g1)
        assert abs(complex(s.coeffs[0]) - want) < 1e-15
        assert abs(s.radius_estimates[0] - 1 / abs(want)) < 1e-10

    def test_single_mode_grading(self):
        s = semi_standard_series(GOLDEN, 6)
        assert len(s.coeffs) == 6
        with mp.workprec(s.bits):
            for k in (1, 2, 5):
                ratio = s.eval_order(k, 0.3) / s.coeffs[k - 1]
                assert abs(ratio - mp.e ** (2j * mp.pi * k * mp.mpf(0.3))) < 1e-30

    def test_rational_raises_at_denominator(self):
        with pytest.raises(SmallDivisorZero) as ei:
            semi_standard_series(Fraction(1, 2), 5)
        assert ei.value.order == 2
        for p, q in ((1, 3), (2, 5), (3, 7), (5, 8)):
            with pytest.raises(SmallDivisorZero) as ei:
                semi_standard_series(Fraction(p, q), q + 2)
            assert ei.value.order == q
        # below the resonance the series is fine
        assert semi_standard_series(Fraction(3, 7), 6).order == 6

    def test_mpfloat_resolution_guard(self):
        rho = MPFloat(Fraction(2, 7), 53)
        with pytest.raises(SmallDivisorZero) as ei:
            semi_standard_series(rho, 10)
        assert ei.value.order == 7
        assert "precision" in str(ei.value)

    def test_substitution_residual(self):
        # plug the truncated polynomial into the difference equation and
        # extract coefficients on a circle; relative residual < 1e-10
        for rho_s in (GOLDEN, SQRT2M1):
            K = 15
            s = semi_standard_series(rho_s, K)
            with mp.workprec(256):
                rho = to_mpf(rho_s, 256)
                cs = [+c for c in s.coeffs]
                r = mp.mpf("0.01")
                M = 64
                rot = mp.e ** (2j * mp.pi * rho)

                def u_of(w):
                    return mp.fsum(cs[m - 1] * w ** m for m in range(1, K + 1))

                vals = []
                for j in range(M):
                    w = r * mp.e ** (2j * mp.pi * j / M)
                    lhs = u_of(w * rot) - 2 * u_of(w) + u_of(w / rot)
                    rhs = w * mp.e ** (2j * mp.pi * u_of(w)) / (4 * mp.pi * 1j)
                    vals.append(lhs - rhs)
                for n in range(1, K + 1):
                    coef = mp.fsum(
                        vals[j] * mp.e ** (-2j * mp.pi * j * n / M) for j in range(M)
                    ) / (M * r ** n)
                    scale = abs(cs[n - 1]) * abs(small_divisor(n, rho_s, prec=200).value)
                    assert abs(coef) / scale < 1e-10

    def test_precision_consistency(self):
        a = semi_standard_series(GOLDEN, 12, prec=200)
        b = semi_standard_series(GOLDEN, 12)
        with mp.workprec(200):
            rel = abs(a.coeffs[11] - b.coeffs[11]) / abs(b.coeffs[11])
            assert rel < mp.mpf(2) ** -150
        assert b.bits == default_bits(12) == 160

    def test_order_validation(self):
        with pytest.raises(DomainError):
            semi_standard_series(GOLDEN, 0)


class TestStandardMap:
    def test_order_one_is_scaled_sine(self):
        s = standard_map_series(GOLDEN, 4)
        g1 = small_divisor(1, GOLDEN, prec=120).value
        assert abs(complex(s.coeffs[0][1]) - 1 / (4 * math.pi * 1j * g1)) < 1e-15
        with mp.workprec(s.bits):
            for phi in (0.1, 0.37, 0.81):
                want = math.sin(2 * math.pi * phi) / (2 * math.pi * g1)
                assert abs(complex(s.eval_order(1, phi)) - want) < 1e-12

    def test_mode_structure(self):
        s = standard_map_series(GOLDEN, 10)
        with mp.workprec(s.bits + 16):
            for k in range(1, 11):
                modes = s.coeffs[k - 1]
                assert 0 not in modes
                for nu, v in modes.items():
                    assert abs(nu) <= k and (nu - k) % 2 == 0
                    assert abs(mp.conj(modes[-nu]) - v) == 0
                assert max(abs(nu) for nu in modes) == k

    def test_reality_at_angles(self):
        s = standard_map_series(GOLDEN, 12)
        for k in (1, 2, 3, 8, 12):
            for j in range(32):
                w = s.eval_order(k, (j + 0.21) / 32)
                assert abs(mp.im(w)) <= 1e-12 * max(1.0, abs(mp.re(w)))

    def test_resonance_location(self):
        with pytest.raises(SmallDivisorZero) as ei:
            standard_map_series(Fraction(1, 3), 5)
        assert (ei.value.order, ei.value.mode) == (3, 3)
        with pytest.raises(SmallDivisorZero) as ei:
            standard_map_series(Fraction(1, 2), 4)
        assert (ei.value.order, ei.value.mode) == (2, 2)

    def test_substitution_residual(self):
        K = 10
        s = standard_map_series(GOLDEN, K)
        with mp.workprec(256):
            rho = to_mpf(GOLDEN, 256)
            rK = mp.mpf("0.05")
            M = 32

            def u_full(phi, Kv):
                return mp.fsum(Kv ** k * s.eval_order(k, phi) for k in range(1, K + 1))

            for phi0 in (0.037, 0.41, 0.77):
                phi = mp.mpf(str(phi0))
                vals = []
                for j in range(M):
                    Kv = rK * mp.e ** (2j * mp.pi * j / M)
                    lhs = u_full(phi + rho, Kv) - 2 * u_full(phi, Kv) + u_full(phi - rho, Kv)
                    rhs = Kv / (2 * mp.pi) * mp.sin(2 * mp.pi * (phi + u_full(phi, Kv)))
                    vals.append(lhs - rhs)
                for k in range(1, K + 1):
                    coef = mp.fsum(
                        vals[j] * mp.e ** (-2j * mp.pi * j * k / M) for j in range(M)
                    ) / (M * rK ** k)
                    scale = float(max(abs(v) for v in s.coeffs[k - 1].values()))
                    assert abs(coef) / scale < 1e-10

    def test_solvability_tolerance_validation(self):
        with pytest.raises(DomainError):
            standard_map_series(GOLDEN, 5, mode0_tol=0.0)

    def test_radius_estimates_settle(self):
        s = standard_map_series(GOLDEN, 20)
        rs = s.radius_estimates
        assert all(r > 0 for r in rs)
        assert max(rs[9:]) < min(rs[:3])
        assert 1.0 < rs[-1] < 2.5


class TestCriticalConstant:
    def test_golden_box_and_doubling(self):
        k60, d60 = critical_constant_estimate(semi_standard_series(GOLDEN, 60))
        k30, d30 = critical_constant_estimate(semi_standard_series(GOLDEN, 30))
        assert abs(d60["two_B"] - 2 * B_GOLDEN) < 1e-8
        assert -2.7 < d60["delta"] < -2.35
        assert abs(d60["delta"] - d30["delta"]) < 0.2
        assert 0.9 < k60 < 1.1

    def test_constant_type_uniformity(self):
        dg = critical_constant_estimate(semi_standard_series(GOLDEN, 60))[1]["delta"]
        d2 = critical_constant_estimate(semi_standard_series(SQRT2M1, 60))[1]["delta"]
        assert abs(dg - d2) < 0.55

    def test_rational_convention(self):
        k, d = critical_constant_estimate(semi_standard_series(Fraction(5, 121), 20))
        assert k == 0.0
        assert "rational" in d["reason"]
        assert d["two_B"] == math.inf

    def test_unstable_detection(self):
        x = _prefixed_surd([1] * 8 + [10 ** 8])
        s = semi_standard_series(x, 40)
        with pytest.raises(UnstableEstimate) as ei:
            critical_constant_estimate(s)
        diag = ei.value.diagnostics
        assert abs(diag["slope_block"] - diag["slope_ls"]) > 0.75
        # the clean golden case at the same order stays quiet
        critical_constant_estimate(semi_standard_series(GOLDEN, 40))

    def test_liouville_like_radius_collapse(self):
        rho = MPFloat(_cf_fraction([2, 15, 10 ** 6, 10 ** 12]), 400)
        rs = semi_standard_series(rho, 40).radius_estimates
        early = sum(rs[4:14]) / 10
        late = sum(rs[29:39]) / 10
        assert late < 0.5 * early

    def test_order_floor(self):
        with pytest.raises(DomainError):
            critical_constant_estimate(semi_standard_series(GOLDEN, 9))

    def test_standard_map_estimate(self):
        k, d = critical_constant_estimate(standard_map_series(GOLDEN, 20))
        assert 0.3 < k < 3.0
        assert d["resolution_tail"] > 0

    def test_diagnostics_keys(self):
        _, d = critical_constant_estimate(semi_standard_series(GOLDEN, 30))
        for key in ("r_raw", "slope_block", "slope_ls", "block_width",
                    "resolution_tail", "two_B", "delta", "k_hat"):
            assert key in d

    def test_to_dict(self):
        s = semi_standard_series(GOLDEN, 12)
        d = s.to_dict()
        assert d["map_kind"] == "semi_standard"
        assert d["order"] == 12 and d["bits"] == 160
        assert len(d["radius_estimates"]) == 12 == len(d["ln_coeff_mags"])
