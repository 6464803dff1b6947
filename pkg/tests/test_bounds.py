"""Frozen expected values below were produced by tests/oracles/oracle_bounds.py
(hand-simplified closed forms, independent arithmetic path)."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridfreq import bounds as B
from gridfreq.errors import ValidationError

INF = math.inf

MU_211 = 0.785398163397  # pi/4
MU_222 = 0.616850275068  # pi^2/16
MAZYA_211 = 1.17944150666e-13
MAZYA_222 = 2.31193199783e-08
THETA_11 = 5.8972075333e-16
THETA_22 = 1.33625739064e-19
CAP_POINT_P4_N2 = 1.86168453546  # 16 pi / 27


class TestExponents:
    def test_admissible_subcritical(self):
        e = B.Exponents(2, 1.5, 4.0)
        assert e.p_star == pytest.approx(6.0)

    def test_supercritical_q_rejected(self):
        with pytest.raises(ValidationError):
            B.Exponents(2, 1.5, 7.0)

    def test_q_at_critical_allowed(self):
        B.Exponents(2, 1.5, 6.0)

    def test_infinite_q_needs_p_above_N(self):
        B.Exponents(2, 3.0, INF)
        with pytest.raises(ValidationError):
            B.Exponents(2, 2.0, INF)

    def test_infinite_q_inverse_is_zero(self):
        assert B.Exponents(2, 3.0, INF).inv_q == 0.0

    @given(st.floats(1.0, 10.0), st.floats(1.0, 10.0))
    @settings(max_examples=50)
    def test_admissibility_table(self, p, q):
        N = 2
        try:
            e = B.Exponents(N, p, q)
        except ValidationError:
            assert p < N and q > N * p / (N - p) + 1e-12
        else:
            assert e.p >= 1 and e.q >= 1


class TestMuLowerBound:
    def test_ball_p1_q1(self):
        e = B.Exponents(2, 1.0, 1.0)
        v = B.mu_lower_bound(e, volume=math.pi, diameter=2.0)
        assert v == pytest.approx(MU_211, rel=1e-11)
        assert v == pytest.approx(math.pi / 4.0, rel=1e-12)

    def test_ball_p2_q2(self):
        e = B.Exponents(2, 2.0, 2.0)
        v = B.mu_lower_bound(e, volume=math.pi, diameter=2.0)
        assert v == pytest.approx(MU_222, rel=1e-11)
        assert v == pytest.approx(math.pi**2 / 16.0, rel=1e-12)

    @given(st.floats(0.2, 5.0))
    @settings(max_examples=40)
    def test_dilation_homogeneity(self, t):
        e = B.Exponents(2, 2.0, 2.0)
        base = B.mu_lower_bound(e, math.pi, 2.0)
        scaled = B.mu_lower_bound(e, t**2 * math.pi, t * 2.0)
        assert scaled == pytest.approx(base * t**-2.0, rel=1e-12)

    def test_rejects_q_below_p(self):
        with pytest.raises(ValidationError):
            B.mu_lower_bound(B.Exponents(2, 2.0, 1.0), math.pi, 2.0)

    def test_infinite_q(self):
        e = B.Exponents(2, 3.0, INF)
        v = B.mu_lower_bound(e, math.pi, 2.0)
        assert v > 0.0 and math.isfinite(v)


class TestExtensionConstants:
    def test_alpha_22(self):
        c = B.extension_constants(B.Exponents(2, 2.0, 2.0), math.sqrt(2))
        assert c.alpha == pytest.approx(41472.0, rel=1e-12)
        assert c.A == pytest.approx(c.alpha, rel=1e-12)

    def test_alpha_21(self):
        c = B.extension_constants(B.Exponents(2, 1.0, 1.0), math.sqrt(2))
        assert c.alpha == pytest.approx(143327232.0, rel=1e-12)

    def test_unit_eccentricity_large_p_limit(self):
        # every factor of the function-extension norm tends to 1; the
        # gradient norm keeps the residual 6^(p/p) factor
        c = B.extension_constants(B.Exponents(2, 1e6, INF), 1.0)
        assert c.B == pytest.approx(1.0, rel=1e-4)
        assert c.A == pytest.approx(6.0, rel=1e-4)

    def test_eccentricity_below_one_rejected(self):
        with pytest.raises(ValidationError):
            B.extension_constants(B.Exponents(2, 2.0, 2.0), 0.5)

    @given(st.floats(1.0, 20.0))
    @settings(max_examples=30)
    def test_monotone_in_eccentricity(self, ecc):
        e = B.Exponents(2, 2.0, 2.0)
        c1 = B.extension_constants(e, ecc)
        c2 = B.extension_constants(e, ecc * 1.5)
        assert c2.A > c1.A and c2.B > c1.B


class TestMazyaConstant:
    def test_frozen_value_p1(self):
        v = B.mazya_constant(B.Exponents(2, 1.0, 1.0), 0.5)
        assert v == pytest.approx(MAZYA_211, rel=1e-11)

    def test_frozen_value_p2(self):
        v = B.mazya_constant(B.Exponents(2, 2.0, 2.0), 0.5)
        assert v == pytest.approx(MAZYA_222, rel=1e-11)

    def test_vanishes_at_upper_ratio_limit(self):
        e = B.Exponents(2, 1.0, 1.0)
        near = B.mazya_constant(e, 1.0 / math.sqrt(2) - 1e-9)
        assert near < B.mazya_constant(e, 0.5) * 1e-6

    def test_ratio_out_of_range_rejected(self):
        e = B.Exponents(2, 1.0, 1.0)
        with pytest.raises(ValidationError):
            B.mazya_constant(e, 0.0)
        with pytest.raises(ValidationError):
            B.mazya_constant(e, 1.0 / math.sqrt(2))

    @given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
    @settings(max_examples=40)
    def test_increasing_in_mu(self, mu1, mu2):
        lo, hi = sorted((mu1, mu2))
        if hi - lo < 1e-9:
            return
        e = B.Exponents(2, 2.0, 2.0)
        assert B.mazya_constant(e, 0.5, mu_value=lo) < B.mazya_constant(
            e, 0.5, mu_value=hi
        )


class TestThetaLowerBound:
    def test_theta_11(self):
        t = B.theta_lower_bound(B.Exponents(2, 1.0, 1.0), 1, 1.0)
        assert t.theta == pytest.approx(THETA_11, rel=1e-11)
        assert t.theta == pytest.approx(MAZYA_211 / 200.0, rel=1e-9)

    def test_theta_22(self):
        t = B.theta_lower_bound(B.Exponents(2, 2.0, 2.0), 1, 1.0)
        assert t.theta == pytest.approx(THETA_22, rel=1e-11)
        assert t.theta == pytest.approx(MAZYA_222**2 / 4000.0, rel=1e-9)

    def test_ball_bound_holds_with_margin(self):
        t = B.theta_lower_bound(B.Exponents(2, 2.0, 2.0), 1, 1.0)
        assert t.bound < 1e-6 * B.LAMBDA_DISK

    def test_q_below_p_rejected_with_counterexample_message(self):
        with pytest.raises(ValidationError, match="strip"):
            B.theta_lower_bound(B.Exponents(2, 2.0, 1.0), 1, 1.0)

    def test_exponent_table_enforced(self):
        # p = 1 in the plane demands q < p* = 2 strictly, even though the
        # admissibility check alone allows q = p*
        with pytest.raises(ValidationError):
            B.theta_lower_bound(B.Exponents(2, 1.0, 2.0), 1, 1.0)
        with pytest.raises(ValidationError):
            B.theta_lower_bound(B.Exponents(2, 1.5, 6.0), 1, 1.0)

    def test_p_above_two_allows_infinite_q(self):
        t = B.theta_lower_bound(B.Exponents(2, 3.0, INF), 1, 1.0)
        assert t.bound > 0.0

    @given(
        st.integers(1, 50),
        st.integers(1, 50),
        st.floats(0.1, 10.0),
        st.floats(0.1, 10.0),
    )
    @settings(max_examples=40)
    def test_nonincreasing_in_k_and_r(self, k1, k2, r1, r2):
        e = B.Exponents(2, 2.0, 3.0)
        klo, khi = sorted((k1, k2))
        rlo, rhi = sorted((r1, r2))
        b = B.theta_lower_bound
        assert b(e, khi, rlo).bound <= b(e, klo, rlo).bound + 1e-30
        assert b(e, klo, rhi).bound <= b(e, klo, rlo).bound + 1e-30

    def test_dilation_homogeneity(self):
        e = B.Exponents(2, 1.5, 3.0)
        t = 1.7
        expo = B.scaling_exponent(e)
        b1 = B.theta_lower_bound(e, 5, 0.8).bound
        bt = B.theta_lower_bound(e, 5, 0.8 * t).bound
        assert bt == pytest.approx(b1 * t**-expo, rel=1e-12)


class TestThetaAsymptotics:
    def test_subcritical_bracket_near_critical_exponent(self):
        # The closed-form Poincaré plug-in degenerates like
        # (1/q - 1/p*)^(p-1+p/q), so the computed constant decays at that
        # rate; on a geometric grid with delta spanning one octave the values
        # stay within the factor-2 bracket of the endpoint.
        p = 1.5
        e0 = B.Exponents(2, p, 1.0)
        pstar = 2 * p / (2 - p)
        deltas = [1.0 / 24, 1.0 / 32, 1.0 / 48]
        thetas = []
        for d in deltas:
            q = 1.0 / (1.0 / pstar + d)
            thetas.append(B.theta_lower_bound(B.Exponents(2, p, q), 1, 1.0).theta)
        endpoint = thetas[-1]
        assert 0.5 * endpoint <= min(thetas)
        assert max(thetas) <= 2.0 * endpoint
        # and the decay rate itself is the predicted power of delta
        rate = p - 1.0 + p / pstar
        for d, th in zip(deltas, thetas):
            compensated = th / d**rate
            ref = thetas[-1] / deltas[-1] ** rate
            assert 0.5 * ref <= compensated <= 2.0 * ref

    def test_q_times_theta_2q_bracketed(self):
        qs = [64.0, 128.0, 256.0, 512.0]
        vals = [
            q * B.theta_lower_bound(B.Exponents(2, 2.0, q), 1, 1.0).theta for q in qs
        ]
        endpoint = vals[-1]
        assert endpoint > 0.0
        assert 0.5 * endpoint <= min(vals)
        assert max(vals) <= 2.0 * endpoint


class TestClosedFormCapacities:
    def test_interval_midpoint_equality(self):
        exact, lower = B.closed_form_capacities(
            "interval_point", p=2.0, a=0.0, b=1.0, x0=0.5
        )
        assert exact == pytest.approx(4.0, rel=1e-12)
        assert lower == pytest.approx(4.0, rel=1e-12)

    def test_interval_offcenter(self):
        exact, lower = B.closed_form_capacities(
            "interval_point", p=2.0, a=0.0, b=1.0, x0=0.25
        )
        assert exact == pytest.approx(16.0 / 3.0, rel=1e-12)
        assert lower == pytest.approx(4.0, rel=1e-12)
        assert exact >= lower

    def test_interval_p1(self):
        exact, lower = B.interval_point_capacity(1.0, 0.0, 2.0, 0.7)
        assert exact == pytest.approx(2.0)
        assert lower == pytest.approx(2.0)

    @given(st.floats(1.0, 6.0), st.floats(0.05, 0.95))
    @settings(max_examples=50)
    def test_interval_exact_dominates_bound(self, p, x0):
        exact, lower = B.interval_point_capacity(p, 0.0, 1.0, x0)
        assert exact >= lower - 1e-12 * abs(lower)

    def test_disk_relative(self):
        v = B.closed_form_capacities("disk_relative", eps=0.1)
        assert v == pytest.approx(2 * math.pi / math.log(10.0), rel=1e-12)

    def test_disk_relative_vanishes_slowly(self):
        assert B.disk_capacity_relative(1e-8) > 0.0

    def test_punctured_ball_value(self):
        v = B.closed_form_capacities("punctured_ball_value", N=2, p=4.0)
        assert v == pytest.approx(CAP_POINT_P4_N2, rel=1e-11)
        assert v == pytest.approx(16 * math.pi / 27, rel=1e-12)

    def test_punctured_ball_needs_p_above_N(self):
        with pytest.raises(ValidationError):
            B.punctured_ball_capacity(2, 2.0)

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            B.closed_form_capacities("moebius", x=1)


class TestEndpointBounds:
    def test_hardy_component(self):
        e = B.Exponents(2, 4.0, 4.0)
        rec = B.endpoint_bounds(e, 1.0, Lambda_p_ball=1.0, Lambda_p_inf_ball=1.0)
        assert rec.hardy_component == pytest.approx(0.0625, rel=1e-12)

    def test_q_equal_p_reduces_to_beta(self):
        e = B.Exponents(2, 4.0, 4.0)
        rec = B.endpoint_bounds(e, 0.7, 2.0, 1.5)
        assert rec.interpolated_lower == pytest.approx(
            rec.lambda_p_lower, rel=1e-12
        )

    def test_q_infinite_reduces_to_inf_bound(self):
        e = B.Exponents(2, 4.0, INF)
        rec = B.endpoint_bounds(e, 0.7, 2.0, 1.5)
        assert rec.interpolated_lower == pytest.approx(
            rec.lambda_inf_lower, rel=1e-12
        )

    def test_p_not_above_N_rejected(self):
        with pytest.raises(ValidationError):
            B.endpoint_bounds(B.Exponents(2, 2.0, 2.0), 1.0, 1.0, 1.0)

    def test_beta_root_tends_to_one(self):
        # the Hardy component forces beta^(1/p) -> 1 regardless of the
        # puncture constant plug-in
        vals = []
        for p in (8.0, 32.0, 128.0):
            lam = B.punctured_ball_capacity(2, p)
            rec = B.endpoint_bounds(B.Exponents(2, p, p), 1.0, lam, lam)
            vals.append(rec.beta ** (1.0 / p))
        assert vals[-1] > 0.97
        assert vals == sorted(vals)

    def test_beta_rate_near_dimension(self):
        # with the closed-form puncture plug-in, beta/(p-N)^(p-1) must stay
        # inside a fixed positive bracket as p decreases to N
        ratios = []
        for p in (2.5, 2.25, 2.125, 2.0625):
            lam = B.punctured_ball_capacity(2, p)
            rec = B.endpoint_bounds(B.Exponents(2, p, p), 1.0, lam, lam)
            ratios.append(rec.beta / (p - 2.0) ** (p - 1.0))
        assert min(ratios) > 0.0
        assert max(ratios) / min(ratios) < 4.0


class TestBuserBounds:
    def test_disk_chain(self):
        rec = B.buser_bounds(1, 2.0, 1.0)
        assert rec.lambda_lower_from_h == pytest.approx(1.0, rel=1e-12)
        assert rec.lambda_lower_from_h <= B.LAMBDA_DISK
        assert rec.cheeger_lower == pytest.approx(THETA_11, rel=1e-9)
        assert rec.cheeger_lower < 1e-9

    def test_buser_homogeneity_in_h(self):
        a = B.buser_bounds(3, 1.0, 1.0)
        b = B.buser_bounds(3, 2.0, 1.0)
        assert b.buser_upper == pytest.approx(4.0 * a.buser_upper, rel=1e-12)

    def test_bessel_constant_digits(self):
        assert B.J01 == pytest.approx(2.404825558, abs=1e-9)
        assert B.LAMBDA_DISK == pytest.approx(5.78318596, abs=1e-7)


class TestScalingExponent:
    @pytest.mark.parametrize(
        "N,p,q,expected",
        [
            (2, 2.0, 2.0, 2.0),
            (2, 3.0, 3.0, 3.0),
            (2, 1.0, 1.0, 1.0),
            (2, 4.0, INF, 2.0),
            (1, 2.0, INF, 1.0),
        ],
    )
    def test_values(self, N, p, q, expected):
        assert B.scaling_exponent(B.Exponents(N, p, q)) == pytest.approx(expected)

    def test_matches_mu_homogeneity(self):
        e = B.Exponents(2, 2.0, 4.0)
        t = 1.3
        base = B.mu_lower_bound(e, math.pi, 2.0)
        scaled = B.mu_lower_bound(e, t**2 * math.pi, 2.0 * t)
        assert scaled == pytest.approx(base * t ** -B.scaling_exponent(e), rel=1e-12)


class TestBoundRow:
    def test_margin_and_pass(self):
        row = B.BoundRow("x", {}, bound=1.0, target=1.5, tolerance=0.0)
        assert row.margin == pytest.approx(0.5)
        assert row.passed

    def test_tolerance_band(self):
        row = B.BoundRow("x", {}, bound=1.0, target=0.999, tolerance=0.01)
        assert row.passed
        row2 = B.BoundRow("x", {}, bound=1.0, target=0.9, tolerance=0.01)
        assert not row2.passed

    def test_flagged_rows_not_judged(self):
        row = B.BoundRow("x", {}, bound=1.0, target=0.0, flagged=True)
        assert row.passed
