import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import PPoly, make_interp_spline

from fracpiezo.fracops import (
    DomainError,
    FractionalParams,
    Horizon,
    horizon_at,
    kernel_weight,
    powerlaw_moments,
    rc_derivative,
    riesz_integral,
    rrl_derivative,
)

from oracles import rc_bruteforce, riesz_integral_bruteforce, rrl_bruteforce

L = 1.0
alphas = st.floats(0.05, 0.99)


def poly(coeffs_desc, lo=-2.0, hi=3.0):
    """Single-piece PPoly in global coordinates: ``sum c_k s**(deg-k)`` on [lo, hi]."""
    # PPoly wants coefficients in the local variable s - lo
    c = np.poly1d(coeffs_desc)(np.poly1d([1, lo]))
    return PPoly(c.coeffs[:, None], [lo, hi])


def piecewise_linear(nodes, values):
    slopes = np.diff(values) / np.diff(nodes)
    return PPoly(np.vstack([slopes, values[:-1]]), nodes)


class TestParams:
    def test_defaults_local(self):
        assert FractionalParams().is_local

    @pytest.mark.parametrize("alpha", [0.0, -0.1, 1.2])
    def test_bad_order(self, alpha):
        with pytest.raises(ValueError):
            FractionalParams(alpha_m=alpha)

    def test_bad_horizon(self):
        with pytest.raises(ValueError):
            FractionalParams(alpha_m=0.5, h_l=0.0)


class TestHorizon:
    def test_interior(self):
        hz = horizon_at(0.5 * L, 0, L, L / 5)
        assert (hz.l_A, hz.l_B) == pytest.approx((L / 5, L / 5))

    def test_left_boundary(self):
        hz = horizon_at(0.0, 0, L, L / 5)
        assert (hz.l_A, hz.l_B) == pytest.approx((0.0, L / 5))

    def test_partial_truncation(self):
        hz = horizon_at(0.1 * L, 0, L, L / 5)
        assert (hz.l_A, hz.l_B) == pytest.approx((0.1 * L, 0.2 * L))

    def test_outside(self):
        with pytest.raises(DomainError):
            horizon_at(1.5, 0, 1, 0.2)

    @given(st.floats(0, 1), st.floats(1e-3, 1))
    def test_nonnegative_and_bounded(self, x, h):
        hz = horizon_at(x, 0, 1, h)
        assert 0 <= hz.l_A <= h and 0 <= hz.l_B <= h
        assert hz.l_A + hz.l_B > 0


class TestKernel:
    def test_value(self):
        hz = Horizon(0.1, 0.1)
        assert kernel_weight(0.5, 0.45, 0.8, hz) == pytest.approx(0.5 * 0.2 * 0.1**-0.2 * 0.05**-0.8)
        assert kernel_weight(0.5, 0.45, 0.8, hz) == pytest.approx(1.7412, abs=1e-4)

    def test_symmetric(self):
        hz = Horizon(0.2, 0.2)
        assert kernel_weight(1.0, 0.9, 0.6, hz) == pytest.approx(kernel_weight(1.0, 1.1, 0.6, hz), rel=1e-14)

    def test_rejects_local_and_singular(self):
        hz = Horizon(0.1, 0.1)
        with pytest.raises(ValueError):
            kernel_weight(0.5, 0.45, 1.0, hz)
        with pytest.raises(DomainError):
            kernel_weight(0.5, 0.5, 0.5, hz)

    @given(alphas, st.floats(1e-4, 0.0999))
    def test_positive(self, alpha, d):
        assert kernel_weight(0.5, 0.5 - d, alpha, Horizon(0.1, 0.1)) > 0


class TestMoments:
    @given(alphas, st.floats(1e-3, 1.0))
    def test_zeroth_moment_is_half(self, alpha, l_a):
        m = powerlaw_moments((1.0 - l_a, 1.0), 1.0, alpha, l_a)
        assert m[0] == pytest.approx(0.5, rel=1e-12)

    def test_degenerate_interval(self):
        assert np.all(powerlaw_moments((0.3, 0.3), 0.5, 0.5, 0.2) == 0)

    def test_straddle_rejected(self):
        with pytest.raises(DomainError):
            powerlaw_moments((0.4, 0.6), 0.5, 0.5, 0.2)

    @given(alphas)
    def test_linear_field_from_moments(self, alpha):
        # f' = c is constant, so the derivative is c times the two zeroth moments
        x, h, c = 0.5, 0.2, 3.0
        left = powerlaw_moments((x - h, x), x, alpha, h)
        right = powerlaw_moments((x, x + h), x, alpha, h)
        assert c * (left[0] + right[0]) == pytest.approx(c, rel=1e-12)

    def test_against_quadrature(self):
        from scipy.integrate import quad

        x, alpha, l = 0.7, 0.35, 0.3
        m = powerlaw_moments((0.45, 0.6), x, alpha, l)
        for j in range(4):
            ref, _ = quad(lambda s: s**j * (x - s) ** -alpha, 0.45, 0.6, epsrel=1e-13)
            assert m[j] == pytest.approx(0.5 * (1 - alpha) * l ** (alpha - 1) * ref, rel=1e-10)


class TestRieszCaputo:
    @given(alphas, st.floats(-5, 5), st.floats(0, 0.5), st.floats(0, 0.5))
    def test_constant_annihilated(self, alpha, c, l_a, l_b):
        if l_a + l_b == 0:
            return
        f = poly([c])
        assert abs(rc_derivative(f, 1.0, alpha, Horizon(l_a, l_b))) <= 1e-12 * max(1, abs(c))

    @given(alphas, st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), st.floats(0, 0.5), st.floats(0, 0.5))
    def test_linear_exact(self, alpha, c, l_a, l_b):
        if l_a + l_b == 0:
            return
        f = poly([c, 0.3])
        assert rc_derivative(f, 1.0, alpha, Horizon(l_a, l_b)) == pytest.approx(c, rel=1e-10)

    def test_quadratic_example(self):
        f = poly([1.0, 0.0, 0.0])
        assert rc_derivative(f, 1.0, 0.5, Horizon(0.2, 0.5)) == pytest.approx(2.1, rel=1e-8)

    @given(alphas, st.floats(0.01, 0.5), st.floats(0.01, 0.5))
    def test_quadratic_closed_form(self, alpha, l_a, l_b):
        f = poly([1.0, 0.0, 0.0])
        expected = 2.0 + (1 - alpha) * (l_b - l_a) / (2 - alpha)
        assert rc_derivative(f, 1.0, alpha, Horizon(l_a, l_b)) == pytest.approx(expected, rel=1e-8)

    def test_quadratic_bruteforce(self):
        alpha, l_a, l_b = 0.5, 0.2, 0.5
        ref = rc_bruteforce(lambda s: 2 * s, [], 1.0, alpha, l_a, l_b)
        assert ref == pytest.approx(2.1, rel=1e-8)

    def test_local_branch_exact(self):
        f = poly([0.3, -1.0, 2.0, 0.5])
        x = 0.77
        assert rc_derivative(f, x, 1.0, Horizon(0.2, 0.2)) == f.derivative()(x)

    def test_support_checked(self):
        with pytest.raises(DomainError):
            rc_derivative(poly([1.0, 0.0]), 2.9, 0.5, Horizon(0.2, 0.2))

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.floats(-1, 1), min_size=6, max_size=12),
        alphas,
        st.floats(0.05, 0.45),
        st.floats(0.05, 0.45),
        st.floats(0.0, 1.0),
    )
    def test_random_piecewise_linear_vs_bruteforce(self, vals, alpha, l_a, l_b, t):
        nodes = np.linspace(0.0, 1.0, len(vals))
        f = piecewise_linear(nodes, np.array(vals))
        x = 0.45 + 0.1 * t
        got = rc_derivative(f, x, alpha, Horizon(l_a, l_b))
        df = f.derivative()
        ref = rc_bruteforce(lambda s: float(df(s)), list(nodes), x, alpha, l_a, l_b)
        scale = max(1.0, float(np.max(np.abs(np.diff(vals) / np.diff(nodes)))))
        assert abs(got - ref) <= 1e-6 * scale


class TestRieszRL:
    def test_riesz_integral_vs_quadrature(self):
        f = poly([0.5, -1.0, 2.0])
        got = riesz_integral(f, 0.6, 0.4, Horizon(0.3, 0.2))
        ref = riesz_integral_bruteforce(lambda s: float(f(s)), 0.6, 0.4, 0.2, 0.3)
        assert got == pytest.approx(ref, rel=1e-10)

    @given(alphas, st.floats(-3, 3))
    def test_constant(self, alpha, c):
        f = poly([c])
        assert abs(rrl_derivative(f, 0.5, alpha, Horizon(0.3, 0.3))) <= 1e-8 * max(1, abs(c))

    @given(alphas, st.floats(-3, 3).filter(lambda c: abs(c) > 1e-2))
    def test_linear(self, alpha, c):
        f = poly([c, 1.0])
        assert rrl_derivative(f, 0.5, alpha, Horizon(0.3, 0.3)) == pytest.approx(c, rel=1e-7)

    def test_local_limit(self):
        f = poly([1.0, 2.0, 0.0, 0.0])
        assert rrl_derivative(f, 0.4, 1.0, Horizon(0.3, 0.3)) == pytest.approx(float(f.derivative()(0.4)))

    @pytest.mark.parametrize("alpha", [0.3, 0.6, 0.9])
    def test_cubic_vs_bruteforce(self, alpha):
        f = poly([1.0, -0.5, 0.2, 0.1])
        got = rrl_derivative(f, 0.4, alpha, Horizon(0.25, 0.25))
        ref = rrl_bruteforce(lambda s: float(f(s)), 0.4, alpha, 0.25, 0.25)
        assert got == pytest.approx(ref, rel=1e-6)

    def test_adjoint_of_rc(self):
        # int M D^a(v) dx = -int rrl(M) v dx when v vanishes away from the ends
        alpha, h = 0.6, 0.1
        xs = np.linspace(0.0, 1.0, 21)
        M = PPoly.from_spline(make_interp_spline(xs, np.sin(3 * xs) + xs**2, k=3))
        knots = np.linspace(0.3, 0.7, 41)
        vals = (np.cos(np.pi * (knots - 0.5) / 0.2) + 1) ** 2
        vals[[0, -1]] = 0.0
        bump = PPoly.from_spline(make_interp_spline(knots, vals, k=3, bc_type="clamped"))
        v = PPoly(np.concatenate([np.zeros((4, 1)), bump.c, np.zeros((4, 1))], axis=1),
                  np.concatenate([[0.0], bump.x, [1.0]]))
        pts, wts = np.polynomial.legendre.leggauss(8)
        grid = np.linspace(0.2, 0.8, 121)
        hz = Horizon(h, h)
        lhs = rhs = 0.0
        for a, b in zip(grid[:-1], grid[1:]):
            for p, w in zip(pts, wts):
                x = 0.5 * (a + b) + 0.5 * (b - a) * p
                lhs += 0.5 * (b - a) * w * float(M(x)) * rc_derivative(v, x, alpha, hz)
                rhs += 0.5 * (b - a) * w * rrl_derivative(M, x, alpha, hz, step=1e-5) * float(v(x))
        assert lhs == pytest.approx(-rhs, rel=1e-4)
