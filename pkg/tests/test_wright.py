import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import erfc

import oracles as ref
from mlq.errors import DomainError, TruncationError
from mlq.mittag_leffler import Method
from mlq.numerics import integrate_semi_infinite
from mlq.wright import (DiffusionConfig, GridFunction, WrightParams, airy_ai, f_wright,
                        green_cauchy, green_signalling, m_spacetime, m_wright,
                        m_wright_special, pde_residual, solve_cauchy, solve_signalling, wright)
from mlq.wright import f_wright_series

SQPI = math.sqrt(math.pi)


class TestTypes:
    def test_params(self):
        assert WrightParams(0.5, 1).kind == "first"
        assert WrightParams(-0.5, 1).kind == "second"
        with pytest.raises(DomainError):
            WrightParams(-1.0, 1.0)
        with pytest.raises(DomainError):
            WrightParams(0.5, math.nan)

    def test_config(self):
        assert DiffusionConfig(0.5).regime == "diffusion"
        assert DiffusionConfig(0.75, 2.0).regime == "wave"
        for nu, a in [(0.0, 1.0), (1.2, 1.0), (0.5, 0.0)]:
            with pytest.raises(DomainError):
                DiffusionConfig(nu, a)

    def test_grid(self):
        g = GridFunction(-1.0, 0.5, [0, 1, 2])
        assert np.allclose(g.points, [-1.0, -0.5, 0.0]) and g.mass() == 1.5 and len(g) == 3
        with pytest.raises(DomainError):
            GridFunction(0.0, 0.0, [1.0])
        with pytest.raises(DomainError):
            GridFunction(0.0, 1.0, [1.0, math.inf])


class TestWright:
    def test_examples(self):
        assert wright(WrightParams(0, 1), 1.0).value == pytest.approx(math.e, rel=1e-14)
        assert wright(WrightParams(0.7, 2.5), 0.0).value == pytest.approx(1 / math.gamma(2.5), rel=1e-15)
        v = wright(WrightParams(-0.5, 0.5), -1.0).value
        assert v == pytest.approx(math.exp(-0.25) / SQPI, rel=1e-13)

    @pytest.mark.parametrize("lam,mu", [(1.0, 1.0), (0.5, 0.3), (2.0, 1.5), (-0.3, 0.8), (-0.7, 0.2)])
    def test_against_oracle(self, lam, mu):
        for z in (-6.0, -1.5, 0.4, 3.0):
            r = wright(WrightParams(lam, mu), z)
            o = ref.wright_mp(lam, mu, z)
            assert r.value == pytest.approx(o, rel=1e-9, abs=1e-13), (lam, mu, z)

    def test_pole_terms_vanish(self):
        # mu = 0: the n = 0 term has Gamma(0) in the denominator
        r = wright(WrightParams(1.0, 0.0), 2.0)
        assert r.value == pytest.approx(ref.wright_mp(1, 0, 2.0), rel=1e-12)

    def test_error_estimate(self):
        r = wright(WrightParams(0.5, 1.0), -3.0)
        assert abs(r.value - ref.wright_mp(0.5, 1.0, -3.0)) <= r.est_error + 1e-15

    @pytest.mark.parametrize("x", [10.0, 20.0])
    def test_extended_precision_path(self, x):
        # W_{-1/2,1}(-x) = erfc(x/2)
        r = wright(WrightParams(-0.5, 1.0), -x)
        assert r.method is Method.EXTENDED
        assert r.value == pytest.approx(erfc(x / 2), rel=1e-10)

    def test_second_kind_m_routes_to_integral(self):
        r = wright(WrightParams(-0.25, 0.75), -12.0)
        assert r.method is Method.INTEGRAL
        assert r.value == pytest.approx(ref.m_wright_mp(Fraction(1, 4), 12.0), rel=1e-10)


class TestM:
    def test_examples(self):
        assert m_wright(0.5, 0.0) == pytest.approx(1 / SQPI, rel=1e-15)
        assert m_wright(0.5, 2.0) == pytest.approx(math.exp(-1) / SQPI, rel=1e-15)
        assert m_wright(1 / 3, 0.0) == pytest.approx(1 / math.gamma(2 / 3), rel=1e-15)

    @pytest.mark.parametrize("nu", [0.0, 1.0, -0.1])
    def test_order_range(self, nu):
        with pytest.raises(DomainError):
            m_wright(nu, 1.0)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            m_wright(0.3, -1.0)

    @pytest.mark.parametrize("nu", [Fraction(1, 10), Fraction(1, 4), Fraction(3, 5), Fraction(3, 4), Fraction(4, 5)])
    def test_against_oracle(self, nu):
        for z in (0.2, 0.9, 1.5, 3.0, 6.0):
            # oracle digits grow like z**(1/(1-nu)); keep it affordable
            if z ** (1 / (1 - nu)) > 800:
                continue
            o = ref.m_wright_mp(nu, z)
            assert m_wright(float(nu), z) == pytest.approx(o, rel=1e-9, abs=1e-15), (nu, z)

    @pytest.mark.parametrize("nu", [0.1, 0.3, 0.6, 0.8])
    def test_non_negative_and_decaying(self, nu):
        z = np.linspace(0, 10, 60)
        v = np.array([m_wright(nu, x) for x in z])
        assert np.all(v >= 0) and v[-1] < v[0]

    @pytest.mark.parametrize("nu", [0.2, 0.5, 0.7])
    def test_is_density_with_moments(self, nu):
        # int_0^inf z^k M_nu(z) dz = k!/Gamma(nu k + 1)
        for k in (0, 1, 2):
            r = integrate_semi_infinite(lambda z: z ** k * m_wright(nu, z))
            assert r.value == pytest.approx(math.factorial(k) / math.gamma(nu * k + 1), rel=1e-6)


class TestF:
    def test_examples(self):
        assert f_wright(0.4, 0.0) == 0.0
        assert f_wright(0.5, 1.0) == pytest.approx(0.5 * math.exp(-0.25) / SQPI, rel=1e-14)

    def test_series_cross_check(self):
        assert f_wright(1 / 3, 1.0) == pytest.approx(f_wright_series(1 / 3, 1.0), abs=1e-10)
        for nu in (0.2, 0.6):
            for z in (0.3, 1.2):
                assert f_wright(nu, z) == pytest.approx(f_wright_series(nu, z), abs=1e-10)


class TestSpecial:
    def test_airy_against_mpmath(self):
        for x in (-6.0, -2.5, 0.0, 0.7, 3.0, 6.0):
            ai, aip = airy_ai(x)
            o, op = ref.airy_mp(x)
            # the Maclaurin terms peak near e**(2/3 |x|**1.5) at the range ends
            assert ai == pytest.approx(o, abs=1e-11) and aip == pytest.approx(op, abs=1e-11)

    def test_airy_range(self):
        with pytest.raises(DomainError):
            airy_ai(7.0)

    def test_examples(self):
        assert m_wright_special(0.5, 0.0) == pytest.approx(1 / SQPI, rel=1e-15)
        assert m_wright_special(1 / 3, 0.0) == pytest.approx(1 / math.gamma(2 / 3), rel=1e-14)
        assert m_wright_special(2 / 3, 0.0) == pytest.approx(1 / math.gamma(1 / 3), rel=1e-14)

    @pytest.mark.parametrize("nu", [1 / 3, 0.5, 2 / 3])
    @pytest.mark.parametrize("x", [0.0, 0.5, 1.0, 2.0, 4.0])
    def test_agrees_with_general_path(self, nu, x):
        assert m_wright_special(nu, x) == pytest.approx(m_wright(nu, x), abs=1e-10)

    def test_unsupported(self):
        with pytest.raises(DomainError):
            m_wright_special(0.25, 1.0)
        with pytest.raises(DomainError):
            m_wright_special(0.5, -1.0)


class TestSpacetime:
    def test_examples(self):
        assert m_spacetime(0.3, 1.2, 1.0) == m_wright(0.3, 1.2)
        assert m_spacetime(0.5, 0.0, 4.0) == pytest.approx(0.5 / SQPI, rel=1e-15)
        with pytest.raises(DomainError):
            m_spacetime(0.5, 1.0, 0.0)

    def test_normalised(self):
        r = integrate_semi_infinite(lambda x: m_spacetime(0.25, x, 2.0))
        assert r.value == pytest.approx(1.0, abs=1e-6)


class TestGreen:
    def test_cauchy_examples(self):
        g = DiffusionConfig(0.5)
        assert green_cauchy(g, 0.0, 1.0) == pytest.approx(1 / (2 * SQPI), rel=1e-15)
        for x in (-2.0, -0.5, 0.0, 1.0, 3.0):
            for t in (0.5, 2.0):
                heat = math.exp(-x * x / (4 * t)) / math.sqrt(4 * math.pi * t)
                assert green_cauchy(g, x, t) == pytest.approx(heat, rel=1e-14)

    def test_symmetry(self):
        g = DiffusionConfig(0.7, 2.0)
        for x in (0.5, 1.5):
            assert green_cauchy(g, x, 3.0) == green_cauchy(g, -x, 3.0)

    @pytest.mark.parametrize("nu,a", [(0.25, 1.0), (0.6, 0.5), (0.9, 1.0)])
    def test_cauchy_normalised(self, nu, a):
        g = DiffusionConfig(nu, a)
        r = integrate_semi_infinite(lambda x: green_cauchy(g, x, 1.5))
        assert 2 * r.value == pytest.approx(1.0, abs=1e-6)

    def test_signalling_example(self):
        g = DiffusionConfig(0.5)
        assert green_signalling(g, 1.0, 1.0) == pytest.approx(math.exp(-0.25) / (2 * SQPI), rel=1e-14)

    def test_reciprocity(self):
        g = DiffusionConfig(0.4)
        x, t = 1.0, 2.0
        lhs = 2 * g.nu * x * green_cauchy(g, x, t)
        assert lhs == pytest.approx(t * green_signalling(g, x, t), rel=1e-13)
        xi = x / t ** g.nu
        assert lhs == pytest.approx(f_wright_series(g.nu, xi), abs=1e-8)

    def test_signalling_time_normalisation_at_half(self):
        g = DiffusionConfig(0.5)
        r = integrate_semi_infinite(lambda t: green_signalling(g, 1.0, t) if t > 0 else 0.0, singularity=0.0)
        assert r.value == pytest.approx(1.0, abs=1e-6)

    def test_domain(self):
        g = DiffusionConfig(0.5)
        with pytest.raises(DomainError):
            green_cauchy(g, 1.0, 0.0)
        with pytest.raises(DomainError):
            green_signalling(g, 0.0, 1.0)
        with pytest.raises(DomainError):
            green_cauchy(DiffusionConfig(1.0), 0.5, 1.0)

    def test_figure_shapes(self):
        xs = np.linspace(0, 5, 501)
        for nu in (0.25, 0.375):
            v = [m_wright(nu, x) / 2 for x in xs]
            assert int(np.argmax(v)) == 0 and np.all(np.diff(v) < 0)
        v = [m_wright(0.75, x) / 2 for x in xs]
        assert xs[int(np.argmax(v))] > 0

    @pytest.mark.parametrize("nu", [0.4, 0.5, 0.7])
    def test_pde_residual(self, nu):
        assert abs(pde_residual(DiffusionConfig(nu), 1.0, 1.0)) <= 1e-3

    def test_pde_residual_cusp(self):
        with pytest.raises(DomainError):
            pde_residual(DiffusionConfig(0.4), 0.0, 1.0)


def _grid(step=0.05, half=15.0):
    n = int(round(2 * half / step))
    return -half + step * 0.5, step, n


class TestSolveCauchy:
    def test_delta(self):
        o, h, n = _grid()
        f = np.zeros(n)
        j = n // 2
        f[j] = 1 / h
        cfg = DiffusionConfig(0.3)
        r = solve_cauchy(cfg, GridFunction(o, h, f), 1.0)
        x = r.points - r.points[j]
        for k in (j + 5, j + 40, j - 80):
            assert r.samples[k] == pytest.approx(green_cauchy(cfg, x[k], 1.0), rel=1e-12)
        assert r.mass() == pytest.approx(1.0, abs=1e-6)

    def test_linearity(self):
        o, h, n = _grid()
        cfg = DiffusionConfig(0.6)
        a, b = np.zeros(n), np.zeros(n)
        a[n // 2 - 20] = 1 / h
        b[n // 2 + 30] = 2 / h
        ra = solve_cauchy(cfg, GridFunction(o, h, a), 0.7).samples
        rb = solve_cauchy(cfg, GridFunction(o, h, b), 0.7).samples
        rab = solve_cauchy(cfg, GridFunction(o, h, a + b), 0.7).samples
        assert np.allclose(rab, ra + rb, atol=1e-13)

    def test_box_against_heat_kernel(self):
        o, h, n = _grid(0.01, 10.0)
        g = GridFunction(o, h, np.zeros(n))
        x = g.points
        g.samples[np.abs(x) < 1] = 0.5
        t = 0.5
        r = solve_cauchy(DiffusionConfig(0.5), g, t)
        exact = 0.25 * (erfc((x - 1) / (2 * math.sqrt(t))) - erfc((x + 1) / (2 * math.sqrt(t))))
        assert np.max(np.abs(r.samples - exact)) <= 1e-4
        assert r.mass() == pytest.approx(g.mass(), abs=1e-6)

    def test_truncation_budget(self):
        o, h, n = _grid(0.05, 3.0)
        f = np.zeros(n)
        f[n - 3] = 1 / h
        with pytest.raises(TruncationError):
            solve_cauchy(DiffusionConfig(0.5), GridFunction(o, h, f), 2.0)


class TestSolveSignalling:
    def test_delta(self):
        cfg = DiffusionConfig(0.35)
        h = GridFunction(0.0, 0.01, [100.0])
        assert solve_signalling(cfg, h, 1.0, 0.8) == pytest.approx(green_signalling(cfg, 1.0, 0.8), rel=1e-14)

    def test_step_input_heat(self):
        cfg = DiffusionConfig(0.5)
        dt, t = 1e-3, 1.0
        h = GridFunction(dt / 2, dt, np.ones(int(t / dt)))
        for x in (0.5, 1.0, 2.0):
            assert solve_signalling(cfg, h, x, t) == pytest.approx(erfc(x / (2 * math.sqrt(t))), abs=1e-3)

    def test_linearity(self):
        cfg = DiffusionConfig(0.6)
        a = np.zeros(200)
        b = np.zeros(200)
        a[10], b[60] = 3.0, -1.0
        f = lambda s: solve_signalling(cfg, GridFunction(0.0, 0.01, s), 1.2, 1.5)
        assert f(a + b) == pytest.approx(f(a) + f(b), rel=1e-12)

    def test_domain(self):
        cfg = DiffusionConfig(0.5)
        with pytest.raises(DomainError):
            solve_signalling(cfg, GridFunction(0.0, 0.1, [1.0]), 0.0, 1.0)
