import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import erfc

from mlq.errors import AtomError, DomainError
from mlq.mittag_leffler import ml_derivative_k
from mlq.numerics import (RngStream, finite_difference, integrate_interval,
                          laplace_transform_numeric)
from mlq.renewal import (Exponential, MittagLeffler, PowerLaw, RenewalPath, erlang_cdf,
                         erlang_pdf, frac_poisson_distribution, frac_poisson_pmf,
                         gen_erlang_cdf, gen_erlang_pdf, poisson_pmf, sample_waiting_time,
                         sample_waiting_times, simulate_counting, simulate_counts)

E_HALF = math.e * erfc(1.0)  # E_{1/2}(-1)


def within(p_hat, p, n, k=3.0):
    return abs(p_hat - p) <= k * math.sqrt(p * (1 - p) / n) + 1e-12


class TestLaws:
    def test_ranges(self):
        for bad in (lambda: Exponential(0.0), lambda: MittagLeffler(0.0), lambda: MittagLeffler(1.1),
                    lambda: PowerLaw(1.0), lambda: PowerLaw(0.5, -1.0)):
            with pytest.raises(DomainError):
                bad()

    def test_ml_one_is_exponential(self):
        t = np.array([0.1, 1.0, 3.0])
        assert np.allclose(MittagLeffler(1.0).survival(t), Exponential(1.0).survival(t), rtol=1e-14)
        assert MittagLeffler(1.0).laplace(0.7) == pytest.approx(Exponential(1.0).laplace(0.7), rel=1e-15)

    def test_power_law_body(self):
        law = PowerLaw(0.5, 0.3)
        assert law.survival(law.t_min) == pytest.approx(1.0, rel=1e-14)
        assert law.survival(0.5 * law.t_min) == 1.0
        assert law.survival(4 * law.t_min) == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("law", [Exponential(2.0), MittagLeffler(0.6), PowerLaw(0.4, 0.5)])
    def test_laplace_matches_numeric(self, law):
        # density = -dS/dt, so phi(s) = 1 - s * int e^{-st} S(t) dt
        for s in (0.5, 2.0):
            pts = [law.t_min] if isinstance(law, PowerLaw) else None
            f = lambda t: float(law.survival(t))
            if pts:
                head = integrate_interval(lambda t: math.exp(-s * t), 0.0, pts[0]).value
                tail = laplace_transform_numeric(lambda t: f(t + pts[0]), s).value * math.exp(-s * pts[0])
                ls = head + tail
            else:
                ls = laplace_transform_numeric(f, s).value
            assert law.laplace(s) == pytest.approx(1 - s * ls, abs=1e-8)
            assert law.laplace(s) + law.laplace_complement(s) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("law", [Exponential(1.0), MittagLeffler(0.5), PowerLaw(0.5, 1.0)])
    def test_taylor_condition(self, law):
        b, lam = law.tail_exponent, law.tail_coefficient
        ratio = law.laplace_complement(1e-3) / 1e-3 ** b
        assert ratio == pytest.approx(lam, rel=0.05)


class TestPath:
    def test_counting(self):
        p = RenewalPath(np.array([0.5, 1.2, 2.0]), 3.0)
        assert [p.count(t) for t in (0.0, 0.5, 1.0, 2.0, 3.0)] == [0, 1, 1, 3, 3]

    @pytest.mark.parametrize("ev,h", [([0.0, 1.0], 2.0), ([1.0, 0.5], 2.0), ([1.0], 0.5), ([], 0.0)])
    def test_invariants(self, ev, h):
        with pytest.raises(DomainError):
            RenewalPath(np.array(ev), h)

    def test_count_range(self):
        with pytest.raises(DomainError):
            RenewalPath(np.array([]), 1.0).count(2.0)


class TestPoisson:
    def test_examples(self):
        assert poisson_pmf(1, 1, 0) == pytest.approx(math.exp(-1), rel=1e-15)
        assert poisson_pmf(1, 1, 2) == pytest.approx(0.5 / math.e, rel=1e-15)
        assert poisson_pmf(3, 0, 0) == 1.0 and poisson_pmf(3, 0, 2) == 0.0

    def test_log_space_large_k(self):
        v = poisson_pmf(1.0, 200.0, 200)
        assert v == pytest.approx(stats.poisson.pmf(200, 200.0), rel=1e-12)

    @pytest.mark.parametrize("k", [-1, 1.5])
    def test_bad_k(self, k):
        with pytest.raises(DomainError):
            poisson_pmf(1.0, 1.0, k)

    def test_erlang(self):
        assert erlang_pdf(2.0, 1, 0.7) == pytest.approx(2 * math.exp(-1.4), rel=1e-15)
        assert erlang_pdf(1, 2, 1) == pytest.approx(math.exp(-1), rel=1e-15)
        assert erlang_cdf(1, 1, 60.0) == pytest.approx(1.0, abs=1e-15)
        assert erlang_cdf(1, 0, 0.5) == 1.0
        with pytest.raises(AtomError):
            erlang_pdf(1.0, 0, 1.0)
        for k, t in [(1, 0.5), (3, 2.0), (7, 4.0)]:
            assert erlang_cdf(1.5, k, t) == pytest.approx(stats.gamma.cdf(t, k, scale=1 / 1.5), rel=1e-12)


class TestFractionalPoisson:
    def test_survival_is_zero_count(self):
        assert frac_poisson_pmf(0.5, 1.0, 0) == pytest.approx(E_HALF, rel=1e-13)

    @pytest.mark.parametrize("k", [0, 1, 3, 8])
    def test_reduces_to_poisson(self, k):
        for t in (0.5, 2.0):
            assert frac_poisson_pmf(1.0, t, k) == pytest.approx(poisson_pmf(1.0, t, k), abs=1e-10)

    def test_normalisation_k40(self):
        total = math.fsum(frac_poisson_pmf(0.5, 1.0, k) for k in range(41))
        assert abs(1 - total) < 1e-8

    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 1.0])
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_distribution(self, beta, t):
        p = frac_poisson_distribution(beta, t)
        assert np.all((p >= 0) & (p <= 1))
        assert abs(1 - math.fsum(p.tolist())) < 1e-8

    def test_mean(self):
        # E N(t) = t^beta / Gamma(1+beta)
        b, t = 0.6, 1.5
        p = frac_poisson_distribution(b, t, tail_tol=1e-14)
        assert np.arange(p.size) @ p == pytest.approx(t ** b / math.gamma(1 + b), rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            frac_poisson_pmf(0.0, 1.0, 1)
        with pytest.raises(DomainError):
            frac_poisson_pmf(0.5, -1.0, 1)
        assert frac_poisson_pmf(0.5, 0.0, 0) == 1.0 and frac_poisson_pmf(0.5, 0.0, 3) == 0.0


class TestGeneralisedErlang:
    def test_reduction(self):
        for t in (0.3, 2.0):
            assert gen_erlang_pdf(1.0, 1, t) == pytest.approx(math.exp(-t), rel=1e-14)

    def test_telescoping(self):
        b, k, t = 0.6, 2, 1.0
        diff = gen_erlang_cdf(b, k, t) - gen_erlang_cdf(b, k + 1, t)
        assert diff == pytest.approx(frac_poisson_pmf(b, t, k), abs=1e-10)

    def test_pdf_integrates_to_cdf(self):
        r = integrate_interval(lambda t: gen_erlang_pdf(0.5, 1, t), 0.0, 2.0, singularity=0.5)
        assert r.value == pytest.approx(gen_erlang_cdf(0.5, 1, 2.0), abs=1e-6)

    def test_pdf_integrates_to_cdf_higher_k(self):
        r = integrate_interval(lambda t: gen_erlang_pdf(0.7, 3, t), 0.0, 1.5)
        assert r.value == pytest.approx(gen_erlang_cdf(0.7, 3, 1.5), abs=1e-6)

    def test_atoms(self):
        with pytest.raises(AtomError):
            gen_erlang_pdf(0.5, 0, 1.0)
        assert gen_erlang_cdf(0.5, 0, 1.0) == 1.0
        with pytest.raises(DomainError):
            gen_erlang_pdf(0.5, 1, 0.0)


class TestTransforms:
    def test_survival_pair(self):
        b = 0.5
        for s in (0.5, 1.0, 2.0):
            v = laplace_transform_numeric(lambda t: float(MittagLeffler(b).survival(t)), s, bound=1.0).value
            assert v == pytest.approx(s ** (b - 1) / (1 + s ** b), abs=1e-6)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_count_pairs(self, k):
        b = 0.5

        def f(t):
            return t ** (b * k) * ml_derivative_k(b, -t ** b, k) if t > 0 else float(k == 0)

        for s in (1.0, 2.0):
            v = laplace_transform_numeric(f, s, singularity=0.0).value
            assert v == pytest.approx(math.factorial(k) * s ** (b - 1) / (1 + s ** b) ** (k + 1), abs=1e-5)

    def test_erlang_convolution_power(self):
        for s in (0.5, 2.0):
            v = laplace_transform_numeric(lambda t: erlang_pdf(1.0, 3, t), s).value
            assert v == pytest.approx(Exponential(1.0).laplace(s) ** 3, abs=1e-9)

    @pytest.mark.parametrize("b", [0.3, 0.7])
    def test_survival_completely_monotone(self, b):
        S = lambda t: float(MittagLeffler(b).survival(t))
        for t in (0.5, 1.0, 2.0):
            for n in range(1, 4):
                assert (-1) ** n * finite_difference(S, t, n, 1e-2) >= -1e-6


class TestSampling:
    def test_exponential_mean(self):
        x = sample_waiting_times(Exponential(1.0), RngStream(3, 0), 100_000)
        assert x.mean() == pytest.approx(1.0, abs=0.02)

    def test_exponential_rate(self):
        x = sample_waiting_times(Exponential(4.0), RngStream(3, 1), 100_000)
        assert x.mean() == pytest.approx(0.25, abs=0.005)

    def test_ml_one_matches_exponential(self):
        a = sample_waiting_times(MittagLeffler(1.0), RngStream(9, 0), 10_000)
        b = sample_waiting_times(Exponential(1.0), RngStream(9, 0), 10_000)
        assert stats.ks_2samp(a, b).statistic < 0.01

    @pytest.mark.parametrize("method", ["inversion", "mixture"])
    def test_ml_half_survival(self, method):
        n = 40_000
        x = sample_waiting_times(MittagLeffler(0.5), RngStream(5, 2), n, method)
        assert np.all(x > 0)
        assert within(float(np.mean(x > 1.0)), E_HALF, n)

    def test_inversion_solves_survival(self):
        u = RngStream(1, 0).uniform(50)
        for b in (0.2, 0.55, 0.9):
            x = sample_waiting_times(MittagLeffler(b), RngStream(1, 0), 50)
            s = MittagLeffler(b).survival(x)
            assert np.allclose(s, u, rtol=1e-8, atol=1e-14)

    def test_mixture_distribution(self):
        b = 0.7
        x = sample_waiting_times(MittagLeffler(b), RngStream(2, 0), 20_000, method="mixture")
        p = stats.kstest(x, lambda t: 1 - MittagLeffler(b).survival(t)).pvalue
        assert p > 1e-3

    def test_power_law(self):
        law = PowerLaw(0.5, 0.4)
        n = 40_000
        x = sample_waiting_times(law, RngStream(4, 0), n)
        assert x.min() >= law.t_min
        t = 10 * law.t_min
        assert within(float(np.mean(x > t)), float(law.survival(t)), n)

    def test_single_draw_and_bad_method(self):
        v = sample_waiting_time(Exponential(1.0), RngStream(0))
        assert isinstance(v, float) and v > 0
        with pytest.raises(DomainError):
            sample_waiting_times(MittagLeffler(0.5), RngStream(0), 3, method="bisect")


class TestSimulation:
    def test_single_path(self):
        p = simulate_counting(MittagLeffler(0.5), 5.0, RngStream(8, 0))
        assert p.horizon == 5.0 and p.count(5.0) == p.event_times.size
        with pytest.raises(DomainError):
            simulate_counting(Exponential(1.0), 0.0, RngStream(0))

    def test_zero_event_path(self):
        # a huge first waiting time leaves N(horizon) = 0
        p = simulate_counting(Exponential(1e-9), 1.0, RngStream(1, 0))
        assert p.count(1.0) == 0

    def test_poisson_histogram(self):
        n = 100_000
        c = simulate_counts(Exponential(1.0), [1.0], n, seed=11)[:, 0]
        for k in range(7):
            assert within(float(np.mean(c == k)), poisson_pmf(1.0, 1.0, k), n), k

    def test_fractional_histogram(self):
        n = 100_000
        c = simulate_counts(MittagLeffler(0.5), [1.0], n, seed=12, method="mixture")[:, 0]
        for k in range(7):
            assert within(float(np.mean(c == k)), frac_poisson_pmf(0.5, 1.0, k), n), k

    def test_counts_monotone_in_time(self):
        c = simulate_counts(MittagLeffler(0.8), [0.5, 1.0, 4.0], 500, seed=1, method="mixture")
        assert c.shape == (500, 3) and np.all(np.diff(c, axis=1) >= 0)

    def test_reproducible_across_threads(self, monkeypatch):
        monkeypatch.setenv("MLQ_THREADS", "1")
        a = simulate_counts(MittagLeffler(0.5), [1.0, 2.0], 20_000, seed=3)
        monkeypatch.setenv("MLQ_THREADS", "3")
        b = simulate_counts(MittagLeffler(0.5), [1.0, 2.0], 20_000, seed=3)
        assert np.array_equal(a, b)

    def test_observation_times(self):
        with pytest.raises(DomainError):
            simulate_counts(Exponential(1.0), [0.0, 1.0], 10, seed=1)
