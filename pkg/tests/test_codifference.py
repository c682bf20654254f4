import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma, gammaln

from artfima_stable.codifference import (RATE_ALPHA_ABOVE_ONE, RATE_ALPHA_BELOW_ONE, asymptotic_constant,
                                         asymptotic_ratio, codiff_abs_partial_sums, codifference_terms,
                                         compare_asymptotic_forms, theoretical_codifference)
from artfima_stable.exceptions import ArtfimaError, UnsupportedError
from artfima_stable.kernel import ArtfimaParams, ma_coefficients, truncation_length


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 2.0))
def test_terms_match_literal(x, y, alpha):
    literal = abs(x) ** alpha + abs(y) ** alpha - abs(x - y) ** alpha
    scale = max(abs(x), abs(y), abs(x - y)) ** alpha
    # magnitudes below 1e-300 are treated as zero
    assert codifference_terms(x, y, alpha) == pytest.approx(literal, abs=1e-12 * scale + 1e-290)


def test_terms_small_ratio_accuracy():
    # |x|^a + |y|^a - |x - y|^a for y << x: leading term |y|^a + a |x|^(a-1) y
    x, y, a = 1.0, 1e-12, 1.3
    expected = y ** a + a * y - a * (a - 1) / 2 * y ** 2
    assert codifference_terms(x, y, a) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("params", [ArtfimaParams.make(0.3, 0.1), ArtfimaParams.make(0.611, 0.026, [0.652], [0.225])])
def test_gaussian_identity(params):
    curve = theoretical_codifference(params, 2.0, 30)
    m = curve.inner_truncation
    a = ma_coefficients(params, m + 31).values
    cov = np.array([2.0 * np.dot(a[: m + 1], a[n:n + m + 1]) for n in range(31)])
    np.testing.assert_allclose(curve.tau, cov, rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.7, 1.3, 2.0])
def test_tau_zero(alpha):
    params = ArtfimaParams.make(0.4, 0.1)
    curve = theoretical_codifference(params, alpha, 0)
    a = ma_coefficients(params, 20_000).values
    assert curve.tau[0] == pytest.approx(2.0 * np.sum(np.abs(a) ** alpha), rel=1e-10)
    assert np.all(np.isfinite(curve.tau))


def test_tail_vanishes():
    params = ArtfimaParams.make(0.3, 0.5)
    max_lag = 5 * truncation_length(params.order, 1e-12)
    for alpha in (0.7, 1.3):
        tau = theoretical_codifference(params, alpha, max_lag).tau
        assert abs(tau[-1]) < 1e-6 * abs(tau[0])


def test_invalid_alpha():
    with pytest.raises(ArtfimaError):
        theoretical_codifference(ArtfimaParams.make(0.3, 0.1), 2.5, 5)


class TestAsymptotics:
    def test_alpha_below_one_constant(self):
        asym = asymptotic_constant(ArtfimaParams.make(0.4, 0.1), 0.7)
        ref = gamma(0.4) ** -0.7 / (1 - math.exp(-0.07))
        assert asym.rate == RATE_ALPHA_BELOW_ONE
        assert asym.constant == pytest.approx(ref, rel=1e-14)
        assert asym.constant == pytest.approx(8.47, abs=0.01)

    def test_branches(self):
        p = ArtfimaParams.make(0.4, 0.1)
        assert asymptotic_constant(p, 0.999).rate == RATE_ALPHA_BELOW_ONE
        assert asymptotic_constant(p, 1.001).rate == RATE_ALPHA_ABOVE_ONE

    def test_unsupported(self):
        with pytest.raises(UnsupportedError):
            asymptotic_constant(ArtfimaParams.make(0.4, 0.1), 1.0)
        with pytest.raises(UnsupportedError):
            asymptotic_constant(ArtfimaParams.make(0.4, 0.1, [0.5]), 1.3)

    def test_alpha_below_one_convergence(self):
        p = ArtfimaParams.make(0.4, 0.1)
        c = asymptotic_constant(p, 0.7).constant
        r200, r1000, r2000 = asymptotic_ratio(p, 0.7, [200, 1000, 2000])
        e200, e1000, e2000 = (abs(r / c - 1) for r in (r200, r1000, r2000))
        assert e1000 < 0.05 and e2000 < 0.05
        assert e2000 < e1000 < e200

    def test_alpha_above_one_series(self):
        p = ArtfimaParams.make(0.4, 0.1)
        asym = asymptotic_constant(p, 1.3)
        # brute force sum of exp(-lam j) w(j)^(alpha-1) with w from log-gamma
        j = np.arange(1, 3000)
        w = np.exp(gammaln(j + 0.4) - gammaln(0.4) - gammaln(j + 1.0) - 0.1 * j)
        series = 1.0 + np.sum(np.exp(-0.1 * j) * w ** 0.3)
        assert asym.candidates["gamma_inverse"] == pytest.approx(1.3 / gamma(0.4) * series, rel=1e-9)
        assert asym.constant > 0

    def test_alpha_above_one_match(self):
        report = compare_asymptotic_forms(ArtfimaParams.make(0.4, 0.1), 1.3, (500, 1000, 2000))
        assert report["relative_change_last"] < 0.02
        assert report["match"] == "gamma_inverse"
        assert report["relative_errors"]["gamma_inverse"] < 0.01


class TestOrdering:
    @pytest.mark.parametrize("alpha", [0.7, 1.3, 2.0])
    def test_lambda_ordering(self, alpha):
        taus = [np.abs(theoretical_codifference(ArtfimaParams.make(0.4, lam), alpha, 60).tau[1:])
                for lam in (0.05, 0.1, 0.5)]
        assert np.all(taus[0] > taus[1]) and np.all(taus[1] > taus[2])

    @pytest.mark.parametrize("alpha", [0.7, 1.3, 2.0])
    def test_d_ordering(self, alpha):
        taus = [np.abs(theoretical_codifference(ArtfimaParams.make(d, 0.1), alpha, 60).tau[1:])
                for d in (0.1, 0.25, 0.4)]
        assert np.all(taus[2] > taus[1]) and np.all(taus[1] > taus[0])


def test_partial_sums():
    curve = theoretical_codifference(ArtfimaParams.make(0.3, 0.1), 1.3, 800)
    s = codiff_abs_partial_sums(curve).values
    assert np.all(np.diff(s) >= 0)
    assert s[800] - s[400] < 1e-6


def test_semi_long_memory_mass():
    totals = [codiff_abs_partial_sums(theoretical_codifference(ArtfimaParams.make(0.3, lam), 1.3, 2000)).values[-1]
              for lam in (0.01, 0.1)]
    assert totals[0] > totals[1]
