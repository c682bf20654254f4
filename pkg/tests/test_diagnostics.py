import numpy as np
import pytest
from statsmodels.stats.diagnostic import acorr_ljungbox

from artfima_stable.diagnostics import (ljung_box, ljung_box_from_acf, normalized_sample_acvf, residuals,
                                        sample_acf)
from artfima_stable.exceptions import ArtfimaError, DegenerateSeriesError
from artfima_stable.kernel import ArtfimaParams, ma_coefficients
from artfima_stable.series import SeriesData
from artfima_stable.simulate import simulate_artfima, simulate_with_innovations
from artfima_stable.stable import StableSpec, sample_sas

TRUE = ArtfimaParams.make(0.1, 0.045)


def recovered_pair(params, alpha, n, seed, sim_tol=1e-12, res_tol=1e-10, stream=0):
    x, z = simulate_with_innovations(params, StableSpec(alpha), n, seed, sim_tol, stream)
    r = residuals(x, params, res_tol)
    offset = x.meta["filter_length"] + r.meta["filter_length"]
    return r.values, z.values[offset:]


class TestResiduals:
    def test_round_trip_gaussian(self):
        zhat, z = recovered_pair(TRUE, 2.0, 4096, seed=3)
        assert np.sqrt(np.mean((zhat - z) ** 2) / np.mean(z ** 2)) < 0.05

    def test_round_trip_arma(self):
        params = ArtfimaParams.make(0.611, 0.026, [0.652], [0.225])
        zhat, z = recovered_pair(params, 1.64, 6000, seed=3)
        assert np.sqrt(np.mean((zhat - z) ** 2) / np.mean(z ** 2)) < 1e-6

    def test_round_trip_machine_precision(self):
        params = ArtfimaParams.make(0.05, 0.5)
        zhat, z = recovered_pair(params, 1.5, 2000, seed=4, sim_tol=1e-16, res_tol=1e-16)
        assert np.max(np.abs(zhat - z)) < 1e-13 * np.max(np.abs(z))

    def test_identity_filter(self):
        x = np.arange(1.0, 11.0)
        r = residuals(x, ArtfimaParams.make(0.0, 0.3))
        np.testing.assert_array_equal(r.values, x[r.meta["filter_length"]:])

    def test_length(self):
        x = simulate_artfima(TRUE, StableSpec(2.0), 1000, seed=1)
        r = residuals(x, TRUE, 1e-8)
        assert len(r) == 1000 - r.meta["filter_length"]

    def test_capped_filter(self):
        weak = ArtfimaParams.make(0.1, 0.001)
        x = simulate_artfima(weak, StableSpec(2.0), 3000, seed=2)
        r = residuals(x, weak, max_length=500)
        assert len(r) == 2500 and r.meta["truncated"] and 0 < r.meta["tail_weight"] < 1
        assert not residuals(x, TRUE, max_length=500).meta["truncated"]

    def test_too_short(self):
        with pytest.raises(ArtfimaError):
            residuals(np.ones(50), ArtfimaParams.make(0.3, 0.01))

    def test_wrong_params_detected(self):
        wrong = ArtfimaParams.make(0.4, 0.045)
        hits = 0
        for r in range(100):
            x = simulate_artfima(TRUE, StableSpec(2.0), 4096, seed=12, stream=r)
            acf = sample_acf(residuals(x, wrong), 1)
            hits += abs(acf.values[1]) > acf.band
        assert hits >= 90


class TestAcf:
    def test_white_noise_band(self):
        acf = sample_acf(sample_sas(StableSpec(2.0), 10_000, seed=2), 100)
        assert acf.values[0] == 1.0
        assert acf.band == pytest.approx(1.96 / 100)
        assert acf.outside_band().size <= 8

    def test_against_statsmodels(self):
        from statsmodels.tsa.stattools import acf as sm_acf

        x = simulate_artfima(TRUE, StableSpec(1.5), 500, seed=3).values
        np.testing.assert_allclose(sample_acf(x, 20).values, sm_acf(x, nlags=20, fft=False), rtol=1e-10, atol=1e-12)

    def test_trend_near_one(self):
        assert sample_acf(np.arange(10_000.0), 1).values[1] > 0.999

    def test_errors(self):
        with pytest.raises(DegenerateSeriesError):
            sample_acf(np.full(20, 2.0), 3)
        with pytest.raises(ArtfimaError):
            sample_acf(np.arange(10.0), 5)


class TestNormalizedAcvf:
    def test_definition(self):
        x = np.array([1.0, -2.0, 3.0, 0.5, 1.5])
        res = normalized_sample_acvf(x, 1.3, 3)
        e = np.dot(x, x)
        ref = [np.dot(x[: 5 - h], x[h:]) / e for h in range(4)]
        np.testing.assert_allclose(res.values, ref, rtol=1e-15)
        assert res.values[0] == 1.0

    def test_bounded_and_scale_invariant(self):
        x = simulate_artfima(TRUE, StableSpec(0.8), 3000, seed=5).values
        a = normalized_sample_acvf(x, 0.8, 50).values
        b = normalized_sample_acvf(4.0 * x, 0.8, 50).values
        np.testing.assert_array_equal(a, b)
        assert np.all(np.abs(a) <= 1.0)

    def test_converges_to_model(self):
        a = ma_coefficients(TRUE, 5000).values
        target = np.dot(a[:-1], a[1:]) / np.dot(a, a)
        est = [normalized_sample_acvf(simulate_artfima(TRUE, StableSpec(1.3), 10_000, seed=14, stream=r), 1.3, 1).values[1]
               for r in range(50)]
        assert np.median(np.abs(np.array(est) - target)) < 0.05

    def test_errors(self):
        with pytest.raises(DegenerateSeriesError):
            normalized_sample_acvf(np.zeros(10), 1.5, 2)
        with pytest.raises(ArtfimaError):
            normalized_sample_acvf(np.ones(10), 2.5, 2)


class TestLjungBox:
    def test_against_statsmodels(self):
        x = simulate_artfima(TRUE, StableSpec(1.7), 800, seed=6).values
        ref = acorr_ljungbox(x, lags=[20])
        q, p = ljung_box(x, 20)
        assert q == pytest.approx(float(ref["lb_stat"].iloc[0]), rel=1e-10)
        assert p == pytest.approx(float(ref["lb_pvalue"].iloc[0]), rel=1e-8, abs=1e-300)

    def test_df_adjusted(self):
        x = sample_sas(StableSpec(2.0), 600, seed=7).values
        ref = acorr_ljungbox(x, lags=[20], model_df=4)
        q, p = ljung_box(x, 20, df=16)
        assert p == pytest.approx(float(ref["lb_pvalue"].iloc[0]), rel=1e-8)

    def test_zero_acf(self):
        assert ljung_box_from_acf(np.zeros(10), 100) == (0.0, 1.0)

    def test_monotone_in_lags(self):
        x = simulate_artfima(TRUE, StableSpec(1.2), 1000, seed=8)
        qs = [ljung_box(x, h)[0] for h in range(1, 40)]
        assert np.all(np.diff(qs) >= 0)
        assert all(0.0 <= ljung_box(x, h)[1] <= 1.0 for h in (1, 10, 39))

    def test_size(self):
        rejections = sum(ljung_box(sample_sas(StableSpec(2.0), 1000, seed=9, stream=r), 20)[1] < 0.05
                         for r in range(200))
        assert 0.02 <= rejections / 200 <= 0.10

    def test_lag_limit(self):
        with pytest.raises(ArtfimaError):
            ljung_box(np.random.default_rng(0).standard_normal(40), 10)
