import numpy as np
import pytest

from artfima_stable.exceptions import ArtfimaError, DegenerateSeriesError
from artfima_stable.kernel import ArtfimaParams, TemperedOrder, ma_coefficients, tempered_weights, truncation_length
from artfima_stable.series import SeriesData
from artfima_stable.simulate import apply_ma_filter, cumulative_variance, simulate_artfima, simulate_with_innovations
from artfima_stable.stable import StableSpec, sample_sas

BASE = ArtfimaParams.make(0.1, 0.045)


def test_identity_filter():
    p = ArtfimaParams.make(0.0, 0.5)
    x, z = simulate_with_innovations(p, StableSpec(1.3), 200, seed=4)
    np.testing.assert_array_equal(x.values, z.values[-200:])


def test_reproducible():
    a = simulate_artfima(BASE, StableSpec(1.3), 1000, seed=4)
    b = simulate_artfima(BASE, StableSpec(1.3), 1000, seed=4)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.meta["seed"] == 4 and a.meta["params"]["d"] == 0.1


def test_linearity_in_scale():
    a = simulate_artfima(BASE, StableSpec(1.3, 1.0), 500, seed=4).values
    b = simulate_artfima(BASE, StableSpec(1.3, 2.5), 500, seed=4).values
    np.testing.assert_allclose(b, 2.5 * a, rtol=1e-12, atol=1e-12)


def test_warmup_uses_full_filter():
    x, z = simulate_with_innovations(BASE, StableSpec(2.0), 50, seed=4)
    m = x.meta["filter_length"]
    a = ma_coefficients(BASE, m + 1).values
    zz = z.values
    assert zz.size == 50 + m
    t = 17
    assert x.values[t] == pytest.approx(sum(a[j] * zz[t + m - j] for j in range(m + 1)), rel=1e-12)


def test_arma_path():
    p = ArtfimaParams.make(0.611, 0.026, [0.652], [0.225])
    x = simulate_artfima(p, StableSpec(1.64), 3000, seed=6)
    assert len(x) == 3000 and np.all(np.isfinite(x.values))


def test_fft_matches_direct():
    m = truncation_length(BASE.order, 1e-12)
    a = ma_coefficients(BASE, m + 1).values
    z = sample_sas(StableSpec(1.3), 20_000 + m, seed=2).values
    direct = apply_ma_filter(a, z, "direct")
    fft = apply_ma_filter(a, z, "fft")
    assert np.max(np.abs(fft - direct)) <= 1e-9 * np.max(np.abs(direct))


def test_errors():
    with pytest.raises(ArtfimaError):
        simulate_artfima(BASE, StableSpec(2.0), 0, seed=1)
    with pytest.raises(ArtfimaError):
        simulate_artfima(ArtfimaParams.make(0.1, 0.0), StableSpec(2.0), 10, seed=1)
    with pytest.raises(ValueError):
        apply_ma_filter([1.0], [1.0, 2.0], "bogus")


@pytest.mark.slow
def test_gaussian_autocovariance():
    order = BASE.order
    w = tempered_weights(order, "integrate", 4000).values
    lags = np.arange(6)
    theory = np.array([2.0 * np.dot(w[: w.size - h], w[h:]) for h in lags])
    n, reps = 8192, 50
    est = np.empty((reps, lags.size))
    for r in range(reps):
        x = simulate_artfima(BASE, StableSpec(2.0), n, seed=99, stream=r).values
        est[r] = [np.dot(x[: n - h], x[h:]) / (n - h) for h in lags]
    se = est.std(axis=0, ddof=1) / np.sqrt(reps)
    assert np.all(np.abs(est.mean(axis=0) - theory) < 3 * se)


def test_cumulative_variance_small():
    assert cumulative_variance(np.array([0.0, 2.0])).values.tolist() == [2.0]
    assert np.all(cumulative_variance(np.full(50, 3.3)).values == 0.0)
    with pytest.raises(DegenerateSeriesError):
        cumulative_variance(np.array([1.0]))


def test_cumulative_variance_oracle():
    x = sample_sas(StableSpec(2.0), 300, seed=1).values + 1e4
    v = cumulative_variance(SeriesData(x)).values
    ref = [np.var(x[:k], ddof=1) for k in range(2, 301)]
    np.testing.assert_allclose(v, ref, rtol=1e-9)


def _settle(x):
    v = cumulative_variance(x).values
    return np.max(np.abs(v[4999:] - v[-1])) / v[-1]


def test_gaussian_variance_converges():
    ok = sum(_settle(simulate_artfima(BASE, StableSpec(2.0), 10_000, seed=31, stream=s)) < 0.2
             for s in range(20))
    assert ok >= 18


def test_stable_variance_wanders():
    # heavy tails: the running variance keeps jumping in the second half
    g = np.median([_settle(simulate_artfima(BASE, StableSpec(2.0), 10_000, seed=32, stream=s)) for s in range(20)])
    s = np.median([_settle(simulate_artfima(BASE, StableSpec(1.3), 10_000, seed=32, stream=s)) for s in range(20)])
    assert s > 2 * g
