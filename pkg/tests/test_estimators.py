import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from otrestore.degrade import apply_freq_sparse_noise, gen_clean
from otrestore.estimators import SpectralGainRestorer
from otrestore.training import GainModel


def pools(n=6, size=8):
    clean = np.stack([gen_clean((size, size), seed=k) for k in range(n)])
    degraded = np.stack([
        apply_freq_sparse_noise(gen_clean((size, size), seed=50 + k),
                                count=2, amplitude=0.5, seed=90 + k)[0]
        for k in range(n)
    ])
    return degraded, clean


def test_get_params_round_trip():
    est = SpectralGainRestorer(q=2.0, lam=0.5, patch_size=8)
    params = est.get_params()
    assert params["q"] == 2.0 and params["lam"] == 0.5
    est2 = clone(est)
    assert est2.get_params() == params


def test_transform_before_fit_raises():
    with pytest.raises(NotFittedError):
        SpectralGainRestorer(patch_size=8).transform(np.zeros((1, 8, 8)))


def test_fit_requires_clean_pool():
    X, _ = pools()
    with pytest.raises(ValueError, match="clean pool"):
        SpectralGainRestorer(patch_size=8).fit(X)


def test_fit_transform_shapes_and_determinism():
    X, y = pools()
    est = SpectralGainRestorer(q=1.0, iterations=4, patch_size=8, seed=5,
                               learning_rate=0.005)
    out1 = est.fit(X, y).transform(X)
    assert out1.shape == X.shape
    assert est.gains_.shape == (8, 8)
    assert est.n_iter_ == 4
    est2 = SpectralGainRestorer(q=1.0, iterations=4, patch_size=8, seed=5,
                                learning_rate=0.005)
    out2 = est2.fit(X, y).transform(X)
    assert np.array_equal(out1, out2)


def test_predict_alias():
    X, y = pools()
    est = SpectralGainRestorer(iterations=2, patch_size=8, seed=1,
                               learning_rate=0.005).fit(X, y)
    assert np.array_equal(est.predict(X), est.transform(X))


def test_invalid_config_surfaces_at_fit():
    X, y = pools()
    with pytest.raises(ValueError, match="q must"):
        SpectralGainRestorer(q=0.7, patch_size=8).fit(X, y)


def test_set_model_enables_transform():
    est = SpectralGainRestorer(patch_size=8)
    est.set_model(GainModel.identity(8))
    X, _ = pools()
    assert np.allclose(est.transform(X), X, atol=1e-10)


def test_mixed_shapes_rejected():
    est = SpectralGainRestorer(patch_size=8, iterations=1)
    X = [np.zeros((8, 8)), np.zeros((8, 4))]
    with pytest.raises(ValueError, match="shape"):
        est.fit(X, [np.zeros((8, 8))])
