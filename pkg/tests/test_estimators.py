import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from adft.array_sim import ChainConfig, synthesize_element_signals
from adft.estimators import ChannelCalibrator, HilbertIQ, SpatialBeamformer
from adft.transforms import adft32_matrix, dft_matrix


def _snapshots(seed=0, n=16):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, 32)) + 1j * rng.normal(size=(n, 32))


@pytest.mark.parametrize("engine", ["fast_adft", "dense_adft", "dense_exact"])
def test_beamformer_matches_matrix(engine):
    X = _snapshots()
    Y = SpatialBeamformer(engine).fit(X).transform(X)
    m = dft_matrix(32) if engine == "dense_exact" else adft32_matrix()
    np.testing.assert_allclose(Y, X @ m.to_complex().T, atol=1e-10)


def test_fast_engine_exact_on_integers():
    rng = np.random.default_rng(2)
    X = rng.integers(-100, 100, (50, 32)) + 1j * rng.integers(-100, 100, (50, 32))
    a = SpatialBeamformer("fast_adft").fit_transform(X)
    b = SpatialBeamformer("dense_adft").fit_transform(X)
    np.testing.assert_array_equal(a, b)


def test_beamformer_validation():
    with pytest.raises(ValueError):
        SpatialBeamformer("bogus").fit(_snapshots())
    with pytest.raises(ValueError):
        SpatialBeamformer().fit(np.ones((4, 16)))
    with pytest.raises(ValueError):
        SpatialBeamformer().fit(np.ones(32))
    bad = _snapshots()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        SpatialBeamformer().fit(bad)
    with pytest.raises(NotFittedError):
        SpatialBeamformer().transform(_snapshots())


def test_hilbert_rejects_complex():
    with pytest.raises(ValueError):
        HilbertIQ().fit(_snapshots())


def test_get_set_params_and_clone():
    est = ChannelCalibrator(reference_channel=3, skip=10)
    assert est.get_params() == {"reference_channel": 3, "skip": 10, "tone_frequency": None}
    c = clone(est).set_params(skip=5)
    assert c.skip == 5 and est.skip == 10


def test_pipeline_calibrates_and_beamforms():
    g = np.exp(1j * np.linspace(0, 3, 32)) * np.linspace(0.8, 1.2, 32)
    cfg = ChainConfig(snapshots=1024, channel_mismatch=tuple(g))
    ref = synthesize_element_signals(cfg, 0.0).T
    pipe = make_pipeline(
        HilbertIQ(taps=63),
        ChannelCalibrator(skip=62, tone_frequency=cfg.f_if / cfg.f_clk),
        SpatialBeamformer("fast_adft"),
    )
    pipe.fit(ref)
    np.testing.assert_allclose(pipe.named_steps["channelcalibrator"].weights_, g[0] / g, atol=1e-9)
    beams = pipe.transform(ref)[62:]
    e = np.sum(np.abs(beams) ** 2, axis=0)
    assert np.argmax(e) == 0
    assert 10 * np.log10(e[1:].max() / e[0]) < -60


def test_calibrator_skip_validation():
    with pytest.raises(ValueError):
        ChannelCalibrator(skip=100).fit(_snapshots(n=10))
    with pytest.raises(ValueError):
        ChannelCalibrator(reference_channel=40).fit(_snapshots())
