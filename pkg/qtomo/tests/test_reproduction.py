"""
Reproduction of the published fidelity curves and collapse times, at 10^4 repetitions per strength.
These take a few minutes: run them with `pytest -m slow`.
"""
import numpy as np
import pytest

from qtomo import TomographyConfig, Scheme, Binning, RandomStream, sweep, collapse_times, parse_grid, \
    mub_projective_run, RHO_A, RHO_B

pytestmark = pytest.mark.slow

GRID = parse_grid('0.1:1.0:0.05')
REPETITIONS = 10000


def fidelity_curve(state, ensemble, scheme, binning=Binning.SIGNED, seed=0):
    base = TomographyConfig(state, ensemble, GRID[0], scheme=scheme, binning=binning, repetitions=REPETITIONS,
                            seed=seed)
    return np.array([row.mean_fidelity for row in sweep(base, GRID, workers=4)])


def peak(curve):
    i = int(np.argmax(curve))
    return GRID[i], curve[i], i


def test_rho_a_small_ensemble():
    """ rho_A, 30 copies: the weak scheme peaks in the interior and beats the projective one there """
    weak = fidelity_curve(RHO_A, 30, Scheme.WEAK, seed=1)
    projective = fidelity_curve(RHO_A, 30, Scheme.PROJECTIVE, seed=2)

    epsilon_star, weak_peak, i = peak(weak)
    assert 0 < i < len(GRID) - 1
    assert 0.25 <= epsilon_star <= 0.55
    assert weak_peak > projective.mean()
    assert projective.max() - projective.min() < 0.03


def test_rho_a_large_ensemble():
    """ rho_A, 60 copies: the projective scheme wins """
    weak = fidelity_curve(RHO_A, 60, Scheme.WEAK, seed=3)
    projective = fidelity_curve(RHO_A, 60, Scheme.PROJECTIVE, seed=4)

    _, weak_peak, _ = peak(weak)
    assert weak_peak == pytest.approx(0.82, abs=0.03)
    assert projective.mean() == pytest.approx(0.86, abs=0.02)
    assert projective.mean() >= weak_peak


def test_rho_b():
    """ rho_B (pure +x state), 30 copies """
    weak = fidelity_curve(RHO_B, 30, Scheme.WEAK, seed=5)
    projective = fidelity_curve(RHO_B, 30, Scheme.PROJECTIVE, seed=6)

    epsilon_star, weak_peak, _ = peak(weak)
    assert weak_peak == pytest.approx(0.62, abs=0.04)
    assert 0.45 <= epsilon_star <= 0.80
    assert projective.mean() == pytest.approx(0.80, abs=0.02)


def test_raw_readings_beat_binning_on_larger_ensembles():
    """ Averaging the raw readings is unbiased: once the ensemble is large enough it beats sign binning """
    signed = fidelity_curve(RHO_A, 150, Scheme.WEAK, seed=7)
    epsilon_star, signed_peak, i = peak(signed)
    raw = fidelity_curve(RHO_A, 150, Scheme.WEAK, binning=Binning.RAW, seed=7)
    assert raw[i] >= signed_peak


def test_projective_unbiased():
    cfg = TomographyConfig(RHO_A, 300000, 0.4, scheme=Scheme.PROJECTIVE)
    est = mub_projective_run(cfg, RandomStream(31))
    assert np.allclose(list(est), (-0.385, -0.042, 0.399), rtol=0, atol=0.01)


@pytest.mark.parametrize('sigma, steps, low, high', [(5, 3000, 5, 100),
                                                     (22.36, 30000, 150, 2500)], ids=['sigma=5', 'sigma=22.36'])
def test_collapse_median(sigma, steps, low, high):
    """ Median collapse time of 1000 trajectories from the +x state, threshold 0.99 """
    streams = [RandomStream(2015, i) for i in range(1000)]
    times = collapse_times(RHO_B, sigma, steps, streams, 0.99)
    assert low <= np.median(times) <= high
