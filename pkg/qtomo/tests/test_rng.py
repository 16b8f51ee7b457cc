from math import sqrt

import numpy as np
import pytest
from scipy.stats import kstest

from qtomo import RandomStream, GaussianSpec, Branch, DomainError, uniform, gaussian, cointoss, stream_id_for, \
    sigma_from_epsilon, epsilon_from_sigma


def test_stream_determinism():
    """ The same (seed, stream id) always yields the same variates, distinct ids don't """
    a, b, c = RandomStream(42, 7), RandomStream(42, 7), RandomStream(42, 8)
    ua, ub, uc = a.uniforms(100), b.uniforms(100), c.uniforms(100)
    assert np.array_equal(ua, ub)
    assert not np.array_equal(ua, uc)
    assert np.all((ua >= 0) & (ua < 1))


def test_stream_arguments():
    with pytest.raises(DomainError):
        RandomStream(-1)
    with pytest.raises(DomainError):
        RandomStream(0, 1 << 64)
    RandomStream((1 << 64) - 1, (1 << 64) - 1)


def test_stream_id_for():
    assert stream_id_for(0, 0) == 0
    assert stream_id_for(1, 0) == 1 << 32
    assert stream_id_for(3, 5) == (3 << 32) + 5
    with pytest.raises(DomainError):
        stream_id_for(0, 1 << 32)


def test_streams_are_uncorrelated():
    """ lag-0 correlation of two streams of the same seed is at noise level """
    a = RandomStream(1, 0).uniforms(10 ** 6)
    b = RandomStream(1, 1).uniforms(10 ** 6)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.005


def test_normals_one_by_one_or_in_bulk():
    """ Both outputs of each accepted pair are consumed in order, however the variates are requested """
    one_by_one = RandomStream(5)
    expected = [one_by_one.standard_normal() for _ in range(11)]

    # the bulk path uses numpy log and sqrt, the scalar one the math module
    assert np.allclose(RandomStream(5).standard_normals(11), expected, rtol=1e-13, atol=0)

    chunked = RandomStream(5)
    assert np.allclose(np.concatenate([chunked.standard_normals(3), [chunked.standard_normal()],
                                       chunked.standard_normals(7)]), expected, rtol=1e-13, atol=0)


def test_normal_moments():
    x = RandomStream(2024).standard_normals(10 ** 6)
    assert abs(x.mean()) < 0.004
    assert abs(x.std() - 1) < 0.004


def test_gaussian_scaling():
    """ gaussian(mu, sigma) is mu + sigma * the standard normal drawn from the same stream state """
    sigma = sigma_from_epsilon(0.4083)
    assert sigma == pytest.approx(1.565, abs=1e-3)
    g = GaussianSpec(1, sigma)
    s1, s2 = RandomStream(3), RandomStream(3)
    samples = [gaussian(s1, g) for _ in range(1000)]
    assert np.allclose(samples, 1 + sigma * s2.standard_normals(1000), rtol=0, atol=1e-12)


def test_gaussian_mean():
    g = GaussianSpec.from_epsilon(1, 0.4083)
    x = g.mu + g.sigma * RandomStream(11).standard_normals(10 ** 6)
    assert abs(x.mean() - 1) < 0.006


def test_gaussian_spec_domain():
    with pytest.raises(DomainError):
        GaussianSpec(0, 0)
    with pytest.raises(DomainError):
        GaussianSpec(0, float('nan'))
    with pytest.raises(DomainError):
        GaussianSpec.from_epsilon(0, -1)


def test_sigma_epsilon_conversions():
    assert sigma_from_epsilon(0.04) == pytest.approx(5)
    assert epsilon_from_sigma(22.36) == pytest.approx(0.002, rel=1e-3)
    assert epsilon_from_sigma(sigma_from_epsilon(0.625)) == pytest.approx(0.625)


def test_cointoss_extremes():
    s = RandomStream(0)
    assert all(cointoss(s, 1) is Branch.PLUS for _ in range(1000))
    assert all(cointoss(s, 0) is Branch.MINUS for _ in range(1000))


def test_cointoss_frequency():
    s = RandomStream(99)
    n = 10 ** 5
    plus = sum(cointoss(s, 0.5) is Branch.PLUS for _ in range(n))
    assert abs(plus / n - 0.5) < 4 * sqrt(0.25 / n)


def test_cointoss_uses_uniform():
    """ PLUS exactly when the uniform draw is <= p """
    s1, s2 = RandomStream(8), RandomStream(8)
    for _ in range(100):
        r = uniform(s2)
        assert (cointoss(s1, 0.3) is Branch.PLUS) == (r <= 0.3)


def test_cointoss_domain():
    s = RandomStream(0)
    with pytest.warns(UserWarning):
        assert cointoss(s, 1 + 1e-13) is Branch.PLUS
    with pytest.raises(DomainError):
        cointoss(s, 1.1)
    with pytest.raises(DomainError):
        cointoss(s, -0.01)


def test_branch_means():
    assert Branch.PLUS.mean == 1
    assert Branch.MINUS.mean == -1


def test_uniform_one_by_one_or_in_bulk():
    s1, s2 = RandomStream(42), RandomStream(42)
    assert [uniform(s1) for _ in range(20)] == list(s2.uniforms(20))


def test_uniform_mean():
    u = RandomStream(42).uniforms(10 ** 6)
    assert abs(u.mean() - 0.5) < 0.002


def test_uniform_distribution():
    """ 10^6 draws pass a Kolmogorov-Smirnov test against U[0, 1) at the 1% level """
    u = RandomStream(43).uniforms(10 ** 6)
    assert kstest(u, 'uniform').pvalue > 0.01
