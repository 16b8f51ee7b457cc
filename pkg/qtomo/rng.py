"""
Seedable random sources. Every `RandomStream` is identified by a master seed and a stream id; the pair always
yields the same variates, and distinct stream ids give statistically independent streams (numpy `SeedSequence`
spawn keys feeding a PCG64 bit generator).

Gaussian variates are produced with the Marsaglia polar method: both outputs of an accepted pair are consumed,
in order, before a new pair is drawn, whether the variates are requested one by one or in bulk.
"""
from enum import Enum
from math import sqrt, log
from warnings import warn

try:  # python 3.5+
    from typing import Union
except ImportError:
    pass

import numpy as np

from qtomo.base import TOLERANCE, MEAN_PLUS, MEAN_MINUS, DomainError, check_positive

_UINT64_MASK = (1 << 64) - 1

# expected number of candidate pairs per accepted pair is 4/pi ~ 1.27
_MARSAGLIA_OVERSAMPLING = 1.3


def stream_id_for(grid_index,  # type: int
                  repetition   # type: int
                  ):
    # type: (...) -> int
    """ Packs a grid-point index and a repetition index into a single 64-bit stream id """
    if not (0 <= grid_index < (1 << 32)) or not (0 <= repetition < (1 << 32)):
        raise DomainError("grid index and repetition should both be in [0, 2**32), found %r and %r"
                          % (grid_index, repetition))
    return (grid_index << 32) | repetition


class RandomStream(object):
    """
    A deterministic source of uniform and standard normal variates. A stream is owned by a single consumer at a time;
    create one stream per independent task.
    """
    __slots__ = ['seed', 'stream_id', '_gen', '_pool', '_pool_pos']

    def __init__(self,
                 seed,         # type: int
                 stream_id=0   # type: int
                 ):
        """
        :param seed: the master seed, an unsigned 64-bit integer
        :param stream_id: the derivation index, an unsigned 64-bit integer (see `stream_id_for`)
        """
        for name, value in (('seed', seed), ('stream_id', stream_id)):
            if int(value) != value or not (0 <= value <= _UINT64_MASK):
                raise DomainError("%s should be an unsigned 64-bit integer, found %r" % (name, value))
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(seq))
        # standard normals generated but not consumed yet
        self._pool = np.empty(0)
        self._pool_pos = 0

    def uniform(self):
        # type: (...) -> float
        """ One variate, uniform on [0, 1) """
        return float(self._gen.random())

    def uniforms(self,
                 size  # type: int
                 ):
        # type: (...) -> np.ndarray
        """ `size` variates, uniform on [0, 1) """
        return self._gen.random(size)

    def standard_normal(self):
        # type: (...) -> float
        """ One N(0, 1) variate """
        if self._pool_pos >= len(self._pool):
            self._refill_one_pair()
        x = self._pool[self._pool_pos]
        self._pool_pos += 1
        return float(x)

    def standard_normals(self,
                         size  # type: int
                         ):
        # type: (...) -> np.ndarray
        """ `size` N(0, 1) variates """
        out = np.empty(size)
        filled = 0
        while filled < size:
            available = len(self._pool) - self._pool_pos
            if available == 0:
                self._refill_pairs((size - filled + 1) // 2)
                continue
            take = min(available, size - filled)
            out[filled:filled + take] = self._pool[self._pool_pos:self._pool_pos + take]
            self._pool_pos += take
            filled += take
        return out

    def _refill_one_pair(self):
        while True:
            v1 = 2 * self._gen.random() - 1
            v2 = 2 * self._gen.random() - 1
            s = v1 * v1 + v2 * v2
            if 0 < s < 1:
                break
        f = sqrt(-2 * log(s) / s)
        self._pool = np.array([v1 * f, v2 * f])
        self._pool_pos = 0

    def _refill_pairs(self,
                      n_pairs  # type: int
                      ):
        accepted = []
        n_accepted = 0
        while n_accepted < n_pairs:
            n_draws = int((n_pairs - n_accepted) * _MARSAGLIA_OVERSAMPLING) + 2
            v = 2 * self._gen.random((n_draws, 2)) - 1
            s = v[:, 0] ** 2 + v[:, 1] ** 2
            ok = (s > 0) & (s < 1)
            v, s = v[ok], s[ok]
            # (V1 f, V2 f) stay adjacent so that both outputs of an acceptance are consumed in a row
            accepted.append((v * np.sqrt(-2 * np.log(s) / s)[:, np.newaxis]).ravel())
            n_accepted += len(s)
        self._pool = np.concatenate(accepted)
        self._pool_pos = 0

    def __repr__(self):
        return "RandomStream(seed=%r, stream_id=%r)" % (self.seed, self.stream_id)


def sigma_from_epsilon(epsilon  # type: float
                       ):
    # type: (...) -> float
    """ Pointer spread of a measurement of strength epsilon: 1 / sqrt(epsilon) """
    return 1 / sqrt(check_positive('epsilon', epsilon))


def epsilon_from_sigma(sigma  # type: float
                       ):
    # type: (...) -> float
    """ Measurement strength of a pointer of spread sigma: 1 / sigma ** 2 """
    return 1 / check_positive('sigma', sigma) ** 2


class GaussianSpec(object):
    """ A normal distribution N(mu, sigma), sigma > 0 """
    __slots__ = ['mu', 'sigma']

    def __init__(self,
                 mu,     # type: float
                 sigma   # type: float
                 ):
        self.mu = float(mu)
        self.sigma = check_positive('sigma', sigma)

    @classmethod
    def from_epsilon(cls,
                     mu,       # type: float
                     epsilon   # type: float
                     ):
        # type: (...) -> GaussianSpec
        return cls(mu, sigma_from_epsilon(epsilon))

    def __repr__(self):
        return "GaussianSpec(mu=%r, sigma=%r)" % (self.mu, self.sigma)


class Branch(Enum):
    """ The pointer Gaussian chosen by the coin toss, valued by its mean """
    PLUS = 1
    MINUS = -1

    @property
    def mean(self):
        # type: (...) -> float
        return MEAN_PLUS if self is Branch.PLUS else MEAN_MINUS


def uniform(s  # type: RandomStream
            ):
    # type: (...) -> float
    """ Draws a variate uniform on [0, 1) from `s` """
    return s.uniform()


def gaussian(s,  # type: RandomStream
             g   # type: GaussianSpec
             ):
    # type: (...) -> float
    """ Draws a N(g.mu, g.sigma) variate from `s`: mu + sigma * (Marsaglia polar standard normal) """
    return g.mu + g.sigma * s.standard_normal()


def check_probability(p  # type: float
                      ):
    # type: (...) -> float
    """
    Returns `p` as a float in [0, 1]. Values outside [0, 1] but within `TOLERANCE` of it are clamped, with a
    warning; values further away raise a `DomainError`.
    """
    p = float(p)
    if not (-TOLERANCE <= p <= 1 + TOLERANCE):
        raise DomainError("A probability should be in [0, 1], found %r" % p)
    if p < 0 or p > 1:
        warn("Probability %r is outside of [0, 1] by less than the tolerance, it has been clamped" % p)
        p = min(max(p, 0.), 1.)
    return p


def cointoss(s,  # type: RandomStream
             p   # type: float
             ):
    # type: (...) -> Branch
    """
    A biased coin: draws r uniform on [0, 1) and returns PLUS when r <= p, MINUS otherwise.

    :param s:
    :param p: the probability of PLUS, typically rho00 of the state in the measurement basis
    :return:
    """
    p = check_probability(p)
    return Branch.PLUS if s.uniform() <= p else Branch.MINUS

