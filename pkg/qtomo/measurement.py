"""
The two-Gaussian pointer model of a measurement along the z axis.

A measurement of strength epsilon couples the qubit to a pointer of spread sigma = 1 / sqrt(epsilon). The reading M
is drawn from N(+1, sigma) with probability rho00 and from N(-1, sigma) otherwise, and the state is then updated by
Bayes' rule:

    rho00' = rho00 P(M | 0) / P(M),   rho11' = rho11 P(M | 1) / P(M),
    rho01' = rho01 sqrt(rho00' rho11' / (rho00 rho11)),   rho10' = conj(rho01')

with P(M) = rho00 P(M | 0) + rho11 P(M | 1). Measurements along other axes are obtained by rotating the state first
(see `qtomo.state.rotate`).

Functions named `*_stack` work on (..., 2, 2) arrays of density matrices with pre-drawn variates, so that a whole
ensemble can be processed at once. They perform no validation.
"""
import logging
from math import exp, pi, sqrt

try:  # python 3.5+
    from typing import Union, Any, Optional, Sequence, Iterator, Tuple
except ImportError:
    pass

import numpy as np

from qtomo.base import POLE_TOLERANCE, MEAN_PLUS, MEAN_MINUS, DomainError, check_positive
from qtomo.rng import RandomStream, GaussianSpec, Branch, cointoss, gaussian, sigma_from_epsilon
from qtomo.state import DensityMatrix, as_density, stack


logger = logging.getLogger(__name__)

# number of steps whose variates a trajectory draws at once from its stream
TRAJECTORY_BLOCK = 1024


def likelihood(M,       # type: float
               branch,  # type: Branch
               sigma    # type: float
               ):
    # type: (...) -> float
    """
    The density of the reading M under the Gaussian of `branch`: N(+1, sigma) for PLUS (outcome |0>) and N(-1, sigma)
    for MINUS (outcome |1>).
    """
    sigma = check_positive('sigma', sigma)
    return exp(-(M - branch.mean) ** 2 / (2 * sigma ** 2)) / sqrt(2 * pi * sigma ** 2)


def outcome_density(M,      # type: float
                    rho,    # type: Union[DensityMatrix, Any]
                    sigma   # type: float
                    ):
    # type: (...) -> float
    """ The density of the reading M for state rho: P(M) = rho00 P(M | 0) + rho11 P(M | 1) """
    rho = as_density(rho)
    return rho.p00 * likelihood(M, Branch.PLUS, sigma) + rho.p11 * likelihood(M, Branch.MINUS, sigma)


def bayesian_update_stack(states,  # type: np.ndarray
                          M,       # type: Union[float, np.ndarray]
                          sigma    # type: float
                          ):
    # type: (...) -> np.ndarray
    """
    Array version of `bayesian_update`: returns a new (..., 2, 2) array. `M` broadcasts against states[..., 0, 0].

    States whose population rho00 or rho11 is below `POLE_TOLERANCE`, before or after the update, are snapped onto
    the corresponding pole with zero coherences. Poles are fixed points.
    """
    p0 = states[..., 0, 0].real
    p1 = states[..., 1, 1].real
    at_zero = p1 < POLE_TOLERANCE
    at_one = p0 < POLE_TOLERANCE
    inside = ~(at_zero | at_one)

    # log-weights, the common normalisation of the two gaussians cancels
    safe_p0 = np.where(inside, p0, 0.5)
    safe_p1 = np.where(inside, p1, 0.5)
    two_var = 2 * sigma ** 2
    l0 = np.log(safe_p0) - (M - MEAN_PLUS) ** 2 / two_var
    l1 = np.log(safe_p1) - (M - MEAN_MINUS) ** 2 / two_var
    top = np.maximum(l0, l1)
    w0 = np.exp(l0 - top)
    w1 = np.exp(l1 - top)
    q0 = w0 / (w0 + w1)
    q1 = w1 / (w0 + w1)
    r01 = states[..., 0, 1] * np.sqrt(q0 * q1 / (safe_p0 * safe_p1))

    at_zero = at_zero | (inside & (q1 < POLE_TOLERANCE))
    at_one = at_one | (inside & (q0 < POLE_TOLERANCE))
    q0 = np.where(at_zero, 1., np.where(at_one, 0., q0))
    q1 = np.where(at_zero, 0., np.where(at_one, 1., q1))
    r01 = np.where(at_zero | at_one, 0., r01)

    out = np.empty(np.broadcast(q0, states[..., 0, 0]).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = q0
    out[..., 0, 1] = r01
    out[..., 1, 0] = np.conj(r01)
    out[..., 1, 1] = q1
    return out


def bayesian_update(rho,    # type: Union[DensityMatrix, Any]
                    M,      # type: float
                    sigma   # type: float
                    ):
    # type: (...) -> DensityMatrix
    """
    The state after a z measurement with pointer spread `sigma` returned the reading `M`.

    :param rho:
    :param M: the meter reading
    :param sigma: the pointer spread, 1 / sqrt(epsilon)
    :return:
    """
    sigma = check_positive('sigma', sigma)
    return DensityMatrix(bayesian_update_stack(as_density(rho).matrix, float(M), sigma))


class PointerSample(object):
    """
    The record of one weak measurement: the eigen-branch picked by the coin toss, the meter reading and the pointer
    spread that produced it.
    """
    __slots__ = ['branch', 'reading', 'sigma']

    def __init__(self,
                 branch,   # type: Branch
                 reading,  # type: float
                 sigma     # type: float
                 ):
        self.branch = branch
        self.reading = float(reading)
        self.sigma = check_positive('sigma', sigma)
        if not np.isfinite(self.reading):
            raise DomainError("A meter reading should be finite, found %r" % reading)

    def is_valid(self,
                 a  # type: float
                 ):
        # type: (...) -> bool
        """ False when the reading falls strictly inside the discard region (-a, a) """
        return self.reading >= a or self.reading <= -a

    def signed(self,
               a  # type: float
               ):
        # type: (...) -> int
        """ +1 right of the discard region (M >= a), -1 left of it (M <= -a), 0 inside """
        if self.reading >= a:
            return 1
        elif self.reading <= -a:
            return -1
        else:
            return 0

    def __repr__(self):
        return "PointerSample(branch=%s, reading=%r, sigma=%r)" % (self.branch.name, self.reading, self.sigma)


def weak_measure_stack(states,    # type: np.ndarray
                       sigma,     # type: float
                       uniforms,  # type: np.ndarray
                       normals    # type: np.ndarray
                       ):
    # type: (...) -> Tuple[np.ndarray, np.ndarray, np.ndarray]
    """
    Array version of `weak_measure`, consuming pre-drawn variates: one uniform (the coin) and one standard normal per
    state.

    :return: a tuple (plus, readings, posterior) where `plus` is True where the PLUS branch was chosen
    """
    plus = uniforms <= states[..., 0, 0].real
    readings = np.where(plus, MEAN_PLUS, MEAN_MINUS) + sigma * normals
    return plus, readings, bayesian_update_stack(states, readings, sigma)


def weak_measure(rho,      # type: Union[DensityMatrix, Any]
                 epsilon,  # type: float
                 s         # type: RandomStream
                 ):
    # type: (...) -> Tuple[PointerSample, DensityMatrix]
    """
    Simulates one measurement of strength `epsilon` along z: a biased coin picks the Gaussian (probability rho00 for
    the +1 one), a reading is drawn from it, and the state is updated by Bayes' rule.

    :param rho:
    :param epsilon: the measurement strength, > 0
    :param s: the random stream to draw from
    :return: the pointer sample and the posterior state
    """
    rho = as_density(rho)
    sigma = sigma_from_epsilon(epsilon)
    branch = cointoss(s, rho.p00)
    reading = gaussian(s, GaussianSpec(branch.mean, sigma))
    return PointerSample(branch, reading, sigma), bayesian_update(rho, reading, sigma)


def projective_measure_stack(states,   # type: np.ndarray
                             uniforms  # type: np.ndarray
                             ):
    # type: (...) -> np.ndarray
    """ Array version of `projective_measure`: +1 where uniforms <= rho00, -1 elsewhere """
    return np.where(uniforms <= states[..., 0, 0].real, 1, -1)


def projective_measure(rho,  # type: Union[DensityMatrix, Any]
                       s     # type: RandomStream
                       ):
    # type: (...) -> int
    """ A strong z measurement: +1 with probability rho00, -1 otherwise. The post-measurement state is not needed """
    return 1 if cointoss(s, as_density(rho).p00) is Branch.PLUS else -1


class Trajectory(object):
    """
    The sequence of states rho(0), ..., rho(N) produced by successive measurements. The time step is 1: states are
    indexed by step count.
    """
    __slots__ = ['_states']

    def __init__(self,
                 states  # type: np.ndarray
                 ):
        """
        :param states: a (N + 1, 2, 2) complex array, rho(0) first
        """
        states = np.array(states, dtype=complex)
        states.setflags(write=False)
        self._states = states

    @property
    def steps(self):
        # type: (...) -> int
        """ The number of measurements N """
        return len(self._states) - 1

    @property
    def states(self):
        # type: (...) -> np.ndarray
        """ The read-only (N + 1, 2, 2) array of states """
        return self._states

    @property
    def p00(self):
        # type: (...) -> np.ndarray
        return self._states[:, 0, 0].real

    @property
    def p11(self):
        # type: (...) -> np.ndarray
        return self._states[:, 1, 1].real

    def __len__(self):
        return len(self._states)

    def __getitem__(self, t):
        # type: (int) -> DensityMatrix
        return DensityMatrix(self._states[t])

    def __iter__(self):
        # type: (...) -> Iterator[DensityMatrix]
        for t in range(len(self._states)):
            yield self[t]

    def __repr__(self):
        return "Trajectory(steps=%s, final_p00=%r)" % (self.steps, float(self.p00[-1]))


def ensemble_trajectories(rho0,     # type: Union[DensityMatrix, Any]
                          sigma,    # type: float
                          steps,    # type: int
                          streams   # type: Sequence[RandomStream]
                          ):
    # type: (...) -> Iterator[Tuple[int, np.ndarray]]
    """
    Runs one trajectory per stream, all in lock-step, and yields (t, states) for t = 0 ... steps, `states` being the
    (len(streams), 2, 2) array of the current states. Each stream draws its coins and its readings by blocks of
    `TRAJECTORY_BLOCK` steps, so that member i is identical to `trajectory(rho0, sigma, steps, streams[i])`.

    :param rho0: the initial state of all trajectories
    :param sigma: the pointer spread
    :param steps: the number of measurements, >= 1
    :param streams: one stream per trajectory
    :return:
    """
    sigma = check_positive('sigma', sigma)
    if int(steps) != steps or steps < 1:
        raise DomainError("A trajectory needs at least one step, found %r" % (steps,))
    steps = int(steps)
    states = stack(rho0, len(streams))
    yield 0, states

    t = 0
    while t < steps:
        block = min(TRAJECTORY_BLOCK, steps - t)
        uniforms = np.empty((len(streams), block))
        normals = np.empty((len(streams), block))
        for i, s in enumerate(streams):
            uniforms[i] = s.uniforms(block)
            normals[i] = s.standard_normals(block)
        for j in range(block):
            _, _, states = weak_measure_stack(states, sigma, uniforms[:, j], normals[:, j])
            t += 1
            yield t, states


def trajectory(rho0,   # type: Union[DensityMatrix, Any]
               sigma,  # type: float
               N,      # type: int
               s       # type: RandomStream
               ):
    # type: (...) -> Trajectory
    """
    Generates a quantum trajectory: N successive weak measurements with pointer spread `sigma`, each one starting from
    the posterior of the previous one.

    :param rho0: the initial state rho(0)
    :param sigma:
    :param N: the number of steps, >= 1
    :param s:
    :return:
    """
    rho0 = as_density(rho0)
    if int(N) != N or N < 1:
        raise DomainError("A trajectory needs at least one step, found %r" % (N,))
    states = np.empty((int(N) + 1, 2, 2), dtype=complex)
    for t, current in ensemble_trajectories(rho0, sigma, N, [s]):
        states[t] = current[0]
    return Trajectory(states)


def _check_threshold(threshold  # type: float
                     ):
    if not (0.5 < threshold < 1):
        raise DomainError("The collapse threshold should be in (0.5, 1), found %r" % (threshold,))


def collapse_time(tr,        # type: Trajectory
                  threshold  # type: float
                  ):
    # type: (...) -> Optional[int]
    """
    The smallest t such that rho00(t') >= threshold or rho00(t') <= 1 - threshold for every t' >= t, or None if the
    trajectory does not end collapsed.

    :param tr:
    :param threshold: in (0.5, 1)
    :return:
    """
    _check_threshold(threshold)
    p00 = tr.p00
    collapsed = (p00 >= threshold) | (p00 <= 1 - threshold)
    if not collapsed[-1]:
        return None
    outside = np.flatnonzero(~collapsed)
    return 0 if len(outside) == 0 else int(outside[-1]) + 1


def collapse_times(rho0,      # type: Union[DensityMatrix, Any]
                   sigma,     # type: float
                   steps,     # type: int
                   streams,   # type: Sequence[RandomStream]
                   threshold  # type: float
                   ):
    # type: (...) -> np.ndarray
    """
    The `collapse_time` of one trajectory per stream, computed on the fly without storing the trajectories.

    :return: a float array, with +inf for the trajectories that are not collapsed after `steps` steps
    """
    _check_threshold(threshold)
    last_outside = np.full(len(streams), -1, dtype=np.int64)
    collapsed = None
    for t, states in ensemble_trajectories(rho0, sigma, steps, streams):
        p00 = states[:, 0, 0].real
        collapsed = (p00 >= threshold) | (p00 <= 1 - threshold)
        last_outside[~collapsed] = t

    times = (last_outside + 1).astype(float)
    times[~collapsed] = np.inf
    logger.debug("collapse times of %s trajectories: %s never collapsed within %s steps",
                 len(streams), int(np.sum(~collapsed)), steps)
    return times
