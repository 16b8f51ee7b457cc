"""
Single-qubit state tomography from an ensemble of n identical copies, with two schemes:

 * WEAK: on every copy, a weak sigma_z measurement, a weak sigma_x measurement (after rotating x onto z), then a
   projective sigma_y measurement (after rotating y onto z). Readings are binned outside of a discard region of
   half-width a, and the x and y estimators are corrected for the backaction by exp(epsilon / 2) and exp(epsilon).
 * PROJECTIVE: the ensemble is split in three equal parts, measured projectively along z, x and y.

The estimate is scored against the true Bloch vector by f = 1 - |v - v_est|^2, averaged over independent repetitions.
Repetition r of grid point k always draws from stream `stream_id_for(k, r)` of the master seed, so that results do not
depend on how repetitions are batched or spread over worker processes.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from math import exp

try:  # python 3.5+
    from typing import Union, Any, Sequence, List, Tuple, Optional
except ImportError:
    pass

import numpy as np

from qtomo.base import ConfigError, DegenerateRunError, EmptyStatisticsError, DomainError, check_positive
from qtomo.rng import RandomStream, stream_id_for, sigma_from_epsilon
from qtomo.state import DensityMatrix, BlochVector, as_density, bloch_from_density, stack, rotate, rotate_stack, \
    TO_X_BASIS, TO_Y_BASIS
from qtomo.measurement import weak_measure_stack, projective_measure_stack


logger = logging.getLogger(__name__)

DEFAULT_REPETITIONS = 100000

# at most this many repetitions are simulated together in one array computation
BATCH_SIZE = 500

# and at most this many ensemble members (qubits) per batch, which bounds the memory of a batch whatever the ensemble
ELEMENT_BUDGET = 1 << 17


class Scheme(Enum):
    WEAK = 'weak'
    PROJECTIVE = 'projective'


class Binning(Enum):
    """ How a valid meter reading contributes to its tally: its side of the discard region, or its raw value """
    SIGNED = 'signed'
    RAW = 'raw'


def _as_enum(enum_type, value, name):
    try:
        return enum_type(value.lower() if isinstance(value, str) else value)
    except ValueError:
        raise ConfigError("Unsupported %s %r, should be one of %s"
                          % (name, value, ', '.join(repr(e.value) for e in enum_type)))


class TomographyConfig(object):
    """
    The full description of a tomography experiment. Both weak measurements use the same strength `epsilon`.
    Instances are immutable: use `replace` to derive a modified copy.
    """
    __slots__ = ['state', 'ensemble', 'epsilon', 'discard', 'scheme', 'binning', 'repetitions', 'seed']

    def __init__(self,
                 state,                             # type: Union[DensityMatrix, Any]
                 ensemble,                          # type: int
                 epsilon,                           # type: float
                 discard=0.,                        # type: float
                 scheme=Scheme.WEAK,                # type: Union[Scheme, str]
                 binning=Binning.SIGNED,            # type: Union[Binning, str]
                 repetitions=DEFAULT_REPETITIONS,   # type: int
                 seed=0                             # type: int
                 ):
        """
        :param state: the state prepared in each of the `ensemble` copies
        :param ensemble: n, the number of copies consumed by one repetition
        :param epsilon: the strength of the two weak measurements. Ignored by the PROJECTIVE scheme
        :param discard: a, the half-width of the discard region
        :param scheme:
        :param binning:
        :param repetitions: N, the number of independent repetitions averaged by `repeat_and_score`
        :param seed: the master seed of all random streams
        """
        self.state = as_density(state)
        self.ensemble = _check_count('ensemble', ensemble)
        self.epsilon = check_positive('epsilon', epsilon)
        try:
            self.discard = float(discard)
        except (TypeError, ValueError):
            raise ConfigError("discard should be a number, found %r" % (discard,))
        if not (self.discard >= 0):
            raise ConfigError("discard should be non-negative, found %r" % (discard,))
        self.scheme = _as_enum(Scheme, scheme, 'scheme')
        self.binning = _as_enum(Binning, binning, 'binning')
        self.repetitions = _check_count('repetitions', repetitions)
        if int(seed) != seed or not (0 <= seed < (1 << 64)):
            raise ConfigError("seed should be an unsigned 64-bit integer, found %r" % (seed,))
        self.seed = int(seed)
        if self.scheme is Scheme.PROJECTIVE and self.ensemble % 3 != 0:
            raise ConfigError("The projective scheme splits the ensemble in three equal parts (z, x and y), so the "
                              "ensemble size should be a multiple of 3. Found %s" % self.ensemble)

    @property
    def sigma(self):
        # type: (...) -> float
        """ The pointer spread of the weak measurements, 1 / sqrt(epsilon) """
        return sigma_from_epsilon(self.epsilon)

    @property
    def actual(self):
        # type: (...) -> BlochVector
        """ The Bloch vector of the prepared state """
        return bloch_from_density(self.state)

    def replace(self, **changes):
        # type: (...) -> TomographyConfig
        """ Returns a validated copy of this configuration with some fields changed """
        fields = {name: getattr(self, name) for name in self.__slots__}
        unknown = set(changes) - set(fields)
        if unknown:
            raise ConfigError("Unknown configuration field(s): %s" % ', '.join(sorted(unknown)))
        fields.update(changes)
        return TomographyConfig(**fields)

    def __repr__(self):
        return "TomographyConfig(%s)" % ', '.join('%s=%r' % (name, getattr(self, name)) for name in self.__slots__)


def _check_count(name, value):
    try:
        ivalue = int(value)
    except (TypeError, ValueError):
        raise ConfigError("%s should be a positive integer, found %r" % (name, value))
    if ivalue != value or ivalue < 1:
        raise ConfigError("%s should be a positive integer, found %r" % (name, value))
    return ivalue


class EstimateTriple(object):
    """ An estimated Bloch vector. Correction factors can push it outside of the unit sphere """
    __slots__ = ['x_est', 'y_est', 'z_est']

    def __init__(self,
                 x_est,  # type: float
                 y_est,  # type: float
                 z_est   # type: float
                 ):
        self.x_est = float(x_est)
        self.y_est = float(y_est)
        self.z_est = float(z_est)
        if not np.all(np.isfinite([self.x_est, self.y_est, self.z_est])):
            raise DomainError("Estimates should be finite, found (%r, %r, %r)" % (x_est, y_est, z_est))

    def as_bloch(self):
        # type: (...) -> BlochVector
        return BlochVector(self.x_est, self.y_est, self.z_est, physical=False)

    def __iter__(self):
        return iter((self.x_est, self.y_est, self.z_est))

    def __repr__(self):
        return "EstimateTriple(x_est=%r, y_est=%r, z_est=%r)" % (self.x_est, self.y_est, self.z_est)


class TallyPair(object):
    """ The running sum S of the binned readings of one measurement, and the number C of readings that entered it """
    __slots__ = ['total', 'count']

    def __init__(self,
                 total,  # type: float
                 count   # type: float
                 ):
        self.total = float(total)
        self.count = float(count)

    def __repr__(self):
        return "TallyPair(total=%r, count=%r)" % (self.total, self.count)


def _tally(readings,  # type: np.ndarray
           cfg        # type: TomographyConfig
           ):
    # type: (...) -> Tuple[np.ndarray, np.ndarray]
    """ Sums and counts along the last axis of an array of readings """
    if cfg.binning is Binning.RAW:
        return readings.sum(axis=-1), np.full(readings.shape[:-1], float(readings.shape[-1]))
    a = cfg.discard
    signed = np.where(readings >= a, 1., np.where(readings <= -a, -1., 0.))
    return signed.sum(axis=-1), (signed != 0).sum(axis=-1).astype(float)


def _das_arvind_batch(cfg,     # type: TomographyConfig
                      streams  # type: Sequence[RandomStream]
                      ):
    """
    Runs the WEAK scheme once per stream. Each stream draws 3n uniforms (coins of the z, x and y measurements) then
    2n standard normals (readings of the z and x measurements).

    :return: the arrays (S_z, C_z, S_x, C_x, N_plus), one entry per stream
    """
    n = cfg.ensemble
    sigma = cfg.sigma
    uniforms = np.empty((len(streams), 3 * n))
    normals = np.empty((len(streams), 2 * n))
    for i, s in enumerate(streams):
        uniforms[i] = s.uniforms(3 * n)
        normals[i] = s.standard_normals(2 * n)

    states = stack(cfg.state, len(streams) * n).reshape(len(streams), n, 2, 2)

    # sigma_z
    _, readings, states = weak_measure_stack(states, sigma, uniforms[:, :n], normals[:, :n])
    s_z, c_z = _tally(readings, cfg)

    # sigma_x, in the frame where x is the measurement axis
    states = rotate_stack(states, TO_X_BASIS)
    _, readings, states = weak_measure_stack(states, sigma, uniforms[:, n:2 * n], normals[:, n:])
    s_x, c_x = _tally(readings, cfg)

    # sigma_y, projective: back to the original frame first
    states = rotate_stack(rotate_stack(states, TO_X_BASIS.inverse()), TO_Y_BASIS)
    outcomes = projective_measure_stack(states, uniforms[:, 2 * n:])
    n_plus = (outcomes == 1).sum(axis=-1)
    return s_z, c_z, s_x, c_x, n_plus


def _das_arvind_estimates(cfg, s_z, c_z, s_x, c_x, n_plus):
    """ (R, 3) array of (x, y, z) estimates, with NaN rows for the degenerate repetitions """
    eps = cfg.epsilon
    with np.errstate(divide='ignore', invalid='ignore'):
        z_est = s_z / c_z
        x_est = (s_x / c_x) * exp(eps / 2)
    y_est = (2 * n_plus / cfg.ensemble - 1) * exp(eps)
    estimates = np.stack([x_est, y_est, z_est], axis=-1)
    estimates[(c_z == 0) | (c_x == 0)] = np.nan
    return estimates


def _mub_batch(cfg,     # type: TomographyConfig
               streams  # type: Sequence[RandomStream]
               ):
    """
    Runs the PROJECTIVE scheme once per stream. Each stream draws n uniforms: the coins of the z, x then y thirds.

    :return: the (R, 3) array of (x, y, z) estimates
    """
    k = cfg.ensemble // 3
    uniforms = np.empty((len(streams), cfg.ensemble))
    for i, s in enumerate(streams):
        uniforms[i] = s.uniforms(cfg.ensemble)

    estimates = np.empty((len(streams), 3))
    parts = ((2, cfg.state), (0, rotate(cfg.state, TO_X_BASIS)), (1, rotate(cfg.state, TO_Y_BASIS)))
    for part, (component, rho) in enumerate(parts):
        outcomes = projective_measure_stack(rho.matrix, uniforms[:, part * k:(part + 1) * k])
        estimates[:, component] = 2 * (outcomes == 1).sum(axis=-1) / k - 1
    return estimates


def _run_batch(cfg,     # type: TomographyConfig
               streams  # type: Sequence[RandomStream]
               ):
    # type: (...) -> np.ndarray
    if cfg.scheme is Scheme.WEAK:
        return _das_arvind_estimates(cfg, *_das_arvind_batch(cfg, streams))
    else:
        return _mub_batch(cfg, streams)


def das_arvind_tallies(cfg,  # type: TomographyConfig
                       s     # type: RandomStream
                       ):
    # type: (...) -> Tuple[TallyPair, TallyPair, int]
    """
    Runs the WEAK scheme once and returns its raw statistics: the sigma_z tally, the sigma_x tally and the number of
    +1 outcomes of the final sigma_y measurement.
    """
    if cfg.scheme is not Scheme.WEAK:
        raise ConfigError("das_arvind_tallies requires the WEAK scheme, found %s" % cfg.scheme.name)
    s_z, c_z, s_x, c_x, n_plus = _das_arvind_batch(cfg, [s])
    return TallyPair(s_z[0], c_z[0]), TallyPair(s_x[0], c_x[0]), int(n_plus[0])


def das_arvind_run(cfg,  # type: TomographyConfig
                   s     # type: RandomStream
                   ):
    # type: (...) -> EstimateTriple
    """
    Runs the WEAK scheme once on an ensemble of `cfg.ensemble` copies of `cfg.state`:

     * z_est = S_z / C_z
     * x_est = (S_x / C_x) exp(epsilon / 2)
     * y_est = (2 N+ / n - 1) exp(epsilon)

    :param cfg: a configuration with scheme WEAK
    :param s: the stream of this repetition
    :return:
    :raises DegenerateRunError: when every z or every x reading fell inside the discard region
    """
    tally_z, tally_x, n_plus = das_arvind_tallies(cfg, s)
    for component, tally in (('sigma_z', tally_z), ('sigma_x', tally_x)):
        if tally.count == 0:
            raise DegenerateRunError(component, cfg.ensemble)
    z_est = tally_z.total / tally_z.count
    x_est = tally_x.total / tally_x.count * exp(cfg.epsilon / 2)
    y_est = (2 * n_plus / cfg.ensemble - 1) * exp(cfg.epsilon)
    return EstimateTriple(x_est, y_est, z_est)


def mub_projective_run(cfg,  # type: TomographyConfig
                       s     # type: RandomStream
                       ):
    # type: (...) -> EstimateTriple
    """
    Runs the PROJECTIVE scheme once: n/3 copies are measured along each of z, x and y, and every component is
    estimated as 2 N+ / (n/3) - 1.
    """
    if cfg.scheme is not Scheme.PROJECTIVE:
        raise ConfigError("mub_projective_run requires the PROJECTIVE scheme, found %s" % cfg.scheme.name)
    x_est, y_est, z_est = _mub_batch(cfg, [s])[0]
    return EstimateTriple(x_est, y_est, z_est)


def fidelity(actual,  # type: Union[BlochVector, Sequence[float]]
             est      # type: Union[EstimateTriple, Sequence[float]]
             ):
    # type: (...) -> float
    """
    f = 1 - [(x - x_est)^2 + (y - y_est)^2 + (z - z_est)^2]. Not clamped: f is negative for estimates far away.
    """
    return 1 - sum((a - e) ** 2 for a, e in zip(actual, est))


class ScoreSummary(object):
    """
    The statistics of `repeat_and_score`: mean and population standard deviation of the fidelity over the valid
    repetitions, number of excluded (degenerate) repetitions and mean estimate.
    """
    __slots__ = ['mean', 'std', 'failures', 'valid', 'mean_estimate']

    def __init__(self,
                 mean,           # type: float
                 std,            # type: float
                 failures,       # type: int
                 valid,          # type: int
                 mean_estimate   # type: EstimateTriple
                 ):
        self.mean = mean
        self.std = std
        self.failures = failures
        self.valid = valid
        self.mean_estimate = mean_estimate

    def __iter__(self):
        """ Unpacks as (mean, std, failures) """
        return iter((self.mean, self.std, self.failures))

    def __repr__(self):
        return "ScoreSummary(mean=%r, std=%r, failures=%r, valid=%r, mean_estimate=%r)" \
               % (self.mean, self.std, self.failures, self.valid, self.mean_estimate)


def batch_size(cfg  # type: TomographyConfig
               ):
    # type: (...) -> int
    """
    The number of repetitions simulated together: `BATCH_SIZE`, reduced so that a batch holds at most
    `ELEMENT_BUDGET` ensemble members. Never less than one repetition.
    """
    return max(1, min(BATCH_SIZE, ELEMENT_BUDGET // cfg.ensemble))


def _score_chunk(args):
    """ Worker entry point: the estimates of repetitions [start, stop) of a grid point """
    cfg, grid_index, start, stop = args
    streams = [RandomStream(cfg.seed, stream_id_for(grid_index, r)) for r in range(start, stop)]
    return _run_batch(cfg, streams)


def _score(cfg,            # type: TomographyConfig
           grid_index,     # type: int
           executor=None   # type: Optional[ProcessPoolExecutor]
           ):
    # type: (...) -> ScoreSummary
    size = batch_size(cfg)
    chunks = [(cfg, grid_index, start, min(start + size, cfg.repetitions))
              for start in range(0, cfg.repetitions, size)]
    if executor is None:
        results = map(_score_chunk, chunks)
    else:
        results = executor.map(_score_chunk, chunks)

    # buffer indexed by repetition, reduced in repetition order
    estimates = np.concatenate(list(results))
    actual = np.array(list(cfg.actual))
    fidelities = 1 - ((estimates - actual) ** 2).sum(axis=-1)

    valid = ~np.isnan(fidelities)
    failures = int(cfg.repetitions - valid.sum())
    if failures:
        logger.warning("%s of %s repetitions at epsilon=%r were degenerate (no valid reading) and are excluded",
                       failures, cfg.repetitions, cfg.epsilon)
    if not valid.any():
        raise EmptyStatisticsError("All %s repetitions at epsilon=%r were degenerate: every meter reading fell in the "
                                   "discard region (a=%r). No fidelity can be computed."
                                   % (cfg.repetitions, cfg.epsilon, cfg.discard))
    mean_estimate = EstimateTriple(*estimates[valid].mean(axis=0))
    return ScoreSummary(float(fidelities[valid].mean()), float(fidelities[valid].std()), failures,
                        int(valid.sum()), mean_estimate)


def repeat_and_score(cfg,            # type: TomographyConfig
                     grid_index=0,   # type: int
                     workers=1       # type: int
                     ):
    # type: (...) -> ScoreSummary
    """
    Runs the configured scheme `cfg.repetitions` times on independent streams and scores every estimate against the
    Bloch vector of `cfg.state`.

    :param cfg:
    :param grid_index: the index of this configuration in a sweep; repetition r draws from stream
        `stream_id_for(grid_index, r)` of `cfg.seed`
    :param workers: number of worker processes. The result does not depend on it
    :return: a ScoreSummary, that also unpacks as (mean, std, failures)
    :raises EmptyStatisticsError: when all repetitions were degenerate
    """
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return _score(cfg, grid_index, executor)
    return _score(cfg, grid_index)


class SweepRow(object):
    """ The fidelity statistics at one measurement strength """
    __slots__ = ['epsilon', 'mean_fidelity', 'std_fidelity', 'failures']

    def __init__(self,
                 epsilon,         # type: float
                 mean_fidelity,   # type: float
                 std_fidelity,    # type: float
                 failures=0       # type: int
                 ):
        self.epsilon = epsilon
        self.mean_fidelity = mean_fidelity
        self.std_fidelity = std_fidelity
        self.failures = failures

    def __repr__(self):
        return "SweepRow(epsilon=%r, mean_fidelity=%r, std_fidelity=%r, failures=%r)" \
               % (self.epsilon, self.mean_fidelity, self.std_fidelity, self.failures)


def check_grid(grid  # type: Sequence[float]
               ):
    # type: (...) -> List[float]
    """ Returns the grid as a list of floats, or raises a ConfigError if it is empty or not strictly increasing """
    grid = [float(e) for e in grid]
    if len(grid) == 0:
        raise ConfigError("The epsilon grid should not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("The epsilon grid should be strictly increasing, found %r" % (grid,))
    return grid


def sweep(base,       # type: TomographyConfig
          grid,       # type: Sequence[float]
          workers=1   # type: int
          ):
    # type: (...) -> List[SweepRow]
    """
    Runs `repeat_and_score` at every strength of `grid`, the k-th point using grid index k for its streams.

    :param base: the configuration; its `epsilon` is replaced by each grid value
    :param grid: a non-empty strictly increasing sequence of strengths
    :param workers: number of worker processes. The result does not depend on it
    :return: one SweepRow per grid point, in grid order
    """
    grid = check_grid(grid)
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    rows = []
    try:
        for k, epsilon in enumerate(grid):
            summary = _score(base.replace(epsilon=epsilon), k, executor)
            logger.info("epsilon=%.6g: mean fidelity %.6f, std %.6f (%s degenerate)", epsilon, summary.mean,
                        summary.std, summary.failures)
            rows.append(SweepRow(epsilon, summary.mean, summary.std, summary.failures))
    finally:
        if executor is not None:
            executor.shutdown()
    return rows

