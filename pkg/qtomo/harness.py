"""
Experiment orchestration: parses experiment specifications (command line flags and key-value files), runs them, and
writes the CSV tables and their run manifests.
"""
import logging
import os
from configparser import ConfigParser, Error as ConfigParserError
from enum import Enum
from math import floor
from time import perf_counter

try:  # python 3.5+
    from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple
except ImportError:
    pass

import numpy as np
import pandas as pd
from mako import exceptions
from mako.template import Template
from ordered_set import OrderedSet

from qtomo.base import QtomoError, ConfigError, InvalidStateError, OutOfSphereError, DomainError, SpecError, \
    OutputError
from qtomo.rng import RandomStream, sigma_from_epsilon
from qtomo.state import DensityMatrix, density_from_bloch
from qtomo.measurement import trajectory, collapse_times
from qtomo.tomography import TomographyConfig, Scheme, Binning, DEFAULT_REPETITIONS, check_grid, sweep


logger = logging.getLogger(__name__)

SEED_ENV_VAR = 'QTOMO_SEED'

# 17 significant digits round-trip any double
FLOAT_FORMAT = '%.17g'

# a start:stop:step grid includes stop when it is reached within this fraction of a step
_GRID_SLACK = 1e-9

_UINT64_MASK = (1 << 64) - 1


class Mode(Enum):
    TRAJECTORY = 'trajectory'
    SWEEP = 'sweep'
    COLLAPSE = 'collapse'


# accepted keys per mode, in manifest order
KEYS = {
    Mode.TRAJECTORY: OrderedSet(['state', 'sigma', 'epsilon', 'steps', 'seed', 'out']),
    Mode.SWEEP: OrderedSet(['state', 'ensemble', 'epsilon', 'discard', 'scheme', 'binning', 'reps', 'seed',
                            'threads', 'out']),
    Mode.COLLAPSE: OrderedSet(['state', 'sigma', 'epsilon', 'steps', 'trajectories', 'threshold', 'seed', 'out']),
}

DEFAULT_THRESHOLD = 0.99


def format_float(value  # type: float
                 ):
    # type: (...) -> str
    return FLOAT_FORMAT % value


def parse_state(text  # type: str
                ):
    # type: (...) -> DensityMatrix
    """
    Parses a state given either as a Bloch triple 'x,y,z' or as the eight reals
    're(r00),im(r00),re(r01),im(r01),re(r10),im(r10),re(r11),im(r11)'.
    """
    try:
        values = [float(v) for v in str(text).replace(' ', '').split(',')]
    except ValueError:
        raise SpecError('state', "expected comma-separated numbers, found %r" % (text,))
    try:
        if len(values) == 3:
            return density_from_bloch(values)
        elif len(values) == 8:
            entries = [complex(re, im) for re, im in zip(values[0::2], values[1::2])]
            return DensityMatrix.from_entries(*entries)
    except (InvalidStateError, OutOfSphereError) as e:
        raise SpecError('state', str(e))
    raise SpecError('state', "expected a Bloch vector 'x,y,z' (3 numbers) or the real and imaginary parts of "
                             "r00, r01, r10, r11 (8 numbers), found %s numbers" % len(values))


def format_state(rho  # type: DensityMatrix
                 ):
    # type: (...) -> str
    """ The 8-reals form of `parse_state`, with full precision """
    return ','.join(format_float(part) for entry in rho for part in (entry.real, entry.imag))


def parse_grid(text,            # type: str
               key='epsilon'    # type: str
               ):
    # type: (...) -> List[float]
    """
    Parses a strength grid: a single value, an explicit comma-separated list, or 'start:stop:step' where stop is
    included when the grid reaches it. For example '0.1:1.0:0.05' has 19 points.
    """
    text = str(text).replace(' ', '')
    try:
        parts = [float(v) for v in text.split(':' if ':' in text else ',')]
    except ValueError:
        raise SpecError(key, "expected a number, a comma-separated list or 'start:stop:step', found %r" % text)

    if ':' in text:
        if len(parts) != 3:
            raise SpecError(key, "a grid should be 'start:stop:step', found %r" % text)
        start, stop, step = parts
        if not step > 0 or not stop >= start:
            raise SpecError(key, "a grid needs step > 0 and stop >= start, found %r" % text)
        count = int(floor((stop - start) / step + _GRID_SLACK)) + 1
        grid = [round(start + i * step, 12) for i in range(count)]
    else:
        grid = parts
    for value in grid:
        if not 0 < value < float('inf'):
            raise SpecError(key, "strengths should be finite and strictly positive, found %r" % value)
    try:
        return check_grid(grid)
    except ConfigError as e:
        raise SpecError(key, str(e))


def _parse_number(key, value, kind=float):
    try:
        number = kind(value)
    except (TypeError, ValueError):
        raise SpecError(key, "expected %s, found %r" % ('an integer' if kind is int else 'a number', value))
    return number


def _parse_positive_int(key, value):
    number = _parse_number(key, value, int)
    if number < 1:
        raise SpecError(key, "should be a positive integer, found %r" % (value,))
    return number


def _parse_seed(key, value):
    seed = _parse_number(key, value, int)
    if not (0 <= seed <= _UINT64_MASK):
        raise SpecError(key, "should be an unsigned 64-bit integer, found %r" % (value,))
    return seed


def _parse_choice(key, value, enum_type):
    try:
        return enum_type(str(value).lower())
    except ValueError:
        raise SpecError(key, "should be one of %s, found %r" % (', '.join(e.value for e in enum_type), value))


def read_config_text(text  # type: str
                     ):
    # type: (...) -> Dict[str, str]
    """ Reads a sectionless 'key = value' text ('#' comments) into a dictionary """
    parser = ConfigParser(interpolation=None)
    try:
        parser.read_string('[qtomo]\n' + text)
    except ConfigParserError as e:
        raise SpecError(None, "unreadable configuration: %s" % e)
    return dict(parser.items('qtomo'))


class ExperimentSpec(object):
    """
    A fully validated experiment: the mode, the initial state, the mode-specific parameters and the output path.

     * TRAJECTORY: `sigma`, `steps`
     * SWEEP: `config` (the TomographyConfig of the first grid point), `grid`, `workers`
     * COLLAPSE: `sigma`, `steps`, `trajectories`, `threshold`

    `seed_source` tells where the seed came from ('flag or config', 'environment' or 'fresh').
    """
    __slots__ = ['mode', 'state', 'seed', 'out', 'sigma', 'steps', 'trajectories', 'threshold', 'config', 'grid',
                 'workers', 'seed_source']

    def __init__(self,
                 mode,                  # type: Mode
                 state,                 # type: DensityMatrix
                 seed,                  # type: int
                 out,                   # type: str
                 sigma=None,            # type: Optional[float]
                 steps=None,            # type: Optional[int]
                 trajectories=None,     # type: Optional[int]
                 threshold=None,        # type: Optional[float]
                 config=None,           # type: Optional[TomographyConfig]
                 grid=None,             # type: Optional[List[float]]
                 workers=1,             # type: int
                 seed_source='flag or config'  # type: str
                 ):
        self.mode = mode
        self.state = state
        self.seed = seed
        self.out = out
        self.sigma = sigma
        self.steps = steps
        self.trajectories = trajectories
        self.threshold = threshold
        self.config = config
        self.grid = grid
        self.workers = workers
        self.seed_source = seed_source

    @property
    def manifest_path(self):
        # type: (...) -> str
        return self.out + '.manifest.txt'

    def settings(self):
        # type: (...) -> List[Tuple[str, str]]
        """ The (key, value) pairs that are enough to re-run this experiment, in manifest order """
        values = {'state': format_state(self.state), 'seed': str(self.seed)}
        if self.mode is Mode.SWEEP:
            cfg = self.config
            values.update(ensemble=str(cfg.ensemble), epsilon=','.join(format_float(e) for e in self.grid),
                          discard=format_float(cfg.discard), scheme=cfg.scheme.value, binning=cfg.binning.value,
                          reps=str(cfg.repetitions))
        else:
            values.update(sigma=format_float(self.sigma), steps=str(self.steps))
            if self.mode is Mode.COLLAPSE:
                values.update(trajectories=str(self.trajectories), threshold=format_float(self.threshold))
        return [(key, values[key]) for key in KEYS[self.mode] if key in values]

    def __repr__(self):
        return "ExperimentSpec(mode=%s, %s, out=%r)" % (self.mode.value,
                                                        ', '.join('%s=%s' % kv for kv in self.settings()), self.out)


def parse_spec(mode,              # type: Mode
               options=None,      # type: Optional[Mapping[str, Any]]
               config_text=None,  # type: Optional[str]
               environ=None       # type: Optional[Mapping[str, str]]
               ):
    # type: (...) -> ExperimentSpec
    """
    Builds a validated ExperimentSpec. Values come from `options` (typically command line flags, None meaning "not
    provided"), then from the key-value `config_text`, then for the seed only from the QTOMO_SEED variable of
    `environ`. When no seed is found a fresh one is drawn.

    Defaults: discard 0, binning signed, scheme weak, reps 100000, threads = available CPUs, threshold 0.99.

    :param mode:
    :param options: a mapping of key -> value, keys as in `KEYS[mode]`
    :param config_text: the contents of a configuration file
    :param environ: the environment, os.environ by default
    :return:
    :raises SpecError: for unknown keys, missing required keys or invalid values. Its `key` attribute names the key
    """
    mode = mode if isinstance(mode, Mode) else _parse_choice('mode', mode, Mode)
    allowed = KEYS[mode]
    environ = os.environ if environ is None else environ

    values = {}  # type: Dict[str, Any]
    if config_text is not None:
        values.update(read_config_text(config_text))
    for key, value in (options or {}).items():
        if value is not None:
            values[key] = value
    for key in values:
        if key not in allowed:
            raise SpecError(key, "unknown key for the %s mode, accepted keys are: %s"
                            % (mode.value, ', '.join(allowed)))

    def required(key):
        if key not in values:
            raise SpecError(key, "this key is required for the %s mode" % mode.value)
        return values[key]

    state = parse_state(required('state'))
    out = str(required('out'))

    # seed: flags and config, then environment, then fresh
    if 'seed' in values:
        seed, seed_source = _parse_seed('seed', values['seed']), 'flag or config'
    elif environ.get(SEED_ENV_VAR):
        seed, seed_source = _parse_seed(SEED_ENV_VAR, environ[SEED_ENV_VAR]), 'environment'
    else:
        seed, seed_source = int(np.random.SeedSequence().entropy) & _UINT64_MASK, 'fresh'
        logger.info("No seed provided, using fresh seed %s", seed)

    if mode is Mode.SWEEP:
        grid = parse_grid(required('epsilon'))
        ensemble = _parse_positive_int('ensemble', required('ensemble'))
        scheme = _parse_choice('scheme', values.get('scheme', Scheme.WEAK.value), Scheme)
        binning = _parse_choice('binning', values.get('binning', Binning.SIGNED.value), Binning)
        discard = _parse_number('discard', values.get('discard', 0.))
        if not 0 <= discard < float('inf'):
            raise SpecError('discard', "the discard half-width should be finite and non-negative, found %r"
                            % (values['discard'],))
        reps = _parse_positive_int('reps', values.get('reps', DEFAULT_REPETITIONS))
        workers = _parse_positive_int('threads', values.get('threads', os.cpu_count() or 1))
        if scheme is Scheme.PROJECTIVE and ensemble % 3 != 0:
            raise SpecError('ensemble', "the projective scheme splits the ensemble in three equal parts, so it should "
                                        "be a multiple of 3. Found %s" % ensemble)
        try:
            config = TomographyConfig(state, ensemble, grid[0], discard=discard, scheme=scheme, binning=binning,
                                      repetitions=reps, seed=seed)
        except (ConfigError, DomainError) as e:
            raise SpecError(None, str(e))
        return ExperimentSpec(mode, state, seed, out, config=config, grid=grid, workers=workers,
                              seed_source=seed_source)

    # trajectory and collapse: pointer spread from sigma or epsilon
    if ('sigma' in values) == ('epsilon' in values):
        raise SpecError('sigma', "exactly one of sigma and epsilon should be provided for the %s mode" % mode.value)
    if 'sigma' in values:
        sigma = _parse_number('sigma', values['sigma'])
        if not sigma > 0:
            raise SpecError('sigma', "should be strictly positive, found %r" % (values['sigma'],))
    else:
        epsilon = parse_grid(values['epsilon'])
        if len(epsilon) != 1:
            raise SpecError('epsilon', "a single strength is expected for the %s mode" % mode.value)
        sigma = sigma_from_epsilon(epsilon[0])
    steps = _parse_positive_int('steps', required('steps'))

    if mode is Mode.TRAJECTORY:
        return ExperimentSpec(mode, state, seed, out, sigma=sigma, steps=steps, seed_source=seed_source)

    trajectories = _parse_positive_int('trajectories', required('trajectories'))
    threshold = _parse_number('threshold', values.get('threshold', DEFAULT_THRESHOLD))
    if not (0.5 < threshold < 1):
        raise SpecError('threshold', "should be in (0.5, 1), found %r" % (threshold,))
    return ExperimentSpec(mode, state, seed, out, sigma=sigma, steps=steps, trajectories=trajectories,
                          threshold=threshold, seed_source=seed_source)


def _write_csv(df,    # type: pd.DataFrame
               path   # type: str
               ):
    try:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        raise OutputError(path, e)


def render_template(name,  # type: str
                    **template_vars
                    ):
    # type: (...) -> str
    """ Renders the mako template `name` of the package `templates` folder """
    template_file = os.path.join(os.path.dirname(__file__), 'templates', name)
    with open(template_file) as f:
        body = f.read()
    try:
        return Template(text=body).render(**template_vars)
    except Exception:
        # mako user-friendly exception display
        raise QtomoError("Error while rendering template %s:\n%s" % (name, exceptions.text_error_template().render()))


class RunManifest(object):
    """
    What is needed to reproduce a run (`settings`, re-readable with `parse_spec`) and what happened during it
    (`info`: code version, duration, degenerate repetitions...).
    """
    __slots__ = ['spec', 'info']

    def __init__(self,
                 spec,  # type: ExperimentSpec
                 info   # type: Sequence[Tuple[str, Any]]
                 ):
        self.spec = spec
        self.info = list(info)

    def render(self):
        # type: (...) -> str
        return render_template('manifest.mako', mode=self.spec.mode.value, info=self.info,
                               settings=self.spec.settings())


def emit_manifest(spec,   # type: ExperimentSpec
                  stats   # type: Mapping[str, Any]
                  ):
    # type: (...) -> str
    """
    Writes the manifest of a completed run beside its CSV file, as `<out>.manifest.txt`.

    :param spec:
    :param stats: informational entries (duration, degenerate counts...), written in iteration order
    :return: the path of the manifest
    """
    from qtomo import __version__

    info = [('version', __version__), ('output', spec.out), ('seed source', spec.seed_source)]
    info.extend(stats.items())
    text = RunManifest(spec, info).render()
    path = spec.manifest_path
    try:
        with open(path, 'w', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise OutputError(path, e)
    return path


def run_trajectory(spec  # type: ExperimentSpec
                   ):
    # type: (...) -> List[str]
    """ Simulates one trajectory (stream 0 of the seed) and writes the `t,p00,p11` CSV and its manifest """
    if spec.mode is not Mode.TRAJECTORY:
        raise SpecError(None, "run_trajectory needs a trajectory spec, found %s" % spec.mode.value)
    start = perf_counter()
    tr = trajectory(spec.state, spec.sigma, spec.steps, RandomStream(spec.seed, 0))
    _write_csv(pd.DataFrame({'t': np.arange(len(tr)), 'p00': tr.p00, 'p11': tr.p11}), spec.out)
    duration = perf_counter() - start
    logger.info("Wrote %s steps to %s in %.3fs", spec.steps, spec.out, duration)
    manifest = emit_manifest(spec, {'duration seconds': '%.3f' % duration,
                                    'final p00': format_float(tr.p00[-1])})
    return [spec.out, manifest]


def run_sweep(spec  # type: ExperimentSpec
              ):
    # type: (...) -> List[str]
    """ Runs the fidelity sweep and writes the `epsilon,fidelity,std_dev` CSV and its manifest """
    if spec.mode is not Mode.SWEEP:
        raise SpecError(None, "run_sweep needs a sweep spec, found %s" % spec.mode.value)
    start = perf_counter()
    logger.info("Sweeping %s strengths, %s repetitions each, on %s worker(s)", len(spec.grid),
                spec.config.repetitions, spec.workers)
    rows = sweep(spec.config, spec.grid, workers=spec.workers)
    _write_csv(pd.DataFrame({'epsilon': [r.epsilon for r in rows],
                             'fidelity': [r.mean_fidelity for r in rows],
                             'std_dev': [r.std_fidelity for r in rows]}), spec.out)
    duration = perf_counter() - start
    logger.info("Wrote %s rows to %s in %.3fs", len(rows), spec.out, duration)
    manifest = emit_manifest(spec, {'duration seconds': '%.3f' % duration,
                                    'workers': spec.workers,
                                    'degenerate repetitions': sum(r.failures for r in rows),
                                    'degenerate repetitions per strength': ','.join(str(r.failures) for r in rows)})
    return [spec.out, manifest]


def run_collapse(spec  # type: ExperimentSpec
                 ):
    # type: (...) -> List[str]
    """
    Simulates `spec.trajectories` trajectories (trajectory i on stream i of the seed) and writes their collapse times
    as a `trajectory,collapse_time` CSV (inf when not collapsed within the steps) and its manifest.
    """
    if spec.mode is not Mode.COLLAPSE:
        raise SpecError(None, "run_collapse needs a collapse spec, found %s" % spec.mode.value)
    start = perf_counter()
    streams = [RandomStream(spec.seed, i) for i in range(spec.trajectories)]
    times = collapse_times(spec.state, spec.sigma, spec.steps, streams, spec.threshold)
    _write_csv(pd.DataFrame({'trajectory': np.arange(len(times)), 'collapse_time': times}), spec.out)
    duration = perf_counter() - start
    median = float(np.median(times))
    logger.info("Median collapse time of %s trajectories: %s steps", len(times), median)
    manifest = emit_manifest(spec, {'duration seconds': '%.3f' % duration,
                                    'median collapse time': format_float(median),
                                    'never collapsed': int(np.sum(np.isinf(times)))})
    return [spec.out, manifest]


def run(spec  # type: ExperimentSpec
        ):
    # type: (...) -> List[str]
    """ Runs the experiment described by `spec` and returns the paths of the written files """
    if spec.mode is Mode.TRAJECTORY:
        return run_trajectory(spec)
    elif spec.mode is Mode.SWEEP:
        return run_sweep(spec)
    else:
        return run_collapse(spec)
