from qtomo.base import QtomoError, InvalidStateError, OutOfSphereError, DomainError, ConfigError, \
    DegenerateRunError, EmptyStatisticsError, SpecError, OutputError, TOLERANCE

from qtomo.state import DensityMatrix, BlochVector, StateDiagnostics, Axis, RotationSpec, validate, as_density, \
    bloch_from_density, density_from_bloch, rotate, rotate_stack, stack, TO_X_BASIS, TO_Y_BASIS

from qtomo.rng import RandomStream, GaussianSpec, Branch, uniform, gaussian, cointoss, stream_id_for, \
    sigma_from_epsilon, epsilon_from_sigma

from qtomo.measurement import PointerSample, Trajectory, likelihood, outcome_density, bayesian_update, \
    weak_measure, projective_measure, trajectory, ensemble_trajectories, collapse_time, collapse_times

from qtomo.tomography import Scheme, Binning, TomographyConfig, EstimateTriple, TallyPair, ScoreSummary, SweepRow, \
    das_arvind_tallies, das_arvind_run, mub_projective_run, fidelity, repeat_and_score, sweep

try:
    # Distribution mode : import from _version.py generated by setuptools_scm during release
    from ._version import version as __version__
except ImportError:
    # Source mode : use setuptools_scm to get the current version from src using git
    try:
        from setuptools_scm import get_version as _gv
        from os import path as _path
        __version__ = _gv(_path.join(_path.dirname(__file__), _path.pardir))
    except (ImportError, LookupError):
        # neither installed nor in a git checkout
        __version__ = '0.0.0+unknown'


__all__ = [
    '__version__',
    # submodules
    'base', 'state', 'rng', 'measurement', 'tomography', 'harness', 'states',
    # symbols
    'QtomoError', 'InvalidStateError', 'OutOfSphereError', 'DomainError', 'ConfigError', 'DegenerateRunError',
    'EmptyStatisticsError', 'SpecError', 'OutputError', 'TOLERANCE',
    'DensityMatrix', 'BlochVector', 'StateDiagnostics', 'Axis', 'RotationSpec', 'validate', 'as_density',
    'bloch_from_density', 'density_from_bloch', 'rotate', 'rotate_stack', 'stack', 'TO_X_BASIS', 'TO_Y_BASIS',
    'RandomStream', 'GaussianSpec', 'Branch', 'uniform', 'gaussian', 'cointoss', 'stream_id_for',
    'sigma_from_epsilon', 'epsilon_from_sigma',
    'PointerSample', 'Trajectory', 'likelihood', 'outcome_density', 'bayesian_update', 'weak_measure',
    'projective_measure', 'trajectory', 'ensemble_trajectories', 'collapse_time', 'collapse_times',
    'Scheme', 'Binning', 'TomographyConfig', 'EstimateTriple', 'TallyPair', 'ScoreSummary', 'SweepRow',
    'das_arvind_tallies', 'das_arvind_run', 'mub_projective_run', 'fidelity', 'repeat_and_score', 'sweep',
]

# the predefined states have their own `__all__`
from qtomo.states import *
from qtomo.states import __all__ as states_all

from qtomo.harness import Mode, ExperimentSpec, RunManifest, parse_spec, parse_state, parse_grid, run_trajectory, \
    run_sweep, run_collapse, emit_manifest

__all__ = __all__ + states_all + ['Mode', 'ExperimentSpec', 'RunManifest', 'parse_spec', 'parse_state', 'parse_grid',
                                  'run_trajectory', 'run_sweep', 'run_collapse', 'emit_manifest']
