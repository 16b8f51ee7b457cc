import logging
import os

import click

from qtomo import __version__
from qtomo.base import QtomoError
from qtomo.harness import Mode, parse_spec, run


logger = logging.getLogger(__name__)

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


# options shared by several subcommands
state_option = click.option('-s', '--state', help="Initial state: a Bloch vector 'x,y,z' or the 8 reals 're,im' of "
                                                   "r00, r01, r10, r11, comma-separated")
seed_option = click.option('--seed', type=int, help='Master seed (unsigned 64-bit). Defaults to $QTOMO_SEED, or to '
                                                    'a fresh seed recorded in the manifest')
out_option = click.option('-o', '--out', help='Path of the CSV file to write. The manifest is written beside it')
config_option = click.option('-c', '--config', type=click.Path(exists=True, file_okay=True, dir_okay=False),
                             help="A 'key = value' file with the same keys as the options. Options override it")
sigma_option = click.option('--sigma', type=float, help='Pointer spread (exclusive with --epsilon)')
epsilon_option = click.option('-e', '--epsilon', help='Measurement strength, sigma = 1 / sqrt(epsilon)')
steps_option = click.option('-n', '--steps', type=int, help='Number of successive weak measurements')


def _execute(mode,     # type: Mode
             config,   # type: str
             options   # type: dict
             ):
    """ Parses, runs and reports. All qtomo errors are turned into a clean message and a non-zero exit code """
    try:
        config_text = None
        if config is not None:
            with open(config) as f:
                config_text = f.read()
        spec = parse_spec(mode, options, config_text, os.environ)
        logger.debug("Running %r", spec)
        for path in run(spec):
            click.echo("Wrote %s" % path)
    except QtomoError as e:
        raise click.ClickException(str(e))


@click.group()
@click.option('-v', '--verbose', count=True, help='Repeat to log more (-v: info, -vv: debug)')
@click.version_option(version=__version__)
def main(verbose):
    """
    Monte Carlo simulations of weak and projective single-qubit measurements.
    """
    logging.basicConfig(level=_LOG_LEVELS[min(verbose, len(_LOG_LEVELS) - 1)],
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


@main.command()
@state_option
@sigma_option
@epsilon_option
@steps_option
@seed_option
@out_option
@config_option
def trajectory(config, **options):
    """
    Simulates a quantum trajectory and writes t,p00,p11 for t = 0..steps.
    """
    _execute(Mode.TRAJECTORY, config, options)


@main.command()
@state_option
@click.option('-m', '--ensemble', type=int, help='Number of copies of the state per tomography run')
@click.option('-e', '--epsilon', help="Strength grid: a value, a comma-separated list or 'start:stop:step'")
@click.option('-a', '--discard', type=float, help='Half-width of the discarded meter readings region (default 0)')
@click.option('--scheme', type=click.Choice(['weak', 'projective'], case_sensitive=False),
              help='Weak sequential scheme (default) or projective baseline')
@click.option('--binning', type=click.Choice(['signed', 'raw'], case_sensitive=False),
              help='Sign-binned readings (default) or raw readings averaging')
@click.option('-r', '--reps', type=int, help='Repetitions per strength (default 100000)')
@seed_option
@click.option('-t', '--threads', type=int, help='Number of worker processes (default: number of CPUs). Results do '
                                                'not depend on it')
@out_option
@config_option
def sweep(config, **options):
    """
    Scores tomography over a grid of strengths and writes epsilon,fidelity,std_dev.
    """
    _execute(Mode.SWEEP, config, options)


@main.command()
@state_option
@sigma_option
@epsilon_option
@steps_option
@click.option('-k', '--trajectories', type=int, help='Number of independent trajectories')
@click.option('--threshold', type=float, help='Collapse threshold on p00 or p11, in (0.5, 1) (default 0.99)')
@seed_option
@out_option
@config_option
def collapse(config, **options):
    """
    Simulates many trajectories and writes the step after which each one stays collapsed.
    """
    _execute(Mode.COLLAPSE, config, options)


if __name__ == '__main__':
    main()
