import numpy as np
import pytest
from click.testing import CliRunner


def test_doc_index_states():
    """ Tests that the states example in the documentation main page works """

    from qtomo import DensityMatrix, InvalidStateError, bloch_from_density, density_from_bloch, rotate, TO_X_BASIS

    rho = density_from_bloch((1, 0, 0))
    assert list(bloch_from_density(rho)) == [1.0, 0.0, 0.0]

    assert np.allclose(list(bloch_from_density(rotate(rho, TO_X_BASIS))), [0.0, 0.0, 1.0], atol=1e-12)

    with pytest.raises(InvalidStateError):
        DensityMatrix([[0.5, 0.6], [0.6, 0.5]])


def test_doc_index_measurements():
    """ Tests that the measurement example in the documentation main page works """

    from qtomo import RandomStream, weak_measure, trajectory, collapse_time, RHO_B

    s = RandomStream(seed=1)
    sample, posterior = weak_measure(RHO_B, 0.4, s)
    assert np.isfinite(sample.reading)
    assert (posterior.p00 > 0.5) == (sample.reading > 0)

    tr = trajectory(RHO_B, 5, 2000, RandomStream(2019))
    assert collapse_time(tr, 0.99) is not None


def test_doc_index_tomography():
    """ Tests that the tomography example in the documentation main page works """

    from qtomo import TomographyConfig, Scheme, repeat_and_score, sweep, RHO_A

    cfg = TomographyConfig(RHO_A, ensemble=30, epsilon=0.4, repetitions=2000, seed=7)
    summary = repeat_and_score(cfg, workers=4)
    assert 0.6 < summary.mean < 0.9
    assert summary.failures == 0

    rows = sweep(cfg.replace(scheme=Scheme.PROJECTIVE), [0.2, 0.4, 0.6])
    assert len(rows) == 3


def test_doc_index_command_line(tmp_path):
    """ Tests that a manifest reproduces its CSV file, as stated in the documentation main page """

    from qtomo.cli import main

    runner = CliRunner()
    weak = str(tmp_path / 'weak.csv')
    result = runner.invoke(main, ['sweep', '--state', '-0.385,-0.042,0.399', '--ensemble', '30',
                                  '--epsilon', '0.1:0.3:0.1', '--reps', '300', '--out', weak])
    assert result.exit_code == 0, result.output

    again = str(tmp_path / 'again.csv')
    result = runner.invoke(main, ['sweep', '--config', weak + '.manifest.txt', '--out', again])
    assert result.exit_code == 0, result.output
    with open(weak, 'rb') as f, open(again, 'rb') as g:
        assert f.read() == g.read()
