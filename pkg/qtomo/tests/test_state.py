import numpy as np
import pytest

from qtomo import DensityMatrix, BlochVector, RotationSpec, Axis, InvalidStateError, OutOfSphereError, validate, \
    bloch_from_density, density_from_bloch, rotate, rotate_stack, stack, TO_X_BASIS, TO_Y_BASIS, KET_0, KET_1, \
    MAXIMALLY_MIXED, RHO_A, RHO_B


def assert_bloch_close(v, expected, tol=1e-12):
    assert np.allclose(list(v), expected, rtol=0, atol=tol)


def random_bloch_vectors(n, seed=0):
    """ n vectors uniformly distributed in the unit ball """
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((n, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, np.newaxis]
    return directions * rng.random(n)[:, np.newaxis] ** (1 / 3)


def test_bloch_from_density_reference_states():
    """ Poles, center of the sphere and the asymmetric reference state """
    assert_bloch_close(bloch_from_density(KET_0), (0, 0, 1))
    assert_bloch_close(bloch_from_density(KET_1), (0, 0, -1))
    assert_bloch_close(bloch_from_density(MAXIMALLY_MIXED), (0, 0, 0))
    assert_bloch_close(bloch_from_density(RHO_A), (-0.385, -0.042, 0.399))


def test_bloch_from_density_accepts_arrays():
    assert_bloch_close(bloch_from_density(np.diag([1, 0])), (0, 0, 1))


def test_density_from_bloch():
    assert KET_0.isclose(density_from_bloch((0, 0, 1)))
    assert RHO_B.isclose([[0.5, 0.5], [0.5, 0.5]])
    assert density_from_bloch(BlochVector(0, 0, 0)).isclose(np.eye(2) / 2)


def test_density_from_bloch_out_of_sphere():
    with pytest.raises(OutOfSphereError):
        density_from_bloch((1, 1, 0))

    # within tolerance of the sphere
    density_from_bloch((1 + 1e-13, 0, 0))


def test_bloch_vector_physical_flag():
    """ Estimated vectors may leave the unit sphere, physical ones can't """
    with pytest.raises(OutOfSphereError):
        BlochVector(1, 1, 1)
    v = BlochVector(1, 1, 1, physical=False)
    assert v.norm() == pytest.approx(3 ** 0.5)


def test_round_trip():
    """ bloch -> density -> bloch over 10^4 random physical vectors """
    for v in random_bloch_vectors(10000):
        assert_bloch_close(bloch_from_density(density_from_bloch(v)), v)


def test_validate_diagnostics():
    d = validate(np.diag([1, 0]))
    assert d.is_valid
    assert d.trace_error == 0
    assert d.positivity_margin >= 0

    d = validate([[0.5, 0.6], [0.6, 0.5]])
    assert not d.is_valid
    assert d.positivity_margin == pytest.approx(-0.11)
    assert len(d.problems()) == 1
    assert 'positive' in d.problems()[0]

    assert validate(RHO_A).is_valid


def test_density_matrix_rejects_invalid():
    with pytest.raises(InvalidStateError):
        DensityMatrix([[0.5, 0.6], [0.6, 0.5]])
    with pytest.raises(InvalidStateError):
        DensityMatrix([[0.6, 0], [0, 0.6]])
    with pytest.raises(InvalidStateError):
        DensityMatrix([[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(InvalidStateError):
        DensityMatrix([1, 0, 0])


def test_density_matrix_is_read_only():
    m = np.array([[1, 0], [0, 0]], dtype=complex)
    rho = DensityMatrix(m)
    m[0, 0] = 0
    assert rho.p00 == 1
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0


def test_density_matrix_accessors():
    rho = DensityMatrix.from_entries(0.7, 0.1 - 0.2j, 0.1 + 0.2j, 0.3)
    assert rho.r01 == 0.1 - 0.2j
    assert rho.r10 == 0.1 + 0.2j
    assert rho.p00 == pytest.approx(0.7)
    assert list(rho) == [0.7, 0.1 - 0.2j, 0.1 + 0.2j, 0.3]
    assert RHO_B.purity() == pytest.approx(1)
    assert MAXIMALLY_MIXED.purity() == pytest.approx(0.5)


def test_rotate_x_onto_z():
    """ R_y(-90) conjugation maps +x onto +z, R_x(90) conjugation maps +y onto +z """
    assert_bloch_close(bloch_from_density(rotate(RHO_B, TO_X_BASIS)), (0, 0, 1))
    assert_bloch_close(bloch_from_density(rotate(density_from_bloch((0, 1, 0)), TO_Y_BASIS)), (0, 0, 1))


def test_rotation_matrices():
    """ Explicit matrices of the two generators """
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    assert np.allclose(RotationSpec(Axis.Y, 90).matrix(), [[c, -s], [s, c]])
    assert np.allclose(RotationSpec('x', 90).matrix(), [[c, -1j * s], [-1j * s, c]])
    with pytest.raises(ValueError):
        RotationSpec('z', 90)


def test_rotate_inverse():
    """ Any state rotated then rotated back is unchanged, and rotations preserve the Bloch norm """
    for v in random_bloch_vectors(100, seed=1):
        rho = density_from_bloch(v)
        for r in (TO_X_BASIS, TO_Y_BASIS, RotationSpec(Axis.X, 33.3)):
            rotated = rotate(rho, r)
            assert rotate(rotated, r.inverse()).isclose(rho)
            assert bloch_from_density(rotated).norm() == pytest.approx(np.linalg.norm(v), abs=1e-12)


def test_rotate_stack_matches_rotate():
    states = stack(RHO_A, 4)
    assert states.shape == (4, 2, 2)
    rotated = rotate_stack(states, TO_Y_BASIS)
    for m in rotated:
        assert rotate(RHO_A, TO_Y_BASIS).isclose(m)
