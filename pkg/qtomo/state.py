from enum import Enum
from math import cos, sin, radians, sqrt

try:  # python 3.5+
    from typing import Any, Union, Sequence, Iterator
except ImportError:
    pass

import numpy as np

from qtomo.base import TOLERANCE, InvalidStateError, OutOfSphereError


class StateDiagnostics(object):
    """
    The result of `validate`: how far a 2x2 matrix is from being a density matrix.

     * trace_error: |r00 + r11 - 1|
     * hermiticity_error: largest of |r10 - conj(r01)|, |Im r00| and |Im r11|
     * positivity_margin: Re(r00) * Re(r11) - |r01|^2, negative when the matrix is not positive semidefinite
     * population_error: how far Re(r00) or Re(r11) leave [0, 1], 0 when they don't
    """
    __slots__ = ['trace_error', 'hermiticity_error', 'positivity_margin', 'population_error']

    def __init__(self,
                 trace_error,        # type: float
                 hermiticity_error,  # type: float
                 positivity_margin,  # type: float
                 population_error    # type: float
                 ):
        self.trace_error = trace_error
        self.hermiticity_error = hermiticity_error
        self.positivity_margin = positivity_margin
        self.population_error = population_error

    @property
    def is_valid(self):
        # type: (...) -> bool
        return self.trace_error <= TOLERANCE and self.hermiticity_error <= TOLERANCE \
               and self.positivity_margin >= -TOLERANCE and self.population_error <= TOLERANCE

    def problems(self):
        # type: (...) -> Sequence[str]
        """ Returns a list of human-readable descriptions of the violated invariants (empty when valid) """
        problems = []
        if self.trace_error > TOLERANCE:
            problems.append('trace differs from 1 by %.3g' % self.trace_error)
        if self.hermiticity_error > TOLERANCE:
            problems.append('matrix is not hermitian (error %.3g)' % self.hermiticity_error)
        if self.positivity_margin < -TOLERANCE:
            problems.append('matrix is not positive semidefinite (margin r00*r11 - |r01|^2 = %.6g)'
                            % self.positivity_margin)
        if self.population_error > TOLERANCE:
            problems.append('diagonal populations leave [0, 1] by %.3g' % self.population_error)
        return problems

    def __repr__(self):
        return "StateDiagnostics(trace_error=%.3g, hermiticity_error=%.3g, positivity_margin=%.6g, " \
               "population_error=%.3g)" % (self.trace_error, self.hermiticity_error, self.positivity_margin,
                                           self.population_error)


def _as_matrix(matrix  # type: Any
               ):
    # type: (...) -> np.ndarray
    if isinstance(matrix, DensityMatrix):
        return matrix.matrix
    try:
        m = np.array(matrix, dtype=complex)
    except (TypeError, ValueError):
        raise InvalidStateError("A density matrix should be a 2x2 array of complex numbers, found %r" % (matrix,))
    if m.size != 4:
        raise InvalidStateError("A density matrix should have exactly 4 entries, found %s" % m.size)
    return m.reshape(2, 2)


def validate(matrix  # type: Union[DensityMatrix, Any]
             ):
    # type: (...) -> StateDiagnostics
    """
    Reports how far `matrix` is from the density matrix invariants. This never raises on a 2x2 input: it is a pure
    diagnostic. Use `StateDiagnostics.is_valid` to get the verdict.

    :param matrix: a DensityMatrix, or anything that numpy can turn into 4 complex numbers
    :return:
    """
    m = _as_matrix(matrix)
    r00, r01, r10, r11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    trace_error = abs(r00 + r11 - 1)
    hermiticity_error = max(abs(r10 - np.conj(r01)), abs(r00.imag), abs(r11.imag))
    positivity_margin = r00.real * r11.real - abs(r01) ** 2
    population_error = max(0., -r00.real, -r11.real, r00.real - 1, r11.real - 1)
    return StateDiagnostics(float(trace_error), float(hermiticity_error), float(positivity_margin),
                            float(population_error))


class DensityMatrix(object):
    """
    A single-qubit state, as a read-only 2x2 complex hermitian matrix with unit trace and non-negative
    eigenvalues. All invariants are checked at construction, with absolute tolerance `TOLERANCE`.
    """
    __slots__ = ['_m']

    def __init__(self,
                 matrix  # type: Any
                 ):
        """
        :param matrix: anything that numpy can turn into 4 complex numbers, in the order r00, r01, r10, r11
        """
        m = _as_matrix(matrix).copy()
        diagnostics = validate(m)
        if not diagnostics.is_valid:
            raise InvalidStateError('Not a valid density matrix: ' + '; '.join(diagnostics.problems()))
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_entries(cls,
                     r00,  # type: complex
                     r01,  # type: complex
                     r10,  # type: complex
                     r11   # type: complex
                     ):
        # type: (...) -> DensityMatrix
        return cls([[r00, r01], [r10, r11]])

    @property
    def matrix(self):
        # type: (...) -> np.ndarray
        """ The read-only underlying 2x2 complex array """
        return self._m

    @property
    def r00(self):
        return complex(self._m[0, 0])

    @property
    def r01(self):
        return complex(self._m[0, 1])

    @property
    def r10(self):
        return complex(self._m[1, 0])

    @property
    def r11(self):
        return complex(self._m[1, 1])

    @property
    def p00(self):
        # type: (...) -> float
        """ Probability of the |0> outcome """
        return float(self._m[0, 0].real)

    @property
    def p11(self):
        # type: (...) -> float
        """ Probability of the |1> outcome """
        return float(self._m[1, 1].real)

    def purity(self):
        # type: (...) -> float
        """ Tr(rho^2), 1 for pure states and 1/2 for the maximally mixed state """
        return float(np.trace(self._m @ self._m).real)

    def isclose(self,
                other,           # type: DensityMatrix
                tol=TOLERANCE    # type: float
                ):
        # type: (...) -> bool
        """ True if all entries of `other` are within `tol` of ours """
        return bool(np.all(np.abs(self._m - _as_matrix(other)) <= tol))

    def __iter__(self):
        # type: (...) -> Iterator[complex]
        """ Iterates over r00, r01, r10, r11 """
        return iter((self.r00, self.r01, self.r10, self.r11))

    def __repr__(self):
        return "DensityMatrix(r00=%r, r01=%r, r10=%r, r11=%r)" % (self.r00, self.r01, self.r10, self.r11)


def as_density(rho  # type: Union[DensityMatrix, Any]
               ):
    # type: (...) -> DensityMatrix
    """ Returns `rho` if it is already a DensityMatrix, otherwise validates and converts it """
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho)


class BlochVector(object):
    """
    A real triple (x, y, z). Physical vectors (the default) must lie in the unit ball. Vectors produced by an
    estimator are created with `physical=False`, which suspends the norm check: estimates can leave the sphere.
    """
    __slots__ = ['x', 'y', 'z', 'physical']

    def __init__(self,
                 x,              # type: float
                 y,              # type: float
                 z,              # type: float
                 physical=True   # type: bool
                 ):
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)
        self.physical = physical
        if physical and self.norm() > 1 + TOLERANCE:
            raise OutOfSphereError("Bloch vector (%r, %r, %r) has norm %r > 1: it does not describe a physical state"
                                   % (self.x, self.y, self.z, self.norm()))

    def norm(self):
        # type: (...) -> float
        return sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __repr__(self):
        return "BlochVector(x=%r, y=%r, z=%r%s)" % (self.x, self.y, self.z, '' if self.physical else ', physical=False')


def bloch_from_density(rho  # type: Union[DensityMatrix, Any]
                       ):
    # type: (...) -> BlochVector
    """
    Returns the Bloch vector (r01 + r10, i(r01 - r10), r00 - r11) of `rho`. The imaginary residues, below
    `TOLERANCE` for any valid matrix, are dropped.

    :param rho: a DensityMatrix or anything convertible to a valid one
    :return:
    """
    rho = as_density(rho)
    r00, r01, r10, r11 = rho
    return BlochVector((r01 + r10).real, (1j * (r01 - r10)).real, (r00 - r11).real)


def density_from_bloch(v  # type: Union[BlochVector, Sequence[float]]
                       ):
    # type: (...) -> DensityMatrix
    """
    Returns (I + x.sigma_x + y.sigma_y + z.sigma_z) / 2.

    :param v: a BlochVector or a triple of reals. Its norm should not exceed 1 (+ TOLERANCE)
    :return:
    """
    x, y, z = (float(c) for c in v)
    norm = sqrt(x ** 2 + y ** 2 + z ** 2)
    if norm > 1 + TOLERANCE:
        raise OutOfSphereError("Can not build a density matrix from Bloch vector (%r, %r, %r): its norm %r is "
                               "larger than 1" % (x, y, z, norm))
    return DensityMatrix([[(1 + z) / 2, (x - 1j * y) / 2],
                          [(x + 1j * y) / 2, (1 - z) / 2]])


class Axis(Enum):
    """ The two supported rotation generators """
    X = 'x'
    Y = 'y'


class RotationSpec(object):
    """ A rotation R_x(angle) or R_y(angle), the angle being expressed in degrees """
    __slots__ = ['axis', 'angle']

    def __init__(self,
                 axis,   # type: Union[Axis, str]
                 angle   # type: float
                 ):
        try:
            self.axis = Axis(axis.lower() if isinstance(axis, str) else axis)
        except ValueError:
            raise ValueError("Unsupported rotation axis %r: only 'x' and 'y' rotations are available" % (axis,))
        self.angle = float(angle)

    def inverse(self):
        # type: (...) -> RotationSpec
        """ R(theta)^dagger = R(-theta) for both generators """
        return RotationSpec(self.axis, -self.angle)

    def matrix(self):
        # type: (...) -> np.ndarray
        """
        The 2x2 unitary:

         * R_x(t) = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]
         * R_y(t) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
        """
        half = radians(self.angle) / 2
        c, s = cos(half), sin(half)
        if self.axis is Axis.X:
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        else:
            return np.array([[c, -s], [s, c]], dtype=complex)

    def __repr__(self):
        return "RotationSpec(axis=%s, angle=%r)" % (self.axis.value, self.angle)


# brings the x axis of the Bloch sphere onto the z (measurement) axis
TO_X_BASIS = RotationSpec(Axis.Y, -90)

# brings the y axis of the Bloch sphere onto the z (measurement) axis
TO_Y_BASIS = RotationSpec(Axis.X, 90)


def stack(rho,  # type: Union[DensityMatrix, Any]
          n     # type: int
          ):
    # type: (...) -> np.ndarray
    """
    Returns a writable (n, 2, 2) array holding n copies of `rho`: the array form of an ensemble, used by the
    `*_stack` functions of this package.
    """
    return np.repeat(as_density(rho).matrix[np.newaxis, :, :], n, axis=0)


def rotate_stack(states,  # type: np.ndarray
                 r        # type: RotationSpec
                 ):
    # type: (...) -> np.ndarray
    """
    Returns U rho U^dagger for every matrix rho of the (..., 2, 2) array `states`, with U = `r.matrix()`. No
    validation is performed.
    """
    u = r.matrix()
    return u @ states @ u.conj().T


def rotate(rho,  # type: Union[DensityMatrix, Any]
           r     # type: RotationSpec
           ):
    # type: (...) -> DensityMatrix
    """
    Conjugates `rho` by the rotation: returns U rho U^dagger. Trace, hermiticity and the Bloch norm are preserved.

    :param rho:
    :param r: for example `TO_X_BASIS`, or `RotationSpec('x', 90)`
    :return:
    """
    return DensityMatrix(rotate_stack(as_density(rho).matrix, r))
