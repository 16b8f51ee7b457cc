try:  # python 3.5+
    from typing import Any, Optional
except ImportError:
    pass

# absolute tolerance of every closed-form check on 2x2 matrices
TOLERANCE = 1e-12

# populations below this are snapped to the corresponding pole
POLE_TOLERANCE = 1e-14

# by convention the two pointer Gaussians are centered on the eigenvalues +1 and -1
MEAN_PLUS = 1.0
MEAN_MINUS = -1.0


class QtomoError(Exception):
    """ Root of all the exceptions raised by qtomo """


class InvalidStateError(QtomoError, ValueError):
    """ Raised when a matrix violates the density matrix invariants (trace, hermiticity, positivity) """


class OutOfSphereError(QtomoError, ValueError):
    """ Raised when a Bloch vector that should be physical lies outside of the unit sphere """


class DomainError(QtomoError, ValueError):
    """ Raised when a probability, a strength or a spread is outside of its domain """


class ConfigError(QtomoError, ValueError):
    """ Raised when a tomography configuration is inconsistent """


class DegenerateRunError(QtomoError):
    """ Raised when a tomography repetition has no valid meter reading to build an estimate from """

    def __init__(self,
                 component,  # type: str
                 ensemble    # type: int
                 ):
        self.component = component
        self.ensemble = ensemble
        super(DegenerateRunError, self).__init__(
            "All %s meter readings of the <%s> measurement fell inside the discard region: the estimator is "
            "undefined for this repetition. Reduce the discard parameter or increase the ensemble size."
            % (ensemble, component))


class EmptyStatisticsError(QtomoError):
    """ Raised when every repetition of an experiment was degenerate, so that no statistic can be computed """


class SpecError(QtomoError, ValueError):
    """ Raised when an experiment specification can not be parsed. The offending key is available as `key` """

    def __init__(self,
                 key,     # type: Optional[str]
                 message  # type: str
                 ):
        self.key = key
        if key is not None:
            message = "Invalid experiment specification for key '%s': %s" % (key, message)
        else:
            message = "Invalid experiment specification: %s" % message
        super(SpecError, self).__init__(message)


class OutputError(QtomoError, IOError):
    """ Raised when a result file can not be written. The path is available as `path` """

    def __init__(self,
                 path,   # type: str
                 cause   # type: Exception
                 ):
        self.path = path
        super(OutputError, self).__init__("Could not write file '%s': %s" % (path, cause))


def check_positive(name,   # type: str
                   value   # type: Any
                   ):
    # type: (...) -> float
    """
    Returns `value` as a float, or raises a `DomainError` if it is not a finite strictly positive number.

    :param name: the name of the quantity, used in the error message
    :param value:
    :return:
    """
    try:
        fvalue = float(value)
    except (TypeError, ValueError):
        raise DomainError("%s should be a strictly positive number, found %r" % (name, value))
    if not (fvalue > 0) or fvalue == float('inf'):
        raise DomainError("%s should be a finite strictly positive number, found %r" % (name, value))
    return fvalue
