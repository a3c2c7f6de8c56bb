"""
Exceptions raised by squeezed-fisher.

Each family maps onto one exit status of the commandline tool, see
`EXIT_CODES` and `exit_code_for`.
"""

from traitlets import TraitError


class SqueezedFisherError(Exception):
    """
    Base class for all errors raised by this package
    """


class InvalidParameterError(SqueezedFisherError, ValueError):
    """
    A parameter is outside the range an operation accepts
    """


class PhaseMatchingError(InvalidParameterError):
    """
    The input does not satisfy cos(theta_b - 2 theta_a) = +1
    """


class ComputationError(SqueezedFisherError, RuntimeError):
    """
    A numerical computation could not produce a trustworthy result
    """


class TruncationError(ComputationError):
    """
    A Fock-space truncation left more probability mass behind than allowed
    """


class BracketError(ComputationError):
    """
    A coarse scan did not bracket an interior maximum
    """


class FlatLikelihoodError(ComputationError):
    """
    The log-likelihood curve carries no information about the phase
    """


class NoInformationError(ComputationError):
    """
    The Fisher information is zero, so the Cramer-Rao bound is infinite
    """


class ResourceGuardError(SqueezedFisherError):
    """
    A request exceeds a configured resource limit
    """


EXIT_CODES = {
    InvalidParameterError: 2,
    TraitError: 2,
    ComputationError: 3,
    ResourceGuardError: 4,
}


def exit_code_for(exc: BaseException) -> int:
    """
    Return the process exit status for an exception.

    Anything not in EXIT_CODES is an unexpected failure and gets 1.
    """
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 1
