"""Exception hierarchy.

Every error carries its class name as the stable identifier printed by the CLI.
"""


class HamlagError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class DomainError(HamlagError, ValueError):
    """Argument outside the mathematical domain of an operation."""


# parameter resolution
class ParameterError(HamlagError):
    """Seed parameters cannot be resolved into a valid immersion."""


class DegenerateAngles(ParameterError):
    pass


class Infeasible(ParameterError):
    pass


class DegenerateProfile(ParameterError):
    pass


class NonrealProfile(ParameterError):
    pass


class SingularPhase(ParameterError):
    pass


class InconsistentBranch(ParameterError):
    pass


# numerics
class QuadratureError(HamlagError):
    pass


class FrameError(HamlagError):
    pass


class RootFindFailure(HamlagError):
    pass


# torus closure
class ModeError(HamlagError):
    pass


class NoClosure(HamlagError):
    pass


class EmptySearch(HamlagError):
    pass


class ConfigError(HamlagError):
    pass


class IntegrationError(HamlagError):
    """Fixed-step integration drifted off the conserved quantity."""
