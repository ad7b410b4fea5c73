"""Exception hierarchy shared by services, agents and the CLI."""


class ImpairedRLError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = 1


class MdpValidationError(ImpairedRLError):
    """A TabularMdp violates one of its invariants."""


class ModelError(ImpairedRLError):
    """Invalid delay or missing-observation model parameters."""


class StalenessUnreachableError(ImpairedRLError):
    """theta_delay queried at a staleness the pmf cannot reach."""


class InconsistentAugStateError(ImpairedRLError):
    """An augmented state does not fit the step it is used at."""


class HorizonError(ImpairedRLError):
    """A multi-step kernel was asked to run past the horizon."""


class PolicyCoverageError(ImpairedRLError):
    """An executable policy was queried on an augmented state it does not define."""


class AugStateCapError(ImpairedRLError):
    """Augmented MDP enumeration exceeded the configured size cap."""

    exit_code = 2


class InstanceTooLargeError(ImpairedRLError):
    """The brute-force oracle would enumerate more policies than allowed."""

    exit_code = 2


class ConfigError(ImpairedRLError):
    """Experiment configuration failed validation."""
