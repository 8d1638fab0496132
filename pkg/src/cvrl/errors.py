"""Exception hierarchy used across the package."""


class CVRLError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(CVRLError, ValueError):
    pass


class InvalidStateError(CVRLError, ValueError):
    pass


class ResourceLimitError(CVRLError, MemoryError):
    """Requested operator would exceed the configured dense-matrix budget."""


class CutoffTooSmallError(CVRLError, ValueError):
    """Truncated Gaussian state loses more probability than allowed."""

    def __init__(self, message, tail_mass=None):
        super().__init__(message)
        self.tail_mass = tail_mass


class NoFeasibleGaussianError(CVRLError, RuntimeError):
    """Every sampled Gaussian state left the input outside its numerical support."""


class IndistinguishableError(CVRLError, ValueError):
    """State cannot be separated from the Gaussian set at this cutoff."""


class WitnessViolationError(CVRLError, RuntimeError):
    """A Gaussian state was found on which the witness is negative.

    ``params`` holds the violating Gaussian state and ``value`` the witness
    expectation value on two (or four) copies of it.
    """

    def __init__(self, message, params=None, value=None):
        super().__init__(message)
        self.params = params
        self.value = value
