"""Exception hierarchy."""


class HyperlaneError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(HyperlaneError, ValueError):
    """An argument lies outside the domain of a map or formula."""


class InputError(HyperlaneError, ValueError):
    """Malformed input such as too few nodes or non-finite samples."""


class PreconditionError(HyperlaneError, ValueError):
    """Exponent or parameter regime not admitted by the operation."""


class IntegrationError(HyperlaneError, RuntimeError):
    """The integrator gave up before any event fired.

    The partial trajectory is kept on ``self.trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class BracketError(HyperlaneError):
    """Both ends of a shooting bracket have the same classification."""


class StructureError(HyperlaneError):
    """Bisection converged without the expected outcome flip."""


class NoBracketError(HyperlaneError):
    """No classification flip was found in the seed region."""


class WindowError(HyperlaneError, ValueError):
    """Fit window shorter than the required minimum span."""


class NotApplicable(HyperlaneError):
    """A check whose hypotheses are not met on the given trajectory."""
