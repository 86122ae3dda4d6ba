"""Exception types shared across the package."""


class BurgersLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BurgersLabError, ValueError):
    """An argument lies outside the admissible domain."""


class DegenerateFrontError(DomainError):
    """A front with equal left and right states was requested."""


class ResourceError(BurgersLabError, RuntimeError):
    """A configured resource bound (e.g. the event cascade limit) was exceeded."""


class UsageError(BurgersLabError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class ScenarioError(BurgersLabError, ValueError):
    """A scenario document is malformed."""
