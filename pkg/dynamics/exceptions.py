"""Error hierarchy shared by the numerical modules."""


class DynamicsError(Exception):
    """Base class for every toolkit error."""


class ConfigurationError(DynamicsError):
    """Missing, unknown or invalid parameters."""


class DomainError(DynamicsError):
    """Non-finite state or parameter value."""


class StiffnessError(DynamicsError):
    """Step size fell below the representable minimum."""


class NotFound(DynamicsError):
    """A locator found no sign or outcome change, or Newton diverged."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def as_dict(self):
        return {'error': 'not-found', 'message': str(self), **self.context}


class SectionError(DynamicsError):
    """Orbit crosses a section plane tangentially."""


class PreconditionError(DynamicsError):
    """An object does not have the structure an operation requires."""
