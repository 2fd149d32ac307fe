"""Exception hierarchy shared by the whole toolkit.

Exit-code mapping used by the CLI: InputError -> 2, ResourceError -> 3.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InputError(ToolkitError):
    """Invalid user-supplied data (bad config field, malformed word, ...)."""


class ContractError(ToolkitError):
    """A documented precondition of an operation was violated by the caller."""


class InternalError(ToolkitError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class ResourceError(ToolkitError):
    """A configured budget (word length, atom count, ball size) was exceeded.

    ``partial`` optionally carries whatever results were computed before the
    budget ran out, so long-running experiments can fail loudly but usefully.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
