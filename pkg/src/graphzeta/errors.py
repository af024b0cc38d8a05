"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class GraphZetaError(Exception):
    """Base class for all errors raised by graphzeta."""

    exit_code = 2
    kind = "error"


class ValidationError(GraphZetaError, ValueError):
    """Input violates a documented precondition."""

    exit_code = 2
    kind = "validation"


class BudgetExceeded(GraphZetaError, RuntimeError):
    """A computation would exceed its configured resource budget."""

    exit_code = 3
    kind = "budget"


class IdentityFailure(GraphZetaError, AssertionError):
    """An identity that must hold exactly did not. Signals a bug."""

    exit_code = 4
    kind = "identity"
