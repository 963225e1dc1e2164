"""Exception types shared across the package.

Guard errors mean "refused to start because the request exceeds a
resource limit"; they map to exit code 2 in the CLI. Validation errors
mean the input data is malformed. Internal consistency errors flag
conditions that must be impossible if the algorithms are correct.
"""


class GuardError(Exception):
    """A resource guard refused the operation."""


class BudgetExceededError(GuardError):
    """A search budget was exhausted before an exact answer was reached."""


class ValidationError(ValueError):
    """Malformed or inconsistent input data."""


class InternalConsistencyError(RuntimeError):
    """An invariant that must always hold was violated."""
