"""Exception hierarchy shared by all modules.

The CLI maps these onto distinct exit codes, so raising the right class is
part of the public contract: precondition failures (bad geometry, malformed
matrices) are user errors, convergence failures are numerical outcomes, and
parse errors come from file input.
"""


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold for the input."""


class ConvergenceError(RuntimeError):
    """An iterative method failed to reach its target residual."""


class ParseError(ValueError):
    """A data file does not conform to the documented text format."""
