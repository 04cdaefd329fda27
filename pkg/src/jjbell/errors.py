"""Exception hierarchy shared by the library and the CLI."""


class JJBellError(Exception):
    """Base class for all errors raised by jjbell."""


class UsageError(JJBellError, ValueError):
    """Invalid arguments: wrong dimensions, bad indices, out-of-range inputs."""


class CapacityError(JJBellError):
    """Requested register exceeds the configured maximum number of qubits."""


class NumericalError(JJBellError, ArithmeticError):
    """A numerical routine failed (e.g. eigen-solver non-convergence)."""


class InconsistentProbabilitiesError(NumericalError):
    """Measured probabilities are not consistent with any pure two-qubit state."""
