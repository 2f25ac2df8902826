"""Exception types raised by the library."""


class QDefError(Exception):
    """Base class for all library errors."""


class DomainError(QDefError, ValueError):
    """Argument outside the domain of a deformed function (e.g. 1 + gamma*x <= 0)."""


class RegimeError(QDefError, ValueError):
    """Operation requested outside its physical regime (e.g. gamma*A >= 1 for a periodic orbit)."""


class UnboundStateError(QDefError, ValueError):
    """Quantum number above the last bound state."""

    def __init__(self, n, n_max):
        self.n = n
        self.n_max = n_max
        super().__init__(f"n={n} is not bound; the last bound state is n_max={n_max}")


class SingularityError(QDefError, ZeroDivisionError):
    """A deformed derivative or q-subtraction hit its singular point."""


class IntegrationError(QDefError, RuntimeError):
    """ODE integration left the admissible region (pole guard band)."""


class ConfigError(QDefError, ValueError):
    """Invalid run configuration."""
