"""Exception hierarchy shared by all modules."""


class IsingExactError(Exception):
    """Base class; the CLI maps these to exit code 1."""

    kind = "error"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class DomainError(IsingExactError, ValueError):
    kind = "domain"


class PrecisionLossError(IsingExactError):
    kind = "precision_loss"


class DivergenceError(IsingExactError):
    kind = "divergence"


class ParameterError(IsingExactError, ValueError):
    kind = "parameter"


class CapExceededError(IsingExactError):
    kind = "cap_exceeded"


class ConvergenceError(IsingExactError):
    kind = "convergence"


class InsufficientDataError(IsingExactError):
    kind = "insufficient_data"


class InconsistentSystemError(IsingExactError):
    kind = "inconsistent_system"


class UnderdeterminedError(IsingExactError):
    kind = "underdetermined"


class PoleError(IsingExactError):
    """Raised when a Painleve III solution hits zero or blows up."""

    kind = "pole"

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location

    def to_json(self):
        d = super().to_json()
        d["location"] = None if self.location is None else float(self.location)
        return d


class AnisotropyError(IsingExactError, ValueError):
    kind = "anisotropy"


class BranchError(IsingExactError, ValueError):
    kind = "branch"


class ParityError(IsingExactError, ValueError):
    kind = "parity"


class InfeasibleOrderError(IsingExactError):
    kind = "infeasible_order"
