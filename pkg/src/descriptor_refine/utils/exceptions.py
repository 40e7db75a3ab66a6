"""Custom exceptions for the DescriptorRefine project."""

from src.descriptor_refine.utils.constants import EXIT_NUMERICAL, EXIT_USAGE, EXIT_VERDICT


class DescriptorRefineError(Exception):
    """Base exception for the project."""

    exit_code = EXIT_VERDICT


class ParseError(DescriptorRefineError):
    """Raised when a system, controller or relation file is malformed."""

    exit_code = EXIT_USAGE

    def __init__(self, path: str, location: str, detail: str):
        """Record the file and the offending line or field."""
        self.path = path
        self.location = location
        self.detail = detail
        super().__init__(f"{path}: {location}: {detail}")


class DimensionMismatchError(DescriptorRefineError):
    """Raised when matrix or vector shapes are inconsistent."""

    exit_code = EXIT_USAGE


class UnsupportedCombinationError(DescriptorRefineError):
    """Raised when no exact test exists for a pair of initial-set kinds."""

    exit_code = EXIT_USAGE


class RankDeficientError(DescriptorRefineError):
    """Raised when a right inverse is requested for a rank-deficient matrix."""

    exit_code = EXIT_NUMERICAL


class StepMatrixRankError(DescriptorRefineError):
    """Raised when [E -B] does not have full row rank."""


class NotATransitionError(DescriptorRefineError):
    """Raised when (x, u, x_next) violates the descriptor equation."""

    exit_code = EXIT_NUMERICAL


class DrivingVariableMismatchError(DescriptorRefineError):
    """Raised when a driving-variable system does not belong to its source system."""


class InitialStateOutsideSetError(DescriptorRefineError):
    """Raised when a simulation starts outside the initial set."""


class StagedError(DescriptorRefineError):
    """Error raised by one stage of the refinement pipeline."""

    def __init__(self, message: str, stage: str | None = None):
        """Attach the pipeline stage that failed."""
        self.stage = stage
        prefix = f"[{stage}] " if stage else ""
        super().__init__(f"{prefix}{message}")


class InfeasibleError(StagedError):
    """Raised when an interface or driving schedule cannot be certified."""

    exit_code = EXIT_NUMERICAL


class NotWellPosedError(StagedError):
    """Raised when the existence or uniqueness rank condition fails."""

    def __init__(self, message: str, condition: str, stage: str | None = None):
        """Name the failing condition ("existence" or "uniqueness")."""
        self.condition = condition
        super().__init__(message, stage)


class RelationRejectedError(StagedError):
    """Raised when a candidate relation is not a simulation relation."""


class SteppingError(DescriptorRefineError):
    """Base for failures of an implicit step."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, step: int | None = None):
        """Attach the time index of the failing step."""
        self.step = step
        suffix = f" at t={step}" if step is not None else ""
        super().__init__(f"{message}{suffix}")

    def at_step(self, step: int) -> "SteppingError":
        """Return a copy of this error tagged with a time index."""
        return type(self)(self.args[0], step)


class NoSolutionError(SteppingError):
    """Raised when the stacked step equations are inconsistent."""


class NonUniqueError(SteppingError):
    """Raised when the stacked step equations have more than one solution."""
