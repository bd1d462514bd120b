"""Toolkit-wide exception types."""


class SpectoError(Exception):
    """Base class for toolkit faults."""


class FormatError(SpectoError):
    """Malformed input file (container, CSV, IDX)."""


class NumericalError(SpectoError):
    """A numerical routine failed (non-convergence, overflow, divergence)."""


class TrainingDiverged(NumericalError):
    """Training loss became non-finite."""
