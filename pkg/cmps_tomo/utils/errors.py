"""
Exception types raised by the tomography pipeline.

Everything numerical derives from TomographyError so that front ends can tell
pipeline failures apart from usage and I/O problems.
"""


class TomographyError(RuntimeError):
    """Base class of numerical and pipeline failures."""


class DimensionError(TomographyError, ValueError):
    pass


class PreconditionError(TomographyError, ValueError):
    pass


class DegenerateSpectrumError(TomographyError):
    pass


class NonDiagonalizableError(TomographyError):
    pass


class GaugeConditionError(TomographyError):
    """Q + Q^dag + R^dag R is not small enough; carries the residual."""

    def __init__(self, residual, tol):
        super(GaugeConditionError, self).__init__(
            "gauge condition violated: |Q + Q^dag + R^dag R|_max = {:.3e} "
            "exceeds {:.3e}".format(residual, tol)
        )
        self.residual = residual


class SingularGaugeError(TomographyError):
    pass


class ResourceLimitError(TomographyError):
    pass


class PoleEvaluationError(TomographyError, ValueError):
    pass


class EstimationError(TomographyError):
    """Spectral estimation failed; `condition` holds the estimate if known."""

    def __init__(self, message, condition=None):
        super(EstimationError, self).__init__(message)
        self.condition = condition


class ModelOrderError(TomographyError):
    pass


class PoleMatchingError(TomographyError):
    pass


class UnknownEntriesError(TomographyError):
    def __init__(self, entries):
        super(UnknownEntriesError, self).__init__(
            "M entries without a usable prescription (vanishing denominators): "
            "{}".format(entries)
        )
        self.entries = entries


class PairingError(TomographyError):
    pass


class KroneckerDefectError(TomographyError):
    pass


class GaugeFixingError(TomographyError):
    pass


class GridMismatchError(TomographyError, ValueError):
    pass


class PipelineError(TomographyError):
    """Wraps a stage failure of the reconstruction pipeline."""

    def __init__(self, stage, cause):
        super(PipelineError, self).__init__("[{}] {}".format(stage, cause))
        self.stage = stage
        self.cause = cause


class SchemaError(ValueError):
    """A project file does not follow the documented format."""
