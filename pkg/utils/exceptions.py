"""
Custom exceptions for Distortion Diagnostics
"""


class DiagnosticsError(Exception):
    """Base exception for distortion diagnostics errors"""
    pass


class SimulationError(DiagnosticsError):
    """Raised when the generative model fails to produce a pair"""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class WindowError(DiagnosticsError):
    """Raised when a window cannot be applied to a batch"""
    pass


class ApproximatorError(DiagnosticsError):
    """Raised when an approximate posterior cannot be built or evaluated"""
    pass


class ConvergenceError(ApproximatorError):
    """Raised when an iterative approximation does not converge"""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PitError(DiagnosticsError):
    """Raised when a PIT value cannot be computed"""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SamplerError(DiagnosticsError):
    """Raised when an MCMC run hits an invalid target value"""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NetworkError(DiagnosticsError):
    """Raised when the Beta network produces non-finite values"""
    pass


class TrainingError(DiagnosticsError):
    """Raised when training diverges or cannot start"""

    def __init__(self, message, epoch=None, step=None):
        super().__init__(message)
        self.epoch = epoch
        self.step = step


class ValidationCheckError(DiagnosticsError):
    """Raised when a validation check cannot be run"""
    pass


class PipelineError(DiagnosticsError):
    """Raised when a pipeline stage fails; carries the stage name"""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


class BaselineError(DiagnosticsError):
    """Raised when a baseline diagnostic has too little input"""
    pass


class InsufficientMemoryError(DiagnosticsError):
    """Raised when insufficient memory for a simulation batch"""
    pass


class ConfigError(DiagnosticsError):
    """Raised on invalid run configuration or unknown selectors"""
    pass


class ArtifactFormatError(DiagnosticsError):
    """Raised when a persisted artifact cannot be parsed"""
    pass


class RenderError(ArtifactFormatError):
    """Raised when a CSV cannot be rendered to SVG"""
    pass
