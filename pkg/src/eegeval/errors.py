"""Exception hierarchy shared across the package."""


class EegEvalError(Exception):
    """Base class for all errors raised by this package."""


class ManifestError(EegEvalError):
    """Manifest file missing, malformed, or violating an invariant."""


class SignalReadError(EegEvalError):
    """Trial signal file missing, mis-sized, or unreadable."""


class TransformError(EegEvalError):
    """Invalid preprocessing step or step applied to incompatible signal."""


class LabelError(EegEvalError):
    """Rating outside its scale or unknown categorical class."""


class SplitError(EegEvalError):
    """Not enough units for a scheme, or ill-formed fixed split."""


class ModelError(EegEvalError):
    """Bad classifier configuration or mismatched feature dimensions."""


class MetricError(EegEvalError):
    """Empty or inconsistent prediction/label inputs."""


class ConfigError(EegEvalError):
    """Run configuration file missing, malformed, or inconsistent."""


class RunError(EegEvalError):
    """A pipeline stage failed during an experiment run."""

    def __init__(self, stage: str, message: str, fold_index: int | None = None):
        self.stage = stage
        self.fold_index = fold_index
        where = f"stage={stage}" if fold_index is None else f"stage={stage} fold={fold_index}"
        super().__init__(f"[{where}] {message}")
