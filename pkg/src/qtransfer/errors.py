"""Exception hierarchy shared by every module of the package."""


class QTransferError(Exception):
    """Base class for all package errors."""


class SizeError(QTransferError, ValueError):
    """Register size outside the supported range."""


class QubitIndexError(QTransferError, IndexError):
    """Qubit, layer or parameter index out of range."""


class ArityError(QTransferError, ValueError):
    """Vector length does not match the arity expected by a layer or circuit."""


class ShapeError(QTransferError, ValueError):
    """Parameter and gradient collections do not line up."""


class LabelError(QTransferError, ValueError):
    """Class label outside ``[0, n_classes)``."""


class BatchError(QTransferError, ValueError):
    """Empty batch passed to a loss computation."""


class ConfigError(QTransferError, ValueError):
    """Invalid experiment, training or dataset configuration."""


class RangeError(QTransferError, ValueError):
    """Truncation depth outside ``[0, depth]``."""


class FormatError(QTransferError, ValueError):
    """Malformed feature file. ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class MissingFileError(FormatError):
    pass


class EmptyFileError(FormatError):
    pass


class HeaderError(FormatError):
    pass


class MalformedRowError(FormatError):
    pass


class LabelFormatError(FormatError):
    pass


class RaggedWidthError(FormatError):
    pass


class CheckpointError(QTransferError):
    """Base class for checkpoint load failures."""


class CheckpointParseError(CheckpointError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CheckpointShapeError(CheckpointError):
    pass
