"""Exception hierarchy shared by every module.

Each error carries an ``exit_code`` so the command-line layer can map it
without a lookup table: 2 for bad input, 3 for numerical failure.
"""


class AcfHorizonError(Exception):
    exit_code = 2


class DimensionMismatch(AcfHorizonError, ValueError):
    pass


class IndexOutOfRange(AcfHorizonError, IndexError):
    pass


class NonFinite(AcfHorizonError, ArithmeticError):
    exit_code = 3

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SingularSystem(AcfHorizonError, ArithmeticError):
    exit_code = 3


class InsufficientHistory(AcfHorizonError, ValueError):
    pass


class ZeroVariance(AcfHorizonError, ArithmeticError):
    exit_code = 3


class DegenerateBase(AcfHorizonError, ArithmeticError):
    exit_code = 3


class SeriesTooShort(AcfHorizonError, ValueError):
    pass


class EmptySummary(AcfHorizonError, ValueError):
    pass


class ConfigInvalid(AcfHorizonError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class FileError(AcfHorizonError, OSError):
    pass


class FormatError(AcfHorizonError, ValueError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class NonContiguousTime(FormatError):
    def __init__(self, t, line=None):
        super().__init__(f"time index {t} breaks the contiguous sequence", line)
        self.t = t
