"""Exception types.  The CLI maps ``DataError`` to exit code 3 and
``NumericError`` to exit code 4."""


class HGSqueezeError(Exception):
    pass


class DataError(HGSqueezeError, ValueError):
    """Bad input data: malformed files, out-of-range parameters, inconsistent measurements."""


class NumericError(HGSqueezeError, ArithmeticError):
    """A computation that cannot produce a finite, trustworthy number."""


class ConfigError(DataError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class CsvFormatError(DataError):
    pass


class InconsistentMeasurementError(DataError):
    pass


class QuadratureError(NumericError):
    pass


class DivergenceError(NumericError):
    """Gain or variance evaluated at or beyond the oscillation threshold."""


class FitError(NumericError):
    pass
