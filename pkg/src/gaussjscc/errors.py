"""Exception hierarchy shared by all evaluators."""


class JsccError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(JsccError, ValueError):
    pass


class UnknownLabel(JsccError, KeyError):
    pass


class SingularObservation(JsccError, ArithmeticError):
    """Observed covariance block is numerically singular."""


class NoConvergence(JsccError, RuntimeError):
    pass


class DegenerateCorrelation(InvalidParams):
    """Raised where a quantity is undefined at zero correlation."""


class UnsupportedScheme(InvalidParams):
    pass


class ConfigError(JsccError, ValueError):
    """Bad CLI/config input; carries an optional field name and line number."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
