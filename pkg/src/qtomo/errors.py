"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for configuration problems, 3 for bad input data, 4 for numerical
degeneracy.
"""


class QtomoError(Exception):
    exit_code = 4
    code = "numeric"


class ConfigError(QtomoError, ValueError):
    exit_code = 2
    code = "config"


class InvalidP(ConfigError):
    code = "invalid-p"


class TooFewDirections(ConfigError):
    code = "too-few-directions"


class DataError(QtomoError, ValueError):
    exit_code = 3
    code = "data"


class EmptySample(DataError):
    code = "empty-sample"


class NonFiniteValue(DataError):
    code = "non-finite"


class EmptyFile(DataError):
    code = "empty-file"


class MissingColumn(DataError):
    code = "missing-column"


class NonNumericCell(DataError):
    code = "non-numeric-cell"

    def __init__(self, row, col, value=None):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"row {row}, col {col}: {value!r}")


class TooFewExceedances(DataError):
    code = "too-few-exceedances"


class ExtrapolationRefused(DataError):
    code = "extrapolation-refused"


class UnboundedRegion(QtomoError):
    code = "unbounded-region"


class EmptyRegion(QtomoError):
    code = "empty-region"


class DegenerateRegion(QtomoError):
    code = "degenerate-region"


class NoEnvelope(QtomoError):
    code = "no-envelope"


class DegenerateTail(QtomoError):
    code = "degenerate-tail"


class OutOfRegime(QtomoError):
    code = "out-of-regime"


class DegenerateCovariate(QtomoError):
    code = "degenerate-covariate"


class SingularCovariance(QtomoError):
    code = "singular-covariance"
