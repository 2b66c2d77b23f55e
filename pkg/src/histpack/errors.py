"""Exception hierarchy shared by the packers, solvers and CLI."""


class HistpackError(Exception):
    """Base class; the CLI turns any of these into a one-line error."""

    code = "invalid-input"


class InvalidLengthError(HistpackError, ValueError):
    code = "invalid-length"

    def __init__(self, value, position, max_len=None):
        self.value = value
        self.position = position
        self.max_len = max_len
        bound = f"1..{max_len}" if max_len is not None else ">= 1"
        super().__init__(
            f"sequence length {value!r} at position {position} is outside {bound}"
        )


class LengthFileError(HistpackError, ValueError):
    code = "bad-length-file"

    def __init__(self, path, line, text):
        self.path = path
        self.line = line
        self.text = text
        super().__init__(f"{path}: line {line}: cannot parse {text!r} as an integer")


class EmptyHistogramError(HistpackError, ValueError):
    code = "empty-histogram"

    def __init__(self, what="no sequences"):
        super().__init__(what)


class DepthLimitError(HistpackError, ValueError):
    code = "depth-limit"


class CoverageError(HistpackError, ValueError):
    """A packing does not account for every sequence exactly once."""

    code = "coverage"

    def __init__(self, length, expected, got):
        self.length = length
        self.expected = expected
        self.got = got
        super().__init__(
            f"coverage mismatch at length {length}: histogram + padding = {expected}, "
            f"packed = {got}"
        )


class ConvergenceError(HistpackError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    code = "no-convergence"

    def __init__(self, message, best, residual):
        self.best = best
        self.residual = residual
        super().__init__(f"{message} (best residual {residual:.6g})")


class OracleLimitError(HistpackError, ValueError):
    code = "oracle-limit"


class DuplicateRowError(HistpackError, ValueError):
    code = "duplicate-row"
