"""Exception hierarchy shared by all modules."""


class Agnostic2DError(Exception):
    """Base class for every error raised by this package."""


class DataError(Agnostic2DError):
    """Problems with input data (files, samples)."""


class AlgorithmFailure(Agnostic2DError):
    """A learner or search could not produce a hypothesis."""


class DegenerateHull(Agnostic2DError):
    pass


class UnregisteredLine(Agnostic2DError):
    pass


class EmptySample(DataError):
    pass


class TooFewPoints(DataError):
    pass


class CollinearNet(DataError):
    pass


class FileExhausted(DataError):
    pass


class ParseError(DataError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(DataError):
    def __init__(self, rows: list[int], message: str):
        shown = ", ".join(str(r) for r in rows[:20])
        more = "" if len(rows) <= 20 else f" (+{len(rows) - 20} more)"
        super().__init__(f"{message}: rows {shown}{more}")
        self.rows = rows


class InstanceTooLarge(AlgorithmFailure):
    pass


class EmptyReferenceSet(AlgorithmFailure):
    pass


class AllInvocationsFailed(AlgorithmFailure):
    pass


class HullTooLarge(AlgorithmFailure):
    """Raised when an island hull exceeds the vertex budget."""
