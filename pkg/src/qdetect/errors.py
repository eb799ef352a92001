"""Exception types shared across the package."""


class QDetectError(Exception):
    """Base class for all errors raised by qdetect."""


class DegenerateStates(QDetectError):
    """The Helstrom operator has no positive eigenvalue.

    Happens when the two relevance states coincide (up to sign) and the
    threshold is at least one, so no direction favours relevance.
    """


class EmptyStratum(QDetectError):
    """A relevant or non-relevant stratum has no judged documents."""


class DegenerateProbability(QDetectError):
    """A probability of exactly 0 or 1 where an open interval is required."""


class DimensionMismatch(QDetectError):
    pass


class ParseError(QDetectError):
    def __init__(self, path, line_no, reason):
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{self.path}:{line_no}: {reason}")


class DuplicateDocId(ParseError):
    pass


class UnknownTopic(QDetectError):
    pass
