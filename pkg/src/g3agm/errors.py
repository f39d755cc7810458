"""Exception hierarchy.

Every error carries an optional ``stage`` attribute so that the pipeline can
attribute failures to the operation that raised them.
"""


class G3Error(Exception):
    """Base class for all domain errors."""

    #: exit code used by the CLI when this error aborts a run
    exit_code = 3

    def __init__(self, message="", stage=None, **details):
        super().__init__(message)
        self.stage = stage
        self.details = details

    def at(self, stage):
        if self.stage is None:
            self.stage = stage
        return self


class NumericFailure(G3Error):
    exit_code = 3


class NonConvergence(NumericFailure):
    pass


class AmbiguousRank(NumericFailure):
    pass


class CountMismatch(NumericFailure):
    pass


class NonGeneric(G3Error):
    """Input is special: a collision, degenerate line or non-generic pattern."""

    exit_code = 2


class CommonComponent(NonGeneric):
    pass


class ZeroForm(NonGeneric):
    pass


class DegenerateLine(NonGeneric):
    pass


class ChartDegenerate(NonGeneric):
    pass
