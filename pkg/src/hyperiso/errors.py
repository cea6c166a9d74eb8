"""Shared exception types."""


class EvalFailure(Exception):
    """A function evaluation hit a support collision (0/0 or pole).

    Callers either resample the offending random point or switch to the
    deformation path.
    """


class Fail(Exception):
    """Evaluation failed at this input after the configured retries."""


class DegenerateInput(Exception):
    """Input needs the formal (t-adic) evaluation path."""


class PipelineError(Exception):
    """A pipeline stage could not complete after retries."""


class UnsupportedConfiguration(Exception):
    """Requested a combination the implementation deliberately excludes."""
