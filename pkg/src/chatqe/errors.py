"""Exception hierarchy shared across the harness."""


class ChatQeError(Exception):
    """Base class for all data errors raised by this package."""


class CorpusFormatError(ChatQeError):
    """Malformed corpus input (bad JSON, missing fields, empty stream)."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class CorpusValidationError(ChatQeError):
    """A corpus violated one or more structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:10])
        more = "" if len(self.violations) <= 10 else f" (+{len(self.violations) - 10} more)"
        super().__init__(f"{len(self.violations)} violation(s): {lines}{more}")


class ContextError(ChatQeError):
    """Context construction failed for a segment (missing ref/hypothesis)."""


class BatchError(ChatQeError):
    """Segment batch export/import problem (duplicate or misaligned keys)."""


class ScoreImportError(ChatQeError):
    """Score file does not line up with its batch."""


class KeyAlignmentError(ChatQeError):
    """Metric and human score tables disagree on segment keys."""

    def __init__(self, missing_keys):
        self.missing_keys = sorted(missing_keys)
        shown = ", ".join(map(str, self.missing_keys[:5]))
        more = "" if len(self.missing_keys) <= 5 else f" (+{len(self.missing_keys) - 5} more)"
        super().__init__(f"missing keys in score table: {shown}{more}")


class LlmError(ChatQeError):
    """LLM endpoint interaction failure."""


class AuthenticationError(LlmError):
    """Endpoint rejected the credentials; fatal for the run."""
