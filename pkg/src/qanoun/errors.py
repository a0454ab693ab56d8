"""Exception hierarchy shared across the toolkit."""


class QANounError(Exception):
    """Base class for all toolkit errors."""


class UsageError(QANounError):
    """An operation was called with arguments that violate its contract."""


class ConfigurationError(QANounError):
    """Invalid or incomplete configuration (endpoints, exemplar sets, rosters)."""


class IngestionError(QANounError):
    """A corpus file or record could not be read."""

    def __init__(self, message: str, record_id: str | None = None):
        super().__init__(message)
        self.record_id = record_id


class FormError(QANounError):
    """A QuestionForm violates the template grammar's slot rules."""


class UnparseableQuestionError(QANounError):
    """A question string matches none of the nine templates."""

    def __init__(self, question: str, nearest_template: "str | None" = None):
        detail = f"not a template question: {question!r}"
        if nearest_template is not None:
            detail += f" (nearest template: {nearest_template})"
        super().__init__(detail)
        self.question = question
        self.nearest_template = nearest_template


class TransportError(QANounError):
    """An inference endpoint could not be reached after the configured retries."""


class IndeterminateVerdictError(QANounError):
    """The entailment judge failed to produce a yes/no answer after a reprompt."""

    def __init__(self, responses: list[str]):
        super().__init__(f"no yes/no verdict in responses: {responses!r}")
        self.responses = responses


class AuthorizationError(QANounError):
    """The acting annotator is not allowed to perform the operation."""


class NotReadyError(QANounError):
    """The operation requires state that is not yet present (missing records)."""
