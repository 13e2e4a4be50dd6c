"""Exception hierarchy. Every error carries a stable machine-readable code."""

from __future__ import annotations


class FramesmithError(Exception):
    """Base error with a stable code, mirrored by the HTTP facade and CLI."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class LanguageError(FramesmithError):
    """Language tag failed shape validation or registry lookup."""

    def __init__(self, message: str):
        super().__init__("INVALID_LANGUAGE", message)


class MappingError(FramesmithError):
    """FE mapping along a frame relation could not be applied.

    Codes: INCOMPLETE_MAPPING, NAME_COLLISION.
    """


class LexiconError(FramesmithError):
    """Synset ingestion failure. Codes: SOURCE_UNREADABLE, EMPTY_SOURCE."""


class StoreError(FramesmithError):
    """Frame store failure.

    Codes: DUPLICATE_NAME, DUPLICATE_LU, NOT_FOUND, STORAGE_FAILURE,
    SCHEMA_MISMATCH, CONFLICT, VALIDATION_FAILED.
    """


class WizardError(FramesmithError):
    """Wizard protocol violation.

    Codes: WRONG_STEP, UNKNOWN_SESSION, SESSION_EXPIRED, UNKNOWN_FRAME,
    VALIDATION_FAILED, DUPLICATE_NAME.
    """

    def __init__(self, code: str, message: str, report=None):
        super().__init__(code, message)
        self.report = report
