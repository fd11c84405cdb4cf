"""Shared exception types for the homosem package."""

from __future__ import annotations


class HomosemError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HomosemError):
    """A file could not be parsed into the expected structure."""


class ValidationError(HomosemError):
    """A parsed structure violates the dataset contract.

    Carries the full list of findings so callers can report more than the
    first offending record.
    """

    def __init__(self, message: str, findings: tuple = ()):
        super().__init__(message)
        self.findings = tuple(findings)


class AlignmentError(HomosemError):
    """A target span could not be aligned with token offsets."""


class StrategyError(HomosemError):
    """A strategy spec is unknown or incompatible with its provider."""


class ScoringError(HomosemError):
    """A triple could not be scored (degenerate vector, missing key)."""
