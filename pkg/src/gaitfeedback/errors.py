"""Shared exception base for the gaitfeedback package.

Every package-specific exception derives from :class:`GaitFeedbackError` so
callers can catch one type at pipeline boundaries. Specific error classes
live next to the code that raises them.
"""


class GaitFeedbackError(Exception):
    """Base class for all errors raised by this package."""
