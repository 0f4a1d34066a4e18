"""Shared acceptance-report recorder.

Each acceptance criterion appends one line here; the conftest terminal-
summary hook prints them all at the end of the run so every criterion shows
a visible pass/fail line regardless of capture settings.
"""

RESULTS = []


def record(number: int, passed: bool, text: str) -> None:
    RESULTS.append((number, passed, text))
