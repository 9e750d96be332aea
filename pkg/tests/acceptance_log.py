"""Shared list of acceptance verdicts, printed at the end of the pytest run."""

RESULTS = []


def record(criterion: int, passed: bool, detail: str):
    RESULTS.append((criterion, passed, detail))
