"""Shared exceptions and capacity guards.

Dense-table and full-scan operations refuse inputs above a size guard so a
stray CLI call cannot eat all memory.  The ``ANDLIFT_CAPACITY`` environment
variable replaces every guard value at once.
"""

from __future__ import annotations

import os


class CapacityError(Exception):
    """Input exceeds a size guard (see ANDLIFT_CAPACITY)."""


class FormatError(Exception):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasibleError(Exception):
    """The linear program has no feasible point."""


class UnboundedError(Exception):
    """The linear program is unbounded in the optimization direction."""


class DisjointifyError(Exception):
    """All sampling attempts were exhausted without a verified witness."""


def capacity(default: int) -> int:
    """Size guard: the default unless ANDLIFT_CAPACITY overrides it."""
    raw = os.environ.get("ANDLIFT_CAPACITY")
    if raw:
        return int(raw)
    return default


def check_capacity(n: int, default: int, what: str) -> None:
    limit = capacity(default)
    if n > limit:
        raise CapacityError(
            f"{what}: n={n} exceeds the guard {limit} "
            "(set ANDLIFT_CAPACITY to override)"
        )
