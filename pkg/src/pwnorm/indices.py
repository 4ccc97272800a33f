"""Base-set indices.

The base set of every space here is a countable product of copies of the
naturals: an index is a tuple of positive integers whose length is the
arity of the space.  Indices order lexicographically, which is the
canonical ordering used everywhere (cell listings, deterministic sums,
tie-breaking).
"""

from __future__ import annotations

from .errors import ArityError, ValidationError

Index = tuple[int, ...]


def check_index(idx: Index, arity: int) -> Index:
    """Validate one index against an arity and return it unchanged."""
    if not isinstance(idx, tuple):
        raise ValidationError(f"index must be a tuple, got {type(idx).__name__}")
    if len(idx) != arity:
        raise ArityError(f"index {idx} has arity {len(idx)}, expected {arity}")
    for c in idx:
        if not isinstance(c, int) or isinstance(c, bool) or c < 1:
            raise ValidationError(f"index coordinates must be integers >= 1, got {idx}")
    return idx
