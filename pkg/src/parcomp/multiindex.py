"""Multi-index arithmetic.

A multi-index is a plain tuple of non-negative ints ``(a_1, ..., a_d)``.
Tuples already give structural equality, hashing and a total lexicographic
order, so no wrapper class is used.

Enumeration order is lexicographic *descending*: for ``d=2, r=2`` the order is
``(2, 0), (1, 1), (0, 2)``. It is stable across runs.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from functools import lru_cache

MultiIndex = tuple[int, ...]

MAX_DEGREE = 12
INT64_MAX = 2**63 - 1


def _checked(value: int) -> int:
    if value > INT64_MAX:
        raise OverflowError(f"combinatorial count {value} exceeds 64-bit range")
    return value


def as_multiindex(entries: Sequence[int]) -> MultiIndex:
    alpha = tuple(int(a) for a in entries)
    if not alpha:
        raise ValueError("multi-index must have length >= 1")
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index entries must be non-negative: {alpha}")
    return alpha


def degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def factorial(alpha: MultiIndex) -> int:
    """Product of componentwise factorials, ``a_1! ... a_d!``."""
    out = 1
    for a in alpha:
        out = _checked(out * math.factorial(a))
    return out


def multiplicity(alpha: MultiIndex) -> int:
    """``|alpha|! / alpha!``: the number of ordered index tuples that collapse to ``alpha``."""
    return _checked(math.factorial(degree(alpha)) // factorial(alpha))


def unit(d: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(d))


def add(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def from_indices(indices: Sequence[int], d: int) -> MultiIndex:
    """Collapse an ordered index tuple ``(i_1, ..., i_r)`` (0-based) to ``e_{i_1} + ... + e_{i_r}``."""
    counts = [0] * d
    for i in indices:
        if not 0 <= i < d:
            raise IndexError(f"index {i} out of range for dimension {d}")
        counts[i] += 1
    return tuple(counts)


def to_indices(alpha: MultiIndex) -> tuple[int, ...]:
    """Canonical (sorted) ordered tuple for ``alpha``; inverse of :func:`from_indices`."""
    out: list[int] = []
    for i, a in enumerate(alpha):
        out.extend([i] * a)
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_indices(d: int, r: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length ``d`` and degree ``r``, lexicographically descending.

    There are ``C(d + r - 1, r)`` of them.
    """
    if d < 1 or r < 0:
        raise ValueError(f"need d >= 1 and r >= 0, got d={d}, r={r}")
    if d == 1:
        return ((r,),)
    out: list[MultiIndex] = []
    for first in range(r, -1, -1):
        for rest in enumerate_indices(d - 1, r - first):
            out.append((first,) + rest)
    return tuple(out)


def iter_indices(d: int, r: int) -> Iterator[MultiIndex]:
    return iter(enumerate_indices(d, r))


def pair_decompositions(alpha: MultiIndex) -> list[tuple[tuple[MultiIndex, ...], int]]:
    """Split ``alpha`` into unordered multisets of degree-2 multi-indices.

    Each entry is ``(pairs, ordered_count)`` where ``pairs`` lists the degree-2
    pieces in enumeration order and ``ordered_count = k! / prod(m_j!)`` is the
    number of ordered k-tuples the multiset stands for.
    """
    alpha = as_multiindex(alpha)
    r = degree(alpha)
    if r % 2:
        raise ValueError(f"pair decomposition needs even degree, got |alpha|={r}")
    return list(_pair_decompositions(alpha))


@lru_cache(maxsize=4096)
def _pair_decompositions(alpha: MultiIndex) -> tuple[tuple[tuple[MultiIndex, ...], int], ...]:
    d = len(alpha)
    pieces = enumerate_indices(d, 2)
    k = degree(alpha) // 2
    results: list[tuple[tuple[MultiIndex, ...], int]] = []

    def walk(start: int, remaining: list[int], chosen: list[MultiIndex], mults: list[int]) -> None:
        if not any(remaining):
            count = math.factorial(k)
            for m in mults:
                count //= math.factorial(m)
            results.append((tuple(chosen), count))
            return
        # the first nonzero coordinate must be covered by some remaining piece
        for p in range(start, len(pieces)):
            beta = pieces[p]
            if any(b > r for b, r in zip(beta, remaining)):
                continue
            times_max = min(r // b for b, r in zip(beta, remaining) if b)
            for times in range(times_max, 0, -1):
                rem = [r - times * b for b, r in zip(beta, remaining)]
                walk(p + 1, rem, chosen + [beta] * times, mults + [times])

    walk(0, list(alpha), [], [])
    return tuple(results)
