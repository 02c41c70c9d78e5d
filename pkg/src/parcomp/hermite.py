"""Un-normalized Hermite numbers h_alpha(0) for a general inverse metric.

For ``|alpha| = 2k``::

    h_alpha(0) = (-1)^k alpha!/k! * sum over ordered k-tuples of degree-2
                 multi-indices beta^1 + ... + beta^k = alpha of
                 prod_j ginv[beta^j] / beta^j!

where ``ginv[e_a + e_b] = (g^{-1})_{ab}``. Odd degrees give exactly 0.
"""

from __future__ import annotations

import math

from . import multiindex as mi
from .tensors import Metric

MAX_RANK = mi.MAX_DEGREE

# the three pairings of four slots, as listed for h_{i1..i4}
PAIRINGS_4 = (
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((0, 3), (1, 2)),
)

# the fifteen pairings of six slots, in the order of the displayed rank-6 sum
PAIRINGS_6 = (
    ((0, 1), (2, 3), (4, 5)),
    ((0, 2), (1, 3), (4, 5)),
    ((0, 3), (1, 2), (4, 5)),
    ((0, 1), (2, 4), (3, 5)),
    ((0, 2), (1, 4), (3, 5)),
    ((0, 4), (1, 2), (3, 5)),
    ((0, 1), (2, 5), (3, 4)),
    ((0, 2), (1, 5), (3, 4)),
    ((0, 5), (1, 2), (3, 4)),
    ((0, 3), (1, 4), (2, 5)),
    ((0, 4), (1, 3), (2, 5)),
    ((0, 3), (1, 5), (2, 4)),
    ((0, 5), (1, 3), (2, 4)),
    ((0, 4), (1, 5), (2, 3)),
    ((0, 5), (1, 4), (2, 3)),
)


def hermite_number(alpha: mi.MultiIndex, m: Metric) -> float:
    """``h_alpha(0)`` for the normal law with covariance ``g`` (so ``g^{-1}`` enters).

    Results are memoized on the metric instance.
    """
    alpha = mi.as_multiindex(alpha)
    if len(alpha) != m.dim:
        raise ValueError(f"multi-index length {len(alpha)} != metric dim {m.dim}")
    r = mi.degree(alpha)
    if r > MAX_RANK:
        raise ValueError(f"Hermite numbers are supported up to rank {MAX_RANK}, got {r}")
    if r % 2:
        return 0.0
    cache = m._hermite_cache
    hit = cache.get(alpha)
    if hit is not None:
        return hit
    value = _pairing_sum(alpha, m)
    cache[alpha] = value
    return value


def _pairing_sum(alpha: mi.MultiIndex, m: Metric) -> float:
    k = mi.degree(alpha) // 2
    ginv = m.inverse
    terms = []
    for pairs, count in mi.pair_decompositions(alpha):
        prod = float(count)
        for beta in pairs:
            a, b = mi.to_indices(beta)
            prod *= ginv[a, b] / (2.0 if a == b else 1.0)
        terms.append(prod)
    sign = -1.0 if k % 2 else 1.0
    return sign * mi.factorial(alpha) / math.factorial(k) * math.fsum(terms)


def hermite_component(indices, m: Metric) -> float:
    """``h_{i_1...i_r}`` addressed by an ordered 0-based index tuple."""
    return hermite_number(mi.from_indices(indices, m.dim), m)


def _check_indices(indices, m: Metric, r: int) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if len(idx) != r:
        raise ValueError(f"expected {r} indices, got {len(idx)}")
    for i in idx:
        if not 0 <= i < m.dim:
            raise IndexError(f"index {i} out of range for dimension {m.dim}")
    return idx


def hermite_rank4_explicit(indices, m: Metric) -> float:
    """Three-pairing formula for ``h_{i1 i2 i3 i4}``; an oracle for :func:`hermite_number`."""
    i = _check_indices(indices, m, 4)
    g = m.inverse
    return sum(g[i[a], i[b]] * g[i[c], i[e]] for (a, b), (c, e) in PAIRINGS_4)


def hermite_rank6_explicit(indices, m: Metric) -> float:
    """Fifteen-pairing formula for ``h_{i1...i6}`` (note the overall minus sign)."""
    i = _check_indices(indices, m, 6)
    g = m.inverse
    return -sum(g[i[a], i[b]] * g[i[c], i[e]] * g[i[p], i[q]]
                for (a, b), (c, e), (p, q) in PAIRINGS_6)
