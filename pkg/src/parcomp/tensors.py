"""Sparse symmetric tensors, the Fisher metric, and metric contractions."""

from __future__ import annotations

import itertools
import math
import string
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import multiindex as mi
from .errors import DegenerateMetricError

SPD_PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class SymTensor:
    """Rank-``rank`` symmetric tensor over dimension ``dim``, keyed by multi-index.

    Components are read through the multi-index of their index tuple, so the
    tensor is symmetric by construction. Missing keys read as 0.
    """

    dim: int
    rank: int
    values: Mapping[mi.MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, val in self.values.items():
            key = mi.as_multiindex(key)
            if len(key) != self.dim or mi.degree(key) != self.rank:
                raise ValueError(f"key {key} does not fit dim={self.dim}, rank={self.rank}")
            clean[key] = float(val)
        object.__setattr__(self, "values", clean)

    @classmethod
    def from_function(cls, dim: int, rank: int, fn: Callable[[mi.MultiIndex], float],
                      keep_zeros: bool = False) -> SymTensor:
        values = {}
        for alpha in mi.enumerate_indices(dim, rank):
            v = fn(alpha)
            if v != 0.0 or keep_zeros:
                values[alpha] = v
        return cls(dim, rank, values)

    @classmethod
    def from_matrix(cls, matrix) -> SymTensor:
        m = np.asarray(matrix, dtype=float)
        d = m.shape[0]
        return cls.from_function(d, 2, lambda a: float(m[mi.to_indices(a)]))

    def __getitem__(self, alpha: mi.MultiIndex) -> float:
        return self.values.get(tuple(alpha), 0.0)

    def get(self, *indices: int) -> float:
        """Component at the ordered 0-based index tuple; order does not matter."""
        if len(indices) == 1 and isinstance(indices[0], (tuple, list)):
            indices = tuple(indices[0])
        if len(indices) != self.rank:
            raise ValueError(f"expected {self.rank} indices, got {len(indices)}")
        return self[mi.from_indices(indices, self.dim)]

    def items(self):
        return self.values.items()

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.rank)
        for alpha, val in self.values.items():
            for idx in set(itertools.permutations(mi.to_indices(alpha))):
                out[idx] = val
        return out

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values.values())


def tensor_get(t: SymTensor, indices: Sequence[int]) -> float:
    return t.get(tuple(indices))


class Metric:
    """Symmetric positive definite d x d metric with cached inverse and sqrt(det).

    Construction fails with :class:`DegenerateMetricError` when the smallest
    Cholesky pivot is below ``1e-12`` times the largest one.
    """

    __slots__ = ("matrix", "inverse", "sqrt_det", "dim", "_hermite_cache")

    def __init__(self, matrix):
        g = np.array(matrix, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        if not np.allclose(g, g.T, rtol=1e-12, atol=1e-14 * max(1.0, np.abs(g).max())):
            raise DegenerateMetricError("metric is not symmetric")
        g = 0.5 * (g + g.T)
        try:
            chol = np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMetricError(f"metric is not positive definite: {exc}") from None
        pivots = np.diag(chol) ** 2
        if not np.all(np.isfinite(pivots)) or pivots.min() <= SPD_PIVOT_RTOL * pivots.max():
            raise DegenerateMetricError(
                f"metric is numerically singular (pivot ratio {pivots.min() / pivots.max():.3g})")
        eye = np.eye(g.shape[0])
        linv = np.linalg.solve(chol, eye)
        self.matrix = g
        self.inverse = linv.T @ linv
        self.sqrt_det = float(np.prod(np.diag(chol)))
        self.dim = g.shape[0]
        self._hermite_cache: dict = {}

    @property
    def det(self) -> float:
        return self.sqrt_det**2

    def as_tensor(self) -> SymTensor:
        return SymTensor.from_matrix(self.matrix)

    def inverse_tensor(self) -> SymTensor:
        return SymTensor.from_matrix(self.inverse)

    def __repr__(self):
        return f"Metric(dim={self.dim}, sqrt_det={self.sqrt_det:.6g})"


Pairing = Sequence[tuple[int, int]]


def _check_pairing(pairing: Pairing, n_slots: int) -> list[tuple[int, int]]:
    pairs = [(int(a), int(b)) for a, b in pairing]
    used = sorted(s for p in pairs for s in p)
    if used != list(range(n_slots)):
        raise ValueError(f"pairing {pairs} must use every slot 0..{n_slots - 1} exactly once")
    return pairs


def metric_power_contract(m: Metric, t1: SymTensor, t2: SymTensor | None, pairing: Pairing,
                          method: str = "multiindex") -> float:
    """Fully contract ``t1`` (and ``t2``) against inverse-metric factors.

    Slots ``0..r1-1`` belong to ``t1`` and ``r1..r1+r2-1`` to ``t2``; each pair
    ``(a, b)`` in ``pairing`` contributes a factor ``g^{i_a i_b}``. For example
    ``pairing=[(0, 1), (2, 3)]`` with a rank-4 ``t1`` is
    ``sum kappa_{ijkl} g^{ij} g^{kl}``.

    ``method="naive"`` sums over all ordered index tuples (dense einsum) and is
    meant as a test oracle for small ``d``; ``method="multiindex"`` sums over
    multi-indices weighted by their multiplicities.
    """
    tensors = [t1] if t2 is None else [t1, t2]
    for t in tensors:
        if t.dim != m.dim:
            raise ValueError(f"tensor dim {t.dim} != metric dim {m.dim}")
    ranks = [t.rank for t in tensors]
    pairs = _check_pairing(pairing, sum(ranks))
    if method == "naive":
        return _contract_naive(m, tensors, pairs)
    if method == "multiindex":
        return _contract_multiindex(m, tensors, ranks, pairs)
    raise ValueError(f"unknown contraction method {method!r}")


def _contract_naive(m: Metric, tensors: list[SymTensor], pairs: list[tuple[int, int]]) -> float:
    letters = string.ascii_letters
    specs, operands, pos = [], [], 0
    for t in tensors:
        specs.append(letters[pos:pos + t.rank])
        operands.append(t.to_dense())
        pos += t.rank
    for a, b in pairs:
        specs.append(letters[a] + letters[b])
        operands.append(m.inverse)
    return float(np.einsum(",".join(specs) + "->", *operands, optimize=True))


@lru_cache(maxsize=64)
def _pattern_orbit(ranks: tuple[int, ...], pairs: tuple[tuple[int, int], ...]) -> list[tuple[tuple[tuple[int, int], ...], float]]:
    # average of the pattern over independent slot permutations of each tensor
    offsets = np.cumsum((0,) + ranks[:-1])
    perm_sets = [itertools.permutations(range(o, o + r)) for o, r in zip(offsets, ranks)]
    counts: Counter = Counter()
    total = 0
    for combo in itertools.product(*[list(p) for p in perm_sets]):
        relabel = [s for block in combo for s in block]
        pattern = tuple(sorted(tuple(sorted((relabel[a], relabel[b]))) for a, b in pairs))
        counts[pattern] += 1
        total += 1
    return [(p, c / total) for p, c in sorted(counts.items())]


def _contract_multiindex(m: Metric, tensors: list[SymTensor], ranks: list[int],
                         pairs: list[tuple[int, int]]) -> float:
    ginv = m.inverse
    # per tensor: canonical index arrays and multiplicity-weighted values (nonzero keys only)
    canon, weights = [], []
    for t in tensors:
        keys = [a for a, v in t.items() if v != 0.0]
        if not keys:
            return 0.0
        canon.append(np.array([mi.to_indices(a) for a in keys], dtype=int).reshape(len(keys), t.rank))
        weights.append(np.array([mi.multiplicity(a) * t[a] for a in keys]))
    offsets = list(np.cumsum([0] + ranks[:-1]))

    def owner(slot: int) -> tuple[int, int]:
        for k in range(len(ranks) - 1, -1, -1):
            if slot >= offsets[k]:
                return k, slot - offsets[k]
        raise AssertionError

    total = 0.0
    for pattern, w in _pattern_orbit(tuple(ranks), tuple(pairs)):
        if len(tensors) == 1:
            prod = np.ones(len(weights[0]))
            for a, b in pattern:
                prod = prod * ginv[canon[0][:, a], canon[0][:, b]]
            total += w * float(weights[0] @ prod)
        else:
            prod = np.ones((len(weights[0]), len(weights[1])))
            for a, b in pattern:
                (ta, sa), (tb, sb) = owner(a), owner(b)
                if ta == tb == 0:
                    prod = prod * ginv[canon[0][:, sa], canon[0][:, sb]][:, None]
                elif ta == tb == 1:
                    prod = prod * ginv[canon[1][:, sa], canon[1][:, sb]][None, :]
                else:
                    prod = prod * ginv[np.ix_(canon[0][:, sa], canon[1][:, sb])]
            total += w * float(weights[0] @ prod @ weights[1])
    return total


def symmetric_sum(d: int, r: int, f: Callable[[mi.MultiIndex], float]) -> float:
    """``sum_{|alpha|=r} multiplicity(alpha) f(alpha)``, equal to the ordered sum over d^r tuples."""
    return math.fsum(mi.multiplicity(a) * f(a) for a in mi.enumerate_indices(d, r))


def ordered_sum(d: int, r: int, f: Callable[[mi.MultiIndex], float]) -> float:
    """Naive ``sum_{i_1..i_r} f(e_{i_1} + ... + e_{i_r})`` over all d^r ordered tuples."""
    return math.fsum(f(mi.from_indices(idx, d)) for idx in itertools.product(range(d), repeat=r))


def random_spd(rng: np.random.Generator, d: int, cond: float = 10.0) -> np.ndarray:
    """Random SPD matrix with eigenvalues spread over ``[1, cond]``."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = np.exp(rng.uniform(0.0, np.log(cond), size=d))
    return (q * eig) @ q.T


def random_symtensor(rng: np.random.Generator, d: int, r: int) -> SymTensor:
    return SymTensor(d, r, {a: float(rng.standard_normal()) for a in mi.enumerate_indices(d, r)})

