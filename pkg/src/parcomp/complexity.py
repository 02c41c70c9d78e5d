"""Parametric complexity COMP(K): asymptotic approximations and exact oracles."""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import multiindex as mi
from .errors import DomainError, ExpansionInvalidError
from .expansion import expansion_terms, log_expansion
from .expansion import f1 as expansion_f1
from .family import ExpFamily, default_point, fisher_metric, spherical_normal

DEFAULT_NODES = 32
MC_CHUNK = 100_000


@dataclass(frozen=True)
class Region:
    """Axis-aligned box K in natural coordinates.

    The theory asks for a smooth manifold with boundary; a box has corners.
    The catalog families have constant integrands, so this is not smoothed.
    """

    box: tuple[tuple[float, float], ...]
    nodes_per_dim: int = DEFAULT_NODES

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if not box:
            raise ValueError("region needs at least one dimension")
        for lo, hi in box:
            if not lo < hi:
                raise ValueError(f"box side ({lo}, {hi}) needs lo < hi")
        if self.nodes_per_dim < 2:
            raise ValueError("nodes_per_dim must be >= 2")
        object.__setattr__(self, "box", box)

    @property
    def dim(self) -> int:
        return len(self.box)

    @property
    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2 for lo, hi in self.box])

    def corners(self):
        return itertools.product(*self.box)

    def check(self, f: ExpFamily) -> None:
        if self.dim != f.dim:
            raise DomainError(f"region has dim {self.dim}, family {f.name} has dim {f.dim}")
        for corner in self.corners():
            if not f.in_domain(np.array(corner)):
                raise DomainError(f"region corner {corner} lies outside the domain of {f.name}")

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Tensor-product Gauss-Legendre nodes (N x d) and weights (N)."""
        x, w = np.polynomial.legendre.leggauss(self.nodes_per_dim)
        axes, wts = [], []
        for lo, hi in self.box:
            half = 0.5 * (hi - lo)
            axes.append(lo + half * (x + 1.0))
            wts.append(half * w)
        nodes = np.array(list(itertools.product(*axes)))
        weights = np.array([math.prod(c) for c in itertools.product(*wts)])
        return nodes, weights


@dataclass(frozen=True)
class ComplexityReport:
    n: int
    s: int
    leading: float
    log_integral: float
    total: float
    volK: float


def leading_term(d: int, n: float) -> float:
    return 0.5 * d * math.log(n / (2 * math.pi))


def jeffreys_volume(f: ExpFamily, k: Region) -> float:
    """``int_K sqrt(det g(theta)) dtheta`` by tensor-product Gauss-Legendre."""
    k.check(f)
    nodes, weights = k.quadrature()
    dens = np.array([fisher_metric(f, th).sqrt_det for th in nodes])
    return float(weights @ dens)


def _corrections(f: ExpFamily, theta, s: int) -> tuple[float, ...]:
    if s == 0:
        return (1.0,)
    return expansion_terms(f, theta, s).F


def comp_approx(f: ExpFamily, k: Region, n: int, s: int) -> ComplexityReport:
    """``(d/2) log(n/2pi) + log int_K (sum_{i<=s} F_i n^-i) dpi``.

    Raises :class:`ExpansionInvalidError` if the truncated integrand is not
    positive at some node (the expansion is used outside its regime).
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if s not in (0, 1, 2):
        raise ValueError(f"expansion order must be 0, 1 or 2, got {s}")
    k.check(f)
    nodes, weights = k.quadrature()
    dens = np.array([fisher_metric(f, th).sqrt_det for th in nodes])
    powers = np.array([float(n) ** -i for i in range(s + 1)])
    if f.constant_corrections:
        integrand = np.full(len(nodes), float(np.dot(_corrections(f, k.center, s), powers)))
    else:
        integrand = np.array([np.dot(_corrections(f, th, s), powers) for th in nodes])
    if np.any(integrand <= 0.0):
        raise ExpansionInvalidError(
            f"expansion invalid at n={n}: truncated integrand min {integrand.min():.6g} <= 0")
    vol = float(weights @ dens)
    log_integral = math.log(float(weights @ (integrand * dens)))
    lead = leading_term(f.dim, n)
    return ComplexityReport(n=n, s=s, leading=lead, log_integral=log_integral,
                            total=lead + log_integral, volK=vol)


def jeffreys_mean_corrections(f: ExpFamily, k: Region, order: int = 2) -> tuple[float, ...]:
    """Jeffreys-weighted averages ``(E[F_1], ..., E[F_order])`` over K."""
    k.check(f)
    if f.constant_corrections:
        return expansion_terms(f, k.center, order).F[1:]
    nodes, weights = k.quadrature()
    dens = np.array([fisher_metric(f, th).sqrt_det for th in nodes])
    F = np.array([expansion_terms(f, th, order).F[1:] for th in nodes])
    w = weights * dens
    return tuple(float(v) for v in (w @ F) / w.sum())


# ---------------------------------------------------------------------------
# exact oracles


def exact_comp_spherical(d: int, n: float, vol_k: float) -> float:
    """Closed-form COMP(K) for the spherical normal with unknown variance (k = d - 1)."""
    if d < 2:
        raise ValueError("spherical normal needs d >= 2")
    if vol_k <= 0:
        raise ValueError("vol(K) must be positive")
    k = d - 1
    shape = k * (n - 1) / 2
    if shape <= 0:
        raise ValueError(f"exact formula needs k(n-1)/2 > 0, got {shape}")
    return (math.log(vol_k) - 0.5 * k * math.log(math.pi * k) - 0.5 * math.log(k / 2)
            + 0.5 * n * k * math.log(n * k / (2 * math.e)) - math.lgamma(shape))


def exact_comp_exponential(a: float, b: float, n: int) -> float:
    """Exact COMP(K) for exponential data with rate in ``[a, b]``.

    The sample mean t has density ``(n xi)^n t^(n-1) e^(-n xi t) / Gamma(n)``
    at rate xi; maximizing over xi gives ``n^n e^-n / (Gamma(n) t)`` and the
    integral over t in ``[1/b, 1/a]`` is ``log(b/a)`` times that constant.
    """
    if not 0 < a < b:
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    if n < 1:
        raise ValueError("sample size must be >= 1")
    return n * math.log(n) - n - math.lgamma(n) + math.log(math.log(b / a))


def overestimation(d: int, n: int, f1: float | None = None) -> tuple[float, float]:
    """``(over_s0, over_s1)`` for the spherical normal; vol(K) cancels.

    The corrected formula is the expansion of the logarithm to first order,
    ``leading + log vol + F_1/n``.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if n < d:
        raise ValueError(f"n={n} < d={d}: under-determined model, no exact value")
    if f1 is None:
        fam = spherical_normal(d)
        f1 = expansion_f1(fam, default_point(fam))
    c1 = log_expansion(f1, 0.0).c1
    exact = exact_comp_spherical(d, n, 1.0)
    s0 = leading_term(d, n)
    return s0 - exact, s0 + c1 / n - exact


# ---------------------------------------------------------------------------
# Monte Carlo check of Amari-Chentsov tensors


@dataclass(frozen=True)
class MCEstimate:
    rank: int
    samples: int
    mean: dict
    stderr: dict


def mc_validate_ac(f: ExpFamily, theta, r: int, samples: int, seed: int,
                   chunk: int = MC_CHUNK) -> MCEstimate:
    """Monte Carlo ``E[prod_j d_{i_j} log p]`` for each rank-r multi-index.

    The score in natural coordinates is ``x - grad psi(theta)``. Chunk c draws
    from ``SeedSequence(seed).spawn(...)[c]``, so results do not depend on how
    chunks are scheduled.
    """
    if f.sampler is None:
        raise ValueError(f"family {f.name} has no sampler")
    if not 1 <= r <= 4:
        raise ValueError(f"rank must be in 1..4, got {r}")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    th = f.point(theta)
    mean_x = f.gradient(th)
    keys = mi.enumerate_indices(f.dim, r)
    idx = [mi.to_indices(a) for a in keys]
    n_chunks = -(-samples // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    s1 = np.zeros(len(keys))
    s2 = np.zeros(len(keys))
    done = 0
    for c, child in enumerate(children):
        size = min(chunk, samples - done)
        rng = np.random.default_rng(child)
        score = f.sampler(rng, th, size) - mean_x
        prods = np.stack([np.prod(score[:, list(ix)], axis=1) for ix in idx], axis=1)
        s1 += prods.sum(axis=0)
        s2 += (prods**2).sum(axis=0)
        done += size
    mean = s1 / samples
    var = (s2 - samples * mean**2) / (samples - 1)
    se = np.sqrt(np.maximum(var, 0.0) / samples)
    return MCEstimate(r, samples, dict(zip(keys, mean.tolist())), dict(zip(keys, se.tolist())))


def box_from_pairs(pairs: Sequence[Sequence[float]], nodes: int = DEFAULT_NODES) -> Region:
    return Region(tuple((float(lo), float(hi)) for lo, hi in pairs), nodes)
