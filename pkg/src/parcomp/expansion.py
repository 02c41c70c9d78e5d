"""Correction terms F_1, F_2 of the complexity integrand and related quantities.

The production route builds the degree-r cumulant polynomials
``T_r(t) = sum_{|alpha|=r} kappa_alpha t^alpha / alpha!``, forms

    n^-1 :  T4 + T3^2/2
    n^-2 :  T6 + T3 T5 + T4^2/2 + T3^2 T4/2 + T3^4/24

and replaces each monomial ``t^gamma`` by the Hermite number ``h_gamma(0)``.
The ordered-index contraction of F_1 and the Amari-Chentsov form are kept as
independent cross-checks.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import multiindex as mi
from .errors import DerivativeOrderError
from .family import ExpFamily, cumulants, fisher_metric
from .hermite import hermite_number
from .tensors import Metric, SymTensor, metric_power_contract

Poly = dict[mi.MultiIndex, float]

# contraction patterns of the three F_1 sums (slots 0-3 one rank-4 tensor; 0-2 | 3-5 two rank-3 tensors)
PAIRING_QUARTIC = ((0, 1), (2, 3))
PAIRING_CUBIC_TRACES = ((0, 1), (2, 3), (4, 5))
PAIRING_CUBIC_CROSS = ((0, 3), (1, 4), (2, 5))

MAX_AC_RANK = 4


@dataclass(frozen=True)
class ExpansionTerms:
    theta: tuple[float, ...]
    F: tuple[float, ...]
    order: int

    def __post_init__(self):
        if self.F[0] != 1.0:
            raise ValueError("F_0 must be 1")
        if not all(math.isfinite(v) for v in self.F):
            raise ValueError(f"non-finite expansion term in {self.F}")


@dataclass(frozen=True)
class LogExpansion:
    """Coefficients of ``n^-1`` and ``n^-2`` in ``log(1 + F1/n + F2/n^2)``."""

    c1: float
    c2: float


def _cgf_poly(kappa: SymTensor) -> Poly:
    return {a: v / mi.factorial(a) for a, v in kappa.items() if v != 0.0}


def _mul(p: Poly, q: Poly) -> Poly:
    out: dict = defaultdict(float)
    for a, u in p.items():
        for b, v in q.items():
            out[mi.add(a, b)] += u * v
    return dict(out)


def _axpy(out: dict, p: Poly, scale: float) -> None:
    for a, v in p.items():
        out[a] += scale * v


def _hermite_pair(poly: Poly, m: Metric) -> float:
    return math.fsum(c * hermite_number(a, m) for a, c in poly.items() if c != 0.0)


def _require(f: ExpFamily, order: int) -> None:
    if f.max_order < order:
        raise DerivativeOrderError(f"{f.name}: needs derivatives of order {order}, has {f.max_order}")


def _s1_poly(T: Sequence[Poly]) -> Poly:
    t3, t4 = T[3], T[4]
    out: dict = defaultdict(float)
    _axpy(out, t4, 1.0)
    _axpy(out, _mul(t3, t3), 0.5)
    return dict(out)


def _s2_poly(T: Sequence[Poly]) -> Poly:
    t3, t4, t5, t6 = T[3], T[4], T[5], T[6]
    t33 = _mul(t3, t3)
    out: dict = defaultdict(float)
    _axpy(out, t6, 1.0)
    _axpy(out, _mul(t3, t5), 1.0)
    _axpy(out, _mul(t4, t4), 0.5)
    _axpy(out, _mul(t33, t4), 0.5)
    _axpy(out, _mul(t33, t33), 1.0 / 24.0)
    return dict(out)


def _state(f: ExpFamily, theta, order: int) -> tuple[Metric, list[Poly]]:
    _require(f, order)
    kappas = cumulants(f, theta, order)
    m = fisher_metric(f, theta)
    polys: list[Poly] = [{}] + [_cgf_poly(k) for k in kappas]
    return m, polys


def f1(f: ExpFamily, theta) -> float:
    """First-order correction ``F_1(theta)`` in natural coordinates."""
    m, T = _state(f, theta, 4)
    return _hermite_pair(_s1_poly(T), m)


def f2(f: ExpFamily, theta) -> float:
    """Second-order correction ``F_2(theta)``; needs Hermite numbers up to rank 12.

    The summands grow with the conditioning of the metric while F_2 itself may
    stay constant, so the absolute rounding error is about machine epsilon times
    the largest summand.
    """
    m, T = _state(f, theta, 6)
    return _hermite_pair(_s2_poly(T), m)


def expansion_terms(f: ExpFamily, theta, order: int = 2) -> ExpansionTerms:
    if order not in (0, 1, 2):
        raise ValueError(f"expansion order must be 0, 1 or 2, got {order}")
    th = f.point(theta)
    F = [1.0]
    if order >= 1:
        m, T = _state(f, th, 4 if order == 1 else 6)
        F.append(_hermite_pair(_s1_poly(T), m))
        if order == 2:
            F.append(_hermite_pair(_s2_poly(T), m))
    return ExpansionTerms(tuple(float(x) for x in th), tuple(F), order)


def f1_tensor(f: ExpFamily, theta, method: str = "naive") -> float:
    """F_1 as the three ordered-index cumulant contractions (1/8, -1/8, -1/12)."""
    _require(f, 4)
    _, k3, k4 = cumulants(f, theta, 4)[1:]
    m = fisher_metric(f, theta)
    quartic = metric_power_contract(m, k4, None, PAIRING_QUARTIC, method)
    traces = metric_power_contract(m, k3, k3, PAIRING_CUBIC_TRACES, method)
    cross = metric_power_contract(m, k3, k3, PAIRING_CUBIC_CROSS, method)
    return quartic / 8 - traces / 8 - cross / 12


# ---------------------------------------------------------------------------
# Amari-Chentsov tensors via the natural-coordinate recurrence
#
# A term is (coef, factors); each factor is a tuple of slots and stands for the
# psi-derivative taken along those slots. T1 = 0, T2_{ab} = psi_{ab}.

Term = tuple[int, tuple[tuple[int, ...], ...]]


def _ac_terms(r: int) -> list[Term]:
    if r == 1:
        return []
    if r == 2:
        return [(1, ((0, 1),))]
    new = r - 1
    out: list[Term] = []
    for coef, factors in _ac_terms(r - 1):
        for pos in range(len(factors)):
            grown = factors[:pos] + (factors[pos] + (new,),) + factors[pos + 1:]
            out.append((coef, grown))
    for j in range(r - 1):
        keep = [s for s in range(r - 1) if s != j]
        for coef, factors in _ac_terms(r - 2):
            moved = tuple(tuple(keep[s] for s in fac) for fac in factors)
            out.append((coef, ((j, new),) + moved))
    return _collect(out)


def _collect(terms: list[Term]) -> list[Term]:
    acc: dict = defaultdict(int)
    for coef, factors in terms:
        key = tuple(sorted(tuple(sorted(fac)) for fac in factors))
        acc[key] += coef
    return [(c, k) for k, c in sorted(acc.items()) if c]


def amari_chentsov(f: ExpFamily, theta, r: int) -> SymTensor:
    """Rank-r Amari-Chentsov tensor in natural coordinates (r <= 4)."""
    if r < 1 or r > MAX_AC_RANK:
        raise ValueError(f"Amari-Chentsov rank must be in 1..{MAX_AC_RANK}, got {r}")
    _require(f, r)
    th = f.point(theta)
    d = f.dim
    terms = _ac_terms(r)
    cache: dict = {}

    def psi(alpha):
        v = cache.get(alpha)
        if v is None:
            v = cache[alpha] = float(f.psi_deriv(th, alpha))
        return v

    def component(alpha):
        idx = mi.to_indices(alpha)
        total = 0.0
        for coef, factors in terms:
            prod = float(coef)
            for fac in factors:
                prod *= psi(mi.from_indices([idx[s] for s in fac], d))
                if prod == 0.0:
                    break
            total += prod
        return total

    return SymTensor.from_function(d, r, component)


def f1_invariant(f: ExpFamily, theta, method: str = "multiindex") -> float:
    """F_1 from Amari-Chentsov tensors T3, T4 and the inverse metric."""
    m = fisher_metric(f, theta)
    t3 = amari_chentsov(f, theta, 3)
    t4 = amari_chentsov(f, theta, 4)
    d = f.dim
    quartic = metric_power_contract(m, t4, None, PAIRING_QUARTIC, method)
    traces = metric_power_contract(m, t3, t3, PAIRING_CUBIC_TRACES, method)
    cross = metric_power_contract(m, t3, t3, PAIRING_CUBIC_CROSS, method)
    return quartic / 8 - traces / 8 - cross / 12 - (d * d + 2 * d) / 8


def log_expansion(mean_f1: float, mean_f2: float) -> LogExpansion:
    if not (math.isfinite(mean_f1) and math.isfinite(mean_f2)):
        raise ValueError("log_expansion needs finite inputs")
    return LogExpansion(c1=mean_f1, c2=mean_f2 - mean_f1**2 / 2)


def spherical_f1_closed_form(d: int) -> float:
    return (1 - 3 * d * d) / (12 * (d - 1))


def random_interior_points(f: ExpFamily, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    """Random in-domain points for the catalog families (used by tests and validation)."""
    pts = []
    while len(pts) < count:
        th = rng.uniform(-2.0, 2.0, size=f.dim)
        if f.name == "exp1d":
            th = -rng.uniform(0.2, 3.0, size=1)
        elif f.name == "spherical":
            th[-1] = -rng.uniform(0.2, 2.0)
        if f.in_domain(th):
            pts.append(th)
    return pts
