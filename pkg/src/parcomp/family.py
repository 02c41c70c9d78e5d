"""Natural exponential families described by their log-partition function psi.

Every family supplies exact derivatives ``d^alpha psi(theta)`` for a
multi-index ``alpha``; cumulants and the Fisher metric are read off from them.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import multiindex as mi
from .errors import DerivativeOrderError, DomainError
from .tensors import Metric, SymTensor

PsiDeriv = Callable[[np.ndarray, mi.MultiIndex], float]
Sampler = Callable[[np.random.Generator, np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class ExpFamily:
    """A natural exponential family ``exp(x . theta - psi(theta))``.

    ``constant_corrections`` marks families whose expansion terms are known
    not to depend on theta, so averages over a region need one evaluation.
    ``cramer_ok`` is ``None`` when Cramer's condition has not been established.
    """

    name: str
    dim: int
    psi_deriv: PsiDeriv
    in_domain: Callable[[np.ndarray], bool]
    max_order: int
    cramer_ok: bool | None = True
    sampler: Sampler | None = None
    constant_corrections: bool = False
    params: Mapping[str, object] = field(default_factory=dict)

    def point(self, theta) -> np.ndarray:
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        if th.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected a point of length {self.dim}, got shape {th.shape}")
        if not np.all(np.isfinite(th)) or not self.in_domain(th):
            raise DomainError(f"{self.name}: theta={th.tolist()} is outside the natural parameter space")
        return th

    def derivative(self, theta, alpha: mi.MultiIndex) -> float:
        th = self.point(theta)
        order = mi.degree(alpha)
        if order > self.max_order:
            raise DerivativeOrderError(f"{self.name}: order {order} exceeds max_order={self.max_order}")
        return float(self.psi_deriv(th, tuple(alpha)))

    def gradient(self, theta) -> np.ndarray:
        th = self.point(theta)
        return np.array([self.psi_deriv(th, mi.unit(self.dim, i)) for i in range(self.dim)])

    def hessian(self, theta) -> np.ndarray:
        th = self.point(theta)
        h = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(i, self.dim):
                h[i, j] = h[j, i] = self.psi_deriv(th, mi.add(mi.unit(self.dim, i), mi.unit(self.dim, j)))
        return h

    @property
    def cramer_label(self) -> str:
        return "unknown" if self.cramer_ok is None else str(self.cramer_ok).lower()


def cumulants(f: ExpFamily, theta, max_r: int) -> list[SymTensor]:
    """Cumulant tensors of ranks ``1..max_r``: ``kappa_alpha = d^alpha psi(theta)``."""
    th = f.point(theta)
    if max_r > f.max_order:
        raise DerivativeOrderError(f"{f.name}: order {max_r} exceeds max_order={f.max_order}")
    return [SymTensor.from_function(f.dim, r, lambda a: float(f.psi_deriv(th, a)))
            for r in range(1, max_r + 1)]


def cumulant(f: ExpFamily, theta, r: int) -> SymTensor:
    return cumulants(f, theta, r)[r - 1]


def fisher_metric(f: ExpFamily, theta) -> Metric:
    """Fisher metric in natural coordinates, the Hessian of psi."""
    return Metric(f.hessian(theta))


# ---------------------------------------------------------------------------
# catalog


def exponential_1d() -> ExpFamily:
    """Exponential distributions; ``psi = -log(-theta)`` on ``theta < 0``."""

    def deriv(th, alpha):
        (r,) = alpha
        t = th[0]
        if r == 0:
            return -math.log(-t)
        return (-1) ** r * math.factorial(r - 1) * t ** (-r)

    def sample(rng, th, size):
        return rng.exponential(scale=-1.0 / th[0], size=(size, 1))

    return ExpFamily("exp1d", 1, deriv, lambda th: th[0] < 0, max_order=mi.MAX_DEGREE,
                     sampler=sample, constant_corrections=True)


def spherical_normal(d: int) -> ExpFamily:
    """(d-1)-dimensional spherical normal with unknown mean and variance.

    Sufficient statistic ``(y, |y|^2)``; natural parameter ``(beta, -1/2) / sigma^2``;
    ``psi = ((1-d)/2) log(-2 theta_d) - |theta_{<d}|^2 / (4 theta_d)``.
    """
    if d < 2:
        raise ValueError("spherical normal needs d >= 2")
    k = d - 1

    def deriv(th, alpha):
        head, m = alpha[:k], alpha[k]
        u = th[k]
        head_deg = sum(head)
        # log term depends on theta_d only
        if head_deg == 0:
            log_part = (0.5 * (1 - d) * math.log(-2 * u) if m == 0
                        else 0.5 * (1 - d) * (-1) ** (m - 1) * math.factorial(m - 1) * u ** (-m))
        else:
            log_part = 0.0
        # d^head of sum theta_i^2
        if head_deg == 0:
            poly = float(th[:k] @ th[:k])
        elif head_deg == 1:
            poly = 2.0 * th[head.index(1)]
        elif head_deg == 2 and max(head) == 2:
            poly = 2.0
        else:
            poly = 0.0
        if poly == 0.0:
            return log_part
        inv_part = (-1) ** m * math.factorial(m) * u ** (-(m + 1))
        return log_part - 0.25 * poly * inv_part

    def sample(rng, th, size):
        var = -0.5 / th[k]
        beta = th[:k] * var
        y = beta + math.sqrt(var) * rng.standard_normal((size, k))
        return np.column_stack([y, np.einsum("ij,ij->i", y, y)])

    return ExpFamily("spherical", d, deriv, lambda th: th[k] < 0, max_order=mi.MAX_DEGREE,
                     sampler=sample, constant_corrections=True, params={"d": d})


def normal_known_var(d: int, sigma: float = 1.0) -> ExpFamily:
    """d-dimensional normal with known variance ``sigma^2 I``; ``psi = sigma^2 |theta|^2 / 2``."""
    if d < 1 or sigma <= 0:
        raise ValueError("need d >= 1 and sigma > 0")
    s2 = float(sigma) ** 2

    def deriv(th, alpha):
        r = sum(alpha)
        if r == 0:
            return 0.5 * s2 * float(th @ th)
        if r == 1:
            return s2 * th[alpha.index(1)]
        if r == 2 and max(alpha) == 2:
            return s2
        return 0.0

    def sample(rng, th, size):
        return s2 * th + math.sqrt(s2) * rng.standard_normal((size, d))

    return ExpFamily("normal-kv", d, deriv, lambda th: True, max_order=mi.MAX_DEGREE,
                     sampler=sample, constant_corrections=True, params={"d": d, "sigma": sigma})


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


def poly_partition(dim: int, terms: Mapping[Sequence[int], float | Fraction | str],
                   box: Sequence[Sequence[float]] | None = None, name: str = "poly") -> ExpFamily:
    """Family with a user-supplied polynomial log-partition ``sum_gamma c_gamma theta^gamma``.

    Derivatives are exact falling-factorial shifts. The domain is all of R^d,
    or the open ``box`` when given. Cramer's condition is not checked.
    """
    coefs: dict[mi.MultiIndex, float] = {}
    for gamma, c in terms.items():
        gamma = mi.as_multiindex(gamma)
        if len(gamma) != dim:
            raise ValueError(f"term {gamma} does not have length {dim}")
        coefs[gamma] = coefs.get(gamma, 0.0) + float(Fraction(c) if isinstance(c, str) else c)
    items = [(np.array(g), c) for g, c in coefs.items() if c != 0.0]
    lo = hi = None
    if box is not None:
        arr = np.asarray(box, dtype=float)
        if arr.shape != (dim, 2) or np.any(arr[:, 0] >= arr[:, 1]):
            raise ValueError(f"box must be {dim} pairs (lo, hi) with lo < hi")
        lo, hi = arr[:, 0], arr[:, 1]

    def deriv(th, alpha):
        a = np.array(alpha)
        total = 0.0
        for g, c in items:
            if np.any(g < a):
                continue
            scale = 1
            for gi, ai in zip(g, a):
                scale *= _falling(int(gi), int(ai))
            total += c * scale * float(np.prod(th ** (g - a)))
        return total

    def in_domain(th):
        return lo is None or bool(np.all((th > lo) & (th < hi)))

    return ExpFamily(name, dim, deriv, in_domain, max_order=mi.MAX_DEGREE, cramer_ok=None,
                     params={"terms": {g: c for g, c in coefs.items()}, "box": box})


def load_poly_partition(source: str | Path | Mapping) -> ExpFamily:
    """Load a polynomial family from JSON ``{"dim", "terms": [{"alpha", "coef"}], "box"?}``."""
    if isinstance(source, Mapping):
        doc = source
        name = "poly"
    else:
        path = Path(source)
        doc = json.loads(path.read_text())
        name = f"poly:{path.name}"
    try:
        dim = int(doc["dim"])
        terms: dict[tuple[int, ...], float | str] = {}
        for term in doc["terms"]:
            key = tuple(term["alpha"])
            terms[key] = terms.get(key, 0.0) + float(Fraction(str(term["coef"])))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed polynomial family document: {exc}") from None
    return poly_partition(dim, terms, doc.get("box"), name=name)


def default_point(f: ExpFamily) -> np.ndarray:
    """A convenient interior point for each catalog family."""
    if f.name == "exp1d":
        return np.array([-1.0])
    if f.name == "spherical":
        th = np.zeros(f.dim)
        th[-1] = -0.5
        return th
    box = f.params.get("box") if f.params else None
    if box is not None:
        return np.asarray(box, dtype=float).mean(axis=1)
    return np.zeros(f.dim)


def catalog(name: str, dim: int | None = None, sigma: float = 1.0) -> ExpFamily:
    if name == "exp1d":
        if dim not in (None, 1):
            raise ValueError("exp1d is one-dimensional")
        return exponential_1d()
    if name == "spherical":
        return spherical_normal(2 if dim is None else dim)
    if name == "normal-kv":
        return normal_known_var(1 if dim is None else dim, sigma)
    raise ValueError(f"unknown catalog family {name!r}")


CATALOG_NAMES = ("exp1d", "spherical", "normal-kv")
