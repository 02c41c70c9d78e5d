"""Oracle suites behind the ``validate`` command.

Each suite returns a list of :class:`Check` rows; a suite passes when every
row does. All randomness is derived from the supplied seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import multiindex as mi
from .complexity import exact_comp_exponential, mc_validate_ac
from .expansion import amari_chentsov
from .family import exponential_1d, spherical_normal
from .hermite import hermite_number, hermite_rank4_explicit, hermite_rank6_explicit
from .tensors import Metric, random_spd

HERMITE_RTOL = 1e-10
EXP_ORACLE_RTOL = 1e-6
MC_SIGMAS = 3.0
MC_SAMPLES = 1_000_000


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    expected: float
    tolerance: float


def _close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(1.0, abs(b))


def hermite_suite(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for d in (1, 2, 3):
        m = Metric(random_spd(rng, d))
        for r, oracle in ((4, hermite_rank4_explicit), (6, hermite_rank6_explicit)):
            worst, ref = 0.0, 0.0
            for idx in itertools.product(range(d), repeat=r):
                got = hermite_number(mi.from_indices(idx, d), m)
                want = oracle(idx, m)
                err = abs(got - want) / max(1.0, abs(want))
                if err >= worst:
                    worst, ref = err, want
            out.append(Check("hermite", f"rank{r}_explicit_d{d}", worst <= HERMITE_RTOL, worst, 0.0, HERMITE_RTOL))
        odd = [hermite_number(a, m) for r in (1, 3, 5, 7) for a in mi.enumerate_indices(d, r)]
        out.append(Check("hermite", f"odd_exact_zero_d{d}", all(v == 0.0 for v in odd),
                         max(abs(v) for v in odd), 0.0, 0.0))
    c = float(rng.uniform(0.5, 2.0))
    m1 = Metric([[1.0 / c]])
    for k in range(1, 7):
        want = (-1) ** k * math.prod(range(1, 2 * k, 2)) * c**k
        got = hermite_number((2 * k,), m1)
        out.append(Check("hermite", f"d1_closed_form_k{k}", _close(got, want, HERMITE_RTOL), got, want, HERMITE_RTOL))
    return out


def ac_suite(seed: int = 42, samples: int = MC_SAMPLES) -> list[Check]:
    """Recurrence output for Exponential1D at theta=-1 vs Monte Carlo, ranks 2..4."""
    f = exponential_1d()
    theta = np.array([-1.0])
    out = []
    for r in (2, 3, 4):
        exact = amari_chentsov(f, theta, r)
        est = mc_validate_ac(f, theta, r, samples, seed + r)
        for alpha in mi.enumerate_indices(f.dim, r):
            want, got, se = exact[alpha], est.mean[alpha], est.stderr[alpha]
            out.append(Check("ac", f"exp1d_T{r}_{''.join(map(str, alpha))}",
                             abs(got - want) <= MC_SIGMAS * se, got, want, MC_SIGMAS * se))
    return out


def ac_suite_spherical(seed: int = 7, samples: int = 400_000) -> list[Check]:
    """Same check for the 2-d spherical normal at an off-centre point, ranks 2..3."""
    f = spherical_normal(2)
    theta = np.array([0.4, -0.8])
    out = []
    for r in (2, 3):
        exact = amari_chentsov(f, theta, r)
        est = mc_validate_ac(f, theta, r, samples, seed + r)
        for alpha in mi.enumerate_indices(f.dim, r):
            want, got, se = exact[alpha], est.mean[alpha], est.stderr[alpha]
            out.append(Check("ac", f"spherical2_T{r}_{''.join(map(str, alpha))}",
                             abs(got - want) <= MC_SIGMAS * se, got, want, MC_SIGMAS * se))
    return out


def _max_gamma_density(t: float, n: int) -> float:
    """``max_xi`` of the density of the mean of n Exp(rate xi) variables at t, found numerically."""

    def neg_log(log_rate):
        rate = math.exp(log_rate)
        return -(n * math.log(n * rate) + (n - 1) * math.log(t) - n * rate * t - math.lgamma(n))

    res = optimize.minimize_scalar(neg_log, bracket=(-math.log(t) - 1.0, -math.log(t) + 1.0),
                                   tol=1e-12)
    return math.exp(-res.fun)


def exponential_oracle_numeric(a: float, b: float, n: int) -> float:
    """``log int q_n(t, t) dt`` over the mean-parameter interval ``[1/b, 1/a]``, by quadrature."""
    val, _ = integrate.quad(lambda t: _max_gamma_density(t, n), 1.0 / b, 1.0 / a,
                            epsabs=0.0, epsrel=1e-11, limit=200)
    return math.log(val)


def exp_oracle_suite(a: float = 0.5, b: float = 3.0) -> list[Check]:
    out = []
    for n in (1, 2, 3):
        got = exact_comp_exponential(a, b, n)
        want = exponential_oracle_numeric(a, b, n)
        out.append(Check("exp-oracle", f"n{n}", _close(got, want, EXP_ORACLE_RTOL), got, want, EXP_ORACLE_RTOL))
    return out


SUITES = {
    "hermite": lambda seed: hermite_suite(seed),
    "ac": lambda seed: ac_suite(seed) + ac_suite_spherical(seed),
    "exp-oracle": lambda seed: exp_oracle_suite(),
}


def run_suite(name: str, seed: int = 42) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](seed)]
    try:
        return SUITES[name](seed)
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'") from None
