import itertools

import numpy as np
import pytest

from oracles import dense_cumulant, f2_ordered
from parcomp import multiindex as mi
from parcomp.errors import DerivativeOrderError
from parcomp.expansion import (
    ExpansionTerms,
    amari_chentsov,
    expansion_terms,
    f1,
    f1_invariant,
    f1_tensor,
    f2,
    log_expansion,
    random_interior_points,
    spherical_f1_closed_form,
)
from parcomp.family import (
    ExpFamily,
    exponential_1d,
    fisher_metric,
    normal_known_var,
    poly_partition,
    spherical_normal,
)

# non-constant corrections: quadratic base plus cubic-to-sextic perturbations, SPD on the box
POLY = poly_partition(
    2,
    {(2, 0): 1.0, (0, 2): 1.0, (1, 1): 0.2, (3, 0): "1/6", (1, 2): "-1/10", (4, 0): "1/24",
     (2, 2): "1/12", (0, 5): "1/60", (3, 3): "1/90", (6, 0): "1/200"},
    box=[(-0.5, 0.5), (-0.5, 0.5)],
)


def _poly_points(count, seed=0):
    rng = np.random.default_rng(seed)
    return [rng.uniform(-0.4, 0.4, size=2) for _ in range(count)]


@pytest.mark.parametrize("theta", [-0.5, -1.0, -2.0, -7.0])
def test_exponential_constants(theta):
    f = exponential_1d()
    assert f1(f, [theta]) == pytest.approx(-1 / 12, abs=1e-12)
    assert f2(f, [theta]) == pytest.approx(1 / 288, abs=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_known_variance_vanishes(d):
    f = normal_known_var(d, 0.8)
    for th in random_interior_points(f, np.random.default_rng(d), 3):
        terms = expansion_terms(f, th)
        assert terms.F == (1.0, 0.0, 0.0)


@pytest.mark.parametrize("d", range(2, 7))
def test_spherical_f1(d):
    f = spherical_normal(d)
    want = spherical_f1_closed_form(d)
    for th in random_interior_points(f, np.random.default_rng(d), 2):
        assert f1(f, th) == pytest.approx(want, rel=1e-10)
    assert spherical_f1_closed_form(3) == pytest.approx(-13 / 12)


def test_spherical_f2_low_dimensions():
    assert f2(spherical_normal(2), [0.3, -0.7]) == pytest.approx(-23 / 288, abs=1e-10)
    assert f2(spherical_normal(3), [0.0, 0.0, -0.5]) == pytest.approx(25 / 288, abs=1e-10)
    # second log coefficient against the exact-formula n^-2 term -d(d+1)/(12(d-1))
    for d in (2, 3):
        th = np.zeros(d)
        th[-1] = -0.5
        terms = expansion_terms(spherical_normal(d), th)
        assert log_expansion(terms.F[1], terms.F[2]).c2 == pytest.approx(-d * (d + 1) / (12 * (d - 1)), abs=1e-10)


@pytest.mark.parametrize("theta", [[0.3, -0.7], [-0.5, -0.6]])
def test_f2_matches_ordered_sum_spherical(theta):
    f = spherical_normal(2)
    assert f2(f, theta) == pytest.approx(f2_ordered(f, theta), rel=1e-10)


@pytest.mark.parametrize("theta", _poly_points(2, seed=5))
def test_f2_matches_ordered_sum_poly(theta):
    assert f2(POLY, theta) == pytest.approx(f2_ordered(POLY, theta), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("theta", [[-0.8]])
def test_f2_matches_ordered_sum_exponential(theta):
    assert f2_ordered(exponential_1d(), theta) == pytest.approx(1 / 288, rel=1e-12)


def _f1_einsum(f, theta):
    g = dense_cumulant(f, theta, 2)
    gi = np.linalg.inv(g)
    k3, k4 = dense_cumulant(f, theta, 3), dense_cumulant(f, theta, 4)
    quartic = np.einsum("abcd,ab,cd->", k4, gi, gi)
    traces = np.einsum("abc,def,ab,cd,ef->", k3, k3, gi, gi, gi)
    cross = np.einsum("abc,def,ad,be,cf->", k3, k3, gi, gi, gi)
    return quartic / 8 - traces / 8 - cross / 12


@pytest.mark.parametrize("family, points", [
    (exponential_1d(), [[-0.4], [-3.0]]),
    (spherical_normal(3), [[0.2, -0.3, -0.6], [1.0, 0.5, -1.5]]),
    (POLY, _poly_points(3)),
])
def test_f1_routes_agree(family, points):
    for th in points:
        ref = _f1_einsum(family, th)
        assert f1(family, th) == pytest.approx(ref, rel=1e-10, abs=1e-13)
        assert f1_tensor(family, th, "naive") == pytest.approx(ref, rel=1e-10, abs=1e-13)
        assert f1_tensor(family, th, "multiindex") == pytest.approx(ref, rel=1e-10, abs=1e-13)


def _well_conditioned(family, pts):
    # spherical: keep |theta_i| <= |theta_d| so no summand dwarfs the result
    if family.name != "spherical":
        return pts
    return [np.append(np.clip(p[:-1], p[-1], -p[-1]), p[-1]) for p in pts]


@pytest.mark.parametrize("family", [exponential_1d(), spherical_normal(2), spherical_normal(4), normal_known_var(3)])
def test_catalog_corrections_are_constant(family):
    # justifies evaluating the catalog integrands once per region
    pts = _well_conditioned(family, random_interior_points(family, np.random.default_rng(99), 10))
    ref = expansion_terms(family, pts[0], 2 if family.dim <= 2 else 1).F
    for th in pts[1:]:
        got = expansion_terms(family, th, len(ref) - 1).F
        assert got == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_f2_rounding_tracks_summand_scale():
    # far from the centre the rank-12 summands reach ~1e9 while F2 stays -23/288
    f = spherical_normal(2)
    for th, bound in (([0.0, -0.5], 1e-12), ([-1.1, -0.4], 1e-8), ([2.0, -0.2], 1e-5)):
        assert abs(f2(f, th) + 23 / 288) < bound


def test_poly_corrections_vary():
    a, b = _poly_points(2)
    assert abs(f1(POLY, a) - f1(POLY, b)) > 1e-4


def test_amari_chentsov_examples():
    f = exponential_1d()
    assert amari_chentsov(f, [-1.0], 1).is_zero()
    assert amari_chentsov(f, [-1.0], 2)[(2,)] == pytest.approx(1.0)
    assert amari_chentsov(f, [-1.0], 3)[(3,)] == pytest.approx(2.0)
    assert amari_chentsov(f, [-1.0], 4)[(4,)] == pytest.approx(9.0)
    with pytest.raises(ValueError):
        amari_chentsov(f, [-1.0], 5)


@pytest.mark.parametrize("family, theta", [(spherical_normal(3), [0.4, -0.2, -0.9]), (POLY, [0.1, -0.3])])
def test_amari_chentsov_low_rank_closed_forms(family, theta):
    d = family.dim
    g = dense_cumulant(family, theta, 2)
    k3, k4 = dense_cumulant(family, theta, 3), dense_cumulant(family, theta, 4)
    t2, t3, t4 = (amari_chentsov(family, theta, r).to_dense() for r in (2, 3, 4))
    assert np.allclose(t2, g, rtol=1e-13)
    assert np.allclose(t3, k3, rtol=1e-13)
    want4 = k4 + np.einsum("ab,cd->abcd", g, g) + np.einsum("ac,bd->abcd", g, g) + np.einsum("ad,bc->abcd", g, g)
    assert np.allclose(t4, want4, rtol=1e-12)
    assert t4.shape == (d,) * 4


@pytest.mark.parametrize("family, points", [
    (exponential_1d(), None),
    (spherical_normal(2), None),
    (spherical_normal(4), None),
    (normal_known_var(2, 1.3), None),
    (POLY, _poly_points(5, seed=3)),
])
def test_invariant_form_matches(family, points):
    points = points or random_interior_points(family, np.random.default_rng(1), 5)
    for th in points:
        want = f1(family, th)
        for method in ("naive", "multiindex"):
            assert f1_invariant(family, th, method) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_log_expansion():
    le = log_expansion(-1 / 12, 1 / 288)
    assert le.c1 == pytest.approx(-1 / 12)
    assert le.c2 == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        log_expansion(float("nan"), 0.0)


def test_expansion_terms_contract():
    terms = expansion_terms(exponential_1d(), [-1.0], 1)
    assert terms.F[0] == 1.0 and terms.order == 1 and len(terms.F) == 2
    assert expansion_terms(exponential_1d(), [-1.0], 0).F == (1.0,)
    with pytest.raises(ValueError):
        expansion_terms(exponential_1d(), [-1.0], 3)
    with pytest.raises(ValueError):
        ExpansionTerms((0.0,), (2.0,), 0)
    with pytest.raises(ValueError):
        ExpansionTerms((0.0,), (1.0, float("inf")), 1)


def test_low_order_family_is_rejected():
    base = exponential_1d()
    short = ExpFamily("short", 1, base.psi_deriv, base.in_domain, max_order=4)
    assert f1(short, [-1.0]) == pytest.approx(-1 / 12)
    with pytest.raises(DerivativeOrderError):
        f2(short, [-1.0])


def test_metric_at_poly_points_is_spd():
    for th in _poly_points(10):
        fisher_metric(POLY, th)


def test_dense_cumulant_symmetry():
    k = dense_cumulant(POLY, [0.1, 0.2], 4)
    for perm in itertools.permutations(range(4)):
        assert np.array_equal(k, k.transpose(perm))
    assert mi.degree((2, 2)) == 4
