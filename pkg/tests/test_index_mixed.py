import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from imcopula import (
    Clayton,
    Comonotone,
    Countermonotone,
    GaussianSampleOnly,
    Gumbel,
    Independence,
    IndexDistribution,
    IndexMixedCopula,
    check_exchangeable,
    rectangle_mass,
)
from imcopula.errors import CapabilityError, DimensionError
from imcopula.index_mixed import cube_grid
from imcopula.verify import four_dim_example, half_half, ordering_example


def brute_cdf(m, u):
    """Sum over the support of products of block margins, written out longhand."""
    total = 0.0
    for vec, p in m.index.items():
        term = p
        for k, base in enumerate(m.bases, start=1):
            block = [j for j, i in enumerate(vec, start=1) if i == k]
            if not block:
                continue
            v = np.ones(m.dim)
            v[[j - 1 for j in block]] = [u[j - 1] for j in block]
            term *= base.cdf(v)
        total += term
    return total


def test_ordering_example_values():
    m = ordering_example()
    assert m.cdf([0.75, 0.75]) == pytest.approx(0.59375, abs=1e-12)
    assert m.cdf([0.75, 0.25]) == pytest.approx(0.15625, abs=1e-12)


def test_point_mass_index_recovers_base():
    c = Clayton(2.0, 3)
    m = IndexMixedCopula((c, Gumbel(2.0, 3)), IndexDistribution.point_mass((1, 1, 1), 2))
    pts = cube_grid(3, 6)
    np.testing.assert_allclose(m.cdf(pts), c.cdf(pts), atol=1e-15)


def test_all_distinct_is_independence():
    idx = IndexDistribution.from_table(2, 3, {(1, 2): 0.5, (3, 1): 0.5})
    m = IndexMixedCopula((Comonotone(2), Clayton(4.0, 2), Gumbel(3.0, 2)), idx)
    pts = cube_grid(2, 11)
    np.testing.assert_allclose(m.cdf(pts), pts.prod(axis=1), atol=1e-15)


def test_cdf_matches_longhand_sum():
    m = four_dim_example()
    m = IndexMixedCopula((m.bases[0], Clayton(1.0, 4)), m.index)
    for u in np.random.default_rng(0).random((10, 4)):
        assert m.cdf(u) == pytest.approx(brute_cdf(m, u), abs=1e-14)


def test_cdf_needs_only_the_blocks_that_occur():
    # the Gaussian base is only ever used on a single coordinate
    idx = IndexDistribution.from_table(2, 2, {(1, 2): 0.5, (2, 1): 0.5})
    m = IndexMixedCopula((Clayton(2.0, 2), GaussianSampleOnly.equicorrelated(2, 0.5)), idx)
    assert m.cdf([0.3, 0.6]) == pytest.approx(0.18)
    with pytest.raises(CapabilityError):
        four_dim_example().cdf([0.5] * 4)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        IndexMixedCopula((Clayton(2.0, 2),), IndexDistribution.uniform(2, 2))
    with pytest.raises(DimensionError):
        IndexMixedCopula((Clayton(2.0, 3), Independence(2)), IndexDistribution.uniform(2, 2))


def test_density_is_mixture_of_block_densities():
    m = half_half(2, (Clayton(2.0, 2), Independence(2)))
    assert m.density([0.5, 0.5]) == pytest.approx(0.5 * 1.48100364934227811 + 0.5, abs=1e-13)
    with pytest.raises(CapabilityError):
        half_half(2).density([0.3, 0.3])


# -- samplers --------------------------------------------------------------------------


@pytest.mark.parametrize("algo", ["sample_sequential", "sample_vectorized", "sample_efficient"])
def test_samplers_reproducible_and_shaped(algo):
    m = four_dim_example()
    a = getattr(m, algo)(500, 3)
    b = getattr(m, algo)(500, 3)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (500, 4)
    assert getattr(m, algo)(0, 3).shape == (0, 4)
    assert ((a > 0) & (a < 1)).all()


@pytest.mark.parametrize("algo", ["sample_sequential", "sample_vectorized", "sample_efficient"])
def test_samplers_match_cdf(algo):
    m = IndexMixedCopula((Clayton(2.0, 3), Comonotone(3)), IndexDistribution.uniform(3, 2))
    n = 40_000
    x = getattr(m, algo)(n, 8)
    for u in np.random.default_rng(9).uniform(0.2, 0.9, size=(10, 3)):
        c = m.cdf(u)
        assert abs(np.mean(np.all(x <= u, axis=1)) - c) <= 4 * math.sqrt(c * (1 - c) / n)


def test_comonotone_index_copies_one_base_row():
    m = half_half(3)
    x = m.sample_efficient(2000, 1)
    equal = np.all(x == x[:, :1], axis=1)
    # rows from M are constant; rows from independence essentially never are
    assert abs(equal.mean() - 0.5) < 0.05


# -- margins -----------------------------------------------------------------------------


def test_bivariate_margin_weights():
    # pair (1,2) sees (1,1) w.p. 1/2, (2,2) w.p. 1/6 and (1,2) w.p. 1/3
    mix = four_dim_example().bivariate_margin(1, 2)
    assert mix.weights == pytest.approx((1 / 2, 1 / 6, 1 / 3))
    assert [c.name for c in mix.components] == ["gumbel", "gaussian", "independence"]
    mix = four_dim_example().bivariate_margin(1, 3)
    assert mix.weights == pytest.approx((1 / 3, 2 / 3))
    assert [c.name for c in mix.components] == ["gumbel", "independence"]


def test_bivariate_margin_matches_cdf():
    m = IndexMixedCopula((Clayton(2.0, 3), Gumbel(2.0, 3)), IndexDistribution.uniform(3, 2))
    pts = cube_grid(2, 21)
    for j1, j2 in itertools.combinations((1, 2, 3), 2):
        full = np.ones((len(pts), 3))
        full[:, [j1 - 1, j2 - 1]] = pts
        np.testing.assert_allclose(m.bivariate_margin(j1, j2).cdf(pts), m.cdf(full), atol=1e-12)


def test_trivariate_margin_components():
    idx = IndexDistribution.from_table(4, 2, {(1, 1, 2, 2): 0.5, (1, 2, 1, 2): 0.25, (1, 1, 1, 1): 0.25})
    m = IndexMixedCopula((Clayton(2.0, 4), Gumbel(2.0, 4)), idx)
    tri = m.trivariate_margin(1, 2, 3)
    weights = {label: w for w, label, _ in tri.components()}
    assert weights == pytest.approx({"pair12[1]": 0.5, "pair13[1]": 0.25, "triple[1]": 0.25})
    pts = cube_grid(3, 6)
    full = np.hstack([pts, np.ones((len(pts), 1))])
    np.testing.assert_allclose(tri.cdf(pts), m.cdf(full), atol=1e-13)


def test_general_margin_matches_cdf():
    m = four_dim_example()
    m = IndexMixedCopula((m.bases[0], Clayton(1.0, 4)), m.index)
    marg = m.general_margin((2, 4))
    for u in cube_grid(2, 6):
        full = np.ones(4)
        full[[1, 3]] = u
        assert marg.cdf(u) == pytest.approx(m.cdf(full), abs=1e-13)


# -- conditional, survival, exchangeability -----------------------------------------------------


def test_conditional_pair_finite_difference():
    m = IndexMixedCopula((Clayton(2.0, 3), Gumbel(2.0, 3)), IndexDistribution.uniform(3, 2))
    h = 1e-6
    for u1, u2 in itertools.product((0.2, 0.5, 0.8), repeat=2):
        full = lambda a: [a, 1.0, u2]
        fd = (m.cdf(full(u1 + h)) - m.cdf(full(u1 - h))) / (2 * h)
        assert m.conditional_pair(3, 1, u2, u1) == pytest.approx(fd, abs=1e-5)
    with pytest.raises(DimensionError):
        m.conditional_pair(1, 3, 0.5, 0.5)


def test_survival_of_pi_m_is_itself():
    m = IndexMixedCopula((Independence(3), Comonotone(3)), IndexDistribution.uniform(3, 2))
    pts = cube_grid(3, 11)
    np.testing.assert_allclose(m.survival().cdf(pts), m.cdf(pts), atol=1e-12)
    assert m.radially_symmetric


def test_exchangeability_witness():
    good = IndexMixedCopula((Gumbel(2.0, 3), Clayton(2.0, 3)), IndexDistribution.uniform(3, 2))
    assert check_exchangeable(good).invariant
    bad = IndexMixedCopula(good.bases, IndexDistribution.from_table(3, 2, {(1, 1, 2): 0.5, (2, 2, 2): 0.5}))
    rep = check_exchangeable(bad)
    assert not rep.invariant and rep.witness is not None
    pt, perm = rep.witness
    assert abs(bad.cdf(pt) - bad.cdf([pt[p - 1] for p in perm])) > 1e-12


def test_comonotone_decomposition():
    m = half_half(2, (Clayton(2.0, 2), Independence(2)))
    assert [(p, c.name) for p, c in m.comonotone_decomposition()] == [(0.5, "clayton"), (0.5, "independence")]
    assert ordering_example().comonotone_decomposition() is None


# -- properties -----------------------------------------------------------------------------


BASES = [lambda d: Clayton(2.0, d), lambda d: Gumbel(1.5, d), Comonotone, Independence]


@st.composite
def models(draw):
    d = draw(st.integers(2, 3))
    K = draw(st.integers(1, 3))
    bases = tuple(draw(st.sampled_from(BASES))(d) for _ in range(K))
    vecs = list(itertools.product(range(1, K + 1), repeat=d))
    chosen = draw(st.lists(st.sampled_from(vecs), min_size=1, max_size=5, unique=True))
    w = draw(st.lists(st.floats(0.1, 1.0), min_size=len(chosen), max_size=len(chosen)))
    return IndexMixedCopula(bases, IndexDistribution.from_table(d, K, [(v, x / sum(w)) for v, x in zip(chosen, w)]))


@settings(max_examples=40, deadline=None)
@given(models(), st.data())
def test_random_models_are_copulas(m, data):
    d = m.dim
    u = np.array(data.draw(st.lists(st.floats(0, 1), min_size=d, max_size=d)))
    v = np.array(data.draw(st.lists(st.floats(0, 1), min_size=d, max_size=d)))
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    assert rectangle_mass(m, lo, hi) >= -1e-12
    for j in range(d):
        z = u.copy()
        z[j] = 0
        assert m.cdf(z) == 0
        one = np.ones(d)
        one[j] = u[j]
        assert m.cdf(one) == pytest.approx(u[j], abs=1e-12)
    assert m.cdf(u) == pytest.approx(brute_cdf(m, u), abs=1e-13)


@settings(max_examples=10, deadline=None)
@given(models())
def test_random_models_sample_uniform_margins(m):
    x = m.sample_efficient(20_000, 4)
    crit = stats.kstwo(20_000).isf(0.001)
    for j in range(m.dim):
        assert stats.kstest(x[:, j], "uniform").statistic < crit


def test_countermonotone_base_only_in_two_dims():
    m = ordering_example()
    assert m.bases[1] == Countermonotone()
    assert m.tail_coeffs() == pytest.approx((0.25, 0.25))
