import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from imcopula import (
    EFGM,
    Clayton,
    Comonotone,
    Countermonotone,
    FiniteMixture,
    GaussianSampleOnly,
    Gumbel,
    Independence,
    ProductCopula,
    SurvivalCopula,
    rectangle_mass,
)
from imcopula.base_copulas import SIEVE_CAP
from imcopula.dependence import kendall_with_sigma
from imcopula.efgm import EfgmParameters
from imcopula.errors import CapabilityError, DimensionError, DomainError, EnumerationCapError

# oracles evaluated with mpmath at 30 digits from the textbook formulas
CLAYTON2_DENSITY_HALF = 1.48100364934227811479973826443
GUMBEL2_CDF_03_06 = 0.270398549404881320570904551746
GUMBEL2_DENSITY_03_06 = 0.953121497960935313487542491771
CLAYTON2_COND_HALF = 0.431959397724831116816590327125
CLAYTON2_3D_AT_456 = 0.301131367937097357279087040647


def fleet():
    return [
        Independence(2),
        Independence(3),
        Comonotone(3),
        Countermonotone(),
        Clayton(2.0, 2),
        Clayton(0.7, 3),
        Gumbel(2.0, 2),
        Gumbel(1.4, 3),
        EFGM.bivariate(0.8),
        EFGM(EfgmParameters.make(3, {"1,2": 0.3, "1,3": -0.2, "2,3": 0.4, "1,2,3": 0.1})),
        FiniteMixture.of([(0.3, Clayton(2.0, 2)), (0.7, Countermonotone())]),
        SurvivalCopula(Clayton(1.5, 3)),
    ]


# -- cdf --------------------------------------------------------------------------------


def test_cdf_worked_values():
    assert Independence(2).cdf([0.3, 0.5]) == pytest.approx(0.15, abs=1e-15)
    assert Comonotone(3).cdf([0.3, 0.5, 0.9]) == 0.3
    assert Clayton(2.0, 2).cdf([0.5, 0.5]) == pytest.approx(1 / math.sqrt(7), abs=1e-15)
    assert Clayton(2.0, 3).cdf([0.4, 0.5, 0.6]) == pytest.approx(CLAYTON2_3D_AT_456, abs=1e-15)
    assert Gumbel(2.0, 2).cdf([0.3, 0.6]) == pytest.approx(GUMBEL2_CDF_03_06, abs=1e-15)
    assert Countermonotone().cdf([0.7, 0.6]) == pytest.approx(0.3, abs=1e-15)


def test_cdf_vectorised_shapes():
    pts = np.random.default_rng(0).random((5, 3, 2))
    out = Clayton(2.0, 2).cdf(pts)
    assert out.shape == (5, 3)
    assert isinstance(Clayton(2.0, 2).cdf([0.2, 0.3]), float)


def test_cdf_rejects_points_outside_cube():
    with pytest.raises(DomainError):
        Independence(2).cdf([1.1, 0.5])
    with pytest.raises(DimensionError):
        Independence(2).cdf([0.1, 0.2, 0.3])


def test_gaussian_has_no_cdf_in_two_or_more_coordinates():
    g = GaussianSampleOnly.equicorrelated(3, 0.5)
    assert not g.capability.has_cdf
    with pytest.raises(CapabilityError):
        g.cdf([0.5, 0.5, 0.5])
    # with at most one coordinate below one it is just that coordinate
    assert g.cdf([1.0, 0.3, 1.0]) == pytest.approx(0.3)
    assert g.cdf([0.0, 0.3, 0.7]) == 0.0


# -- density ----------------------------------------------------------------------------


def test_density_worked_values():
    assert Independence(2).density([0.2, 0.9]) == 1.0
    assert EFGM.bivariate(1.0).density([0.5, 0.5]) == pytest.approx(1.0)
    assert Clayton(2.0, 2).density([0.5, 0.5]) == pytest.approx(CLAYTON2_DENSITY_HALF, rel=1e-13)
    assert Gumbel(2.0, 2).density([0.3, 0.6]) == pytest.approx(GUMBEL2_DENSITY_03_06, rel=1e-12)


def test_density_capabilities():
    with pytest.raises(CapabilityError):
        Comonotone(2).density([0.3, 0.4])
    with pytest.raises(DomainError):
        Clayton(2.0, 2).density([0.0, 0.4])


@pytest.mark.parametrize("cop", [Clayton(2.0, 2), Gumbel(2.0, 2), EFGM.bivariate(-0.6), Clayton(1.0, 3)])
def test_density_finite_difference(cop):
    h = 1e-4
    rng = np.random.default_rng(3)
    for u in rng.uniform(0.15, 0.85, size=(6, cop.dim)):
        fd = 0.0
        for signs in itertools.product((-1, 1), repeat=cop.dim):
            fd += np.prod(signs) * cop.cdf(u + h * np.array(signs))
        fd /= (2 * h) ** cop.dim
        assert fd == pytest.approx(cop.density(u), abs=1e-5)


@pytest.mark.parametrize("cop", [Clayton(2.0, 2), Gumbel(1.7, 2), EFGM.bivariate(0.9)])
def test_density_integrates_to_cdf(cop):
    nodes, weights = np.polynomial.legendre.leggauss(300)
    for a, b in itertools.product((0.25, 0.5, 0.75, 1.0), repeat=2):
        x = (nodes + 1) * a / 2
        y = (nodes + 1) * b / 2
        grid = np.stack(np.meshgrid(x, y, indexing="ij"), axis=-1)
        val = a * b / 4 * weights @ cop.density(grid) @ weights
        assert val == pytest.approx(cop.cdf([a, b]), abs=1e-4)


# -- sampling ---------------------------------------------------------------------------


def test_sample_special_structure():
    rng = np.random.default_rng(1)
    m = Comonotone(4).sample(3, rng)
    assert np.all(m == m[:, :1])
    w = Countermonotone().sample(50, rng)
    np.testing.assert_allclose(w.sum(axis=1), 1.0)
    assert Clayton(2.0, 3).sample(0, rng).shape == (0, 3)


@pytest.mark.parametrize("cop", [Clayton(2.0, 2), Gumbel(2.0, 2)])
def test_sample_kendall_tau(cop):
    x = cop.sample(100_000, 11)
    tau, sigma = kendall_with_sigma(x[:, 0], x[:, 1])
    assert abs(tau - 0.5) <= 3 * sigma


@pytest.mark.parametrize("cop", fleet() + [GaussianSampleOnly.equicorrelated(3, 0.6)], ids=lambda c: c.name)
def test_sample_margins_uniform(cop):
    x = cop.sample(100_000, 5)
    crit = stats.kstwo(100_000).isf(0.001)
    for j in range(cop.dim):
        assert stats.kstest(x[:, j], "uniform").statistic < crit


def test_sample_matches_cdf():
    cop = Gumbel(1.5, 3)
    x = cop.sample(100_000, 9)
    for u in np.random.default_rng(2).uniform(0.1, 0.95, size=(20, 3)):
        c = cop.cdf(u)
        emp = np.mean(np.all(x <= u, axis=1))
        assert abs(emp - c) <= 3 * math.sqrt(c * (1 - c) / 100_000) + 1e-9


# -- margins, survival, diagonal ----------------------------------------------------------


def test_margins_closed_form():
    assert Clayton(2.0, 4).margin((2, 4)) == Clayton(2.0, 2)
    assert Gumbel(3.0, 3).margin((1, 3)) == Gumbel(3.0, 2)
    one = Clayton(2.0, 3).margin((2,))
    assert one.cdf([0.37]) == pytest.approx(0.37)
    efgm = EFGM(EfgmParameters.make(3, {"1,2": 0.5}))
    assert efgm.margin((1, 2)).params == EfgmParameters.bivariate(0.5)
    g = GaussianSampleOnly.from_matrix([[1, 0.2, 0.3], [0.2, 1, 0.4], [0.3, 0.4, 1]])
    np.testing.assert_allclose(g.margin((1, 3)).matrix, [[1, 0.3], [0.3, 1]])


def test_survival_values():
    grid = np.array(list(itertools.product(np.linspace(0, 1, 5), repeat=2)))
    c = Clayton(2.0, 2)
    np.testing.assert_allclose(c.survival().survival().cdf(grid), c.cdf(grid), atol=1e-12)
    assert c.survival().cdf([0.5, 0.5]) == pytest.approx(1 / math.sqrt(7), abs=1e-15)
    np.testing.assert_allclose(Independence(2).survival().cdf(grid), Independence(2).cdf(grid), atol=1e-15)
    efgm = EFGM(EfgmParameters.make(3, {"1,2": 0.3, "1,2,3": 0.2}))
    grid3 = np.array(list(itertools.product(np.linspace(0, 1, 5), repeat=3)))
    np.testing.assert_allclose(efgm.survival().cdf(grid3), SurvivalCopula(efgm).cdf(grid3), atol=1e-12)


def test_sieve_cap():
    with pytest.raises(EnumerationCapError):
        SurvivalCopula(Clayton(1.0, SIEVE_CAP + 1))


def test_diagonal_values():
    assert Independence(3).diagonal(0.5) == pytest.approx(0.125)
    assert Comonotone(2).diagonal(0.7) == 0.7
    assert Gumbel(2.0, 2).diagonal(0.5) == pytest.approx(0.5 ** math.sqrt(2), abs=1e-15)
    u = np.linspace(0, 1, 11)
    for cop in fleet():
        np.testing.assert_allclose(cop.diagonal(u), cop.cdf(np.repeat(u[:, None], cop.dim, axis=1)), atol=1e-13)


# -- conditionals and tails -----------------------------------------------------------------


def test_conditional_values():
    assert Independence(2).conditional_2d(0.3, 0.8) == pytest.approx(0.3)
    assert Comonotone(2).conditional_2d(0.3, 0.2) == 1.0
    assert Comonotone(2).conditional_2d(0.3, 0.4) == 0.0
    theta, u1, u2 = 0.7, 0.2, 0.6
    assert EFGM.bivariate(theta).conditional_2d(u2, u1) == pytest.approx(u2 * (1 + theta * (1 - 2 * u1) * (1 - u2)))
    assert Clayton(2.0, 2).conditional_2d(0.5, 0.5) == pytest.approx(CLAYTON2_COND_HALF, abs=1e-14)


@pytest.mark.parametrize(
    "cop",
    [Clayton(2.0, 2), Gumbel(2.5, 2), EFGM.bivariate(-0.4), SurvivalCopula(Clayton(3.0, 2)),
     FiniteMixture.of([(0.4, Gumbel(2.0, 2)), (0.6, Independence(2))])],
    ids=lambda c: c.name,
)
def test_conditional_finite_difference(cop):
    h = 1e-5
    for u1, u2 in itertools.product((0.1, 0.35, 0.6, 0.9), (0.05, 0.4, 0.8)):
        fd = (cop.cdf([u1 + h, u2]) - cop.cdf([u1 - h, u2])) / (2 * h)
        assert cop.conditional_2d(u2, u1) == pytest.approx(fd, abs=1e-5)


def test_tail_coefficients():
    assert Independence(2).tail_coeffs() == (0.0, 0.0)
    assert Comonotone(2).tail_coeffs() == (1.0, 1.0)
    assert Countermonotone().tail_coeffs() == (0.0, 0.0)
    assert EFGM.bivariate(1.0).tail_coeffs() == (0.0, 0.0)
    lo, up = Clayton(2.0, 2).tail_coeffs()
    assert (lo, up) == (pytest.approx(2**-0.5), 0.0)
    assert Gumbel(2.0, 2).tail_coeffs()[1] == pytest.approx(2 - 2**0.5)
    with pytest.raises(CapabilityError):
        GaussianSampleOnly.equicorrelated(2, 0.3).tail_coeffs()


@pytest.mark.parametrize("cop", [Clayton(2.0, 2), Clayton(0.5, 2), Gumbel(2.0, 2), Independence(2)])
def test_tail_numeric_limits(cop):
    lo, up = cop.tail_coeffs()
    # the lower limit can converge slowly, so go deep; the upper one loses digits near 1
    assert cop.diagonal(1e-14) / 1e-14 == pytest.approx(lo, abs=1e-3)
    u = 1e-6
    v = 1 - u
    assert (1 - 2 * v + cop.diagonal(v)) / u == pytest.approx(up, abs=1e-3)


# -- constructor validation ---------------------------------------------------------------------


def test_constructor_validation():
    with pytest.raises(DomainError):
        Clayton(-1.0, 2)
    with pytest.raises(DomainError):
        Gumbel(0.5, 2)
    with pytest.raises(DimensionError):
        Countermonotone(3)
    with pytest.raises(DomainError):
        FiniteMixture.of([(0.5, Independence(2)), (0.4, Comonotone(2))])
    with pytest.raises(DimensionError):
        FiniteMixture.of([(0.5, Independence(2)), (0.5, Comonotone(3))])
    with pytest.raises(DomainError):
        GaussianSampleOnly.from_matrix([[1, 0.9, -0.9], [0.9, 1, 0.9], [-0.9, 0.9, 1]])
    with pytest.raises(DomainError):
        EFGM.bivariate(1.5)


def test_tau_parameterisations():
    assert Clayton.from_tau(0.5).theta == pytest.approx(2.0)
    assert Gumbel.from_tau(0.5).theta == pytest.approx(2.0)
    assert GaussianSampleOnly.from_tau(0.5).matrix[0, 1] == pytest.approx(math.sin(math.pi / 4))


def test_product_copula_blocks():
    p = ProductCopula((((1, 3), Clayton(2.0, 2)), ((2,), Independence(1))))
    assert p.cdf([0.5, 0.4, 0.5]) == pytest.approx(0.4 / math.sqrt(7))
    assert rectangle_mass(p, [0.1, 0.1, 0.1], [0.6, 0.7, 0.8]) >= 0


# -- properties ------------------------------------------------------------------------------------


@pytest.mark.parametrize("cop", fleet(), ids=lambda c: c.name)
def test_copula_axioms(cop):
    rng = np.random.default_rng(4)
    d = cop.dim
    pts = rng.random((200, d))
    for j in range(d):
        z = pts.copy()
        z[:, j] = 0.0
        np.testing.assert_allclose(cop.cdf(z), 0.0, atol=1e-14)
        ones = np.ones((200, d))
        ones[:, j] = pts[:, j]
        np.testing.assert_allclose(cop.cdf(ones), pts[:, j], atol=1e-12)
    for _ in range(200):
        a, b = np.sort(rng.random((2, d)), axis=0)
        assert rectangle_mass(cop, a, b) >= -1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(["clayton", "gumbel", "efgm"]),
    st.floats(0.05, 6.0),
    st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2),
    st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2),
)
def test_random_boxes_have_nonnegative_mass(family, par, a, b):
    cop = {
        "clayton": lambda: Clayton(par, 2),
        "gumbel": lambda: Gumbel(1.0 + par, 2),
        "efgm": lambda: EFGM.bivariate(par / 3 - 1),
    }[family]()
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    assert rectangle_mass(cop, lo, hi) >= -1e-12
