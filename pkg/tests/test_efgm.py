import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imcopula import (
    EFGM,
    BernoulliVectorLaw,
    EfgmParameters,
    Independence,
    bernoulli_from_thetas,
    efgm_admissible,
    efgm_cdf,
    efgm_density,
    efgm_mixture_cdf,
    efgm_sample,
    spearman_rho_pair,
    thetas_from_bernoulli,
)
from imcopula.base_copulas import SurvivalCopula
from imcopula.dependence import kendall_with_sigma, spearman_with_sigma
from imcopula.efgm import efgm_concordance_range
from imcopula.errors import DomainError, EnumerationCapError
from imcopula.index_mixed import cube_grid
from imcopula.verify import half_half


@st.composite
def symmetric_laws(draw, max_d=4):
    """Symmetrise an arbitrary table by mixing it with its bit-flip; margins become 1/2."""
    d = draw(st.integers(2, max_d))
    cube = list(itertools.product((0, 1), repeat=d))
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=len(cube), max_size=len(cube))))
    if w.sum() == 0:
        w[0] = 1.0
    w = w / w.sum()
    table = {}
    for b, p in zip(cube, w):
        flip = tuple(1 - x for x in b)
        table[b] = table.get(b, 0.0) + p / 2
        table[flip] = table.get(flip, 0.0) + p / 2
    return BernoulliVectorLaw.from_table(d, table)


def test_independent_law_gives_independence():
    for d in (2, 3, 4):
        assert thetas_from_bernoulli(BernoulliVectorLaw.independent(d)).as_dict() == {}


def test_comonotone_laws():
    assert thetas_from_bernoulli(BernoulliVectorLaw.comonotone(2)).as_dict() == {(1, 2): 1.0}
    # odd subsets average (-1)^3 over two equally likely constant vectors, so vanish
    assert thetas_from_bernoulli(BernoulliVectorLaw.comonotone(3)).as_dict() == {(1, 2): 1.0, (1, 3): 1.0, (2, 3): 1.0}


def test_non_symmetric_law_rejected():
    law = BernoulliVectorLaw.from_table(2, {(0, 0): 0.7, (1, 1): 0.3})
    with pytest.raises(DomainError):
        thetas_from_bernoulli(law)
    with pytest.raises(DomainError):
        efgm_sample(law, 0, 10)


def test_cdf_and_density_values():
    p = EfgmParameters.bivariate(1.0)
    assert efgm_cdf(p, [0.5, 0.5])[0] == pytest.approx(0.3125, abs=1e-15)
    assert efgm_cdf(p, [0.37, 1.0])[0] == pytest.approx(0.37, abs=1e-15)
    assert efgm_density(p, [1e-12, 1e-12])[0] == pytest.approx(2.0, abs=1e-10)
    assert efgm_density(p, [1 - 1e-12, 1e-12])[0] == pytest.approx(0.0, abs=1e-10)
    zero = EfgmParameters.make(3)
    pts = cube_grid(3, 5)
    np.testing.assert_allclose(efgm_cdf(zero, pts), pts.prod(axis=1), atol=1e-15)
    np.testing.assert_allclose(efgm_density(zero, pts), 1.0)


def test_admissibility():
    assert efgm_admissible(EfgmParameters.bivariate(1.0)).admissible
    res = efgm_admissible(EfgmParameters.make(2, {"1,2": 1.5}, ))
    assert not res and res.witness == (1, -1) and res.minimum == pytest.approx(-0.5)
    with pytest.raises(DomainError):
        efgm_cdf(EfgmParameters.make(2, {"1,2": 1.5}), [0.5, 0.5])
    with pytest.raises(EnumerationCapError):
        efgm_admissible(EfgmParameters.make(4), cap=3)


@settings(max_examples=50, deadline=None)
@given(symmetric_laws())
def test_mixture_and_classical_forms_agree(law):
    params = thetas_from_bernoulli(law)
    assert efgm_admissible(params).admissible
    pts = cube_grid(law.d, 5)
    np.testing.assert_allclose(efgm_cdf(params, pts), efgm_mixture_cdf(law, pts), atol=1e-12)
    back = bernoulli_from_thetas(params)
    # dense comparison: either side may carry roundoff-sized mass on extra vectors
    got, want = dict(zip(back.vectors, back.probs)), dict(zip(law.vectors, law.probs))
    for v in itertools.product((0, 1), repeat=law.d):
        assert got.get(v, 0.0) == pytest.approx(want.get(v, 0.0), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(symmetric_laws(max_d=3))
def test_survival_flips_odd_orders(law):
    params = thetas_from_bernoulli(law)
    cop = EFGM(params)
    flipped = {s: (-1) ** len(s) * t for s, t in params.as_dict().items()}
    assert cop.survival().params.as_dict() == pytest.approx(flipped)
    pts = cube_grid(law.d, 6)
    np.testing.assert_allclose(cop.survival().cdf(pts), SurvivalCopula(cop).cdf(pts), atol=1e-10)


def test_sampler_matches_cdf_and_margins():
    law = BernoulliVectorLaw.from_table(3, {(0, 0, 1): 0.25, (1, 1, 0): 0.25, (0, 1, 1): 0.25, (1, 0, 0): 0.25})
    params = thetas_from_bernoulli(law)
    n = 100_000
    x = efgm_sample(law, 6, n)
    assert efgm_sample(law, 6, 0).shape == (0, 3)
    for u in np.random.default_rng(1).random((20, 3)):
        c = efgm_cdf(params, u)[0]
        assert abs(np.mean(np.all(x <= u, axis=1)) - c) <= 3 * np.sqrt(c * (1 - c) / n) + 1e-12
    np.testing.assert_allclose(x.mean(axis=0), 0.5, atol=0.005)


def test_sampled_concordance_at_the_extremes():
    x = efgm_sample(BernoulliVectorLaw.comonotone(2), 12, 100_000)
    rho, rho_se = spearman_with_sigma(x[:, 0], x[:, 1])
    tau, tau_se = kendall_with_sigma(x[:, 0], x[:, 1])
    assert abs(rho - 1 / 3) <= 3 * rho_se
    assert abs(tau - 2 / 9) <= 3 * tau_se
    y = efgm_sample(BernoulliVectorLaw.independent(2), 12, 100_000)
    rho, rho_se = spearman_with_sigma(y[:, 0], y[:, 1])
    assert abs(rho) <= 3 * rho_se


def test_concordance_range():
    rows = efgm_concordance_range()
    assert [r["theta"] for r in rows] == [-1.0, 0.0, 1.0]
    for r in rows:
        assert r["rho_s"] == pytest.approx(r["theta"] / 3, abs=1e-9)
        assert r["tau"] == pytest.approx(2 * r["theta"] / 9, abs=1e-9)
    qmc = efgm_concordance_range([1.0], method="qmc")[0]
    assert abs(qmc["rho_s"] - 1 / 3) <= 3 * qmc["rho_s_stderr"] + 1e-12
    assert abs(qmc["tau"] - 2 / 9) <= 3 * qmc["tau_stderr"] + 1e-12


def test_limited_concordance_compared_with_index_mixing():
    assert spearman_rho_pair(EFGM.bivariate(1.0)) < spearman_rho_pair(half_half(2))


def test_tail_independence():
    cop = EFGM.bivariate(1.0)
    assert cop.tail_coeffs() == (0.0, 0.0)
    u = 1e-6
    assert cop.diagonal(u) / u < 1e-4
    assert (1 - 2 * (1 - u) + cop.diagonal(1 - u)) / u < 1e-4


def test_coupled_law_is_symmetric():
    law = BernoulliVectorLaw.coupled(Independence(3))
    assert law.symmetric
    assert thetas_from_bernoulli(law).as_dict() == {}
