import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from imcopula import Clayton, Comonotone, Independence
from imcopula.errors import DimensionError, DomainError, EnumerationCapError
from imcopula.index_model import (
    IndexDistribution,
    index_partition,
    index_predicates,
    marginal_index_probabilities,
    ordered_classes,
    sample_index,
)


@st.composite
def index_laws(draw, max_d=4, max_k=3):
    d = draw(st.integers(1, max_d))
    K = draw(st.integers(1, max_k))
    vecs = list(itertools.product(range(1, K + 1), repeat=d))
    chosen = draw(st.lists(st.sampled_from(vecs), min_size=1, max_size=min(len(vecs), 8), unique=True))
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=len(chosen), max_size=len(chosen)))
    total = sum(weights)
    return IndexDistribution.from_table(d, K, [(v, w / total) for v, w in zip(chosen, weights)])


# -- construction ----------------------------------------------------------------------


def test_table_comonotone():
    dist = IndexDistribution.from_table(2, 2, {(1, 1): 0.5, (2, 2): 0.5})
    assert dist.vectors == ((1, 1), (2, 2))
    assert index_predicates(dist).comonotone


def test_comonotone_constructor():
    dist = IndexDistribution.comonotone([0.5, 0.5], 2)
    assert dict(dist.items()) == {(1, 1): 0.5, (2, 2): 0.5}


def test_bernoulli_independent_pair():
    dist = IndexDistribution.bernoulli_copula([(0.5, Independence(2))])
    assert dist.K == 2
    assert dict(dist.items()) == pytest.approx({v: 0.25 for v in itertools.product((1, 2), repeat=2)}, abs=1e-15)


def test_bernoulli_comonotone_coupling():
    dist = IndexDistribution.bernoulli_copula([(0.3, Comonotone(3))])
    assert dict(dist.items()) == pytest.approx({(1, 1, 1): 0.7, (2, 2, 2): 0.3}, abs=1e-15)


def test_bernoulli_sum_of_terms_raises_order():
    dist = IndexDistribution.bernoulli_copula([(0.5, Independence(2)), (0.5, Independence(2))])
    assert dist.K == 3
    # each coordinate is 1 + Bin(2, 1/2)
    np.testing.assert_allclose(dist.coordinate_pmf(1), [0.25, 0.5, 0.25], atol=1e-15)


def test_multinomial_shift_margins():
    q = [0.2, 0.5, 0.3]
    dist = IndexDistribution.multinomial_shift(3, 4, q)
    for j, qj in enumerate(q, start=1):
        np.testing.assert_allclose(dist.coordinate_pmf(j), stats.binom(3, qj).pmf(range(4)), atol=1e-14)
    # the counts always add up to K - 1
    assert all(sum(c - 1 for c in v) == 3 for v in dist.vectors)


def test_copula_quantile_margins_and_coupling():
    pmf = [0.2, 0.3, 0.5]
    dist = IndexDistribution.copula_quantile(Clayton(2.0, 2), pmf)
    np.testing.assert_allclose(dist.coordinate_pmf(1), pmf, atol=1e-14)
    np.testing.assert_allclose(dist.coordinate_pmf(2), pmf, atol=1e-14)
    # P(I <= (1,1)) is the coupling copula at the first cut
    assert dist.prob((1, 1)) == pytest.approx(float(Clayton(2.0, 2).cdf([0.2, 0.2])), abs=1e-14)


def test_copula_quantile_with_per_coordinate_pmfs():
    dist = IndexDistribution.copula_quantile(Independence(2), [[0.5, 0.5], [0.1, 0.2, 0.7]])
    assert dist.K == 3
    np.testing.assert_allclose(dist.coordinate_pmf(1), [0.5, 0.5, 0.0], atol=1e-15)
    assert dist.prob((2, 3)) == pytest.approx(0.35, abs=1e-15)


def test_uniform_law():
    dist = IndexDistribution.uniform(3, 2)
    assert len(dist) == 8
    assert all(p == 0.125 for p in dist.probs)


@pytest.mark.parametrize(
    "table, err",
    [
        ({(1, 1): 0.5, (2, 2): 0.4}, DomainError),
        ({(1, 3): 1.0}, DomainError),
        ({(1, 1, 1): 1.0}, DimensionError),
        ({(1, 1): 1.2, (2, 2): -0.2}, DomainError),
    ],
)
def test_table_rejects_bad_input(table, err):
    with pytest.raises(err):
        IndexDistribution.from_table(2, 2, table)


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError):
        IndexDistribution.uniform(11, 4, cap=2**20)


def test_pruning_and_renormalisation():
    dist = IndexDistribution.from_table(1, 2, {(1,): 1.0, (2,): 1e-17}, renormalize=True)
    assert dist.vectors == ((1,),)
    assert dist.probs == (1.0,)


# -- partitions and marginals ------------------------------------------------------------


def test_partition_worked_example():
    part = index_partition((3, 1, 2, 1), 5)
    assert part.sets == ((2, 4), (3,), (1,), (), ())
    assert part.sizes == (2, 1, 1, 0, 0)
    assert part.index_vector() == (3, 1, 2, 1)
    mat = part.matrix()
    assert mat.shape == (4, 5) and (mat.sum(axis=1) == 1).all()


def test_partition_constant_and_identity():
    assert index_partition((1, 1, 1), 3).sets == ((1, 2, 3), (), ())
    assert index_partition((1, 2), 2).sizes == (1, 1)


def test_partition_rejects_out_of_range():
    with pytest.raises(DomainError):
        index_partition((1, 4), 3)


def test_marginal_tables():
    como = IndexDistribution.comonotone([0.5, 0.5], 2)
    np.testing.assert_allclose(marginal_index_probabilities(como, (1, 2)), [[0.5, 0], [0, 0.5]])
    indep = IndexDistribution.bernoulli_copula([(0.5, Independence(2))])
    np.testing.assert_allclose(marginal_index_probabilities(indep, (1, 2)), np.full((2, 2), 0.25), atol=1e-15)
    four = IndexDistribution.from_table(4, 2, {(1, 1, 2, 2): 1 / 2, (1, 2, 1, 2): 1 / 3, (2, 2, 1, 1): 1 / 6})
    tab = marginal_index_probabilities(four, (1, 2))
    np.testing.assert_allclose(tab, [[1 / 2, 1 / 3], [0, 1 / 6]], atol=1e-15)


def test_marginal_rejects_empty_coords():
    with pytest.raises(DimensionError):
        marginal_index_probabilities(IndexDistribution.uniform(2, 2), ())


# -- sampling ------------------------------------------------------------------------------


def test_sample_index_edge_cases():
    dist = IndexDistribution.point_mass((1, 2), 2)
    assert sample_index(dist, 0, 0).shape == (0, 2)
    np.testing.assert_array_equal(sample_index(dist, 0, 5), np.tile([1, 2], (5, 1)))


def test_sample_index_frequency_and_determinism():
    dist = IndexDistribution.comonotone([0.5, 0.5], 2)
    n = 100_000
    a = sample_index(dist, 42, n)
    b = sample_index(dist, 42, n)
    np.testing.assert_array_equal(a, b)
    freq = np.mean(np.all(a == 1, axis=1))
    assert abs(freq - 0.5) <= 3 * math.sqrt(0.25 / n)


@settings(max_examples=15, deadline=None)
@given(index_laws(max_d=3, max_k=3))
def test_sample_index_chi_square(dist):
    n = 100_000
    draws = sample_index(dist, 7, n)
    lookup = {v: i for i, v in enumerate(dist.vectors)}
    counts = np.bincount([lookup[tuple(r)] for r in draws], minlength=len(dist))
    if len(dist) == 1:
        assert counts[0] == n
        return
    p = stats.chisquare(counts, n * dist.prob_array).pvalue
    assert p > 0.001


# -- predicates and ordered classes --------------------------------------------------------


def test_predicates_examples():
    p = index_predicates(IndexDistribution.from_table(2, 2, {(1, 1): 0.5, (2, 2): 0.5}))
    assert (p.comonotone, p.all_distinct, p.exchangeable_sufficient) == (True, False, True)
    p = index_predicates(IndexDistribution.from_table(2, 3, {(1, 2): 1 / 3, (2, 3): 1 / 3, (1, 3): 1 / 3}))
    assert p.all_distinct and not p.exchangeable_sufficient
    assert index_predicates(IndexDistribution.uniform(3, 2)).exchangeable_sufficient


def test_ordered_classes_examples():
    classes = ordered_classes(3, 2)
    assert [c.representative for c in classes] == [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)]
    assert [len(c.members) for c in classes] == [1, 3, 3, 1]
    assert [len(c.members) for c in ordered_classes(1, 3)] == [1, 1, 1]
    assert [len(c.members) for c in ordered_classes(2, 2)] == [1, 2, 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4))
def test_ordered_classes_partition_the_cube(d, K):
    classes = ordered_classes(d, K)
    assert len(classes) == math.comb(K + d - 1, d)
    members = [m for c in classes for m in c.members]
    assert len(members) == K**d == len(set(members))
    for c in classes:
        assert all(tuple(sorted(m)) == c.representative for m in c.members)


@settings(max_examples=60, deadline=None)
@given(index_laws())
def test_law_invariants(dist):
    assert math.fsum(dist.probs) == pytest.approx(1.0, abs=1e-12)
    for r in range(1, dist.d + 1):
        for coords in itertools.combinations(range(1, dist.d + 1), r):
            assert marginal_index_probabilities(dist, coords).sum() == pytest.approx(1.0, abs=1e-12)
    for vec, part in zip(dist.vectors, dist.partitions):
        assert part.index_vector() == vec
        assert sum(part.sizes) == dist.d
        for k, js in enumerate(part.sets, start=1):
            assert all(vec[j - 1] == k for j in js)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.5, 5.0))
def test_bernoulli_coupling_keeps_declared_margins(p1, p2, theta):
    dist = IndexDistribution.bernoulli_copula([([p1, p2], Clayton(theta, 2))])
    np.testing.assert_allclose(dist.coordinate_pmf(1), [1 - p1, p1], atol=1e-12)
    np.testing.assert_allclose(dist.coordinate_pmf(2), [1 - p2, p2], atol=1e-12)
