"""Distribution of the random index vector and its combinatorial companions.

Index vectors are 1-based: every entry lies in ``1..K``.  A law is always held
as an explicit finite table, so exact enumeration over the support is possible.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import DimensionError, DomainError, EnumerationCapError

ENUMERATION_CAP = 2**20
NORMALIZATION_TOL = 1e-12
PRUNE_BELOW = 1e-15


@dataclass(frozen=True)
class IndexPartition:
    """Sets ``J_k = {j : i_j = k}`` (1-based) and their sizes."""

    sets: tuple[tuple[int, ...], ...]
    sizes: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.sets)

    def index_vector(self) -> tuple[int, ...]:
        d = sum(self.sizes)
        out = [0] * d
        for k, block in enumerate(self.sets, start=1):
            for j in block:
                out[j - 1] = k
        return tuple(out)

    def matrix(self) -> np.ndarray:
        """Column-indicator view: row j carries a single 1 in column i_j."""
        d = sum(self.sizes)
        mat = np.zeros((d, self.K), dtype=int)
        for k, block in enumerate(self.sets):
            for j in block:
                mat[j - 1, k] = 1
        return mat


@dataclass(frozen=True)
class OrderedClass:
    representative: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class IndexPredicates:
    comonotone: bool
    all_distinct: bool
    exchangeable_sufficient: bool


def index_partition(i: Sequence[int], K: int) -> IndexPartition:
    vec = tuple(int(v) for v in i)
    if K < 1:
        raise DomainError(f"K must be positive, got {K}")
    for pos, v in enumerate(vec, start=1):
        if not 1 <= v <= K:
            raise DomainError(f"entry {pos} of index vector is {v}, outside 1..{K}")
    sets = tuple(tuple(j for j, v in enumerate(vec, start=1) if v == k) for k in range(1, K + 1))
    return IndexPartition(sets=sets, sizes=tuple(len(s) for s in sets))


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise EnumerationCapError(f"{what} needs {count} entries, above the cap of {cap}")


@dataclass(frozen=True)
class IndexDistribution:
    """Finite law of an index vector in ``{1..K}^d``.

    Use :meth:`from_table` or one of the named constructors; they validate,
    prune masses below 1e-15 and store the support in lexicographic order.
    """

    d: int
    K: int
    vectors: tuple[tuple[int, ...], ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.d < 1 or self.K < 1:
            raise DomainError("d and K must be positive")
        if len(self.vectors) != len(self.probs) or not self.vectors:
            raise DomainError("support must be non-empty and match the probability list")
        if len(set(self.vectors)) != len(self.vectors):
            raise DomainError("index vectors in the support must be distinct")
        for vec in self.vectors:
            if len(vec) != self.d:
                raise DimensionError(f"index vector {vec} does not have length {self.d}")
            if min(vec) < 1 or max(vec) > self.K:
                raise DomainError(f"index vector {vec} has entries outside 1..{self.K}")
        if min(self.probs) <= 0.0:
            raise DomainError("support probabilities must be positive")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")

    # construction -----------------------------------------------------------

    @classmethod
    def from_table(
        cls,
        d: int,
        K: int,
        table: Mapping[Sequence[int], float] | Iterable[tuple[Sequence[int], float]],
        *,
        cap: int = ENUMERATION_CAP,
        renormalize: bool = False,
    ) -> "IndexDistribution":
        items = table.items() if isinstance(table, Mapping) else table
        merged: dict[tuple[int, ...], float] = {}
        for vec, p in items:
            key = tuple(int(v) for v in vec)
            p = float(p)
            if not (0.0 <= p <= 1.0 + NORMALIZATION_TOL) or math.isnan(p):
                raise DomainError(f"probability {p!r} for {key} outside [0, 1]")
            merged[key] = merged.get(key, 0.0) + p
        _check_cap(len(merged), cap, "index support")
        total = math.fsum(merged.values())
        if not renormalize and abs(total - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        kept = {k: v for k, v in merged.items() if v >= PRUNE_BELOW}
        if not kept:
            raise DomainError("no support point carries positive mass")
        norm = math.fsum(kept.values())
        keys = sorted(kept)
        return cls(d=d, K=K, vectors=tuple(keys), probs=tuple(kept[k] / norm for k in keys))

    @classmethod
    def from_cells(cls, masses: np.ndarray, *, cap: int = ENUMERATION_CAP) -> "IndexDistribution":
        """Law whose probability of ``(i_1..i_d)`` is ``masses[i_1-1, ..., i_d-1]``."""
        masses = np.asarray(masses, dtype=float)
        K = max(masses.shape)
        if masses.min() < -1e-12:
            raise DomainError(f"negative cell mass {masses.min()!r}")
        nz = np.argwhere(masses >= PRUNE_BELOW)
        _check_cap(len(nz), cap, "index support")
        table = [(tuple(int(x) + 1 for x in idx), float(masses[tuple(idx)])) for idx in nz]
        return cls.from_table(masses.ndim, K, table, cap=cap, renormalize=True)

    @classmethod
    def point_mass(cls, vector: Sequence[int], K: int) -> "IndexDistribution":
        return cls.from_table(len(vector), K, [(vector, 1.0)])

    @classmethod
    def comonotone(cls, weights: Sequence[float], d: int) -> "IndexDistribution":
        w = [float(x) for x in weights]
        if any(x < 0 for x in w):
            raise DomainError("comonotone weights must be nonnegative")
        return cls.from_table(d, len(w), [((k,) * d, p) for k, p in enumerate(w, start=1)])

    @classmethod
    def uniform(cls, d: int, K: int, *, cap: int = ENUMERATION_CAP) -> "IndexDistribution":
        _check_cap(K**d, cap, "uniform index law")
        p = 1.0 / K**d
        return cls.from_table(d, K, [(v, p) for v in itertools.product(range(1, K + 1), repeat=d)])

    @classmethod
    def copula_quantile(
        cls,
        copula: Any,
        pmfs: Sequence[float] | Sequence[Sequence[float]],
        *,
        cap: int = ENUMERATION_CAP,
    ) -> "IndexDistribution":
        """``I_j = F_j^{-1}(V_j)`` with ``V ~ copula`` and pmf ``F_j`` on ``1..K``.

        Cell probabilities are rectangle masses of the coupling copula, obtained
        by evaluating it on the grid of cumulative marginal probabilities and
        differencing along every axis.
        """
        d = copula.dim
        arr = [np.asarray(p, dtype=float) for p in pmfs]
        if arr and arr[0].ndim == 0:
            arr = [np.asarray(pmfs, dtype=float)] * d
        if len(arr) != d:
            raise DimensionError(f"need {d} marginal pmfs, got {len(arr)}")
        K = max(len(p) for p in arr)
        cuts = []
        for j, p in enumerate(arr, start=1):
            if p.min() < 0 or abs(p.sum() - 1.0) > NORMALIZATION_TOL:
                raise DomainError(f"marginal pmf of coordinate {j} is not a probability vector")
            padded = np.zeros(K)
            padded[: len(p)] = p
            c = np.concatenate([[0.0], np.cumsum(padded)])
            c[-1] = 1.0
            cuts.append(np.clip(c, 0.0, 1.0))
        _check_cap((K + 1) ** d, cap, "copula grid")
        return cls.from_cells(rectangle_masses(copula, cuts), cap=cap)

    @classmethod
    def bernoulli_copula(
        cls,
        terms: Sequence[tuple[Sequence[float] | float, Any]],
        *,
        cap: int = ENUMERATION_CAP,
    ) -> "IndexDistribution":
        """``I = 1 + B_1 + ... + B_m`` with independent Bernoulli vectors.

        Each term is ``(p, copula)``: ``B`` has success probabilities ``p`` and
        is coupled by the copula via ``B_j = 1{V_j > 1 - p_j}``.  The order is
        ``K = m + 1``.
        """
        if not terms:
            raise DomainError("need at least one Bernoulli term")
        total: np.ndarray | None = None
        for p, cop in terms:
            d = cop.dim
            pv = np.broadcast_to(np.asarray(p, dtype=float), (d,))
            if pv.min() < 0 or pv.max() > 1:
                raise DomainError("Bernoulli probabilities must lie in [0, 1]")
            masses = rectangle_masses(cop, [np.array([0.0, 1.0 - q, 1.0]) for q in pv])
            if total is None:
                total = masses
            else:
                if total.ndim != d:
                    raise DimensionError("all Bernoulli terms must share the dimension")
                _check_cap((total.shape[0] + 1) ** d, cap, "Bernoulli sum")
                total = _convolve_cells(total, masses)
        return cls.from_cells(total, cap=cap)

    @classmethod
    def multinomial_shift(
        cls, d: int, K: int, q: Sequence[float], *, cap: int = ENUMERATION_CAP
    ) -> "IndexDistribution":
        """``I = 1 + B`` with ``B ~ Multinomial(K - 1, q)`` over ``d`` cells."""
        qv = np.asarray(q, dtype=float)
        if qv.shape != (d,) or qv.min() < 0 or abs(qv.sum() - 1.0) > NORMALIZATION_TOL:
            raise DomainError("q must be a probability vector of length d")
        trials = K - 1
        _check_cap(math.comb(trials + d - 1, d - 1), cap, "multinomial support")
        law = stats.multinomial(trials, qv)
        table = []
        for counts in _compositions(trials, d):
            p = float(law.pmf(counts))
            table.append((tuple(c + 1 for c in counts), p))
        return cls.from_table(d, K, table, cap=cap, renormalize=True)

    # queries ----------------------------------------------------------------

    @cached_property
    def vector_array(self) -> np.ndarray:
        arr = np.array(self.vectors, dtype=int)
        arr.flags.writeable = False
        return arr

    @cached_property
    def prob_array(self) -> np.ndarray:
        arr = np.array(self.probs, dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def partitions(self) -> tuple[IndexPartition, ...]:
        return tuple(index_partition(v, self.K) for v in self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def items(self) -> Iterable[tuple[tuple[int, ...], float]]:
        return zip(self.vectors, self.probs)

    def prob(self, vector: Sequence[int]) -> float:
        key = tuple(int(v) for v in vector)
        try:
            return self.probs[self.vectors.index(key)]
        except ValueError:
            return 0.0

    def marginal(self, coords: Sequence[int]) -> "IndexDistribution":
        """Law of ``(I_j)_{j in coords}`` as an index distribution of the same order."""
        cs = _check_coords(coords, self.d)
        merged: dict[tuple[int, ...], float] = {}
        for vec, p in self.items():
            key = tuple(vec[c - 1] for c in cs)
            merged[key] = merged.get(key, 0.0) + p
        return IndexDistribution.from_table(len(cs), self.K, merged.items(), renormalize=True)

    def coordinate_pmf(self, j: int) -> np.ndarray:
        """``p_{j,k}`` for ``k = 1..K`` as an array."""
        return marginal_index_probabilities(self, (j,))


def _check_coords(coords: Sequence[int], d: int) -> tuple[int, ...]:
    cs = tuple(int(c) for c in coords)
    if not cs:
        raise DimensionError("coordinate list must be non-empty")
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise DimensionError(f"coordinates {cs} must be strictly increasing")
    if cs[0] < 1 or cs[-1] > d:
        raise DimensionError(f"coordinates {cs} outside 1..{d}")
    return cs


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    # stars and bars
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def _convolve_cells(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cell law of the coordinatewise sum of two independent index vectors."""
    shape = tuple(x + y - 1 for x, y in zip(a.shape, b.shape))
    out = np.zeros(shape)
    for idx in np.argwhere(b > 0):
        sl = tuple(slice(i, i + n) for i, n in zip(idx, a.shape))
        out[sl] += a * b[tuple(idx)]
    return out


def rectangle_masses(copula: Any, cuts: Sequence[np.ndarray]) -> np.ndarray:
    """Probabilities of all grid cells ``prod (cuts_j[a], cuts_j[a+1]]`` under a copula."""
    grids = np.meshgrid(*cuts, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    vals = np.asarray(copula.cdf(pts), dtype=float).reshape(grids[0].shape)
    for axis in range(vals.ndim):
        vals = np.diff(vals, axis=axis)
    if vals.min() < -1e-12:
        raise DomainError(f"coupling copula produced negative cell mass {vals.min()!r}")
    return np.clip(vals, 0.0, None)


def marginal_index_probabilities(dist: IndexDistribution, coords: Sequence[int]) -> np.ndarray:
    """Probability table of ``(I_j)_{j in coords}``.

    Entry ``[k_1 - 1, ..., k_m - 1]`` holds ``P(I_{j_1} = k_1, ..., I_{j_m} = k_m)``.
    """
    cs = _check_coords(coords, dist.d)
    _check_cap(dist.K ** len(cs), ENUMERATION_CAP, "marginal table")
    table = np.zeros((dist.K,) * len(cs))
    sub = dist.vector_array[:, [c - 1 for c in cs]] - 1
    np.add.at(table, tuple(sub.T), dist.prob_array)
    return table


def sample_index(dist: IndexDistribution, rng: np.random.Generator | int | None, n: int) -> np.ndarray:
    """Draw ``n`` index vectors as an ``(n, d)`` integer array."""
    return dist.vector_array[sample_support_ids(dist, rng, n)]


def sample_support_ids(dist: IndexDistribution, rng: np.random.Generator | int | None, n: int) -> np.ndarray:
    if n < 0:
        raise DomainError("sample size must be nonnegative")
    rng = np.random.default_rng(rng)
    cdf = np.cumsum(dist.prob_array)
    ids = np.searchsorted(cdf, rng.random(n) * cdf[-1], side="right")
    return np.minimum(ids, len(dist) - 1)


def index_predicates(dist: IndexDistribution) -> IndexPredicates:
    comonotone = all(len(set(v)) == 1 for v in dist.vectors)
    all_distinct = all(len(set(v)) == len(v) for v in dist.vectors)
    return IndexPredicates(comonotone, all_distinct, _classes_uniform(dist))


def _classes_uniform(dist: IndexDistribution, tol: float = 1e-12) -> bool:
    seen: dict[tuple[int, ...], list[float]] = {}
    for vec, p in dist.items():
        seen.setdefault(tuple(sorted(vec)), []).append(p)
    for rep, ps in seen.items():
        size = _class_size(rep)
        # members missing from the support carry probability 0
        if len(ps) < size or max(ps) - min(ps) > tol:
            return False
    return True


def _class_size(rep: Sequence[int]) -> int:
    counts: dict[int, int] = {}
    for v in rep:
        counts[v] = counts.get(v, 0) + 1
    out = math.factorial(len(rep))
    for c in counts.values():
        out //= math.factorial(c)
    return out


def ordered_classes(d: int, K: int, *, cap: int = ENUMERATION_CAP) -> list[OrderedClass]:
    _check_cap(K**d, cap, "ordered class enumeration")
    groups: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for vec in itertools.product(range(1, K + 1), repeat=d):
        groups.setdefault(tuple(sorted(vec)), []).append(vec)
    return [OrderedClass(representative=rep, members=tuple(groups[rep])) for rep in sorted(groups)]
