"""Index-mixed copulas built from base copulas and an index distribution.

For an index vector ``i`` with blocks ``J_k = {j : i_j = k}`` the model picks
coordinate ``j`` from an independent draw of base ``i_j``.  Its cdf is the
support-weighted sum of products of the block margins ``C_k`` restricted to
``J_k``; empty blocks contribute the factor 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .base_copulas import (
    Capability,
    Copula,
    FiniteMixture,
    Independence,
    ProductCopula,
    Rng,
    as_rng,
)
from .errors import DimensionError, DomainError
from .index_model import (
    IndexDistribution,
    index_predicates,
    marginal_index_probabilities,
    sample_index,
    sample_support_ids,
)

Block = tuple[np.ndarray, Copula]


@dataclass(frozen=True)
class IndexMixedCopula(Copula):
    bases: tuple[Copula, ...]
    index: IndexDistribution
    name = "index_mixed"

    def __post_init__(self) -> None:
        if len(self.bases) != self.index.K:
            raise DimensionError(f"{len(self.bases)} base copulas for an index law of order {self.index.K}")
        for k, base in enumerate(self.bases, start=1):
            if base.dim != self.index.d:
                raise DimensionError(f"base {k} has dimension {base.dim}, index law has {self.index.d}")

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.index.d

    @property
    def K(self) -> int:
        return self.index.K

    # cached structure -----------------------------------------------------------

    @cached_property
    def terms(self) -> tuple[tuple[float, tuple[Block, ...]], ...]:
        """Per support vector: its probability and the non-empty blocks with their margins."""
        cache: dict[tuple[int, tuple[int, ...]], Copula] = {}
        out = []
        for p, part in zip(self.index.probs, self.index.partitions):
            blocks = []
            for k, coords in enumerate(part.sets):
                if not coords:
                    continue  # empty block: factor 1
                key = (k, coords)
                if key not in cache:
                    cache[key] = self.bases[k].margin(coords)
                cols = np.array([j - 1 for j in coords])
                blocks.append((cols, cache[key]))
            out.append((p, tuple(blocks)))
        return tuple(out)

    def _needed(self) -> list[Copula]:
        return [cop for _, blocks in self.terms for _, cop in blocks]

    @property
    def capability(self):
        needed = self._needed()
        d2 = self.dim == 2
        diag_bases = [self.bases[k] for k in self._diagonal_slots()] if d2 else []
        return Capability(
            has_cdf=all(c.capability.has_cdf for c in needed),
            has_density=all(c.capability.has_density for c in needed),
            has_conditional2d=d2 and all(b.capability.has_conditional2d for b in diag_bases),
            has_survival_closed=all(b.capability.has_survival_closed for b in self.bases),
            has_tail_coeffs=d2 and all(b.capability.has_tail_coeffs for b in diag_bases),
        )

    def _diagonal_slots(self) -> list[int]:
        table = marginal_index_probabilities(self.index, (1, 2))
        return [k for k in range(self.K) if table[k, k] > 0]

    @property
    def radially_symmetric(self):  # type: ignore[override]
        flags = [b.radially_symmetric for b in self.bases]
        return True if all(f is True for f in flags) else None

    @property
    def exchangeable(self):  # type: ignore[override]
        ok = index_predicates(self.index).exchangeable_sufficient
        return True if ok and all(b.exchangeable is True for b in self.bases) else None

    # evaluation -----------------------------------------------------------------

    def _cdf(self, rows):
        out = np.zeros(rows.shape[0])
        for p, blocks in self.terms:
            prod = np.full(rows.shape[0], p)
            for cols, cop in blocks:
                prod *= cop._cdf(rows[:, cols])
            out += prod
        return out

    def _density(self, rows):
        out = np.zeros(rows.shape[0])
        for p, blocks in self.terms:
            prod = np.full(rows.shape[0], p)
            for cols, cop in blocks:
                prod *= cop._density(rows[:, cols])
            out += prod
        return out

    def _diagonal(self, u):
        # mixture of products of block diagonals, independent of the cdf path
        out = np.zeros_like(u)
        for p, blocks in self.terms:
            prod = np.full_like(u, p)
            for _, cop in blocks:
                prod *= cop._diagonal(u)
            out += prod
        return out

    # sampling ---------------------------------------------------------------------

    def sample_sequential(self, n: int, rng: Rng = None) -> np.ndarray:
        """Row by row: draw every base in full, then the index vector, then select."""
        if n < 0:
            raise DomainError("sample size must be nonnegative")
        rng = as_rng(rng)
        d = self.dim
        rows = np.arange(d)
        out = np.empty((n, d))
        for i in range(n):
            matrix = np.column_stack([b._sample(1, rng)[0] for b in self.bases])
            idx = sample_index(self.index, rng, 1)[0]
            out[i] = matrix[rows, idx - 1]
        return out

    def sample_vectorized(self, n: int, rng: Rng = None) -> np.ndarray:
        """Batched version of :meth:`sample_sequential`.

        One stream is consumed in a fixed order: base 1 for all rows, then base
        2, ..., then the index vectors.
        """
        if n < 0:
            raise DomainError("sample size must be nonnegative")
        rng = as_rng(rng)
        cube = np.stack([b._sample(n, rng) for b in self.bases], axis=2)
        idx = sample_index(self.index, rng, n)
        return np.take_along_axis(cube, (idx - 1)[:, :, None], axis=2)[:, :, 0]

    def sample_efficient(self, n: int, rng: Rng = None) -> np.ndarray:
        """Draw index vectors first, then only the block margins they select.

        Rows sharing a support vector are grouped; groups are filled in support
        order and, within a group, block by block in base order.
        """
        if n < 0:
            raise DomainError("sample size must be nonnegative")
        rng = as_rng(rng)
        ids = sample_support_ids(self.index, rng, n)
        out = np.empty((n, self.dim))
        for s, (_, blocks) in enumerate(self.terms):
            rows = np.flatnonzero(ids == s)
            if not rows.size:
                continue
            for cols, cop in blocks:
                out[np.ix_(rows, cols)] = cop._sample(rows.size, rng)
        return out

    def _sample(self, n, rng):
        return self.sample_efficient(n, rng)

    # structure ----------------------------------------------------------------------

    def _margin(self, coords):
        return IndexMixedCopula(tuple(b.margin(coords) for b in self.bases), self.index.marginal(coords))

    def general_margin(self, coords: Sequence[int]) -> Copula:
        return self.margin(coords)

    def survival(self):
        return IndexMixedCopula(tuple(b.survival() for b in self.bases), self.index)

    def _pair(self, j1: int, j2: int) -> tuple[np.ndarray, float]:
        if not 1 <= j1 < j2 <= self.dim:
            raise DimensionError(f"need 1 <= j1 < j2 <= {self.dim}, got ({j1}, {j2})")
        table = marginal_index_probabilities(self.index, (j1, j2))
        diag = np.diag(table).copy()
        off = float(table.sum() - diag.sum())
        return diag, max(off, 0.0)

    def bivariate_margin(self, j1: int, j2: int) -> FiniteMixture:
        """Diagonal-weighted base pair margins plus the remaining mass on independence."""
        diag, off = self._pair(j1, j2)
        pairs = [(float(p), self.bases[k].margin((j1, j2))) for k, p in enumerate(diag) if p > 0]
        if off > 0:
            pairs.append((off, Independence(2)))
        return _normalized_mixture(pairs)

    def trivariate_margin(self, j1: int, j2: int, j3: int) -> "TrivariateMargin":
        if not 1 <= j1 < j2 < j3 <= self.dim:
            raise DimensionError(f"need 1 <= j1 < j2 < j3 <= {self.dim}")
        t = marginal_index_probabilities(self.index, (j1, j2, j3))
        K = self.K
        triple, p12, p13, p23 = [], [], [], []
        for k in range(K):
            others = [x for x in range(K) if x != k]
            triple.append(float(t[k, k, k]))
            p12.append(float(sum(t[k, k, x] for x in others)))
            p13.append(float(sum(t[k, x, k] for x in others)))
            p23.append(float(sum(t[x, k, k] for x in others)))
        distinct = float(
            sum(t[a, b, c] for a, b, c in itertools.product(range(K), repeat=3) if len({a, b, c}) == 3)
        )
        return TrivariateMargin(
            coords=(j1, j2, j3),
            bases=tuple(self.bases),
            triple=tuple(triple),
            pair12=tuple(p12),
            pair13=tuple(p13),
            pair23=tuple(p23),
            distinct=distinct,
        )

    def conditional_pair(self, j2: int, j1: int, u2: Any, u1: Any) -> float | np.ndarray:
        """``P(U_{j2} <= u2 | U_{j1} = u1)`` for ``j1 < j2``."""
        diag, off = self._pair(j1, j2)
        a, b = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        total = off * np.clip(b, 0.0, 1.0)
        for k, p in enumerate(diag):
            if p > 0:
                total = total + p * np.asarray(self.bases[k].margin((j1, j2)).conditional_2d(b, a))
        total = np.clip(total, 0.0, 1.0)
        return float(total) if total.ndim == 0 else total

    def _conditional(self, u1, u2):
        return np.asarray(self.conditional_pair(2, 1, u2, u1))

    def _tail(self):
        return self.bivariate_margin(1, 2).tail_coeffs()

    def comonotone_decomposition(self) -> list[tuple[float, Copula]] | None:
        """``[(p_k, C_k)]`` when the index law is comonotone, otherwise ``None``."""
        if not index_predicates(self.index).comonotone:
            return None
        return [(p, self.bases[vec[0] - 1]) for vec, p in self.index.items()]


def _normalized_mixture(pairs: list[tuple[float, Copula]]) -> FiniteMixture:
    total = sum(w for w, _ in pairs)
    return FiniteMixture.of([(w / total, c) for w, c in pairs])


@dataclass(frozen=True)
class TrivariateMargin:
    """Three-coordinate margin grouped by which coordinates share a base.

    ``triple[k]`` weighs the full base margin; ``pair12[k]`` the base pair
    margin on the first two coordinates times an independent third, and so on;
    ``distinct`` is the mass on the independence copula.
    """

    coords: tuple[int, int, int]
    bases: tuple[Copula, ...]
    triple: tuple[float, ...]
    pair12: tuple[float, ...]
    pair13: tuple[float, ...]
    pair23: tuple[float, ...]
    distinct: float

    def components(self) -> list[tuple[float, str, Copula]]:
        j1, j2, j3 = self.coords
        out: list[tuple[float, str, Copula]] = []
        u1 = Independence(1)
        for k, base in enumerate(self.bases):
            if self.triple[k] > 0:
                out.append((self.triple[k], f"triple[{k + 1}]", base.margin(self.coords)))
            if self.pair12[k] > 0:
                cop = ProductCopula((((1, 2), base.margin((j1, j2))), ((3,), u1)))
                out.append((self.pair12[k], f"pair12[{k + 1}]", cop))
            if self.pair13[k] > 0:
                cop = ProductCopula((((1, 3), base.margin((j1, j3))), ((2,), u1)))
                out.append((self.pair13[k], f"pair13[{k + 1}]", cop))
            if self.pair23[k] > 0:
                cop = ProductCopula((((2, 3), base.margin((j2, j3))), ((1,), u1)))
                out.append((self.pair23[k], f"pair23[{k + 1}]", cop))
        if self.distinct > 0:
            out.append((self.distinct, "distinct", Independence(3)))
        return out

    def as_mixture(self) -> FiniteMixture:
        return _normalized_mixture([(w, c) for w, _, c in self.components()])

    def cdf(self, u: Any) -> float | np.ndarray:
        return self.as_mixture().cdf(u)


def make_index_mixed(bases: Sequence[Copula], index: IndexDistribution) -> IndexMixedCopula:
    return IndexMixedCopula(tuple(bases), index)


@dataclass(frozen=True)
class ExchangeabilityReport:
    invariant: bool
    max_deviation: float
    witness: tuple[tuple[float, ...], tuple[int, ...]] | None


def check_exchangeable(c: Copula, resolution: int | None = None, tol: float = 1e-12) -> ExchangeabilityReport:
    """Compare the cdf with every coordinate permutation of itself on a grid.

    The witness is the first grid point and permutation (1-based) where the
    difference exceeds ``tol``.
    """
    d = c.dim
    pts = cube_grid(d, resolution)
    base = np.asarray(c.cdf(pts))
    worst = 0.0
    witness = None
    for perm in itertools.permutations(range(d)):
        diff = np.abs(np.asarray(c.cdf(pts[:, perm])) - base)
        i = int(np.argmax(diff))
        if diff[i] > worst:
            worst = float(diff[i])
            if worst > tol and witness is None:
                witness = (tuple(float(x) for x in pts[i]), tuple(p + 1 for p in perm))
    return ExchangeabilityReport(invariant=worst <= tol, max_deviation=worst, witness=witness)


def cube_grid(d: int, resolution: int | None = None) -> np.ndarray:
    """Regular grid on ``[0, 1]^d`` with the default per-dimension resolution."""
    res = resolution or {1: 21, 2: 21, 3: 11, 4: 7}.get(d, 5)
    axis = np.linspace(0.0, 1.0, res)
    return np.array(list(itertools.product(axis, repeat=d)))


__all__ = [
    "IndexMixedCopula",
    "TrivariateMargin",
    "ExchangeabilityReport",
    "make_index_mixed",
    "check_exchangeable",
    "cube_grid",
]
