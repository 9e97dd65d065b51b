"""Joint models with given margins, Laplace-Stieltjes transforms and sum distributions.

With exponential margins and bases drawn from {M, Pi}, a comonotone block of
size ``D`` sums to ``D`` times one exponential and an independence block to an
Erlang variable, so the sum is a finite mixture of ``Gamma(a, rate) + Exp(nu)``
convolutions over the index support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Protocol, Sequence

import numpy as np
from scipy import special

from .base_copulas import Comonotone, Copula, Independence, Rng, as_rng
from .errors import CapabilityError, DimensionError, DomainError
from .index_mixed import IndexMixedCopula


class Margin(Protocol):
    def ppf(self, q: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError(f"exponential rate must be positive, got {self.rate!r}")

    def ppf(self, q):
        return -np.log1p(-np.asarray(q, dtype=float)) / self.rate

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def mean(self) -> float:
        return 1.0 / self.rate

    def ls(self, t):
        return self.rate / (self.rate + np.asarray(t, dtype=float))


@dataclass(frozen=True)
class PointMass:
    value: float

    def ppf(self, q):
        return np.full(np.shape(q), float(self.value))

    def mean(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class JointModel:
    copula: Copula
    margins: tuple[Margin, ...]

    def __post_init__(self) -> None:
        if len(self.margins) != self.copula.dim:
            raise DimensionError(f"{len(self.margins)} margins for a copula of dimension {self.copula.dim}")

    @classmethod
    def exponential(cls, copula: Copula, rate: float | Sequence[float]) -> "JointModel":
        rates = np.broadcast_to(np.asarray(rate, dtype=float), (copula.dim,))
        return cls(copula, tuple(Exponential(float(r)) for r in rates))

    @property
    def dim(self) -> int:
        return self.copula.dim

    def rates(self) -> np.ndarray:
        if not all(isinstance(mg, Exponential) for mg in self.margins):
            raise CapabilityError("closed forms need exponential margins")
        return np.array([mg.rate for mg in self.margins])

    def sample(self, n: int, rng: Rng = None) -> np.ndarray:
        u = self.copula.sample(n, rng)
        return np.column_stack([mg.ppf(u[:, j]) for j, mg in enumerate(self.margins)]) if n else u


def _block_kind(cop: Copula) -> str:
    if cop.dim == 1 or isinstance(cop, Independence):
        return "independence"
    if isinstance(cop, Comonotone):
        return "comonotone"
    raise CapabilityError(f"no closed-form block transform for a {cop.name} block")


def _terms(jm: JointModel) -> tuple[tuple[float, tuple[tuple[np.ndarray, Copula], ...]], ...]:
    if not isinstance(jm.copula, IndexMixedCopula):
        raise CapabilityError("closed forms need an index-mixed copula over {M, Pi}")
    return jm.copula.terms


def ls_transform(jm: JointModel, t: Sequence[float]) -> float:
    """``E[exp(-t . X)]`` as the index mixture of block transforms."""
    tv = np.asarray(t, dtype=float)
    if tv.shape != (jm.dim,):
        raise DimensionError(f"t must have length {jm.dim}")
    if tv.min() < 0:
        raise DomainError("t must be nonnegative")
    rates = jm.rates()
    total = 0.0
    for p, blocks in _terms(jm):
        prod = 1.0
        for cols, cop in blocks:
            scaled = tv[cols] / rates[cols]
            if _block_kind(cop) == "comonotone":
                prod *= 1.0 / (1.0 + scaled.sum())
            else:
                prod *= float(np.prod(1.0 / (1.0 + scaled)))
        total += p * prod
    return float(total)


def _erlang_cdf(a: int, rate: float, s: np.ndarray) -> np.ndarray:
    return special.gammainc(a, rate * s) if a > 0 else np.ones_like(s)


@dataclass(frozen=True)
class GammaExpComponent:
    """Law of ``Gamma(a, rate) + Exp(rate / dm)`` with independent summands.

    ``a = 0`` drops the Gamma part and ``dm = 0`` the exponential part (point
    masses at zero).  Both zero is the point mass at zero.
    """

    a: int
    dm: int
    rate: float

    @property
    def nu(self) -> float:
        return self.rate / self.dm

    def cdf(self, s: Any) -> np.ndarray:
        s = np.maximum(np.asarray(s, dtype=float), 0.0)
        lam, a = self.rate, self.a
        if self.dm == 0:
            return _erlang_cdf(a, lam, s) if a else np.ones_like(s)
        nu = self.nu
        if a == 0:
            return -np.expm1(-nu * s)
        if self.dm == 1:
            return special.gammainc(a + 1, lam * s)
        # dm >= 2 so nu < lam and the shifted Gamma term is a proper cdf
        r = lam / (lam - nu)
        return _erlang_cdf(a, lam, s) - np.exp(-nu * s) * r**a * special.gammainc(a, (lam - nu) * s)

    def pdf(self, s: Any) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        pos = np.maximum(s, 0.0)
        lam, a = self.rate, self.a
        if self.dm == 0:
            out = lam**a * pos ** (a - 1) * np.exp(-lam * pos) / math.gamma(a)
        elif a == 0:
            out = self.nu * np.exp(-self.nu * pos)
        elif self.dm == 1:
            out = lam ** (a + 1) * pos**a * np.exp(-lam * pos) / math.factorial(a)
        else:
            nu = self.nu
            r = lam / (lam - nu)
            out = nu * np.exp(-nu * pos) * r**a * special.gammainc(a, (lam - nu) * pos)
        return np.where(s < 0, 0.0, out)

    def mean(self) -> float:
        return (self.a + self.dm) / self.rate

    def var(self) -> float:
        return (self.a + self.dm**2) / self.rate**2

    def ls(self, t: Any) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = (self.rate / (self.rate + t)) ** self.a
        if self.dm:
            out = out * self.nu / (self.nu + t)
        return out


class SumDistribution(Protocol):
    def cdf(self, s: Any) -> np.ndarray: ...
    def cdf_left(self, s: Any) -> np.ndarray: ...
    def mean(self) -> float: ...
    def var(self) -> float: ...


@dataclass(frozen=True)
class GammaExpMixture:
    weights: tuple[float, ...]
    components: tuple[GammaExpComponent, ...]

    def cdf(self, s: Any) -> np.ndarray:
        return sum(w * c.cdf(s) for w, c in zip(self.weights, self.components))

    def cdf_left(self, s: Any) -> np.ndarray:
        # the only possible atom is at zero (all blocks empty), impossible for d >= 1
        return self.cdf(s)

    def pdf(self, s: Any) -> np.ndarray:
        return sum(w * c.pdf(s) for w, c in zip(self.weights, self.components))

    def mean(self) -> float:
        return math.fsum(w * c.mean() for w, c in zip(self.weights, self.components))

    def var(self) -> float:
        mu = self.mean()
        second = math.fsum(w * (c.var() + c.mean() ** 2) for w, c in zip(self.weights, self.components))
        return second - mu**2

    def ls(self, t: Any) -> np.ndarray:
        return sum(w * c.ls(t) for w, c in zip(self.weights, self.components))


def exp_sum_distribution(jm: JointModel) -> GammaExpMixture:
    """Closed-form law of the sum for exponential margins of one rate and {M, Pi} bases."""
    rates = jm.rates()
    if np.ptp(rates) != 0:
        raise CapabilityError("the closed form needs a common exponential rate")
    if not isinstance(jm.copula, IndexMixedCopula):
        raise CapabilityError("closed forms need an index-mixed copula over {M, Pi}")
    kinds = []
    for k, base in enumerate(jm.copula.bases, start=1):
        if isinstance(base, Comonotone):
            kinds.append("M")
        elif isinstance(base, Independence):
            kinds.append("Pi")
        else:
            raise CapabilityError(f"base {k} is {base.name}; only M and Pi bases have the closed form")
    if kinds.count("M") > 1:
        raise CapabilityError("at most one comonotone base slot is supported")
    lam = float(rates[0])
    merged: dict[tuple[int, int], float] = {}
    for vec, p in jm.copula.index.items():
        dm = sum(1 for v in vec if kinds[v - 1] == "M")
        key = (len(vec) - dm, dm)
        merged[key] = merged.get(key, 0.0) + p
    keys = sorted(merged)
    return GammaExpMixture(
        weights=tuple(merged[k] for k in keys),
        components=tuple(GammaExpComponent(a, dm, lam) for a, dm in keys),
    )


@dataclass(frozen=True)
class EmpiricalSum:
    values: np.ndarray

    @cached_property
    def sorted(self) -> np.ndarray:
        return np.sort(np.asarray(self.values, dtype=float))

    @property
    def n(self) -> int:
        return self.sorted.size

    def cdf(self, s: Any) -> np.ndarray:
        return np.searchsorted(self.sorted, np.asarray(s, dtype=float), side="right") / self.n

    def cdf_left(self, s: Any) -> np.ndarray:
        return np.searchsorted(self.sorted, np.asarray(s, dtype=float), side="left") / self.n

    def mean(self) -> float:
        return float(self.sorted.mean())

    def var(self) -> float:
        return float(self.sorted.var(ddof=1))


def mc_sum_cdf(jm: JointModel, rng: Rng, n: int) -> EmpiricalSum:
    """Sample the copula, map through the margin quantiles and add up."""
    rng = as_rng(rng)
    x = jm.sample(n, rng)
    return EmpiricalSum(x.sum(axis=1) if n else np.zeros(0))


def ks_distance(empirical: EmpiricalSum, other: Any) -> float:
    """Sup distance between two cdfs, evaluated at the empirical jump points.

    Both the values and the left limits are compared, which gives the exact
    supremum whenever ``other`` is continuous or itself empirical.  Objects
    without ``cdf_left`` are taken to be continuous.
    """
    pts = np.unique(empirical.sorted)
    if isinstance(other, EmpiricalSum):
        pts = np.union1d(pts, other.sorted)
    other_left = getattr(other, "cdf_left", other.cdf)
    right = np.abs(empirical.cdf(pts) - np.asarray(other.cdf(pts)))
    left = np.abs(empirical.cdf_left(pts) - np.asarray(other_left(pts)))
    return float(max(right.max(initial=0.0), left.max(initial=0.0)))


def dkw_threshold(n: int, alpha: float = 0.001) -> float:
    """Two-sided Dvoretzky-Kiefer-Wolfowitz bound on the sup deviation at level ``alpha``."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def numeric_convolution_cdf(a: int, dm: int, rate: float, s: Any, step: float = 1e-3) -> np.ndarray:
    """``P(Gamma(a, rate) + Exp(rate/dm) <= s)`` by trapezoidal convolution (reference only)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    nu = rate / dm
    out = np.empty_like(s)
    for i, top in enumerate(s):
        grid = np.arange(0.0, top + step / 2, step)
        if grid.size < 2:
            out[i] = 0.0
            continue
        dens = rate**a * grid ** (a - 1) * np.exp(-rate * grid) / math.gamma(a)
        tail = -np.expm1(-nu * (top - grid))
        out[i] = np.trapezoid(dens * tail, grid)
    return out
