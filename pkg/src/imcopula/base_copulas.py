"""Base copula families with a common evaluable interface.

Every model is an immutable value.  Points are arrays whose last axis has
length ``dim``; a single point returns a float, a stack of points an array.
Coordinates passed to :meth:`Copula.margin` are 1-based and increasing.
"""
from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence

import numpy as np
from scipy import special

from .efgm import (
    EfgmParameters,
    bernoulli_from_thetas,
    efgm_admissible,
    efgm_sample,
)
from .errors import CapabilityError, DimensionError, DomainError, EnumerationCapError

CUBE_SLACK = 1e-12
SIEVE_CAP = 20

Rng = np.random.Generator | int | None


@dataclass(frozen=True)
class Capability:
    has_cdf: bool = True
    has_density: bool = False
    has_conditional2d: bool = False
    has_survival_closed: bool = True
    has_tail_coeffs: bool = False


def as_rng(rng: Rng) -> np.random.Generator:
    return np.random.default_rng(rng)


def cube_points(u: Any, d: int, *, open_cube: bool = False) -> tuple[np.ndarray, tuple[int, ...]]:
    """Flatten ``u`` to ``(n, d)`` rows, checking the cube and clamping tiny overshoots."""
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != d:
        raise DimensionError(f"expected points with last axis {d}, got shape {arr.shape}")
    shape = arr.shape[:-1]
    rows = arr.reshape(-1, d)
    if np.isnan(rows).any():
        raise DomainError("points contain NaN")
    if open_cube:
        if rows.size and (rows.min() <= 0.0 or rows.max() >= 1.0):
            raise DomainError("density is only defined on the open unit cube")
        return rows, shape
    if rows.size and (rows.min() < -CUBE_SLACK or rows.max() > 1.0 + CUBE_SLACK):
        raise DomainError("points lie outside the unit cube")
    return np.clip(rows, 0.0, 1.0), shape


def _shaped(values: np.ndarray, shape: tuple[int, ...]) -> float | np.ndarray:
    if shape == ():
        return float(values[0])
    return values.reshape(shape)


def _check_coords(coords: Sequence[int], d: int) -> tuple[int, ...]:
    cs = tuple(int(c) for c in coords)
    if not cs:
        raise DimensionError("coordinate list must be non-empty")
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise DimensionError(f"coordinates {cs} must be strictly increasing")
    if cs[0] < 1 or cs[-1] > d:
        raise DimensionError(f"coordinates {cs} outside 1..{d}")
    return cs


class Copula(ABC):
    """Common interface.  Subclasses implement the row-wise ``_cdf`` etc."""

    dim: int
    name: str = "copula"
    capability = Capability()
    radially_symmetric: bool | None = None
    exchangeable: bool | None = None

    # public surface ----------------------------------------------------------

    def cdf(self, u: Any) -> float | np.ndarray:
        rows, shape = cube_points(u, self.dim)
        return _shaped(self._cdf(rows), shape)

    def density(self, u: Any) -> float | np.ndarray:
        rows, shape = cube_points(u, self.dim, open_cube=True)
        return _shaped(self._density(rows), shape)

    def sample(self, n: int, rng: Rng = None) -> np.ndarray:
        if n < 0:
            raise DomainError("sample size must be nonnegative")
        return self._sample(int(n), as_rng(rng))

    def margin(self, coords: Sequence[int]) -> "Copula":
        cs = _check_coords(coords, self.dim)
        if len(cs) == self.dim:
            return self
        if len(cs) == 1:
            return Independence(1)
        return self._margin(cs)

    def survival(self) -> "Copula":
        return SurvivalCopula(self)

    def diagonal(self, u: Any) -> float | np.ndarray:
        arr = np.asarray(u, dtype=float)
        flat = arr.reshape(-1)
        if flat.size and (flat.min() < -CUBE_SLACK or flat.max() > 1 + CUBE_SLACK):
            raise DomainError("diagonal argument outside [0, 1]")
        vals = self._diagonal(np.clip(flat, 0.0, 1.0))
        return float(vals[0]) if arr.ndim == 0 else vals.reshape(arr.shape)

    def conditional_2d(self, u2: Any, u1: Any) -> float | np.ndarray:
        """``P(U_2 <= u2 | U_1 = u1)``, the partial derivative of the cdf in ``u1``."""
        if self.dim != 2:
            raise DimensionError("conditional_2d needs a bivariate copula")
        a, b = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        if a.size and (a.min() <= 0.0 or a.max() >= 1.0):
            raise DomainError("conditioning value must lie in (0, 1)")
        if b.size and (b.min() < -CUBE_SLACK or b.max() > 1 + CUBE_SLACK):
            raise DomainError("u2 outside [0, 1]")
        vals = np.clip(self._conditional(a.reshape(-1), np.clip(b, 0, 1).reshape(-1)), 0.0, 1.0)
        return float(vals[0]) if a.ndim == 0 else vals.reshape(a.shape)

    def tail_coeffs(self) -> tuple[float, float]:
        """``(lambda_lower, lambda_upper)`` of a bivariate copula."""
        if self.dim != 2:
            raise DimensionError("tail coefficients are defined for bivariate copulas")
        return self._tail()

    # closed-form bivariate measures; None means "no closed form"
    def kendall_tau(self) -> float | None:
        return None

    def spearman_rho(self) -> float | None:
        return None

    def blomqvist_beta(self) -> float | None:
        if self.dim != 2:
            return None
        return 4.0 * float(self.cdf([0.5, 0.5])) - 1.0

    def transform_uniforms(self, w: np.ndarray) -> np.ndarray:
        """Map independent uniforms to a sample of this copula (used by quasi-Monte Carlo)."""
        raise CapabilityError(f"{self.name} has no uniform-input transform")

    @property
    def uniform_inputs(self) -> int:
        """Number of uniform columns :meth:`transform_uniforms` consumes."""
        return self.dim

    # row-wise kernels --------------------------------------------------------

    @abstractmethod
    def _cdf(self, rows: np.ndarray) -> np.ndarray: ...

    def _density(self, rows: np.ndarray) -> np.ndarray:
        raise CapabilityError(f"{self.name} has no density")

    @abstractmethod
    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray: ...

    def _margin(self, coords: tuple[int, ...]) -> "Copula":
        raise CapabilityError(f"{self.name} has no closed-form margin")

    def _diagonal(self, u: np.ndarray) -> np.ndarray:
        return self._cdf(np.repeat(u[:, None], self.dim, axis=1))

    def _conditional(self, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
        raise CapabilityError(f"{self.name} has no conditional distribution")

    def _tail(self) -> tuple[float, float]:
        raise CapabilityError(f"tail coefficients of {self.name} are unavailable")


def rectangle_mass(c: Copula, lower: Sequence[float], upper: Sequence[float]) -> float:
    """Probability of the box ``prod (lower_j, upper_j]`` by inclusion-exclusion."""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    corners = np.array(list(itertools.product((0, 1), repeat=c.dim)), dtype=bool)
    pts = np.where(corners, lo, hi)
    signs = (-1.0) ** corners.sum(axis=1)
    return float(signs @ np.asarray(c.cdf(pts)))


# -- fundamental copulas -------------------------------------------------------


@dataclass(frozen=True)
class Independence(Copula):
    dim: int = 2
    name = "independence"
    capability = Capability(has_density=True, has_conditional2d=True, has_tail_coeffs=True)
    radially_symmetric = True
    exchangeable = True

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DimensionError("dimension must be positive")

    def _cdf(self, rows):
        return np.prod(rows, axis=1)

    def _density(self, rows):
        return np.ones(rows.shape[0])

    def _sample(self, n, rng):
        return rng.random((n, self.dim))

    def _margin(self, coords):
        return Independence(len(coords))

    def survival(self):
        return self

    def _diagonal(self, u):
        return u**self.dim

    def _conditional(self, u1, u2):
        return u2.copy()

    def _tail(self):
        return 0.0, 0.0

    def kendall_tau(self):
        return 0.0

    def spearman_rho(self):
        return 0.0

    def transform_uniforms(self, w):
        return np.asarray(w, dtype=float)


@dataclass(frozen=True)
class Comonotone(Copula):
    dim: int = 2
    name = "comonotone"
    capability = Capability(has_conditional2d=True, has_tail_coeffs=True)
    radially_symmetric = True
    exchangeable = True

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DimensionError("dimension must be positive")

    def _cdf(self, rows):
        return rows.min(axis=1)

    def _sample(self, n, rng):
        return np.repeat(rng.random((n, 1)), self.dim, axis=1)

    def _margin(self, coords):
        return Comonotone(len(coords))

    def survival(self):
        return self

    def _diagonal(self, u):
        return u.copy()

    def _conditional(self, u1, u2):
        return (u2 >= u1).astype(float)

    def _tail(self):
        return 1.0, 1.0

    def kendall_tau(self):
        return 1.0

    def spearman_rho(self):
        return 1.0

    @property
    def uniform_inputs(self):
        return 1

    def transform_uniforms(self, w):
        return np.repeat(np.asarray(w, dtype=float)[:, :1], self.dim, axis=1)


@dataclass(frozen=True)
class Countermonotone(Copula):
    dim: int = 2
    name = "countermonotone"
    capability = Capability(has_conditional2d=True, has_tail_coeffs=True)
    radially_symmetric = True
    exchangeable = True

    def __post_init__(self) -> None:
        if self.dim != 2:
            raise DimensionError("the countermonotone copula exists only in dimension 2")

    def _cdf(self, rows):
        return np.maximum(rows[:, 0] + rows[:, 1] - 1.0, 0.0)

    def _sample(self, n, rng):
        u = rng.random(n)
        return np.column_stack([u, 1.0 - u])

    def survival(self):
        return self

    def _diagonal(self, u):
        return np.maximum(2.0 * u - 1.0, 0.0)

    def _conditional(self, u1, u2):
        return (u2 >= 1.0 - u1).astype(float)

    def _tail(self):
        return 0.0, 0.0

    def kendall_tau(self):
        return -1.0

    def spearman_rho(self):
        return -1.0

    @property
    def uniform_inputs(self):
        return 1

    def transform_uniforms(self, w):
        u = np.asarray(w, dtype=float)[:, 0]
        return np.column_stack([u, 1.0 - u])


# -- Archimedean families -----------------------------------------------------


@dataclass(frozen=True)
class Clayton(Copula):
    theta: float
    dim: int = 2
    name = "clayton"
    exchangeable = True
    radially_symmetric = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise DomainError(f"Clayton parameter must be positive, got {self.theta!r}")
        if self.dim < 1:
            raise DimensionError("dimension must be positive")

    @classmethod
    def from_tau(cls, tau: float, dim: int = 2) -> "Clayton":
        if not 0 < tau < 1:
            raise DomainError("Clayton needs Kendall's tau in (0, 1)")
        return cls(2.0 * tau / (1.0 - tau), dim)

    @property
    def capability(self):
        return Capability(
            has_density=True,
            has_conditional2d=self.dim == 2,
            has_survival_closed=False,
            has_tail_coeffs=self.dim == 2,
        )

    def _sum(self, rows):
        with np.errstate(divide="ignore", over="ignore"):
            return np.sum(rows ** (-self.theta), axis=1) - rows.shape[1] + 1.0

    def _cdf(self, rows):
        with np.errstate(divide="ignore", over="ignore"):
            return self._sum(rows) ** (-1.0 / self.theta)

    def _density(self, rows):
        th, d = self.theta, self.dim
        logc = (
            sum(math.log1p(j * th) for j in range(d))
            - (th + 1.0) * np.sum(np.log(rows), axis=1)
            - (1.0 / th + d) * np.log(self._sum(rows))
        )
        return np.exp(logc)

    def _sample(self, n, rng):
        frailty = rng.gamma(1.0 / self.theta, 1.0, size=(n, 1))
        e = rng.standard_exponential((n, self.dim))
        return (1.0 + e / frailty) ** (-1.0 / self.theta)

    def _margin(self, coords):
        return Clayton(self.theta, len(coords))

    def _diagonal(self, u):
        with np.errstate(divide="ignore", over="ignore"):
            return (self.dim * u ** (-self.theta) - self.dim + 1.0) ** (-1.0 / self.theta)

    def _conditional(self, u1, u2):
        if self.dim != 2:
            raise DimensionError("conditional needs dimension 2")
        th = self.theta
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            s = u1 ** (-th) + u2 ** (-th) - 1.0
            out = u1 ** (-th - 1.0) * s ** (-1.0 / th - 1.0)
        return np.where(u2 <= 0.0, 0.0, np.nan_to_num(out, nan=0.0))

    def _tail(self):
        return 2.0 ** (-1.0 / self.theta), 0.0

    def kendall_tau(self):
        return self.theta / (self.theta + 2.0) if self.dim == 2 else None

    def transform_uniforms(self, w):
        if self.dim != 2:
            raise CapabilityError("uniform transform implemented for dimension 2 only")
        w = np.asarray(w, dtype=float)
        u, q = w[:, 0], w[:, 1]
        th = self.theta
        with np.errstate(divide="ignore", over="ignore"):
            v = ((q ** (-th / (1.0 + th)) - 1.0) * u ** (-th) + 1.0) ** (-1.0 / th)
        return np.column_stack([u, np.clip(np.nan_to_num(v, nan=0.0), 0.0, 1.0)])


def _positive_stable(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Positive stable variates with Laplace transform ``exp(-t^alpha)``, 0 < alpha <= 1.

    Kanter's representation with an angle uniform on ``(0, pi)`` and a unit
    exponential.
    """
    if alpha == 1.0:
        return np.ones(n)
    angle = rng.uniform(0.0, math.pi, n)
    w = rng.standard_exponential(n)
    a = np.sin(alpha * angle) / np.sin(angle) ** (1.0 / alpha)
    b = (np.sin((1.0 - alpha) * angle) / w) ** ((1.0 - alpha) / alpha)
    return a * b


@dataclass(frozen=True)
class Gumbel(Copula):
    theta: float
    dim: int = 2
    name = "gumbel"
    exchangeable = True
    radially_symmetric = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and self.theta >= 1.0):
            raise DomainError(f"Gumbel parameter must be >= 1, got {self.theta!r}")
        if self.dim < 1:
            raise DimensionError("dimension must be positive")

    @classmethod
    def from_tau(cls, tau: float, dim: int = 2) -> "Gumbel":
        if not 0 <= tau < 1:
            raise DomainError("Gumbel needs Kendall's tau in [0, 1)")
        return cls(1.0 / (1.0 - tau), dim)

    @property
    def capability(self):
        return Capability(
            has_density=self.dim <= 2,
            has_conditional2d=self.dim == 2,
            has_survival_closed=self.theta == 1.0,
            has_tail_coeffs=self.dim == 2,
        )

    def _a(self, rows):
        with np.errstate(divide="ignore"):
            x = -np.log(rows)
        return x, np.sum(x**self.theta, axis=1) ** (1.0 / self.theta)

    def _cdf(self, rows):
        return np.exp(-self._a(rows)[1])

    def _density(self, rows):
        if self.dim == 1:
            return np.ones(rows.shape[0])
        if self.dim != 2:
            raise CapabilityError("Gumbel density is implemented for dimension 2 only")
        th = self.theta
        x, a = self._a(rows)
        c = np.exp(-a)
        return (
            c
            / (rows[:, 0] * rows[:, 1])
            * (x[:, 0] * x[:, 1]) ** (th - 1.0)
            * a ** (1.0 - 2.0 * th)
            * (a + th - 1.0)
        )

    def _sample(self, n, rng):
        alpha = 1.0 / self.theta
        s = _positive_stable(alpha, n, rng)[:, None]
        e = rng.standard_exponential((n, self.dim))
        return np.exp(-((e / s) ** alpha))

    def _margin(self, coords):
        return Gumbel(self.theta, len(coords))

    def survival(self):
        return Independence(self.dim) if self.theta == 1.0 else SurvivalCopula(self)

    def _diagonal(self, u):
        return u ** (self.dim ** (1.0 / self.theta))

    def _conditional(self, u1, u2):
        if self.dim != 2:
            raise DimensionError("conditional needs dimension 2")
        th = self.theta
        rows = np.column_stack([u1, u2])
        x, a = self._a(rows)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.exp(-a) * x[:, 0] ** (th - 1.0) * a ** (1.0 - th) / u1
        return np.where(u2 <= 0.0, 0.0, np.nan_to_num(out, nan=0.0))

    def _tail(self):
        return 0.0, 2.0 - 2.0 ** (1.0 / self.theta)

    def kendall_tau(self):
        return 1.0 - 1.0 / self.theta if self.dim == 2 else None

    def transform_uniforms(self, w):
        """Inverse of the conditional distribution, solved by vectorized bisection."""
        if self.dim != 2:
            raise CapabilityError("uniform transform implemented for dimension 2 only")
        w = np.asarray(w, dtype=float)
        u = np.clip(w[:, 0], 1e-300, 1.0 - 1e-16)
        q = w[:, 1]
        lo = np.zeros_like(q)
        hi = np.ones_like(q)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = self._conditional(u, mid) < q
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return np.column_stack([w[:, 0], 0.5 * (lo + hi)])


# -- EFGM -----------------------------------------------------------------------


@dataclass(frozen=True)
class EFGM(Copula):
    params: EfgmParameters
    name = "efgm"

    def __post_init__(self) -> None:
        check = efgm_admissible(self.params)
        if not check.admissible:
            raise DomainError(f"inadmissible EFGM parameters, violating signs {check.witness}")

    @classmethod
    def bivariate(cls, theta: float) -> "EFGM":
        return cls(EfgmParameters.bivariate(theta))

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.params.d

    @property
    def capability(self):
        return Capability(
            has_density=True, has_conditional2d=self.dim == 2, has_tail_coeffs=self.dim == 2
        )

    @property
    def radially_symmetric(self):  # type: ignore[override]
        return all(len(s) % 2 == 0 for s, _ in self.params.thetas)

    @property
    def exchangeable(self):  # type: ignore[override]
        by_size: dict[int, set[float]] = {}
        table = self.params.as_dict()
        for size in range(2, self.dim + 1):
            for s in itertools.combinations(range(1, self.dim + 1), size):
                by_size.setdefault(size, set()).add(table.get(s, 0.0))
        return all(len(v) == 1 for v in by_size.values())

    def _cdf(self, rows):
        return np.prod(rows, axis=1) * self.params.polynomial(1.0 - rows)

    def _density(self, rows):
        return self.params.polynomial(1.0 - 2.0 * rows)

    @cached_property
    def law(self):
        return bernoulli_from_thetas(self.params)

    def _sample(self, n, rng):
        return efgm_sample(self.law, rng, n)

    def _margin(self, coords):
        return EFGM(self.params.subset(coords))

    def survival(self):
        return EFGM(self.params.reflected())

    def _conditional(self, u1, u2):
        th = self.params.theta((1, 2))
        return u2 * (1.0 + th * (1.0 - 2.0 * u1) * (1.0 - u2))

    def _tail(self):
        return 0.0, 0.0

    def kendall_tau(self):
        return 2.0 * self.params.theta((1, 2)) / 9.0 if self.dim == 2 else None

    def spearman_rho(self):
        return self.params.theta((1, 2)) / 3.0 if self.dim == 2 else None

    def transform_uniforms(self, w):
        if self.dim != 2:
            raise CapabilityError("uniform transform implemented for dimension 2 only")
        w = np.asarray(w, dtype=float)
        u, q = w[:, 0], w[:, 1]
        a = self.params.theta((1, 2)) * (1.0 - 2.0 * u)
        # a v^2 - (1 + a) v + q = 0 on [0, 1]
        disc = np.sqrt(np.maximum((1.0 + a) ** 2 - 4.0 * a * q, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            v = 2.0 * q / ((1.0 + a) + disc)
        return np.column_stack([u, np.clip(v, 0.0, 1.0)])


# -- Gaussian (sampling only) -----------------------------------------------------


@dataclass(frozen=True)
class GaussianSampleOnly(Copula):
    """Gaussian copula without a cdf; sampled via a square root of the correlation matrix."""

    corr: tuple[tuple[float, ...], ...]
    name = "gaussian"
    radially_symmetric = True

    def __post_init__(self) -> None:
        mat = np.asarray(self.corr, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise DimensionError("correlation matrix must be square")
        if not np.allclose(mat, mat.T, atol=1e-12):
            raise DomainError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(mat), 1.0, atol=1e-12):
            raise DomainError("correlation matrix must have unit diagonal")
        if np.linalg.eigvalsh(mat).min() < -1e-10:
            raise DomainError("correlation matrix must be positive semi-definite")

    @classmethod
    def from_matrix(cls, mat: Any) -> "GaussianSampleOnly":
        arr = np.asarray(mat, dtype=float)
        return cls(tuple(tuple(float(x) for x in row) for row in arr))

    @classmethod
    def equicorrelated(cls, dim: int, rho: float) -> "GaussianSampleOnly":
        mat = np.full((dim, dim), float(rho))
        np.fill_diagonal(mat, 1.0)
        return cls.from_matrix(mat)

    @classmethod
    def from_tau(cls, tau: float, dim: int = 2) -> "GaussianSampleOnly":
        return cls.equicorrelated(dim, math.sin(math.pi * tau / 2.0))

    @property
    def dim(self) -> int:  # type: ignore[override]
        return len(self.corr)

    @property
    def capability(self):
        return Capability(has_cdf=self.dim == 1, has_density=self.dim == 1)

    @property
    def exchangeable(self):  # type: ignore[override]
        mat = self.matrix
        off = mat[~np.eye(self.dim, dtype=bool)]
        return bool(off.size == 0 or np.ptp(off) == 0)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.corr, dtype=float)

    @cached_property
    def factor(self) -> np.ndarray:
        try:
            return np.linalg.cholesky(self.matrix)
        except np.linalg.LinAlgError:
            vals, vecs = np.linalg.eigh(self.matrix)
            return vecs * np.sqrt(np.clip(vals, 0.0, None))

    def _cdf(self, rows):
        # exact only where at most one coordinate is below 1 or some coordinate is 0
        active = (rows < 1.0).sum(axis=1)
        zero = (rows <= 0.0).any(axis=1)
        if np.any((active > 1) & ~zero):
            raise CapabilityError("the Gaussian copula cdf is not available (sampling only)")
        return np.where(zero, 0.0, rows.min(axis=1))

    def _density(self, rows):
        if self.dim == 1:
            return np.ones(rows.shape[0])
        raise CapabilityError("the Gaussian copula density is not provided (sampling only)")

    def _sample(self, n, rng):
        z = rng.standard_normal((n, self.dim)) @ self.factor.T
        return special.ndtr(z)

    def _margin(self, coords):
        idx = [c - 1 for c in coords]
        return GaussianSampleOnly.from_matrix(self.matrix[np.ix_(idx, idx)])

    def survival(self):
        return self

    def _rho(self) -> float:
        return float(self.matrix[0, 1])

    def kendall_tau(self):
        return 2.0 / math.pi * math.asin(self._rho()) if self.dim == 2 else None

    def spearman_rho(self):
        return 6.0 / math.pi * math.asin(self._rho() / 2.0) if self.dim == 2 else None

    def blomqvist_beta(self):
        return 2.0 / math.pi * math.asin(self._rho()) if self.dim == 2 else None

    def transform_uniforms(self, w):
        z = special.ndtri(np.clip(np.asarray(w, dtype=float), 1e-16, 1.0 - 1e-16))
        return special.ndtr(z @ self.factor.T)


# -- composites -------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteMixture(Copula):
    weights: tuple[float, ...]
    components: tuple[Copula, ...]
    name = "mixture"

    def __post_init__(self) -> None:
        if not self.components or len(self.weights) != len(self.components):
            raise DomainError("mixture needs matching, non-empty weights and components")
        if min(self.weights) < 0 or abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise DomainError("mixture weights must be nonnegative and sum to 1")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise DimensionError(f"mixture components have different dimensions {sorted(dims)}")

    @classmethod
    def of(cls, pairs: Sequence[tuple[float, Copula]]) -> "FiniteMixture":
        return cls(tuple(float(w) for w, _ in pairs), tuple(c for _, c in pairs))

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.components[0].dim

    @property
    def capability(self):
        caps = [c.capability for c in self.components]
        return Capability(
            has_cdf=all(c.has_cdf for c in caps),
            has_density=all(c.has_density for c in caps),
            has_conditional2d=all(c.has_conditional2d for c in caps),
            has_survival_closed=all(c.has_survival_closed for c in caps),
            has_tail_coeffs=all(c.has_tail_coeffs for c in caps),
        )

    def pairs(self) -> list[tuple[float, Copula]]:
        return list(zip(self.weights, self.components))

    def _cdf(self, rows):
        return sum(w * c._cdf(rows) for w, c in self.pairs() if w > 0)

    def _density(self, rows):
        return sum(w * c._density(rows) for w, c in self.pairs() if w > 0)

    def _sample(self, n, rng):
        w = np.asarray(self.weights)
        ids = rng.choice(len(w), size=n, p=w / w.sum())
        out = np.empty((n, self.dim))
        for k, comp in enumerate(self.components):
            rows = np.flatnonzero(ids == k)
            if rows.size:
                out[rows] = comp._sample(rows.size, rng)
        return out

    def _margin(self, coords):
        return FiniteMixture(self.weights, tuple(c.margin(coords) for c in self.components))

    def survival(self):
        return FiniteMixture(self.weights, tuple(c.survival() for c in self.components))

    def _diagonal(self, u):
        return sum(w * c._diagonal(u) for w, c in self.pairs() if w > 0)

    def _conditional(self, u1, u2):
        return sum(w * c._conditional(u1, u2) for w, c in self.pairs() if w > 0)

    def _tail(self):
        lo = sum(w * c.tail_coeffs()[0] for w, c in self.pairs() if w > 0)
        up = sum(w * c.tail_coeffs()[1] for w, c in self.pairs() if w > 0)
        return lo, up

    def blomqvist_beta(self):
        if self.dim != 2:
            return None
        vals = [c.blomqvist_beta() for c in self.components]
        if any(v is None for v in vals):
            return None
        return sum(w * v for w, v in zip(self.weights, vals))


@dataclass(frozen=True)
class ProductCopula(Copula):
    """Independent blocks: ``blocks[i] = (coords, copula)`` with 1-based coords partitioning ``1..dim``."""

    blocks: tuple[tuple[tuple[int, ...], Copula], ...]
    name = "product"

    def __post_init__(self) -> None:
        seen = sorted(j for coords, _ in self.blocks for j in coords)
        if seen != list(range(1, len(seen) + 1)):
            raise DimensionError("block coordinates must partition 1..dim")
        for coords, cop in self.blocks:
            if len(coords) != cop.dim:
                raise DimensionError("block copula dimension does not match its coordinates")

    @property
    def dim(self) -> int:  # type: ignore[override]
        return sum(len(c) for c, _ in self.blocks)

    @property
    def capability(self):
        caps = [c.capability for _, c in self.blocks]
        return Capability(
            has_cdf=all(c.has_cdf for c in caps),
            has_density=all(c.has_density for c in caps),
            has_conditional2d=self.dim == 2 and all(c.has_conditional2d for c in caps),
            has_survival_closed=all(c.has_survival_closed for c in caps),
            has_tail_coeffs=self.dim == 2 and all(c.has_tail_coeffs for c in caps),
        )

    def _cols(self, coords):
        return [j - 1 for j in coords]

    def _cdf(self, rows):
        out = np.ones(rows.shape[0])
        for coords, cop in self.blocks:
            out *= cop._cdf(rows[:, self._cols(coords)])
        return out

    def _density(self, rows):
        out = np.ones(rows.shape[0])
        for coords, cop in self.blocks:
            out *= cop._density(rows[:, self._cols(coords)])
        return out

    def _sample(self, n, rng):
        out = np.empty((n, self.dim))
        for coords, cop in self.blocks:
            out[:, self._cols(coords)] = cop._sample(n, rng)
        return out

    def _margin(self, coords):
        pos = {c: i for i, c in enumerate(coords, start=1)}
        blocks = []
        for bc, cop in self.blocks:
            keep = [i for i, j in enumerate(bc, start=1) if j in pos]
            if keep:
                blocks.append((tuple(pos[bc[i - 1]] for i in keep), cop.margin(keep)))
        return ProductCopula(tuple(blocks))

    def survival(self):
        return ProductCopula(tuple((c, cop.survival()) for c, cop in self.blocks))

    def _diagonal(self, u):
        out = np.ones_like(u)
        for _, cop in self.blocks:
            out *= cop._diagonal(u)
        return out

    def _joint_pair(self) -> Copula | None:
        for coords, cop in self.blocks:
            if len(coords) == 2:
                return cop
        return None

    def _conditional(self, u1, u2):
        pair = self._joint_pair()
        return u2.copy() if pair is None else pair._conditional(u1, u2)

    def _tail(self):
        pair = self._joint_pair()
        return (0.0, 0.0) if pair is None else pair.tail_coeffs()


@dataclass(frozen=True)
class SurvivalCopula(Copula):
    """Copula of ``1 - U`` for ``U ~ base``, evaluated by inclusion-exclusion."""

    base: Copula
    name = "survival"

    def __post_init__(self) -> None:
        if self.base.dim > SIEVE_CAP:
            raise EnumerationCapError(f"survival sieve capped at dimension {SIEVE_CAP}")

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.base.dim

    @property
    def capability(self):
        cap = self.base.capability
        return Capability(
            has_cdf=cap.has_cdf,
            has_density=cap.has_density,
            has_conditional2d=cap.has_conditional2d,
            has_survival_closed=False,
            has_tail_coeffs=cap.has_tail_coeffs,
        )

    @property
    def radially_symmetric(self):  # type: ignore[override]
        return self.base.radially_symmetric

    @property
    def exchangeable(self):  # type: ignore[override]
        return self.base.exchangeable

    @cached_property
    def _subsets(self) -> tuple[np.ndarray, np.ndarray]:
        masks = np.array(list(itertools.product((False, True), repeat=self.dim)), dtype=bool)
        return masks, (-1.0) ** masks.sum(axis=1)

    def _cdf(self, rows):
        masks, signs = self._subsets
        out = np.zeros(rows.shape[0])
        for mask, sign in zip(masks, signs):
            pts = np.where(mask, 1.0 - rows, 1.0)
            out += sign * self.base._cdf(pts)
        return np.clip(out, 0.0, 1.0)

    def _density(self, rows):
        return self.base._density(1.0 - rows)

    def _sample(self, n, rng):
        return 1.0 - self.base._sample(n, rng)

    def _margin(self, coords):
        return self.base.margin(coords).survival()

    def survival(self):
        return self.base

    def _conditional(self, u1, u2):
        return 1.0 - self.base._conditional(1.0 - u1, 1.0 - u2)

    def _tail(self):
        lo, up = self.base.tail_coeffs()
        return up, lo

    def kendall_tau(self):
        return self.base.kendall_tau()

    def spearman_rho(self):
        return self.base.spearman_rho()

    def blomqvist_beta(self):
        return self.base.blomqvist_beta()

    @property
    def uniform_inputs(self):
        return self.base.uniform_inputs

    def transform_uniforms(self, w):
        return 1.0 - self.base.transform_uniforms(w)
