"""Dependence measures of index-mixed copulas and rank-based estimators.

Pairwise measures reduce to the diagonal pair probabilities of the index law
and base pair measures.  Concordance integrals ``mu(a, b) = int a db`` use a
closed-form table first, then one-dimensional quadrature against M or W, and
finally scrambled Sobol points (``QMC_POINTS`` split into ``QMC_REPLICATES``
independent scramblings, which also give the standard error).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from scipy import integrate, stats
from scipy.stats import qmc

from .base_copulas import (
    EFGM,
    Comonotone,
    Copula,
    Countermonotone,
    FiniteMixture,
    GaussianSampleOnly,
    Independence,
    ProductCopula,
    SurvivalCopula,
)
from .errors import CapabilityError, DimensionError, DomainError
from .index_mixed import IndexMixedCopula, cube_grid, make_index_mixed
from .index_model import IndexDistribution, marginal_index_probabilities

QMC_POINTS = 2**17
QMC_SEED = 20240611
QMC_REPLICATES = 8
GRID_TOL = 1e-12


@dataclass(frozen=True)
class ConcordanceIntegral:
    value: float
    method: str
    stderr: float = 0.0
    n: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    method: str = "closed_form"


@dataclass
class PairMeasureMatrix:
    measure: str
    values: np.ndarray
    stderr: np.ndarray | None = None
    methods: dict[tuple[int, int], str] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int]) -> float:
        """1-based pair lookup."""
        j1, j2 = key
        return float(self.values[j1 - 1, j2 - 1])

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"measure": self.measure, "values": self.values.tolist()}
        if self.stderr is not None:
            out["stderr"] = self.stderr.tolist()
        if self.methods:
            out["methods"] = {f"{a},{b}": m for (a, b), m in sorted(self.methods.items())}
        return out


def as_index_mixed(c: Copula) -> IndexMixedCopula:
    """View any copula as a single-base index mixture."""
    if isinstance(c, IndexMixedCopula):
        return c
    return make_index_mixed([c], IndexDistribution.point_mass((1,) * c.dim, 1))


# -- concordance integrals ----------------------------------------------------------


def _expand(c: Copula) -> list[tuple[float, Copula]]:
    """Write a bivariate model as a finite mixture of non-mixture pieces."""
    if c.dim != 2:
        raise DimensionError("concordance integrals are bivariate")
    if isinstance(c, IndexMixedCopula):
        return _expand(c.bivariate_margin(1, 2))
    if isinstance(c, FiniteMixture):
        return [(w * v, piece) for w, comp in c.pairs() if w > 0 for v, piece in _expand(comp)]
    if isinstance(c, ProductCopula):
        pair = c._joint_pair()
        return [(1.0, Independence(2))] if pair is None else _expand(pair)
    if isinstance(c, SurvivalCopula) and isinstance(c.base, (FiniteMixture, IndexMixedCopula, ProductCopula)):
        return [(w, piece.survival()) for w, piece in _expand(c.base)]
    return [(1.0, c)]


def _closed_mu(a: Copula, b: Copula) -> float | None:
    if isinstance(b, Independence) and a.spearman_rho() is not None:
        return (a.spearman_rho() + 3.0) / 12.0
    if isinstance(a, Independence) and b.spearman_rho() is not None:
        return (b.spearman_rho() + 3.0) / 12.0
    if a == b and a.kendall_tau() is not None:
        return (a.kendall_tau() + 1.0) / 4.0
    if isinstance(a, EFGM) and isinstance(b, EFGM):
        return 0.25 + (a.params.theta((1, 2)) + b.params.theta((1, 2))) / 36.0
    if {type(a), type(b)} == {Comonotone, Countermonotone}:
        return 0.25
    return None


@lru_cache(maxsize=1)
def _legendre_square(n: int = 400) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = (x + 1.0) / 2.0, w / 2.0
    return np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1), w


def _quadrature_mu(a: Copula, b: Copula) -> float | None:
    """Integrals against a singular copula reduce to one dimension; against
    independence they are a smooth double integral of the cdf."""
    if isinstance(a, Independence) or isinstance(b, Independence):
        other = b if isinstance(a, Independence) else a
        if other.capability.has_cdf:
            grid, w = _legendre_square()
            return float(w @ np.asarray(other.cdf(grid)) @ w)
    singular = (Comonotone, Countermonotone)
    if isinstance(a, singular):
        a, b = b, a
    elif not isinstance(b, singular):
        return None
    if isinstance(b, Comonotone):
        f: Callable[[float], float] = lambda t: float(a.cdf([t, t]))
    else:
        f = lambda t: float(a.cdf([t, 1.0 - t]))
    try:
        f(0.5)
    except CapabilityError:
        return None
    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return float(val)


def _sobol_replicates(dim: int, n: int, seed: int) -> list[np.ndarray]:
    if n < 2 * QMC_REPLICATES or n & (n - 1):
        raise DomainError(f"quasi-Monte Carlo budget must be a power of two >= {2 * QMC_REPLICATES}, got {n}")
    m = int(math.log2(n // QMC_REPLICATES))
    out = []
    for r in range(QMC_REPLICATES):
        engine = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng([seed, r]))
        out.append(engine.random_base2(m))
    return out


def _qmc_expectation(fn: Callable[[np.ndarray], np.ndarray], dim: int, n: int, seed: int) -> tuple[float, float]:
    means = np.array([float(np.mean(fn(w))) for w in _sobol_replicates(dim, n, seed)])
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(len(means)))


def _qmc_mu(a: Copula, b: Copula, n: int, seed: int) -> tuple[float, float]:
    for integrand, integrator in ((a, b), (b, a)):
        try:
            integrator.transform_uniforms(np.full((1, integrator.uniform_inputs), 0.5))
            integrand.cdf([0.5, 0.5])
        except CapabilityError:
            continue
        return _qmc_expectation(
            lambda w: np.asarray(integrand.cdf(integrator.transform_uniforms(w))),
            integrator.uniform_inputs,
            n,
            seed,
        )
    raise CapabilityError(f"cannot integrate {a.name} against {b.name}: no cdf/transform pairing")


@lru_cache(maxsize=512)
def _mu_piece(a: Copula, b: Copula, n: int, seed: int, method: str) -> tuple[float, float, str]:
    if isinstance(a, SurvivalCopula) and isinstance(b, SurvivalCopula):
        return _mu_piece(a.base, b.base, n, seed, method)
    if method == "auto":
        val = _closed_mu(a, b)
        if val is not None:
            return val, 0.0, "closed_form"
        val = _quadrature_mu(a, b)
        if val is not None:
            return val, 0.0, "quadrature"
    mean, se = _qmc_mu(a, b, n, seed)
    return mean, se, f"quasi_monte_carlo(n={n}, seed={seed})"


def concordance_integral(
    ca: Copula, cb: Copula, n: int = QMC_POINTS, seed: int = QMC_SEED, method: str = "auto"
) -> ConcordanceIntegral:
    """``mu(ca, cb) = int ca dcb`` for bivariate copulas.

    ``method="qmc"`` bypasses the closed-form and quadrature shortcuts (used to
    cross-check them).  Mixtures are expanded linearly on both sides.
    """
    if method not in ("auto", "qmc"):
        raise DomainError(f"unknown integration method {method!r}")
    total = 0.0
    var = 0.0
    methods = set()
    for wa, pa in _expand(ca):
        for wb, pb in _expand(cb):
            val, se, how = _mu_piece(pa, pb, n, seed, method)
            total += wa * wb * val
            var += (wa * wb * se) ** 2
            methods.add(how.split("(")[0])
    stochastic = "quasi_monte_carlo" in methods
    if stochastic:
        label = f"quasi_monte_carlo(n={n}, seed={seed})"
    elif "quadrature" in methods:
        label = "quadrature"
    else:
        label = "closed_form"
    return ConcordanceIntegral(
        value=float(total),
        method=label,
        stderr=math.sqrt(var),
        n=n if stochastic else None,
        seed=seed if stochastic else None,
    )


# -- pairwise measures -------------------------------------------------------------


def _diag_pair(m: Copula, j1: int, j2: int) -> tuple[IndexMixedCopula, np.ndarray]:
    mm = as_index_mixed(m)
    if not 1 <= j1 < j2 <= mm.dim:
        raise DimensionError(f"need 1 <= j1 < j2 <= {mm.dim}, got ({j1}, {j2})")
    table = marginal_index_probabilities(mm.index, (j1, j2))
    return mm, np.diag(table).copy()


def _rho_piece(c: Copula, n: int, seed: int) -> Estimate:
    mu = concordance_integral(c, Independence(2), n, seed)
    return Estimate(12.0 * mu.value - 3.0, 12.0 * mu.stderr, mu.method)


def _tau_piece(a: Copula, b: Copula, n: int, seed: int) -> Estimate:
    if a == b and a.kendall_tau() is not None:
        return Estimate(float(a.kendall_tau()))
    mu = concordance_integral(a, b, n, seed)
    return Estimate(4.0 * mu.value - 1.0, 4.0 * mu.stderr, mu.method)


def _combine_methods(parts: list[str]) -> str:
    for tag in ("quasi_monte_carlo", "quadrature"):
        hits = [p for p in parts if p.startswith(tag)]
        if hits:
            return hits[0]
    return "closed_form"


def spearman_estimate(m: Copula, j1: int = 1, j2: int = 2, n: int = QMC_POINTS, seed: int = QMC_SEED) -> Estimate:
    mm, diag = _diag_pair(m, j1, j2)
    value, var, methods = 0.0, 0.0, []
    for k, p in enumerate(diag):
        if p > 0:
            est = _rho_piece(mm.bases[k].margin((j1, j2)), n, seed)
            value += p * est.value
            var += (p * est.stderr) ** 2
            methods.append(est.method)
    return Estimate(value, math.sqrt(var), _combine_methods(methods))


def spearman_rho_pair(m: Copula, j1: int = 1, j2: int = 2, **kw: Any) -> float:
    return spearman_estimate(m, j1, j2, **kw).value


def kendall_estimate(m: Copula, j1: int = 1, j2: int = 2, n: int = QMC_POINTS, seed: int = QMC_SEED) -> Estimate:
    mm, diag = _diag_pair(m, j1, j2)
    slots = [k for k, p in enumerate(diag) if p > 0]
    pair = {k: mm.bases[k].margin((j1, j2)) for k in slots}
    value, var, methods = 0.0, 0.0, []
    for k in slots:
        est = _tau_piece(pair[k], pair[k], n, seed)
        value += diag[k] ** 2 * est.value
        var += (diag[k] ** 2 * est.stderr) ** 2
        methods.append(est.method)
    for a_i, k1 in enumerate(slots):
        for k2 in slots[a_i + 1 :]:
            est = _tau_piece(pair[k1], pair[k2], n, seed)
            value += 2.0 * diag[k1] * diag[k2] * est.value
            var += (2.0 * diag[k1] * diag[k2] * est.stderr) ** 2
            methods.append(est.method)
    off = 1.0 - float(diag.sum())
    if off > 1e-15:
        for k in slots:
            est = _rho_piece(pair[k], n, seed)
            value += 2.0 / 3.0 * off * diag[k] * est.value
            var += (2.0 / 3.0 * off * diag[k] * est.stderr) ** 2
            methods.append(est.method)
    return Estimate(value, math.sqrt(var), _combine_methods(methods))


def kendall_tau_pair(m: Copula, j1: int = 1, j2: int = 2, **kw: Any) -> float:
    return kendall_estimate(m, j1, j2, **kw).value


def blomqvist_beta_pair(m: Copula, j1: int = 1, j2: int = 2) -> float:
    mm, diag = _diag_pair(m, j1, j2)
    total = 0.0
    for k, p in enumerate(diag):
        if p > 0:
            beta = mm.bases[k].margin((j1, j2)).blomqvist_beta()
            if beta is None:
                raise CapabilityError(f"base {k + 1} pair margin has no Blomqvist beta")
            total += p * beta
    return float(total)


def tail_pair(m: Copula, j1: int, j2: int) -> tuple[float, float]:
    mm, diag = _diag_pair(m, j1, j2)
    lo = up = 0.0
    for k, p in enumerate(diag):
        if p > 0:
            a, b = mm.bases[k].margin((j1, j2)).tail_coeffs()
            lo += p * a
            up += p * b
    return float(lo), float(up)


def tail_dependence_matrix(m: Copula, side: str = "lower") -> PairMeasureMatrix:
    if side not in ("lower", "upper"):
        raise DomainError("side must be 'lower' or 'upper'")
    d = m.dim
    vals = np.eye(d)
    for j1 in range(1, d + 1):
        for j2 in range(j1 + 1, d + 1):
            lo, up = tail_pair(m, j1, j2)
            vals[j1 - 1, j2 - 1] = vals[j2 - 1, j1 - 1] = lo if side == "lower" else up
    return PairMeasureMatrix(measure=f"lambda_{side[0]}", values=vals)


def pair_measure_matrix(m: Copula, measure: str, n: int = QMC_POINTS, seed: int = QMC_SEED) -> PairMeasureMatrix:
    """Matrix of ``rho_S``, ``tau`` or ``beta`` over all coordinate pairs."""
    d = m.dim
    vals = np.eye(d)
    errs = np.zeros((d, d))
    methods = {}
    for j1 in range(1, d + 1):
        for j2 in range(j1 + 1, d + 1):
            if measure == "rho_S":
                est = spearman_estimate(m, j1, j2, n, seed)
            elif measure == "tau":
                est = kendall_estimate(m, j1, j2, n, seed)
            elif measure == "beta":
                est = Estimate(blomqvist_beta_pair(m, j1, j2))
            else:
                raise DomainError(f"unknown measure {measure!r}")
            vals[j1 - 1, j2 - 1] = vals[j2 - 1, j1 - 1] = est.value
            errs[j1 - 1, j2 - 1] = errs[j2 - 1, j1 - 1] = est.stderr
            methods[(j1, j2)] = est.method
    return PairMeasureMatrix(measure=measure, values=vals, stderr=errs, methods=methods)


# -- multivariate measures ----------------------------------------------------------


def _orthant_moment(c: Copula, upper: bool, n: int, seed: int) -> Estimate:
    """``int C dPi`` (lower) or ``int Pi dC`` (upper) over the unit cube."""
    D = c.dim
    if D == 1:
        return Estimate(0.5)
    if isinstance(c, Independence):
        return Estimate(0.5**D)
    if isinstance(c, Comonotone):
        return Estimate(1.0 / (D + 1))
    if isinstance(c, Countermonotone):
        return Estimate(1.0 / 6.0)
    if isinstance(c, EFGM):
        ratio = -1.0 / 3.0 if upper else 1.0 / 3.0
        return Estimate(0.5**D * (1.0 + sum(v * ratio ** len(s) for s, v in c.params.thetas)))
    if isinstance(c, SurvivalCopula):
        return _orthant_moment(c.base, not upper, n, seed)
    if isinstance(c, FiniteMixture):
        parts = [(w, _orthant_moment(comp, upper, n, seed)) for w, comp in c.pairs() if w > 0]
        return _mix_estimates(parts)
    if isinstance(c, ProductCopula):
        return _product_estimates([_orthant_moment(cop, upper, n, seed) for _, cop in c.blocks])
    if isinstance(c, IndexMixedCopula):
        parts = []
        for p, blocks in c.terms:
            parts.append((p, _product_estimates([_orthant_moment(cop, upper, n, seed) for _, cop in blocks])))
        return _mix_estimates(parts)
    if D == 2:
        # bivariate symmetry of the concordance integral
        mu = concordance_integral(c, Independence(2), n, seed)
        return Estimate(mu.value, mu.stderr, mu.method)
    if isinstance(c, GaussianSampleOnly):
        fn = lambda w: np.prod(c.transform_uniforms(w), axis=1)
        mean, se = _qmc_expectation(fn, D, n, seed)
        return Estimate(mean, se, f"quasi_monte_carlo(n={n}, seed={seed})")
    target = SurvivalCopula(c) if upper else c
    mean, se = _qmc_expectation(lambda w: np.asarray(target.cdf(w)), D, n, seed)
    return Estimate(mean, se, f"quasi_monte_carlo(n={n}, seed={seed})")


def _mix_estimates(parts: list[tuple[float, Estimate]]) -> Estimate:
    value = sum(w * e.value for w, e in parts)
    se = math.sqrt(sum((w * e.stderr) ** 2 for w, e in parts))
    return Estimate(value, se, _combine_methods([e.method for _, e in parts]))


def _product_estimates(parts: list[Estimate]) -> Estimate:
    value = math.prod(e.value for e in parts)
    rel = math.sqrt(sum((e.stderr / e.value) ** 2 for e in parts if e.value))
    return Estimate(value, abs(value) * rel, _combine_methods([e.method for e in parts]))


def _spearman_scale(D: int) -> float:
    return (D + 1.0) / (2.0**D - (D + 1.0))


def block_spearman(c: Copula, variant: str, n: int = QMC_POINTS, seed: int = QMC_SEED) -> Estimate:
    """``rho^{l,D}`` or ``rho^{u,D}`` of a single ``D``-dimensional copula, ``D >= 2``."""
    D = c.dim
    mom = _orthant_moment(c, variant == "upper", n, seed)
    h = _spearman_scale(D)
    return Estimate(h * (2.0**D * mom.value - 1.0), h * 2.0**D * mom.stderr, mom.method)


def multivariate_spearman_estimate(
    m: Copula, variant: str = "lower", n: int = QMC_POINTS, seed: int = QMC_SEED
) -> Estimate:
    """Index-mixture expansion over blocks of the multivariate Spearman's rho."""
    if variant == "center":
        lo = multivariate_spearman_estimate(m, "lower", n, seed)
        up = multivariate_spearman_estimate(m, "upper", n, seed)
        return Estimate(0.5 * (lo.value + up.value), 0.5 * math.hypot(lo.stderr, up.stderr), _combine_methods([lo.method, up.method]))
    if variant not in ("lower", "upper"):
        raise DomainError("variant must be lower, upper or center")
    mm = as_index_mixed(m)
    d = mm.dim
    if d < 2:
        raise DimensionError("multivariate Spearman's rho needs d >= 2")
    parts = []
    for p, blocks in mm.terms:
        factors = []
        for _, cop in blocks:
            D = cop.dim
            if D <= 1:
                continue  # factor 1
            rho = block_spearman(cop, variant, n, seed)
            coef = (2.0**D - (D + 1.0)) / (D + 1.0)
            factors.append(Estimate(coef * rho.value + 1.0, coef * rho.stderr, rho.method))
        parts.append((p, _product_estimates(factors) if factors else Estimate(1.0)))
    mix = _mix_estimates(parts)
    h = _spearman_scale(d)
    return Estimate(h * (mix.value - 1.0), h * mix.stderr, mix.method)


def multivariate_spearman(m: Copula, variant: str = "lower", **kw: Any) -> float:
    return multivariate_spearman_estimate(m, variant, **kw).value


def _half(d: int) -> np.ndarray:
    return np.full(d, 0.5)


def blomqvist_beta_multivariate(m: Copula, path: str = "general") -> float:
    """Multivariate Blomqvist's beta.

    ``path`` is ``"general"`` (uses ``C`` and the survival copula at the
    centre), ``"radial"`` (``C`` only) or ``"product"`` (block expansion of the
    radial form).  The last two are valid for radially symmetric models only.
    """
    d = m.dim
    if d < 2:
        raise DimensionError("multivariate Blomqvist's beta needs d >= 2")
    denom = 2.0 ** (d - 1) - 1.0
    if path == "general":
        c = float(m.cdf(_half(d)))
        s = float(m.survival().cdf(_half(d)))
        return (2.0 ** (d - 1) * (c + s) - 1.0) / denom
    if path == "radial":
        return (2.0**d * float(m.cdf(_half(d))) - 1.0) / denom
    if path == "product":
        mm = as_index_mixed(m)
        total = 0.0
        for p, blocks in mm.terms:
            prod = 1.0
            for _, cop in blocks:
                D = cop.dim
                if D >= 2:
                    prod *= (2.0 ** (D - 1) - 1.0) * blomqvist_beta_multivariate(cop, "general") + 1.0
            total += p * prod
        return (total - 1.0) / denom
    raise DomainError(f"unknown path {path!r}")


# -- orthant dependence and concordance order ------------------------------------------


@dataclass(frozen=True)
class OrthantReport:
    plod: bool
    puod: bool
    pod: bool
    witness: tuple[float, ...] | None
    bases_sufficient: bool
    label: str = "grid-verified"


def _upper_orthant(c: Copula, pts: np.ndarray) -> np.ndarray:
    """``P(U > u)`` through the survival copula."""
    return np.asarray(c.survival().cdf(1.0 - pts))


def _orthant_flags(c: Copula, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lower_bad = np.asarray(c.cdf(pts)) < np.prod(pts, axis=1) - GRID_TOL
    upper_bad = _upper_orthant(c, pts) < np.prod(1.0 - pts, axis=1) - GRID_TOL
    return lower_bad, upper_bad


def orthant_dependence_check(m: Copula, grid_resolution: int | None = None) -> OrthantReport:
    pts = cube_grid(m.dim, grid_resolution)
    lower_bad, upper_bad = _orthant_flags(m, pts)
    witness = None
    for bad in (lower_bad, upper_bad):
        if bad.any() and witness is None:
            witness = tuple(float(x) for x in pts[int(np.argmax(bad))])
    mm = as_index_mixed(m)
    sufficient = True
    for base in mm.bases:
        lb, ub = _orthant_flags(base, pts)
        sufficient &= not (lb.any() or ub.any())
    plod = not lower_bad.any()
    puod = not upper_bad.any()
    return OrthantReport(plod, puod, plod and puod, witness, bool(sufficient))


@dataclass(frozen=True)
class OrderVerdict:
    lower: str
    upper: str
    witnesses: dict[str, tuple[float, ...]]
    label: str = "grid-verified"


def _order(a: np.ndarray, b: np.ndarray, pts: np.ndarray, side: str, wit: dict) -> str:
    diff = a - b
    le = bool(np.all(diff <= GRID_TOL))
    ge = bool(np.all(diff >= -GRID_TOL))
    if le and ge:
        return "="
    if le:
        return "<="
    if ge:
        return ">="
    wit[f"{side}:first>second"] = tuple(float(x) for x in pts[int(np.argmax(diff))])
    wit[f"{side}:first<second"] = tuple(float(x) for x in pts[int(np.argmin(diff))])
    return "incomparable"


def concordance_compare(m1: Copula, m2: Copula, grid_resolution: int | None = None) -> OrderVerdict:
    """Pointwise lower- and upper-orthant order of two models on a grid.

    Witnesses for incomparability are the grid points of largest violation in
    each direction.
    """
    if m1.dim != m2.dim:
        raise DimensionError("models must have equal dimension")
    pts = cube_grid(m1.dim, grid_resolution)
    wit: dict[str, tuple[float, ...]] = {}
    lower = _order(np.asarray(m1.cdf(pts)), np.asarray(m2.cdf(pts)), pts, "lower", wit)
    upper = _order(_upper_orthant(m1, pts), _upper_orthant(m2, pts), pts, "upper", wit)
    return OrderVerdict(lower, upper, wit)


# -- empirical estimators ------------------------------------------------------------


def pseudo_observations(samples: np.ndarray) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    return stats.rankdata(x, axis=0, method="ordinal") / (x.shape[0] + 1.0)


def _lower_left_counts(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """``#{k : x_k < x_i and y_k < y_i}`` for distinct integer ranks, by block merging."""
    n = rx.size
    order = np.argsort(rx, kind="stable")
    y = ry[order].astype(np.int64)
    pos = np.arange(n)
    counts = np.zeros(n, dtype=np.int64)
    b = 1
    while b < n:
        pair = (pos // (2 * b)).astype(np.int64)
        left = (pos % (2 * b)) < b
        keys = np.sort(pair[left] * n + y[left])
        rpair = pair[~left] * n
        counts[pos[~left]] += np.searchsorted(keys, rpair + y[~left]) - np.searchsorted(keys, rpair)
        b *= 2
    out = np.empty(n, dtype=np.int64)
    out[order] = counts
    return out


def kendall_with_sigma(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Kendall's tau and its asymptotic standard deviation from the projection ``h_1``."""
    n = x.size
    tau = float(stats.kendalltau(x, y).statistic)
    rx = stats.rankdata(x, method="ordinal") - 1
    ry = stats.rankdata(y, method="ordinal") - 1
    ll = _lower_left_counts(rx, ry)
    conc = 2 * ll + (n - 1) - rx - ry
    disc = rx + ry - 2 * ll
    h1 = (conc - disc) / (n - 1.0)
    return tau, float(2.0 * np.std(h1) / math.sqrt(n))


def rank_moment(samples: np.ndarray, upper: bool) -> tuple[float, float]:
    """Mean of ``prod U_j`` (upper) or ``prod (1 - U_j)`` (lower) over pseudo-observations.

    The standard deviation includes the first-order effect of replacing the
    margins by ranks.
    """
    u = pseudo_observations(samples)
    n, d = u.shape
    g = u if upper else 1.0 - u
    slope = 1.0 if upper else -1.0
    base = np.prod(g, axis=1)
    infl = base.copy()
    for j in range(d):
        others = np.prod(np.delete(g, j, axis=1), axis=1) * slope
        order = np.argsort(-u[:, j], kind="stable")
        tail = np.cumsum(others[order]) / n  # sum over k with u_kj >= u_ij
        term = np.empty(n)
        term[order] = tail
        infl += term
    return float(base.mean()), float(np.std(infl) / math.sqrt(n))


def spearman_with_sigma(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    rho = float(stats.spearmanr(x, y).statistic)
    _, sd = rank_moment(np.column_stack([x, y]), upper=True)
    return rho, 12.0 * sd


def blomqvist_with_sigma(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    u = pseudo_observations(np.column_stack([x, y]))
    n = u.shape[0]
    a = u[:, 0] <= 0.5
    b = u[:, 1] <= 0.5
    beta = 4.0 * float(np.mean(a & b)) - 1.0
    h = 1.0 / math.sqrt(n)

    def emp(s: float, t: float) -> float:
        return float(np.mean((u[:, 0] <= s) & (u[:, 1] <= t)))

    d1 = (emp(0.5 + h, 0.5) - emp(0.5 - h, 0.5)) / (2 * h)
    d2 = (emp(0.5, 0.5 + h) - emp(0.5, 0.5 - h)) / (2 * h)
    infl = (a & b).astype(float) - d1 * a - d2 * b
    return beta, float(4.0 * np.std(infl) / math.sqrt(n))


def empirical_multivariate_spearman(samples: np.ndarray, variant: str = "lower") -> tuple[float, float]:
    d = np.asarray(samples).shape[1]
    h = _spearman_scale(d)
    if variant == "center":
        lo = empirical_multivariate_spearman(samples, "lower")
        up = empirical_multivariate_spearman(samples, "upper")
        return 0.5 * (lo[0] + up[0]), 0.5 * math.hypot(lo[1], up[1])
    mean, sd = rank_moment(samples, upper=variant == "upper")
    return h * (2.0**d * mean - 1.0), h * 2.0**d * sd


@dataclass
class EmpiricalMeasures:
    rho_S: PairMeasureMatrix
    tau: PairMeasureMatrix
    beta: PairMeasureMatrix


def empirical_measures(samples: np.ndarray) -> EmpiricalMeasures:
    """Rank estimators of all pairwise Spearman's rho, Kendall's tau and Blomqvist's beta."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DomainError("need a sample matrix with at least two rows")
    d = x.shape[1]
    out = {}
    for key, fn in (("rho_S", spearman_with_sigma), ("tau", kendall_with_sigma), ("beta", blomqvist_with_sigma)):
        vals = np.eye(d)
        errs = np.zeros((d, d))
        for a in range(d):
            for b in range(a + 1, d):
                v, s = fn(x[:, a], x[:, b])
                vals[a, b] = vals[b, a] = v
                errs[a, b] = errs[b, a] = s
        out[key] = PairMeasureMatrix(measure=key, values=vals, stderr=errs, methods={})
    return EmpiricalMeasures(**out)
