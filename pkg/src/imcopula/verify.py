"""Invariant checks over a fleet of models, reported as verdicts.

The default fleet pins the closed-form identities and worked values of the
construction.  A user fleet (``{"models": [{"name": ..., "copula": ...}]}``)
gets the generic copula axioms plus EFGM admissibility where relevant.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from .base_copulas import (
    EFGM,
    Clayton,
    Comonotone,
    Copula,
    Countermonotone,
    FiniteMixture,
    GaussianSampleOnly,
    Gumbel,
    Independence,
)
from .config import ConfigError, copula_from_descriptor, efgm_parameters
from .dependence import (
    blomqvist_beta_multivariate,
    blomqvist_beta_pair,
    concordance_compare,
    kendall_tau_pair,
    kendall_with_sigma,
    multivariate_spearman,
    orthant_dependence_check,
    spearman_rho_pair,
)
from .efgm import (
    BernoulliVectorLaw,
    EfgmParameters,
    bernoulli_from_thetas,
    efgm_admissible,
    efgm_cdf,
    efgm_concordance_range,
    efgm_mixture_cdf,
    thetas_from_bernoulli,
)
from .errors import CopulaError
from .index_mixed import IndexMixedCopula, check_exchangeable, cube_grid
from .index_model import IndexDistribution, rectangle_masses
from .sums import (
    JointModel,
    dkw_threshold,
    exp_sum_distribution,
    ks_distance,
    ls_transform,
    mc_sum_cdf,
)


@dataclass
class Verdict:
    name: str
    passed: bool
    observed: Any
    tolerance: float | None
    method: str
    expected: Any = None
    detail: str = ""


@dataclass
class RunReport:
    command: str
    seed: int
    verdicts: list[Verdict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "seed": self.seed,
            "passed": self.passed,
            "verdicts": [asdict(v) for v in self.verdicts],
            "timings": self.timings,
            "artifacts": self.artifacts,
        }


def _jsonable(x: Any) -> Any:
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def close(name: str, observed: float, expected: float, tol: float, method: str, detail: str = "") -> Verdict:
    observed = float(observed)
    return Verdict(name, abs(observed - expected) <= tol, observed, tol, method, float(expected), detail)


def bound(name: str, observed: float, limit: float, method: str, detail: str = "") -> Verdict:
    """Passes when ``observed <= limit``; ``limit`` doubles as the tolerance."""
    observed = float(observed)
    return Verdict(name, observed <= limit, observed, float(limit), method, None, detail)


def flag(name: str, ok: bool, observed: Any, method: str, detail: str = "") -> Verdict:
    return Verdict(name, bool(ok), _jsonable(observed), None, method, None, detail)


# -- shared model builders ------------------------------------------------------------


def ordering_example() -> IndexMixedCopula:
    """Bases (M, W) with diagonal masses 1/4 each and 1/2 off the diagonal."""
    idx = IndexDistribution.from_table(2, 2, {(1, 1): 0.25, (2, 2): 0.25, (1, 2): 0.25, (2, 1): 0.25})
    return IndexMixedCopula((Comonotone(2), Countermonotone(2)), idx)


def four_dim_example() -> IndexMixedCopula:
    idx = IndexDistribution.from_table(4, 2, {(1, 1, 2, 2): 1 / 2, (1, 2, 1, 2): 1 / 3, (2, 2, 1, 1): 1 / 6})
    return IndexMixedCopula((Gumbel.from_tau(0.5, 4), GaussianSampleOnly.from_tau(0.5, 4)), idx)


def half_half(d: int, bases: tuple[Copula, Copula] | None = None) -> IndexMixedCopula:
    bases = bases or (Independence(d), Comonotone(d))
    return IndexMixedCopula(bases, IndexDistribution.comonotone([0.5, 0.5], d))


def independent_bernoulli_index(d: int) -> IndexDistribution:
    return IndexDistribution.bernoulli_copula([(0.5, Independence(d))])


# -- generic invariants ---------------------------------------------------------------


def copula_axioms(name: str, c: Copula, resolution: int | None = None, tol: float = 1e-12) -> list[Verdict]:
    d = c.dim
    res = resolution or {2: 11, 3: 7, 4: 5}.get(d, 4)
    axis = np.linspace(0.0, 1.0, res)
    pts = cube_grid(d, res)
    grounded = 0.0
    margins = 0.0
    for j in range(d):
        zero = pts.copy()
        zero[:, j] = 0.0
        grounded = max(grounded, float(np.max(np.abs(np.asarray(c.cdf(zero))))))
        ones = np.ones((res, d))
        ones[:, j] = axis
        margins = max(margins, float(np.max(np.abs(np.asarray(c.cdf(ones)) - axis))))
    mass = float(rectangle_masses(c, [axis] * d).min())
    return [
        bound(f"{name}: groundedness", grounded, tol, f"max |C| with one zero coordinate, {res}^{d} grid"),
        bound(f"{name}: uniform margins", margins, tol, f"max |C(1..u_j..1) - u_j| on {res} points"),
        Verdict(f"{name}: rectangle mass", mass >= -tol, mass, tol, f"minimum cell mass over a {res - 1}^{d} partition"),
    ]


def density_vs_cdf(name: str, c: Copula, points: np.ndarray, h: float = 1e-4, tol: float = 1e-5) -> Verdict:
    """Mixed partial of the bivariate cdf by central differences against the density."""
    pts = np.asarray(points, dtype=float)
    worst = 0.0
    for u, v in pts:
        fd = (
            c.cdf([u + h, v + h]) - c.cdf([u + h, v - h]) - c.cdf([u - h, v + h]) + c.cdf([u - h, v - h])
        ) / (4 * h * h)
        worst = max(worst, abs(float(fd) - float(c.density([u, v]))))
    return bound(f"{name}: density vs cdf", worst, tol, f"central difference h={h}")


def conditional_vs_cdf(name: str, m: IndexMixedCopula, j1: int, j2: int, points: np.ndarray,
                       h: float = 1e-6, tol: float = 1e-5) -> Verdict:
    pair = m.margin((j1, j2))
    worst = 0.0
    for u1, u2 in np.asarray(points, dtype=float):
        fd = (pair.cdf([u1 + h, u2]) - pair.cdf([u1 - h, u2])) / (2 * h)
        worst = max(worst, abs(float(fd) - float(m.conditional_pair(j2, j1, u2, u1))))
    return bound(f"{name}: conditional_pair({j2}|{j1}) vs cdf", worst, tol, f"central difference h={h}")


INTERIOR = np.array([[0.2, 0.3], [0.5, 0.5], [0.7, 0.4], [0.85, 0.9], [0.1, 0.75]])


# -- default fleet ----------------------------------------------------------------------


def check_cdf_identity(seed: int) -> list[Verdict]:
    c = ordering_example()
    out = [
        close("C'(0.75,0.75) of the ordering example", c.cdf([0.75, 0.75]), 0.59375, 1e-12, "exact enumeration"),
        close("C'(0.75,0.25) of the ordering example", c.cdf([0.75, 0.25]), 0.15625, 1e-12, "exact enumeration"),
    ]
    pts = cube_grid(2, 21)
    direct = 0.25 * np.minimum(pts[:, 0], pts[:, 1]) + 0.25 * np.maximum(pts.sum(axis=1) - 1, 0) + 0.5 * pts.prod(axis=1)
    out.append(bound("ordering example equals (M + W + 2 Pi)/4", np.abs(c.cdf(pts) - direct).max(), 1e-12,
                     "21x21 grid against the explicit mixture"))
    return out


def check_density(seed: int) -> list[Verdict]:
    idx = IndexDistribution.from_table(2, 3, {(1, 1): 0.3, (2, 2): 0.25, (1, 3): 0.2, (3, 2): 0.25})
    m = IndexMixedCopula((Clayton(2.0, 2), Gumbel(1.5, 2), Independence(2)), idx)
    return [density_vs_cdf("Clayton/Gumbel/Pi model", m, INTERIOR)]


def check_samplers(seed: int, n: int = 20_000) -> list[Verdict]:
    m = four_dim_example()
    rng = np.random.default_rng(seed)
    samples = {
        "sequential": m.sample_sequential(n, rng),
        "vectorized": m.sample_vectorized(n, rng),
        "efficient": m.sample_efficient(n, rng),
    }
    taus = {k: {} for k in samples}
    for k, x in samples.items():
        for a, b in itertools.combinations(range(4), 2):
            taus[k][(a, b)] = kendall_with_sigma(x[:, a], x[:, b])
    worst = 0.0
    for (k1, k2) in itertools.combinations(samples, 2):
        for pair in taus[k1]:
            (t1, s1), (t2, s2) = taus[k1][pair], taus[k2][pair]
            worst = max(worst, abs(t1 - t2) / math.hypot(s1, s2))
    return [bound("sampler equivalence on the 4d example", worst, 3.0,
                  f"max |tau_a - tau_b| / sigma over 6 pairs and 3 sampler pairs, n={n}")]


def check_comonotone_invariance(seed: int) -> list[Verdict]:
    base = Clayton(2.0, 3)
    m = IndexMixedCopula((base, base, base), IndexDistribution.comonotone([0.2, 0.5, 0.3], 3))
    pts = cube_grid(3, 9)
    return [bound("comonotone index with equal bases returns the base", np.abs(m.cdf(pts) - base.cdf(pts)).max(),
                  1e-12, "9^3 grid")]


def check_margins(seed: int) -> list[Verdict]:
    idx = IndexDistribution.from_table(
        3, 3, {(1, 1, 1): 0.2, (1, 2, 1): 0.15, (2, 2, 3): 0.25, (3, 1, 2): 0.1, (2, 3, 3): 0.3}
    )
    m = IndexMixedCopula((Clayton(2.0, 3), Gumbel(2.0, 3), Comonotone(3)), idx)
    pts2 = cube_grid(2, 21)
    worst2 = 0.0
    for j1, j2 in itertools.combinations((1, 2, 3), 2):
        mix = m.bivariate_margin(j1, j2)
        full = np.ones((len(pts2), 3))
        full[:, j1 - 1], full[:, j2 - 1] = pts2[:, 0], pts2[:, 1]
        worst2 = max(worst2, float(np.abs(mix.cdf(pts2) - m.cdf(full)).max()))
    pts3 = cube_grid(3, 11)
    worst3 = float(np.abs(m.trivariate_margin(1, 2, 3).cdf(pts3) - m.cdf(pts3)).max())
    return [
        bound("bivariate margins as mixtures", worst2, 1e-12, "all 3 pairs, 21x21 grid"),
        bound("trivariate margin decomposition", worst3, 1e-12, "11^3 grid"),
    ]


def check_mixtures(seed: int) -> list[Verdict]:
    bases = (Clayton(3.0, 3), Independence(3))
    i1 = IndexDistribution.comonotone([0.5, 0.5], 3)
    i2 = IndexDistribution.from_table(3, 2, {(1, 2, 1): 0.6, (2, 1, 1): 0.4})
    w = 0.3
    mixed_index = IndexDistribution.from_table(
        3, 2, [(v, w * p) for v, p in i1.items()] + [(v, (1 - w) * p) for v, p in i2.items()]
    )
    lhs = FiniteMixture.of([(w, IndexMixedCopula(bases, i1)), (1 - w, IndexMixedCopula(bases, i2))])
    rhs = IndexMixedCopula(bases, mixed_index)
    pts = cube_grid(3, 9)
    return [bound("mixture of models equals mixed index law", np.abs(lhs.cdf(pts) - rhs.cdf(pts)).max(), 1e-12,
                  "9^3 grid")]


def check_symmetry(seed: int) -> list[Verdict]:
    out = []
    pts2 = cube_grid(2, 21)
    rng = np.random.default_rng(seed)
    table = rng.dirichlet(np.ones(4))
    idx = IndexDistribution.from_table(2, 2, dict(zip(itertools.product((1, 2), repeat=2), table)), renormalize=True)
    m = IndexMixedCopula((Independence(2), Comonotone(2)), idx)
    out.append(bound("(Pi, M) model is radially symmetric", np.abs(m.survival().cdf(pts2) - m.cdf(pts2)).max(),
                     1e-12, "21x21 grid, random index law"))
    c = IndexMixedCopula((Clayton(2.0, 3), Independence(3)), IndexDistribution.uniform(3, 2))
    pts3 = cube_grid(3, 11)
    twice = c.survival().survival()
    out.append(bound("survival of survival is the identity", np.abs(twice.cdf(pts3) - c.cdf(pts3)).max(), 1e-10,
                     "11^3 grid, Clayton-based model"))
    return out


def check_exchangeability(seed: int) -> list[Verdict]:
    bases = (Gumbel(2.0, 3), Clayton(2.0, 3))
    good = check_exchangeable(IndexMixedCopula(bases, IndexDistribution.uniform(3, 2)), 11)
    skew = IndexDistribution.from_table(3, 2, {(1, 1, 2): 0.5, (1, 2, 2): 0.3, (2, 2, 2): 0.2})
    bad = check_exchangeable(IndexMixedCopula(bases, skew), 11)
    return [
        bound("class-uniform index gives an exchangeable model", good.max_deviation, 1e-12, "6 permutations, 11^3 grid"),
        flag("class-nonuniform index shows an asymmetry witness", not bad.invariant and bad.witness is not None,
             bad.witness, "6 permutations, 11^3 grid"),
    ]


def check_tails(seed: int) -> list[Verdict]:
    out = []
    u = 1e-6
    for p in (0.0, 0.25, 0.5, 1.0):
        rest = 1.0 - p
        table = {(1, 1): p, (2, 2): rest / 2, (1, 2): rest / 4, (2, 1): rest / 4}
        m = IndexMixedCopula((Clayton(2.0, 2), Independence(2)), IndexDistribution.from_table(2, 2, table, renormalize=True))
        closed = m.tail_coeffs()[0]
        numeric = float(m.diagonal(u)) / u
        out.append(close(f"lower tail coefficient, p={p}", closed, p * 2 ** -0.5, 1e-12, "closed form"))
        out.append(close(f"lower tail numeric limit, p={p}", numeric, closed, 1e-3, f"C(u,u)/u at u={u}"))
    return out


def check_pairwise(seed: int) -> list[Verdict]:
    m = half_half(2)
    mm = IndexMixedCopula((Comonotone(2), Comonotone(2)), independent_bernoulli_index(2))
    pm = IndexMixedCopula((Independence(2), Comonotone(2)), independent_bernoulli_index(2))
    return [
        close("rho_S of (Pi + M)/2", spearman_rho_pair(m), 0.5, 1e-12, "pairwise mixture formula"),
        close("tau of (Pi + M)/2", kendall_tau_pair(m), 5 / 12, 1e-12, "pairwise mixture formula"),
        close("beta of (Pi + M)/2", blomqvist_beta_pair(m), 0.5, 1e-12, "4C(1/2,1/2) - 1"),
        close("rho_S of (M, M) with independent index", spearman_rho_pair(mm), 0.5, 1e-12, "pairwise mixture formula"),
        close("rho_S of (Pi, M) with independent index", spearman_rho_pair(pm), 0.25, 1e-12, "pairwise mixture formula"),
    ]


def check_multivariate(seed: int) -> list[Verdict]:
    m = half_half(3)
    out = [close(f"multivariate rho_S ({v}) of (Pi + M)/2, d=3", multivariate_spearman(m, v), 0.5, 1e-12,
                 "block product formula") for v in ("lower", "upper")]
    out += [close(f"multivariate beta ({p} path), d=3", blomqvist_beta_multivariate(m, p), 0.5, 1e-12, f"{p} path")
            for p in ("general", "radial", "product")]
    return out


def check_orthant_and_order(seed: int) -> list[Verdict]:
    rep = orthant_dependence_check(half_half(3))
    cmp = concordance_compare(Independence(2), ordering_example())
    w = ordering_example()
    return [
        flag("(Pi, M) model is PLOD and PUOD", rep.pod, {"plod": rep.plod, "puod": rep.puod}, rep.label),
        flag("Pi and the ordering example are incomparable", cmp.lower == "incomparable",
             {"lower": cmp.lower, "upper": cmp.upper}, cmp.label),
        flag("ordering example: C'(0.75,0.75) > Pi and C'(0.75,0.25) < Pi",
             w.cdf([0.75, 0.75]) > 0.5625 and w.cdf([0.75, 0.25]) < 0.1875,
             [float(w.cdf([0.75, 0.75])), float(w.cdf([0.75, 0.25]))], "exact enumeration"),
    ]


def check_sums(seed: int, n: int = 200_000) -> list[Verdict]:
    jm = JointModel.exponential(half_half(2, (Comonotone(2), Independence(2))), 1.0)
    law = exp_sum_distribution(jm)
    ts = np.linspace(0.0, 5.0, 11)
    ls_gap = max(abs(ls_transform(jm, [t, t]) - float(law.ls(t))) for t in ts)
    emp = mc_sum_cdf(jm, np.random.default_rng(seed), n)
    return [
        close("sum example: mean", law.mean(), 2.0, 1e-12, "mixture moments"),
        close("sum example: variance", law.var(), 3.0, 1e-12, "mixture moments"),
        bound("sum example: LS consistency", ls_gap, 1e-10, "11 points in [0, 5]"),
        bound("sum example: KS vs Monte Carlo", ks_distance(emp, law), dkw_threshold(n), f"DKW alpha=0.001, n={n}"),
    ]


def check_k_ge_d(seed: int) -> list[Verdict]:
    d = 3
    table = {v: 1.0 for v in itertools.permutations(range(1, 5), d)}
    total = sum(table.values())
    idx = IndexDistribution.from_table(d, 4, {v: p / total for v, p in table.items()})
    m = IndexMixedCopula((Clayton(2.0, 3), Gumbel(2.0, 3), Comonotone(3), Independence(3)), idx)
    pts = cube_grid(3, 11)
    return [bound("all-distinct index gives independence", np.abs(m.cdf(pts) - pts.prod(axis=1)).max(), 1e-12,
                  "11^3 grid")]


def check_conditional(seed: int) -> list[Verdict]:
    idx = IndexDistribution.from_table(3, 2, {(1, 1, 2): 0.4, (1, 2, 2): 0.35, (2, 2, 1): 0.25})
    m = IndexMixedCopula((Clayton(2.0, 3), Gumbel(1.8, 3)), idx)
    return [conditional_vs_cdf("Clayton/Gumbel model", m, j1, j2, INTERIOR) for j1, j2 in ((1, 2), (1, 3), (2, 3))]


def check_efgm(seed: int) -> list[Verdict]:
    out = []
    bad = efgm_admissible(EfgmParameters.bivariate(1.5))
    out.append(flag("EFGM theta=1.5 is rejected with a witness", not bad.admissible and bad.witness is not None,
                    bad.witness, "sign enumeration"))
    c = EFGM.bivariate(1.0)
    out.append(close("EFGM theta=1 rho_S", spearman_rho_pair(c), 1 / 3, 1e-9, "closed form"))
    out.append(close("EFGM theta=1 tau", kendall_tau_pair(c), 2 / 9, 1e-9, "closed form"))
    rows = efgm_concordance_range((-1.0, 1.0), method="qmc")
    for row in rows:
        th = row["theta"]
        out.append(close(f"EFGM theta={th:g} rho_S by quadrature", row["rho_s"], th / 3, 1e-5, "quasi-Monte Carlo"))
        out.append(close(f"EFGM theta={th:g} tau by quadrature", row["tau"], 2 * th / 9, 1e-5, "quasi-Monte Carlo"))
    lam, lau = c.tail_coeffs()
    out.append(flag("EFGM has no tail dependence", lam == 0.0 and lau == 0.0, [lam, lau], "closed form"))
    out.append(bound("EFGM diagonal limit", float(c.diagonal(1e-6)) / 1e-6, 1e-4, "C(u,u)/u at u=1e-6"))
    law = BernoulliVectorLaw.from_table(3, {(0, 0, 0): 0.3, (1, 1, 1): 0.3, (0, 1, 1): 0.2, (1, 0, 0): 0.2})
    back = bernoulli_from_thetas(thetas_from_bernoulli(law))
    gap = max(abs(law.probs[law.vectors.index(v)] - p) if v in law.vectors else p for v, p in zip(back.vectors, back.probs))
    out.append(bound("EFGM parameters and symmetric Bernoulli laws round-trip", gap, 1e-12, "explicit bijection"))
    pts = cube_grid(3, 7)
    gap = np.abs(efgm_cdf(thetas_from_bernoulli(law), pts) - efgm_mixture_cdf(law, pts)).max()
    out.append(bound("EFGM cdf equals its Bernoulli mixture form", gap, 1e-12, "7^3 grid"))
    return out


DEFAULT_CHECKS: list[tuple[str, Callable[[int], list[Verdict]]]] = [
    ("cdf identity", check_cdf_identity),
    ("density", check_density),
    ("samplers", check_samplers),
    ("comonotone invariance", check_comonotone_invariance),
    ("margins", check_margins),
    ("mixtures", check_mixtures),
    ("symmetry", check_symmetry),
    ("exchangeability", check_exchangeability),
    ("tails", check_tails),
    ("pairwise measures", check_pairwise),
    ("multivariate measures", check_multivariate),
    ("orthant and order", check_orthant_and_order),
    ("sums", check_sums),
    ("K >= d", check_k_ge_d),
    ("conditional pairs", check_conditional),
    ("EFGM", check_efgm),
]


# -- user fleets -----------------------------------------------------------------------


def check_model(name: str, desc: Any, path: str) -> list[Verdict]:
    if isinstance(desc, dict) and desc.get("family") == "efgm":
        try:
            params = efgm_parameters(desc, path, desc.get("dim"))
        except ConfigError as exc:
            return [flag(f"{name}: descriptor", False, exc.path, "schema", str(exc))]
        adm = efgm_admissible(params)
        verdict = flag(f"{name}: EFGM admissibility", adm.admissible, adm.witness, "sign enumeration",
                       "" if adm.admissible else f"polynomial minimum {adm.minimum:.6g}")
        if not adm.admissible:
            return [verdict]
        out = [verdict]
    else:
        out = []
    try:
        c = copula_from_descriptor(desc, path, None)
    except ConfigError as exc:
        return out + [flag(f"{name}: descriptor", False, exc.path, "schema", str(exc))]
    if not c.capability.has_cdf:
        return out + [flag(f"{name}: sampling", c.sample(16, 0).shape == (16, c.dim), c.dim, "smoke sample")]
    out += copula_axioms(name, c)
    pts = cube_grid(c.dim, {2: 11, 3: 7}.get(c.dim, 4))
    try:
        twice = c.survival().survival()
        out.append(bound(f"{name}: survival involution", np.abs(twice.cdf(pts) - c.cdf(pts)).max(), 1e-10, "grid"))
    except CopulaError as exc:
        out.append(flag(f"{name}: survival involution", False, None, "grid", str(exc)))
    return out


def run_fleet(fleet: Any | None, seed: int, threads: int = 1) -> RunReport:
    """Run the default fleet (``fleet is None``) or a user fleet descriptor."""
    report = RunReport(command="verify", seed=seed)
    if fleet is None:
        jobs = [(name, lambda fn=fn: fn(seed)) for name, fn in DEFAULT_CHECKS]
    else:
        if not isinstance(fleet, dict) or not isinstance(fleet.get("models", None), list):
            raise ConfigError("$.models", "a fleet needs a 'models' list")
        jobs = []
        for i, entry in enumerate(fleet["models"]):
            p = f"$.models[{i}]"
            if not isinstance(entry, dict) or "copula" not in entry:
                raise ConfigError(p, "each fleet entry needs a 'copula' descriptor")
            name = str(entry.get("name", f"model {i}"))
            jobs.append((name, lambda n=name, e=entry, q=p: check_model(n, e["copula"], f"{q}.copula")))

    def timed(job: tuple[str, Callable[[], list[Verdict]]]) -> tuple[str, float, list[Verdict]]:
        t0 = time.perf_counter()
        res = job[1]()
        return job[0], time.perf_counter() - t0, res

    # results are merged in submission order so reports do not depend on scheduling
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(timed, jobs))
    else:
        results = [timed(j) for j in jobs]
    for name, dt, verdicts in results:
        report.timings[name] = dt
        report.verdicts.extend(verdicts)
    return report
