"""Command-line front end.

    imcopula [--config PATH] [--seed N] [--out DIR] [--threads N] COMMAND [options]

Commands: sample, evaluate, measures, sumdist, efgm, verify.  Exit status is
0 on success, 1 when a verification verdict fails and 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .base_copulas import Copula
from .config import (
    ConfigError,
    efgm_parameters,
    joint_from_config,
    load_json,
    model_from_config,
    model_node,
)
from .dependence import (
    blomqvist_beta_multivariate,
    empirical_measures,
    empirical_multivariate_spearman,
    multivariate_spearman_estimate,
    orthant_dependence_check,
    pair_measure_matrix,
    tail_dependence_matrix,
)
from .efgm import efgm_admissible, efgm_concordance_range
from .errors import CapabilityError, CopulaError
from .index_mixed import IndexMixedCopula
from .sums import EmpiricalSum, JointModel, dkw_threshold, exp_sum_distribution, ks_distance
from .svg import MAX_DIM, scatter_svg
from .verify import RunReport, Verdict, bound, flag, run_fleet

log = logging.getLogger("imcopula")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
CHUNK = 1 << 16  # rows per independent random stream


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_csv(path: Path, header: Sequence[str], rows: Any) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def chunked_sample(c: Copula, n: int, seed: int, threads: int, algorithm: str = "eff") -> np.ndarray:
    """Sample in fixed-size chunks with spawned streams; output does not depend on ``threads``."""
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    if algorithm != "eff" and not isinstance(c, IndexMixedCopula):
        raise CapabilityError(f"algorithm {algorithm!r} needs an index-mixed model")
    draw = {
        "seq": getattr(c, "sample_sequential", None),
        "vec": getattr(c, "sample_vectorized", None),
        "eff": getattr(c, "sample_efficient", c.sample),
    }[algorithm]

    def run(i: int) -> np.ndarray:
        return draw(sizes[i], np.random.default_rng(streams[i]))

    if not sizes:
        return np.zeros((0, c.dim))
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return np.concatenate(parts, axis=0)


def _config(args: argparse.Namespace, required: bool = True) -> Any:
    if args.config is None:
        if required:
            raise ConfigError("$", "this command needs --config")
        return None
    return load_json(args.config)


def _out(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_verdicts(verdicts: list[Verdict]) -> None:
    for v in verdicts:
        tol = "" if v.tolerance is None else f" tol={v.tolerance:.3g}"
        print(f"{'PASS' if v.passed else 'FAIL'} {v.name}: observed={v.observed}{tol} [{v.method}]")


# -- commands ----------------------------------------------------------------------------


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = _config(args)
    c = model_from_config(cfg)
    n = args.n
    if n is None:
        n = cfg.get("n", 10_000) if isinstance(cfg, dict) else 10_000
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigError("$.n", f"expected an integer sample size, got {n!r}")
    if n < 0:
        raise ConfigError("$.n", "sample size must be nonnegative")
    u = chunked_sample(c, n, args.seed, args.threads, args.algorithm)
    out = _out(args)
    csv_path = out / "sample.csv"
    write_csv(csv_path, [f"u{j}" for j in range(1, c.dim + 1)], u)
    print(csv_path)
    if args.svg:
        if c.dim > MAX_DIM:
            log.warning("no scatter plot for d=%d > %d", c.dim, MAX_DIM)
        elif n:
            svg_path = out / "sample.svg"
            svg_path.write_text(scatter_svg(u), encoding="utf-8")
            print(svg_path)
    return EXIT_OK


def _read_points(path: str, d: int) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        pts = np.asarray(json.loads(text), dtype=float)
    else:
        rows = [r for r in csv.reader(text.splitlines()) if r]
        if rows and not all(_is_number(x) for x in rows[0]):
            rows = rows[1:]
        pts = np.asarray([[float(x) for x in r] for r in rows], dtype=float)
    if pts.size == 0:
        return np.zeros((0, d))
    if pts.ndim != 2 or pts.shape[1] != d:
        raise ConfigError("points", f"expected rows of {d} coordinates")
    return pts


def _is_number(x: str) -> bool:
    try:
        float(x)
    except ValueError:
        return False
    return True


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    c = model_from_config(cfg)
    d = c.dim
    if args.points:
        pts = _read_points(args.points, d)
    elif isinstance(cfg, dict) and "points" in cfg:
        try:
            pts = np.asarray(cfg["points"], dtype=float).reshape(-1, d)
        except ValueError as exc:
            raise ConfigError("$.points", f"expected a list of {d}-vectors") from exc
    else:
        raise ConfigError("$.points", "give --points or a 'points' list in the config")
    has_density = c.capability.has_density
    header = [f"u{j}" for j in range(1, d + 1)] + ["cdf"] + (["density"] if has_density else []) + ["error"]
    rows = []
    for u in pts:
        row: list[Any] = list(u)
        err = ""
        try:
            row.append(float(c.cdf(u)))
        except CopulaError as exc:
            row.append("")
            err = str(exc)
        if has_density:
            try:
                row.append(float(c.density(u)))
            except CopulaError as exc:
                row.append("")
                err = err or str(exc)
        row.append(err)
        rows.append(row)
    path = _out(args) / "evaluate.csv"
    write_csv(path, header, rows)
    for row in rows:
        print(",".join(v if isinstance(v, str) else _fmt(v) for v in row[: len(header) - 1]))
    return EXIT_OK


def _attempt(report: dict, key: str, fn: Any) -> Any:
    try:
        val = fn()
    except CopulaError as exc:
        report.setdefault("unavailable", {})[key] = str(exc)
        return None
    report[key] = val
    return val


def cmd_measures(args: argparse.Namespace) -> int:
    c = model_from_config(_config(args))
    rep: dict[str, Any] = {"dim": c.dim}
    for measure in ("rho_S", "tau", "beta"):
        _attempt(rep, measure, lambda m=measure: pair_measure_matrix(c, m).to_dict())
    for side in ("lower", "upper"):
        _attempt(rep, f"tail_{side}", lambda s=side: tail_dependence_matrix(c, s).to_dict())
    if c.dim >= 2:
        for variant in ("lower", "upper"):
            _attempt(rep, f"multivariate_rho_S_{variant}",
                     lambda v=variant: vars(multivariate_spearman_estimate(c, v)))
        _attempt(rep, "multivariate_beta", lambda: blomqvist_beta_multivariate(c, "general"))
        _attempt(rep, "orthant", lambda: vars(orthant_dependence_check(c)))
    if args.verify:
        u = chunked_sample(c, args.n or 100_000, args.seed, args.threads)
        emp = empirical_measures(u)
        rep["empirical"] = {
            "n": int(u.shape[0]),
            "rho_S": emp.rho_S.to_dict(),
            "tau": emp.tau.to_dict(),
            "beta": emp.beta.to_dict(),
        }
        for variant in ("lower", "upper"):
            val, sd = empirical_multivariate_spearman(u, variant)
            rep["empirical"][f"multivariate_rho_S_{variant}"] = {"value": val, "stderr": sd}
    text = json.dumps(rep, indent=2, default=_json_default)
    (_out(args) / "measures.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def _json_default(x: Any) -> Any:
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _grid(spec: str | None, hi: float) -> np.ndarray:
    if spec is None:
        return np.linspace(0.0, hi, 201)
    try:
        a, b, k = spec.split(":")
        return np.linspace(float(a), float(b), int(k))
    except ValueError as exc:
        raise ConfigError("--grid", "expected START:STOP:COUNT") from exc


def cmd_sumdist(args: argparse.Namespace) -> int:
    jm: JointModel = joint_from_config(_config(args))
    n = args.n or 1_000_000
    x = chunked_sample(jm.copula, n, args.seed, args.threads)
    sums = np.column_stack([mg.ppf(x[:, j]) for j, mg in enumerate(jm.margins)]).sum(axis=1)
    emp = EmpiricalSum(sums)
    try:
        law = exp_sum_distribution(jm)
    except CapabilityError as exc:
        log.warning("no closed form (%s); reporting the empirical distribution only", exc)
        law = None
    hi = float(np.quantile(sums, 0.999)) if n else 1.0
    grid = _grid(args.grid, hi)
    f_emp = emp.cdf(grid)
    out = _out(args)
    if law is None:
        write_csv(out / "sumdist.csv", ["s", "cdf_analytic", "cdf_empirical", "abs_diff"],
                  [[s, "", fe, ""] for s, fe in zip(grid, f_emp)])
        print(out / "sumdist.csv")
        return EXIT_OK
    f_an = law.cdf(grid)
    write_csv(out / "sumdist.csv", ["s", "cdf_analytic", "cdf_empirical", "abs_diff"],
              zip(grid, f_an, f_emp, np.abs(f_an - f_emp)))
    print(out / "sumdist.csv")
    threshold = dkw_threshold(n, args.alpha)
    verdict = bound("KS distance to the closed form", ks_distance(emp, law), threshold,
                    f"DKW threshold at alpha={args.alpha}, n={n}")
    print(f"mean={law.mean():.17g} var={law.var():.17g} DKW threshold={threshold:.6g}")
    _print_verdicts([verdict])
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_efgm(args: argparse.Namespace) -> int:
    cfg = _config(args, required=False)
    verdicts: list[Verdict] = []
    report: dict[str, Any] = {}
    if cfg is not None:
        node, path = model_node(cfg)
        if not isinstance(node, dict) or node.get("family") != "efgm":
            raise ConfigError(f"{path}.family", "the efgm command needs an EFGM descriptor")
        params = efgm_parameters(node, path, node.get("dim"))
        adm = efgm_admissible(params)
        verdicts.append(flag("EFGM admissibility", adm.admissible, adm.witness, "sign enumeration",
                             f"polynomial minimum {adm.minimum:.17g}"))
        report["thetas"] = {",".join(map(str, k)): v for k, v in params.as_dict().items()}
        report["admissible"] = adm.admissible
        report["witness"] = adm.witness
    thetas = [float(t) for t in args.theta.split(",")] if args.theta else [-1.0, 0.0, 1.0]
    report["bivariate_range"] = efgm_concordance_range(thetas, method=args.method)
    text = json.dumps(report, indent=2, default=_json_default)
    (_out(args) / "efgm.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    _print_verdicts(verdicts)
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_verify(args: argparse.Namespace) -> int:
    fleet = _config(args, required=False)
    t0 = time.perf_counter()
    report: RunReport = run_fleet(fleet, args.seed, args.threads)
    report.command = " ".join(["verify"] + (["--config", args.config] if args.config else []))
    report.timings["total"] = time.perf_counter() - t0
    path = _out(args) / "verify.json"
    report.artifacts.append(str(path))
    path.write_text(json.dumps(report.to_dict(), indent=2, default=_json_default) + "\n", encoding="utf-8")
    _print_verdicts(report.verdicts)
    print(f"{sum(v.passed for v in report.verdicts)}/{len(report.verdicts)} verdicts passed; report in {path}")
    return EXIT_OK if report.passed else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="imcopula", description="Index-mixed copula toolkit.")
    p.add_argument("--config", help="JSON model descriptor (or fleet for verify)")
    p.add_argument("--seed", type=int, default=0, help="unsigned integer seed (default 0)")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sampling and verification")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw a sample and write sample.csv")
    s.add_argument("--n", type=int, help="sample size (default: config 'n' or 10000)")
    s.add_argument("--algorithm", choices=("seq", "vec", "eff"), default="eff")
    s.add_argument("--svg", action="store_true", help="also write a scatter-plot matrix (d <= 6)")
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("evaluate", help="evaluate cdf (and density) at points")
    e.add_argument("--points", help="CSV or JSON file of points")
    e.set_defaults(func=cmd_evaluate)

    m = sub.add_parser("measures", help="dependence measure report")
    m.add_argument("--verify", action="store_true", help="add empirical estimates with standard errors")
    m.add_argument("--n", type=int, help="sample size for --verify (default 100000)")
    m.set_defaults(func=cmd_measures)

    d = sub.add_parser("sumdist", help="distribution of the sum under exponential margins")
    d.add_argument("--grid", help="START:STOP:COUNT evaluation grid")
    d.add_argument("--n", type=int, help="Monte Carlo size (default 1000000)")
    d.add_argument("--alpha", type=float, default=0.001)
    d.set_defaults(func=cmd_sumdist)

    f = sub.add_parser("efgm", help="EFGM admissibility and bivariate concordance range")
    f.add_argument("--theta", help="comma-separated bivariate parameters (default -1,0,1)")
    f.add_argument("--method", choices=("auto", "qmc"), default="auto")
    f.set_defaults(func=cmd_efgm)

    v = sub.add_parser("verify", help="run the invariant suite over a fleet")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error at {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CopulaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
