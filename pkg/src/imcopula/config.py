"""JSON model descriptors.

A copula descriptor is an object with a ``family`` key::

    {"family": "clayton", "tau": 0.5, "dim": 2}
    {"family": "index_mixed", "dim": 2,
     "bases": [{"family": "clayton", "tau": 0.5}, {"family": "gumbel", "tau": 0.5}],
     "index": {"kind": "bernoulli_copula", "terms": [{"p": 0.5, "copula": {"family": "independence"}}]}}

Bases inherit ``dim`` from the enclosing index-mixed model.  A run config wraps
the descriptor as ``{"copula": ..., "margins": ...}``; a bare descriptor is
accepted too.  Every error names the JSON path of the offending field.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Callable, TypeVar

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
    SurvivalCopula,
)
from .efgm import BernoulliVectorLaw, EfgmParameters, thetas_from_bernoulli
from .errors import ConfigError, CopulaError
from .index_mixed import IndexMixedCopula
from .index_model import IndexDistribution
from .sums import Exponential, JointModel, PointMass

T = TypeVar("T")

FAMILIES = (
    "independence",
    "comonotone",
    "countermonotone",
    "clayton",
    "gumbel",
    "efgm",
    "efgm_bernoulli",
    "gaussian",
    "mixture",
    "survival",
    "index_mixed",
)
INDEX_KINDS = ("table", "point_mass", "comonotone", "uniform", "bernoulli_copula", "multinomial_shift", "copula_quantile")


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _guard(path: str, fn: Callable[[], T]) -> T:
    """Run a constructor, re-raising library errors with the descriptor path."""
    try:
        return fn()
    except ConfigError:
        raise
    except (CopulaError, ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _obj(node: Any, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(path, f"expected an object, got {type(node).__name__}")
    return node


def _field(node: dict, key: str, path: str, default: Any = ...) -> Any:
    if key in node:
        return node[key]
    if default is ...:
        raise ConfigError(f"{path}.{key}", "required field is missing")
    return default


def _num(node: dict, key: str, path: str, default: Any = ...) -> float:
    val = _field(node, key, path, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{path}.{key}", f"expected a finite number, got {val!r}")
    return float(val)


def _int(node: dict, key: str, path: str, default: Any = ...) -> int:
    val = _field(node, key, path, default)
    if isinstance(val, bool) or not isinstance(val, int) or val < 1:
        raise ConfigError(f"{path}.{key}", f"expected a positive integer, got {val!r}")
    return val


def _list(node: dict, key: str, path: str) -> list:
    val = _field(node, key, path)
    if not isinstance(val, list):
        raise ConfigError(f"{path}.{key}", f"expected a list, got {type(val).__name__}")
    return val


def _numbers(val: Any, path: str) -> list[float]:
    if not isinstance(val, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in val):
        raise ConfigError(path, f"expected a list of numbers, got {val!r}")
    return [float(x) for x in val]


def _one_of(node: dict, keys: tuple[str, ...], path: str) -> str:
    present = [k for k in keys if k in node]
    if len(present) != 1:
        raise ConfigError(path, f"give exactly one of {', '.join(keys)}")
    return present[0]


# -- copulas -------------------------------------------------------------------


def efgm_parameters(node: dict, path: str = "$", dim: int | None = None) -> EfgmParameters:
    """EFGM parameters without the admissibility check (so callers can report it)."""
    node = _obj(node, path)
    key = _one_of(node, ("theta", "thetas", "bernoulli"), path)
    if key == "theta":
        return _guard(path, lambda: EfgmParameters.bivariate(_num(node, "theta", path)))
    d = _int(node, "dim", path, dim if dim is not None else 2)
    if key == "thetas":
        raw = _obj(node["thetas"], f"{path}.thetas")
        for k, v in raw.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{path}.thetas.{k}", f"expected a number, got {v!r}")
        return _guard(f"{path}.thetas", lambda: EfgmParameters.make(d, raw))
    law = bernoulli_law(node["bernoulli"], f"{path}.bernoulli", d)
    return _guard(f"{path}.bernoulli", lambda: thetas_from_bernoulli(law))


def bernoulli_law(node: Any, path: str, d: int) -> BernoulliVectorLaw:
    table = _table_entries(node, path)
    return _guard(path, lambda: BernoulliVectorLaw.from_table(d, table))


def copula_from_descriptor(node: Any, path: str = "$", dim: int | None = None) -> Copula:
    node = _obj(node, path)
    family = _field(node, "family", path)
    if family not in FAMILIES:
        raise ConfigError(f"{path}.family", f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if "d" in node and "dim" not in node and str(family).startswith("efgm"):
        node = {**node, "dim": node["d"]}
    d = _int(node, "dim", path, dim if dim is not None else 2)
    if dim is not None and d != dim:
        raise ConfigError(f"{path}.dim", f"dimension {d} does not match the enclosing model ({dim})")

    if family == "independence":
        return Independence(d)
    if family == "comonotone":
        return Comonotone(d)
    if family == "countermonotone":
        return _guard(path, lambda: Countermonotone(d))
    if family in ("clayton", "gumbel"):
        cls = Clayton if family == "clayton" else Gumbel
        key = _one_of(node, ("theta", "tau"), path)
        val = _num(node, key, path)
        make = (lambda: cls.from_tau(val, d)) if key == "tau" else (lambda: cls(val, d))
        return _guard(f"{path}.{key}", make)
    if family == "efgm":
        params = efgm_parameters(node, path, d)
        return _guard(path, lambda: EFGM(params))
    if family == "efgm_bernoulli":
        law = bernoulli_law(_field(node, "law", path), f"{path}.law", d)
        params = _guard(f"{path}.law", lambda: thetas_from_bernoulli(law))
        return _guard(path, lambda: EFGM(params))
    if family == "gaussian":
        key = _one_of(node, ("rho", "tau", "matrix"), path)
        if key == "matrix":
            mat = _field(node, "matrix", path)
            return _guard(f"{path}.matrix", lambda: GaussianSampleOnly.from_matrix(mat))
        val = _num(node, key, path)
        if key == "tau":
            return _guard(f"{path}.tau", lambda: GaussianSampleOnly.from_tau(val, d))
        return _guard(f"{path}.rho", lambda: GaussianSampleOnly.equicorrelated(d, val))
    if family == "mixture":
        comps = _list(node, "components", path)
        if not comps:
            raise ConfigError(f"{path}.components", "a mixture needs at least one component")
        pairs = []
        for i, comp in enumerate(comps):
            cp = f"{path}.components[{i}]"
            comp = _obj(comp, cp)
            pairs.append((_num(comp, "weight", cp), copula_from_descriptor(_field(comp, "copula", cp), f"{cp}.copula", d)))
        return _guard(f"{path}.components", lambda: FiniteMixture.of(pairs))
    if family == "survival":
        return SurvivalCopula(copula_from_descriptor(_field(node, "base", path), f"{path}.base", d))
    # index_mixed
    bases_raw = _list(node, "bases", path)
    if not bases_raw:
        raise ConfigError(f"{path}.bases", "need at least one base copula")
    bases = tuple(copula_from_descriptor(b, f"{path}.bases[{k}]", d) for k, b in enumerate(bases_raw))
    index = index_from_descriptor(_field(node, "index", path), f"{path}.index", d, len(bases))
    return _guard(path, lambda: IndexMixedCopula(bases, index))


# -- index laws ----------------------------------------------------------------


def _table_entries(node: Any, path: str) -> list[tuple[list[int], float]]:
    """Accept ``[[vector, p], ...]`` or ``{"1,2": p, ...}``."""
    out = []
    if isinstance(node, dict):
        for key, p in node.items():
            try:
                vec = [int(x) for x in str(key).replace(" ", "").split(",")]
            except ValueError:
                raise ConfigError(f"{path}.{key}", "keys must be comma-separated integers") from None
            if isinstance(p, bool) or not isinstance(p, (int, float)):
                raise ConfigError(f"{path}.{key}", f"expected a probability, got {p!r}")
            out.append((vec, float(p)))
        return out
    if not isinstance(node, list):
        raise ConfigError(path, "expected a list of [vector, probability] pairs or an object")
    for i, entry in enumerate(node):
        ep = f"{path}[{i}]"
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], list)):
            raise ConfigError(ep, "expected [vector, probability]")
        vec, p = entry
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in vec):
            raise ConfigError(f"{ep}[0]", f"expected integer entries, got {vec!r}")
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise ConfigError(f"{ep}[1]", f"expected a probability, got {p!r}")
        out.append((vec, float(p)))
    return out


def index_from_descriptor(node: Any, path: str, d: int, K: int) -> IndexDistribution:
    node = _obj(node, path)
    kind = _field(node, "kind", path)
    if kind not in INDEX_KINDS:
        raise ConfigError(f"{path}.kind", f"unknown index kind {kind!r}; expected one of {', '.join(INDEX_KINDS)}")
    if kind == "table":
        table = _table_entries(_field(node, "table", path), f"{path}.table")
        dist = _guard(f"{path}.table", lambda: IndexDistribution.from_table(d, K, table))
    elif kind == "point_mass":
        vec = _field(node, "vector", path)
        if not isinstance(vec, list) or not all(isinstance(x, int) for x in vec):
            raise ConfigError(f"{path}.vector", f"expected a list of integers, got {vec!r}")
        dist = _guard(f"{path}.vector", lambda: IndexDistribution.point_mass(vec, K))
    elif kind == "comonotone":
        weights = _numbers(_field(node, "weights", path), f"{path}.weights")
        dist = _guard(f"{path}.weights", lambda: IndexDistribution.comonotone(weights, d))
    elif kind == "uniform":
        dist = _guard(path, lambda: IndexDistribution.uniform(d, K))
    elif kind == "bernoulli_copula":
        terms = []
        for i, term in enumerate(_list(node, "terms", path)):
            tp = f"{path}.terms[{i}]"
            term = _obj(term, tp)
            p = _field(term, "p", tp)
            p = _numbers(p, f"{tp}.p") if isinstance(p, list) else _num(term, "p", tp)
            terms.append((p, copula_from_descriptor(_field(term, "copula", tp), f"{tp}.copula", d)))
        dist = _guard(f"{path}.terms", lambda: IndexDistribution.bernoulli_copula(terms))
    elif kind == "multinomial_shift":
        q = _numbers(_field(node, "q", path), f"{path}.q")
        dist = _guard(f"{path}.q", lambda: IndexDistribution.multinomial_shift(d, K, q))
    else:
        cop = copula_from_descriptor(_field(node, "copula", path), f"{path}.copula", d)
        raw = _field(node, "pmfs", path)
        pmfs: Any = (
            [_numbers(p, f"{path}.pmfs[{j}]") for j, p in enumerate(raw)]
            if isinstance(raw, list) and raw and isinstance(raw[0], list)
            else _numbers(raw, f"{path}.pmfs")
        )
        dist = _guard(f"{path}.pmfs", lambda: IndexDistribution.copula_quantile(cop, pmfs))
    if dist.d != d:
        raise ConfigError(path, f"index law has dimension {dist.d}, model has {d}")
    if dist.K != K:
        # laws like bernoulli_copula determine K themselves; a mismatch means a wrong base count
        raise ConfigError(path, f"index law has order {dist.K} but {K} base copulas were given")
    return dist


# -- run configs ---------------------------------------------------------------


def model_node(cfg: Any) -> tuple[Any, str]:
    cfg = _obj(cfg, "$")
    if "copula" in cfg:
        return cfg["copula"], "$.copula"
    if "family" in cfg:
        return cfg, "$"
    raise ConfigError("$", "expected a copula descriptor or an object with a 'copula' field")


def model_from_config(cfg: Any) -> Copula:
    node, path = model_node(cfg)
    return copula_from_descriptor(node, path, None)


def margins_from_config(node: Any, path: str, d: int) -> tuple[Any, ...]:
    def one(m: Any, mp: str) -> Any:
        m = _obj(m, mp)
        key = _one_of(m, ("exp", "point"), mp)
        val = _num(m, key, mp)
        if key == "exp":
            return _guard(f"{mp}.exp", lambda: Exponential(val))
        return PointMass(val)

    if isinstance(node, list):
        if len(node) != d:
            raise ConfigError(path, f"{len(node)} margins given for dimension {d}")
        return tuple(one(m, f"{path}[{j}]") for j, m in enumerate(node))
    shared = one(node, path)
    return (shared,) * d


def joint_from_config(cfg: Any) -> JointModel:
    cfg = _obj(cfg, "$")
    copula = model_from_config(cfg)
    margins = margins_from_config(_field(cfg, "margins", "$"), "$.margins", copula.dim)
    return JointModel(copula, margins)
