"""Experiment configuration: nested key/value tables parsed strictly.

A config file names a master seed, an output directory, the process
specifications (triplets, subordinator pairs, multivariate drivers) and an
ordered list of checks with their full parameter sets.  Unknown keys are
rejected by name so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .entrance import TestFunction, bump, indicator, power_exp, stretched_exp
from .extensions import BivariateSubSpec, MultiSpec, TestFunction2
from .levy import LevyTriplet

__all__ = ["ConfigError", "CheckSpec", "ExperimentConfig", "load_config", "parse_test_function"]


class ConfigError(ValueError):
    """A malformed configuration; the message names the offending key."""


_TOP_KEYS = {"seed", "out_dir", "triplets", "bivariates", "multis", "checks"}

# allowed parameter keys per check kind (beyond 'kind')
CHECK_PARAMS: dict[str, set[str]] = {
    "scaling": {"triplet", "gamma", "alpha", "n", "pairs", "f", "step"},
    "semigroup": {"triplet", "gamma", "alpha", "s", "t", "f", "n", "step"},
    "jumpin": {"triplet", "gamma", "alpha", "s_values", "fs", "x_lo", "x_hi", "n", "step", "nodes"},
    "pareto": {"triplet", "gamma", "alpha", "n", "step"},
    "beta_embed": {"triplet", "beta_lo", "beta_hi", "alpha", "s", "n", "step"},
    "quasi_stationary": {"triplet", "gamma", "alpha", "n", "step"},
    "qpotential": {"triplet", "gamma", "alpha", "q", "f", "n", "step", "nodes"},
    "uniqueness": {"triplet", "gamma", "alpha", "n", "step"},
    "rho": {"alpha", "beta", "q", "n", "slack"},
    "excursion_hill": {
        "alpha", "beta", "q", "horizon", "cutoff", "n_survivor_k", "n_all_k",
        "tol_all", "tol_survivor", "min_survivors",
    },
    "lm": {"bivariate", "x_max", "expect_finite"},
    "resolvent_rh": {"bivariate", "alpha", "lam", "kappa", "f2", "n", "step", "m_paths", "n_states"},
    "resolvent_mssmp": {"multi", "lam", "kappa", "n", "step", "nodes", "m_paths"},
    "moment": {"triplet", "alpha", "p", "n", "expect", "step"},
}

_REQUIRED: dict[str, set[str]] = {
    "scaling": {"triplet", "gamma", "alpha", "n"},
    "semigroup": {"triplet", "gamma", "alpha", "s", "t", "f", "n"},
    "jumpin": {"triplet", "gamma", "alpha", "n"},
    "pareto": {"triplet", "gamma", "alpha", "n"},
    "beta_embed": {"triplet", "beta_lo", "beta_hi", "alpha", "s", "n"},
    "quasi_stationary": {"triplet", "gamma", "alpha", "n"},
    "qpotential": {"triplet", "gamma", "alpha", "q", "f", "n"},
    "uniqueness": {"triplet", "gamma", "alpha", "n"},
    "rho": {"alpha", "beta", "q", "n"},
    "excursion_hill": {"alpha", "beta", "q", "horizon"},
    "lm": {"bivariate", "expect_finite"},
    "resolvent_rh": {"bivariate", "alpha", "lam", "kappa", "n"},
    "resolvent_mssmp": {"multi", "lam", "kappa", "n"},
    "moment": {"triplet", "alpha", "p", "n", "expect"},
}


def parse_test_function(spec: str) -> TestFunction:
    """Compact catalog syntax: e.g. 'indicator:0.5:2', 'power_exp:1',
    'stretched_exp:1:1', 'bump:1:0.5'."""
    parts = spec.split(":")
    kind, args = parts[0], [float(p) for p in parts[1:]]
    try:
        if kind == "indicator":
            return indicator(*args)
        if kind == "power_exp":
            return power_exp(*args)
        if kind == "stretched_exp":
            return stretched_exp(*args)
        if kind == "bump":
            return bump(*args)
    except TypeError as e:
        raise ConfigError(f"bad test function arguments in {spec!r}: {e}") from e
    raise ConfigError(f"unknown test function kind {kind!r} in {spec!r}")


def parse_test_function2(spec: str) -> TestFunction2:
    parts = spec.split(":")
    kind, args = parts[0], [float(p) for p in parts[1:]]
    if kind == "exp_product":
        c1, c2 = args if args else (1.0, 1.0)
        return TestFunction2("exp_product", c1=c1, c2=c2)
    if kind == "box":
        r0, r1, x0, x1 = args
        return TestFunction2("box", r_range=(r0, r1), x_range=(x0, x1))
    raise ConfigError(f"unknown bivariate test function kind {kind!r} in {spec!r}")


@dataclass
class CheckSpec:
    kind: str
    index: int
    params: dict = field(default_factory=dict)

    def name(self) -> str:
        return f"{self.index:03d}_{self.kind}"


@dataclass
class ExperimentConfig:
    seed: int
    out_dir: Path
    triplets: dict[str, LevyTriplet] = field(default_factory=dict)
    bivariates: dict[str, BivariateSubSpec] = field(default_factory=dict)
    multis: dict[str, MultiSpec] = field(default_factory=dict)
    checks: list[CheckSpec] = field(default_factory=list)


def _parse_multi(d: dict) -> MultiSpec:
    known = {"alphas", "coordinates", "q"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown multi key {sorted(unknown)[0]!r}")
    coords = tuple(LevyTriplet.from_dict(c) for c in d.get("coordinates", []))
    return MultiSpec(
        alphas=tuple(float(a) for a in d.get("alphas", [])),
        triplets=coords,
        kill_rate=float(d.get("q", 0.0)),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config does not parse: {e}") from e
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level key {sorted(unknown)[0]!r}")
    if "seed" not in data:
        raise ConfigError("missing required key 'seed'")
    try:
        triplets = {k: LevyTriplet.from_dict(v) for k, v in data.get("triplets", {}).items()}
        bivariates = {k: BivariateSubSpec.from_dict(v) for k, v in data.get("bivariates", {}).items()}
        multis = {k: _parse_multi(v) for k, v in data.get("multis", {}).items()}
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e
    checks: list[CheckSpec] = []
    for i, raw in enumerate(data.get("checks", [])):
        if "kind" not in raw:
            raise ConfigError(f"checks[{i}] is missing 'kind'")
        kind = raw["kind"]
        if kind not in CHECK_PARAMS:
            raise ConfigError(f"unknown check kind {kind!r} (checks[{i}])")
        params = {k: v for k, v in raw.items() if k != "kind"}
        unknown = set(params) - CHECK_PARAMS[kind]
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r} for check kind {kind!r}")
        missing = _REQUIRED[kind] - set(params)
        if missing:
            raise ConfigError(f"check {kind!r} is missing required key {sorted(missing)[0]!r}")
        for ref, table in (("triplet", triplets), ("bivariate", bivariates), ("multi", multis)):
            if ref in params and params[ref] not in table:
                raise ConfigError(f"check {kind!r} references undefined {ref} {params[ref]!r}")
        checks.append(CheckSpec(kind=kind, index=i, params=params))
    return ExperimentConfig(
        seed=int(data["seed"]),
        out_dir=Path(data.get("out_dir", "pssmp_out")),
        triplets=triplets,
        bivariates=bivariates,
        multis=multis,
        checks=checks,
    )
