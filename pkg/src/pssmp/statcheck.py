"""Shared statistical machinery: KS distances, Hill tail-index, bootstrap, reports.

Every verification gate in this package reduces to one of the statistics
here, compared against a fixed threshold recorded in a :class:`TestReport`.
No p-value machinery; thresholds are pinned by the calling check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SizeError",
    "TestReport",
    "REPORT_COLUMNS",
    "ks_two_sample",
    "ks_vs_cdf",
    "hill_estimator",
    "HillEstimate",
    "bootstrap_ci",
    "bootstrap_se",
]


class SizeError(ValueError):
    """Raised when a sample is too small for the requested statistic."""


REPORT_COLUMNS = (
    "check",
    "params",
    "lhs",
    "rhs",
    "statistic",
    "threshold",
    "passed",
    "n",
    "seed",
)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.floating, np.integer)):
        return repr(float(x)) if isinstance(x, np.floating) else repr(int(x))
    return str(x)


@dataclass
class TestReport:
    """Outcome of one verification gate.

    ``passed`` must equal ``statistic <= threshold``; the constructor
    enforces it so a report can never contradict its own numbers.
    """

    check: str
    params: dict = field(default_factory=dict)
    lhs: float = float("nan")
    rhs: float = float("nan")
    statistic: float = float("nan")
    threshold: float = float("nan")
    passed: bool = False
    n: int = 0
    seed: int | None = None

    def __post_init__(self):
        if np.isfinite(self.statistic) and np.isfinite(self.threshold):
            self.passed = bool(self.statistic <= self.threshold)

    def params_str(self) -> str:
        return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))

    def csv_row(self) -> str:
        fields = [
            self.check,
            self.params_str(),
            _fmt(self.lhs),
            _fmt(self.rhs),
            _fmt(self.statistic),
            _fmt(self.threshold),
            "1" if self.passed else "0",
            str(self.n),
            "" if self.seed is None else str(self.seed),
        ]
        return ",".join(f.replace(",", ";") for f in fields)


def _as_sample(a, min_size: int, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float).ravel()
    if arr.size < min_size:
        raise SizeError(f"{name} needs at least {min_size} points, got {arr.size}")
    return arr


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Sup-distance between the empirical CDFs of two samples (>= 50 each)."""
    x = np.sort(_as_sample(a, 50, "ks_two_sample sample a"))
    y = np.sort(_as_sample(b, 50, "ks_two_sample sample b"))
    grid = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, grid, side="right") / x.size
    cdf_y = np.searchsorted(y, grid, side="right") / y.size
    return float(np.max(np.abs(cdf_x - cdf_y)))


def ks_vs_cdf(a: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample sup-distance between the empirical CDF and a target CDF."""
    x = np.sort(_as_sample(a, 50, "ks_vs_cdf sample"))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(np.max(upper), np.max(lower)))


@dataclass(frozen=True)
class HillEstimate:
    index: float
    se: float
    k: int


def hill_estimator(a: Sequence[float], k: int) -> HillEstimate:
    """Hill estimate of a power-law tail index from the top ``k`` order statistics.

    Returns the reciprocal mean log-spacing above the (k+1)-th largest point,
    with the usual asymptotic standard error index/sqrt(k).  Heavier-than-any-
    power tails push the estimate down; exponential-type tails push it up with
    k -- that drift is expected behaviour, not an error.
    """
    x = _as_sample(a, 50, "hill_estimator sample")
    if np.any(x <= 0):
        raise SizeError("hill_estimator requires strictly positive samples")
    if k < 50:
        raise SizeError(f"hill_estimator needs k >= 50, got {k}")
    if k > x.size // 10:
        raise SizeError(f"hill_estimator needs k <= n/10 = {x.size // 10}, got {k}")
    xs = np.sort(x)
    top = xs[-k:]
    ref = xs[-k - 1]
    mean_log = float(np.mean(np.log(top / ref)))
    index = 1.0 / mean_log
    return HillEstimate(index=index, se=index / np.sqrt(k), k=k)


def bootstrap_ci(
    stat: Callable[[np.ndarray], float],
    data: Sequence[float],
    rng: np.random.Generator,
    b: int = 500,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile bootstrap confidence interval; deterministic given the rng state."""
    x = _as_sample(data, 100, "bootstrap_ci data")
    reps = np.empty(b)
    for i in range(b):
        reps[i] = stat(x[rng.integers(0, x.size, x.size)])
    lo = (1.0 - level) / 2.0
    return (float(np.quantile(reps, lo)), float(np.quantile(reps, 1.0 - lo)))


def bootstrap_se(
    data: Sequence[float],
    rng: np.random.Generator,
    b: int = 300,
    stat: Callable[[np.ndarray], float] | None = None,
) -> float:
    """Bootstrap standard error of a statistic (sample mean by default)."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        return float("nan")
    if stat is None:
        # resampled means via multinomial counts: O(b*n) without python loop
        counts = rng.multinomial(x.size, np.full(x.size, 1.0 / x.size), size=b)
        reps = counts @ x / x.size
    else:
        reps = np.empty(b)
        for i in range(b):
            reps[i] = stat(x[rng.integers(0, x.size, x.size)])
    return float(np.std(reps, ddof=1))
