"""Zero-set skeleton of the marked excursion point process and its embedding.

Excursions away from zero are represented only by their (arrival local time,
length, colour mark) triples: a Poisson point process with length intensity
``c * l^{-1-beta/alpha}`` above a cutoff and fair coin marks.  Gluing the
lengths along local time yields the inverse-local-time subordinator of the
zero set.  The deletion time change removes all blue excursion time and a
``q``-dependent prefix of each red excursion: survivors are exactly the
ladder jumps of the signed walk red-length minus ``q^{alpha/beta}`` times
blue-length, so their observed lengths have a stable tail of index
``beta*rho/alpha`` where ``rho`` is the positivity parameter of that walk.
Excursion shapes are never sampled; every claim tested here is a function of
lengths alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

__all__ = [
    "StableSubSpec",
    "ExcursionSkeleton",
    "GluedZeroSet",
    "DeletionResult",
    "default_scale",
    "sample_skeleton",
    "glue",
    "deletion_time_change",
    "rho_formula",
    "sample_positive_stable",
    "RhoEstimate",
    "rho_empirical",
]


@dataclass(frozen=True)
class StableSubSpec:
    """Stable subordinator data: Lévy measure ``scale * x^{-1-index} dx``."""

    index: float
    scale: float

    def __post_init__(self):
        if not 0.0 < self.index < 1.0:
            raise ValueError("stable subordinator index must lie in (0, 1)")
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def default_scale(alpha: float, beta: float) -> float:
    """Normalisation fixing the glued subordinator's Laplace exponent to 1 at 1.

    With length intensity c * l^{-1-a}, a = beta/alpha, the exponent at
    lambda=1 equals c * Gamma(1-a) / a; setting it to 1 gives
    c = a / Gamma(1-a).
    """
    a = beta / alpha
    return a / gamma_fn(1.0 - a)


@dataclass
class ExcursionSkeleton:
    """Atoms (local time, length, mark) of the marked excursion process.

    Lengths below ``cutoff`` are not sampled; local times live on
    (0, horizon) and are kept sorted.
    """

    local_times: np.ndarray
    lengths: np.ndarray
    marks: np.ndarray  # +1 red / -1 blue
    alpha: float
    beta: float
    cutoff: float
    horizon: float
    scale: float

    @property
    def n_atoms(self) -> int:
        return self.lengths.size


def sample_skeleton(
    alpha: float,
    beta: float,
    horizon: float,
    cutoff: float,
    scale: float | None,
    rng: np.random.Generator,
) -> ExcursionSkeleton:
    """Poisson skeleton: atom count mean horizon*scale*cutoff^{-a}/a, Pareto lengths.

    Lengths are exact draws from the normalized intensity above the cutoff,
    i.e. cutoff * U^{-1/a}; marks are a fair coin; arrival local times are
    uniform and returned sorted.
    """
    a = beta / alpha
    if not 0.0 < a < 1.0:
        raise ValueError("need 0 < beta/alpha < 1")
    if cutoff <= 0 or horizon <= 0:
        raise ValueError("cutoff and horizon must be positive")
    c = default_scale(alpha, beta) if scale is None else scale
    mean_atoms = horizon * (c / a) * cutoff ** (-a)
    n = int(rng.poisson(mean_atoms))
    times = np.sort(rng.uniform(0.0, horizon, n))
    lengths = cutoff * rng.random(n) ** (-1.0 / a)
    marks = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
    return ExcursionSkeleton(
        local_times=times,
        lengths=lengths,
        marks=marks,
        alpha=alpha,
        beta=beta,
        cutoff=cutoff,
        horizon=horizon,
        scale=c,
    )


@dataclass
class GluedZeroSet:
    """Inverse local time built by summing lengths along local time."""

    local_times: np.ndarray
    sigma_after: np.ndarray  # subordinator value right after each atom
    horizon: float

    def sigma(self, t: np.ndarray) -> np.ndarray:
        """Cumulative length of excursions arrived at local time <= t."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.local_times, t, side="right")
        padded = np.concatenate([[0.0], self.sigma_after])
        return padded[idx]

    def local_time(self, u: np.ndarray) -> np.ndarray:
        """Generalised inverse: first local time whose glued length exceeds u."""
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.sigma_after, u, side="left")
        idx = np.minimum(idx, self.local_times.size - 1)
        return self.local_times[idx]


def glue(sk: ExcursionSkeleton) -> GluedZeroSet:
    return GluedZeroSet(
        local_times=sk.local_times,
        sigma_after=np.cumsum(sk.lengths),
        horizon=sk.horizon,
    )


@dataclass
class DeletionResult:
    """Surviving excursions of the deletion time change.

    Survivors are the red atoms whose walk step crosses the running maximum;
    ``observed`` is the overshoot (the visible part), ``deleted_prefix``
    the part below the old maximum.  ``observed + deleted_prefix`` equals the
    original length exactly.
    """

    q: float
    weight_blue: float
    survivor_index: np.ndarray
    original: np.ndarray
    observed: np.ndarray
    deleted_prefix: np.ndarray
    n_red: int
    n_atoms: int

    @property
    def n_survivors(self) -> int:
        return self.observed.size


def deletion_time_change(sk: ExcursionSkeleton, q: float) -> DeletionResult:
    """Walk the skeleton in local-time order and collect ladder overshoots.

    Red atoms add their length, blue atoms subtract ``q^{alpha/beta}`` times
    theirs; a red atom pushing the walk above its running maximum survives
    with the overshoot as observed length.  As q -> 0 blue steps vanish and
    every red atom survives whole.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    w = q ** (sk.alpha / sk.beta)
    red = sk.marks > 0
    contrib = np.where(red, sk.lengths, -w * sk.lengths)
    z_after = np.cumsum(contrib)
    m_prev = np.maximum.accumulate(np.concatenate([[0.0], z_after]))[:-1]
    surv = red & (z_after > m_prev)
    z_before = z_after - contrib
    observed = (z_after - m_prev)[surv]
    deleted = (m_prev - z_before)[surv]
    return DeletionResult(
        q=q,
        weight_blue=w,
        survivor_index=np.flatnonzero(surv),
        original=sk.lengths[surv],
        observed=observed,
        deleted_prefix=deleted,
        n_red=int(red.sum()),
        n_atoms=sk.n_atoms,
    )


def rho_formula(alpha: float, beta: float, q: float) -> float:
    """Positivity parameter of the signed walk driving the deletion time change.

    rho = 1/2 + (alpha/(pi beta)) arctan(((1-q)/(1+q)) tan(pi beta/(2 alpha))),
    valid for 0 < beta/alpha < 1 and q > 0; decreasing in q, equal to 1/2 at
    q = 1, tending to 1 as q -> 0.
    """
    a = beta / alpha
    if not 0.0 < a < 1.0:
        raise ValueError(f"rho_formula needs 0 < beta/alpha < 1, got {a}")
    if q <= 0:
        raise ValueError("q must be positive")
    return 0.5 + (1.0 / (math.pi * a)) * math.atan(((1.0 - q) / (1.0 + q)) * math.tan(math.pi * a / 2.0))


def sample_positive_stable(a: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact one-sided stable draws with Laplace transform exp(-lambda^a).

    Kanter's transform method: with U uniform on (0, pi) and E standard
    exponential,

        S = sin(aU) sin((1-a)U)^{(1-a)/a} / sin(U)^{1/a} * E^{-(1-a)/a}.
    """
    if not 0.0 < a < 1.0:
        raise ValueError("index must lie in (0, 1)")
    u = rng.uniform(0.0, math.pi, n)
    e = rng.standard_exponential(n)
    num = np.sin(a * u) * np.sin((1.0 - a) * u) ** ((1.0 - a) / a)
    return num / np.sin(u) ** (1.0 / a) * e ** (-(1.0 - a) / a)


@dataclass(frozen=True)
class RhoEstimate:
    rho_hat: float
    se: float
    n: int


def rho_empirical(a: float, q: float, n: int, rng: np.random.Generator) -> RhoEstimate:
    """Monte Carlo positivity parameter of S - q^{1/a} S' for iid positive a-stables.

    The red and blue halves of the walk are a-stable subordinators whose
    scales differ by the factor q, i.e. by q^{1/a} pathwise, so the sign of
    the difference at time 1 estimates rho directly.  The common scale of the
    two draws cancels in the comparison.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    s1 = sample_positive_stable(a, n, rng)
    s2 = sample_positive_stable(a, n, rng)
    z = s1 - q ** (1.0 / a) * s2
    rho_hat = float(np.mean(z > 0))
    return RhoEstimate(rho_hat=rho_hat, se=math.sqrt(rho_hat * (1.0 - rho_hat) / n), n=n)
