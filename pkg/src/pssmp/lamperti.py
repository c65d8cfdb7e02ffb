"""Bijection between grid-sampled Lévy paths and positive self-similar paths.

A Lévy path ``xi`` with grid step h maps to the positive path
``X = x exp(xi)`` run on the clock ``x^alpha A`` with
``A(s) = int_0^s exp(alpha xi_u) du``.  On the grid, A integrates the
exponential of the *linearly interpolated* path exactly on every cell,
which makes the transform exact algebra: the inverse recovers the grid to
float precision, pure-drift paths reproduce the closed-form flow
``X_t = (x^alpha + alpha b t)^{1/alpha}`` exactly at grid points, and the
clock scales exactly under ``x -> c x``.  The discretisation error of any
Monte Carlo built on top lives entirely in the Lévy grid step.

The final partial cell of a killed path (between the last grid point and the
lifetime) integrates the constant last value, since the path holds it until
death.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .levy import LevyPath, LevyTriplet

__all__ = [
    "ShapeError",
    "PssmpPath",
    "OuPath",
    "exp_cell_means",
    "lamperti_forward",
    "lamperti_inverse",
    "PathClass",
    "ClassifyResult",
    "classify",
    "classify_detail",
    "ou_transform",
]

_EXP_CAP = 700.0


class ShapeError(ValueError):
    """A path object violates the structural invariants of the transform."""


@dataclass
class PssmpPath:
    """Positive self-similar path on a nonuniform grid, absorbed at ``absorption``.

    ``times`` start at 0 where the value equals ``start``; values are strictly
    positive on the grid, and the process is identically zero from
    ``absorption`` on (infinite when the path never dies within view).
    """

    alpha: float
    start: float
    times: np.ndarray
    values: np.ndarray
    absorption: float = math.inf

    def __post_init__(self):
        if self.alpha <= 0 or self.start <= 0:
            raise ShapeError("alpha and start must be positive")
        if self.times.size != self.values.size or self.times.size == 0:
            raise ShapeError("times and values must be equally sized and nonempty")
        if self.times[0] != 0.0:
            raise ShapeError("times must start at 0")
        if np.any(self.values <= 0):
            raise ShapeError("grid values must be strictly positive before absorption")
        if self.absorption < self.times[-1]:
            raise ShapeError("absorption precedes the last grid time")


@dataclass
class OuPath:
    """Exponentially time-changed and damped path; lifetime on the new clock."""

    alpha: float
    times: np.ndarray
    values: np.ndarray
    lifetime: float = math.inf


def exp_cell_means(s: np.ndarray) -> np.ndarray:
    """Cell averages of exp over linear interpolation: (e^{s2}-e^{s1})/(s2-s1).

    Stable near s2 == s1 via expm1; raises OverflowError (never clamps) when
    exp would leave float range.
    """
    if s.size and np.max(s) > _EXP_CAP:
        raise OverflowError(
            f"exp({np.max(s):.3g}) exceeds float range; rescale the path or lower alpha"
        )
    d = np.diff(s)
    base = np.exp(s[:-1])
    small = np.abs(d) < 1e-8
    ratio = np.empty_like(d)
    dd = np.where(small, 1.0, d)
    ratio[:] = np.expm1(dd) / dd
    ratio[small] = 1.0 + 0.5 * d[small]
    return base * ratio


def _check_forward_range(path: LevyPath, start: float, alpha: float) -> None:
    if path.values.size:
        peak = float(np.max(path.values))
        if alpha * peak > _EXP_CAP or alpha * (peak + math.log(start)) > _EXP_CAP:
            raise OverflowError(
                "exp(alpha*xi) exceeds float range for this path; not clamping"
            )


def lamperti_forward(path: LevyPath, start: float, alpha: float) -> PssmpPath:
    """Map a Lévy path to the positive self-similar path started at ``start``.

    Output grid times are the images ``x^alpha A(t_i)`` of the input grid,
    values are ``x exp(xi_i)``.  The absorption time ``x^alpha A(zeta)`` is
    reported when the path dies within the sampled window (the partial last
    cell rides the final value); otherwise the marker stays infinite.
    """
    if start <= 0 or alpha <= 0:
        raise ValueError("start and alpha must be positive")
    _check_forward_range(path, start, alpha)
    xa = start**alpha
    cells = exp_cell_means(alpha * path.values)
    times = np.empty(path.values.size)
    times[0] = 0.0
    np.cumsum(xa * path.step * cells, out=times[1:])
    values = start * np.exp(path.values)
    absorption = math.inf
    if path.lifetime < math.inf:
        last_t = path.step * (path.values.size - 1)
        if path.lifetime <= (last_t + path.step) * (1.0 + 1e-12):
            tail = max(path.lifetime - last_t, 0.0)
            absorption = times[-1] + xa * math.exp(alpha * path.values[-1]) * tail
    return PssmpPath(alpha=alpha, start=start, times=times, values=values, absorption=absorption)


def lamperti_inverse(p: PssmpPath) -> LevyPath:
    """Recover the Lévy path on its own clock from a transformed path.

    Exact inverse of :func:`lamperti_forward` up to float rounding; raises
    :class:`ShapeError` when the input is not shaped like its output
    (nonuniform decoded steps, zero values, absorption bookkeeping mismatch).
    """
    if p.times.size < 2:
        raise ShapeError("cannot decode the grid step from a single-point path")
    xi = np.log(p.values / p.start)
    xi[0] = 0.0
    xa = p.start**p.alpha
    cells = exp_cell_means(p.alpha * xi)
    dt = np.diff(p.times)
    if np.any(dt <= 0):
        raise ShapeError("times must be strictly increasing")
    steps = dt / (xa * cells)
    step = float(np.median(steps))
    if not np.allclose(steps, step, rtol=1e-6, atol=0.0):
        raise ShapeError("decoded grid steps are not uniform; not a transform image")
    lifetime = math.inf
    if p.absorption < math.inf:
        last_t = step * (xi.size - 1)
        extra = (p.absorption - p.times[-1]) / (xa * math.exp(p.alpha * xi[-1]))
        if extra < -1e-12 or extra > step * (1.0 + 1e-9):
            raise ShapeError("absorption time inconsistent with the final cell")
        lifetime = last_t + max(extra, 1e-300)
    return LevyPath(step=step, values=xi, lifetime=lifetime)


class PathClass(Enum):
    HITS_ZERO_KILLED = "hits_zero_killed"
    HITS_ZERO_DRIFT = "hits_zero_drift"
    NEVER_HITS_ZERO = "never_hits_zero"
    OSCILLATING = "oscillating"


@dataclass(frozen=True)
class ClassifyResult:
    kind: PathClass
    mean: float
    mean_is_finite: bool

    @property
    def hits_zero(self) -> bool:
        return self.kind in (PathClass.HITS_ZERO_KILLED, PathClass.HITS_ZERO_DRIFT)


def classify_detail(t: LevyTriplet, alpha: float) -> ClassifyResult:
    """Trichotomy of the transformed process: killed, drifts into 0, transient, or neither.

    With killing the process dies at a finite time; without killing the sign
    of the mean displacement decides.  An infinite or undefined jump mean is
    reported as OSCILLATING with ``mean_is_finite=False`` rather than guessed.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if t.kill_rate > 0:
        return ClassifyResult(PathClass.HITS_ZERO_KILLED, t.mean(), math.isfinite(t.mean()))
    m = t.mean()
    if not math.isfinite(m):
        return ClassifyResult(PathClass.OSCILLATING, m, False)
    if m < 0:
        kind = PathClass.HITS_ZERO_DRIFT
    elif m > 0:
        kind = PathClass.NEVER_HITS_ZERO
    else:
        kind = PathClass.OSCILLATING
    return ClassifyResult(kind, m, True)


def classify(t: LevyTriplet, alpha: float) -> PathClass:
    return classify_detail(t, alpha).kind


def ou_transform(p: PssmpPath) -> OuPath:
    """Stationary-clock companion path ``U_t = exp(-t/alpha) X_{exp(t)-1}``.

    The damping exponent is ``-t/alpha``: that is the unique choice consistent
    with the index-``1/alpha`` dilation built into the self-similar scaling
    (values at clock ``e^t - 1`` inflate like ``e^{t/alpha}``).  The lifetime
    maps to ``log(1 + T_0)``.
    """
    u_times = np.log1p(p.times)
    u_values = (1.0 + p.times) ** (-1.0 / p.alpha) * p.values
    lifetime = math.log1p(p.absorption) if p.absorption < math.inf else math.inf
    return OuPath(alpha=p.alpha, times=u_times, values=u_values, lifetime=lifetime)
