"""Monte Carlo sampling of exponential functionals with explicit truncation control.

The central object is ``I = int_0^zeta exp(alpha xi_s) ds``.  Killed paths are
integrated exactly to their lifetime (the final partial cell rides the last
value).  Unkilled paths with negative mean are integrated until the
deterministic remainder estimate ``2 exp(alpha xi_T) / (alpha |m|)`` -- the
geometric-drift tail with a factor-2 safety margin -- drops below
``tail_eps`` times the accumulated integral; the estimate at the stopping
time is returned as ``tail_bound``, so the reported value undershoots the
true integral by at most that much.

All samplers are vectorised over paths and chunked in time; a batch is
deterministic given (rng state, n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lamperti import PathClass, classify_detail, exp_cell_means
from .levy import LevyPath, LevyTriplet, PreconditionError, increment_chunk
from .statcheck import bootstrap_ci

__all__ = [
    "IntegratorControl",
    "ExpFunctionalSample",
    "sample_I",
    "sample_I_batch",
    "MomentEstimate",
    "estimate_moment",
    "discrete_exp_functional",
    "pssmp_value_at",
]

_EXP_CAP = 700.0
_MAX_CHUNK_FLOATS = 1 << 24  # cap per-chunk workspace around 128 MB


@dataclass(frozen=True)
class IntegratorControl:
    """Knobs of the chunked integrators; the defaults are what every gate states."""

    step: float = 1e-3
    tail_eps: float = 1e-4
    chunk: int = 512
    max_steps: int = 2_000_000
    evolve_eps: float = 1e-3  # giving-up threshold of the fixed-time evolver

    def __post_init__(self):
        if self.step <= 0 or self.tail_eps <= 0 or self.chunk < 1:
            raise ValueError("step, tail_eps must be positive and chunk >= 1")


@dataclass
class ExpFunctionalSample:
    value: float
    truncated: bool
    horizon_used: float
    tail_bound: float


def _chunk_size(n_active: int, requested: int) -> int:
    return max(16, min(requested, _MAX_CHUNK_FLOATS // max(n_active, 1)))


def _cells_matrix(s_prev: np.ndarray, s_path: np.ndarray) -> np.ndarray:
    """Exp-linear cell means across a chunk: columns are consecutive cells."""
    s_all_prev = np.concatenate([s_prev[:, None], s_path[:, :-1]], axis=1)
    d = s_path - s_all_prev
    if s_path.size and max(float(np.max(s_path)), float(np.max(s_prev))) > _EXP_CAP:
        raise OverflowError("exp(alpha*xi) exceeds float range during integration")
    base = np.exp(s_all_prev)
    small = np.abs(d) < 1e-8
    dd = np.where(small, 1.0, d)
    ratio = np.expm1(dd) / dd
    ratio = np.where(small, 1.0 + 0.5 * d, ratio)
    return base * ratio


def _exp_integral_engine(
    n: int,
    h: float,
    make_increments: Callable[[int, int, np.random.Generator], np.ndarray],
    s_drift: float,
    kill_rate: float,
    rng: np.random.Generator,
    tail_eps: float,
    chunk: int,
    max_steps: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Integrate exp(s_t) dt over n paths of the exponent process s.

    ``make_increments(n_active, n_steps, rng)`` yields exact-in-law chunks of
    s-increments.  Killed paths (kill_rate > 0) stop exactly at their
    exponential lifetime; otherwise ``s_drift`` must be negative and the
    tail rule stops the path.  Returns (values, truncated, horizons, tails).
    """
    values = np.zeros(n)
    truncated = np.zeros(n, dtype=bool)
    horizons = np.zeros(n)
    tails = np.zeros(n)
    if kill_rate > 0:
        zeta = rng.exponential(1.0 / kill_rate, n)
        k_total = np.floor(zeta / h).astype(np.int64)
    elif s_drift < 0:
        zeta = None
    else:
        raise PreconditionError("engine needs killing or a negative exponent drift")

    s_cur = np.zeros(n)
    done = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        c = _chunk_size(active.size, chunk)
        inc = make_increments(active.size, c, rng)
        s_path = s_cur[active, None] + np.cumsum(inc, axis=1)
        cells = _cells_matrix(s_cur[active], s_path)
        if zeta is not None:
            remaining = k_total[active] - done[active]
            nfull = np.minimum(remaining, c)
            colmask = np.arange(c)[None, :] < nfull[:, None]
            values[active] += h * np.where(colmask, cells, 0.0).sum(axis=1)
            finishing = remaining <= c
            if np.any(finishing):
                fin = active[finishing]
                loc = (k_total[fin] - done[fin]).astype(np.int64)
                s_at = np.where(
                    loc == 0,
                    s_cur[fin],
                    np.take_along_axis(
                        s_path[finishing], np.maximum(loc - 1, 0)[:, None], axis=1
                    )[:, 0],
                )
                values[fin] += np.exp(s_at) * (zeta[fin] - k_total[fin] * h)
                horizons[fin] = zeta[fin]
            s_cur[active] = s_path[:, -1]
            done[active] += c
            active = active[~finishing]
        else:
            values[active] += h * cells.sum(axis=1)
            s_cur[active] = s_path[:, -1]
            done[active] += c
            tail = 2.0 * np.exp(s_cur[active]) / abs(s_drift)
            finishing = (tail < tail_eps * values[active]) | (done[active] >= max_steps)
            if np.any(finishing):
                fin = active[finishing]
                truncated[fin] = True
                tails[fin] = tail[finishing]
                horizons[fin] = done[fin] * h
            active = active[~finishing]
    return values, truncated, horizons, tails


def sample_I_batch(
    t: LevyTriplet,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """n independent draws of I; returns (values, truncated, horizons, tail_bounds).

    Requires the transformed process to hit zero: either killed (exact
    integral to the lifetime) or negative mean (tail-rule truncation).
    """
    cls = classify_detail(t, alpha)
    if not cls.hits_zero:
        raise PreconditionError(
            f"I is infinite for class {cls.kind.value}; need killing or negative mean"
        )
    unkilled = LevyTriplet(0.0, t.drift, t.gaussian_var, t.jump_rate, t.jump_law)

    def make(n_active: int, n_steps: int, r: np.random.Generator) -> np.ndarray:
        return alpha * increment_chunk(unkilled, n_active, n_steps, ctl.step, r)

    return _exp_integral_engine(
        n=n,
        h=ctl.step,
        make_increments=make,
        s_drift=alpha * cls.mean if cls.mean_is_finite else -1.0,
        kill_rate=t.kill_rate,
        rng=rng,
        tail_eps=ctl.tail_eps,
        chunk=ctl.chunk,
        max_steps=ctl.max_steps,
    )


def sample_I(
    t: LevyTriplet,
    alpha: float,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> ExpFunctionalSample:
    """One draw of I with its truncation metadata."""
    v, tr, hz, tb = sample_I_batch(t, alpha, 1, rng, ctl)
    return ExpFunctionalSample(
        value=float(v[0]), truncated=bool(tr[0]), horizon_used=float(hz[0]), tail_bound=float(tb[0])
    )


@dataclass(frozen=True)
class MomentEstimate:
    estimate: float
    ci_lo: float
    ci_hi: float
    n: int
    p: float


def estimate_moment(
    t: LevyTriplet,
    alpha: float,
    p: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    bootstrap: int = 500,
) -> MomentEstimate:
    """Sample mean of I^p with a percentile-bootstrap confidence interval.

    A divergent moment is not masked: it shows up as an exploding interval.
    """
    if n < 100:
        raise ValueError("estimate_moment needs n >= 100")
    values, _, _, _ = sample_I_batch(t, alpha, n, rng, ctl)
    powered = values**p
    lo, hi = bootstrap_ci(lambda v: float(np.mean(v)), powered, rng, b=bootstrap)
    return MomentEstimate(float(np.mean(powered)), lo, hi, n, p)


def discrete_exp_functional(path: LevyPath, alpha: float) -> tuple[float, bool]:
    """Integral of exp(alpha xi) over one sampled path; flag=True when it covers
    the whole lifetime (killed within the sampled window)."""
    s = alpha * path.values
    total = float(np.sum(exp_cell_means(s))) * path.step if path.values.size > 1 else 0.0
    complete = False
    if path.lifetime < math.inf:
        last_t = path.step * (path.values.size - 1)
        if path.lifetime <= (last_t + path.step) * (1.0 + 1e-12):
            total += math.exp(s[-1]) * max(path.lifetime - last_t, 0.0)
            complete = True
    return total, complete


def pssmp_value_at(
    t: LevyTriplet,
    alpha: float,
    starts: np.ndarray,
    t_target: float,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> tuple[np.ndarray, np.ndarray]:
    """Fresh transformed-path values at a fixed clock time, one path per start.

    Returns (values, alive): paths absorbed before ``t_target`` report
    ``alive=False``.  The crossing of the clock is solved inside the cell on
    the linearly interpolated exponent, so deterministic flows are exact.
    A path with negative mean is declared absorbed once the tail estimate of
    its remaining clock is below ``evolve_eps`` times the gap still to cover.
    """
    starts = np.asarray(starts, dtype=float)
    if np.any(starts <= 0):
        raise ValueError("starts must be positive")
    if t_target < 0:
        raise ValueError("t_target must be nonnegative")
    cls = classify_detail(t, alpha)
    if t.kill_rate == 0 and (not cls.mean_is_finite or cls.mean == 0.0):
        raise PreconditionError("fixed-time evolution needs killing or a nonzero finite mean")
    n = starts.size
    n_values = np.zeros(n)
    alive = np.zeros(n, dtype=bool)
    if t_target == 0.0:
        return starts.copy(), np.ones(n, dtype=bool)
    target_A = t_target / starts**alpha
    h = ctl.step
    unkilled = LevyTriplet(0.0, t.drift, t.gaussian_var, t.jump_rate, t.jump_law)
    if t.kill_rate > 0:
        zeta = rng.exponential(1.0 / t.kill_rate, n)
        k_total = np.floor(zeta / h).astype(np.int64)
    else:
        zeta = None

    s_cur = np.zeros(n)
    A_cur = np.zeros(n)
    done = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        c = _chunk_size(active.size, ctl.chunk)
        s_pre = s_cur[active]
        a_pre = A_cur[active]
        done_pre = done[active]
        inc = alpha * increment_chunk(unkilled, active.size, c, h, rng)
        s_path = s_pre[:, None] + np.cumsum(inc, axis=1)
        cells = _cells_matrix(s_pre, s_path)
        if zeta is not None:
            remaining = np.maximum(k_total[active] - done_pre, 0)
            colmask = np.arange(c)[None, :] < np.minimum(remaining, c)[:, None]
            cells = np.where(colmask, cells, 0.0)
        cumA = a_pre[:, None] + h * np.cumsum(cells, axis=1)
        crossed = cumA >= target_A[active, None]
        any_cross = crossed.any(axis=1)
        if np.any(any_cross):
            rows = np.flatnonzero(any_cross)
            cols = np.argmax(crossed[rows], axis=1)
            gidx = active[rows]
            s1 = np.where(cols == 0, s_pre[rows], s_path[rows, np.maximum(cols - 1, 0)])
            s2 = s_path[rows, cols]
            a_before = np.where(cols == 0, a_pre[rows], cumA[rows, np.maximum(cols - 1, 0)])
            need = target_A[gidx] - a_before
            v = s2 - s1
            arg = need * v * np.exp(-s1) / h
            s_cross = s1 + np.where(np.abs(v) < 1e-8, need * np.exp(-s1) / h * v, np.log1p(arg))
            n_values[gidx] = starts[gidx] * np.exp(s_cross / alpha)
            alive[gidx] = True
        cont = ~any_cross
        s_cur[active] = s_path[:, -1]
        A_cur[active] = cumA[:, -1]
        done[active] += c
        if zeta is not None:
            # still-uncrossed paths dying inside this chunk: the constant piece
            # between the last grid point and the lifetime may still reach the clock
            dying = cont & (k_total[active] - done_pre <= c)
            if np.any(dying):
                rows = np.flatnonzero(dying)
                gidx = active[rows]
                loc = (k_total[gidx] - done_pre[rows]).astype(np.int64)
                s_at = np.where(
                    loc == 0,
                    s_pre[rows],
                    np.take_along_axis(s_path[rows], np.maximum(loc - 1, 0)[:, None], axis=1)[:, 0],
                )
                a_grid = np.where(
                    loc == 0, a_pre[rows], cumA[rows, np.maximum(loc - 1, 0)]
                )
                a_final = a_grid + np.exp(s_at) * (zeta[gidx] - k_total[gidx] * h)
                in_partial = a_final >= target_A[gidx]
                hit = gidx[in_partial]
                s_hit = s_at[in_partial]
                n_values[hit] = starts[hit] * np.exp(s_hit / alpha)
                alive[hit] = True
                cont[rows] = False
        else:
            if cls.mean < 0:
                tail = 2.0 * np.exp(s_cur[active]) / (alpha * abs(cls.mean))
                gap = target_A[active] - A_cur[active]
                give_up = cont & ((tail < ctl.evolve_eps * gap) | (done[active] >= ctl.max_steps))
                cont &= ~give_up
            else:
                cont &= done[active] < ctl.max_steps
        active = active[cont]
    return n_values, alive
