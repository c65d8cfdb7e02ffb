"""Bivariate-subordinator dynamics and the multivariate exponential transform.

Two generalisations of the scalar machinery live here.

* ``(R, H)``: driven by a pair of subordinators ``(Z, h)``, the state grows as
  ``R_t = a + x^alpha int e^{alpha h_{s-}} dZ_s`` on the exponential clock of
  ``h`` while ``H_t = x e^{h}`` rides the clock itself.  The entrance law at
  time t acts as ``E[f(t Itilde/I_h, (t/I_h)^{1/alpha}) / I_h]`` with
  ``Itilde = int e^{-alpha h} dZ`` and ``I_h = int e^{-alpha h} ds`` taken on
  the same path; finiteness of ``Itilde`` is the log-moment criterion checked
  by :func:`lindner_maller_check`.

* n-dimensional exponential transform: coordinates ``x_i e^{xi^i}`` run on
  the common clock ``p(x) int e^{<alpha, xi>}``; with n = 1 this reduces
  bit-exactly to the scalar transform.  The entrance law is verified through
  its lambda-potential against the product measure ``prod x_i^{alpha_i-1} dx``
  and the resolvent identity.

Path construction for ``(Z, h)`` is event-driven and exact: jump epochs are
Poisson, the drift of ``h`` integrates in closed form between events, and
each Z-jump is weighted by the left limit of ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expfunc import IntegratorControl, _cells_matrix, _chunk_size, _exp_integral_engine
from .lamperti import ShapeError, exp_cell_means
from .levy import LevyPath, LevyTriplet, PreconditionError, increment_chunk
from .statcheck import TestReport

__all__ = [
    "ExponentialJump",
    "ParetoJump",
    "ConstantJump",
    "LogParetoJump",
    "nonneg_law_from_dict",
    "BivariateSubSpec",
    "MultiSpec",
    "TestFunction2",
    "LMReport",
    "lindner_maller_check",
    "RHPath",
    "rh_from_events",
    "simulate_rh",
    "sample_tilde_pairs",
    "BivariateMeasure",
    "entrance_tilde_estimate",
    "MultiPath",
    "mssmp_transform",
    "PotentialEstimate",
    "mssmp_potential_estimate",
    "resolvent_identity_check",
    "SE_MULT",
]

SE_MULT = 3.0


# ---------------------------------------------------------------------------
# Nonnegative jump catalog for subordinators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialJump:
    mean_size: float

    name = "exponential"

    def mean(self) -> float:
        return self.mean_size

    def survival(self, z: np.ndarray) -> np.ndarray:
        return np.exp(-np.asarray(z, dtype=float) / self.mean_size)

    def density(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.exp(-y / self.mean_size) / self.mean_size

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return -self.mean_size * np.log1p(-np.asarray(u, dtype=float))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.exponential(self.mean_size, n)

    def params(self) -> dict:
        return {"mean_size": self.mean_size}

    atom = None


@dataclass(frozen=True)
class ParetoJump:
    index: float
    xmin: float

    name = "pareto"

    def mean(self) -> float:
        return math.inf if self.index <= 1 else self.index * self.xmin / (self.index - 1)

    def survival(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.where(z < self.xmin, 1.0, (self.xmin / np.maximum(z, self.xmin)) ** self.index)

    def density(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        ok = y >= self.xmin
        out[ok] = self.index * self.xmin**self.index * y[ok] ** (-self.index - 1.0)
        return out

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.xmin * (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / self.index)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.xmin * rng.random(n) ** (-1.0 / self.index)

    def params(self) -> dict:
        return {"index": self.index, "xmin": self.xmin}

    atom = None


@dataclass(frozen=True)
class ConstantJump:
    value: float

    name = "constant"

    def mean(self) -> float:
        return self.value

    def survival(self, z: np.ndarray) -> np.ndarray:
        return (np.asarray(z, dtype=float) < self.value).astype(float)

    def density(self, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(y, dtype=float))

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(u, dtype=float), self.value)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.full(n, self.value)

    def params(self) -> dict:
        return {"value": self.value}

    @property
    def atom(self):
        return self.value


@dataclass(frozen=True)
class LogParetoJump:
    """Jump exp(W) with W Pareto: survival (wmin/log y)^index above exp(wmin).

    With index <= 1 the log-moment of a jump is infinite, which is the
    textbook way to break the integrability criterion of the growth integral.
    """

    index: float
    wmin: float = 1.0

    name = "log_pareto"

    def mean(self) -> float:
        return math.inf

    def survival(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        lo = math.exp(self.wmin)
        return np.where(z < lo, 1.0, (self.wmin / np.log(np.maximum(z, lo))) ** self.index)

    def density(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        ok = y >= math.exp(self.wmin)
        ly = np.log(y[ok])
        out[ok] = self.index * self.wmin**self.index * ly ** (-self.index - 1.0) / y[ok]
        return out

    def ppf(self, u: np.ndarray) -> np.ndarray:
        w = self.wmin * (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / self.index)
        return np.exp(w)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.exp(self.wmin * rng.random(n) ** (-1.0 / self.index))

    def params(self) -> dict:
        return {"index": self.index, "wmin": self.wmin}

    atom = None


NonnegJumpLaw = ExponentialJump | ParetoJump | ConstantJump | LogParetoJump

_NONNEG_CLASSES = {c.name: c for c in (ExponentialJump, ParetoJump, ConstantJump, LogParetoJump)}


def nonneg_law_from_dict(d: dict) -> NonnegJumpLaw:
    name = d.get("name")
    if name not in _NONNEG_CLASSES:
        raise ValueError(f"unknown nonnegative jump law {name!r}; catalog: {sorted(_NONNEG_CLASSES)}")
    return _NONNEG_CLASSES[name](**d.get("params", {}))


@dataclass(frozen=True)
class BivariateSubSpec:
    """Subordinator pair (Z, h): nonnegative drifts plus joint jumps.

    Jumps arrive at the common rate; the coupling is ``independent`` (each
    marginal drawn on its own) or ``comonotone`` (one uniform drives both
    quantile functions).
    """

    drift_z: float
    drift_h: float
    jump_rate: float
    z_law: NonnegJumpLaw | None = None
    h_law: NonnegJumpLaw | None = None
    coupling: str = "independent"

    def __post_init__(self):
        if self.drift_z < 0 or self.drift_h < 0 or self.jump_rate < 0:
            raise ValueError("drifts and jump_rate must be nonnegative")
        if self.jump_rate > 0 and (self.z_law is None or self.h_law is None):
            raise ValueError("jump_rate > 0 requires both marginal laws")
        if self.coupling not in ("independent", "comonotone"):
            raise ValueError("coupling must be 'independent' or 'comonotone'")

    def sample_jumps(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        if self.coupling == "comonotone":
            u = rng.random(n)
            return self.z_law.ppf(u), self.h_law.ppf(u)
        return self.z_law.sample(n, rng), self.h_law.sample(n, rng)

    def h_mean_rate(self) -> float:
        rate = self.drift_h
        if self.jump_rate > 0:
            rate += self.jump_rate * self.h_law.mean()
        return rate

    def to_dict(self) -> dict:
        d = {
            "drift_z": self.drift_z,
            "drift_h": self.drift_h,
            "jump_rate": self.jump_rate,
            "coupling": self.coupling,
        }
        if self.z_law is not None:
            d["z_law"] = {"name": self.z_law.name, "params": self.z_law.params()}
            d["h_law"] = {"name": self.h_law.name, "params": self.h_law.params()}
        return d

    @staticmethod
    def from_dict(d: dict) -> "BivariateSubSpec":
        known = {"drift_z", "drift_h", "jump_rate", "coupling", "z_law", "h_law"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown bivariate key {sorted(unknown)[0]!r}")
        return BivariateSubSpec(
            drift_z=float(d.get("drift_z", 0.0)),
            drift_h=float(d.get("drift_h", 0.0)),
            jump_rate=float(d.get("jump_rate", 0.0)),
            z_law=nonneg_law_from_dict(d["z_law"]) if "z_law" in d else None,
            h_law=nonneg_law_from_dict(d["h_law"]) if "h_law" in d else None,
            coupling=d.get("coupling", "independent"),
        )


@dataclass(frozen=True)
class MultiSpec:
    """Independent-coordinate driver of the n-dimensional exponential transform.

    Killing is global (the whole vector dies at rate ``kill_rate``), so the
    coordinate triplets must be unkilled.
    """

    alphas: tuple[float, ...]
    triplets: tuple[LevyTriplet, ...]
    kill_rate: float = 0.0

    def __post_init__(self):
        if len(self.alphas) != len(self.triplets) or not self.alphas:
            raise ValueError("alphas and triplets must align and be nonempty")
        if self.kill_rate < 0:
            raise ValueError("kill_rate must be nonnegative")
        for t in self.triplets:
            if t.kill_rate != 0.0:
                raise ValueError("coordinate triplets must be unkilled; killing is global")

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def combined_mean(self) -> float:
        return float(sum(a * t.mean() for a, t in zip(self.alphas, self.triplets)))


# ---------------------------------------------------------------------------
# Bivariate test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction2:
    """Catalog test function on (r, x) pairs: exponential product, box, or bump pair."""

    kind: str
    c1: float = 1.0
    c2: float = 1.0
    r_range: tuple[float, float] = (0.0, 1.0)
    x_range: tuple[float, float] = (0.5, 2.0)

    def __call__(self, r: np.ndarray, x: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.kind == "exp_product":
            return np.exp(-self.c1 * r - self.c2 * x)
        if self.kind == "box":
            return (
                (r > self.r_range[0])
                & (r <= self.r_range[1])
                & (x > self.x_range[0])
                & (x <= self.x_range[1])
            ).astype(float)
        raise ValueError(f"unknown bivariate test function kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "exp_product":
            return f"e^-({self.c1:g}r+{self.c2:g}x)"
        return f"box{self.r_range}x{self.x_range}"


# ---------------------------------------------------------------------------
# Growth-integral finiteness criterion
# ---------------------------------------------------------------------------


@dataclass
class LMReport:
    integral_window: float
    tail_estimate: float
    finite: bool
    inconclusive: bool
    rationale: str


def lindner_maller_check(spec: BivariateSubSpec, x_max: float = 1e8, n_grid: int = 4000) -> LMReport:
    """Evaluate int_e^{x_max} (log y / A_h(log y)) Pi_Z(dy) and extrapolate the tail.

    ``A_h(x) = max(1, tail_h(1)) + int_1^x tail_h`` grows with the integrated
    h-jump tail; finiteness of the full integral is the criterion for the
    growth integral ``int e^{-alpha h} dZ`` to converge.  The tail beyond
    ``x_max`` is classified by fitting the integrand's decay in log-space:
    exponential or faster-than-1/u power decay extrapolates to a finite tail,
    slower decay to divergence, and an unstable fit is flagged inconclusive.
    """
    if spec.jump_rate == 0.0:
        return LMReport(0.0, 0.0, True, False, "no Z jumps: integral vanishes")

    def a_h(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        base = max(1.0, float(spec.jump_rate * spec.h_law.survival(np.asarray(1.0)))) if spec.h_law else 1.0
        grid = np.linspace(1.0, max(float(np.max(x)), 1.0 + 1e-9), 2000)
        tail = spec.jump_rate * spec.h_law.survival(grid)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (tail[1:] + tail[:-1]) * np.diff(grid))])
        return base + np.interp(x, grid, cum)

    atom = spec.z_law.atom
    if atom is not None:
        if atom <= math.e:
            return LMReport(0.0, 0.0, True, False, "single Z-jump size below e: integral vanishes")
        val = float(spec.jump_rate * math.log(atom) / a_h(np.asarray([math.log(atom)]))[0])
        return LMReport(val, 0.0, True, False, "atomic Z jumps: finite sum")

    u = np.linspace(1.0, math.log(x_max), n_grid)
    y = np.exp(u)
    integrand = (u / a_h(u)) * spec.jump_rate * spec.z_law.density(y) * y
    window = float(np.trapezoid(integrand, u))
    # classify the decay of the integrand g(u) over the last stretch
    m = n_grid // 3
    gu = integrand[-m:]
    uu = u[-m:]
    pos = gu > 0
    if pos.sum() < m // 2:
        return LMReport(window, 0.0, True, False, "integrand vanishes before the window end")
    lg = np.log(gu[pos])
    uug = uu[pos]
    k_exp, r_exp = _fit_slope(uug, lg)
    if k_exp < -0.3 and r_exp > 0.95:
        tail = gu[-1] / abs(k_exp)
        return LMReport(window, float(tail), True, False, f"exponential decay rate {abs(k_exp):.3g}")
    # log-log slopes on the two halves of the window: a genuine power tail has a
    # stable slope, faster-than-power decay steepens
    half = uug.size // 2
    s1, _ = _fit_slope(np.log(uug[:half]), lg[:half])
    s2, _ = _fit_slope(np.log(uug[half:]), lg[half:])
    if s2 < -1.05:
        tail = gu[-1] * uu[-1] / (abs(s2) - 1.0)
        return LMReport(window, float(tail), True, False, f"power decay exponent {s2:.3g} < -1")
    if s2 > -0.95 and s2 >= s1 - 0.3:
        return LMReport(window, math.inf, False, False, f"stable power decay exponent {s2:.3g} >= -1")
    return LMReport(window, math.nan, False, True, f"unstable decay fit ({s1:.3g} -> {s2:.3g})")


def _fit_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    coef = np.polyfit(x, y, 1)
    fit = np.polyval(coef, x)
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2)) or 1e-300
    return float(coef[0]), 1.0 - ss_res / ss_tot


# ---------------------------------------------------------------------------
# (R, H): exact event-driven construction
# ---------------------------------------------------------------------------


@dataclass
class RHPath:
    """Transformed pair on its clock; grid times are images of the driver grid."""

    alpha: float
    start_r: float
    start_x: float
    times: np.ndarray
    r_values: np.ndarray
    h_values: np.ndarray


@dataclass
class _DriverPath:
    """(Z, h) driver sampled in its own time: exact segment integrals of e^{sign*alpha*h}."""

    times: np.ndarray       # merged event/grid times, starting at 0
    h_left: np.ndarray      # h just before each time
    h_right: np.ndarray     # h just after each time (jumps applied)
    v_cum: np.ndarray       # int e^{sign*alpha*h_-} dZ up to each time (inclusive)
    clock_cum: np.ndarray   # int e^{sign*alpha*h} ds up to each time


def _build_driver(
    drift_z: float,
    drift_h: float,
    jump_times: np.ndarray,
    jump_z: np.ndarray,
    jump_h: np.ndarray,
    horizon: float,
    grid_step: float,
    alpha_sign: float,
) -> _DriverPath:
    """Exact path functionals of (Z, h) given explicit jump events.

    ``alpha_sign`` is the exponent multiplier (alpha for the forward clock,
    -alpha for the decaying functionals).  Each Z jump is weighted by the
    left limit of h; drift segments integrate the exponential of the linear
    h in closed form.
    """
    base = np.arange(0.0, horizon + grid_step * 0.5, grid_step)
    times = np.unique(np.concatenate([base, jump_times, [horizon]]))
    times = times[(times >= 0.0) & (times <= horizon + 1e-15)]
    dh_at = np.zeros_like(times)
    dz_at = np.zeros_like(times)
    if jump_times.size:
        idx = np.searchsorted(times, jump_times)
        np.add.at(dh_at, idx, jump_h)
        np.add.at(dz_at, idx, jump_z)
    h_left = drift_h * times + np.concatenate([[0.0], np.cumsum(dh_at)[:-1]])
    h_right = h_left + dh_at
    a = alpha_sign
    seg_dt = np.diff(times)
    s0 = a * h_right[:-1]
    s1 = a * (h_right[:-1] + drift_h * seg_dt)
    if drift_h == 0.0 or a == 0.0:
        seg_int = np.exp(s0) * seg_dt
    else:
        d = s1 - s0
        small = np.abs(d) < 1e-8
        dd = np.where(small, 1.0, d)
        ratio = np.where(small, 1.0 + 0.5 * d, np.expm1(dd) / dd)
        seg_int = np.exp(s0) * ratio * seg_dt
    clock_cum = np.concatenate([[0.0], np.cumsum(seg_int)])
    v_jump = np.exp(a * h_left) * dz_at
    v_cum = np.cumsum(drift_z * np.concatenate([[0.0], seg_int]) + v_jump)
    return _DriverPath(times=times, h_left=h_left, h_right=h_right, v_cum=v_cum, clock_cum=clock_cum)


def rh_from_events(
    spec: BivariateSubSpec,
    jump_times: np.ndarray,
    jump_z: np.ndarray,
    jump_h: np.ndarray,
    horizon: float,
    grid_step: float,
    alpha: float,
    x: float,
    a0: float = 0.0,
) -> RHPath:
    """Deterministic (R, H) path from an explicit jump schedule.

    The accumulated integral weights every simultaneous Z jump by the h value
    just before the jump, which is observable on crafted schedules.
    """
    if x <= 0 or alpha <= 0:
        raise ValueError("x and alpha must be positive")
    drv = _build_driver(
        spec.drift_z, spec.drift_h, np.asarray(jump_times, dtype=float),
        np.asarray(jump_z, dtype=float), np.asarray(jump_h, dtype=float),
        horizon, grid_step, alpha,
    )
    xa = x**alpha
    return RHPath(
        alpha=alpha,
        start_r=a0,
        start_x=x,
        times=xa * drv.clock_cum,
        r_values=a0 + xa * drv.v_cum,
        h_values=x * np.exp(drv.h_right),
    )


def _draw_events(
    spec: BivariateSubSpec, horizon: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if spec.jump_rate == 0.0:
        empty = np.empty(0)
        return empty, empty, empty
    n = rng.poisson(spec.jump_rate * horizon)
    times = np.sort(rng.uniform(0.0, horizon, n))
    dz, dh = spec.sample_jumps(n, rng)
    return times, dz, dh


def simulate_rh(
    spec: BivariateSubSpec,
    a0: float,
    x: float,
    alpha: float,
    horizon: float,
    grid_step: float,
    rng: np.random.Generator,
) -> RHPath:
    """Exact-in-law (R, H) path: Poisson jump epochs, closed-form drift segments."""
    times, dz, dh = _draw_events(spec, horizon, rng)
    return rh_from_events(spec, times, dz, dh, horizon, grid_step, alpha, x, a0)


# ---------------------------------------------------------------------------
# Joint decaying functionals (Itilde, I_h)
# ---------------------------------------------------------------------------


def sample_tilde_pairs(
    spec: BivariateSubSpec,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> tuple[np.ndarray, np.ndarray]:
    """Joint draws of (int e^{-alpha h} dZ, int e^{-alpha h} ds) path by path.

    Requires h to drift upward (positive drift or positive-mean jumps) so both
    integrals converge; both are truncated by the same geometric tail rule as
    the scalar functional sampler.  Jumps inside a step are weighted by the
    step-start value of h, an O(step) approximation adequate for the
    statistical gates built on these draws.
    """
    m_h = spec.h_mean_rate()
    if m_h <= 0:
        raise PreconditionError("h must drift to +infinity: need drift_h > 0 or positive-mean jumps")
    lm = lindner_maller_check(spec)
    if not lm.finite:
        raise PreconditionError(f"growth integral diverges: {lm.rationale}")
    h = ctl.step
    rate_z = spec.drift_z + (spec.jump_rate * spec.z_law.mean() if spec.jump_rate else 0.0)
    i_tilde = np.zeros(n)
    i_h = np.zeros(n)
    hcur = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        c = _chunk_size(active.size, ctl.chunk)
        dh = np.full((active.size, c), spec.drift_h * h)
        dzj = np.zeros((active.size, c))
        if spec.jump_rate > 0:
            counts = rng.poisson(spec.jump_rate * h, active.size * c)
            total = int(counts.sum())
            if total:
                jz, jh = spec.sample_jumps(total, rng)
                nz = np.flatnonzero(counts)
                flat = np.repeat(nz, counts[nz])
                np.add.at(dh.reshape(-1), flat, jh)
                np.add.at(dzj.reshape(-1), flat, jz)
        h_path = hcur[active, None] + np.cumsum(dh, axis=1)
        cells = _cells_matrix(-alpha * hcur[active], -alpha * h_path)
        i_h[active] += h * cells.sum(axis=1)
        h_starts = np.concatenate([hcur[active, None], h_path[:, :-1]], axis=1)
        i_tilde[active] += spec.drift_z * h * cells.sum(axis=1) + (
            np.exp(-alpha * h_starts) * dzj
        ).sum(axis=1)
        hcur[active] = h_path[:, -1]
        steps[active] += c
        tail_h = 2.0 * np.exp(-alpha * hcur[active]) / (alpha * m_h)
        done = (tail_h < ctl.tail_eps * i_h[active]) & (
            tail_h * max(rate_z, 1e-300) < ctl.tail_eps * np.maximum(i_tilde[active], 1e-300)
        )
        done |= steps[active] >= ctl.max_steps
        active = active[~done]
    return i_tilde, i_h


@dataclass
class BivariateMeasure:
    """Weighted atoms ((r_i, x_i), w_i) of the bivariate entrance-law estimate."""

    atoms_r: np.ndarray
    atoms_x: np.ndarray
    weights: np.ndarray
    n: int
    t: float
    alpha: float

    def integrate(self, f2: TestFunction2) -> float:
        return float(np.sum(self.weights * f2(self.atoms_r, self.atoms_x)) / self.n)


def entrance_tilde_estimate(
    spec: BivariateSubSpec,
    alpha: float,
    t: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> BivariateMeasure:
    """Entrance-law estimate at time t: atoms (t*Itilde/I_h, (t/I_h)^{1/alpha}), weights 1/I_h."""
    if t <= 0:
        raise ValueError("t must be positive")
    i_tilde, i_h = sample_tilde_pairs(spec, alpha, n, rng, ctl)
    return BivariateMeasure(
        atoms_r=t * i_tilde / i_h,
        atoms_x=(t / i_h) ** (1.0 / alpha),
        weights=1.0 / i_h,
        n=n,
        t=t,
        alpha=alpha,
    )


# ---------------------------------------------------------------------------
# Multi-self-similar transform
# ---------------------------------------------------------------------------


@dataclass
class MultiPath:
    """Coordinatewise exponential path on the common product clock."""

    alphas: np.ndarray
    start: np.ndarray
    times: np.ndarray
    values: np.ndarray  # (dim, len(times))
    absorption: float = math.inf


def p_alpha(x: np.ndarray, alphas: np.ndarray) -> float:
    return float(np.prod(np.asarray(x, dtype=float) ** np.asarray(alphas, dtype=float)))


def mssmp_transform(paths: list[LevyPath], x, alphas) -> MultiPath:
    """Map n Lévy coordinate paths (same grid) to the transformed vector path.

    Clock cells integrate exp of the linearly interpolated combination
    ``<alphas, xi>`` times the prefactor ``prod x_i^{alpha_i}``; coordinates
    are ``x_i e^{xi^i}``.  With n = 1 this coincides bit for bit with the
    scalar transform.  The vector dies when any coordinate path dies.
    """
    x = np.asarray(x, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    if len(paths) != x.size or x.size != alphas.size or not len(paths):
        raise ShapeError("paths, x and alphas must align and be nonempty")
    if np.any(x <= 0):
        raise ShapeError("all starting coordinates must be positive")
    step = paths[0].step
    npts = paths[0].values.size
    for p in paths[1:]:
        if p.step != step or p.values.size != npts:
            raise ShapeError("coordinate paths must share one grid")
    combo = sum(a * p.values for a, p in zip(alphas, paths))
    pa = p_alpha(x, alphas)
    cells = exp_cell_means(np.asarray(combo, dtype=float))
    times = np.empty(npts)
    times[0] = 0.0
    np.cumsum(pa * step * cells, out=times[1:])
    values = np.vstack([xi * np.exp(p.values) for xi, p in zip(x, paths)])
    lifetime = min(p.lifetime for p in paths)
    absorption = math.inf
    if lifetime < math.inf:
        last_t = step * (npts - 1)
        if lifetime <= (last_t + step) * (1.0 + 1e-12):
            absorption = times[-1] + pa * math.exp(float(combo[-1])) * max(lifetime - last_t, 0.0)
    return MultiPath(alphas=alphas, start=x, times=times, values=values, absorption=absorption)


def _require_transient(spec: MultiSpec) -> float:
    if spec.kill_rate != 0.0:
        raise PreconditionError("the potential formula needs an infinite lifetime")
    mean = spec.combined_mean()
    if not mean > 0:
        raise PreconditionError("the potential formula needs <alphas, mean> > 0")
    return mean


def sample_dual_functional(
    spec: MultiSpec,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> np.ndarray:
    """Draws of int_0^inf exp(-<alphas, xi_s>) ds for the transient combination."""
    mean = _require_transient(spec)

    def make(n_active: int, n_steps: int, r: np.random.Generator) -> np.ndarray:
        total = np.zeros((n_active, n_steps))
        for a, t in zip(spec.alphas, spec.triplets):
            total += a * increment_chunk(t, n_active, n_steps, ctl.step, r)
        return -total

    values, _, _, _ = _exp_integral_engine(
        n=n,
        h=ctl.step,
        make_increments=make,
        s_drift=-mean,
        kill_rate=0.0,
        rng=rng,
        tail_eps=ctl.tail_eps,
        chunk=ctl.chunk,
        max_steps=ctl.max_steps,
    )
    return values


def _mssmp_nodes(
    alphas: np.ndarray, box: tuple[float, float], nodes_per_dim: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log-uniform product grid: node coordinates, quadrature weights of the
    reference measure prod x^{alpha_i - 1} dx, and the clock prefactor p(x)."""
    lo, hi = box
    dim = alphas.size
    u = np.linspace(math.log(lo), math.log(hi), nodes_per_dim)
    du = u[1] - u[0]
    w1 = np.full(nodes_per_dim, du)
    w1[0] = w1[-1] = du / 2.0
    grids = np.meshgrid(*([u] * dim), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)  # (G, dim)
    wq = np.ones(U.shape[0])
    for d in range(dim):
        idx = np.searchsorted(u, U[:, d])
        wq *= w1[idx] * np.exp(alphas[d] * U[:, d])
    X = np.exp(U)
    p = np.exp(U @ alphas)
    return X, wq, p


@dataclass
class PotentialEstimate:
    value: float
    se: float
    truncation_fraction: float
    truncation_flagged: bool
    n: int


def _potential_phi(
    f_nodes: np.ndarray, wq: np.ndarray, p: np.ndarray, lam: float, i_hat: np.ndarray
) -> np.ndarray:
    """Per-sample collapse sum_nodes wq f(x) exp(-lam p(x) I_k); mean over k is the potential."""
    phi = np.empty(i_hat.size)
    chunk = max(1, (1 << 22) // max(p.size, 1))
    for i in range(0, i_hat.size, chunk):
        e = np.exp(-lam * np.outer(i_hat[i : i + chunk], p))
        phi[i : i + chunk] = e @ (wq * f_nodes)
    return phi


def mssmp_potential_estimate(
    spec: MultiSpec,
    lam: float,
    f,
    box: tuple[float, float] = (math.exp(-3.0), math.exp(3.0)),
    n: int = 20_000,
    rng: np.random.Generator | None = None,
    ctl: IntegratorControl = IntegratorControl(),
    nodes_per_dim: int = 32,
    i_hat: np.ndarray | None = None,
) -> PotentialEstimate:
    """lambda-potential of the entrance law: quadrature of prod x^{alpha-1} f(x)
    E[exp(-lam p(x) Ihat)] over a log-uniform box, Monte Carlo over Ihat.

    ``f`` maps an (G, dim) array of states to G values.  The truncation
    fraction is the share of the quadrature contributed by the outermost node
    shell; above 5% the box is flagged too small.
    """
    alphas = np.asarray(spec.alphas, dtype=float)
    if i_hat is None:
        if rng is None:
            raise ValueError("need rng when i_hat is not supplied")
        i_hat = sample_dual_functional(spec, n, rng, ctl)
    X, wq, p = _mssmp_nodes(alphas, box, nodes_per_dim)
    f_nodes = np.asarray(f(X), dtype=float)
    phi = _potential_phi(f_nodes, wq, p, lam, i_hat)
    value = float(np.mean(phi))
    se = float(np.std(phi, ddof=1) / math.sqrt(phi.size))
    contrib = (wq * f_nodes) * np.exp(-lam * p * float(np.median(i_hat)))
    U = np.log(X)
    lo, hi = math.log(box[0]), math.log(box[1])
    du = (hi - lo) / (nodes_per_dim - 1)
    on_edge = np.any((U <= lo + du * 0.5) | (U >= hi - du * 0.5), axis=1)
    total = float(np.sum(np.abs(contrib))) or 1e-300
    frac = float(np.sum(np.abs(contrib[on_edge]))) / total
    return PotentialEstimate(
        value=value,
        se=se,
        truncation_fraction=frac,
        truncation_flagged=frac > 0.05,
        n=i_hat.size,
    )


# ---------------------------------------------------------------------------
# Resolvent identity
# ---------------------------------------------------------------------------


def _mssmp_resolvent(
    spec: MultiSpec,
    lam: float,
    kappa: float,
    f,
    box: tuple[float, float],
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl,
    nodes_per_dim: int,
    m_paths: int,
    path_horizon: float,
    path_step: float,
    seed: int | None,
) -> TestReport:
    alphas = np.asarray(spec.alphas, dtype=float)
    _require_transient(spec)
    i_hat = sample_dual_functional(spec, n, rng, ctl)
    X, wq, p = _mssmp_nodes(alphas, box, nodes_per_dim)
    f_nodes = np.asarray(f(X), dtype=float)
    phi_l = _potential_phi(f_nodes, wq, p, lam, i_hat)
    phi_k = _potential_phi(f_nodes, wq, p, kappa, i_hat)
    # resolvent of f at every node, reusing one common set of driver paths
    n_steps = int(path_horizon / path_step)
    g_nodes = np.zeros((m_paths, X.shape[0]))
    for m in range(m_paths):
        incs = [increment_chunk(t, 1, n_steps, path_step, rng)[0] for t in spec.triplets]
        xi = np.vstack([np.concatenate([[0.0], np.cumsum(i)]) for i in incs])
        combo = alphas @ xi
        cells = exp_cell_means(combo)
        A = np.concatenate([[0.0], np.cumsum(path_step * cells)])
        # state value at grid j for node x: x * e^{xi_j}; rectangle rule in driver time
        states = np.exp(xi.T)  # (K+1, dim)
        fvals = np.asarray(f(states[None, :, :] * X[:, None, :]).reshape(X.shape[0], -1))
        decay = np.exp(-lam * np.outer(p, A))
        g_nodes[m] = p * np.sum(fvals * decay * np.exp(combo)[None, :] * path_step, axis=1)
    g_mean = g_nodes.mean(axis=0)
    psi_samples = _potential_phi(g_mean, wq, p, kappa, i_hat)
    lhs = float(np.mean(psi_samples))
    rhs_terms = (phi_k - phi_l) / (lam - kappa)
    rhs = float(np.mean(rhs_terms))
    # per-sample and per-path fluctuations of the difference
    d_terms = psi_samples - rhs_terms
    se_samples = float(np.std(d_terms, ddof=1) / math.sqrt(n))
    e_k = np.zeros(p.size)
    chunk = max(1, (1 << 22) // p.size)
    for i in range(0, n, chunk):
        e_k += np.exp(-kappa * np.outer(i_hat[i : i + chunk], p)).sum(axis=0)
    e_k /= n
    psi_paths = g_nodes @ (wq * e_k)
    se_paths = float(np.std(psi_paths, ddof=1) / math.sqrt(m_paths))
    se = math.hypot(se_samples, se_paths)
    return TestReport(
        check="resolvent_mssmp",
        params={
            "lam": lam,
            "kappa": kappa,
            "dim": spec.dim,
            "nodes": nodes_per_dim,
            "m_paths": m_paths,
            "h": ctl.step,
        },
        lhs=lhs,
        rhs=rhs,
        statistic=abs(lhs - rhs),
        threshold=SE_MULT * se,
        n=n,
        seed=seed,
    )


def _rh_resolvent(
    spec: BivariateSubSpec,
    alpha: float,
    lam: float,
    kappa: float,
    f2: TestFunction2,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl,
    n_u: int,
    n_states: int,
    m_paths: int,
    path_horizon: float,
    path_step: float,
    seed: int | None,
) -> TestReport:
    i_tilde, i_h = sample_tilde_pairs(spec, alpha, n, rng, ctl)
    # u-grid of the potential integral int_0^inf e^{-lam u I_h} f2(u Itilde, u^{1/alpha}) du
    u_hi = 60.0 / (min(lam, kappa) * float(np.quantile(i_h, 0.05)))
    u = np.geomspace(1e-5, u_hi, n_u)
    uw = np.empty(n_u)
    uw[1:-1] = 0.5 * (u[2:] - u[:-2])
    uw[0] = 0.5 * (u[1] - u[0])
    uw[-1] = 0.5 * (u[-1] - u[-2])

    def phi(rate: float) -> np.ndarray:
        out = np.empty(n)
        chunk = max(1, (1 << 22) // n_u)
        for i in range(0, n, chunk):
            e = np.exp(-rate * np.outer(i_h[i : i + chunk], u))
            fv = f2(np.outer(i_tilde[i : i + chunk], u), u[None, :] ** (1.0 / alpha))
            out[i : i + chunk] = (e * fv) @ uw
        return out

    phi_l = phi(lam)
    phi_k = phi(kappa)
    rhs_terms = (phi_k - phi_l) / (lam - kappa)
    rhs = float(np.mean(rhs_terms))
    # sample starting states from the normalized kappa-weighted measure
    w_ku = np.exp(-kappa * np.outer(i_h, u)) * uw[None, :]
    mass_terms = w_ku.sum(axis=1)
    mass = float(np.mean(mass_terms))
    flat_p = (w_ku / w_ku.sum()).ravel()
    pick = rng.choice(flat_p.size, size=n_states, p=flat_p)
    ki, ui = np.unravel_index(pick, w_ku.shape)
    st_r = i_tilde[ki] * u[ui]
    st_x = u[ui] ** (1.0 / alpha)
    # resolvent at the sampled states over common driver paths
    g_states = np.zeros((m_paths, n_states))
    for m in range(m_paths):
        ev_t, ev_z, ev_h = _draw_events(spec, path_horizon, rng)
        drv = _build_driver(spec.drift_z, spec.drift_h, ev_t, ev_z, ev_h, path_horizon, path_step, alpha)
        mid = 0.5 * (drv.clock_cum[1:] + drv.clock_cum[:-1])
        segw = np.diff(drv.clock_cum)
        v_mid = 0.5 * (drv.v_cum[1:] + drv.v_cum[:-1])
        h_mid = drv.h_right[:-1] + spec.drift_h * 0.5 * np.diff(drv.times)
        xa = st_x[:, None] ** alpha
        tt = xa * mid[None, :]
        rr = st_r[:, None] + xa * v_mid[None, :]
        hh = st_x[:, None] * np.exp(h_mid[None, :])
        g_states[m] = np.sum(np.exp(-lam * tt) * f2(rr, hh) * xa * segw[None, :], axis=1)
    g_mean = g_states.mean(axis=0)
    lhs = mass * float(np.mean(g_mean))
    se_states = mass * float(np.std(g_mean, ddof=1) / math.sqrt(n_states))
    se_mass = float(np.std(mass_terms, ddof=1) / math.sqrt(n)) * float(np.mean(g_mean))
    se_rhs = float(np.std(rhs_terms, ddof=1) / math.sqrt(n))
    se = math.sqrt(se_states**2 + se_mass**2 + se_rhs**2)
    return TestReport(
        check="resolvent_rh",
        params={
            "lam": lam,
            "kappa": kappa,
            "alpha": alpha,
            "f": f2.label(),
            "m_paths": m_paths,
            "n_states": n_states,
            "h": ctl.step,
        },
        lhs=lhs,
        rhs=rhs,
        statistic=abs(lhs - rhs),
        threshold=SE_MULT * se,
        n=n,
        seed=seed,
    )


def resolvent_identity_check(
    source: str,
    spec,
    lam: float,
    kappa: float,
    f,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    alpha: float = 1.0,
    box: tuple[float, float] = (math.exp(-3.0), math.exp(3.0)),
    nodes_per_dim: int = 24,
    n_u: int = 48,
    n_states: int = 1024,
    m_paths: int = 128,
    path_horizon: float = 18.0,
    path_step: float = 0.01,
    seed: int | None = None,
) -> TestReport:
    """nu_kappa(R_lam f) = (nu_kappa f - nu_lam f)/(lam - kappa) for either potential.

    The identity holds exactly when the family is an entrance law for the
    semigroup, which is what it verifies; both sides are estimated from shared
    randomness where possible and compared within the combined standard error.
    """
    if lam == kappa or lam <= 0 or kappa <= 0:
        raise ValueError("need distinct positive rates")
    if source == "mssmp":
        return _mssmp_resolvent(
            spec, lam, kappa, f, box, n, rng, ctl, nodes_per_dim, m_paths, path_horizon, path_step, seed
        )
    if source == "rh":
        return _rh_resolvent(
            spec, alpha, lam, kappa, f, n, rng, ctl, n_u, n_states, m_paths, path_horizon, path_step, seed
        )
    raise ValueError("source must be 'mssmp' or 'rh'")
