"""Weighted-sample entrance-law estimators and their identity checks.

For index gamma >= 0 the self-similar entrance law at time s acts on test
functions as

    mu_s^gamma f = s^{-gamma/alpha} * E[ f((s/I)^{1/alpha}) * I^{gamma/alpha - 1} ],

with I the exponential functional of the *dual of the gamma-tilted* process.
The estimator materialises this as atoms ``x_i = (s/I_i)^{1/alpha}`` with
weights ``w_i = s^{-gamma/alpha} I_i^{gamma/alpha-1}``; integration against f
is the weighted mean.  Existence requires E[exp(gamma xi_1); survival] <= 1,
i.e. a nonpositive Laplace exponent at gamma -- the estimator refuses
otherwise, which is precisely the nonexistence regime.

The checks in this module each verify one distributional identity of the
family: the semigroup property, the exact dilation scaling, the power-law
jumping-in representation, the Pareto and Beta factorisations, decay of the
quasi-stationary survival, and the Laplace-potential change of variables.
Statistical gates use the thresholds collected in :class:`GateThresholds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expfunc import IntegratorControl, pssmp_value_at, sample_I_batch
from .lamperti import PathClass, classify_detail
from .levy import LevyTriplet, PreconditionError, dual, esscher_tilt, laplace_exponent
from .statcheck import TestReport, bootstrap_se, ks_two_sample, ks_vs_cdf

__all__ = [
    "GateThresholds",
    "THRESHOLDS",
    "TestFunction",
    "indicator",
    "power_exp",
    "stretched_exp",
    "bump",
    "default_catalog",
    "WeightedEmpiricalMeasure",
    "draw_I",
    "ssel_from_I",
    "ssel_estimate",
    "scaling_check",
    "semigroup_check",
    "jumpin_check",
    "pareto_check",
    "beta_embedding_check",
    "quasi_stationary_check",
    "qpotential_check",
    "uniqueness_check",
]


@dataclass(frozen=True)
class GateThresholds:
    """Every statistical gate below reads its threshold from this one block."""

    se_mult: float = 3.0          # |lhs-rhs| <= se_mult * combined SE
    ks_gate: float = 0.02         # factorisation KS gates
    uniqueness_ks: float = 0.03   # two independent estimates of the same law
    jumpin_cv: float = 0.05       # coefficient of variation of the ratio table
    qpotential_rel: float = 1e-3  # same-sample quadrature identity
    scaling_tol: float = 1e-12    # exact dilation identity
    mass_se_mult: float = 4.0     # total-mass law for gamma=0
    ess_fraction: float = 0.1     # resampling degeneracy guard
    tail_warn: float = 0.01       # jumping-in truncation warning level


THRESHOLDS = GateThresholds()

_PRECOND_TOL = 1e-9


# ---------------------------------------------------------------------------
# Test-function catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Member of the fixed catalog of test functions on (0, infinity).

    kinds: ``indicator`` of (a, b], ``power_exp`` x^p e^{-x},
    ``stretched_exp`` e^{-lam x^alpha}, ``bump`` smooth and compactly
    supported on (center-width, center+width).
    """

    kind: str
    a: float = 0.0
    b: float = math.inf
    p: float = 1.0
    lam: float = 1.0
    alpha: float = 1.0
    center: float = 1.0
    width: float = 0.5

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "indicator":
            return ((x > self.a) & (x <= self.b)).astype(float)
        if self.kind == "power_exp":
            return x**self.p * np.exp(-x)
        if self.kind == "stretched_exp":
            return np.exp(-self.lam * x**self.alpha)
        if self.kind == "bump":
            u = (x - self.center) / self.width
            out = np.zeros_like(x)
            inside = np.abs(u) < 1.0
            out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
            return out
        raise ValueError(f"unknown test function kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "indicator":
            return f"ind({self.a:g},{self.b:g}]"
        if self.kind == "power_exp":
            return f"x^{self.p:g}e^-x"
        if self.kind == "stretched_exp":
            return f"e^-{self.lam:g}x^{self.alpha:g}"
        return f"bump({self.center:g},{self.width:g})"

    def vanishes_near_zero(self) -> bool:
        if self.kind == "indicator":
            return self.a > 0
        if self.kind == "bump":
            return self.center - self.width > 0
        return False


def indicator(a: float, b: float = math.inf) -> TestFunction:
    return TestFunction("indicator", a=a, b=b)


def power_exp(p: float) -> TestFunction:
    return TestFunction("power_exp", p=p)


def stretched_exp(lam: float, alpha: float) -> TestFunction:
    return TestFunction("stretched_exp", lam=lam, alpha=alpha)


def bump(center: float, width: float) -> TestFunction:
    return TestFunction("bump", center=center, width=width)


def default_catalog(alpha: float = 1.0) -> list[TestFunction]:
    return [indicator(0.5, 2.0), power_exp(1.0), stretched_exp(1.0, alpha)]


# ---------------------------------------------------------------------------
# The estimator
# ---------------------------------------------------------------------------


@dataclass
class WeightedEmpiricalMeasure:
    """Atoms (x_i, w_i) of an estimated (not necessarily probability) measure.

    The action on a test function is ``(1/n) sum w_i f(x_i)``; ``n`` is the
    number of draws behind the atoms, so measures built from the same draw
    count are directly comparable.
    """

    atoms_x: np.ndarray
    atoms_w: np.ndarray
    n: int
    gamma: float
    alpha: float
    s: float
    triplet_id: str = ""
    tilt: float = 0.0

    def integrate(self, f) -> float:
        return float(np.sum(self.atoms_w * f(self.atoms_x)) / self.n)

    def total_mass(self) -> float:
        return float(np.sum(self.atoms_w) / self.n)

    def ess(self) -> float:
        """Effective sample size of the normalized weights."""
        w = self.atoms_w
        return float(np.sum(w) ** 2 / np.sum(w * w)) if w.size else 0.0

    def resample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Multinomial draw from the normalized measure, with a degeneracy guard."""
        if self.ess() < THRESHOLDS.ess_fraction * self.atoms_w.size:
            raise PreconditionError(
                f"resampling degenerate: effective sample size {self.ess():.1f} "
                f"< {THRESHOLDS.ess_fraction:.0%} of {self.atoms_w.size}"
            )
        p = self.atoms_w / np.sum(self.atoms_w)
        return self.atoms_x[rng.choice(self.atoms_x.size, size=size, p=p)]

    def mean_se(self, f) -> float:
        """Plain standard error of the weighted mean against f."""
        terms = self.atoms_w * f(self.atoms_x)
        return float(np.std(terms, ddof=1) / math.sqrt(self.n))


def _require_existence(t: LevyTriplet, gamma: float, alpha: float) -> None:
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    cls = classify_detail(t, alpha)
    if gamma == 0.0:
        if cls.kind is not PathClass.NEVER_HITS_ZERO:
            raise PreconditionError(
                "the index-0 entrance law needs a transient process (positive mean, no killing)"
            )
        return
    if not cls.hits_zero:
        raise PreconditionError(
            "a positive-index entrance law needs a process that hits zero"
        )
    psi = laplace_exponent(t, gamma)
    if psi > _PRECOND_TOL:
        raise PreconditionError(
            f"no finite entrance law of index {gamma}: E[exp({gamma} xi_1); survival] = "
            f"exp({psi:.6g}) > 1"
        )


def draw_I(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> np.ndarray:
    """Exponential-functional draws of the dual of the gamma-tilted process.

    These are the raw material of the entrance-law estimator; refusal happens
    here, exactly when no finite index-gamma entrance law exists.
    """
    _require_existence(t, gamma, alpha)
    tilted_dual = dual(esscher_tilt(t, gamma, tol=_PRECOND_TOL))
    values, _, _, _ = sample_I_batch(tilted_dual, alpha, n, rng, ctl)
    return values


def ssel_from_I(
    I: np.ndarray,
    gamma: float,
    alpha: float,
    s: float,
    triplet_id: str = "",
) -> WeightedEmpiricalMeasure:
    """Entrance-law measure at time s from a fixed sample of functionals."""
    if s <= 0:
        raise ValueError("s must be positive")
    g = gamma / alpha
    atoms = (s / I) ** (1.0 / alpha)
    weights = s ** (-g) * I ** (g - 1.0)
    return WeightedEmpiricalMeasure(
        atoms_x=atoms,
        atoms_w=weights,
        n=I.size,
        gamma=gamma,
        alpha=alpha,
        s=s,
        triplet_id=triplet_id,
        tilt=gamma,
    )


def ssel_estimate(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    s: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
) -> WeightedEmpiricalMeasure:
    """Weighted-sample estimate of the index-gamma entrance law at time s."""
    I = draw_I(t, gamma, alpha, n, rng, ctl)
    return ssel_from_I(I, gamma, alpha, s, triplet_id=t.label())


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def scaling_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    pairs: int = 10,
    f: TestFunction | None = None,
    ctl: IntegratorControl = IntegratorControl(),
    seed: int | None = None,
) -> TestReport:
    """Exact dilation identity mu_s f = c^{-gamma} mu_{s c^{-alpha}}(f(c .)).

    Both sides are evaluated on the same functional sample, so the identity is
    pure algebra and must hold to float precision.
    """
    I = draw_I(t, gamma, alpha, n, rng, ctl)
    f = f or stretched_exp(1.0, alpha)
    worst = 0.0
    for _ in range(pairs):
        c = float(np.exp(rng.uniform(-1.5, 1.5)))
        s = float(np.exp(rng.uniform(-1.0, 1.0)))
        lhs = ssel_from_I(I, gamma, alpha, s).integrate(f)
        mu2 = ssel_from_I(I, gamma, alpha, s * c**-alpha)
        rhs = c**-gamma * mu2.integrate(lambda x: f(c * x))
        denom = max(abs(lhs), 1.0)
        worst = max(worst, abs(lhs - rhs) / denom)
    return TestReport(
        check="scaling",
        params={"gamma": gamma, "alpha": alpha, "pairs": pairs, "triplet": t.label()},
        lhs=float("nan"),
        rhs=float("nan"),
        statistic=worst,
        threshold=THRESHOLDS.scaling_tol,
        n=n,
        seed=seed,
    )


def semigroup_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    s: float,
    tstep: float,
    f: TestFunction,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    seed: int | None = None,
) -> TestReport:
    """mu_{s+t} f against mu_s applied to the killed semigroup at horizon t.

    The right side propagates every atom with one fresh transformed-path
    simulation; the two routes must agree within ``se_mult`` combined
    bootstrap standard errors.
    """
    mu = ssel_estimate(t, gamma, alpha, s, n, rng, ctl)
    lhs_measure = ssel_estimate(t, gamma, alpha, s + tstep, n, rng, ctl)
    lhs = lhs_measure.integrate(f)
    values, alive = pssmp_value_at(t, alpha, mu.atoms_x, tstep, rng, ctl)
    terms = np.where(alive, mu.atoms_w * f(np.where(alive, values, 1.0)), 0.0)
    rhs = float(np.mean(terms))
    se_l = bootstrap_se(lhs_measure.atoms_w * f(lhs_measure.atoms_x), rng)
    se_r = bootstrap_se(terms, rng)
    # the functional sampler undershoots by at most tail_eps relative, one-sided;
    # allow for that deterministic bias so degenerate (zero-variance) cases are
    # gated on it rather than on an empty confidence band
    bias_allowance = 4.0 * ctl.tail_eps * (abs(lhs) + abs(rhs))
    se = math.hypot(se_l, se_r)
    return TestReport(
        check="semigroup",
        params={
            "gamma": gamma,
            "alpha": alpha,
            "s": s,
            "t": tstep,
            "f": f.label(),
            "h": ctl.step,
            "triplet": t.label(),
        },
        lhs=lhs,
        rhs=rhs,
        statistic=abs(lhs - rhs),
        threshold=THRESHOLDS.se_mult * se + bias_allowance,
        n=n,
        seed=seed,
    )


def jumpin_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    s_values: tuple[float, ...],
    fs: list[TestFunction],
    x_range: tuple[float, float],
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    n_nodes: int = 48,
    seed: int | None = None,
) -> TestReport:
    """Constancy of A(f,s)/B(f,s) across test functions and times.

    A integrates x^{-1-gamma/alpha} E_x[f(X_s); survival] over a log grid of
    starting points (trapezoid in log x, Monte Carlo inside); B is the
    entrance-law estimate.  When the ratio table has coefficient of variation
    below the gate, the power-law jumping-in representation holds with the
    common ratio as its constant.  Strict subcriticality at gamma is required.
    """
    psi = laplace_exponent(t, gamma)
    if psi >= -_PRECOND_TOL:
        raise PreconditionError(
            f"jumping-in representation needs strict subcriticality; Psi({gamma}) = {psi:.3g}"
        )
    _require_existence(t, gamma, alpha)
    lo, hi = x_range
    if not 0 < lo < hi:
        raise ValueError("x_range must satisfy 0 < lo < hi")
    u = np.linspace(math.log(lo), math.log(hi), n_nodes)
    du = u[1] - u[0]
    nodes = np.exp(u)
    trap = np.full(n_nodes, du)
    trap[0] = trap[-1] = du / 2.0
    reps = max(1, n // n_nodes)
    I = draw_I(t, gamma, alpha, n, rng, ctl)
    ratios = []
    labels = []
    tail_frac = 0.0
    for s in s_values:
        starts = np.repeat(nodes, reps)
        values, alive = pssmp_value_at(t, alpha, starts, s, rng, ctl)
        fmat_weights = nodes ** (-gamma / alpha) * trap
        mu = ssel_from_I(I, gamma, alpha, s)
        for f in fs:
            fv = np.where(alive, f(np.where(alive, values, 1.0)), 0.0).reshape(n_nodes, reps)
            node_means = fv.mean(axis=1)
            contrib = fmat_weights * node_means
            a_val = float(np.sum(contrib))
            b_val = mu.integrate(f)
            if a_val > 0:
                edge = contrib[0] + contrib[-1]
                tail_frac = max(tail_frac, edge / a_val)
            ratios.append(a_val / b_val if b_val != 0 else math.nan)
            labels.append((f.label(), s))
    ratios = np.asarray(ratios)
    cv = float(np.std(ratios, ddof=1) / np.mean(ratios)) if np.all(np.isfinite(ratios)) else math.inf
    report = TestReport(
        check="jumpin",
        params={
            "gamma": gamma,
            "alpha": alpha,
            "s": ";".join(f"{s:g}" for s in s_values),
            "fs": len(fs),
            "x_range": f"[{lo:g},{hi:g}]",
            "h": ctl.step,
            "tail_warn": tail_frac > THRESHOLDS.tail_warn,
            "triplet": t.label(),
        },
        lhs=float(np.mean(ratios)),
        rhs=float("nan"),
        statistic=cv,
        threshold=THRESHOLDS.jumpin_cv,
        n=n,
        seed=seed,
    )
    return report


def pareto_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    seed: int | None = None,
) -> TestReport:
    """KS gate for I * J^alpha ~ Pareto(gamma/alpha).

    J is resampled from the normalized entrance law at time 1; I is drawn
    independently under the original (zero-hitting) measure.  The product has
    the Pareto distribution with density th (1+y)^{-1-th} at th = gamma/alpha.
    """
    _require_existence(t, gamma, alpha)
    mu = ssel_estimate(t, gamma, alpha, 1.0, n, rng, ctl)
    J = mu.resample(n, rng)
    I, _, _, _ = sample_I_batch(t, alpha, n, rng, ctl)
    y = I * J**alpha
    th = gamma / alpha
    stat = ks_vs_cdf(y, lambda v: 1.0 - (1.0 + v) ** (-th))
    return TestReport(
        check="pareto",
        params={"gamma": gamma, "alpha": alpha, "h": ctl.step, "triplet": t.label()},
        statistic=stat,
        threshold=THRESHOLDS.ks_gate,
        n=n,
        seed=seed,
    )


def beta_embedding_check(
    t: LevyTriplet,
    beta_lo: float,
    beta_hi: float,
    alpha: float,
    s: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    seed: int | None = None,
) -> TestReport:
    """KS gate for J_{beta'} ~ J_beta / B^{1/alpha}, B ~ Beta(beta'/a, (beta-beta')/a).

    Lower-index entrance laws embed into the one with the largest index by an
    independent Beta dilation; the degenerate pair beta'=beta bypasses the
    Beta factor entirely.
    """
    if not 0 < beta_lo <= beta_hi:
        raise ValueError("need 0 < beta_lo <= beta_hi")
    mu_lo = ssel_estimate(t, beta_lo, alpha, s, n, rng, ctl)
    j_lo = mu_lo.resample(n, rng)
    mu_hi = ssel_estimate(t, beta_hi, alpha, s, n, rng, ctl)
    j_hi = mu_hi.resample(n, rng)
    if beta_lo == beta_hi:
        mixed = j_hi
    else:
        b = rng.beta(beta_lo / alpha, (beta_hi - beta_lo) / alpha, n)
        mixed = j_hi / b ** (1.0 / alpha)
    stat = ks_two_sample(j_lo, mixed)
    return TestReport(
        check="beta_embed",
        params={
            "beta_lo": beta_lo,
            "beta_hi": beta_hi,
            "alpha": alpha,
            "s": s,
            "h": ctl.step,
            "triplet": t.label(),
        },
        statistic=stat,
        threshold=THRESHOLDS.ks_gate,
        n=n,
        seed=seed,
    )


def quasi_stationary_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    n_grid: int = 8,
    min_survivors: int = 50,
    n_boot: int = 200,
    seed: int | None = None,
) -> TestReport:
    """Exponential decay rate of survival on the stationary clock.

    Draw the start from the normalized entrance law at time 1, draw the
    absorption time via T_0 = x^alpha I (its law under the start), move to the
    logarithmic clock of the damped companion process, and fit log-survival
    linearly; the fitted rate must match gamma within ``se_mult`` bootstrap
    standard errors of the fit.
    """
    _require_existence(t, gamma, alpha)
    mu = ssel_estimate(t, gamma, alpha, 1.0, n, rng, ctl)
    x = mu.resample(n, rng)
    I, _, _, _ = sample_I_batch(t, alpha, n, rng, ctl)
    tu = np.log1p(x**alpha * I)
    t_max = math.log(max(n / 100.0, 4.0)) / gamma
    grid = np.linspace(0.15 * t_max, t_max, n_grid)

    def fit_rate(sample: np.ndarray) -> float:
        surv = np.array([(sample > g).mean() for g in grid])
        ok = surv * sample.size >= min_survivors
        if ok.sum() < 3:
            raise PreconditionError("too few survivors on the fitting grid")
        coef = np.polyfit(grid[ok], np.log(surv[ok]), 1)
        return -coef[0]

    rate = fit_rate(tu)
    boots = np.empty(n_boot)
    for i in range(n_boot):
        boots[i] = fit_rate(tu[rng.integers(0, n, n)])
    se = float(np.std(boots, ddof=1))
    return TestReport(
        check="quasi_stationary",
        params={"gamma": gamma, "alpha": alpha, "h": ctl.step, "triplet": t.label()},
        lhs=rate,
        rhs=gamma,
        statistic=abs(rate - gamma),
        threshold=THRESHOLDS.se_mult * se,
        n=n,
        seed=seed,
    )


def _log_trapezoid(values: np.ndarray, u: np.ndarray) -> float:
    return float(np.trapezoid(values, u))


def qpotential_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    q_lap: float,
    f: TestFunction,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    n_nodes: int = 3000,
    seed: int | None = None,
) -> TestReport:
    """Laplace potential of the entrance law computed along two quadrature routes.

    Route (a) integrates e^{-qt} mu_t f over t directly; route (b) applies
    the change of variables t = e^{alpha x} I per sample, leaving an
    x-integral of f(e^x) e^{(alpha-gamma)x} against the sample mean of
    exp(-q e^{alpha x} I), times the Jacobian factor alpha.  Both routes use
    the same functional sample, so they must agree to quadrature accuracy.
    f must vanish near zero so the t-integrand is integrable at the origin.
    """
    if q_lap <= 0:
        raise ValueError("q_lap must be positive")
    if not f.vanishes_near_zero():
        raise ValueError("qpotential_check needs a test function vanishing near zero")
    I = draw_I(t, gamma, alpha, n, rng, ctl)
    g = gamma / alpha
    # support of f in x = log-space: indicator (a,b] or bump
    if f.kind == "indicator":
        x_lo, x_hi = math.log(f.a), math.log(min(f.b, 1e6))
    else:
        x_lo, x_hi = math.log(f.center - f.width), math.log(f.center + f.width)
    # route (b): x-quadrature
    xs = np.linspace(x_lo - 1e-9, x_hi + 1e-9, n_nodes)
    ex = np.exp(xs)
    mean_exp = np.empty(n_nodes)
    chunk = max(1, (1 << 22) // n)
    for i in range(0, n_nodes, chunk):
        lamI = np.outer(ex[i : i + chunk] ** alpha, I)
        mean_exp[i : i + chunk] = np.exp(-q_lap * lamI).mean(axis=1)
    integrand_b = f(ex) * np.exp((alpha - gamma) * xs) * mean_exp
    route_b = alpha * _log_trapezoid(integrand_b, xs)
    # route (a): t-quadrature over the support of the atoms
    t_lo = float(np.min(I)) * math.exp(alpha * x_lo)
    t_hi = min(float(np.max(I)) * math.exp(alpha * x_hi), 50.0 / q_lap + 1.0)
    ts = np.geomspace(max(t_lo, 1e-12), t_hi, n_nodes)
    mu_tf = np.empty(n_nodes)
    for i in range(0, n_nodes, chunk):
        atoms = (ts[i : i + chunk, None] / I[None, :]) ** (1.0 / alpha)
        w = ts[i : i + chunk, None] ** (-g) * I[None, :] ** (g - 1.0)
        mu_tf[i : i + chunk] = np.mean(w * f(atoms), axis=1)
    route_a = _log_trapezoid(np.exp(-q_lap * ts) * mu_tf * ts, np.log(ts))
    denom = max(abs(route_a), abs(route_b), 1e-300)
    rel = abs(route_a - route_b) / denom
    return TestReport(
        check="qpotential",
        params={
            "gamma": gamma,
            "alpha": alpha,
            "q": q_lap,
            "f": f.label(),
            "h": ctl.step,
            "triplet": t.label(),
        },
        lhs=route_a,
        rhs=route_b,
        statistic=rel,
        threshold=THRESHOLDS.qpotential_rel,
        n=n,
        seed=seed,
    )


def uniqueness_check(
    t: LevyTriplet,
    gamma: float,
    alpha: float,
    n: int,
    rng: np.random.Generator,
    ctl: IntegratorControl = IntegratorControl(),
    seed: int | None = None,
) -> TestReport:
    """Two independent estimates of the normalized law at time 1 must agree (KS)."""
    a = ssel_estimate(t, gamma, alpha, 1.0, n, rng, ctl).resample(n, rng)
    b = ssel_estimate(t, gamma, alpha, 1.0, n, rng, ctl).resample(n, rng)
    stat = ks_two_sample(a, b)
    return TestReport(
        check="uniqueness",
        params={"gamma": gamma, "alpha": alpha, "h": ctl.step, "triplet": t.label()},
        statistic=stat,
        threshold=THRESHOLDS.uniqueness_ks,
        n=n,
        seed=seed,
    )
