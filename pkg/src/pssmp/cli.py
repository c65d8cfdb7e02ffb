"""Command-line driver: one-shot subcommands plus a reproducible config runner.

``pssmp run config.toml`` executes the listed checks in order, writes
``report.csv`` (one row per check) and per-check sample dumps under the
output directory, and exits 0 only if every gate passed.  Reports are
byte-identical for a fixed config: every check draws from its own stream
keyed by (master seed, check index), so the worker count cannot change the
numbers, only the wall time.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import sys
from pathlib import Path

import numpy as np

from . import entrance, excursion, expfunc, extensions, lamperti, levy
from .config import (
    CheckSpec,
    ConfigError,
    ExperimentConfig,
    load_config,
    parse_test_function,
    parse_test_function2,
)
from .expfunc import IntegratorControl
from .statcheck import REPORT_COLUMNS, TestReport, hill_estimator

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


# ---------------------------------------------------------------------------
# Check dispatch
# ---------------------------------------------------------------------------


def _ctl(params: dict) -> IntegratorControl:
    step = float(params.get("step", 1e-3))
    return IntegratorControl(step=step)


def _run_check(cfg: ExperimentConfig, spec: CheckSpec) -> tuple[TestReport, dict[str, np.ndarray]]:
    """Execute one check on its own replica stream; returns (report, dumps)."""
    rng = levy.replica_rng(cfg.seed, spec.index)
    p = spec.params
    ctl = _ctl(p)
    kind = spec.kind
    dumps: dict[str, np.ndarray] = {}
    if kind == "scaling":
        rep = entrance.scaling_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]), int(p["n"]),
            rng, pairs=int(p.get("pairs", 10)),
            f=parse_test_function(p["f"]) if "f" in p else None, ctl=ctl, seed=cfg.seed,
        )
    elif kind == "semigroup":
        rep = entrance.semigroup_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]),
            float(p["s"]), float(p["t"]), parse_test_function(p["f"]), int(p["n"]),
            rng, ctl=ctl, seed=cfg.seed,
        )
    elif kind == "jumpin":
        fs = [parse_test_function(s) for s in p.get("fs", ["indicator:0.5:2", "power_exp:1", "bump:1:0.5"])]
        s_values = tuple(float(s) for s in p.get("s_values", [0.5, 1.0]))
        rep = entrance.jumpin_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]), s_values, fs,
            (float(p.get("x_lo", 0.02)), float(p.get("x_hi", 50.0))), int(p["n"]),
            rng, ctl=ctl, n_nodes=int(p.get("nodes", 48)), seed=cfg.seed,
        )
    elif kind == "pareto":
        rep = entrance.pareto_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]), int(p["n"]),
            rng, ctl=ctl, seed=cfg.seed,
        )
    elif kind == "beta_embed":
        rep = entrance.beta_embedding_check(
            cfg.triplets[p["triplet"]], float(p["beta_lo"]), float(p["beta_hi"]),
            float(p["alpha"]), float(p["s"]), int(p["n"]), rng, ctl=ctl, seed=cfg.seed,
        )
    elif kind == "quasi_stationary":
        rep = entrance.quasi_stationary_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]), int(p["n"]),
            rng, ctl=ctl, seed=cfg.seed,
        )
    elif kind == "qpotential":
        rep = entrance.qpotential_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]), float(p["q"]),
            parse_test_function(p["f"]), int(p["n"]), rng, ctl=ctl,
            n_nodes=int(p.get("nodes", 3000)), seed=cfg.seed,
        )
    elif kind == "uniqueness":
        rep = entrance.uniqueness_check(
            cfg.triplets[p["triplet"]], float(p["gamma"]), float(p["alpha"]), int(p["n"]),
            rng, ctl=ctl, seed=cfg.seed,
        )
    elif kind == "rho":
        alpha, beta, q, n = float(p["alpha"]), float(p["beta"]), float(p["q"]), int(p["n"])
        target = excursion.rho_formula(alpha, beta, q)
        est = excursion.rho_empirical(beta / alpha, q, n, rng)
        slack = float(p.get("slack", 0.005))
        rep = TestReport(
            check="rho",
            params={"alpha": alpha, "beta": beta, "q": q},
            lhs=est.rho_hat,
            rhs=target,
            statistic=abs(est.rho_hat - target),
            threshold=3.0 * math.sqrt(target * (1.0 - target) / n) + slack,
            n=n,
            seed=cfg.seed,
        )
    elif kind == "excursion_hill":
        rep, dumps = _excursion_hill(p, rng, cfg.seed)
    elif kind == "lm":
        lm = extensions.lindner_maller_check(cfg.bivariates[p["bivariate"]], float(p.get("x_max", 1e8)))
        expect = bool(p["expect_finite"])
        ok = (lm.finite == expect) and not lm.inconclusive
        rep = TestReport(
            check="lm",
            params={"bivariate": p["bivariate"], "expect_finite": expect, "rationale": lm.rationale},
            lhs=lm.integral_window,
            rhs=lm.tail_estimate,
            statistic=0.0 if ok else 1.0,
            threshold=0.5,
            n=0,
            seed=cfg.seed,
        )
    elif kind == "resolvent_rh":
        rep = extensions.resolvent_identity_check(
            "rh", cfg.bivariates[p["bivariate"]], float(p["lam"]), float(p["kappa"]),
            parse_test_function2(p.get("f2", "exp_product:1:1")), int(p["n"]), rng, ctl=ctl,
            alpha=float(p["alpha"]), n_states=int(p.get("n_states", 1024)),
            m_paths=int(p.get("m_paths", 128)), seed=cfg.seed,
        )
    elif kind == "resolvent_mssmp":
        spec_m = cfg.multis[p["multi"]]
        rep = extensions.resolvent_identity_check(
            "mssmp", spec_m, float(p["lam"]), float(p["kappa"]),
            lambda X: np.exp(-np.asarray(X).sum(axis=-1)), int(p["n"]), rng, ctl=ctl,
            nodes_per_dim=int(p.get("nodes", 24)), m_paths=int(p.get("m_paths", 128)), seed=cfg.seed,
        )
    elif kind == "moment":
        est = expfunc.estimate_moment(
            cfg.triplets[p["triplet"]], float(p["alpha"]), float(p["p"]), int(p["n"]), rng, ctl=ctl
        )
        expect = float(p["expect"])
        half = 0.5 * (est.ci_hi - est.ci_lo)
        rep = TestReport(
            check="moment",
            params={"triplet": p["triplet"], "alpha": p["alpha"], "p": p["p"]},
            lhs=est.estimate,
            rhs=expect,
            statistic=abs(est.estimate - expect),
            threshold=max(2.0 * half, 1e-12),
            n=int(p["n"]),
            seed=cfg.seed,
        )
    else:  # pragma: no cover - guarded by config validation
        raise ConfigError(f"unhandled check kind {kind!r}")
    return rep, dumps


def _excursion_hill(p: dict, rng: np.random.Generator, seed: int) -> tuple[TestReport, dict]:
    alpha, beta, q = float(p["alpha"]), float(p["beta"]), float(p["q"])
    horizon = float(p["horizon"])
    cutoff = float(p.get("cutoff", 1e-4))
    sk = excursion.sample_skeleton(alpha, beta, horizon, cutoff, None, rng)
    res = excursion.deletion_time_change(sk, q)
    a = beta / alpha
    rho = excursion.rho_formula(alpha, beta, q)
    obs = res.observed[res.observed > 10 * cutoff]
    k_all = min(int(p.get("n_all_k", sk.n_atoms // 10)), sk.n_atoms // 10)
    k_s = min(int(p.get("n_survivor_k", 2000)), max(obs.size // 10, 50))
    h_all = hill_estimator(sk.lengths, k_all)
    h_s = hill_estimator(obs, k_s)
    tol_all = float(p.get("tol_all", 0.10))
    tol_s = float(p.get("tol_survivor", 0.15))
    err = max(abs(h_all.index - a) / a - tol_all, abs(h_s.index - a * rho) / (a * rho) - tol_s)
    min_surv = int(p.get("min_survivors", 20000))
    if res.n_survivors < min_surv:
        err = max(err, 1.0)
    rep = TestReport(
        check="excursion_hill",
        params={
            "alpha": alpha, "beta": beta, "q": q, "cutoff": cutoff,
            "hill_all": h_all.index, "hill_survivors": h_s.index,
            "target_all": a, "target_survivors": a * rho, "survivors": res.n_survivors,
        },
        lhs=h_s.index,
        rhs=a * rho,
        statistic=max(err, 0.0),
        threshold=0.0,
        n=sk.n_atoms,
        seed=seed,
    )
    dumps = {
        "lengths": sk.lengths,
        "marks": sk.marks.astype(float),
        "survived": np.isin(np.arange(sk.n_atoms), res.survivor_index).astype(float),
    }
    return rep, dumps


def run(config_path: str | Path, workers: int = 1) -> int:
    """Execute a config; returns the process exit code (0 pass, 1 fail, 2 config)."""
    try:
        cfg = load_config(config_path)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    results: list[tuple[TestReport, dict]] = [None] * len(cfg.checks)  # type: ignore[list-item]
    if workers <= 1:
        for spec in cfg.checks:
            results[spec.index] = _run_check(cfg, spec)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as ex:
            futs = {ex.submit(_run_check, cfg, spec): spec.index for spec in cfg.checks}
            for fut in concurrent.futures.as_completed(futs):
                results[futs[fut]] = fut.result()
    lines = [",".join(REPORT_COLUMNS)]
    all_pass = True
    for spec in cfg.checks:
        rep, dumps = results[spec.index]
        lines.append(rep.csv_row())
        all_pass &= rep.passed
        for name, arr in dumps.items():
            out = cfg.out_dir / f"{spec.name()}_{name}.csv"
            np.savetxt(out, arr, delimiter=",", fmt="%r")
        status = "pass" if rep.passed else "FAIL"
        print(f"[{status}] {spec.name()}: statistic={rep.statistic:.6g} threshold={rep.threshold:.6g}")
    (cfg.out_dir / "report.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# One-shot subcommands
# ---------------------------------------------------------------------------


def _triplet_from_args(args) -> levy.LevyTriplet:
    if args.triplet:
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(Path(args.triplet).read_text())
        return levy.LevyTriplet.from_dict(data)
    return levy.LevyTriplet(kill_rate=args.q, drift=args.b, gaussian_var=args.sigma2)


def _add_triplet_flags(sp) -> None:
    sp.add_argument("--triplet", help="TOML file with keys q, b, sigma2, lambda, jump_law")
    sp.add_argument("--q", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=0.0)
    sp.add_argument("--sigma2", type=float, default=0.0)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="pssmp", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("run", help="execute a config of checks")
    sp.add_argument("config")
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("simulate-levy", help="sample one driver path to CSV")
    _add_triplet_flags(sp)
    sp.add_argument("--horizon", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("simulate-pssmp", help="sample one transformed path to CSV")
    _add_triplet_flags(sp)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--horizon", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("sample-I", help="batch of exponential-functional draws to CSV")
    _add_triplet_flags(sp)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("entrance-law", help="entrance-law atoms (x, w) to CSV")
    _add_triplet_flags(sp)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=10000)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("check", help="run a single identity check")
    sp.add_argument(
        "which",
        choices=["semigroup", "scaling", "pareto", "beta-embed", "jumpin", "quasi-stationary", "qpotential"],
    )
    _add_triplet_flags(sp)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--beta-lo", type=float, default=0.5)
    sp.add_argument("--beta-hi", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=0.5)
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--f", default="indicator:0.5:2")
    sp.add_argument("--q-lap", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=20000)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("rho", help="positivity parameter: closed form or Monte Carlo")
    sp.add_argument("which", choices=["formula", "empirical"])
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--n", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("excursion", help="skeleton sampling, embedding, tail indices")
    sp.add_argument("which", choices=["sample", "embed", "hill"])
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--q", type=float, default=0.25)
    sp.add_argument("--horizon", type=float, default=100.0)
    sp.add_argument("--cutoff", type=float, default=1e-4)
    sp.add_argument("--k", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("ext", help="bivariate and multivariate extensions")
    sp.add_argument("which", choices=["lm-check", "rh", "mssmp", "resolvent"])
    sp.add_argument("--spec", help="TOML file with the bivariate/multi specification")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--kappa", type=float, default=2.0)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--a0", type=float, default=0.0)
    sp.add_argument("--horizon", type=float, default=5.0)
    sp.add_argument("--n", type=int, default=20000)
    sp.add_argument("--step", type=float, default=1e-2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def _dispatch(args) -> int:
    if args.cmd == "run":
        return run(args.config, workers=args.workers)
    if args.cmd == "simulate-levy":
        t = _triplet_from_args(args)
        rng = levy.replica_rng(args.seed, 0)
        path = levy.sample_path(t, args.horizon, args.step, rng)
        rows = ["t,xi"] + [f"{ti!r},{v!r}" for ti, v in zip(path.times, path.values)]
        rows.append(f"# lifetime,{path.lifetime!r}")
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    if args.cmd == "simulate-pssmp":
        t = _triplet_from_args(args)
        rng = levy.replica_rng(args.seed, 0)
        path = levy.sample_path(t, args.horizon, args.step, rng)
        xp = lamperti.lamperti_forward(path, args.x, args.alpha)
        rows = ["t,X"] + [f"{ti!r},{v!r}" for ti, v in zip(xp.times, xp.values)]
        if xp.absorption < math.inf:
            rows.append(f"{xp.absorption!r},0.0")
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    if args.cmd == "sample-I":
        t = _triplet_from_args(args)
        rng = levy.replica_rng(args.seed, 0)
        v, tr, hz, tb = expfunc.sample_I_batch(t, args.alpha, args.n, rng, IntegratorControl(step=args.step))
        rows = ["value,truncated,tail_bound"] + [
            f"{a!r},{int(b)},{c!r}" for a, b, c in zip(v, tr, tb)
        ]
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    if args.cmd == "entrance-law":
        t = _triplet_from_args(args)
        rng = levy.replica_rng(args.seed, 0)
        mu = entrance.ssel_estimate(t, args.gamma, args.alpha, args.s, args.n, rng, IntegratorControl(step=args.step))
        rows = ["x,w"] + [f"{a!r},{b!r}" for a, b in zip(mu.atoms_x, mu.atoms_w)]
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    if args.cmd == "check":
        return _single_check(args)
    if args.cmd == "rho":
        if args.which == "formula":
            print(f"{excursion.rho_formula(args.alpha, args.beta, args.q):.6g}")
            return EXIT_OK
        est = excursion.rho_empirical(args.beta / args.alpha, args.q, args.n, levy.replica_rng(args.seed, 0))
        print(f"{est.rho_hat:.6g} se={est.se:.3g}")
        return EXIT_OK
    if args.cmd == "excursion":
        return _excursion_cmd(args)
    if args.cmd == "ext":
        return _ext_cmd(args)
    raise ConfigError(f"unknown command {args.cmd}")


def _single_check(args) -> int:
    t = _triplet_from_args(args)
    rng = levy.replica_rng(args.seed, 0)
    ctl = IntegratorControl(step=args.step)
    f = parse_test_function(args.f)
    which = args.which
    if which == "semigroup":
        rep = entrance.semigroup_check(t, args.gamma, args.alpha, args.s, args.t, f, args.n, rng, ctl, seed=args.seed)
    elif which == "scaling":
        rep = entrance.scaling_check(t, args.gamma, args.alpha, args.n, rng, ctl=ctl, seed=args.seed)
    elif which == "pareto":
        rep = entrance.pareto_check(t, args.gamma, args.alpha, args.n, rng, ctl, seed=args.seed)
    elif which == "beta-embed":
        rep = entrance.beta_embedding_check(
            t, args.beta_lo, args.beta_hi, args.alpha, args.s, args.n, rng, ctl, seed=args.seed
        )
    elif which == "jumpin":
        fs = [parse_test_function(s) for s in ("indicator:0.5:2", "power_exp:1", "bump:1:0.5")]
        rep = entrance.jumpin_check(
            t, args.gamma, args.alpha, (args.s, args.s + args.t), fs, (0.02, 50.0), args.n, rng, ctl, seed=args.seed
        )
    elif which == "quasi-stationary":
        rep = entrance.quasi_stationary_check(t, args.gamma, args.alpha, args.n, rng, ctl, seed=args.seed)
    else:
        rep = entrance.qpotential_check(t, args.gamma, args.alpha, args.q_lap, f, args.n, rng, ctl, seed=args.seed)
    text = ",".join(REPORT_COLUMNS) + "\n" + rep.csv_row() + "\n"
    _write_or_print(text, args.out)
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


def _excursion_cmd(args) -> int:
    rng = levy.replica_rng(args.seed, 0)
    sk = excursion.sample_skeleton(args.alpha, args.beta, args.horizon, args.cutoff, None, rng)
    if args.which == "sample":
        rows = ["local_time,length,mark"] + [
            f"{t!r},{l!r},{m}" for t, l, m in zip(sk.local_times, sk.lengths, sk.marks)
        ]
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    res = excursion.deletion_time_change(sk, args.q)
    if args.which == "embed":
        surv = np.zeros(sk.n_atoms, dtype=int)
        surv[res.survivor_index] = 1
        obs = np.zeros(sk.n_atoms)
        obs[res.survivor_index] = res.observed
        rows = ["length,mark,survived,observed_length"] + [
            f"{l!r},{m},{s},{o!r}" for l, m, s, o in zip(sk.lengths, sk.marks, surv, obs)
        ]
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    a = args.beta / args.alpha
    rho = excursion.rho_formula(args.alpha, args.beta, args.q)
    obs = res.observed[res.observed > 10 * args.cutoff]
    h_all = hill_estimator(sk.lengths, min(args.k, sk.n_atoms // 10))
    h_s = hill_estimator(obs, min(args.k, obs.size // 10)) if obs.size >= 500 else None
    lines = [f"hill_all,{h_all.index!r},target,{a!r}"]
    if h_s:
        lines.append(f"hill_survivors,{h_s.index!r},target,{a * rho!r}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _load_spec_file(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    return tomllib.loads(Path(path).read_text())


def _ext_cmd(args) -> int:
    rng = levy.replica_rng(args.seed, 0)
    if args.which in ("lm-check", "rh") or (args.which == "resolvent"):
        if not args.spec:
            raise ConfigError("ext needs --spec FILE")
    data = _load_spec_file(args.spec) if args.spec else {}
    if args.which == "lm-check":
        spec = extensions.BivariateSubSpec.from_dict(data)
        lm = extensions.lindner_maller_check(spec)
        print(f"finite={lm.finite} inconclusive={lm.inconclusive} window={lm.integral_window:.6g} ({lm.rationale})")
        return EXIT_OK
    if args.which == "rh":
        spec = extensions.BivariateSubSpec.from_dict(data)
        path = extensions.simulate_rh(spec, args.a0, args.x, args.alpha, args.horizon, args.step, rng)
        rows = ["t,R,H"] + [
            f"{t!r},{r!r},{h!r}" for t, r, h in zip(path.times, path.r_values, path.h_values)
        ]
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    if args.which == "mssmp":
        multi = data
        alphas = [float(a) for a in multi["alphas"]]
        trips = [levy.LevyTriplet.from_dict(c) for c in multi["coordinates"]]
        paths = [levy.sample_path(t, args.horizon, args.step, rng) for t in trips]
        n = min(p.values.size for p in paths)
        for p in paths:
            p.values = p.values[:n]
        mp = extensions.mssmp_transform(paths, np.full(len(trips), args.x), np.asarray(alphas))
        header = "t," + ",".join(f"X{i+1}" for i in range(len(trips)))
        rows = [header] + [
            f"{t!r}," + ",".join(repr(v) for v in mp.values[:, j])
            for j, t in enumerate(mp.times)
        ]
        _write_or_print("\n".join(rows) + "\n", args.out)
        return EXIT_OK
    # resolvent
    if "alphas" in data:
        spec_m = extensions.MultiSpec(
            alphas=tuple(float(a) for a in data["alphas"]),
            triplets=tuple(levy.LevyTriplet.from_dict(c) for c in data["coordinates"]),
        )
        rep = extensions.resolvent_identity_check(
            "mssmp", spec_m, args.lam, args.kappa,
            lambda X: np.exp(-np.asarray(X).sum(axis=-1)), args.n, rng,
            IntegratorControl(step=args.step), seed=args.seed,
        )
    else:
        spec_b = extensions.BivariateSubSpec.from_dict(data)
        rep = extensions.resolvent_identity_check(
            "rh", spec_b, args.lam, args.kappa, extensions.TestFunction2("exp_product"),
            args.n, rng, IntegratorControl(step=args.step), alpha=args.alpha, seed=args.seed,
        )
    text = ",".join(REPORT_COLUMNS) + "\n" + rep.csv_row() + "\n"
    _write_or_print(text, args.out)
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
