"""Command-line front end: configured sweeps with reproducible output.

Every output file embeds the fully resolved configuration and seed, so a
run can be reproduced byte for byte from the file alone.  CSV output uses
'#'-prefixed JSON preamble lines; JSON output carries the same payload as
one object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bath as bath_mod
from . import driven, fitting, free_evolution, integrals
from .bath import BathSpec, DensityOfStates, NoiseModel
from .free_evolution import EchoSchedule, QubitParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVALID = 3


class ConfigError(Exception):
    """Configuration rejected; message carries the offending field path."""


# ---------------------------------------------------------------------------
# configuration handling


def _require(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}.{key}: missing required field")
    return cfg[key]


def resolve_config(raw: dict, args) -> dict:
    """Merge config file with CLI overrides into one resolved dict."""
    cfg = dict(raw)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.method is not None:
        cfg["method"] = args.method
    if args.samples is not None:
        cfg["samples"] = args.samples
    cfg.setdefault("seed", 0)
    cfg.setdefault("method", "exact")
    cfg.setdefault("samples", 10000)
    if cfg["method"] not in ("exact", "mc", "continuum"):
        raise ConfigError(f"method: unknown averaging method {cfg['method']!r}")
    sweep = cfg.get("sweep")
    if sweep is not None:
        for key in ("variable", "start", "stop", "points"):
            _require(sweep, key, "sweep")
        sweep.setdefault("scale", "lin")
        if not (math.isfinite(sweep["start"]) and math.isfinite(sweep["stop"])):
            raise ConfigError("sweep: bounds must be finite")
        if sweep["stop"] <= sweep["start"]:
            raise ConfigError("sweep: bounds must be ordered (start < stop)")
        if sweep["points"] < 2:
            raise ConfigError("sweep.points: need at least 2")
        if sweep["scale"] not in ("lin", "log"):
            raise ConfigError(f"sweep.scale: unknown scale {sweep['scale']!r}")
    return cfg


def parse_bath(cfg: dict):
    """BathSpec or DensityOfStates from the 'bath' config block."""
    b = _require(cfg, "bath", "config")
    if "dos" in b:
        d = b["dos"]
        return DensityOfStates.gaussian(d.get("mean", 0.0), _require(d, "sigma", "bath.dos"))
    return BathSpec.from_dict(b)


def parse_qubit(cfg: dict) -> QubitParams:
    q = cfg.get("qubit", {})
    return QubitParams(delta=q.get("delta", 0.0), omega_rabi=q.get("omega_rabi", 0.0),
                       gamma2=q.get("gamma2", 0.0), gamma1=q.get("gamma1"))


def parse_noise(cfg: dict) -> NoiseModel | None:
    n = cfg.get("noise")
    if n is None:
        return None
    return NoiseModel(kind=n.get("kind", "ou"), variance=_require(n, "variance", "noise"),
                      mean=n.get("mean", 0.0), gamma_c=n.get("gamma_c", 0.0))


def sweep_axis(cfg: dict, default_var: str, default_stop: float, points: int = 200):
    sweep = cfg.get("sweep")
    if sweep is None:
        sweep = {"variable": default_var, "start": 0.0, "stop": default_stop,
                 "points": points, "scale": "lin"}
        cfg["sweep"] = sweep
    if sweep["scale"] == "log":
        return np.geomspace(sweep["start"], sweep["stop"], int(sweep["points"]))
    return np.linspace(sweep["start"], sweep["stop"], int(sweep["points"]))


# ---------------------------------------------------------------------------
# validation


def validate(cfg: dict) -> list[dict]:
    """Machine-readable diagnostics; empty iff run would accept the config."""
    diags = []
    b = cfg.get("bath")
    if b is None:
        diags.append({"code": "MISSING_FIELD", "field": "bath",
                      "message": "bath block required"})
        return diags
    if "dos" not in b:
        try:
            spec = BathSpec.from_dict(b)
        except (ValueError, KeyError) as exc:
            alpha = np.asarray(b.get("alpha", []), dtype=float)
            norm = float(np.sum(alpha**2)) if alpha.size else float("nan")
            if abs(norm - 1.0) > 1e-9:
                diags.append({"code": "BATH_NORM", "field": "bath.alpha",
                              "message": f"sum(alpha^2) = {norm!r}, expected 1"})
            else:
                diags.append({"code": "BAD_BATH", "field": "bath", "message": str(exc)})
            return diags
        if (cfg.get("method", "exact") == "exact" and not spec.homogeneous
                and spec.n > bath_mod.MAX_EXACT_N):
            diags.append({"code": "EXACT_TOO_LARGE", "field": "method",
                          "message": f"exact enumeration limited to N <= {bath_mod.MAX_EXACT_N} "
                                     "for inhomogeneous couplings"})
    if cfg.get("stationary"):
        try:
            if "dos" in b:
                dos = DensityOfStates.gaussian(b["dos"].get("mean", 0.0), b["dos"]["sigma"])
            else:
                dos = bath_mod.continuum_dos(BathSpec.from_dict(b))
            qp = parse_qubit(cfg)
            u = integrals.u_timescale(dos, qp.delta, qp.omega_rabi)
            if u <= 0:
                diags.append({"code": "STATPHASE_INVALID", "field": "qubit.delta",
                              "message": f"u = {u!r} <= 0: stationary-phase output invalid"})
        except (ValueError, ZeroDivisionError) as exc:
            diags.append({"code": "STATPHASE_INVALID", "field": "qubit",
                          "message": str(exc)})
    return diags


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def emit(path: str | None, fmt: str, header: dict, columns: dict) -> None:
    """Write a table as CSV with '#'-JSON preamble, or as one JSON object."""
    out = sys.stdout if path is None else open(path, "w")
    try:
        if fmt == "json":
            payload = {"header": header,
                       "columns": {k: [_fmt(x) for x in np.atleast_1d(v)]
                                   for k, v in columns.items()}}
            out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
            return
        for line in json.dumps(header, sort_keys=True, indent=2).splitlines():
            out.write("# " + line + "\n")
        names = list(columns)
        out.write(",".join(names) + "\n")
        rows = np.broadcast_arrays(*[np.atleast_1d(columns[k]) for k in names])
        for i in range(rows[0].size):
            out.write(",".join(_fmt(col[i]) for col in rows) + "\n")
    finally:
        if path is not None:
            out.close()


def _header(cfg: dict, command: str, column_doc: dict) -> dict:
    return {"command": command, "config": cfg, "columns": column_doc}


# ---------------------------------------------------------------------------
# subcommands


def run_fid(cfg: dict, args) -> int:
    spec = parse_bath(cfg)
    if not isinstance(spec, BathSpec):
        raise ConfigError("bath: fid needs an explicit BathSpec, not a DOS")
    qp = parse_qubit(cfg)
    t_default = 3.0 * 2.0 * math.pi * math.sqrt(spec.n) / max(spec.lam, 1e-12)
    t = sweep_axis(cfg, "t", t_default, 400)
    phi = free_evolution.fid_coherence(spec, qp.delta, t)
    cols = {
        "t": t,
        "lam_t_over_sqrtn": spec.lam * t / math.sqrt(spec.n),
        "re": phi.real,
        "im": phi.imag,
        "abs": np.abs(phi),
        "fidelity": np.abs(phi) ** 2,
        "short_time": free_evolution.fid_fidelity_short_time(spec, t),
    }
    emit(args.out, args.format, _header(cfg, "fid", {
        "t": "time (ns)", "lam_t_over_sqrtn": "natural revival units lam*t/sqrt(N)",
        "re": "Re coherence", "im": "Im coherence", "abs": "|coherence|",
        "fidelity": "|coherence|^2", "short_time": "quadratic short-time fidelity"}), cols)
    return EXIT_OK


def run_echo(cfg: dict, args) -> int:
    spec = parse_bath(cfg)
    qp = parse_qubit(cfg)
    noise = parse_noise(cfg)
    if noise is not None and noise.kind != "static" and noise.gamma_c > 0:
        lam = cfg.get("lam", spec.lam if isinstance(spec, BathSpec) else 1.0)
        t = sweep_axis(cfg, "t", 10.0 / max(noise.gamma_c, 1e-12), 200)
        fid = np.array([free_evolution.echo_with_decorrelation(noise, qp, lam, tt)
                        for tt in t])
        small = np.array([free_evolution.echo_decay_small_cutoff(noise, lam, tt)
                          for tt in t]) if noise.kind == "ou" else np.full(t.size, np.nan)
        emit(args.out, args.format, _header(cfg, "echo", {
            "t": "equal arm time (ns)", "fidelity": "echo fidelity with decorrelation",
            "small_cutoff_exponent": "leading decay exponent for gamma_c*t << 1"}),
            {"t": t, "fidelity": fid, "small_cutoff_exponent": small})
        return EXIT_OK
    if not isinstance(spec, BathSpec):
        raise ConfigError("bath: quasi-static echo needs an explicit BathSpec")
    t1 = cfg.get("t1", 1.0)
    t2 = sweep_axis(cfg, "t2", 2.0 * t1, 200)
    res = [free_evolution.spin_echo_fidelity(spec, EchoSchedule(t1, tt)) for tt in t2]
    emit(args.out, args.format, _header(cfg, "echo", {
        "t2": "second arm time (ns), first arm fixed at config t1",
        "exact": "echo fidelity, exact eigenvalue average",
        "gaussian": "large-N Gaussian companion"}),
        {"t2": t2, "exact": [r.exact for r in res], "gaussian": [r.gaussian for r in res]})
    return EXIT_OK


def run_correlator(cfg: dict, args) -> int:
    noise = parse_noise(cfg)
    if noise is None:
        raise ConfigError("noise: correlator needs a noise block")
    lam = cfg.get("lam", 1.0)
    tau = cfg.get("tau", 1.0)
    dt = sweep_axis(cfg, "dt", 5.0 / max(noise.gamma_c, 1e-12), 50)
    analytic = np.array([free_evolution.sequential_correlator(noise, lam, tau, d)
                         for d in dt])
    mc = np.empty(dt.size)
    se = np.empty(dt.size)
    for i, d in enumerate(dt):
        mc[i], se[i] = free_evolution.sequential_correlator_mc(
            noise, lam, tau, d, cfg["samples"], (cfg["seed"], i))
    emit(args.out, args.format, _header(cfg, "correlator", {
        "dt": "measurement separation (ns)", "analytic": "covariance, analytic",
        "mc": "covariance, Monte Carlo", "mc_se": "standard error of mc"}),
        {"dt": dt, "analytic": analytic, "mc": mc, "mc_se": se})
    return EXIT_OK


def run_rabi(cfg: dict, args) -> int:
    spec = parse_bath(cfg)
    qp = parse_qubit(cfg)
    noise = parse_noise(cfg)
    t = sweep_axis(cfg, "t", 100.0 / max(qp.omega_rabi, 1e-12), 200)
    if noise is not None and noise.kind == "ou" and noise.gamma_c > 0:
        lam = cfg.get("lam", spec.lam if isinstance(spec, BathSpec) else 1.0)
        traj = driven.trajectory_rabi_mc(noise, qp, t, cfg["samples"], cfg["seed"], lam=lam)
        emit(args.out, args.format, _header(cfg, "rabi", {
            "t": "time (ns)", "sz2": "2<S_z>, trajectory Monte Carlo",
            "sz2_se": "standard error", "sy2": "2<S_y>", "sy2_se": "standard error"}),
            {"t": traj.t, "sz2": 2.0 * traj.s[:, 2], "sz2_se": 2.0 * traj.s_err[:, 2],
             "sy2": 2.0 * traj.s[:, 1], "sy2_se": 2.0 * traj.s_err[:, 1]})
        return EXIT_OK
    env = driven.rabi_average(spec, qp, t, method=cfg["method"],
                              samples=cfg["samples"], seed=cfg["seed"])
    dos = spec if isinstance(spec, DensityOfStates) else bath_mod.continuum_dos(spec)
    try:
        rate = driven.short_time_rate(spec, qp, method=cfg["method"],
                                      samples=cfg["samples"], seed=cfg["seed"])
        short = (1.0 - env.f) * (1.0 - 0.5 * (rate * t) ** 2)
    except ValueError:
        short = np.full(t.size, np.nan)
    stat = [integrals.zeta_stationary(dos, qp.delta, qp.omega_rabi, tt) for tt in t]
    invalid = any(not s.valid for s in stat)
    if invalid and not args.allow_invalid:
        print("stationary-phase output invalid (u <= 0 or vanishing density); "
              "rerun with --allow-invalid to emit anyway", file=sys.stderr)
        return EXIT_INVALID
    cols = {
        "t": t,
        "sz2": env.sz2,
        "sy2": env.sy2,
        "envelope": np.abs(env.zeta),
        "envelope_short": short,
        "sz2_stat": env.f + np.array([s.value.real for s in stat]),
        "stat_valid": [s.valid for s in stat],
    }
    emit(args.out, args.format, _header(cfg, "rabi", {
        "t": "time (ns)", "sz2": "2<S_z>, bath averaged", "sy2": "2<S_y>",
        "envelope": "|<zeta>|", "envelope_short": "quadratic short-time envelope",
        "sz2_stat": "2<S_z> from the stationary-phase tail",
        "stat_valid": "1 when the stationary-phase form is valid"}), cols)
    return EXIT_OK


def run_lineshape(cfg: dict, args) -> int:
    spec = parse_bath(cfg)
    qp = parse_qubit(cfg)
    dos = spec if isinstance(spec, DensityOfStates) else bath_mod.continuum_dos(spec)
    delta = sweep_axis(cfg, "delta", dos.mean + 4.0 * dos.sigma, 200)
    brute = np.array([integrals.lineshape_bruteforce(dos, d, qp.omega_rabi) for d in delta])
    stat = [integrals.lineshape_stationary(dos, d, qp.omega_rabi) for d in delta]
    invalid = any(not s.valid for s in stat)
    if invalid and not args.allow_invalid:
        print("stationary-phase lineshape invalid at some sweep points (u <= 0); "
              "rerun with --allow-invalid to emit anyway", file=sys.stderr)
        return EXIT_INVALID
    cols = {
        "delta": delta,
        "brute": brute,
        "stationary": [s.value.real for s in stat],
        "u": [s.u for s in stat],
        "valid": [s.valid for s in stat],
    }
    emit(args.out, args.format, _header(cfg, "lineshape", {
        "delta": "drive detuning (ns^-1)", "brute": "<f>, direct quadrature",
        "stationary": "<f>, stationary-phase closed form",
        "u": "kernel timescale (ns)", "valid": "1 when the closed form is valid"}), cols)
    return EXIT_OK


def run_fit(cfg: dict, args) -> int:
    init = cfg.get("initial", {})
    initial = fitting.FitParams(m_uu=init.get("m_uu", 0.8), m_dd=init.get("m_dd", 0.9),
                                gamma_heat=init.get("gamma_heat", 0.05),
                                lam=init.get("lam", 0.2))
    fixed_time = cfg.get("fixed_time", 25.0)
    if args.data is not None:
        raw = np.genfromtxt(args.data, delimiter=",", names=True, comments="#")
        points = [(float(r["omega"]), float(r["p1"]), float(r["sigma"])) for r in raw]
        data = fitting.RabiDataset(fixed_time=fixed_time, points=points)
        truth = None
    else:
        ref = cfg.get("truth", {k: v[0] for k, v in fitting.REFERENCE_PARAMS.items()})
        truth = fitting.FitParams(**ref)
        rng = np.random.default_rng(cfg["seed"])
        omega = np.linspace(0.05, 1.0, 20)
        sigma = 0.01
        qps = [QubitParams(omega_rabi=o) for o in omega]
        p1 = np.array([fitting.model_signal(truth, q, None, fixed_time) for q in qps])
        p1 = np.clip(p1 + sigma * rng.standard_normal(omega.size), 0.0, 1.0)
        data = fitting.RabiDataset(fixed_time=fixed_time,
                                   points=list(zip(omega, p1, [sigma] * 20)))
    res = fitting.fit(data, initial)
    report = {
        "config": cfg,
        "params": {k: getattr(res.params, k) for k in ("m_uu", "m_dd", "gamma_heat", "lam")},
        "ci90": res.ci90,
        "residual": res.residual,
        "n_iter": res.n_iter,
        "flags": list(res.flags),
    }
    if truth is not None:
        report["generated_from"] = {k: getattr(truth, k)
                                    for k in ("m_uu", "m_dd", "gamma_heat", "lam")}
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def run_preset(cfg: dict, args) -> int:
    out = fitting.presets(args.name, n=args.n)
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def run_validate(cfg: dict, args) -> int:
    diags = validate(cfg)
    text = json.dumps(diags, sort_keys=True, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


RUNNERS = {
    "fid": run_fid,
    "echo": run_echo,
    "correlator": run_correlator,
    "rabi": run_rabi,
    "lineshape": run_lineshape,
    "fit": run_fit,
    "preset": run_preset,
    "validate": run_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mesobath",
                                description="spin-bath qubit dynamics sweeps")
    sub = p.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON scenario config")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--method", choices=("exact", "mc", "continuum"), default=None)
        sp.add_argument("--samples", type=int, default=None)
        sp.add_argument("--allow-invalid", action="store_true")
        if name == "fit":
            sp.add_argument("--data", default=None, help="CSV with omega,p1,sigma")
        if name == "preset":
            sp.add_argument("--name", required=True,
                            choices=("gaas_qd", "dqd", "martinis"))
            sp.add_argument("--n", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    raw = {}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        cfg = resolve_config(raw, args)
        if args.command not in ("fit", "preset", "validate"):
            diags = validate(cfg) if args.command != "correlator" else []
            if diags:
                print(json.dumps(diags, sort_keys=True, indent=2), file=sys.stderr)
                return EXIT_CONFIG
        return RUNNERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
