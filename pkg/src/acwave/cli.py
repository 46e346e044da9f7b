"""Command-line driver: flat config files in, CSV/JSON artifacts out.

Config files hold one ``key = value`` per line with dotted section names,
for example::

    potential.kind = tilted-quartic
    potential.a = 0.3
    solve.nx = 256
    guess.alpha = 0.5235987755982988

Values are Python literals (numbers, tuples, quoted strings, True/False);
anything else is kept as a bare string.  ``#`` starts a comment.  Run
``python -m acwave --defaults`` for the full list of keys and defaults.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import re
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from . import diagnostics as D
from . import layerdyn as LD
from . import levelset as L
from . import solver2d as S
from .io import to_jsonable, write_csv, write_json
from .potentials import constants, make_potential, validate
from .profiles1d import (energy_curve, energy_slope_check, front_speed, heteroclinic,
                         periodic_profile)

TASKS = ("validate", "profile1d", "energy", "solve", "levels", "diagnose", "layerdyn", "report")

DEFAULTS = {
    "potential.kind": "quartic",
    "potential.a": 0.3,
    "profile1d.half_width": 8.0,
    "profile1d.h": 0.01,
    "profile1d.alpha": None,
    "energy.l_min": 3.0,
    "energy.l_max": 6.0,
    "energy.n": 16,
    "solve.c": None,
    "solve.x_extent": (-10.0, 10.0),
    "solve.y_extent": (-10.0, 100.0),
    "solve.nx": 256,
    "solve.ny": 1024,
    "solve.dt": 0.4,
    "solve.max_steps": 20000,
    "solve.tol": 1e-6,
    "solve.check_every": 50,
    "solve.recenter_interval": 0,
    "solve.boundary": "neumann",
    "solve.guess": "balanced-cosh",
    "solve.check_stability": True,
    "guess.A_eff": None,
    "guess.x0": 0.0,
    "guess.y0": 0.0,
    "guess.perturb": 0.0,
    "guess.alpha": None,
    "guess.l": 3.0,
    "guess.K1": 0.0,
    "levels.field": None,
    "levels.level": 0.0,
    "levels.window": None,
    "levels.recenter": True,
    "diagnose.field": None,
    "diagnose.alpha": 0.5,
    "layerdyn.c": 1.0,
    "layerdyn.A_eff": None,
    "layerdyn.l0": 1.0,
    "layerdyn.y_end": 1.0e4,
    "layerdyn.n": 2001,
    "report.pipeline": "balanced",
    "report.x0": 0.5,
    "report.y0": -10.0,
    "report.perturb": 0.3,
    "report.alpha": math.pi / 6,
    "report.v_x_extent": (-30.0, 30.0),
    "report.v_y_extent": (-8.0, 26.0),
    "report.v_nx": 601,
    "report.v_ny": 341,
    "report.v_dt": 0.35,
    "report.v_window": (16.0, 28.0),
    "report.speed_alpha": 0.5,
}


_KEY = re.compile(r"[A-Za-z_][\w-]*(\.[A-Za-z_][\w-]*)*")


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"{stage}: {type(exc).__name__}: {exc}")
        self.stage, self.exc = stage, exc


# ---------------------------------------------------------------------------
# configuration


def _value(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def parse_config(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if not _KEY.fullmatch(key):
            raise ConfigError(f"line {n}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = _value(val)
    return out


def load_config(path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    if path is None:
        return cfg
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {path} not found")
    user = parse_config(p.read_text())
    unknown = sorted(set(user) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    cfg.update(user)
    return cfg


def defaults_reference() -> str:
    return "\n".join(f"{k} = {v!r}" for k, v in DEFAULTS.items()) + "\n"


def _section(cfg: dict, name: str) -> dict:
    pre = name + "."
    return {k[len(pre):]: v for k, v in cfg.items() if k.startswith(pre)}


def _potential(cfg: dict):
    kind = cfg["potential.kind"]
    if kind == "quartic":
        return make_potential("quartic")
    if kind == "tilted-quartic":
        return make_potential("tilted-quartic", a=cfg["potential.a"])
    raise ConfigError(f"unknown potential kind {kind!r}")


def _solve_config(cfg: dict, threads: int) -> S.SolveConfig:
    s = _section(cfg, "solve")
    s.pop("c")
    try:
        return S.SolveConfig(**s, threads=threads)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solve section: {exc}") from exc


def _stage(name: str, fun, *args, **kw):
    try:
        return fun(*args, **kw)
    except StageError:
        raise
    except Exception as exc:  # noqa: BLE001 - re-raised with the stage name
        raise StageError(name, exc) from exc


# ---------------------------------------------------------------------------
# tasks


def task_validate(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    rep = validate(P)
    res = {"potential": P.kind, "validation": rep.as_dict(),
           "constants": constants(P) if rep.passed else None}
    write_json(out / "validation.json", res)
    return res


def task_profile1d(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    p = _section(cfg, "profile1d")
    g = heteroclinic(P, half_width=p["half_width"], h=p["h"])
    g.to_csv(out / "heteroclinic.csv")
    res = {"speed": g.speed, "beta": P.beta, "tail_rates": g.tail_rates}
    if p["alpha"] is not None:
        ga = periodic_profile(P, float(p["alpha"]), h=p["h"])
        ga.to_csv(out / "periodic.csv")
        res["periodic"] = {"alpha": ga.alpha, "period": ga.period, "conjugate": ga.turning}
    write_json(out / "profile1d.json", res)
    return res


def task_energy(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    e = _section(cfg, "energy")
    curve = energy_curve(P, e["l_min"], e["l_max"], int(e["n"]))
    curve.to_csv(out / "energy.csv")
    res = {**curve.summary(), "two_mu": 2.0 * P.mu,
           "rate_rel_error": abs(curve.rate - 2.0 * P.mu) / (2.0 * P.mu)}
    write_json(out / "energy.json", res)
    return res


def _default_speed(P, cfg) -> float:
    if cfg["solve.c"] is not None:
        return float(cfg["solve.c"])
    if P.balanced:
        return 1.0
    c0 = front_speed(P)
    if cfg["solve.guess"] == "v-shape":
        return c0 / math.cos(float(cfg["guess.alpha"]))
    return c0


def _guess_options(P, cfg) -> dict:
    g = _section(cfg, "guess")
    kind = cfg["solve.guess"]
    if kind == "balanced-cosh":
        A = g["A_eff"] if g["A_eff"] is not None else energy_curve(P).A_eff
        return {"A_eff": A, "x0": g["x0"], "y0": g["y0"], "perturb": g["perturb"]}
    if kind in ("v-shape", "periodic-bottom"):
        if g["alpha"] is None:
            raise ConfigError(f"guess.alpha is required for {kind}")
        opts = {"alpha": float(g["alpha"])}
        if kind == "periodic-bottom":
            opts["y0"] = g["y0"]
        return opts
    if kind == "two-layer-column":
        return {"l": g["l"]}
    if kind == "single-layer":
        return {"K1": g["K1"], "y0": g["y0"]}
    return {}


def _write_log(log: S.ConvergenceLog, path: Path):
    write_csv(path, ["step", "residual", "dudt", "shift_x", "shift_y"],
              zip(log.steps, log.residual, log.dudt, log.shift_x, log.shift_y))


def task_solve(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    sc = _solve_config(cfg, threads)
    c = _default_speed(P, cfg)
    u0 = S.initial_guess(P, c, sc.guess, sc, **_guess_options(P, cfg))
    f, log = S.relax(u0, sc, P)
    f.to_csv(out / "field.csv")
    _write_log(log, out / "convergence.csv")
    res = {"c": c, "config": sc.as_dict(), "log": log.summary(),
           "residual": S.residual_norm(f, P), "in_range": f.in_range()}
    res["log"].pop("wall_time")
    write_json(out / "solve.json", res)
    return res


def _load_field(cfg, key: str, P) -> S.Field2D:
    path = cfg[key]
    if path is None:
        raise ConfigError(f"{key} must name a field CSV written by 'solve'")
    if not Path(path).is_file():
        raise ConfigError(f"{key}: file {path} not found")
    return S.Field2D.from_csv(path, P)


def task_levels(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    f = _load_field(cfg, "levels.field", P)
    if cfg["levels.recenter"]:
        f, _, _ = S.recenter(f)
    cv = L.extract_level(f, float(cfg["levels.level"]))
    cv.to_csv(out / "level.csv")
    res = {"level": cv.level, "points": int(cv.x.size)}
    win = cfg["levels.window"]
    if P.balanced:
        for name in ("k1-of-y", "k2-of-y"):
            t = L.branch_tables(cv, name)
            t.to_csv(out / f"{name}.csv")
            w = tuple(win) if win is not None else _tail_window(t, P)
            res[name] = L.fit_asymptotics(t, "log-branch", P, w).as_dict()
            res[name + "_cosh"] = L.fit_asymptotics(t, "cosh-law", P, w).as_dict()
    else:
        t = L.branch_tables(cv, "gamma-of-x")
        t.to_csv(out / "gamma-of-x.csv")
        w = tuple(win) if win is not None else (0.5 * t.window[1], t.window[1] - 2.0 / P.mu)
        res["line"] = L.fit_asymptotics(t, "line", P, w).as_dict()
    res["symmetry"] = L.symmetry_residual(f)
    write_json(out / "levels.json", res)
    return res


def task_diagnose(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    f = _load_field(cfg, "diagnose.field", P)
    f, _, _ = S.recenter(f)
    k1 = k2 = None
    if P.balanced:
        cv = L.extract_level(f, 0.0)
        k1, k2 = L.branch_tables(cv, "k1-of-y"), L.branch_tables(cv, "k2-of-y")
    rep = D.diagnose(f, P, k1, k2, alpha=cfg["diagnose.alpha"])
    rep.write(out)
    return rep.summary()


def task_layerdyn(cfg, out: Path, threads: int) -> dict:
    P = _potential(cfg)
    d = _section(cfg, "layerdyn")
    A = d["A_eff"] if d["A_eff"] is not None else energy_curve(P).A_eff
    prm = LD.LayerParams.from_potential(P, d["c"], A)
    y0, init = LD.asymptotic_start(prm, d["l0"])
    traj = LD.integrate(prm, init, (y0, float(d["y_end"])), n=int(d["n"]))
    traj.to_csv(out / "trajectory.csv")
    res = {"params": {"c": prm.c, "mu": prm.mu, "A_eff": prm.A_eff}, "y_start": y0,
           "prediction": LD.asymptote_prediction(prm),
           "theory": LD.compare(traj, "theory", window=(float(d["y_end"]), float(d["y_end"]))),
           "max_q_residual": float(np.max(np.abs(LD.q_residual(traj))))}
    write_json(out / "layerdyn.json", res)
    return res


def _tail_window(t: L.BranchTable, P) -> tuple[float, float]:
    """Upper half of the branch, minus a 2/mu margin at the top boundary."""
    hi = t.window[1]
    return (0.5 * hi, hi - 2.0 / P.mu)


# ---------------------------------------------------------------------------
# end-to-end report


def balanced_pipeline(cfg: dict, out: Path, threads: int) -> dict:
    P = _stage("potential", make_potential, "quartic")
    curve = _stage("energy", energy_curve, P)
    sc = _stage("solve2d", _solve_config, cfg, threads)
    c = 1.0 if cfg["solve.c"] is None else float(cfg["solve.c"])

    def solve():
        u0 = S.initial_guess(P, c, "balanced-cosh", sc, A_eff=curve.A_eff,
                             x0=cfg["report.x0"], y0=cfg["report.y0"],
                             perturb=cfg["report.perturb"])
        t0 = time.perf_counter()
        f, log = S.relax(u0, sc, P)
        return f, log, time.perf_counter() - t0
    f, log, wall = _stage("solve2d", solve)
    _write_log(log, out / "balanced_convergence.csv")
    f.to_csv(out / "balanced_field.csv")
    res = _stage("solve2d", S.residual_norm, f, P)
    grad = _stage("diagnose", D.gradient_and_monotone, f, P)
    r, sx, sy = _stage("levelset", S.recenter, f)

    def levels():
        cv = L.extract_level(r, 0.0)
        k1, k2 = L.branch_tables(cv, "k1-of-y"), L.branch_tables(cv, "k2-of-y")
        k1.to_csv(out / "k1.csv")
        k2.to_csv(out / "k2.csv")
        w = _tail_window(k2, P)
        f1 = L.fit_asymptotics(k1, "log-branch", P, w)
        f2 = L.fit_asymptotics(k2, "log-branch", P, w)
        ch = L.fit_asymptotics(k2, "cosh-law", P, w)
        return cv, k1, k2, w, f1, f2, ch
    cv, k1, k2, w, f1, f2, ch = _stage("levelset", levels)
    sym = _stage("levelset", L.symmetry_residual, r)
    rep = _stage("diagnose", D.diagnose, r, P, k1, k2, alpha=cfg["report.speed_alpha"])
    rep.write(out / "balanced")
    ham = rep.hamiltonian

    def layers():
        prm = LD.LayerParams.from_potential(P, c, curve.A_eff)
        y0, init = LD.asymptotic_start(prm)
        traj = LD.integrate(prm, init, (y0, 1.0e4))
        return (LD.compare(traj, "theory", window=(1.0e4, 1.0e4)),
                LD.compare(traj, "pde", data=(f1.params["C1"], f2.params["C2"])),
                LD.asymptote_prediction(prm))
    theory, pde, pred = _stage("layerdyn", layers)
    slopes = _stage("energy", energy_slope_check, P)
    wcfg = S.SolveConfig(x_extent=(-10.0, 10.0), y_extent=(-150.0, 30.0), nx=101, ny=901,
                         dt=0.4, max_steps=400, check_every=50, guess="single-layer",
                         threads=threads)
    witness = _stage("diagnose", D.nonexistence_witness, P, c, wcfg)
    witness.to_csv(out / "witness.csv")
    m1, m2 = D.barrier_rates(c, P.mu0)
    C1, C2 = f1.params["C1"], f2.params["C2"]
    target = 1.0 / (2.0 * P.mu)
    crit = {
        "3": {"checks": slopes, "max_rel_error": max(d["rel_error"] for d in slopes)},
        "4": {"rate": curve.rate, "two_mu": 2.0 * P.mu, "A_eff": curve.A_eff},
        "5": {"status": log.status, "steps": log.steps[-1], "residual": log.residual[-1],
              "min_uy": grad["min_uy"], "in_range": f.in_range(), "wall_time": wall},
        "6": {"interior_residual": ham["interior_residual"], "rho_top": ham["rho_top"],
              "rho_bottom": ham["rho_bottom"], "c_uy2": ham["c_uy2_full"],
              "full_residual": ham["full_residual"], "beta": P.beta},
        "7": {"flux_residual": rep.flux.residual, "c_max_mass": c * rep.flux.max_mass,
              "nominal_residual": rep.flux.nominal_residual},
        "8": {"window": w, "local_exponent_max_rel_dev":
              max(f1.params["local_exponent_max_rel_dev"], f2.params["local_exponent_max_rel_dev"]),
              "target": target, "C1": C1, "C2": C2, "asymmetry": abs(C1 + C2 - 2 * sym["center_x"]),
              "curve_residual": sym["curve_residual"]},
        "9": {"field_residual": sym["field_residual"], "perturb": cfg["report.perturb"],
              "x0": cfg["report.x0"]},
        "10": {"max_excess": grad["max_excess"]},
        "11": {**rep.decay, "identity_1": abs(m1 - m2 - 0.5 * c),
               "identity_2": abs(m1 * m1 + m2 * m2 - 0.25 * c * c - P.mu0)},
        "13": {"tail_deviation": theory["max_tail_deviation"], "pde": pde},
        "14": {"cosh_ratio": ch.params["ratio"], "A_eff_over_c": curve.A_eff / c,
               "rel_diff": abs(ch.params["ratio"] - curve.A_eff / c) / (curve.A_eff / c),
               "speed_bounds": rep.speed},
        "15": witness.summary(),
    }
    return {"beta": P.beta, "A_eff": curve.A_eff, "C1": C1, "C2": C2,
            "hamiltonian_residual": ham["interior_residual"],
            "symmetry_residual": sym["field_residual"],
            "gradient_excess": grad["max_excess"], "l_offset": pred["l_offset"],
            "recenter_shift": (sx, sy), "criteria": crit}


def unbalanced_pipeline(cfg: dict, out: Path, threads: int) -> dict:
    a = cfg["potential.a"] if cfg["potential.kind"] == "tilted-quartic" else 0.3
    P = _stage("potential", make_potential, "tilted-quartic", a=a)
    c0 = _stage("profile1d", front_speed, P)
    flux = _stage("diagnose", D.planar_flux_check, P)
    alpha = float(cfg["report.alpha"])
    c = c0 / math.cos(alpha)
    pcfg = S.SolveConfig(x_extent=(-5.0, 5.0), y_extent=(-20.0, 20.0), nx=32, ny=401,
                         dt=float(cfg["report.v_dt"]), guess="planar", threads=threads)
    drift = _stage("solve2d", S.planar_drift, P, pcfg, 1000)
    sc = _stage("solve2d", S.SolveConfig, x_extent=cfg["report.v_x_extent"],
                y_extent=cfg["report.v_y_extent"], nx=int(cfg["report.v_nx"]),
                ny=int(cfg["report.v_ny"]), dt=float(cfg["report.v_dt"]),
                max_steps=int(cfg["solve.max_steps"]), tol=float(cfg["solve.tol"]),
                boundary="dirichlet", guess="v-shape", threads=threads)

    def solve():
        u0 = S.initial_guess(P, c, "v-shape", sc, alpha=alpha)
        return S.relax(u0, sc, P)
    f, log = _stage("solve2d", solve)
    _write_log(log, out / "vshape_convergence.csv")
    f.to_csv(out / "vshape_field.csv")
    grad = _stage("diagnose", D.gradient_and_monotone, f, P)
    r, _, _ = _stage("levelset", S.recenter, f)

    def levels():
        g = L.branch_tables(L.extract_level(r, 0.0), "gamma-of-x")
        g.to_csv(out / "gamma.csv")
        return L.fit_asymptotics(g, "line", P, tuple(cfg["report.v_window"]))
    fit = _stage("levelset", levels)
    sym = _stage("levelset", L.symmetry_residual, r)
    slope = fit.params["slope"]
    crit = {
        "2": {"c0": c0, "planar_drift": drift},
        "7": {"planar_flux": flux},
        "10": {"max_excess": grad["max_excess"], "min_uy": grad["min_uy"]},
        "12": {"slope": slope, "target": math.tan(alpha),
               "rel_error": abs(slope - math.tan(alpha)) / math.tan(alpha),
               "symmetry_residual": sym["field_residual"], "status": log.status,
               "residual": log.residual[-1]},
    }
    return {"c0": c0, "slope_fit": slope, "planar_drift": drift["drift"], "criteria": crit}


def full_report(cfg: dict, out: Path, threads: int = 1) -> dict:
    which = cfg["report.pipeline"]
    if which not in ("balanced", "unbalanced", "both"):
        raise ConfigError("report.pipeline must be balanced, unbalanced or both")
    summary = {}
    if which in ("balanced", "both"):
        summary["balanced"] = balanced_pipeline(cfg, out, threads)
    if which in ("unbalanced", "both"):
        summary["unbalanced"] = unbalanced_pipeline(cfg, out, threads)
    write_json(out / "report.json", summary)
    return summary


def task_report(cfg, out: Path, threads: int) -> dict:
    return full_report(cfg, out, threads)


# ---------------------------------------------------------------------------
# entry point


def run(task: str, cfg: dict, out: Path, threads: int = 1) -> tuple[int, dict]:
    """Run one task; returns (exit status, result or error record)."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    fun = globals()[f"task_{task}"]
    try:
        return 0, fun(cfg, out, threads)
    except ConfigError as exc:
        err = {"error": "config", "stage": "config", "message": str(exc)}
        code = 2
    except StageError as exc:
        err = {"error": type(exc.exc).__name__, "stage": exc.stage, "message": str(exc.exc)}
        code = 1
    except Exception as exc:  # noqa: BLE001 - turned into an error record
        err = {"error": type(exc).__name__, "stage": task, "message": str(exc),
               "trace": traceback.format_exc(limit=3)}
        code = 1
    write_json(out / "error.json", err)
    return code, err


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="acwave", description=__doc__.split("\n")[0])
    ap.add_argument("--defaults", action="store_true", help="print config keys and defaults")
    sub = ap.add_subparsers(dest="task")
    for t in TASKS:
        sp = sub.add_parser(t)
        sp.add_argument("--config", default=None, help="flat key = value config file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.defaults:
        sys.stdout.write(defaults_reference())
        return 0
    if args.task is None:
        ap.print_help()
        return 2
    out = Path(args.out)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = load_config(args.config)
    except ConfigError as exc:
        err = {"error": "config", "stage": "config", "message": str(exc)}
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "error.json", err)
        print(json.dumps(err), file=sys.stderr)
        return 2
    code, res = run(args.task, cfg, out, args.threads)
    if code:
        print(json.dumps(to_jsonable(res)), file=sys.stderr)
    else:
        print(f"{args.task}: ok -> {out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
