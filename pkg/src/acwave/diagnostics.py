"""Identities, bounds and classifications evaluated on relaxed fields.

Derivatives are centered differences (second-order one-sided at the array
edges, which are excluded from sup norms); integrals use the trapezoid rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .levelset import BranchTable
from .potentials import Potential
from .profiles1d import (NoSuchProfile, bounded_gstar, heteroclinic, periodic_profile,
                         two_layer)
from .solver2d import Field2D

_trapz = np.trapezoid if hasattr(np, "trapezoid") else np.trapz


def gradients(u: Field2D) -> tuple[np.ndarray, np.ndarray]:
    uy, ux = np.gradient(u.u, u.hy, u.hx, edge_order=2)
    return ux, uy


def rho_profile(u: Field2D, P: Potential) -> tuple[np.ndarray, np.ndarray]:
    """rho(y) = int [ (u_x^2 - u_y^2)/2 + F(u) ] dx for every row."""
    ux, uy = gradients(u)
    dens = 0.5 * (ux * ux - uy * uy) + P.F(u.u)
    return u.y, _trapz(dens, dx=u.hx, axis=1)


def row_mass(u: Field2D) -> np.ndarray:
    """int u_y^2 dx for every row."""
    _, uy = gradients(u)
    return _trapz(uy * uy, dx=u.hx, axis=1)


def _rows(u: Field2D, y0: float, y1: float) -> tuple[int, int]:
    j0, j1 = u.index_y(y0), u.index_y(y1)
    j0, j1 = max(j0, 0), min(j1, u.ny - 1)
    if j1 <= j0:
        raise ValueError("need y0 < y1 inside the field")
    return j0, j1


def hamiltonian_terms(u: Field2D, P: Potential, y0: float, y1: float) -> dict:
    y, rho = rho_profile(u, P)
    j0, j1 = _rows(u, y0, y1)
    mass = row_mass(u)
    flux = u.c * _trapz(mass[j0:j1 + 1], dx=u.hy)
    return {"y0": float(y[j0]), "y1": float(y[j1]), "rho0": float(rho[j0]),
            "rho1": float(rho[j1]), "c_uy2": float(flux)}


def hamiltonian_residual(u: Field2D, P: Potential, y0: float, y1: float) -> float:
    """|rho(y1) - rho(y0) - c int_{y0}^{y1} int u_y^2 dx dy| (rows snapped to the grid)."""
    t = hamiltonian_terms(u, P, y0, y1)
    return abs(t["rho1"] - t["rho0"] - t["c_uy2"])


@dataclass
class FluxTable:
    x: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    mass: np.ndarray
    bracket: np.ndarray
    residual: float
    nominal_residual: float
    max_mass: float

    def to_csv(self, path):
        from .io import write_csv
        return write_csv(path, ["x", "h", "h_prime", "int_uy2", "boundary_term"],
                         np.column_stack([self.x, self.h, self.dh, self.mass, self.bracket]))


def flux_identity(u: Field2D, P: Potential, margin: int = 2) -> FluxTable:
    """h(x) = int u_x u_y dy and the column balance
    h'(x) + c int u_y^2 dy = [F + u_x^2/2 - u_y^2/2] evaluated top minus bottom.

    ``residual`` uses the bracket evaluated on the boundary rows of the
    truncated domain; ``nominal_residual`` replaces it by its limit value
    (0 balanced, F(1) unbalanced), which presumes u = -1/+1 on those rows.
    Both are sups over columns at least ``margin`` nodes from the walls.
    """
    ux, uy = gradients(u)
    h = _trapz(ux * uy, dx=u.hy, axis=0)
    dh = np.gradient(h, u.hx, edge_order=2)
    mass = _trapz(uy * uy, dx=u.hy, axis=0)
    b = P.F(u.u) + 0.5 * (ux * ux - uy * uy)
    bracket = b[-1] - b[0]
    lhs = dh + u.c * mass
    sl = slice(margin, u.nx - margin)
    nominal = 0.0 if P.balanced else P.F1
    return FluxTable(u.x, h, dh, mass, bracket,
                     float(np.max(np.abs(lhs - bracket)[sl])),
                     float(np.max(np.abs(lhs - nominal)[sl])),
                     float(np.max(mass[sl])))


def gradient_and_monotone(u: Field2D, P: Potential) -> dict:
    ux, uy = gradients(u)
    excess = (ux * ux + uy * uy - 2.0 * P.F(u.u))[1:-1, 1:-1]
    # u_y from the centered stencil only (interior nodes)
    uyc = (u.u[2:, 1:-1] - u.u[:-2, 1:-1]) / (2.0 * u.hy)
    return {"max_excess": float(np.max(excess)), "min_uy": float(np.min(uyc))}


# ---------------------------------------------------------------------------
# decay barrier


def barrier_rates(c: float, mu0: float) -> tuple[float, float]:
    r = np.sqrt(c * c + 8.0 * mu0)
    return (c + r) / 4.0, (-c + r) / 4.0


def barrier(x, y, R: float, c: float, mu0: float):
    """B(x, y) = 4 exp(-mu2 R - c y / 2) cosh(mu1 y) cosh(mu2 x)."""
    m1, m2 = barrier_rates(c, mu0)
    return 4.0 * np.exp(-m2 * R - 0.5 * c * np.asarray(y)) * np.cosh(m1 * np.asarray(y)) \
        * np.cosh(m2 * np.asarray(x))


def decay_envelope(u: Field2D, P: Potential, k1: BranchTable, k2: BranchTable,
                   y_window: tuple[float, float] | None = None, margin: float | None = None) -> dict:
    """Fit |u^2 - 1| <= C exp(-nu d), d = min(|x - k1(y)|, |x - k2(y)|).

    Rows are those where both branch tables are defined (and inside
    ``y_window``); nodes within ``margin`` (default 2/mu) of the domain
    boundary are dropped.  ``nu_fit`` is the raw log-linear decay rate over
    the nodes with d in [2/mu, d_max - 2/mu]; the envelope uses
    nu = min(nu_fit, sqrt(mu0)) and C = the sup of |u^2 - 1| e^{nu d} over
    that window, and ``holds`` is checked on every retained node with
    d >= 2/mu.
    """
    mu, mu0 = P.mu, P.mu0
    m = 2.0 / mu if margin is None else margin
    lo = max(k1.window[0], k2.window[0], u.y_min + m)
    hi = min(k1.window[1], k2.window[1], u.y[-1] - m)
    if y_window is not None:
        lo, hi = max(lo, y_window[0]), min(hi, y_window[1])
    y, x = u.y, u.x
    rows = np.nonzero((y >= lo) & (y <= hi))[0]
    cols = np.nonzero((x >= x[0] + m) & (x <= x[-1] - m))[0]
    if rows.size < 2 or cols.size < 2:
        raise ValueError("insufficient tail samples")
    Y = y[rows][:, None]
    X = x[cols][None, :]
    d = np.minimum(np.abs(X - k1(Y)), np.abs(X - k2(Y)))
    w = np.abs(u.u[np.ix_(rows, cols)] ** 2 - 1.0)
    d_lo, d_hi = 2.0 / mu, float(np.max(d)) - 2.0 / mu
    sel = (d >= d_lo) & (d <= d_hi) & (w > 0)
    if sel.sum() < 8:
        raise ValueError("insufficient tail samples")
    slope, icpt = np.polyfit(d[sel], np.log(w[sel]), 1)
    nu_fit = float(-slope)
    nu = min(nu_fit, float(np.sqrt(mu0)))
    C = float(np.max(w[sel] * np.exp(nu * d[sel])))
    tail = d >= d_lo
    holds = bool(np.all(w[tail] <= C * np.exp(-nu * d[tail]) * (1.0 + 1e-12)))
    m1, m2 = barrier_rates(u.c, mu0)
    return {"nu_fit": nu_fit, "C_fit": float(np.exp(icpt)), "nu": nu, "C": C,
            "mu1": m1, "mu2": m2, "holds": holds, "window_y": (float(lo), float(hi)),
            "window_d": (d_lo, d_hi), "nodes": int(tail.sum())}


# ---------------------------------------------------------------------------
# speed bounds and end-state classification


def speed_bounds(P: Potential, alpha: float) -> dict:
    """Case (7): F(alpha) / G(beta_conj); case (9): F(1) / beta (unbalanced)."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    b = P.conjugate(alpha)
    out = {"alpha": alpha, "beta_conj": b, "bound_case7": float(P.F(alpha)) / P.G(b)}
    if not P.balanced:
        out["bound_case9"] = P.F1 / P.beta
    return out


def planar_flux_check(P: Potential, half_width: float = 12.0) -> dict:
    """Front energy flux: c0 int g'^2 = F(1) - F(-1), tested as int g'^2 vs F(1)/c0."""
    g = heteroclinic(P, half_width=max(half_width, 8.0 / P.mu))
    mass = float(_trapz(g.du ** 2, g.s))
    if g.speed <= 0:
        return {"int_g_prime_sq": mass, "c0": g.speed, "predicted": None, "error": None}
    pred = (P.F1 - float(P.F(-1.0))) / g.speed
    return {"int_g_prime_sq": mass, "c0": g.speed, "predicted": pred, "error": abs(mass - pred)}


def _crossings(row, x):
    s = np.sign(row)
    k = np.nonzero(s[:-1] * s[1:] < 0)[0]
    a, b = row[k], row[k + 1]
    return x[k] + (x[k + 1] - x[k]) * a / (a - b)


def _best_shift(row, x, model, s0, span=0.5):
    f = lambda s: float(np.max(np.abs(row - model(x - s))))
    r = optimize.minimize_scalar(f, bounds=(s0 - span, s0 + span), method="bounded",
                                 options={"xatol": 1e-10})
    return float(r.fun), float(r.x)


def classify_row(row: np.ndarray, x: np.ndarray, P: Potential, cache: dict | None = None) -> dict:
    """Sup distance of a row to each candidate end state after the best shift."""
    cache = {} if cache is None else cache
    if "g" not in cache:
        cache["g"] = heteroclinic(P, half_width=max(8.0, 8.0 / P.mu))
    g = cache["g"]
    dist = {"constant -1": float(np.max(np.abs(row + 1.0))),
            "constant +1": float(np.max(np.abs(row - 1.0)))}
    z = _crossings(row, x)
    if z.size >= 1:
        # a single transition either way round; only meaningful for c0 = 0 or
        # rows of the moving frame where the profile is stationary
        d1, _ = _best_shift(row, x, lambda t: g(t), z[0])
        d2, _ = _best_shift(row, x, lambda t: g(-t), z[-1])
        dist["heteroclinic g"] = min(d1, d2)
    if z.size >= 2 and P.balanced:
        l1, l2 = z[0], z[-1]
        if (l2 - l1) / 2 >= 1.0:
            try:
                phi = two_layer(P, l1, l2, front=g)
                dist["two-layer phi"] = float(np.max(np.abs(row - phi(x))))
            except NoSuchProfile:
                pass
    if z.size >= 2 and not P.balanced:
        try:
            if "gs" not in cache:
                cache["gs"] = bounded_gstar(P)
            gs = cache["gs"]
            mid = 0.5 * (z[0] + z[-1])
            dist["bounded g*"], _ = _best_shift(row, x, gs, mid)
        except NoSuchProfile:
            pass
    amp = float(np.max(row))
    if z.size >= 2 and P.theta <= amp < 1.0 - 1e-6:
        try:
            ga = periodic_profile(P, amp)
            peak = float(x[int(np.argmax(row))])
            dist["periodic g_alpha"], _ = _best_shift(row, x, ga, peak, span=0.5 * ga.period)
        except Exception:  # quadrature failure near alpha -> 1: not a candidate
            pass
    best = min(dist, key=dist.get)
    return {"class": best, "distance": dist[best], "distances": dist}


def limit_profiles(u: Field2D, P: Potential) -> dict:
    cache: dict = {}
    top = classify_row(u.u[-1], u.x, P, cache)
    bot = classify_row(u.u[0], u.x, P, cache)
    return {"top_class": top["class"], "bottom_class": bot["class"],
            "distances": {"top": top["distances"], "bottom": bot["distances"]}}


# ---------------------------------------------------------------------------
# report


@dataclass
class DiagnosticsReport:
    rho_y: np.ndarray
    rho: np.ndarray
    hamiltonian: dict
    flux: FluxTable
    gradient: dict
    decay: dict | None
    limits: dict
    mass_total: float
    speed: dict | None = None
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"hamiltonian": self.hamiltonian,
                "flux_residual": self.flux.residual,
                "flux_nominal_residual": self.flux.nominal_residual,
                "flux_max_mass": self.flux.max_mass,
                "gradient": self.gradient, "decay": self.decay, "limits": self.limits,
                "uy2_total": self.mass_total, "speed_bounds": self.speed, **self.extra}

    def write(self, outdir) -> None:
        from pathlib import Path

        from .io import write_csv, write_json
        out = Path(outdir)
        write_csv(out / "rho.csv", ["y", "rho"], np.column_stack([self.rho_y, self.rho]))
        self.flux.to_csv(out / "flux.csv")
        write_json(out / "diagnostics.json", self.summary())


def diagnose(u: Field2D, P: Potential, k1: BranchTable | None = None,
             k2: BranchTable | None = None, interior: tuple[float, float] | None = None,
             alpha: float | None = None) -> DiagnosticsReport:
    """Run every diagnostic that applies to ``u``."""
    y, rho = rho_profile(u, P)
    m = 2.0 / P.mu
    lo, hi = interior if interior is not None else (y[0] + m, y[-1] - m)
    full = hamiltonian_terms(u, P, y[0], y[-1])
    ham = {"interior_window": (float(lo), float(hi)),
           "interior_residual": hamiltonian_residual(u, P, lo, hi),
           "rho_top": full["rho1"], "rho_bottom": full["rho0"], "c_uy2_full": full["c_uy2"],
           "full_residual": abs(full["rho1"] - full["rho0"] - full["c_uy2"])}
    decay = None
    if k1 is not None and k2 is not None:
        decay = decay_envelope(u, P, k1, k2)
    mass = float(_trapz(row_mass(u), dx=u.hy))
    speed = speed_bounds(P, alpha) if alpha is not None else None
    return DiagnosticsReport(y, rho, ham, flux_identity(u, P), gradient_and_monotone(u, P),
                             decay, limit_profiles(u, P), mass, speed)


# ---------------------------------------------------------------------------
# nonexistence witness


@dataclass
class WitnessReport:
    """Checkpoint table of a relaxation started from case-(1) data."""
    table: dict
    status: str
    steady_reached: bool
    front_reached_bottom: bool
    monotone: dict

    def summary(self) -> dict:
        t = self.table
        return {"status": self.status, "steady_reached": self.steady_reached,
                "front_reached_bottom": self.front_reached_bottom, "monotone": self.monotone,
                "final_imbalance": t["imbalance"][-1],
                "final_cumulative_imbalance": float(t["cumulative_imbalance"][-1]),
                "front_descent": t["front_right"][0] - t["front_right"][-1],
                "uy2_drift": t["uy2_total"][-1] - t["uy2_total"][0],
                "final_residual": t["residual"][-1]}

    def to_csv(self, path):
        from .io import write_csv
        keys = list(self.table)
        return write_csv(path, keys, zip(*(self.table[k] for k in keys)))


def _lowest_crossing(col: np.ndarray, y: np.ndarray) -> float:
    k = np.nonzero((col[:-1] < 0) & (col[1:] >= 0))[0]
    if k.size == 0:
        return float("nan")
    j = k[0]
    return float(y[j] + (y[j + 1] - y[j]) * col[j] / (col[j] - col[j + 1]))


def nonexistence_witness(P: Potential, c: float, cfg, K1: float = 0.0,
                         y0: float = 0.0) -> WitnessReport:
    """Relax from case-(1) data (top row g(x - K1), bottom row -1) and record,
    at every checkpoint, the total u_y mass, the Hamiltonian imbalance

        D = c int int u_y^2 - (rho_top - rho_bottom)  (= int int u_t u_y),

    its time integral, the front height at the right wall and the steady
    residual.  A steady state would force D = 0; a persistent positive D
    with a descending front is the drift the witness documents.
    """
    from .solver2d import initial_guess, relax, residual_norm

    if not P.balanced:
        raise ValueError("case-(1) data needs a balanced potential")
    rows = {k: [] for k in ("step", "time", "uy2_total", "rho_top", "rho_bottom",
                            "imbalance", "cumulative_imbalance", "front_right", "residual")}

    def record(step, f):
        _, rho = rho_profile(f, P)
        tot = float(_trapz(row_mass(f), dx=f.hy))
        imb = f.c * tot - (rho[-1] - rho[0])
        t = step * cfg.dt
        cum = 0.0
        if rows["step"]:
            cum = rows["cumulative_imbalance"][-1] + 0.5 * (imb + rows["imbalance"][-1]) \
                * (t - rows["time"][-1])
        for k, v in zip(rows, (step, t, tot, float(rho[-1]), float(rho[0]), float(imb), cum,
                               _lowest_crossing(f.u[:, -1], f.y), residual_norm(f, P)["sup"])):
            rows[k].append(v)

    u0 = initial_guess(P, c, "single-layer", cfg, K1=K1, y0=y0)
    record(0, u0)
    out, log = relax(u0, cfg, P, callback=record)
    front = np.asarray(rows["front_right"])
    low = u0.y_min + 2.0 / P.mu
    reached = bool(np.any(np.isnan(front[1:])) or np.nanmin(front) <= low)
    mono = {
        "cumulative_imbalance_increasing": bool(np.all(np.diff(rows["cumulative_imbalance"]) > 0)),
        "imbalance_positive": bool(np.all(np.asarray(rows["imbalance"][1:]) > 0)),
        "front_descending": bool(np.all(np.diff(front) < 0)),
        "uy2_monotone": bool(np.all(np.diff(rows["uy2_total"][1:]) <= 0)
                             or np.all(np.diff(rows["uy2_total"][1:]) >= 0)),
    }
    return WitnessReport(rows, log.status, log.converged, reached, mono)
