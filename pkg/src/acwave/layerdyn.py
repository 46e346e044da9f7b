"""Reduced dynamics of two interacting layers x = l1(y) < l2(y).

    c l1' + l1'' = -A_eff exp(-2 mu l),   c l2' + l2'' = +A_eff exp(-2 mu l),
    l = (l2 - l1) / 2,

with A_eff normalized by E_l = 2 beta A_eff exp(-2 mu l).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _ode

RTOL = 1e-10
ATOL = 1e-12


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class LayerParams:
    c: float
    mu: float
    A_eff: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.mu > 0 and self.beta > 0 and self.A_eff >= 0):
            raise ValueError("need c, mu, beta > 0 and A_eff >= 0")

    @classmethod
    def from_potential(cls, P, c: float, A_eff: float) -> "LayerParams":
        return cls(c=float(c), mu=P.mu, A_eff=float(A_eff), beta=P.beta)


@dataclass
class LayerTrajectory:
    y: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    l1p: np.ndarray
    l2p: np.ndarray
    params: LayerParams

    @property
    def l(self) -> np.ndarray:
        return 0.5 * (self.l2 - self.l1)

    @property
    def lp(self) -> np.ndarray:
        return 0.5 * (self.l2p - self.l1p)

    def at(self, y) -> dict:
        f = lambda v: np.interp(y, self.y, v)
        return {"l1": f(self.l1), "l2": f(self.l2), "l1p": f(self.l1p), "l2p": f(self.l2p)}

    def to_csv(self, path):
        from .io import write_csv
        return write_csv(path, ["y", "l1", "l2", "l1p", "l2p"],
                         np.column_stack([self.y, self.l1, self.l2, self.l1p, self.l2p]))


def _rhs(p: LayerParams):
    c, mu, A = p.c, p.mu, p.A_eff

    def f(y, z):
        l1, l2, q1, q2 = z
        force = A * math.exp(-mu * (l2 - l1))
        return [q1, q2, -force - c * q1, force - c * q2]
    return f


def integrate(params: LayerParams, init: dict, y_span: tuple[float, float],
              n: int = 2001, log_samples: bool = True) -> LayerTrajectory:
    """Integrate the truncated layer system with DOP853 (rtol 1e-10).

    Samples are log-spaced in y - y_span[0] when ``log_samples`` so that long
    spans keep resolution near the start.
    """
    y0, y1 = map(float, y_span)
    if not (np.isfinite(y0) and np.isfinite(y1) and y1 > y0):
        raise ValueError("y_span must be a finite increasing interval")
    z0 = [float(init["l1"]), float(init["l2"]), float(init.get("l1p", 0.0)),
          float(init.get("l2p", 0.0))]
    if z0[1] - z0[0] < 2.0:
        raise ValueError("need l2 - l1 >= 2")
    sol = _ode.solve_ivp(_rhs(params), (y0, y1), z0, method="DOP853", rtol=RTOL, atol=ATOL,
                         dense_output=True)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    if log_samples:
        ys = y0 + np.expm1(np.linspace(0.0, np.log1p(y1 - y0), n))
        ys[-1] = y1
    else:
        ys = np.linspace(y0, y1, n)
    z = sol.sol(ys)
    return LayerTrajectory(ys, z[0], z[1], z[2], z[3], params)


def asymptote_prediction(params: LayerParams) -> dict:
    """Q = exp(2 mu l) grows like Q_slope * y; l - ln(y)/(2 mu) -> l_offset."""
    q = 2.0 * params.mu * params.A_eff / params.c
    return {"Q_slope": q, "l_offset": float(np.log(q) / (2.0 * params.mu))}


def asymptotic_start(params: LayerParams, l0: float = 1.0, center: float = 0.0) -> tuple[float, dict]:
    """Symmetric initial data on the leading-order asymptote.

    Returns y0 with Q_slope * y0 = exp(2 mu l0) and the state
    l = l0, l' = 1 / (2 mu y0) there, so that y is measured from the
    asymptote's own origin.
    """
    q = asymptote_prediction(params)["Q_slope"]
    y0 = float(np.exp(2.0 * params.mu * l0) / q)
    lp = 1.0 / (2.0 * params.mu * y0)
    return y0, {"l1": center - l0, "l2": center + l0, "l1p": -lp, "l2p": lp}


def q_residual(traj: LayerTrajectory) -> np.ndarray:
    """c Q' + Q'' - Q'^2 / Q - 2 mu A_eff along the trajectory (exact form of the
    Q equation, evaluated through l, l' and the ODE for l'')."""
    p = traj.params
    l, lp = traj.l, traj.lp
    lpp = p.A_eff * np.exp(-2.0 * p.mu * l) - p.c * lp
    Q = np.exp(2.0 * p.mu * l)
    Qp = 2.0 * p.mu * lp * Q
    Qpp = (2.0 * p.mu * lpp + (2.0 * p.mu * lp) ** 2) * Q
    return p.c * Qp + Qpp - Qp ** 2 / Q - 2.0 * p.mu * p.A_eff


def compare(traj: LayerTrajectory, reference: str, data=None, window=None) -> dict:
    """Compare a trajectory with theory, another trajectory, or PDE branches.

    reference="theory": max over the tail window (default: last 10% of the
      span) of |l(y) - ln(y)/(2 mu) - l_offset|.
    reference="trajectory": ``data`` is another LayerTrajectory; max |l_i - l_i'|
      on the overlap.
    reference="pde": ``data`` is (C1, C2) fitted from the branch tables of a
      relaxed field.  After aligning the translation B = (C1 + C2)/2 the
      predicted offsets are B -+ l_offset; ``per_branch`` holds the relative
      deviations.
    """
    p = traj.params
    if reference == "theory":
        y = traj.y
        lo, hi = window if window is not None else (y[0] + 0.9 * (y[-1] - y[0]), y[-1])
        m = (y >= lo) & (y <= hi) & (y > 0)
        if not m.any():
            raise ValueError("empty overlap")
        off = asymptote_prediction(p)["l_offset"]
        dev = np.abs(traj.l[m] - np.log(y[m]) / (2.0 * p.mu) - off)
        return {"max_tail_deviation": float(dev.max()), "window": (float(lo), float(hi)),
                "deviation_at_end": float(dev[-1]), "per_branch": None}
    if reference == "trajectory":
        lo = max(traj.y[0], data.y[0])
        hi = min(traj.y[-1], data.y[-1])
        if hi <= lo:
            raise ValueError("empty overlap")
        ys = traj.y[(traj.y >= lo) & (traj.y <= hi)]
        a, b = traj.at(ys), data.at(ys)
        per = {k: float(np.max(np.abs(a[k] - b[k]))) for k in ("l1", "l2")}
        return {"max_tail_deviation": max(per.values()), "per_branch": per}
    if reference == "pde":
        C1, C2 = map(float, data)
        off = asymptote_prediction(p)["l_offset"]
        B = 0.5 * (C1 + C2)
        pred = {"C1": B - off, "C2": B + off}
        per = {"C1": abs(C1 - pred["C1"]) / abs(pred["C1"]),
               "C2": abs(C2 - pred["C2"]) / abs(pred["C2"])}
        return {"max_tail_deviation": max(per.values()), "per_branch": per,
                "predicted": pred, "measured": {"C1": C1, "C2": C2}, "B": B}
    raise ValueError("reference must be 'theory', 'trajectory' or 'pde'")
