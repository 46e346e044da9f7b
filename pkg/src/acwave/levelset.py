"""Level curves of 2D fields, their graph views and asymptotic fits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from skimage import measure

from .potentials import Potential
from .solver2d import Field2D, find_center_x

ORIENTATIONS = ("gamma-of-x", "k1-of-y", "k2-of-y")
MODELS = ("log-branch", "cosh-law", "line", "grim-reaper-distance")
MIN_FIT_POINTS = 8


class LevelNotAttained(ValueError):
    pass


class BranchError(ValueError):
    pass


class FitError(ValueError):
    pass


@dataclass
class LevelCurve:
    """Ordered zero-crossing polyline of a field at ``level``.

    ``on_row[i]`` is True when point i lies on a horizontal grid edge (a
    crossing found within a row, so y is a grid ordinate) and False when it
    lies on a vertical edge (a column crossing).  ``tags`` mark the side of
    the lowest point: ``k1`` (left) or ``k2`` (right).
    """

    level: float
    x: np.ndarray
    y: np.ndarray
    on_row: np.ndarray
    tags: np.ndarray
    others: list = field(default_factory=list)  # further polylines, (x, y) pairs

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def to_rows(self):
        for xi, yi, t in zip(self.x, self.y, self.tags):
            yield (self.level, t, xi, yi)

    def to_csv(self, path):
        from .io import write_csv
        return write_csv(path, ["level", "branch", "x", "y"], self.to_rows())


def extract_level(u: Field2D, alpha: float) -> LevelCurve:
    """Marching-squares polyline of {u = alpha}, linear interpolation on
    cell edges; the longest polyline is returned as the main curve."""
    if not -1.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (-1, 1)")
    a = u.u
    if not (a.min() < alpha < a.max()):
        raise LevelNotAttained(f"level {alpha} not attained (range [{a.min()}, {a.max()}])")
    contours = measure.find_contours(a, alpha)
    if not contours:
        raise LevelNotAttained(f"level {alpha} not attained")
    contours.sort(key=len, reverse=True)
    main = contours[0]
    r, c = main[:, 0], main[:, 1]
    x = u.x_min + u.hx * c
    y = u.y_min + u.hy * r
    # orient from left to right
    if x[-1] < x[0]:
        x, y, r = x[::-1], y[::-1], r[::-1]
    on_row = r == np.round(r)
    i0 = int(np.argmin(y))
    tags = np.where(np.arange(x.size) <= i0, "k1", "k2")
    others = [(u.x_min + u.hx * k[:, 1], u.y_min + u.hy * k[:, 0]) for k in contours[1:]]
    return LevelCurve(float(alpha), x, y, on_row, tags, others)


@dataclass
class BranchTable:
    """Graph view of one branch: ``v = f(s)`` sampled at increasing ``s``."""

    orientation: str
    s: np.ndarray
    v: np.ndarray
    window: tuple[float, float]

    def __call__(self, s):
        return np.interp(s, self.s, self.v, left=np.nan, right=np.nan)

    def restrict(self, lo: float, hi: float) -> "BranchTable":
        m = (self.s >= lo) & (self.s <= hi)
        return BranchTable(self.orientation, self.s[m], self.v[m], (lo, hi))

    def derivative(self, stride: int = 1) -> np.ndarray:
        """Centered differences over ``stride`` samples (one-sided at the ends)."""
        s, v, k = self.s, self.v, max(int(stride), 1)
        d = np.empty_like(v)
        d[k:-k] = (v[2 * k:] - v[:-2 * k]) / (s[2 * k:] - s[:-2 * k])
        d[:k] = (v[k] - v[0]) / (s[k] - s[0])
        d[-k:] = (v[-1] - v[-1 - k]) / (s[-1] - s[-1 - k])
        return d

    def to_csv(self, path):
        from .io import write_csv
        names = ("x", "gamma") if self.orientation == "gamma-of-x" else ("y", self.orientation[:2])
        return write_csv(path, list(names), np.column_stack([self.s, self.v]))


def _longest_monotone_run(s, v, sign) -> slice:
    ok = sign * np.diff(v) > 0
    best, start, cur = (0, 0), 0, 0
    for i, flag in enumerate(ok):
        if flag:
            cur += 1
            if cur > best[1] - best[0]:
                best = (start, start + cur)
        else:
            start, cur = i + 1, 0
    return slice(best[0], best[1] + 1)


def branch_tables(curve: LevelCurve, orientation: str) -> BranchTable:
    """Single-valued graph view of the curve.

    ``gamma-of-x`` uses the column crossings (y as a function of x);
    ``k1-of-y``/``k2-of-y`` use the row crossings of the left/right branch.
    The window is the longest run on which k1 decreases / k2 increases
    (gamma: the whole single-valued range).
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    if orientation == "gamma-of-x":
        m = ~curve.on_row
        s, v = curve.x[m], curve.y[m]
        if s.size < 2 or np.any(np.diff(s) <= 0):
            raise BranchError("level curve is not a graph over x")
        return BranchTable(orientation, s, v, (float(s[0]), float(s[-1])))
    tag = orientation[:2]
    m = curve.on_row & (curve.tags == tag)
    s, v = curve.y[m], curve.x[m]
    order = np.argsort(s, kind="stable")
    s, v = s[order], v[order]
    if s.size < 2 or np.any(np.diff(s) <= 0):
        raise BranchError(f"branch {tag} is not single-valued in y")
    run = _longest_monotone_run(s, v, -1.0 if tag == "k1" else 1.0)
    s, v = s[run], v[run]
    if s.size < 2:
        raise BranchError(f"branch {tag} is not monotone on any window")
    return BranchTable(orientation, s, v, (float(s[0]), float(s[-1])))


@dataclass
class FitResult:
    model: str
    params: dict
    residual: float
    window: tuple[float, float]
    n: int
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"model": self.model, "params": self.params, "residual": self.residual,
                "window": list(self.window), "n": self.n}


def _windowed(table: BranchTable, window) -> BranchTable:
    lo, hi = window if window is not None else table.window
    t = table.restrict(lo, hi)
    if t.s.size < MIN_FIT_POINTS:
        raise FitError(f"window {window} holds {t.s.size} < {MIN_FIT_POINTS} points")
    return t


def fit_asymptotics(table: BranchTable, model: str, P: Potential | None = None,
                    window: tuple[float, float] | None = None, mu: float | None = None,
                    stride: int = 10) -> FitResult:
    """Fit one of the asymptotic laws on ``window`` of ``table``.

    log-branch: k(y) = +-(1/2mu) ln y + C (``C`` is C1 or C2); also reports
      the local exponent y k'(y) (differences over ``stride`` rows).
    cosh-law: limit of cosh(2 mu x) / (mu y) along the curve, estimated by
      the median over the last quartile (largest y) of the window.
    line: y = slope |x| + offset on a gamma-of-x table.
    grim-reaper-distance: best scale s for s*gamma(x) ~ log sec(s x) and the
      sup distance between the two.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    if mu is None:
        if P is None:
            raise ValueError("need P or mu")
        mu = P.mu
    t = _windowed(table, window)
    s, v = t.s, t.v
    if not np.all(np.isfinite(v)):
        raise FitError("non-finite samples in window")

    if model == "log-branch":
        if table.orientation == "gamma-of-x":
            raise FitError("log-branch needs a k-of-y table")
        if s[0] <= 0:
            raise FitError("log-branch window must lie in y > 0")
        sgn = -1.0 if table.orientation == "k1-of-y" else 1.0
        z = v - sgn * np.log(s) / (2.0 * mu)
        C = float(np.mean(z))
        # free fit of the log coefficient, for information
        M = np.column_stack([np.log(s), np.ones_like(s)])
        if np.linalg.cond(M) > 1e12:
            raise FitError("singular normal equations")
        (a, b), *_ = np.linalg.lstsq(M, v, rcond=None)
        # differentiate the full table so window points get centered stencils
        inwin = (table.s >= t.window[0]) & (table.s <= t.window[1])
        expo = sgn * s * table.derivative(stride)[inwin]
        target = 1.0 / (2.0 * mu)
        dev = np.abs(expo - target) / target
        key = "C1" if sgn < 0 else "C2"
        return FitResult(model, {key: C, "log_coefficient": float(a), "free_offset": float(b),
                                 "local_exponent_median": float(np.median(expo)),
                                 "local_exponent_max_rel_dev": float(np.max(dev))},
                         float(np.sqrt(np.mean((z - C) ** 2))), t.window, s.size,
                         {"y": s, "local_exponent": expo})

    if model == "cosh-law":
        if table.orientation == "gamma-of-x":
            x, y = s, v
        else:
            x, y = v, s
        keep = y > 0
        x, y = x[keep], y[keep]
        if x.size < MIN_FIT_POINTS:
            raise FitError("too few points with y > 0")
        ratio = np.cosh(2.0 * mu * x) / (mu * y)
        order = np.argsort(y, kind="stable")
        tail = ratio[order][-max(x.size // 4, 2):]
        est = float(np.median(tail))
        return FitResult(model, {"ratio": est}, float(np.max(np.abs(tail - est))),
                         t.window, x.size, {"y": y[order], "ratio": ratio[order]})

    if model == "line":
        if table.orientation != "gamma-of-x":
            raise FitError("line model needs a gamma-of-x table")
        M = np.column_stack([np.abs(s), np.ones_like(s)])
        if np.linalg.cond(M) > 1e12:
            raise FitError("singular normal equations")
        (k, b), *_ = np.linalg.lstsq(M, v, rcond=None)
        r = v - M @ np.array([k, b])
        return FitResult(model, {"slope": float(k), "offset": float(b)},
                         float(np.sqrt(np.mean(r * r))), t.window, s.size)

    # grim-reaper-distance
    if table.orientation != "gamma-of-x":
        raise FitError("grim-reaper comparison needs a gamma-of-x table")
    xmax = float(np.max(np.abs(s)))
    gr = lambda sc: -np.log(np.cos(sc * s))
    obj = lambda sc: float(np.sum((sc * v - gr(sc)) ** 2))
    hi = 0.5 * np.pi / xmax * (1.0 - 1e-9)
    res = optimize.minimize_scalar(obj, bounds=(1e-6 * hi, hi), method="bounded",
                                   options={"xatol": 1e-14})
    sc = float(res.x)
    dist = float(np.max(np.abs(sc * v - gr(sc))))
    return FitResult(model, {"scale": sc, "sup_distance": dist}, dist, t.window, s.size)


def symmetry_residual(u: Field2D, center_x: float | None = None, margin: int = 1) -> dict:
    """Reflection defect about x = center_x (default: the recentering center).

    The field defect uses cubic interpolation in x when the center is not a
    grid node; the curve defect is sup |k1(y) + k2(y) - 2 x_c| over rows
    crossed by both branches.
    """
    xc = find_center_x(u) if center_x is None else float(center_x)
    x = u.x
    q = (xc - u.x_min) / u.hx
    core = u.u[margin:u.ny - margin]
    d = np.arange(0, u.nx)
    if abs(q - round(q)) < 1e-9:
        i0 = int(round(q))
        k = d[(i0 - d >= margin) & (i0 + d <= u.nx - 1 - margin)]
        field_res = float(np.max(np.abs(core[:, i0 + k] - core[:, i0 - k]))) if k.size else 0.0
    else:
        from scipy.interpolate import CubicSpline
        spl = CubicSpline(x, core, axis=1)
        off = u.hx * d
        off = off[(xc - off >= x[margin]) & (xc + off <= x[-1 - margin])]
        field_res = float(np.max(np.abs(spl(xc + off) - spl(xc - off))))
    curve_res = 0.0
    for row in u.u[1:-1]:
        s = np.sign(row)
        k = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if k.size >= 2:
            a, b = row[k], row[k + 1]
            z = x[k] + u.hx * a / (a - b)
            curve_res = max(curve_res, abs(z[0] + z[-1] - 2.0 * xc))
    return {"field_residual": field_res, "curve_residual": curve_res, "center_x": xc}
