"""Relaxation of the moving-frame equation  Du + c u_y - F'(u) = 0  on a rectangle.

The parabolic flow v_t = Dv + c v_y - F'(v) is advanced by a semi-implicit
step: diffusion and transport are implicit, the reaction is explicit.  The
implicit operator is diagonalized in x by a cosine transform (Neumann walls)
or a sine transform (Dirichlet walls); each x-mode is then a tridiagonal
system in y, factored once per run.

Array layout: ``u[j, i]`` is the value at ``(x_i, y_j)``; rows are constant-y
lines.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import fft, ndimage, sparse
from scipy.sparse import linalg as spla
from scipy.spatial import cKDTree

from .potentials import Potential
from .profiles1d import heteroclinic, periodic_profile, two_layer

CLIP_EPS = 1e-6
GUESS_KINDS = ("balanced-cosh", "v-shape", "planar", "two-layer-column",
               "single-layer", "periodic-bottom")
BOUNDARY_MODES = ("neumann", "dirichlet")


class SolverError(RuntimeError):
    pass


class RangeViolation(SolverError):
    """Iterates left [-1 - eps, 1 + eps]: the step is unstable."""


class StabilityError(ValueError):
    """The configured time step exceeds the scheme's stability bound."""


class NoZeroCrossing(SolverError):
    pass


# ---------------------------------------------------------------------------
# data types


@dataclass
class Field2D:
    u: np.ndarray
    hx: float
    hy: float
    x_min: float
    y_min: float
    c: float
    potential: Potential | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.u = np.ascontiguousarray(self.u, dtype=float)
        if self.u.ndim != 2 or min(self.u.shape) < 16:
            raise ValueError("field needs a 2D array with nx, ny >= 16")
        if not (self.hx > 0 and self.hy > 0):
            raise ValueError("grid spacings must be positive")

    @property
    def nx(self) -> int:
        return self.u.shape[1]

    @property
    def ny(self) -> int:
        return self.u.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.y_min + self.hy * np.arange(self.ny)

    def copy(self, u: np.ndarray | None = None, **kw) -> "Field2D":
        base = dict(u=self.u.copy() if u is None else u, hx=self.hx, hy=self.hy,
                    x_min=self.x_min, y_min=self.y_min, c=self.c, potential=self.potential)
        base.update(kw)
        return Field2D(**base)

    def in_range(self, eps: float = CLIP_EPS) -> bool:
        return bool(np.all(np.abs(self.u) <= 1.0 + eps))

    def index_x(self, x: float) -> int:
        return int(round((x - self.x_min) / self.hx))

    def index_y(self, y: float) -> int:
        return int(round((y - self.y_min) / self.hy))

    def interpolate(self, x, y, order: int = 3) -> np.ndarray:
        """Spline interpolation at physical points (clamped to the grid)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ci = (x - self.x_min) / self.hx
        cj = (y - self.y_min) / self.hy
        return ndimage.map_coordinates(self.u, [cj.ravel(), ci.ravel()], order=order,
                                       mode="nearest").reshape(np.broadcast(x, y).shape)

    def meta(self) -> dict:
        return {"nx": self.nx, "ny": self.ny, "hx": self.hx, "hy": self.hy,
                "x_min": self.x_min, "y_min": self.y_min, "c": self.c}

    def to_csv(self, path) -> Path:
        from .io import fmt
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        m = self.meta()
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(m) + "\n")
            fh.write(",".join(fmt(v) for v in m.values()) + "\n")
            for row in self.u:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        return path

    @classmethod
    def from_csv(cls, path, potential: Potential | None = None) -> "Field2D":
        with open(path) as fh:
            keys = fh.readline().strip().split(",")
            vals = fh.readline().strip().split(",")
            m = dict(zip(keys, vals))
            u = np.loadtxt(fh, delimiter=",", ndmin=2)
        f = cls(u, float(m["hx"]), float(m["hy"]), float(m["x_min"]), float(m["y_min"]),
                float(m["c"]), potential)
        if f.nx != int(m["nx"]) or f.ny != int(m["ny"]):
            raise ValueError("field CSV shape does not match its header")
        return f


@dataclass
class SolveConfig:
    x_extent: tuple[float, float] = (-10.0, 10.0)
    y_extent: tuple[float, float] = (-10.0, 100.0)
    nx: int = 256
    ny: int = 1024
    dt: float = 0.4
    max_steps: int = 20000
    tol: float = 1e-6
    check_every: int = 50
    recenter_interval: int = 0
    boundary: str = "neumann"
    guess: str = "balanced-cosh"
    check_stability: bool = True
    threads: int = 1

    def __post_init__(self):
        self.x_extent = tuple(float(v) for v in self.x_extent)
        self.y_extent = tuple(float(v) for v in self.y_extent)
        if self.nx < 16 or self.ny < 16:
            raise ValueError("nx and ny must be >= 16")
        if not (self.x_extent[1] > self.x_extent[0] and self.y_extent[1] > self.y_extent[0]):
            raise ValueError("domain extents must be increasing")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"boundary must be one of {BOUNDARY_MODES}")
        if self.guess not in GUESS_KINDS:
            raise ValueError(f"guess must be one of {GUESS_KINDS}")
        if self.max_steps < 1 or self.check_every < 1 or self.threads < 1:
            raise ValueError("max_steps, check_every and threads must be >= 1")

    @property
    def hx(self) -> float:
        return (self.x_extent[1] - self.x_extent[0]) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_extent[1] - self.y_extent[0]) / (self.ny - 1)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(*self.x_extent, self.nx), np.linspace(*self.y_extent, self.ny))

    def as_dict(self) -> dict:
        return asdict(self)


def stability_bound(P: Potential, samples: int = 4001) -> float:
    """Largest dt for which s -> s - dt F'(s) maps [-1, 1] into itself.

    Together with the M-matrix property of the implicit operator (which
    needs |c| hy / 2 < 1) this gives a discrete maximum principle.
    """
    s = np.linspace(-1.0, 1.0, samples)
    return float(1.0 / np.max(P.d2F(s)))


@dataclass
class ConvergenceLog:
    steps: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    dudt: list = field(default_factory=list)
    shift_x: list = field(default_factory=list)
    shift_y: list = field(default_factory=list)
    status: str = "running"
    wall_time: float = 0.0

    def record(self, step, res, dudt, sx=0.0, sy=0.0):
        if self.steps and step <= self.steps[-1]:
            raise ValueError("checkpoint steps must increase")
        self.steps.append(int(step))
        self.residual.append(float(res))
        self.dudt.append(float(dudt))
        self.shift_x.append(float(sx))
        self.shift_y.append(float(sy))

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def monotone_after(self, skip: int = 3) -> bool:
        """Whether the residual is non-increasing over the checkpoints after
        an initial transient (logged, not enforced)."""
        r = np.asarray(self.residual[skip:])
        return bool(r.size < 2 or np.all(np.diff(r) <= 1e-12 + 1e-6 * r[:-1]))

    def summary(self) -> dict:
        return {"status": self.status, "steps": self.steps[-1] if self.steps else 0,
                "final_residual": self.residual[-1] if self.residual else None,
                "final_dudt": self.dudt[-1] if self.dudt else None,
                "checkpoints": len(self.steps), "wall_time": self.wall_time,
                "residual_monotone_after_transient": self.monotone_after()}


# ---------------------------------------------------------------------------
# residuals


def _steady_residual(u, hx, hy, c, dF, neumann: bool) -> np.ndarray:
    """Five-point residual on rows 1..ny-2; all columns when ``neumann``
    (ghost reflection at the walls), interior columns otherwise."""
    core = u[1:-1]
    uyy = (u[2:] - 2.0 * core + u[:-2]) / hy ** 2
    uy = (u[2:] - u[:-2]) / (2.0 * hy)
    uxx = np.empty_like(core)
    uxx[:, 1:-1] = (core[:, 2:] - 2.0 * core[:, 1:-1] + core[:, :-2]) / hx ** 2
    uxx[:, 0] = 2.0 * (core[:, 1] - core[:, 0]) / hx ** 2
    uxx[:, -1] = 2.0 * (core[:, -2] - core[:, -1]) / hx ** 2
    r = uxx + uyy + c * uy - dF(core)
    return r if neumann else r[:, 1:-1]


def residual_norm(u: Field2D, P: Potential | None = None) -> dict:
    """Sup and root-mean-square of the discrete steady residual on interior nodes."""
    P = P or u.potential
    if P is None:
        raise ValueError("a potential is required")
    r = _steady_residual(u.u, u.hx, u.hy, u.c, P.dF, neumann=False)
    return {"sup": float(np.max(np.abs(r))), "l2": float(np.sqrt(np.mean(r * r)))}


# ---------------------------------------------------------------------------
# semi-implicit stepper


class _Stepper:
    def __init__(self, nx, ny, hx, hy, c, dt, neumann: bool, workers: int = 1):
        self.neumann, self.dt, self.workers = neumann, dt, workers
        self.hx, self.hy, self.c = hx, hy, c
        k = np.arange(nx) if neumann else np.arange(1, nx - 1)
        lam = (2.0 * np.cos(np.pi * k / (nx - 1)) - 2.0) / hx ** 2
        m = ny - 2
        self.m, self.nk = m, k.size
        self.lo = dt * (1.0 / hy ** 2 - c / (2.0 * hy))  # weight of u[j-1]
        self.hi = dt * (1.0 / hy ** 2 + c / (2.0 * hy))  # weight of u[j+1]
        diag = (1.0 + 2.0 * dt / hy ** 2 - dt * lam)[:, None] * np.ones(m)
        lower = np.full((self.nk, m), -self.lo)
        upper = np.full((self.nk, m), -self.hi)
        # decouple consecutive modes in the mode-major ordering
        lower[:, 0] = 0.0
        upper[:, -1] = 0.0
        n = self.nk * m
        A = sparse.diags([lower.ravel()[1:], diag.ravel(), upper.ravel()[:-1]], [-1, 0, 1],
                         shape=(n, n), format="csc")
        self.lu = spla.splu(A, permc_spec="NATURAL")

    def _fwd(self, a):
        if self.neumann:
            return fft.dct(a, type=1, axis=1, workers=self.workers)
        return fft.dst(a, type=1, axis=1, workers=self.workers)

    def _inv(self, a):
        if self.neumann:
            return fft.idct(a, type=1, axis=1, workers=self.workers)
        return fft.idst(a, type=1, axis=1, workers=self.workers)

    def step(self, u: np.ndarray, dF) -> np.ndarray:
        cols = slice(None) if self.neumann else slice(1, -1)
        core = u[1:-1, cols]
        rhs = core - self.dt * dF(core)
        rhs[0] += self.lo * u[0, cols]
        rhs[-1] += self.hi * u[-1, cols]
        if not self.neumann:
            w = self.dt / self.hx ** 2
            rhs[:, 0] += w * u[1:-1, 0]
            rhs[:, -1] += w * u[1:-1, -1]
        R = self._fwd(rhs)
        sol = self.lu.solve(np.ascontiguousarray(R.T).ravel())
        out = u.copy()
        out[1:-1, cols] = self._inv(sol.reshape(self.nk, self.m).T)
        return out


def relax(u0: Field2D, cfg: SolveConfig, P: Potential | None = None,
          callback=None) -> tuple[Field2D, ConvergenceLog]:
    """Run the parabolic flow from ``u0`` until the steady residual meets
    ``cfg.tol`` or ``cfg.max_steps`` is reached.

    Boundary rows (y_min, y_max) are held at their initial values; the side
    walls are homogeneous Neumann (``boundary="neumann"``) or held as well
    (``"dirichlet"``).  ``callback(step, field)`` runs at every checkpoint.
    """
    P = P or u0.potential
    if P is None:
        raise ValueError("a potential is required")
    if not u0.in_range():
        raise RangeViolation("initial field out of range")
    bound = stability_bound(P)
    if cfg.check_stability and cfg.dt > bound:
        raise StabilityError(f"dt={cfg.dt} exceeds the stability bound {bound:.4g}")
    if cfg.check_stability and abs(u0.c) * u0.hy / 2.0 >= 1.0:
        raise StabilityError("|c| hy / 2 must be < 1 for the discrete maximum principle")
    neumann = cfg.boundary == "neumann"
    stepper = _Stepper(u0.nx, u0.ny, u0.hx, u0.hy, u0.c, cfg.dt, neumann, cfg.threads)
    log = ConvergenceLog()
    t0 = time.perf_counter()
    f = u0.copy()
    u = f.u
    res_of = lambda a: float(np.max(np.abs(
        _steady_residual(a, f.hx, f.hy, f.c, P.dF, neumann))))
    log.record(0, res_of(u), 0.0)
    if log.residual[-1] <= cfg.tol:
        log.status = "converged"
    step = 0
    while log.status == "running" and step < cfg.max_steps:
        step += 1
        new = stepper.step(u, P.dF)
        if not np.all(np.abs(new) <= 1.0 + CLIP_EPS):
            bad = np.unravel_index(np.argmax(np.abs(new)), new.shape)
            raise RangeViolation(
                f"value {new[bad]:.6g} at (j={bad[0]}, i={bad[1]}) after step {step}")
        sx = sy = 0.0
        checkpoint = step % cfg.check_every == 0 or step == cfg.max_steps
        if checkpoint:
            dudt = float(np.max(np.abs(new - u))) / cfg.dt
        u = new
        if cfg.recenter_interval and step % cfg.recenter_interval == 0:
            g, sx, sy = recenter(f.copy(u=u), mode="resample")
            u = g.u
        if checkpoint:
            r = res_of(u)
            log.record(step, r, dudt, sx, sy)
            if callback is not None:
                callback(step, f.copy(u=u.copy()))
            if r <= cfg.tol:
                log.status = "converged"
    if log.status == "running":
        log.status = "max_steps"
    log.wall_time = time.perf_counter() - t0
    return f.copy(u=u), log


# ---------------------------------------------------------------------------
# recentering


def _zero_crossings_1d(v: np.ndarray, t: np.ndarray) -> np.ndarray:
    s = np.sign(v)
    k = np.nonzero((s[:-1] * s[1:] < 0) | ((s[:-1] == 0) & (s[1:] != 0)))[0]
    a, b = v[k], v[k + 1]
    return t[k] + (t[k + 1] - t[k]) * a / (a - b)


def find_center_x(u: Field2D) -> float:
    """Median over rows of the midpoint between the outermost zero crossings;
    0 offset when no row crosses zero in x (e.g. planar fields)."""
    x = u.x
    mids = []
    for row in u.u[1:-1]:
        z = _zero_crossings_1d(row, x)
        if z.size >= 2:
            mids.append(0.5 * (z[0] + z[-1]))
    return float(np.median(mids)) if mids else 0.0


def find_anchor_y(u: Field2D, x_c: float) -> float:
    """Lowest upward zero crossing of the column through ``x_c``."""
    col = u.interpolate(np.full(u.ny, x_c), u.y, order=1)
    s = np.sign(col)
    k = np.nonzero((s[:-1] < 0) & (s[1:] >= 0))[0]
    if k.size == 0:
        raise NoZeroCrossing("no upward zero crossing in the anchor column")
    k = k[0]
    a, b = col[k], col[k + 1]
    return float(u.y[k] + u.hy * a / (a - b))


def recenter(u: Field2D, mode: str = "coords") -> tuple[Field2D, float, float]:
    """Translate so that u(0, 0) = 0 and the zero level is centered in x.

    ``mode="coords"`` moves the grid origin (lossless); ``"resample"`` keeps
    the grid and interpolates the values (cubic, edge values extended).
    """
    sx = find_center_x(u)
    sy = find_anchor_y(u, sx)
    if mode == "coords":
        return u.copy(x_min=u.x_min - sx, y_min=u.y_min - sy), sx, sy
    if mode != "resample":
        raise ValueError("mode must be 'coords' or 'resample'")
    v = ndimage.shift(u.u, (-sy / u.hy, -sx / u.hx), order=3, mode="nearest")
    return u.copy(u=np.clip(v, -1.0, 1.0)), sx, sy


# ---------------------------------------------------------------------------
# initial guesses


def _front(P: Potential, h: float = 0.01):
    return heteroclinic(P, half_width=max(8.0, 8.0 / P.mu), h=h)


def _signed_distance(points: np.ndarray, x: np.ndarray, y: np.ndarray, above) -> np.ndarray:
    """Distance from grid nodes to a sampled curve, positive where ``above``."""
    X, Y = np.meshgrid(x, y)
    d, _ = cKDTree(points).query(np.column_stack([X.ravel(), Y.ravel()]))
    d = d.reshape(X.shape)
    return np.where(above(X, Y), d, -d)


def _with_images(fun, x: np.ndarray, lim_lo: float, lim_hi: float) -> np.ndarray:
    """Row values of ``fun`` plus its mirror images about both end points, so
    that the row is compatible with homogeneous Neumann walls."""
    a, b = x[0], x[-1]
    return fun(x) + (fun(2.0 * b - x) - lim_hi) + (fun(2.0 * a - x) - lim_lo)


def cosh_curve(c: float, mu: float, A_eff: float, x0: float = 0.0):
    """gamma0(x) = (c / (mu A)) (cosh(2 mu (x - x0)) - 1) and its inverse branch."""
    k = c / (mu * A_eff)
    gamma = lambda x: k * (np.cosh(2.0 * mu * (np.asarray(x) - x0)) - 1.0)
    half = lambda y: np.arccosh(1.0 + np.maximum(y, 0.0) / k) / (2.0 * mu)
    return gamma, half


def initial_guess(P: Potential, c: float, kind: str, grid: SolveConfig, **opts) -> Field2D:
    """Build a starting field on the grid of ``grid``.

    Options by kind:
      balanced-cosh: ``A_eff`` (required), ``x0``/``y0`` (tip of the ansatz,
        default the origin, so u0(0, 0) = 0), ``perturb`` (amplitude of an
        x-odd interior perturbation, default 0);
      v-shape: ``alpha`` (half-angle from the horizontal);
      two-layer-column: ``l`` (half-width of the column);
      single-layer: ``K1`` (layer position of the top row), ``y0``;
      periodic-bottom: ``alpha`` (amplitude of the bottom periodic row), ``y0``.
    """
    if kind not in GUESS_KINDS:
        raise ValueError(f"unknown guess kind {kind!r}")
    x, y = grid.grid()
    X, Y = np.meshgrid(x, y)
    hx, hy = grid.hx, grid.hy
    g = _front(P)

    if kind == "planar":
        if abs(c - g.speed) > 1e-6:
            raise ValueError(f"planar guess needs c = c0 = {g.speed}")
        u = np.repeat(g(y)[:, None], x.size, axis=1)
        u[0], u[-1] = -1.0, 1.0
    elif kind == "v-shape":
        if P.balanced:
            raise ValueError("v-shape guess needs an unbalanced potential")
        alpha = float(opts["alpha"])
        if not 0.0 < alpha < np.pi / 2:
            raise ValueError("alpha must lie in (0, pi/2)")
        if abs(c - g.speed / np.cos(alpha)) > 1e-6:
            raise ValueError(f"v-shape needs c = c0/cos(alpha) = {g.speed / np.cos(alpha)}")
        u = g(Y * np.cos(alpha) - np.abs(X) * np.sin(alpha))
        u[0], u[-1] = -1.0, 1.0
    else:
        if not P.balanced and kind in ("balanced-cosh", "two-layer-column", "single-layer"):
            raise ValueError(f"{kind} guess needs a balanced potential")
        if kind == "balanced-cosh":
            if "A_eff" not in opts:
                raise ValueError("balanced-cosh needs an A_eff estimate")
            A, x0 = float(opts["A_eff"]), float(opts.get("x0", 0.0))
            y0 = float(opts.get("y0", 0.0))
            gamma0, half0 = cosh_curve(c, P.mu, A, x0)
            gamma = lambda X: y0 + gamma0(X)
            half = lambda Y: half0(np.asarray(Y) - y0)
            top = y[-1] + 10.0
            xs = np.arange(-half(top), half(top) + 0.005, 0.005) + x0
            ys = np.arange(y0, top, 0.005)
            kk = half(ys)
            pts = np.concatenate([np.column_stack([xs, gamma(xs)]),
                                  np.column_stack([x0 + kk, ys]),
                                  np.column_stack([x0 - kk, ys])])
            d = _signed_distance(pts, x, y, lambda X, Y: Y > gamma(X))
            u = g(d)
            u[0] = -1.0
            l_top = float(half(y[-1]))
            phi = two_layer(P, x0 - l_top, x0 + l_top, front=g)
            u[-1] = _with_images(phi, x, -1.0, -1.0) if grid.boundary == "neumann" else phi(x)
            amp = float(opts.get("perturb", 0.0))
            if amp:
                bump = np.tanh(X - x0) * np.exp(-((Y - 0.25 * y[-1]) / (0.25 * (y[-1] - y[0]))) ** 2)
                u[1:-1] += (amp * bump * (1.0 - u * u))[1:-1]
        elif kind == "two-layer-column":
            l = float(opts.get("l", 3.0))
            phi = two_layer(P, -l, l, front=g)(x)
            u = np.minimum(phi[None, :], g(Y))
        elif kind == "single-layer":
            K1, y0 = float(opts.get("K1", 0.0)), float(opts.get("y0", 0.0))
            u = np.minimum(g(X - K1), g(Y - y0))
            top_row = lambda t: g(t - K1)
            u[-1] = _with_images(top_row, x, -1.0, 1.0) if grid.boundary == "neumann" else top_row(x)
            u[0] = -1.0
        else:  # periodic-bottom
            alpha, y0 = float(opts.get("alpha", 0.5)), float(opts.get("y0", 0.0))
            ga = periodic_profile(P, alpha)
            u = np.maximum(ga(X), g(Y - y0))
            u[0] = ga(x)
            u[-1] = 1.0
    u = np.clip(u, -1.0, 1.0)
    return Field2D(u, hx, hy, x[0], y[0], float(c), P)


# ---------------------------------------------------------------------------
# discrete planar front


def discrete_planar_front(P: Potential, y: np.ndarray, c0: float | None = None,
                          tol: float = 1e-13, max_iter: int = 30) -> tuple[np.ndarray, float]:
    """Steady state of the three-point discretization in y with u = -1, +1 at
    the ends, pinned at the node nearest y = 0, together with its discrete
    speed.  Newton from the continuous front."""
    from scipy.sparse.linalg import spsolve

    g = _front(P)
    c = g.speed if c0 is None else float(c0)
    h = float(y[1] - y[0])
    n = y.size
    u = g(y)
    u[0], u[-1] = -1.0, 1.0
    pin = int(np.argmin(np.abs(y)))
    free = np.array([j for j in range(1, n - 1) if j != pin])
    for _ in range(max_iter):
        um, uc, up = u[:-2], u[1:-1], u[2:]
        r = (up - 2 * uc + um) / h ** 2 + c * (up - um) / (2 * h) - P.dF(uc)
        # Jacobian w.r.t. u[1:-1] (tridiagonal) and c (last column)
        m = n - 2
        lo = np.full(m - 1, 1 / h ** 2 - c / (2 * h))
        hi = np.full(m - 1, 1 / h ** 2 + c / (2 * h))
        dg = -2 / h ** 2 - P.d2F(uc)
        J = sparse.diags([lo, dg, hi], [-1, 0, 1], format="lil")
        J = sparse.hstack([J, sparse.csr_matrix(((up - um) / (2 * h))[:, None])]).tocsc()
        cols = np.concatenate([free - 1, [m]])
        step = spsolve(J[:, cols].tocsc(), -r)
        u[free] += step[:-1]
        c += step[-1]
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise SolverError("discrete planar front: Newton did not converge")
    return u, float(c)


def planar_drift(P: Potential, cfg: SolveConfig, steps: int = 1000) -> dict:
    """Embed the discrete planar front in a 2D field and relax it.

    Returns the sup-norm change after ``steps`` steps (``drift``), the
    discrete speed ``c_h`` and its distance to the continuous ``c0``, and the
    steady residual of the continuous front g(y) sampled on the grid, which
    is the O(h^2) consistency error of the scheme.
    """
    x, y = cfg.grid()
    g, c_h = discrete_planar_front(P, y)
    c0 = _front(P).speed
    base = Field2D(np.repeat(g[:, None], x.size, axis=1), cfg.hx, cfg.hy, x[0], y[0], c_h, P)
    run = replace(cfg, max_steps=int(steps), tol=0.0, check_every=int(steps))
    out, log = relax(base, run)
    cont = initial_guess(P, c0, "planar", cfg)
    return {"drift": float(np.max(np.abs(out.u - base.u))), "steps": int(steps),
            "c_h": c_h, "c0": c0, "speed_defect": abs(c_h - c0),
            "continuous_residual": residual_norm(cont)["sup"], "hy": cfg.hy}
