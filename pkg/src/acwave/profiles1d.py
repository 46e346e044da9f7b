"""One-dimensional profiles: fronts, periodic orbits, the bounded orbit and
the two-layer family together with its interaction energy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicHermiteSpline

from .potentials import Potential

ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
QUAD_TOL = 1e-13
SHOOT_EPS = 1e-8
SHOOT_WIDTH = 1e-12


class ShootingError(RuntimeError):
    pass


class NoSuchProfile(ValueError):
    pass


class QuadratureError(RuntimeError):
    pass


@dataclass
class Profile1D:
    """A sampled 1D profile with a C^1 Hermite interpolant.

    Outside the sampled window heteroclinic and bounded profiles are
    continued by their linearized exponential tails; periodic profiles are
    wrapped by their period.
    """

    kind: str
    s: np.ndarray
    u: np.ndarray
    du: np.ndarray
    speed: float = 0.0
    period: float | None = None
    alpha: float | None = None
    turning: float | None = None  # conjugate point (periodic) or beta_* (bounded)
    K_star: float | None = None
    tail_rates: tuple[float, float] | None = None  # decay rates at s -> -inf, +inf
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._spl = CubicHermiteSpline(self.s, self.u, self.du)

    @property
    def h(self) -> float:
        return float(self.s[1] - self.s[0])

    def __call__(self, x, nu: int = 0):
        x = np.asarray(x, dtype=float)
        if self.kind == "periodic" and self.period:
            L = self.period
            x = (x - self.s[0]) % L + self.s[0]
            return self._spl(x, nu)
        lo, hi = self.s[0], self.s[-1]
        out = self._spl(np.clip(x, lo, hi), nu)
        if self.tail_rates is None:
            return out
        # exponential continuation towards the limiting well
        for edge, limit, rate, mask in (
            (lo, self.u[0], self.tail_rates[0], x < lo),
            (hi, self.u[-1], self.tail_rates[1], x > hi),
        ):
            if not np.any(mask):
                continue
            target = np.sign(limit)
            amp = limit - target
            d = np.abs(x[mask] - edge)
            e = np.exp(-rate * d)
            if nu == 0:
                out[mask] = target + amp * e
            elif nu == 1:
                out[mask] = amp * e * rate * (1.0 if x[mask][0] < lo else -1.0)
            else:
                out[mask] = amp * e * rate ** nu
        return out

    def to_csv(self, path) -> None:
        from .io import write_csv
        write_csv(path, ["s", "u", "u_prime"], np.column_stack([self.s, self.u, self.du]))


# ---------------------------------------------------------------------------
# helpers


def _grid(half_width: float, h: float) -> np.ndarray:
    n = int(round(half_width / h))
    return h * np.arange(-n, n + 1)


def _ivp(fun, span, y0, **kw):
    sol = integrate.solve_ivp(fun, span, y0, method="DOP853", rtol=ODE_RTOL,
                              atol=ODE_ATOL, dense_output=True, **kw)
    if sol.status < 0:
        raise QuadratureError(sol.message)
    return sol


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _gap(P: Potential, s, level: float, top: float):
    """F(s) - F(top) as the integral of F' over [top, s].

    Integrating F' avoids the cancellation in F(s) - F(top) near the turning
    point; ``level`` (= F(top)) is only used as a fallback sign check.
    """
    s = np.asarray(s, dtype=float)
    half = 0.5 * (s - top)
    nodes = top + half[..., None] * (1.0 + _GL_X)
    d = half * np.sum(_GL_W * P.dF(nodes), axis=-1)
    return np.maximum(d, 1e-300)


def turning_quad(P: Potential, a: float, b: float, level: float, top: str,
                 power: float = -0.5) -> float:
    """Integral of (2(F(s) - level))**power over [a, b].

    The turning point (where F = level) sits at ``a`` or ``b`` (``top``);
    substituting s = endpoint -+ t^2 removes the square-root singularity.
    """
    if b <= a:
        return 0.0
    end = b if top == "b" else a
    sign = -1.0 if top == "b" else 1.0
    T = np.sqrt(b - a)

    def f(t):
        s = end + sign * t * t
        return 2.0 * t * (2.0 * _gap(P, s, level, end)) ** power

    val, err = integrate.quad(f, 0.0, T, epsabs=QUAD_TOL, epsrel=1e-12, limit=400)
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature did not converge (err={err:.2e})")
    return float(val)


# ---------------------------------------------------------------------------
# heteroclinic front


def _shoot(P: Potential, c: float, s_max: float = 200.0):
    """Launch on the unstable manifold of (-1, 0); classify the orbit.

    Returns +1 for overshoot (crosses u = 1), -1 for undershoot (u' = 0
    below 1) and the solution object.
    """
    lam = 0.5 * (-c + np.sqrt(c * c + 4.0 * P.d2F(-1.0)))
    y0 = [-1.0 + SHOOT_EPS, SHOOT_EPS * lam]
    rhs = lambda s, y: [y[1], P.dF(y[0]) - c * y[1]]
    over = lambda s, y: y[0] - 1.0
    over.terminal, over.direction = True, 1
    under = lambda s, y: y[1]
    under.terminal, under.direction = True, -1
    sol = integrate.solve_ivp(rhs, (0.0, s_max), y0, method="DOP853", rtol=ODE_RTOL,
                              atol=ODE_ATOL, events=(over, under), dense_output=True)
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size:
        return -1, sol
    raise ShootingError(f"orbit neither overshot nor turned back for c={c}")


def front_speed(P: Potential) -> float:
    """Speed c0 of the 1D front by bisection on the shooting classification."""
    if P.balanced:
        return 0.0
    lo, hi = 0.0, 1.0
    if _shoot(P, lo)[0] != 1:
        raise ShootingError("c = 0 does not overshoot; is F(1) > F(-1)?")
    for _ in range(60):
        if _shoot(P, hi)[0] == -1:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ShootingError("could not bracket the front speed")
    while hi - lo > SHOOT_WIDTH:
        mid = 0.5 * (lo + hi)
        if _shoot(P, mid)[0] == 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _tail_rates(P: Potential, c: float) -> tuple[float, float]:
    # g'' + c g' = F''(+-1)(g -+ 1): decay rates of the linearized tails
    left = 0.5 * (-c + np.sqrt(c * c + 4.0 * P.d2F(-1.0)))
    right = 0.5 * (c + np.sqrt(c * c + 4.0 * P.d2F(1.0)))
    return float(left), float(right)


def heteroclinic(P: Potential, half_width: float = 8.0, h: float = 0.01) -> Profile1D:
    """The monotone front g with g(0) = 0 and its speed c0."""
    if half_width < 8.0 / P.mu:
        raise ValueError(f"half_width must be >= 8/mu = {8.0 / P.mu:.3f}")
    if h > 0.05:
        raise ValueError("h must be <= 0.05")
    s = _grid(half_width, h)
    if P.balanced:
        # invert x(u) = int_0^u ds / sqrt(2F): u' = sqrt(2F(u)) from u(0) = 0
        rhs = lambda t, y: [np.sqrt(2.0 * max(P.F(y[0]), 0.0))]
        up = _ivp(rhs, (0.0, s[-1]), [0.0])
        dn = _ivp(rhs, (0.0, s[0]), [0.0])
        u = np.where(s >= 0, up.sol(np.maximum(s, 0.0))[0], dn.sol(np.minimum(s, 0.0))[0])
        u[s == 0] = 0.0
        du = np.sqrt(2.0 * np.maximum(P.F(u), 0.0))
        c0 = 0.0
    else:
        c0 = front_speed(P)
        u, du = _front_from_manifolds(P, c0, s)
    return Profile1D("heteroclinic", s, u, du, speed=c0, tail_rates=_tail_rates(P, c0))


def _front_from_manifolds(P: Potential, c: float, s: np.ndarray):
    """Sample the front by joining the two saddle manifolds at u = 0."""
    rhs = lambda t, y: [y[1], P.dF(y[0]) - c * y[1]]
    hit0 = lambda t, y: y[0]
    hit0.terminal = True
    lam_m = 0.5 * (-c + np.sqrt(c * c + 4.0 * P.d2F(-1.0)))
    lam_p = 0.5 * (-c - np.sqrt(c * c + 4.0 * P.d2F(1.0)))  # stable at +1
    eps = SHOOT_EPS
    left = _ivp(rhs, (0.0, 500.0), [-1.0 + eps, eps * lam_m], events=hit0)
    right = _ivp(rhs, (0.0, -500.0), [1.0 - eps, -eps * lam_p], events=hit0)
    if not (left.t_events[0].size and right.t_events[0].size):
        raise ShootingError("saddle manifolds did not reach u = 0")
    tl, tr = left.t_events[0][0], right.t_events[0][0]
    mismatch = abs(left.y_events[0][0][1] - right.y_events[0][0][1])
    if mismatch > 1e-6:
        raise ShootingError(f"manifolds do not join at u=0 (slope mismatch {mismatch:.2e})")
    u = np.empty_like(s)
    du = np.empty_like(s)
    # orbit time t relates to s by t = t_zero + s; before the launch point the
    # manifold is its linear tail
    for mask, sol, t0, lam, well in ((s <= 0, left, tl, lam_m, -1.0),
                                     (s > 0, right, tr, lam_p, 1.0)):
        t = t0 + s[mask]
        lin = (t < 0) if well < 0 else (t > 0)
        vals = np.empty((2, t.size))
        if np.any(~lin):
            vals[:, ~lin] = sol.sol(t[~lin])
        e = eps * np.exp(lam * t[lin])
        vals[0, lin] = well - well * e
        vals[1, lin] = -well * lam * e
        u[mask], du[mask] = vals
    u[s == 0] = 0.0
    return u, du


# ---------------------------------------------------------------------------
# periodic and bounded stationary profiles


def period(P: Potential, alpha: float) -> float:
    th = P.theta
    if abs(alpha - th) < 1e-14:
        return 2.0 * np.pi / np.sqrt(-P.d2F(th))
    b = P.conjugate(alpha)
    level = float(P.F(alpha))
    mid = th
    # both ends are turning points; split at theta and regularize each end
    half = turning_quad(P, b, mid, level, top="a") + turning_quad(P, mid, alpha, level, top="b")
    return 2.0 * half


def periodic_profile(P: Potential, alpha: float, h: float = 0.01) -> Profile1D:
    """Stationary periodic orbit with g(0) = alpha, g'(0) = 0."""
    if not (P.theta - 1e-14 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [theta, 1); theta = {P.theta}")
    L = period(P, alpha)
    if not np.isfinite(L) or L > 1e4:
        raise QuadratureError(f"period quadrature failed for alpha={alpha}")
    n = max(int(np.ceil(L / h)), 16)
    s = np.linspace(-L / 2, L / 2, n + 1)
    if abs(alpha - P.theta) < 1e-14:
        u = np.full_like(s, P.theta)
        du = np.zeros_like(s)
        b = P.theta
    else:
        b = P.conjugate(alpha)
        rhs = lambda t, y: [y[1], P.dF(y[0])]
        sol = _ivp(rhs, (0.0, L / 2), [alpha, 0.0])
        vals = sol.sol(np.abs(s))
        u = vals[0]
        du = np.sign(s) * vals[1]
    return Profile1D("periodic", s, u, du, period=L, alpha=alpha, turning=b)


def bounded_gstar(P: Potential, half_width: float = 12.0, h: float = 0.01) -> Profile1D:
    """The even orbit with g'(0) = 0, g(0) = beta_* < 0 and g -> 1 at both ends."""
    if P.balanced:
        raise NoSuchProfile("the bounded orbit g_* exists only for unbalanced F (F(1) > 0)")
    F1 = P.F1
    f = lambda x: P.F(x) - F1
    bstar = float(optimize.brentq(f, -1.0, P.theta, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    K = turning_quad(P, bstar, 0.0, F1, top="a")
    # second-order form away from the turning point, first-order (stable
    # towards the saddle at 1) afterwards
    s1 = min(1.0, 0.5 * K)
    rhs2 = lambda t, y: [y[1], P.dF(y[0])]
    near = _ivp(rhs2, (0.0, s1), [bstar, 0.0])
    u1 = near.sol(s1)[0]
    rhs1 = lambda t, y: [np.sqrt(2.0 * max(P.F(y[0]) - F1, 0.0))]
    far = _ivp(rhs1, (s1, half_width), [u1])
    s = _grid(half_width, h)
    a = np.abs(s)
    u = np.where(a <= s1, near.sol(np.minimum(a, s1))[0], far.sol(np.maximum(a, s1))[0])
    du = np.sign(s) * np.sqrt(2.0 * np.maximum(P.F(u) - F1, 0.0))
    du[a <= s1] = np.sign(s[a <= s1]) * near.sol(a[a <= s1])[1]
    rate = float(np.sqrt(P.d2F(1.0)))
    prof = Profile1D("bounded-star", s, u, du, turning=bstar, K_star=K,
                     tail_rates=(rate, rate))
    return prof


# ---------------------------------------------------------------------------
# two-layer profiles


def half_width_of(P: Potential, m: float) -> float:
    """l(m) = int_0^m ds / sqrt(2(F(s) - F(m)))."""
    return turning_quad(P, 0.0, m, float(P.F(m)), top="b")


def inner_energy(P: Potential, m: float, l: float | None = None) -> float:
    """E(l) = 2 int_0^m sqrt(2(F - F(m))) ds + 2 l F(m)."""
    if l is None:
        l = half_width_of(P, m)
    Fm = float(P.F(m))
    return 2.0 * turning_quad(P, 0.0, m, Fm, top="b", power=0.5) + 2.0 * l * Fm


def hump_height(P: Potential, l: float) -> float:
    """Solve l(m) = l for the midpoint maximum m in (0, 1)."""
    # eta = -log(1 - m) keeps the root well conditioned as m -> 1
    g = lambda eta: half_width_of(P, 1.0 - np.exp(-eta)) - l
    lo = 1e-3
    if g(lo) >= 0:
        raise NoSuchProfile(f"half-width l={l} too small for a positive hump")
    hi = 1.0
    while g(hi) < 0:
        hi *= 2.0
        if hi > 40:
            raise NoSuchProfile(f"could not bracket the hump height for l={l}")
    eta = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-15)
    return float(1.0 - np.exp(-eta))


@dataclass
class TwoLayerProfile:
    l1: float
    l2: float
    m: float
    E: float
    E_l: float
    front: Profile1D
    inner: CubicHermiteSpline
    x: np.ndarray
    phi: np.ndarray
    phi_x: np.ndarray

    @property
    def l(self) -> float:
        return 0.5 * (self.l2 - self.l1)

    def __call__(self, x, nu: int = 0):
        x = np.asarray(x, dtype=float)
        c = 0.5 * (self.l1 + self.l2)
        out = np.empty_like(x)
        # the outer branches own the zeros so that phi(l1) = phi(l2) = 0 exactly
        left, right = x <= self.l1, x >= self.l2
        mid = ~(left | right)
        out[left] = self.front(x[left] - self.l1, nu)
        out[right] = self.front(self.l2 - x[right], nu) * (-1.0) ** nu
        z = x[mid] - c
        out[mid] = self.inner(np.abs(z), nu) * (np.sign(z) ** nu if nu else 1.0)
        return out


def two_layer(P: Potential, l1: float, l2: float, h: float = 0.01,
              margin: float = 8.0, front: Profile1D | None = None) -> TwoLayerProfile:
    """Two-transition profile with zeros at l1 < l2 and -1 at both ends."""
    if not P.balanced:
        raise ValueError("two-layer profiles are defined for balanced potentials")
    l = 0.5 * (l2 - l1)
    if l < 1.0:
        raise ValueError("need (l2 - l1)/2 >= 1")
    m = hump_height(P, l)
    E = inner_energy(P, m, l)
    if front is None:
        front = heteroclinic(P, half_width=max(margin, 8.0 / P.mu), h=h)
    rhs = lambda t, y: [y[1], P.dF(y[0])]
    sol = _ivp(rhs, (0.0, l), [m, 0.0])
    zi = np.linspace(0.0, l, max(int(np.ceil(l / h)), 8) + 1)
    vi = sol.sol(zi)
    inner = CubicHermiteSpline(zi, vi[0], vi[1])
    prof = TwoLayerProfile(l1, l2, m, E, 2.0 * float(P.F(m)), front, inner,
                           np.empty(0), np.empty(0), np.empty(0))
    n = int(round((l2 - l1 + 2 * margin) / h))
    x = np.linspace(l1 - margin, l2 + margin, n + 1)
    prof.x, prof.phi, prof.phi_x = x, prof(x), prof(x, 1)
    return prof


@dataclass
class EnergyCurve:
    l: np.ndarray
    m: np.ndarray
    E: np.ndarray
    E_l: np.ndarray
    rate: float
    A_eff: float
    A1: float
    beta: float
    mu: float

    def summary(self) -> dict:
        return {"A_eff": self.A_eff, "rate": self.rate, "A1": self.A1, "beta": self.beta}

    def to_csv(self, path) -> None:
        from .io import write_csv
        write_csv(path, ["l", "m", "E", "E_l"], np.column_stack([self.l, self.m, self.E, self.E_l]))


def energy_curve(P: Potential, l_min: float = 3.0, l_max: float = 6.0, n: int = 16) -> EnergyCurve:
    """Tabulate E(l), E_l and fit the exponential interaction law.

    The fitted ``rate`` is a free log-linear slope; ``A_eff`` is the
    intercept with the slope pinned at 2 mu in E_l = 2 beta A_eff exp(-2 mu l).
    With this normalization a single layer obeys c l' + l'' = A_eff exp(-2 mu l),
    which is what the relaxed 2D fields show.
    """
    if not P.balanced:
        raise ValueError("energy curve requires a balanced potential")
    if not (2.0 <= l_min < l_max) or n < 8:
        raise ValueError("need 2 <= l_min < l_max and n >= 8")
    ls = np.linspace(l_min, l_max, n)
    ms = np.array([hump_height(P, l) for l in ls])
    Es = np.array([inner_energy(P, m, l) for m, l in zip(ms, ls)])
    El = 2.0 * P.F(ms)
    ok = El > 0
    if ok.sum() < 3:
        raise ValueError("degenerate fit: fewer than 3 usable points")
    beta, mu = P.beta, P.mu
    y = np.log(El[ok] / (2.0 * beta))
    slope, _ = np.polyfit(ls[ok], y, 1)
    A_eff = float(np.exp(np.mean(y + 2.0 * mu * ls[ok])))
    A1 = float(np.mean(ls + np.log1p(-ms) / mu))
    return EnergyCurve(ls, ms, Es, El, float(-slope), A_eff, A1, beta, mu)


def energy_slope_check(P: Potential, ls=(2.0, 3.0, 4.0), step: float = 1e-3) -> list[dict]:
    """Central differences of E(l) against E_l = 2F(m) at each l."""
    out = []
    for l in ls:
        Ep = inner_energy(P, hump_height(P, l + step), l + step)
        Em = inner_energy(P, hump_height(P, l - step), l - step)
        fd = (Ep - Em) / (2.0 * step)
        El = 2.0 * float(P.F(hump_height(P, l)))
        out.append({"l": float(l), "fd": fd, "E_l": El, "rel_error": abs(fd - El) / El})
    return out
