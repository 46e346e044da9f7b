"""Double-well potentials and the constants derived from them.

A potential is a smooth ``F`` with nondegenerate wells at -1 and +1, a single
interior critical point ``theta`` and the normalization ``F(-1) = 0``.  It is
*balanced* when ``F(1) = 0`` and unbalanced when ``F(1) > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

BALANCE_TOL = 1e-12
QUAD_TOL = 1e-12
# dense scan used to locate the convexity thresholds alpha-/alpha+
_SCAN_POINTS = 20001


class InvalidPotential(ValueError):
    """Raised when a potential cannot be built or characterized."""


@dataclass(frozen=True)
class Violation:
    condition: str
    location: float
    value: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    # ``pass`` is a keyword; keep both spellings available for records.
    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "violations": [
                {"condition": v.condition, "location": v.location, "value": v.value}
                for v in self.violations
            ],
        }


@dataclass(frozen=True, eq=False)
class Potential:
    """A double-well potential with lazily computed derived constants.

    ``F``, ``dF`` and ``d2F`` must accept scalars and numpy arrays.
    """

    F: Callable
    dF: Callable
    d2F: Callable
    kind: str = "custom"
    params: Mapping = field(default_factory=dict)

    # -- derived constants -------------------------------------------------
    @cached_property
    def F1(self) -> float:
        return float(self.F(1.0))

    @cached_property
    def balanced(self) -> bool:
        return abs(self.F1) <= BALANCE_TOL

    @cached_property
    def theta(self) -> float:
        # F' > 0 just right of -1 and < 0 just left of 1 for a valid double well
        lo, hi = -1.0 + 1e-9, 1.0 - 1e-9
        flo, fhi = self.dF(lo), self.dF(hi)
        if not (flo > 0 > fhi):
            raise InvalidPotential("F' does not bracket an interior zero on (-1, 1)")
        return float(optimize.brentq(self.dF, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))

    @cached_property
    def mu(self) -> float:
        return float(np.sqrt(self.d2F(1.0)))

    @cached_property
    def mu_minus(self) -> float:
        return float(np.sqrt(self.d2F(-1.0)))

    @cached_property
    def mu0(self) -> float:
        return 0.5 * min(float(self.d2F(-1.0)), float(self.d2F(1.0)))

    @cached_property
    def _alphas(self) -> tuple[float, float]:
        mu0, th = self.mu0, self.theta
        g = lambda s: self.d2F(s) - mu0

        def first_crossing(start: float, stop: float) -> float:
            s = np.linspace(start, stop, _SCAN_POINTS)
            vals = g(s)
            bad = np.nonzero(vals <= 0)[0]
            if bad.size == 0:
                raise InvalidPotential("F'' never drops to mu0 between a well and theta")
            k = bad[0]
            root = optimize.brentq(g, s[k - 1], s[k], xtol=1e-14)
            # step inside the region where F'' > mu0 holds strictly
            return float(root - np.sign(stop - start) * 1e-9)

        return first_crossing(-1.0, th), first_crossing(1.0, th)

    @property
    def alpha_minus(self) -> float:
        return self._alphas[0]

    @property
    def alpha_plus(self) -> float:
        return self._alphas[1]

    @cached_property
    def beta(self) -> float:
        return self.G(1.0)

    def G(self, s: float) -> float:
        """Integral of sqrt(2F) from -1 to ``s``."""
        s = float(s)
        if s <= -1.0:
            return 0.0
        integrand = lambda t: np.sqrt(2.0 * max(float(self.F(t)), 0.0))
        # subdivide at theta: the integrand has a kink-free max there but the
        # endpoints behave like |1 -+ t| and converge faster on short panels
        pts = [p for p in (self.theta,) if -1.0 < p < s]
        val, _ = integrate.quad(integrand, -1.0, s, points=pts or None,
                                epsabs=QUAD_TOL, epsrel=1e-13, limit=200)
        return float(val)

    def constants(self) -> dict:
        return {
            "theta": self.theta,
            "mu": self.mu,
            "mu_minus": self.mu_minus,
            "mu0": self.mu0,
            "alpha_minus": self.alpha_minus,
            "alpha_plus": self.alpha_plus,
        }

    def conjugate(self, alpha: float) -> float:
        """The point ``b`` in ``(-1, theta]`` with ``F(b) = F(alpha)``."""
        th = self.theta
        if alpha < th - 1e-14 or alpha >= 1.0:
            raise ValueError(f"alpha must lie in [theta, 1), got {alpha}")
        level = float(self.F(alpha))
        if abs(alpha - th) < 1e-14:
            return th
        f = lambda s: self.F(s) - level
        if f(-1.0) >= 0:
            raise InvalidPotential(f"no conjugate point for alpha={alpha}: F(-1) >= F(alpha)")
        return float(optimize.brentq(f, -1.0, th, xtol=1e-15, rtol=4 * np.finfo(float).eps))

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            **self.constants(),
            "beta": self.beta,
            "F1": self.F1,
            "balanced": self.balanced,
        }


def _quartic() -> Potential:
    return Potential(
        F=lambda u: 0.25 * (1.0 - u * u) ** 2,
        dF=lambda u: u * u * u - u,
        d2F=lambda u: 3.0 * u * u - 1.0,
        kind="quartic",
    )


def _tilted_quartic(a: float) -> Potential:
    if not 0.0 < a < 1.0:
        raise InvalidPotential(f"tilted-quartic needs a in (0, 1), got {a}")
    # antiderivative of (u - a)(u^2 - 1) shifted so that F(-1) = 0
    return Potential(
        F=lambda u: 0.25 * (1.0 - u * u) ** 2 - a * (u ** 3 / 3.0 - u) + 2.0 * a / 3.0,
        dF=lambda u: (u - a) * (u * u - 1.0),
        d2F=lambda u: 3.0 * u * u - 2.0 * a * u - 1.0,
        kind="tilted-quartic",
        params={"a": a},
    )


def _tabulated(u, f) -> Potential:
    u = np.asarray(u, dtype=float)
    f = np.asarray(f, dtype=float)
    if u.ndim != 1 or u.shape != f.shape or u.size < 8:
        raise InvalidPotential("tabulated potential needs two equal-length columns (>= 8 rows)")
    if np.any(np.diff(u) <= 0):
        raise InvalidPotential("tabulated u column must be strictly increasing")
    if u[0] > -1.0 or u[-1] < 1.0:
        raise InvalidPotential("tabulated u column must cover [-1, 1]")
    # wells are critical points: clamp the slope there when the table ends on them
    clamped = u[0] == -1.0 and u[-1] == 1.0
    spl = CubicSpline(u, f, bc_type=((1, 0.0), (1, 0.0)) if clamped else "not-a-knot")
    d1, d2 = spl.derivative(1), spl.derivative(2)
    wrap = lambda p: (lambda s: p(s) if np.ndim(s) else float(p(s)))
    return Potential(F=wrap(spl), dF=wrap(d1), d2F=wrap(d2), kind="tabulated",
                     params={"rows": int(u.size)})


def make_potential(kind: str, params: Mapping | None = None, **kw) -> Potential:
    """Build a potential by kind.

    Kinds: ``quartic``; ``tilted-quartic`` (param ``a`` in (0, 1));
    ``tabulated`` (params ``u`` and ``F`` as sample columns).
    """
    p = {**(params or {}), **kw}
    if kind == "quartic":
        pot = _quartic()
    elif kind in ("tilted-quartic", "tilted_quartic", "tilted"):
        if "a" not in p:
            raise InvalidPotential("tilted-quartic requires parameter 'a'")
        pot = _tilted_quartic(float(p["a"]))
    elif kind == "tabulated":
        if "u" not in p or "F" not in p:
            raise InvalidPotential("tabulated potential requires 'u' and 'F' columns")
        pot = _tabulated(p["u"], p["F"])
    else:
        raise InvalidPotential(f"unknown potential kind {kind!r}")
    # fail early on anything that cannot be characterized
    pot.constants()
    pot.beta
    return pot


def validate(P: Potential, tol: float = 1e-10, samples: int = 2000) -> ValidationReport:
    """Check the double-well conditions; never raises on a bad potential."""
    if samples < 100:
        raise ValueError("samples must be >= 100")
    out: list[Violation] = []

    def check(cond: str, ok: bool, loc: float, val: float):
        if not ok:
            out.append(Violation(cond, float(loc), float(val)))

    Fm1, dFm1, dF1 = float(P.F(-1.0)), float(P.dF(-1.0)), float(P.dF(1.0))
    check("F(-1)=0", abs(Fm1) <= tol, -1.0, Fm1)
    check("F'(-1)=0", abs(dFm1) <= tol, -1.0, dFm1)
    check("F'(1)=0", abs(dF1) <= tol, 1.0, dF1)
    d2m, d2p = float(P.d2F(-1.0)), float(P.d2F(1.0))
    check("F''(-1)>0", d2m > 0, -1.0, d2m)
    check("F''(1)>0", d2p > 0, 1.0, d2p)
    F1 = float(P.F(1.0))
    check("F(1)>=0", F1 >= -tol, 1.0, F1)

    try:
        th = P.theta
    except InvalidPotential:
        check("interior zero of F'", False, float("nan"), float("nan"))
        return ValidationReport(tuple(out))

    # open intervals: stay off the wells and theta by one sample spacing
    s = np.linspace(-1.0, 1.0, samples + 2)[1:-1]
    d = s[1] - s[0]
    left = s[(s < th - d)]
    right = s[(s > th + d)]
    v = P.dF(left)
    if np.any(v <= 0):
        k = int(np.argmin(v))
        check("F'>0 on (-1,theta)", False, left[k], v[k])
    v = P.dF(right)
    if np.any(v >= 0):
        k = int(np.argmax(v))
        check("F'<0 on (theta,1)", False, right[k], v[k])

    if d2m > 0 and d2p > 0:
        try:
            am, ap, mu0 = P.alpha_minus, P.alpha_plus, P.mu0
        except InvalidPotential as exc:
            check(f"convexity thresholds ({exc})", False, float("nan"), float("nan"))
        else:
            outer = np.concatenate([np.linspace(-1.0, am, samples), np.linspace(ap, 1.0, samples)])
            v = P.d2F(outer)
            if np.any(v <= mu0):
                k = int(np.argmin(v))
                check("F''>mu0 outside (alpha-,alpha+)", False, outer[k], v[k])
    return ValidationReport(tuple(out))


def beta_and_G(P: Potential, s: float) -> dict:
    if not -1.0 <= s <= 1.0:
        raise ValueError("s must lie in [-1, 1]")
    return {"beta": P.beta, "G_of_s": P.G(s)}


def constants(P: Potential) -> dict:
    return P.constants()
