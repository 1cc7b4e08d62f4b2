"""Radial eigenprofiles of the p-Laplacian and the power means built on them.

The central object is the decreasing radial profile Psi(r) solving

    -(p-1) |Psi'|^(p-2) Psi'' - (n-1)/r |Psi'|^(p-2) Psi' = Psi^(p-1),
    Psi(0) = 1,  Psi'(0) = 0,

integrated out to its first zero psi. The first Dirichlet eigenvalue of the
unit ball is then psi^p, and weighted power means of Psi over (0, psi) supply
the constants of the comparison machinery. For p = 2 everything collapses to
Bessel functions, which is what the tests check against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.special
from scipy.integrate import solve_ivp

from .errors import NumericError, ParameterError

#: Number of sample points stored on a profile grid (4096 intervals).
GRID_POINTS = 4097

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_BULK_PANELS = 32
_TAIL_PANELS = 60
#: Distance from the zero (relative to psi) below which the local Taylor
#: model replaces the ODE interpolant when evaluating log Psi.
_TAIL_MODEL_CUT = 1e-6


def omega_n(n: int) -> float:
    """Volume of the unit ball in R^n, pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu, vectorized over x."""
    if nu < 0:
        raise ParameterError(f"order must be >= 0, got {nu}")
    return scipy.special.jv(nu, x)


def bessel_first_zero(nu: float, tol: float = 1e-12) -> float:
    """First positive zero of J_nu by scanning for a bracket, then bisection."""
    if nu < 0:
        raise ParameterError(f"order must be >= 0, got {nu}")
    lo = max(nu, 0.5)
    flo = bessel_j(nu, lo)
    if flo <= 0.0:
        # The scan start is left of the first zero for every nu >= 0; a
        # non-positive value here means the bracket assumption broke down.
        raise NumericError(f"unexpected sign of J_{nu} at scan start {lo}")
    step = 0.5
    hi = lo + step
    for _ in range(10_000):
        fhi = bessel_j(nu, hi)
        if fhi <= 0.0:
            break
        lo, flo = hi, fhi
        hi += step
    else:
        raise NumericError(f"no sign change of J_{nu} found up to x = {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bessel_j(nu, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normalized_bessel_profile(n: int, r):
    """The p = 2 radial profile in closed form, normalized to 1 at r = 0.

    Equals Gamma(n/2) (2/r)^(n/2-1) J_(n/2-1)(r); for n = 2 this is J_0(r)
    and for n = 3 it is sin(r)/r.
    """
    r = np.asarray(r, dtype=float)
    nu = n / 2.0 - 1.0
    out = np.ones_like(r)
    nz = r != 0.0
    out[nz] = math.gamma(n / 2.0) * (2.0 / r[nz]) ** nu * bessel_j(nu, r[nz])
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RadialProfile:
    """Radial eigenprofile of the p-Laplacian on the ball, sampled to its zero.

    grid/values hold GRID_POINTS samples on [0, first_zero] with values[0] = 1
    and values[-1] = 0; the continuous solution stays available through
    ``value`` for quadrature.
    """

    p: float
    n: int
    grid: np.ndarray
    values: np.ndarray
    first_zero: float
    _dense: object = field(repr=False)
    _series_r0: float = field(repr=False)
    _slope_at_zero: float = field(repr=False)
    _caches: dict = field(default_factory=dict, repr=False)

    @property
    def series_coefficients(self) -> tuple[float, float, float]:
        """(kappa, c, c2) of the start expansion 1 - c r^kappa + c2 r^(2 kappa)."""
        p, n = self.p, self.n
        kappa = p / (p - 1.0)
        c = (p - 1.0) / p * n ** (-1.0 / (p - 1.0))
        c2 = c * c * n / (2.0 * (n + kappa))
        return kappa, c, c2

    def value(self, r):
        """Evaluate Psi at radii in [0, first_zero] (0 beyond the zero)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        kappa, c, c2 = self.series_coefficients
        near = r < self._series_r0
        out[near] = 1.0 - c * r[near] ** kappa + c2 * r[near] ** (2.0 * kappa)
        mid = (~near) & (r <= self.first_zero)
        if np.any(mid):
            out[mid] = self._dense(r[mid])[0]
        return out if out.shape != (1,) else float(out[0])

    # -- weighted power means ------------------------------------------------

    def _quadrature(self):
        """Fixed nodes for int_0^psi t^(n-1) Psi^s dt, uniform in s.

        Gauss-Legendre panels cover [0, psi/2]; dyadic panels then halve
        toward the zero so the (psi - t)^s endpoint factor is resolved for
        every s at once. Returns (base, logpsi) with base = w * t^(n-1).
        """
        cached = self._caches.get("quad")
        if cached is not None:
            return cached
        psi = self.first_zero
        edges = [(i * psi / (2 * _BULK_PANELS), (i + 1) * psi / (2 * _BULK_PANELS))
                 for i in range(_BULK_PANELS)]
        d = psi / 2.0
        for _ in range(_TAIL_PANELS):
            edges.append((psi - d, psi - d / 2.0))
            d /= 2.0
        ts, ws = [], []
        for a, b in edges:
            half = 0.5 * (b - a)
            ts.append(0.5 * (a + b) + half * _GL_NODES)
            ws.append(half * _GL_WEIGHTS)
        t = np.concatenate(ts)
        w = np.concatenate(ws)
        u = psi - t
        deep = u < _TAIL_MODEL_CUT * psi
        logpsi = np.empty_like(t)
        vals = self.value(t[~deep])
        logpsi[~deep] = np.log(vals)
        # Near the zero the interpolant loses relative accuracy, but
        # Psi(psi - u) = a u (1 + b u + O(u^2)) with coefficients fixed by the
        # ODE at the zero, so switch to that model.
        a = self._slope_at_zero
        b = (self.n - 1.0) / (2.0 * (self.p - 1.0) * psi)
        with np.errstate(divide="ignore"):
            logpsi[deep] = (math.log(a) + np.log(u[deep])
                            + np.log1p(b * u[deep]))
        base = w * t ** (self.n - 1)
        self._caches["quad"] = (base, logpsi)
        return base, logpsi

    def log_power_mean(self, s: float) -> float:
        """log f(s) with f(s) = (n/psi^n int_0^psi t^(n-1) Psi^s dt)^(1/s)."""
        if not 0.0 < s <= 50.0:
            raise ParameterError(f"exponent must lie in (0, 50], got {s}")
        cached = self._caches.setdefault("logf", {})
        if s in cached:
            return cached[s]
        base, logpsi = self._quadrature()
        integral = float(base @ np.exp(s * logpsi))
        out = (math.log(self.n) - self.n * math.log(self.first_zero)
               + math.log(integral)) / s
        cached[s] = out
        return out

    def power_mean(self, s: float) -> float:
        return math.exp(self.log_power_mean(s))


def _profile_rhs(p: float, n: int):
    """Flux form of the radial ODE: state (Psi, Q), Q = |Psi'|^(p-2) Psi'."""
    a = 1.0 / (p - 1.0)

    def rhs(r, y):
        psi, q = y
        dpsi = math.copysign(abs(q) ** a, q)
        dq = -math.copysign(abs(psi) ** (p - 1.0), psi) - (n - 1.0) / r * q
        return (dpsi, dq)

    return rhs


@lru_cache(maxsize=None)
def psi_profile(p: float, n: int) -> RadialProfile:
    """Shoot the radial profile from a series start to its first zero.

    Series start at r0 = 1e-4 (second-order expansion), DOP853 with
    rtol 1e-11, first zero located by a terminal event on the dense output.
    """
    p = float(p)
    if p < 2.0:
        raise ParameterError(f"p must be >= 2, got {p}")
    if n < 2:
        raise ParameterError(f"dimension must be >= 2, got {n}")
    kappa = p / (p - 1.0)
    c = (p - 1.0) / p * n ** (-1.0 / (p - 1.0))
    c2 = c * c * n / (2.0 * (n + kappa))
    q1 = (p - 1.0) * c / (n + kappa)
    r0 = 1e-4
    y0 = (1.0 - c * r0 ** kappa + c2 * r0 ** (2.0 * kappa),
          -r0 / n + q1 * r0 ** (1.0 + kappa))

    def crossing(r, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = -1
    sol = solve_ivp(_profile_rhs(p, n), (r0, 100.0), y0, method="DOP853",
                    rtol=1e-11, atol=1e-12, events=crossing, dense_output=True)
    if not sol.t_events[0].size:
        raise NumericError(f"no zero of the radial profile for p={p}, n={n} "
                           f"below r = 100")
    first_zero = float(sol.t_events[0][0])
    q_at_zero = float(sol.y_events[0][0][1])
    slope = -math.copysign(abs(q_at_zero) ** (1.0 / (p - 1.0)), q_at_zero)
    grid = np.linspace(0.0, first_zero, GRID_POINTS)
    profile = RadialProfile(p=p, n=n, grid=grid, values=np.empty(0),
                            first_zero=first_zero, _dense=sol.sol,
                            _series_r0=r0, _slope_at_zero=slope)
    values = profile.value(grid)
    values[0] = 1.0
    values[-1] = 0.0
    object.__setattr__(profile, "values", values)
    return profile


def lambda1_ball(p: float, n: int, radius: float = 1.0) -> float:
    """First Dirichlet p-Laplacian eigenvalue of a ball: psi^p / radius^p."""
    if radius <= 0.0:
        raise ParameterError(f"radius must be positive, got {radius}")
    return psi_profile(p, n).first_zero ** p * radius ** (-p)


def lambda1_sharp(p: float, n: int, area: float) -> float:
    """Dirichlet eigenvalue of the ball with the given measure."""
    if area <= 0.0:
        raise ParameterError(f"measure must be positive, got {area}")
    return psi_profile(p, n).first_zero ** p * (omega_n(n) / area) ** (p / n)


def f_power_mean(p: float, n: int, s: float) -> float:
    """Weighted power mean f(s) of the radial profile; nondecreasing in s."""
    return psi_profile(p, n).power_mean(s)


def sup_ratio(p: float, n: int, r: float, q: float) -> float:
    """(f(r)/f(q))^(p q r / (n (q - r))), evaluated in log space.

    Each value is <= 1 up to quadrature noise, and the supremum over
    0 < r < q equals 1 (approached as r, q -> 0 together).
    """
    if not 0.0 < r < q:
        raise ParameterError(f"need 0 < r < q, got r={r}, q={q}")
    profile = psi_profile(p, n)
    exponent = p * q * r / (n * (q - r))
    return math.exp(exponent * (profile.log_power_mean(r)
                                - profile.log_power_mean(q)))
