"""First eigenvalue of a weighted 1-D problem singular at the left end.

sigma1(0, A) minimizes int |phi'|^gamma ds / int |phi|^gamma s^(-beta) ds
over phi with phi(0) = 0, a zero-flux right end, and 0 < beta < gamma.
The grid is graded cubically toward 0 so the s^(-beta) weight is resolved.
For gamma = 2 the discrete problem is a generalized tridiagonal
eigenproblem solved by the same inverse iteration as the FEM module; for
other gamma the Rayleigh quotient is minimized by preconditioned
projected gradient descent with an Armijo line search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu

from .errors import NumericError, ParameterError
from .fem import _inverse_iteration
from .special import lambda1_ball

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_QUOTIENT_TOL = 1e-10
_MAX_STEPS = 50_000
_HARDY_SLACK = 1e-9


@dataclass(frozen=True)
class SturmProblem:
    """Quotient data: exponent gamma, weight power beta, interval length."""

    gamma: float
    beta: float
    length: float
    n_cells: int = 4096

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ParameterError("gamma must exceed 1")
        if not 0.0 < self.beta < self.gamma:
            raise ParameterError("beta must lie in (0, gamma)")
        if not self.length > 0.0:
            raise ParameterError("length must be positive")
        if self.n_cells < 4:
            raise ParameterError("need at least 4 cells")

    @property
    def hardy_lower_bound(self) -> float:
        g, b = self.gamma, self.beta
        return self.length ** (b - g) * (g - 1.0) ** g / g ** g


@dataclass(frozen=True)
class SturmSolution:
    sigma: float
    grid: np.ndarray
    minimizer: np.ndarray
    hardy_lower_bound: float
    iterations: int


def _graded_grid(length: float, n_cells: int) -> np.ndarray:
    return length * (np.arange(n_cells + 1) / n_cells) ** 3


def _moment(lo: np.ndarray, hi: np.ndarray, e: float) -> np.ndarray:
    """int s^(e-1) ds over [lo, hi] for positive lo, stable as e -> 0."""
    if abs(e) < 1e-12:
        return np.log(hi / lo)
    return lo ** e * np.expm1(e * np.log1p((hi - lo) / lo)) / e


def _solve_linear(problem: SturmProblem) -> SturmSolution:
    s = _graded_grid(problem.length, problem.n_cells)
    beta = problem.beta
    n = problem.n_cells
    h = np.diff(s)

    # stiffness over nodes 1..n (node 0 constrained to zero)
    inv = 1.0 / h
    main = inv.copy()
    main[:-1] += inv[1:]
    K = sparse.diags([main, -inv[1:], -inv[1:]], [0, 1, -1],
                     format="csr")

    # weighted mass entries from exact cell moments of s^(-beta)
    lo, hi = s[1:-1], s[2:]
    m0 = _moment(lo, hi, 1.0 - beta)
    m1 = _moment(lo, hi, 2.0 - beta)
    m2 = _moment(lo, hi, 3.0 - beta)
    hh = h[1:] ** 2
    d_left = (hi * hi * m0 - 2.0 * hi * m1 + m2) / hh
    d_right = (m2 - 2.0 * lo * m1 + lo * lo * m0) / hh
    off = (-hi * lo * m0 + (hi + lo) * m1 - m2) / hh
    diag = np.zeros(n)
    diag[0] = s[1] ** (1.0 - beta) / (3.0 - beta)
    diag[:-1] += d_left
    diag[1:] += d_right
    M = sparse.diags([diag, off, off], [0, 1, -1], format="csr")

    pair = _inverse_iteration(K, M, np.arange(n), "dirichlet", 0.0)
    phi = np.concatenate([[0.0], pair.vector])
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    return SturmSolution(sigma=pair.value, grid=s, minimizer=phi,
                         hardy_lower_bound=problem.hardy_lower_bound,
                         iterations=pair.iterations)


def _solve_gradient(problem: SturmProblem) -> SturmSolution:
    s = _graded_grid(problem.length, problem.n_cells)
    gamma, beta = problem.gamma, problem.beta
    h = np.diff(s)
    h_pow = h ** (1.0 - gamma)

    # per-cell quadrature of the weight against linear shape functions;
    # the first cell has the closed form |phi_1|^gamma s_1^(1-beta)/(gamma-beta+1)
    mid = 0.5 * (s[1:-1] + s[2:])
    half = 0.5 * np.diff(s[1:])
    sg = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    wq = (half[:, None] * _GL_WEIGHTS[None, :]) * sg ** (-beta)
    xi = (sg - s[1:-1, None]) / np.diff(s[1:])[:, None]
    first_w = s[1] ** (1.0 - beta) / (gamma - beta + 1.0)

    def odd_power(x, e):
        return np.sign(x) * np.abs(x) ** e

    def energy_parts(phi):
        d = np.diff(phi, prepend=0.0)
        e_val = float(np.sum(np.abs(d) ** gamma * h_pow))
        vals = phi[:-1, None] * (1.0 - xi) + phi[1:, None] * xi
        f_val = float(np.sum(wq * np.abs(vals) ** gamma)) \
            + first_w * abs(phi[0]) ** gamma
        return e_val, f_val, d, vals

    def gradients(d, vals, phi0):
        flux = odd_power(d, gamma - 1.0) * h_pow
        g_e = gamma * (flux - np.concatenate([flux[1:], [0.0]]))
        pw = wq * odd_power(vals, gamma - 1.0)
        g_f = np.zeros(problem.n_cells)
        g_f[:-1] = gamma * np.sum(pw * (1.0 - xi), axis=1)
        g_f[1:] += gamma * np.sum(pw * xi, axis=1)
        g_f[0] += gamma * first_w * odd_power(phi0, gamma - 1.0)
        return g_e, g_f

    # preconditioner: the gamma = 2 stiffness
    inv = 1.0 / h
    main = inv.copy()
    main[:-1] += inv[1:]
    K2 = sparse.diags([main, -inv[1:], -inv[1:]], [0, 1, -1],
                      format="csc")
    lu = splu(K2)

    def finish(phi, quotient, iteration):
        full = np.concatenate([[0.0], phi])
        if full[np.argmax(np.abs(full))] < 0:
            full = -full
        return SturmSolution(sigma=quotient, grid=s, minimizer=full,
                             hardy_lower_bound=problem.hardy_lower_bound,
                             iterations=iteration)

    phi = s[1:].copy()
    e_val, f_val, d, vals = energy_parts(phi)
    phi /= f_val ** (1.0 / gamma)
    e_val, f_val, d, vals = energy_parts(phi)
    quotient = e_val / f_val
    step = 1.0
    change = math.inf
    for iteration in range(1, _MAX_STEPS + 1):
        if change <= _QUOTIENT_TOL * quotient:
            return finish(phi, quotient, iteration)
        g_e, g_f = gradients(d, vals, phi[0])
        grad = (g_e - quotient * g_f) / f_val
        direction = lu.solve(grad)
        slope = float(grad @ direction)
        accepted = False
        if slope > 0.0:
            while step > 1e-14:
                cand = phi - step * direction
                e_c, f_c, d_c, vals_c = energy_parts(cand)
                if f_c > 0.0 and e_c / f_c <= quotient - 1e-4 * step * slope:
                    accepted = True
                    break
                step *= 0.5
        if not accepted:
            # descent exhausted at floating point resolution; only accept
            # if the quotient had already stabilized
            if change <= 1e-6 * quotient:
                return finish(phi, quotient, iteration)
            raise NumericError(
                "quotient minimization stalled at "
                f"{quotient!r} after {iteration} steps")
        new_quotient = e_c / f_c
        change = abs(quotient - new_quotient)
        norm = f_c ** (1.0 / gamma)
        phi = cand / norm
        e_val, f_val = new_quotient, 1.0
        d, vals = d_c / norm, vals_c / norm
        quotient = new_quotient
        step *= 1.3
    raise NumericError(
        f"quotient minimization did not settle within {_MAX_STEPS} steps: "
        f"last value {quotient!r}")


def solve(problem: SturmProblem) -> SturmSolution:
    """Minimize the quotient; checks the scale-invariant lower bound."""
    if problem.gamma == 2.0:
        solution = _solve_linear(problem)
    else:
        solution = _solve_gradient(problem)
    if solution.sigma < problem.hardy_lower_bound * (1.0 - _HARDY_SLACK):
        raise NumericError(
            "computed eigenvalue fell below the scale-invariant lower bound: "
            f"{solution.sigma!r} < {problem.hardy_lower_bound!r}")
    return solution


def sigma1(problem: SturmProblem) -> float:
    return solve(problem).sigma


@dataclass(frozen=True)
class ConsistencyReport:
    L: float
    sigma_target: float
    sigma_computed: float
    rel_err: float


def comparison_ball_measure(p: float, n: int, K: float, mu1: float) -> float:
    """Measure of the ball whose first Dirichlet eigenvalue matches
    (n omega_n^{1/n}/K)^p mu1."""
    if K <= 0 or mu1 <= 0:
        raise ParameterError("K and mu1 must be positive")
    return (K / n) ** n * (lambda1_ball(p, n) / mu1) ** (n / p)


def sturm_consistency(p: float, n: int, K: float, mu1: float,
                      n_cells: int = 4096) -> ConsistencyReport:
    """Round trip: the interval eigenvalue on (0, L) must reproduce
    mu1/K^p once raised back to the p-1 power."""
    if p < 2:
        raise ParameterError("p must be at least 2")
    L = comparison_ball_measure(p, n, K, mu1)
    gamma = p / (p - 1.0)
    beta = gamma * (1.0 - 1.0 / n)
    sigma = sigma1(SturmProblem(gamma=gamma, beta=beta, length=L,
                                n_cells=n_cells))
    computed = sigma ** (p - 1.0)
    target = mu1 / K ** p
    return ConsistencyReport(L=L, sigma_target=target,
                             sigma_computed=computed,
                             rel_err=abs(computed - target) / target)


@dataclass(frozen=True)
class LBoundReport:
    L: float
    s_tilde: float
    margins: tuple
    min_margin: float
    ok: bool


def check_L_bound(p: float, n: int, K: float, mu1: float,
                  s_tilde: float, area: float,
                  tol: float = 1e-3) -> LBoundReport:
    """Check L <= min(s_tilde, area - s_tilde, area/2), margins in units
    of the domain measure."""
    if not 0.0 < s_tilde < area:
        raise ParameterError("s_tilde must lie strictly inside (0, area)")
    L = comparison_ball_measure(p, n, K, mu1)
    margins = ((s_tilde - L) / area, (area - s_tilde - L) / area,
               (0.5 * area - L) / area)
    min_margin = min(margins)
    return LBoundReport(L=L, s_tilde=s_tilde, margins=margins,
                        min_margin=min_margin, ok=bool(min_margin >= -tol))
