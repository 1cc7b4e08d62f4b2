"""Decreasing rearrangement of piecewise-linear mesh functions.

The distribution function of a P1 function is piecewise quadratic in the
level t: slicing a triangle's linear interpolant at level t cuts off a
corner whose area is quadratic in t. Those per-element quadratics are
assembled exactly over the sorted nodal values, so Cavalieri's principle
and the L^q identities hold to roundoff rather than sampling error.

Pieces are stored in a locally anchored form (value, slope, curvature at
the left break): near-degenerate elements produce curvatures of order
1/gap^2 that cancel globally, and a monomial representation would lose
them to rounding. Accumulations that mix those scales use compensated
sums. Exactly flat elements contribute atoms of the level measure, which
become plateaus of the rearranged profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .geometry import Mesh, element_areas
from .special import omega_n, psi_profile

_MEASURE_GRID = 4096
CHECK_TOL = 1e-3


def _compensated_cumsum(x: np.ndarray) -> np.ndarray:
    """Running sums with Neumaier compensation.

    Needed where huge terms enter and later cancel: a plain cumsum would
    leave an O(eps * max|term|) residue on everything downstream.
    """
    out = np.empty(len(x))
    total = 0.0
    comp = 0.0
    for i, v in enumerate(x):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out


def _power_diff(lo: np.ndarray, hi: np.ndarray, e: float) -> np.ndarray:
    """hi**e - lo**e for 0 <= lo <= hi, accurate when hi - lo is tiny."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    out = np.empty(lo.shape)
    small = lo <= 0.0
    out[small] = hi[small] ** e
    big = ~small
    out[big] = lo[big] ** e * np.expm1(e * np.log1p((hi[big] - lo[big])
                                                    / lo[big]))
    return out


@dataclass(frozen=True)
class _PieceData:
    """Distribution function between consecutive nodal values.

    m(t) = values[k] + slopes[k] (t - breaks[k]) + curvatures[k]
    (t - breaks[k])^2 on [breaks[k], breaks[k+1]); atoms[k] is the jump
    of m down onto values[k] at breaks[k] (mass of flat elements).
    """

    breaks: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    curvatures: np.ndarray
    atoms: np.ndarray


def _snap_breaks(unique_vals: np.ndarray) -> np.ndarray:
    """Merge breaks closer than a few ulp of the value range.

    Symmetric meshes produce nodal values that agree up to 1-2 ulp across
    copies of a node orbit; left as distinct breaks they create pieces of
    width ~1e-16 whose curvature 1/gap^2 overflows what compensated
    accumulation can cancel. Snapping them to one representative turns
    those elements into exact ties, which the assembly handles discretely.
    """
    if len(unique_vals) < 2:
        return unique_vals
    scale = max(abs(unique_vals[0]), abs(unique_vals[-1]))
    snap = 64.0 * np.finfo(float).eps * scale
    keep = np.empty(len(unique_vals), dtype=bool)
    keep[0] = True
    rep = unique_vals[0]
    for i in range(1, len(unique_vals)):
        if unique_vals[i] - rep > snap:
            keep[i] = True
            rep = unique_vals[i]
        else:
            keep[i] = False
    return unique_vals[keep]


def _distribution_pieces(mesh: Mesh, nodal: np.ndarray) -> _PieceData:
    tri = np.sort(nodal[mesh.elements], axis=1)
    areas = element_areas(mesh)
    breaks = _snap_breaks(np.unique(tri))
    npc = len(breaks) - 1

    ia = np.clip(np.searchsorted(breaks, tri[:, 0], side="right") - 1,
                 0, npc)
    ib = np.clip(np.searchsorted(breaks, tri[:, 1], side="right") - 1,
                 0, npc)
    ic = np.clip(np.searchsorted(breaks, tri[:, 2], side="right") - 1,
                 0, npc)
    a, b, c = breaks[ia], breaks[ib], breaks[ic]

    curv_diff = np.zeros(npc + 1)
    slope_jump = np.zeros(npc + 1)
    atoms = np.zeros(len(breaks))

    flat = c == a
    np.add.at(atoms, ia[flat], areas[flat])

    lower = b > a
    w1 = areas[lower] / ((b[lower] - a[lower]) * (c[lower] - a[lower]))
    np.add.at(curv_diff, ia[lower], -w1)
    np.add.at(curv_diff, ib[lower], w1)

    upper = c > b
    w2 = areas[upper] / ((c[upper] - b[upper]) * (c[upper] - a[upper]))
    np.add.at(curv_diff, ib[upper], w2)
    np.add.at(curv_diff, ic[upper], -w2)

    # elements with two equal corner values kink the slope: a double low
    # corner starts at full steepness, a double high corner ends there
    low_pair = ~lower & upper
    np.add.at(slope_jump, ia[low_pair],
              -2.0 * areas[low_pair] / (c[low_pair] - a[low_pair]))
    high_pair = lower & ~upper
    np.add.at(slope_jump, ib[high_pair],
              2.0 * areas[high_pair] / (c[high_pair] - a[high_pair]))

    if npc == 0:
        return _PieceData(breaks=breaks, values=np.empty(0),
                          slopes=np.empty(0), curvatures=np.empty(0),
                          atoms=atoms)

    curvatures = _compensated_cumsum(curv_diff[:npc])
    widths = np.diff(breaks)
    # away from those kinks the area function is C^1, so slopes
    # accumulate the curvature increments and values the slope increments
    slope_inc = slope_jump[:npc].copy()
    slope_inc[1:] += 2.0 * curvatures[:-1] * widths[:-1]
    slopes = _compensated_cumsum(slope_inc)
    value_inc = (slopes * widths + curvatures * widths ** 2
                 - atoms[1:npc + 1])
    total = float(np.sum(areas))
    start = total - atoms[0]
    values = start + np.concatenate(
        [[0.0], _compensated_cumsum(value_inc[:npc - 1])])
    return _PieceData(breaks=breaks, values=values, slopes=slopes,
                      curvatures=curvatures, atoms=atoms)


def _stable_roots(c0, c1, c2):
    """Both roots of c2 x^2 + c1 x + c0 = 0 with c2 != 0, avoiding
    cancellation when c2 is tiny relative to c1."""
    disc = np.sqrt(np.maximum(c1 ** 2 - 4.0 * c2 * c0, 0.0))
    sgn = np.where(c1 >= 0.0, 1.0, -1.0)
    qq = -0.5 * (c1 + sgn * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = qq / c2
        r2 = np.where(qq != 0.0, c0 / qq, qq / c2)
    return r1, r2


@dataclass(frozen=True)
class CumulativePower:
    """s -> integral of the profile's positive part to power q on (0, s)."""

    exponent: float
    total: float
    _evaluate: object = field(repr=False)

    def value(self, s):
        return self._evaluate(s)


@dataclass(frozen=True)
class RearrangedProfile:
    """Nonincreasing profile u*(s) on [0, |domain|] equimeasurable with u."""

    domain_measure: float
    positive_measure: float
    pieces: _PieceData
    measure_grid: np.ndarray
    profile_values: np.ndarray

    @property
    def value_breaks(self) -> np.ndarray:
        return self.pieces.breaks

    def distribution(self, t):
        """m(t) = measure of {u > t}, right-continuous."""
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        t = np.atleast_1d(arr)
        p = self.pieces
        if len(p.values) == 0:
            out = np.where(t >= p.breaks[-1], 0.0,
                           self.domain_measure - p.atoms[0]
                           * (t >= p.breaks[0]))
            return float(out[0]) if scalar else out
        idx = np.clip(np.searchsorted(p.breaks, t, side="right") - 1,
                      0, len(p.values) - 1)
        tau = t - p.breaks[idx]
        out = p.values[idx] + tau * (p.slopes[idx] + tau * p.curvatures[idx])
        out = np.where(t < p.breaks[0], self.domain_measure, out)
        out = np.where(t >= p.breaks[-1], 0.0, out)
        return float(out[0]) if scalar else out

    def _left_limits(self) -> np.ndarray:
        """Left limit of m at every break (right value + atom)."""
        p = self.pieces
        if len(p.values) == 0:
            return np.array([self.domain_measure])
        vals = np.concatenate([p.values, [0.0]])
        return vals + p.atoms

    def value(self, s):
        """u*(s) = sup{t : m(t) > s}."""
        arr = np.asarray(s, dtype=float)
        scalar = arr.ndim == 0
        s = np.atleast_1d(arr)
        p = self.pieces
        b = p.breaks
        right = np.concatenate([p.values, [0.0]])
        left = self._left_limits()
        # right[] is nonincreasing; find the first index with right[k] <= s
        count = np.searchsorted(right[::-1], s, side="right")
        k = np.clip(len(b) - count, 0, len(b) - 1)
        out = np.full(s.shape, b[-1])
        hit = count > 0
        kk = k[hit]
        # the level is crossed inside piece kk-1 only if that piece gets
        # down to s before its right end; otherwise the crossing is the
        # jump at break kk (kk == 0 jumps down from |domain|)
        jump = (left[kk] > s[hit]) | (kk == 0)
        res = np.where(jump, b[kk], 0.0)
        solve = ~jump
        if np.any(solve):
            ks = kk[solve] - 1
            c0 = p.values[ks] - s[hit][solve]
            c1 = p.slopes[ks]
            c2 = p.curvatures[ks]
            width = b[ks + 1] - b[ks]
            tau = np.empty_like(c0)
            lin = c2 == 0.0
            flat = lin & (c1 == 0.0)
            tau[flat] = width[flat]
            sl = lin & ~flat
            tau[sl] = -c0[sl] / c1[sl]
            qd = ~lin
            r1, r2 = _stable_roots(c0[qd], c1[qd], c2[qd])
            half = 0.5 * width[qd]
            tau[qd] = np.where(np.abs(r1 - half) <= np.abs(r2 - half), r1, r2)
            res[solve] = b[ks] + np.clip(tau, 0.0, width)
        out[hit] = res
        return float(out[0]) if scalar else out

    def _piece_power_integrals(self, q: float, clip_positive: bool):
        """Per piece: integral of t^q (-m') dt, optionally only over t>0.

        Grouped so that the huge-curvature pieces cancel in a stable way:
        the slope and curvature factors multiply accurate power
        differences of the (tiny) piece widths.
        """
        p = self.pieces
        if len(p.values) == 0:
            return np.empty(0)
        lo, hi = p.breaks[:-1], p.breaks[1:]
        if clip_positive:
            lo, hi = np.maximum(lo, 0.0), np.maximum(hi, 0.0)
        d1 = _power_diff(lo, hi, q + 1.0) / (q + 1.0)
        d2 = _power_diff(lo, hi, q + 2.0) / (q + 2.0)
        anchor = p.breaks[:-1]
        return -(p.slopes * d1 + 2.0 * p.curvatures * (d2 - anchor * d1))

    def positive_power_integral(self, q: float) -> float:
        """Exact integral of the positive part to power q over the domain."""
        if q <= 0:
            raise ParameterError("exponent must be positive")
        p = self.pieces
        total = float(np.sum(self._piece_power_integrals(q, True)))
        pos = p.breaks > 0
        total += float(np.sum(p.atoms[pos] * p.breaks[pos] ** q))
        return total

    def abs_power_integral(self, q: float) -> float:
        """Exact integral of |u|^q over the domain."""
        if q <= 0:
            raise ParameterError("exponent must be positive")
        total = self.positive_power_integral(q)
        p = self.pieces
        if len(p.values) > 0:
            # mirror the negative side: w = -t runs over [-hi, -lo]
            w_lo = np.maximum(-p.breaks[1:], 0.0)
            w_hi = np.maximum(-p.breaks[:-1], 0.0)
            d1 = _power_diff(w_lo, w_hi, q + 1.0) / (q + 1.0)
            d2 = _power_diff(w_lo, w_hi, q + 2.0) / (q + 2.0)
            anchor = p.breaks[:-1]
            total += float(np.sum(
                2.0 * p.curvatures * (anchor * d1 + d2) - p.slopes * d1))
        neg = p.breaks < 0
        total += float(np.sum(p.atoms[neg] * (-p.breaks[neg]) ** q))
        return total

    def integral(self) -> float:
        """Exact integral of u over the domain (Cavalieri)."""
        p = self.pieces
        total = float(np.sum(p.atoms * p.breaks))
        if len(p.values) == 0:
            return total
        lo, hi = p.breaks[:-1], p.breaks[1:]
        width = hi - lo
        d1 = width * (hi + lo) / 2.0
        # exact grouping of int t(t - lo) dt over the piece
        d2_anchor = width ** 2 * (2.0 * hi + lo) / 6.0
        total += float(np.sum(-(p.slopes * d1
                                + 2.0 * p.curvatures * d2_anchor)))
        return total


def rearrange(mesh: Mesh, nodal) -> RearrangedProfile:
    """Exact decreasing rearrangement of a nodal P1 function."""
    nodal = np.asarray(nodal, dtype=float)
    if mesh.element_count == 0:
        raise ParameterError("mesh has no elements")
    if nodal.shape != (mesh.node_count,):
        raise ParameterError("nodal array does not match mesh nodes")
    if not np.all(np.isfinite(nodal)):
        raise ParameterError("nodal values must be finite")
    pieces = _distribution_pieces(mesh, nodal)
    total = float(np.sum(element_areas(mesh)))
    prof = RearrangedProfile(
        domain_measure=total, positive_measure=0.0, pieces=pieces,
        measure_grid=np.empty(0), profile_values=np.empty(0))
    positive = float(prof.distribution(0.0))
    right = np.concatenate([pieces.values, [0.0]]) \
        if len(pieces.values) else np.array([0.0])
    grid = np.unique(np.concatenate(
        [np.linspace(0.0, total, _MEASURE_GRID), right,
         prof._left_limits()]))
    grid = grid[(grid >= 0.0) & (grid <= total)]
    values = prof.value(grid)
    return RearrangedProfile(
        domain_measure=total, positive_measure=positive, pieces=pieces,
        measure_grid=grid, profile_values=values)


def rearrange_oriented(mesh: Mesh, nodal) -> RearrangedProfile:
    """Rearrange with the sign fixed so |{u > 0}| <= |domain|/2."""
    nodal = np.asarray(nodal, dtype=float)
    profile = rearrange(mesh, nodal)
    if profile.positive_measure > 0.5 * profile.domain_measure:
        profile = rearrange(mesh, -nodal)
    return profile


def lq_norm_positive(profile: RearrangedProfile, q: float) -> float:
    """L^q norm of the positive part, from the exact pieces."""
    if q <= 0:
        raise ParameterError("q must be positive")
    return profile.positive_power_integral(q) ** (1.0 / q)


def cumulative_power(profile: RearrangedProfile, q: float) -> CumulativePower:
    """Exact s -> integral of (u*)^q over (0, s), saturating past s̃."""
    if q <= 0:
        raise ParameterError("q must be positive")
    p = profile.pieces
    b = p.breaks
    s_tilde = profile.positive_measure
    if len(p.values) == 0:
        level = max(float(b[0]), 0.0)

        def evaluate_const(s):
            arr = np.asarray(s, dtype=float)
            scalar = arr.ndim == 0
            out = level ** q * np.minimum(np.atleast_1d(arr), s_tilde)
            return float(out[0]) if scalar else out

        return CumulativePower(exponent=q, total=level ** q * s_tilde,
                               _evaluate=evaluate_const)

    piece_int = profile._piece_power_integrals(q, True)
    atom_terms = np.where(b > 0, p.atoms * np.maximum(b, 0.0) ** q, 0.0)
    # tail[k] = integral of t^q over the part of -dm above b[k]
    tail = np.zeros(len(b))
    tail[:-1] = np.cumsum((piece_int + atom_terms[1:])[::-1])[::-1]
    total = float(tail[0] + atom_terms[0])

    def evaluate(s):
        arr = np.asarray(s, dtype=float)
        scalar = arr.ndim == 0
        s_eff = np.minimum(np.atleast_1d(arr), s_tilde)
        tstar = np.maximum(np.atleast_1d(profile.value(s_eff)), 0.0)
        idx = np.clip(np.searchsorted(b, tstar, side="right") - 1,
                      0, len(b) - 1)
        # at the top break there is no piece below t*, only the atom ramp
        ip = np.minimum(idx, len(b) - 2)
        low = np.maximum(b[ip], 0.0)
        t_c = np.maximum(np.minimum(tstar, b[ip + 1]), low)
        d1 = _power_diff(low, t_c, q + 1.0) / (q + 1.0)
        d2 = _power_diff(low, t_c, q + 2.0) / (q + 2.0)
        partial = -(p.slopes[ip] * d1
                    + 2.0 * p.curvatures[ip] * (d2 - b[ip] * d1))
        partial = np.where(idx > ip, 0.0, partial)
        plateau = tstar ** q * np.maximum(
            s_eff - np.atleast_1d(profile.distribution(tstar)), 0.0)
        out = tail[idx] - partial + plateau
        out = np.where(tstar <= 0.0, total, out)
        out = np.where(s_eff <= 0.0, 0.0, out)
        return float(out[0]) if scalar else out

    return CumulativePower(exponent=q, total=total, _evaluate=evaluate)


def _homogeneous_sum(values: np.ndarray, q: int) -> np.ndarray:
    """Complete homogeneous symmetric polynomial h_q of each value triple."""
    out = np.zeros(values.shape[0])
    v0, v1, v2 = values[:, 0], values[:, 1], values[:, 2]
    for i in range(q + 1):
        inner = np.zeros_like(out)
        for j in range(q - i + 1):
            inner += v1 ** j * v2 ** (q - i - j)
        out += v0 ** i * inner
    return out


def mesh_positive_power_integral(mesh: Mesh, nodal, q: int) -> float:
    """Integral of the positive part to power q directly on the mesh.

    Independent route from the rearranged-profile integral: per element
    the region where the linear interpolant is positive is decomposed
    into sub-triangles and integrated with the barycentric moment
    formula, exact for integer q.
    """
    if int(q) != q or q < 1:
        raise ParameterError("mesh route requires integer q >= 1")
    q = int(q)
    nodal = np.asarray(nodal, dtype=float)
    tri = np.sort(nodal[mesh.elements], axis=1)[:, ::-1]
    areas = element_areas(mesh)
    scale = 2.0 * math.factorial(q) / math.factorial(q + 2)
    v0, v1, v2 = tri[:, 0], tri[:, 1], tri[:, 2]
    total = 0.0

    full = v2 >= 0.0
    if np.any(full):
        total += scale * float(np.sum(areas[full]
                                      * _homogeneous_sum(tri[full], q)))

    one = (v0 > 0.0) & (v1 <= 0.0) & (v2 < 0.0)
    if np.any(one):
        frac = (v0[one] / (v0[one] - v1[one])) * (v0[one] / (v0[one] - v2[one]))
        total += scale * float(np.sum(areas[one] * frac * v0[one] ** q))

    two = (v1 > 0.0) & (v2 < 0.0)
    if np.any(two):
        whole = areas[two] * _homogeneous_sum(tri[two], q)
        frac = (v2[two] / (v2[two] - v0[two])) * (v2[two] / (v2[two] - v1[two]))
        total += scale * float(np.sum(whole - frac * areas[two]
                                      * v2[two] ** q))
    return total


@dataclass(frozen=True)
class BallComparisonProfile:
    """Rearranged first Dirichlet eigenfunction of the comparison ball."""

    p: float
    n: int
    radius: float
    measure: float
    _scale: float
    _grid: np.ndarray = field(repr=False)

    def value(self, s):
        s = np.asarray(s, dtype=float)
        r = self._scale * (s / omega_n(self.n)) ** (1.0 / self.n)
        return psi_profile(self.p, self.n).value(r)

    def cumulative_power(self, q: float) -> CumulativePower:
        prof = psi_profile(self.p, self.n)
        wn = omega_n(self.n)
        integrand = self._grid ** (self.n - 1) * prof.values ** q
        cum = np.concatenate([[0.0], np.cumsum(
            0.5 * (integrand[1:] + integrand[:-1]) * np.diff(self._grid))])
        factor = self.n * wn / self._scale ** self.n
        measure = self.measure
        scale = self._scale
        n = self.n

        def evaluate(s):
            s = np.asarray(s, dtype=float)
            x = scale * (np.minimum(s, measure) / wn) ** (1.0 / n)
            return factor * np.interp(x, self._grid, cum)

        return CumulativePower(exponent=q, total=float(factor * cum[-1]),
                               _evaluate=evaluate)


def dirichlet_ball_profile(p: float, n: int, K: float,
                           mu1: float) -> BallComparisonProfile:
    """Comparison ball whose measure is (K/n)^n (lambda1(B1)/mu1)^{n/p}."""
    if K <= 0 or mu1 <= 0:
        raise ParameterError("K and mu1 must be positive")
    prof = psi_profile(p, n)
    wn = omega_n(n)
    alpha = (K / (n * wn ** (1.0 / n))) ** p
    scale = (mu1 / alpha) ** (1.0 / p)
    radius = prof.first_zero / scale
    return BallComparisonProfile(p=p, n=n, radius=radius,
                                 measure=wn * radius ** n,
                                 _scale=scale, _grid=prof.grid)


@dataclass(frozen=True)
class ChitiReport:
    max_violation: float
    s_at_max: float
    lhs: float
    rhs: float
    L: float
    s_tilde: float
    lemma_violated: bool


def chiti_check(u_profile: RearrangedProfile,
                ball_profile: BallComparisonProfile,
                q: float, grid: int = 2048) -> ChitiReport:
    """Max of the normalized cumulative-power gap on [0, L].

    The ball cumulative is rescaled so the totals match, then both are
    normalized to unit total; a max_violation above CHECK_TOL means the
    domination fails at the reported measure.
    """
    if q <= 0:
        raise ParameterError("q must be positive")
    if grid < 2:
        raise ParameterError("grid must have at least two points")
    L = ball_profile.measure
    s_tilde = u_profile.positive_measure
    lemma_violated = L > s_tilde + CHECK_TOL * u_profile.domain_measure
    upper = cumulative_power(u_profile, q)
    lower = ball_profile.cumulative_power(q)
    s = np.linspace(0.0, L, grid)
    u_side = np.asarray(upper.value(s)) / upper.total
    ball_side = np.asarray(lower.value(s)) / lower.total
    gap = u_side - ball_side
    k = int(np.argmax(gap))
    return ChitiReport(max_violation=float(gap[k]), s_at_max=float(s[k]),
                       lhs=float(u_side[k]), rhs=float(ball_side[k]),
                       L=float(L), s_tilde=float(s_tilde),
                       lemma_violated=bool(lemma_violated))


@dataclass(frozen=True)
class ReverseHolderReport:
    lhs: float
    rhs: float
    constant: float
    ok: bool


def reverse_holder_check(u_profile: RearrangedProfile, p: float, n: int,
                         K: float, mu1: float, q: float, r: float,
                         tol: float = CHECK_TOL) -> ReverseHolderReport:
    """Check that the L^q norm of u⁺ is below C times its L^r norm.

    C = L^{1/q - 1/r} f(q)/f(r) with f the normalized radial power mean
    and L the measure of the comparison ball.
    """
    if r >= q:
        raise ParameterError("need r < q")
    if r <= 0:
        raise ParameterError("need r > 0")
    ball = dirichlet_ball_profile(p, n, K, mu1)
    prof = psi_profile(p, n)
    constant = (ball.measure ** (1.0 / q - 1.0 / r)
                * math.exp(prof.log_power_mean(q) - prof.log_power_mean(r)))
    lhs = lq_norm_positive(u_profile, q)
    rhs = constant * lq_norm_positive(u_profile, r)
    return ReverseHolderReport(lhs=float(lhs), rhs=float(rhs),
                               constant=float(constant),
                               ok=bool(lhs <= rhs * (1.0 + tol)))
