"""Sampled extended-real functions and the discrete Legendre-Fenchel transform.

Values may be +inf (outside the effective domain) but never -inf; every
sampled function must be finite somewhere.  The conjugate at a slope s is
the exact maximum of ``s*x_i - f(x_i)`` over finite nodes — no interpolation.
``brute_conjugate`` scans every node and is the oracle; ``fast_conjugate``
restricts the scan to lower-convex-hull vertices with a slope-ordered sweep
and must agree with the oracle bit for bit.

Accuracy caveat: the discrete conjugate understates the true conjugate at
slopes outside the range achievable on the grid, so verification grids are
chosen wide enough that every queried slope is interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import AllInfinite, DimMismatch
from .quadratic import TransformParams
from .reports import ResidualReport, report_from_residuals
from .tolerances import DEFAULT_TOL, Tolerances

INF = np.inf


def _check_grid(points, min_len: int = 1) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim != 1 or p.size < min_len:
        raise DimMismatch(f"grid must be 1-D with at least {min_len} points")
    if not np.all(np.isfinite(p)):
        raise ValueError("grid points must be finite")
    if p.size > 1 and not np.all(np.diff(p) > 0.0):
        raise ValueError("grid points must be strictly increasing")
    return p


def _check_values(values, size: int) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.shape != (size,):
        raise DimMismatch("values and grid sizes differ")
    if np.any(np.isneginf(v)) or np.any(np.isnan(v)):
        raise ValueError("values must be finite or +inf")
    if not np.any(np.isfinite(v)):
        raise AllInfinite("sampled function has no finite value")
    return v


@dataclass(frozen=True)
class SampledFn:
    """Extended-real values on a strictly increasing 1-D grid."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p = _check_grid(self.points)
        v = _check_values(self.values, p.size)
        p.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "values", v)

    @property
    def finite_mask(self) -> np.ndarray:
        return np.isfinite(self.values)

    def spacing(self) -> float:
        return float(np.max(np.diff(self.points))) if self.points.size > 1 else 0.0


@dataclass(frozen=True)
class SampledFn2D:
    """Extended-real values on a tensor grid xs x ys, row-major in xs."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = _check_grid(self.xs)
        ys = _check_grid(self.ys)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (xs.size, ys.size):
            raise DimMismatch("2-D values must have shape (len(xs), len(ys))")
        if np.any(np.isneginf(v)) or np.any(np.isnan(v)):
            raise ValueError("values must be finite or +inf")
        if not np.any(np.isfinite(v)):
            raise AllInfinite("sampled function has no finite value")
        for a in (xs, ys, v):
            a.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", v)


def sample(fn: Callable[[float], float], points) -> SampledFn:
    """Sample a scalar function on a grid (it may return +inf)."""
    p = _check_grid(points)
    return SampledFn(p, np.array([float(fn(x)) for x in p]))


def uniform_grid(lo: float, hi: float, h: float) -> np.ndarray:
    """Uniform grid covering [lo, hi] with spacing h, endpoints included."""
    n = int(round((hi - lo) / h))
    return lo + h * np.arange(n + 1)


def brute_conjugate(f: SampledFn, slopes) -> SampledFn:
    """Oracle conjugate: for each slope the max of s*x_i - f(x_i) over all
    finite nodes, evaluated exactly on the grid."""
    s = _check_grid(slopes)
    mask = f.finite_mask
    if not np.any(mask):
        raise AllInfinite("cannot conjugate an everywhere-infinite function")
    xs = f.points[mask]
    vs = f.values[mask]
    out = np.empty(s.size)
    block = 512
    for i in range(0, s.size, block):
        sb = s[i : i + block]
        out[i : i + block] = np.max(sb[:, None] * xs[None, :] - vs[None, :], axis=1)
    return SampledFn(s, out)


def lower_hull(xs: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull vertices of the points (xs, vs).

    xs must be strictly increasing.  Collinear interior points are dropped
    (the smaller abscissa survives), which keeps the vertex choice — and so
    the conjugate sweep — deterministic.
    """
    keep: list[int] = []
    for i in range(xs.size):
        while len(keep) >= 2:
            j, k = keep[-2], keep[-1]
            cross = (xs[k] - xs[j]) * (vs[i] - vs[j]) - (xs[i] - xs[j]) * (vs[k] - vs[j])
            if cross <= 0.0:
                keep.pop()
            else:
                break
        keep.append(i)
    return np.asarray(keep, dtype=int)


def fast_conjugate(f: SampledFn, slopes) -> SampledFn:
    """Linear-time conjugate via the lower convex hull.

    The maximizing node for an ascending slope sweep only ever moves right
    along the hull, so after the O(n) hull pass every slope costs amortized
    O(1).  Values come from the same expression the oracle uses, and the
    sweep advances on >= so equal-valued ties resolve to the rightmost
    candidate exactly as the oracle's max reduction does; the two routes
    are bitwise equal.
    """
    s = _check_grid(slopes)
    mask = f.finite_mask
    if not np.any(mask):
        raise AllInfinite("cannot conjugate an everywhere-infinite function")
    xs = f.points[mask]
    vs = f.values[mask]
    hull = lower_hull(xs, vs)
    hx = xs[hull]
    hv = vs[hull]
    out = np.empty(s.size)
    j = 0
    last = hx.size - 1
    for i in range(s.size):
        si = s[i]
        cur = si * hx[j] - hv[j]
        while j < last:
            nxt = si * hx[j + 1] - hv[j + 1]
            if nxt >= cur:
                j += 1
                cur = nxt
            else:
                break
        out[i] = cur
    return SampledFn(s, out)


def biconjugate(f: SampledFn) -> SampledFn:
    """Discrete biconjugate: the lower convex hull of the samples.

    Nodes outside the span of the finite values stay +inf; hull vertices
    keep their exact value; interior nodes take the chord value, clamped
    to never exceed the original sample (the clamp only absorbs roundoff).
    """
    mask = f.finite_mask
    if not np.any(mask):
        raise AllInfinite("cannot biconjugate an everywhere-infinite function")
    fin = np.nonzero(mask)[0]
    xs = f.points[fin]
    vs = f.values[fin]
    hull = fin[lower_hull(xs, vs)]
    hx = f.points[hull]
    hv = f.values[hull]
    out = np.full(f.points.size, INF)
    seg = 0
    for i in range(f.points.size):
        x = f.points[i]
        if x < hx[0] or x > hx[-1]:
            continue
        while seg + 1 < hx.size - 1 and hx[seg + 1] <= x:
            seg += 1
        if x == hx[seg]:
            out[i] = hv[seg]
        elif x == hx[seg + 1]:
            out[i] = hv[seg + 1]
        else:
            t = (x - hx[seg]) / (hx[seg + 1] - hx[seg])
            chord = hv[seg] + t * (hv[seg + 1] - hv[seg])
            out[i] = min(chord, f.values[i])
    return SampledFn(f.points, out)


def conjugate_2d_brute(f: SampledFn2D, slopes_x, slopes_y) -> SampledFn2D:
    """Exact 2-D grid conjugate: max of <s, x> - f(x) over all finite nodes.

    Quadratic cost in both grid and slope sizes; meant for small
    verification grids only.
    """
    sx = _check_grid(slopes_x)
    sy = _check_grid(slopes_y)
    mask = np.isfinite(f.values)
    if not np.any(mask):
        raise AllInfinite("cannot conjugate an everywhere-infinite function")
    xi, yi = np.nonzero(mask)
    px = f.xs[xi]
    py = f.ys[yi]
    pv = f.values[xi, yi]
    out = np.empty((sx.size, sy.size))
    for a in range(sx.size):
        ax = sx[a] * px - pv
        for b in range(sy.size):
            out[a, b] = np.max(ax + sy[b] * py)
    return SampledFn2D(sx, sy, out)


# ---------------------------------------------------------------------------
# The one-dimensional solution family of the sign-flip equation f(x) = f*(-x)


@dataclass(frozen=True)
class SignFlipSolution:
    """A known 1-D solution of f(x) = f*(-x), optionally reflected.

    kinds: ``half_square`` (x^2/2), ``neg_log`` (-1/2 - log x on x > 0,
    +inf elsewhere), ``ray_indicator`` (0 on x >= 0, +inf elsewhere) and
    ``split_quadratic`` (lam x^2/2 on x <= 0, x^2/(2 lam) on x >= 0,
    lam > 0).  If f solves the equation then so does x -> f(-x).
    """

    kind: str
    lam: Optional[float] = None
    reflected: bool = False

    _KINDS = ("half_square", "neg_log", "ray_indicator", "split_quadratic")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "split_quadratic":
            if self.lam is None or not self.lam > 0.0:
                raise ValueError("split_quadratic needs lam > 0")
        elif self.lam is not None:
            raise ValueError(f"{self.kind} takes no lam parameter")

    def __call__(self, x: float) -> float:
        t = -float(x) if self.reflected else float(x)
        if self.kind == "half_square":
            return 0.5 * t * t
        if self.kind == "neg_log":
            return -0.5 - math.log(t) if t > 0.0 else INF
        if self.kind == "ray_indicator":
            return 0.0 if t >= 0.0 else INF
        lam = self.lam
        return 0.5 * lam * t * t if t <= 0.0 else t * t / (2.0 * lam)

    def sample(self, points) -> SampledFn:
        return sample(self, points)


def log_family_eval(member: SignFlipSolution, x: float) -> float:
    return member(x)


# ---------------------------------------------------------------------------
# Grid-level residuals


def grid_fixed_point_residual(
    p: TransformParams,
    f: SampledFn,
    window: Optional[Tuple[float, float]] = None,
    boundary_exclusion: float = 0.0,
    tol: Tolerances = DEFAULT_TOL,
) -> ResidualReport:
    """Residual of f(x) = tau f*(e x + c) + w x + beta on a 1-D grid.

    e must be a nonzero scalar; the discrete conjugate is queried at the
    exact slopes ``e x_i + c``.  The max runs over finite nodes, restricted
    to ``window`` when given and skipping nodes within ``boundary_exclusion``
    of the effective domain's endpoints, where the conjugate's maximizer
    falls off the grid and the discrete value necessarily understates.  The
    grid spacing is reported for tolerance scaling.
    """
    if p.dim != 1:
        raise DimMismatch("grid residuals need scalar transform parameters")
    e = float(p.E[0, 0])
    if e == 0.0:
        raise ValueError("e must be nonzero")
    c = float(p.c[0])
    w = float(p.w[0])

    mask = f.finite_mask.copy()
    if window is not None:
        lo, hi = float(window[0]), float(window[1])
        mask &= (f.points >= lo) & (f.points <= hi)
    if boundary_exclusion > 0.0:
        fin = f.points[f.finite_mask]
        mask &= (f.points - fin[0] >= boundary_exclusion) & (
            fin[-1] - f.points >= boundary_exclusion
        )
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        raise AllInfinite("no finite nodes to check in the requested window")

    xs = f.points[idx]
    slopes = e * xs + c
    order = np.argsort(slopes)
    conj = fast_conjugate(f, slopes[order])
    star = np.empty(slopes.size)
    star[order] = conj.values
    residuals = f.values[idx] - p.tau * star - w * xs - p.beta
    rep = report_from_residuals(residuals, xs, grid_h=f.spacing())
    return rep


def fenchel_young_check(
    f: SampledFn, pairs: Sequence[Tuple[float, float]], tol: Tolerances = DEFAULT_TOL
) -> ResidualReport:
    """Most negative value of f*(s) + f(x) - s x over (x, s) pairs.

    Each x must be a finite grid node (snapped within 1e-9 of spacing).
    The discrete conjugate only ever understates f*, so the gap can only
    overestimate violations; anything below -1e-12 is a real failure.
    """
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise DimMismatch("pairs must be a nonempty sequence of (x, slope)")
    if not np.any(f.finite_mask):
        raise AllInfinite("sampled function has no finite value")
    xs = arr[:, 0]
    ss = arr[:, 1]
    snap = 1e-9 * max(1.0, f.spacing())
    node = np.searchsorted(f.points, xs)
    node = np.clip(node, 0, f.points.size - 1)
    left = np.clip(node - 1, 0, f.points.size - 1)
    node = np.where(
        np.abs(f.points[left] - xs) < np.abs(f.points[node] - xs), left, node
    )
    if np.any(np.abs(f.points[node] - xs) > snap):
        raise ValueError("pair abscissae must be grid nodes")
    if not np.all(np.isfinite(f.values[node])):
        raise ValueError("pair abscissae must be in the effective domain")

    order = np.argsort(ss, kind="stable")
    sorted_s, inverse = np.unique(ss[order], return_inverse=True)
    conj = fast_conjugate(f, sorted_s)
    star = np.empty(ss.size)
    star[order] = conj.values[inverse]

    gaps = star + f.values[node] - ss * xs
    k = int(np.argmin(gaps))
    violations = np.clip(-gaps, 0.0, None)
    return ResidualReport(
        max_abs=float(np.max(violations)),
        mean_abs=float(np.mean(violations)),
        sample_points=int(gaps.size),
        worst_point=np.array([xs[k], ss[k]]),
        min_gap=float(gaps[k]),
    )
