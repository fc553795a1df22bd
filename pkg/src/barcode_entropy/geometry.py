"""Desk-scale checks of the two analytic inputs behind the entropy bound.

* Crofton: for the kinematic measure ``dp dtheta`` on lines
  ``x cos(theta) + y sin(theta) = p``, the integral of the number of
  intersections with a plane curve equals twice its length.
  ``crofton_lines`` estimates the integral by Monte Carlo.
* Tomograph: on the circle, the graphs of ``d f_s`` for
  ``f_s = sum s_i eta_i`` (trigonometric basis, ``s`` in a small ball) are a
  finite-dimensional family of Lagrangians; their intersections with the
  graph of ``dg`` are the critical points of ``f_s - g``.
  ``tomograph_census`` counts them and how often they degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .barcode import count_long_bars
from .complex import FilteredComplex, reduce

MIN_CROFTON_SAMPLES = 10_000
ROOT_PANELS = 2048
ROOT_TOL = 1e-10
DEGENERACY_TOL = 1e-8


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class PlaneCurve:
    """A piecewise-smooth parametrized curve ``u -> (x(u), y(u))`` on [lo, hi].

    ``fn`` must accept numpy arrays.  ``breaks`` are parameter values where
    the curve may have corners.
    """

    name: str
    fn: Callable
    lo: float
    hi: float
    closed: bool = False
    breaks: tuple = ()

    def table(self, n: int = 2048) -> np.ndarray:
        u = np.linspace(self.lo, self.hi, n, endpoint=not self.closed)
        u = np.union1d(u, np.asarray(self.breaks, dtype=float))
        x, y = self.fn(u)
        return np.column_stack([x, y])

    def speed(self, u: float) -> float:
        h = 1e-6 * max(1.0, self.hi - self.lo)
        a, b = max(self.lo, u - h), min(self.hi, u + h)
        xa, ya = self.fn(np.array([a]))
        xb, yb = self.fn(np.array([b]))
        return float(np.hypot(xb[0] - xa[0], yb[0] - ya[0]) / (b - a))

    def length(self) -> float:
        """Arc length by adaptive quadrature, split at the corners."""
        knots = [self.lo] + sorted(b for b in self.breaks if self.lo < b < self.hi) + [self.hi]
        total = 0.0
        for a, b in zip(knots, knots[1:]):
            val, _ = integrate.quad(self.speed, a, b, limit=400, epsabs=1e-11, epsrel=1e-11)
            total += val
        return total

    def scaled(self, lam: float) -> "PlaneCurve":
        fn = self.fn
        return PlaneCurve(f"{self.name}*{lam:g}", lambda u: tuple(lam * c for c in fn(u)),
                          self.lo, self.hi, self.closed, self.breaks)


def _polygon(name, verts):
    verts = np.asarray(verts, dtype=float)
    k = len(verts)
    closed_v = np.vstack([verts, verts[:1]])

    def fn(u):
        u = np.asarray(u, dtype=float)
        i = np.minimum(np.floor(u).astype(int), k - 1)
        f = (u - i)[:, None] if u.ndim else u - i
        p = closed_v[i] + (closed_v[i + 1] - closed_v[i]) * f
        return p[..., 0], p[..., 1]

    return PlaneCurve(name, fn, 0.0, float(k), True, tuple(float(i) for i in range(1, k)))


def circle(radius: float = 1.0) -> PlaneCurve:
    return PlaneCurve("circle", lambda u: (radius * np.cos(u), radius * np.sin(u)), 0.0, 2 * math.pi, True)


def segment(length: float = 1.0) -> PlaneCurve:
    return PlaneCurve("segment", lambda u: (np.asarray(u, dtype=float), 0.0 * np.asarray(u)), 0.0, float(length))


def curve_family() -> list[PlaneCurve]:
    """Ten reference curves: convex, non-convex, open and self-crossing."""
    tau = 2 * math.pi
    return [
        circle(1.0),
        segment(1.5),
        PlaneCurve("ellipse", lambda u: (2 * np.cos(u), 0.5 * np.sin(u)), 0.0, tau, True),
        _polygon("square", [(0, 0), (1, 0), (1, 1), (0, 1)]),
        _polygon("star", [(math.cos(a) * r, math.sin(a) * r) for a, r in
                          zip(np.linspace(0, tau, 10, endpoint=False), [1, 0.4] * 5)]),
        PlaneCurve("figure_eight", lambda u: (np.sin(u), np.sin(u) * np.cos(u)), 0.0, tau, True),
        PlaneCurve("cardioid", lambda u: ((1 - np.cos(u)) * np.cos(u), (1 - np.cos(u)) * np.sin(u)), 0.0, tau, True),
        PlaneCurve("spiral", lambda u: (u * np.cos(u) / 10, u * np.sin(u) / 10), 0.0, 3 * tau),
        PlaneCurve("sine_graph", lambda u: (np.asarray(u, dtype=float), 0.3 * np.sin(3 * u)), 0.0, tau),
        PlaneCurve("rose", lambda u: (np.cos(3 * u) * np.cos(u), np.cos(3 * u) * np.sin(u)), 0.0, math.pi, True),
    ]


def _check_table(pts: np.ndarray, closed: bool) -> None:
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("curve table must be an (n, 2) array with n >= 2")
    if not np.all(np.isfinite(pts)):
        raise ValueError("curve table is unbounded (non-finite coordinates)")
    body = pts[:-1] if closed and np.allclose(pts[0], pts[-1]) else pts
    seg = np.diff(pts, axis=0)
    if np.any(np.all(seg == 0, axis=1)):
        raise ValueError("curve table repeats a point (self-overlapping)")
    _, counts = np.unique(body, axis=0, return_counts=True)
    if np.any(counts > 1):
        raise ValueError("curve table revisits a vertex (self-overlapping)")


# ---------------------------------------------------------------------------
# Crofton


@dataclass(frozen=True)
class CroftonResult:
    estimate: float
    stderr: float
    length: float
    ratio: float
    n_samples: int
    seed: int


def crofton_lines(curve, n_samples: int, seed: int, *, closed: bool = None, chunk: int = 4096) -> CroftonResult:
    """Monte Carlo estimate of the line integral of the intersection count.

    ``curve`` is a :class:`PlaneCurve` or an ``(n, 2)`` table of points
    along the curve.  Lines are sampled with ``theta`` uniform on [0, pi)
    and ``p`` uniform on ``[-R, R]`` about the bounding-box centre, where
    ``R`` bounds the curve; the count is the number of sign changes of
    ``x cos + y sin - p`` along the table.
    """
    if n_samples < MIN_CROFTON_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_CROFTON_SAMPLES}")
    if isinstance(curve, PlaneCurve):
        pts = curve.table()
        closed = curve.closed
        length = curve.length()
    else:
        pts = np.asarray(curve, dtype=float)
        closed = bool(closed)
        length = None
    _check_table(pts, closed)
    if closed and not np.array_equal(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    if length is None:
        length = math.fsum(np.hypot(*np.diff(pts, axis=0).T))
    centre = (pts.min(axis=0) + pts.max(axis=0)) / 2
    rel = pts - centre
    R = float(np.hypot(rel[:, 0], rel[:, 1]).max()) * (1 + 1e-9)

    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, math.pi, n_samples)
    p = rng.uniform(-R, R, n_samples)
    counts = np.empty(n_samples, dtype=np.int64)
    for start in range(0, n_samples, chunk):
        sl = slice(start, start + chunk)
        g = np.cos(theta[sl])[:, None] * rel[None, :, 0] + np.sin(theta[sl])[:, None] * rel[None, :, 1] - p[sl, None]
        pos = g > 0
        counts[sl] = np.count_nonzero(pos[:, 1:] != pos[:, :-1], axis=1)
    area = 2 * R * math.pi
    mean = math.fsum(counts.tolist()) / n_samples
    estimate = area * mean
    stderr = area * float(np.std(counts, ddof=1)) / math.sqrt(n_samples)
    return CroftonResult(estimate, stderr, length, estimate / length, n_samples, seed)


# ---------------------------------------------------------------------------
# tomograph on the circle


@dataclass(frozen=True)
class TrigPoly:
    """``g(x) = sum_k cos_coeffs[k-1] cos(k x) + sin_coeffs[k-1] sin(k x)``."""

    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def _ks(self):
        n = max(len(self.cos_coeffs), len(self.sin_coeffs))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.cos_coeffs)] = self.cos_coeffs
        b[: len(self.sin_coeffs)] = self.sin_coeffs
        return np.arange(1, n + 1, dtype=float), a, b

    def derivative(self, x, order: int = 1):
        x = np.asarray(x, dtype=float)
        k, a, b = self._ks()
        if len(k) == 0:
            return np.zeros_like(x)
        kx = np.multiply.outer(x, k)
        # d^n/dx^n of cos(kx) = k^n cos(kx + n pi/2)
        shift = order * math.pi / 2
        return (np.cos(kx + shift) * (a * k**order) + np.sin(kx + shift) * (b * k**order)).sum(axis=-1)

    def graph_length(self) -> float:
        """Length of the graph of g' over one period."""
        val, _ = integrate.quad(lambda x: math.sqrt(1 + float(self.derivative(x, 2)) ** 2),
                                0.0, 2 * math.pi, limit=400)
        return val


def tomograph_basis(d: int):
    """``(eta_i^(order))`` evaluator for the basis sin x, cos x, sin 2x, cos 2x, ..."""
    ks = np.array([i // 2 + 1 for i in range(d)], dtype=float)
    phase = np.array([0.0 if i % 2 == 0 else math.pi / 2 for i in range(d)])  # sin(kx) or cos(kx) = sin(kx + pi/2)

    def evaluate(x, order: int = 0):
        x = np.asarray(x, dtype=float)
        return ks**order * np.sin(np.multiply.outer(x, ks) + phase + order * math.pi / 2)

    return evaluate


@dataclass(frozen=True)
class TomographResult:
    mean_n: float
    max_n: int
    degenerate_fraction: float
    stderr: float
    n_samples: int
    seed: int


def _sample_ball(rng, n, d, r):
    v = rng.standard_normal((n, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (r * rng.uniform(0, 1, n) ** (1.0 / d))[:, None]


def tomograph_census(g: TrigPoly, d: int, r: float, n_samples: int, seed: int, *, chunk: int = 2048) -> TomographResult:
    """Critical points of ``f_s - g`` for ``s`` uniform in the radius-``r`` ball.

    Zeros of ``(f_s - g)'`` are isolated by sign changes on 2048 panels and
    refined by bisection to 1e-10; a zero is degenerate when
    ``|(f_s - g)''| < 1e-8`` there.
    """
    if d < 2:
        raise ValueError("basis must have at least 2 functions to span the cotangent directions")
    if not r > 0:
        raise ValueError("radius must be positive")
    basis = tomograph_basis(d)
    grid = np.linspace(0, 2 * math.pi, ROOT_PANELS, endpoint=False)
    span = (basis(grid, 1) ** 2).sum(axis=1)
    if span.min() < 1e-12:
        raise ValueError("basis derivatives do not span the cotangent direction everywhere")
    dbasis = basis(grid, 1)  # (panels, d)
    g_grid = g.derivative(grid, 1)
    h = 2 * math.pi / ROOT_PANELS

    rng = np.random.default_rng(seed)
    s_all = _sample_ball(rng, n_samples, d, r)
    counts = np.empty(n_samples, dtype=np.int64)
    degenerate = np.zeros(n_samples, dtype=bool)
    for start in range(0, n_samples, chunk):
        s = s_all[start:start + chunk]
        F = s @ dbasis.T - g_grid  # (m, panels)
        pos = F > 0
        change = pos != np.roll(pos, -1, axis=1)
        counts[start:start + len(s)] = change.sum(axis=1)
        rows, cols = np.nonzero(change)
        if len(rows) == 0:
            continue
        lo = grid[cols].copy()
        hi = lo + h
        sign_lo = pos[rows, cols]
        srow = s[rows]

        def F_at(x):
            return np.einsum("ij,ij->i", basis(x, 1), srow) - g.derivative(x, 1)

        while np.max(hi - lo) > ROOT_TOL:
            mid = 0.5 * (lo + hi)
            same = (F_at(mid) > 0) == sign_lo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        root = 0.5 * (lo + hi)
        second = np.einsum("ij,ij->i", basis(root, 2), srow) - g.derivative(root, 2)
        bad = np.abs(second) < DEGENERACY_TOL
        degenerate[start + rows[bad]] = True
    mean = float(counts.mean())
    return TomographResult(
        mean, int(counts.max()), float(degenerate.mean()),
        float(np.std(counts, ddof=1) / math.sqrt(n_samples)), n_samples, seed,
    )


def calibrate_tomograph_constant(gs: Sequence[TrigPoly], d: int, r: float, n_samples: int, seed: int) -> float:
    """Largest observed ``mean N / graph length`` over a calibration family."""
    ratios = []
    for k, g in enumerate(gs):
        res = tomograph_census(g, d, r, n_samples, seed + k)
        ratios.append((res.mean_n + 3 * res.stderr) / g.graph_length())
    return max(ratios)


# ---------------------------------------------------------------------------
# intersection counts versus bars


@dataclass(frozen=True)
class IntersectionReport:
    ok: bool
    n_generators: int
    n_bars: int
    n_long: int
    n_finite: int
    n_infinite: int
    message: str = ""

    def __bool__(self):
        return self.ok


def intersection_bound_check(cx: FilteredComplex, eps: float) -> IntersectionReport:
    """Generators bound bars, and every generator is exactly one bar endpoint:
    ``#generators = 2 #finite + #infinite >= #bars >= b_eps``."""
    bc = reduce(cx)
    n = len(cx)
    total, fin, inf = len(bc), bc.n_finite, bc.n_infinite
    long_ = count_long_bars(bc, eps)
    msgs = []
    if not n >= total >= long_:
        msgs.append(f"expected {n} >= {total} >= {long_}")
    if n != 2 * fin + inf:
        msgs.append(f"{n} generators but 2*{fin} + {inf} bar endpoints")
    return IntersectionReport(not msgs, n, total, long_, fin, inf, "; ".join(msgs))
