"""Barcode-entropy estimators on finite families of barcodes.

Barcode entropy is an exponential growth rate of the number of bars of
length at least eps, taken along a family whose truncation level grows.
On finite data the limsup is realized by regression: fit ``log(count)``
against the family's abscissa on sliding windows over the second half of
the schedule and keep the largest slope.  The eps -> 0 limit is never
extrapolated; reports carry the whole table and the smallest-eps value.

Two normalizations are in use, and every report records which one:

* ``"t"``: a single module truncated at increasing levels ``t``, abscissa ``t``;
* ``"sT"``: the family ``s -> s H`` truncated at ``s B``, abscissa ``s T``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .barcode import Barcode, format_real
from .complex import FilteredComplex, reduce, split_at
from .errors import PipelineError

NORMALIZATIONS = ("t", "sT")


@dataclass(frozen=True)
class FamilyMember:
    """One scale of a family: a barcode (or a complex to reduce), the level
    to truncate it at, and the abscissa used in the growth fit."""

    name: str
    x: float
    level: float
    barcode: Optional[Barcode] = None
    complex: Optional[FilteredComplex] = None

    def resolve(self) -> Barcode:
        if self.barcode is not None:
            return self.barcode
        if self.complex is None:
            raise PipelineError(self.name, "member has neither a barcode nor a complex")
        try:
            return reduce(self.complex)
        except Exception as exc:
            raise PipelineError(self.name, str(exc)) from exc


@dataclass(frozen=True)
class ScalingFamily:
    members: tuple
    normalization: str = "t"

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        xs = [m.x for m in self.members]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("family abscissae must be strictly increasing")

    def __len__(self):
        return len(self.members)

    @classmethod
    def truncations(cls, barcode: Barcode, levels, name: str = "module") -> "ScalingFamily":
        """A single module truncated at each of ``levels`` (normalization ``t``)."""
        return cls(tuple(FamilyMember(f"{name}@{t:g}", float(t), float(t), barcode=barcode) for t in levels), "t")


# ---------------------------------------------------------------------------
# regression


@dataclass(frozen=True)
class GrowthFit:
    rate: float
    slope: float
    intercept: float
    residual: float
    window: tuple
    n_points: int


def growth_rate(points, window: tuple = None) -> GrowthFit:
    """Least-squares slope of ``log n`` against ``t``, clamped below at 0.

    ``points`` is a sequence of ``(t, n)``; only points with ``n >= 1`` inside
    ``window = (lo, hi)`` are used, and at least three are required.  The
    residual is the RMS deviation of the fit.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    t, n = pts[:, 0], pts[:, 1]
    mask = n >= 1
    if window is not None:
        mask &= (t >= window[0]) & (t <= window[1])
    if mask.sum() < 3:
        raise ValueError(f"growth fit needs at least 3 points with count >= 1, got {int(mask.sum())}")
    tt, yy = t[mask], np.log(n[mask])
    if np.ptp(tt) == 0:
        raise ValueError("growth fit needs distinct abscissae")
    slope, intercept = np.polyfit(tt, yy, 1)
    resid = float(np.sqrt(np.mean((yy - (slope * tt + intercept)) ** 2)))
    return GrowthFit(max(float(slope), 0.0), float(slope), float(intercept), resid, (float(tt[0]), float(tt[-1])), int(mask.sum()))


def limsup_rate(points, window_length: int = None) -> GrowthFit:
    """Largest windowed growth rate over the second half of the schedule.

    Windows are ``window_length`` consecutive points (default: half of the
    second half, at least 3).  When no window has three usable points the
    rate is 0, matching ``log+(0) = 0``.
    """
    pts = sorted((float(t), float(n)) for t, n in points)
    tail = pts[len(pts) // 2:]
    if len(tail) < 3:
        tail = pts
    w = window_length or max(3, len(tail) // 2)
    w = min(w, len(tail))
    best = None
    for i in range(len(tail) - w + 1):
        chunk = tail[i:i + w]
        try:
            fit = growth_rate(chunk)
        except ValueError:
            continue
        if best is None or fit.slope > best.slope:
            best = fit
    if best is None:
        lo = tail[0][0] if tail else math.nan
        hi = tail[-1][0] if tail else math.nan
        return GrowthFit(0.0, 0.0, 0.0, 0.0, (lo, hi), 0)
    return best


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class EpsilonRate:
    eps: float
    rate: float
    raw_rate: float
    window: tuple
    residual: float
    counts: tuple


@dataclass(frozen=True)
class EntropyReport:
    normalization: str
    abscissae: tuple
    rows: tuple  # EpsilonRate, eps decreasing

    @property
    def eps_grid(self) -> tuple:
        return tuple(r.eps for r in self.rows)

    @property
    def headline(self) -> float:
        """Rate at the smallest eps."""
        return self.rows[-1].rate if self.rows else 0.0

    def rate(self, eps: float) -> float:
        for r in self.rows:
            if r.eps == eps:
                return r.rate
        raise KeyError(eps)

    def counts(self, eps: float) -> tuple:
        for r in self.rows:
            if r.eps == eps:
                return r.counts
        raise KeyError(eps)


def _count_long_truncated(arrays, level: float, eps: float) -> int:
    """``count_long_bars(truncate(B, level), eps)`` on array form."""
    births, deaths, mult = arrays
    keep = births < level
    lengths = np.minimum(deaths[keep], level) - births[keep]
    return int(mult[keep][lengths >= eps].sum())


def _count_prefix(arrays, t: float, eps: float) -> int:
    births, deaths, mult = arrays
    return int(mult[(births <= t) & (deaths - births >= eps)].sum())


def _count_census(arrays, t: float, eps: float) -> int:
    """``nI + 2 nII`` plus the bars born at or below 0 that die in ``(0, t]``.

    By endpoint conservation this equals the number of actions in ``(0, t]``
    minus the endpoints of short positive bars, so it depends on the low
    action part only through those short bars.
    """
    births, deaths, mult = arrays
    long_ = deaths - births >= eps
    born = (births > 0) & (births <= t)
    n1 = mult[born & long_ & (deaths > t)].sum()
    n2 = mult[born & long_ & (deaths <= t)].sum()
    early = mult[(births <= 0) & (deaths > 0) & (deaths <= t)].sum()
    return int(n1 + 2 * n2 + early)


def _resolve_all(members, workers: int) -> list[Barcode]:
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(FamilyMember.resolve, members))
    return [m.resolve() for m in members]


def _check_grid(eps_grid) -> tuple:
    grid = tuple(float(e) for e in eps_grid)
    if not grid:
        raise ValueError("epsilon grid is empty")
    if any(e <= 0 for e in grid):
        raise ValueError("epsilon grid must be positive")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("epsilon grid must be strictly decreasing")
    return grid


def entropy_from_barcodes(
    barcodes: Sequence[Barcode],
    family: ScalingFamily,
    eps_grid,
    *,
    count: str = "truncated",
    window_length: int = None,
) -> EntropyReport:
    grid = _check_grid(eps_grid)
    arrays = [b.arrays() for b in barcodes]
    xs = tuple(m.x for m in family.members)
    rows = []
    prev_counts = None
    prev_rate = 0.0
    for eps in grid:
        if count == "truncated":
            counts = tuple(_count_long_truncated(a, m.level, eps) for a, m in zip(arrays, family.members))
        elif count == "prefix":
            counts = tuple(_count_prefix(a, m.level - eps, eps) for a, m in zip(arrays, family.members))
        elif count == "census":
            counts = tuple(_count_census(a, m.level, eps) for a, m in zip(arrays, family.members))
        else:
            raise ValueError(f"unknown count mode {count!r}")
        if prev_counts is not None and any(c < p for c, p in zip(counts, prev_counts)):
            raise AssertionError(f"internal error: bar counts decreased as eps decreased to {eps}")
        fit = limsup_rate(list(zip(xs, counts)), window_length)
        # the true eps-rate is monotone in eps; keep the running max over coarser eps
        rate = max(fit.rate, prev_rate)
        rows.append(EpsilonRate(eps, rate, fit.rate, fit.window, fit.residual, counts))
        prev_counts, prev_rate = counts, rate
    return EntropyReport(family.normalization, xs, tuple(rows))


def barcode_entropy(
    family: ScalingFamily,
    eps_grid,
    *,
    count: str = "truncated",
    window_length: int = None,
    workers: int = 1,
) -> EntropyReport:
    """Per-eps growth rates of ``b_eps(truncate(B_n, level_n))`` along a family.

    ``count="prefix"`` counts bars of length >= eps born by ``level - eps``
    instead, which is the same number bar for bar.  ``count="census"`` uses
    the weighted count of long positive bars from ``_count_census``.
    """
    if len(family) == 0:
        raise ValueError("family is empty")
    barcodes = _resolve_all(family.members, workers)
    return entropy_from_barcodes(barcodes, family, eps_grid, count=count, window_length=window_length)


# ---------------------------------------------------------------------------
# positive part


TauRule = Union[float, Callable[[FamilyMember, FilteredComplex], float]]


@dataclass(frozen=True)
class PositivePartComparison:
    headline_full: float
    headline_positive: float
    chain_ok: bool
    chain_failures: tuple
    count_violations: tuple
    max_rate_gap: float
    tolerance: float


def smallest_positive_action(cx: FilteredComplex) -> float:
    pos = [a for a in cx.actions.values() if a > 0]
    if not pos:
        raise ValueError("complex has no generator of positive action")
    return min(pos)


def _tau_for(member: FamilyMember, rule: TauRule) -> float:
    cx = member.complex
    if cx is None:
        raise PipelineError(member.name, "positive part needs complexes, not barcodes")
    s_min = smallest_positive_action(cx)
    tau = rule(member, cx) if callable(rule) else float(rule) * s_min
    if not 0 < tau < s_min:
        raise ValueError(f"member {member.name!r}: split threshold {tau} not in (0, {s_min})")
    return tau


def positive_part_entropy(
    family: ScalingFamily,
    tau_rule: TauRule,
    eps_grid,
    *,
    tolerance: float = 0.02,
    window_length: int = None,
) -> tuple[EntropyReport, EntropyReport, PositivePartComparison]:
    """Entropy of the full barcodes and of the quotients above the split.

    ``tau_rule`` is either a fraction ``theta`` in (0, 1), giving the split
    ``theta * S_min`` per member, or a callable returning the split.  The
    comparison records the bar-count inequalities from the exact triangle
    (any failure there is a bug) and the rate chain
    ``rate+(2 eps) <= rate(eps) <= rate+(eps / 2)`` within ``tolerance``.
    """
    grid = _check_grid(eps_grid)
    if len(family) == 0:
        raise ValueError("family is empty")
    full_bc, pos_bc, low_bc = [], [], []
    cache: dict = {}  # truncation families share one complex; reduce it once
    for m in family.members:
        tau = _tau_for(m, tau_rule)
        key = (id(m.complex), tau)
        if key not in cache:
            tri = split_at(m.complex, tau)
            cache[key] = (m.resolve(), reduce(tri.quotient), reduce(tri.low))
        full, pos, low = cache[key]
        full_bc.append(full)
        pos_bc.append(pos)
        low_bc.append(low)
    ext = sorted({e * f for e in grid for f in (2.0, 1.0, 0.5)}, reverse=True)
    full = entropy_from_barcodes(full_bc, family, ext, window_length=window_length)
    pos = entropy_from_barcodes(pos_bc, family, ext, window_length=window_length)

    violations = []
    for k, m in enumerate(family.members):
        arr_f, arr_p, arr_l = full_bc[k].arrays(), pos_bc[k].arrays(), low_bc[k].arrays()
        for eps in grid:
            bf2 = _count_long_truncated(arr_f, m.level, 2 * eps)
            bp2 = _count_long_truncated(arr_p, m.level, 2 * eps)
            bf = _count_long_truncated(arr_f, m.level, eps)
            bp = _count_long_truncated(arr_p, m.level, eps)
            bl = _count_long_truncated(arr_l, m.level, eps)
            if bf2 > bp + bl or bp2 > bf + bl:
                violations.append((m.name, eps, bf2, bp2, bf, bp, bl))
    failures = []
    gap = 0.0
    for eps in grid:
        r, r_up, r_down = full.rate(eps), pos.rate(2 * eps), pos.rate(eps / 2)
        if not (r_up <= r + tolerance and r <= r_down + tolerance):
            failures.append((eps, r_up, r, r_down))
        gap = max(gap, abs(full.rate(eps) - pos.rate(eps)))
    full_r = _restrict(full, grid)
    pos_r = _restrict(pos, grid)
    comp = PositivePartComparison(
        full_r.headline, pos_r.headline, not failures, tuple(failures), tuple(violations), gap, tolerance
    )
    return full_r, pos_r, comp


def _restrict(report: EntropyReport, grid) -> EntropyReport:
    keep = set(grid)
    return EntropyReport(report.normalization, report.abscissae, tuple(r for r in report.rows if r.eps in keep))


# ---------------------------------------------------------------------------
# output

REPORT_COLUMNS = ("epsilon", "rate", "window_lo", "window_hi", "residual")


def format_report(report: EntropyReport) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for r in report.rows:
        lines.append("\t".join(format_real(v) for v in (r.eps, r.rate, r.window[0], r.window[1], r.residual)))
    lines.append(f"# headline {format_real(report.headline)} normalization {report.normalization}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = lines[0].split("\t")
    if tuple(header) != REPORT_COLUMNS:
        raise ValueError(f"unexpected report header {header}")
    return [dict(zip(header, map(float, ln.split("\t")))) for ln in lines[1:]]


def format_counts(report: EntropyReport) -> str:
    """Whitespace-separated table: abscissa then one count column per eps."""
    head = "# x " + " ".join(f"eps={format_real(e)}" for e in report.eps_grid)
    rows = [head]
    for k, x in enumerate(report.abscissae):
        rows.append(" ".join([format_real(x)] + [str(r.counts[k]) for r in report.rows]))
    return "\n".join(rows) + "\n"
