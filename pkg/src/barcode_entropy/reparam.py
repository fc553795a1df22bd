"""Radial profiles of convex Hamiltonians and the length-to-action map.

A profile is given by its derivative ``h'`` as a strictly increasing
piecewise-linear table on ``[1, r_max]`` with ``h'(1) = 0`` and
``h'(r_max) = T``.  ``h`` itself is recovered by exact integration with
``h(1) = 0``, and the Hamiltonian continues linearly as ``r T - B`` with
``B = r_max T - h(r_max)``.

A chord of length ``t`` sits at the level ``r`` with ``h'(r) = t`` and has
action ``A(t) = r t - h(r)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barcode import format_real, parse_real
from .errors import InvariantError, ParseError
from .spectra import ChordSpectrum

BILIPSCHITZ_TOL = 1e-9


@dataclass(frozen=True)
class ConvexProfile:
    radii: tuple
    slopes: tuple  # h' at the radii

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        hp = np.asarray(self.slopes, dtype=float)
        if r.ndim != 1 or r.shape != hp.shape or len(r) < 2:
            raise InvariantError("profile needs at least two knots")
        if r[0] != 1.0 or hp[0] != 0.0:
            raise InvariantError("profile must start at the knot (1, 0)")
        if np.any(np.diff(r) <= 0):
            raise InvariantError("knot radii must be strictly increasing")
        if np.any(np.diff(hp) <= 0):
            raise InvariantError("h' must be strictly increasing")
        object.__setattr__(self, "radii", tuple(r.tolist()))
        object.__setattr__(self, "slopes", tuple(hp.tolist()))
        if not self.B > 0:
            raise InvariantError(f"B = r_max T - h(r_max) must be positive, got {self.B}")

    @classmethod
    def quadratic(cls, r_max: float = 2.0, T: float = 2.0) -> "ConvexProfile":
        """``h'`` linear from 0 to ``T`` on ``[1, r_max]``."""
        return cls((1.0, float(r_max)), (0.0, float(T)))

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    @property
    def T(self) -> float:
        return self.slopes[-1]

    @property
    def _h_knots(self) -> np.ndarray:
        r = np.asarray(self.radii)
        hp = np.asarray(self.slopes)
        return np.concatenate([[0.0], np.cumsum(np.diff(r) * (hp[1:] + hp[:-1]) / 2)])

    @property
    def B(self) -> float:
        return self.r_max * self.T - float(self._h_knots[-1])

    @property
    def min_curvature(self) -> float:
        """Smallest slope of ``h'`` over the pieces (a lower bound for h'')."""
        return float(np.min(np.diff(self.slopes) / np.diff(self.radii)))

    def h(self, r):
        """Exact integral of the piecewise-linear ``h'`` from 1 to ``r``."""
        r = np.asarray(r, dtype=float)
        R = np.asarray(self.radii)
        hp = np.asarray(self.slopes)
        k = np.clip(np.searchsorted(R, r, side="right") - 1, 0, len(R) - 2)
        slope = (hp[k + 1] - hp[k]) / (R[k + 1] - R[k])
        dr = r - R[k]
        return self._h_knots[k] + hp[k] * dr + 0.5 * slope * dr * dr

    def radius_of_slope(self, t):
        """The level ``r`` with ``h'(r) = t``."""
        return np.interp(t, self.slopes, self.radii)


def action_of_length(profile: ConvexProfile, t):
    """``A(t) = r h'(r) - h(r)`` at ``h'(r) = t``; ``A(0) = 0``, ``A(T) = B``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > profile.T):
        raise ValueError(f"length outside [0, {profile.T}]")
    r = profile.radius_of_slope(t_arr)
    a = r * t_arr - profile.h(r)
    a = np.where(t_arr == profile.T, profile.B, a)
    a = np.where(t_arr == 0, 0.0, a)
    return float(a) if a.ndim == 0 else a


def length_of_action(profile: ConvexProfile, a: float, tol: float = 1e-12) -> float:
    """Inverse of :func:`action_of_length` by bisection."""
    if not 0 <= a <= profile.B:
        raise ValueError(f"action outside [0, {profile.B}]")
    lo, hi = 0.0, profile.T
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if action_of_length(profile, mid) < a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BilipschitzViolation:
    t: float
    t2: float
    increment: float


def check_bilipschitz(profile: ConvexProfile, grid) -> BilipschitzViolation | None:
    """Check ``t2 - t <= A(t2) - A(t) <= r_max (t2 - t)`` for all grid pairs.

    Returns None when every pair passes, otherwise the first failing pair.
    """
    g = np.asarray(grid, dtype=float)
    if np.any(np.diff(g) < 0):
        raise ValueError("grid must be sorted")
    a = np.asarray(action_of_length(profile, g), dtype=float)
    dt = g[None, :] - g[:, None]
    da = a[None, :] - a[:, None]
    upper = np.triu(np.ones_like(dt, dtype=bool))
    bad = upper & ((da < dt - BILIPSCHITZ_TOL) | (da > profile.r_max * dt + BILIPSCHITZ_TOL))
    if not bad.any():
        return None
    i, j = map(int, np.argwhere(bad)[0])
    return BilipschitzViolation(float(g[i]), float(g[j]), float(da[i, j]))


def scaled_profile(profile: ConvexProfile, s: float) -> ConvexProfile:
    """Profile of ``s h``: same radii, slope ``s T``, ``B`` scaled by ``s``.

    Its action map is ``A_{sh}(t) = s A_h(t / s)``; for ``s >= 1`` it lies
    below ``A_h`` and decreases towards ``t`` as ``s`` grows.
    """
    if s < 1:
        raise ValueError(f"scale must be at least 1, got {s}")
    return ConvexProfile(profile.radii, tuple(s * x for x in profile.slopes))


def spectrum_to_actions(profile: ConvexProfile, spectrum: ChordSpectrum) -> tuple[ChordSpectrum, int]:
    """Push chord lengths up to ``T`` through ``A``; returns the spectrum in
    action units and the number of chords dropped for being longer than T."""
    keep = spectrum.lengths <= profile.T
    dropped = int(spectrum.multiplicities[~keep].sum())
    acts = np.asarray(action_of_length(profile, spectrum.lengths[keep]), dtype=float).reshape(-1)
    return ChordSpectrum(acts, spectrum.multiplicities[keep], profile.B), dropped


# ---------------------------------------------------------------------------
# text format: ``profile v1`` / ``rmax <v>`` / ``knot <r> <hprime>``


def format_profile(profile: ConvexProfile) -> str:
    lines = ["profile v1", f"rmax {format_real(profile.r_max)}"]
    lines += [f"knot {format_real(r)} {format_real(s)}" for r, s in zip(profile.radii, profile.slopes)]
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> ConvexProfile:
    rmax = None
    knots = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != "profile v1":
                raise ParseError("expected header 'profile v1'", lineno)
            seen_header = True
            continue
        parts = line.split()
        try:
            if parts[0] == "rmax" and len(parts) == 2:
                rmax = parse_real(parts[1])
            elif parts[0] == "knot" and len(parts) == 3:
                knots.append((parse_real(parts[1]), parse_real(parts[2])))
            else:
                raise ParseError(f"unexpected line {raw!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    if not seen_header:
        raise ParseError("missing header 'profile v1'")
    if not knots:
        raise ParseError("profile has no knots")
    prof = ConvexProfile(tuple(k[0] for k in knots), tuple(k[1] for k in knots))
    if rmax is not None and rmax != prof.r_max:
        raise InvariantError(f"rmax {rmax} does not match the last knot radius {prof.r_max}")
    return prof
