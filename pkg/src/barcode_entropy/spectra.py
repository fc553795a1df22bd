"""Chord-length spectra of reference systems and complexes built from them.

Reference systems:

* flat torus: lengths of straight chords between two points of the unit
  square torus (zero entropy, quadratic growth);
* Schottky group: hyperbolic distances ``d(p, g q)`` over reduced words
  (positive entropy, exponential growth);
* ``exp_spectrum``: synthetic lengths with counting function
  ``floor(e^{h t}) - 1`` exactly, used to calibrate estimators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .barcode import format_real, parse_real
from .complex import FilteredComplex
from .errors import ParseError

MERGE_DECIMALS = 12


@dataclass(frozen=True)
class ChordSpectrum:
    """Sorted lengths with multiplicities, complete up to ``cutoff``.

    ``complete_radius`` is the length below which the enumeration is
    certified complete (equal to the cutoff unless the generator says
    otherwise).
    """

    lengths: np.ndarray
    multiplicities: np.ndarray
    cutoff: float
    complete_radius: float = None

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=np.int64)
        if lengths.shape != mult.shape or lengths.ndim != 1:
            raise ValueError("lengths and multiplicities must be 1-d arrays of equal size")
        if len(lengths):
            if np.any(lengths <= 0):
                raise ValueError("chord lengths must be positive")
            if np.any(np.diff(lengths) <= 0):
                raise ValueError("chord lengths must be strictly increasing")
            if lengths[-1] > self.cutoff:
                raise ValueError("chord length beyond cutoff")
        if np.any(mult < 1):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "cutoff", float(self.cutoff))
        if self.complete_radius is None:
            object.__setattr__(self, "complete_radius", float(self.cutoff))

    @classmethod
    def from_values(cls, values, cutoff: float, complete_radius: float = None) -> "ChordSpectrum":
        """Merge raw lengths that agree after rounding to 12 decimals."""
        vals = np.asarray(values, dtype=float)
        vals = vals[(vals > 0) & (vals <= cutoff)]
        if len(vals) == 0:
            return cls(np.empty(0), np.empty(0, dtype=np.int64), cutoff, complete_radius)
        keys = np.round(vals, MERGE_DECIMALS)
        uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
        # representative: the smallest raw value in each class
        rep = np.full(len(uniq), np.inf)
        np.minimum.at(rep, inverse, vals)
        return cls(rep, counts, cutoff, complete_radius)

    def __len__(self):
        return len(self.lengths)

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum())

    def counting(self, t) -> np.ndarray:
        """``N(t)``: total multiplicity of lengths <= t (vectorized in t)."""
        cum = np.concatenate([[0], np.cumsum(self.multiplicities)])
        return cum[np.searchsorted(self.lengths, t, side="right")]

    def restricted(self, t_max: float) -> "ChordSpectrum":
        keep = self.lengths <= t_max
        return ChordSpectrum(
            self.lengths[keep], self.multiplicities[keep], min(t_max, self.cutoff),
            min(self.complete_radius, t_max),
        )

    def expanded(self) -> np.ndarray:
        return np.repeat(self.lengths, self.multiplicities)


# ---------------------------------------------------------------------------
# reference systems


def torus_spectrum(p, q, t_max: float) -> ChordSpectrum:
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    v = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    k = int(math.ceil(t_max)) + 2
    m = np.arange(-k, k + 1, dtype=float)
    x = v[0] + m[:, None]
    y = v[1] + m[None, :]
    norms = np.hypot(x, y).ravel()
    return ChordSpectrum.from_values(norms, t_max)


def hyperbolic_distance(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    arg = 1 + np.abs(z - w) ** 2 / (2 * z.imag * w.imag)
    return np.arccosh(np.maximum(arg, 1.0))


def _to_point(z: complex) -> np.ndarray:
    """The matrix sending i to z."""
    y = math.sqrt(z.imag)
    return np.array([[y, z.real / y], [0.0, 1.0 / y]])


def _orbit_distances(words, p: complex, q: complex) -> np.ndarray:
    """``d(p, g q)`` for a stack of words ``g``.

    With ``P i = p`` and ``Q i = q``, ``cosh d(p, g q) = |P^-1 g Q|_F^2 / 2``;
    the sum of squares has no cancellation, unlike the Mobius action.
    """
    P, Q = _to_point(p), _to_point(q)
    M = np.linalg.inv(P) @ words @ Q
    arg = 0.5 * np.sum(M * M, axis=(-2, -1))
    return np.arccosh(np.maximum(arg, 1.0))


def _pull_back(words, z: complex):
    """``g^-1 z`` for a stack of words, with the imaginary part computed as
    ``Im z / |c' z + d'|^2`` to avoid cancellation."""
    a, b, c, d = words[..., 0, 0], words[..., 0, 1], words[..., 1, 0], words[..., 1, 1]
    # g^-1 = [[d, -b], [-c, a]]
    den = np.abs(-c * z + a) ** 2
    x = (-d * c * abs(z) ** 2 + (d * a + b * c) * z.real - b * a) / den
    return x, z.imag / den


def _distance_to_disk(x, y, centre: float, radius: float):
    """Hyperbolic distance from ``x + i y`` to the half-disk bounded by the
    geodesic ``|z - centre| = radius`` (0 inside)."""
    power = (x - centre) ** 2 + y * y - radius * radius
    return np.where(power <= 0, 0.0, np.arcsinh(np.maximum(power, 0.0) / (2 * radius * y)))


def _isometric_circle(M):
    a, b, c, d = M.ravel()
    if c == 0:
        return None
    return -d / c, 1 / abs(c)


SCHOTTKY_MAX_WORD = 14


def schottky_spectrum(generators, p: complex, q: complex, max_word_length: int) -> ChordSpectrum:
    """Distances ``d(p, g q)`` over reduced words ``g`` of length <= bound.

    The generators and their inverses are used as letters.  When their
    isometric circles are pairwise disjoint (the ping-pong configuration)
    and ``p``, ``q`` lie outside all of them, every reduced word of length
    ``n + 1`` or more moves ``q`` into one of the nested half-planes of
    depth ``n + 1``; the hyperbolic distance from ``p`` to the union of
    those half-planes is reported as ``complete_radius``.  Otherwise the
    radius is 0 (nothing certified).
    """
    if max_word_length > SCHOTTKY_MAX_WORD:
        raise ValueError(f"word length bound is limited to {SCHOTTKY_MAX_WORD}")
    if max_word_length < 0:
        raise ValueError("word length bound must be non-negative")
    mats = []
    for g in generators:
        g = np.asarray(g, dtype=float)
        if g.shape != (2, 2):
            raise ValueError("generators must be 2x2 matrices")
        if abs(np.linalg.det(g) - 1) > 1e-9:
            raise ValueError(f"generator has determinant {np.linalg.det(g)}, expected 1")
        mats.append(g)
        mats.append(np.linalg.inv(g))
    letters = np.array(mats)
    inverse_of = np.array([i ^ 1 for i in range(len(mats))])
    p, q = complex(p), complex(q)
    if not (p.imag > 0 and q.imag > 0):
        raise ValueError("points must lie in the upper half plane")

    dists = [np.atleast_1d(hyperbolic_distance(p, q))]
    shell = np.eye(2)[None]
    last = np.array([-1])
    shells = [(shell, last)]
    for _ in range(max_word_length):
        new_m, new_last = [], []
        for k in range(len(mats)):
            ok = last != inverse_of[k]
            new_m.append(shell[ok] @ letters[k])
            new_last.append(np.full(int(ok.sum()), k))
        shell = np.concatenate(new_m)
        last = np.concatenate(new_last)
        shells.append((shell, last))
        dists.append(_orbit_distances(shell, p, q))
    values = np.concatenate(dists)
    radius = _completeness_radius(letters, inverse_of, shells, p, q, max_word_length)
    cutoff = float(values.max())
    return ChordSpectrum.from_values(values, cutoff, min(radius, cutoff))


def _completeness_radius(letters, inverse_of, shells, p, q, n):
    circles = [_isometric_circle(M) for M in letters]
    if any(c is None for c in circles):
        return 0.0
    ivals = [(c - r, c + r) for c, r in circles]
    for (a1, b1), (a2, b2) in itertools.combinations(ivals, 2):
        if not (b1 < a2 or b2 < a1):
            return 0.0
    for z in (p, q):
        if any(abs(z - c) <= r for c, r in circles):
            return 0.0
    # a reduced word w x (|w| = n) sends q into w(interior of the isometric
    # circle of x^{-1}); these depth-(n+1) half-planes nest into all deeper ones
    prefixes, last = shells[n]
    x, y = _pull_back(prefixes, p)
    best = np.inf
    for k in range(len(letters)):
        ok = last != inverse_of[k]
        if not np.any(ok):
            continue
        # d(p, w D) = d(w^-1 p, D)
        c, r = circles[inverse_of[k]]
        best = min(best, float(_distance_to_disk(x[ok], y[ok], c, r).min()))
    return best


def _symmetric_generator(centre: float, radius: float) -> np.ndarray:
    # isometric circles at -centre and +centre, both of the given radius
    c = 1.0 / radius
    a = centre / radius
    return np.array([[a, (a * a - 1.0) / c], [c, a]])


# base points outside every isometric circle of the standard pair
SCHOTTKY_P = complex(0.0, 2.0)
SCHOTTKY_Q = complex(0.3, 2.5)


def standard_schottky_pair():
    """Two hyperbolic generators with disjoint, nearly tangent isometric circles.

    Circles sit at +-1 (radius 0.97) and +-3.5 (radius 1.45); the orbit
    counting function grows at rate about 0.68.
    """
    return [_symmetric_generator(1.0, 0.97), _symmetric_generator(3.5, 1.45)]


EXP_SIZE_GUARD = 30.0


def exp_spectrum(h: float, t_max: float) -> ChordSpectrum:
    """Lengths ``log(k)/h`` for ``k >= 2``, so ``N(t) = floor(e^{h t}) - 1``."""
    if not h > 0:
        raise ValueError("rate must be positive")
    if t_max * h > EXP_SIZE_GUARD:
        raise ValueError(f"t_max * h must be at most {EXP_SIZE_GUARD}")
    k_max = int(math.floor(math.exp(h * t_max)))
    # guard against exp rounding at the boundary
    while k_max >= 2 and math.log(k_max) / h > t_max:
        k_max -= 1
    while math.log(k_max + 1) / h <= t_max:
        k_max += 1
    k = np.arange(2, k_max + 1, dtype=float)
    lengths = np.log(k) / h
    return ChordSpectrum(lengths, np.ones(len(lengths), dtype=np.int64), t_max)


# ---------------------------------------------------------------------------
# complexes from spectra


@dataclass(frozen=True)
class GapModel:
    """How ``complex_from_spectrum`` builds its differential.

    ``kind`` is ``"trivial"`` (no differential) or ``"planted"``; planted
    gaps are ``constant`` (``params=(g,)``), ``uniform`` (``(lo, hi)``) or
    ``exponential`` (``(mean,)``), drawn with ``seed``.
    """

    kind: str = "trivial"
    distribution: str = "constant"
    params: tuple = (0.1,)
    seed: int = 0

    def gaps(self, n: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        if self.distribution == "constant":
            return np.full(n, float(self.params[0]))
        if self.distribution == "uniform":
            return rng.uniform(self.params[0], self.params[1], size=n)
        if self.distribution == "exponential":
            return rng.exponential(self.params[0], size=n)
        raise ValueError(f"unknown gap distribution {self.distribution!r}")


TRIVIAL = GapModel()


def complex_from_spectrum(spectrum: ChordSpectrum, model: GapModel = TRIVIAL, zero_action_count: int = 0) -> FilteredComplex:
    """Filtered complex with one generator per chord (per unit multiplicity).

    ``trivial``: zero differential, so every chord gives an infinite bar.
    ``planted``: each chord ``x`` at length ``t`` gets a partner ``y`` at
    ``t + gap`` with boundary ``x``, giving the bar ``[t, t + gap)``.
    ``zero_action_count`` extra cycles sit at action 0.
    """
    if zero_action_count < 0:
        raise ValueError("zero_action_count must be non-negative")
    values = spectrum.expanded()
    gens = [(f"z{i}", 0.0) for i in range(zero_action_count)]
    gens += [(f"c{i}", float(t)) for i, t in enumerate(values)]
    bnd = {}
    if model.kind == "planted":
        gaps = model.gaps(len(values))
        if np.any(gaps <= 0):
            raise ValueError("planted gaps must be positive")
        for i, (t, g) in enumerate(zip(values, gaps)):
            gens.append((f"p{i}", float(t + g)))
            bnd[f"p{i}"] = (f"c{i}",)
    elif model.kind != "trivial":
        raise ValueError(f"unknown model {model.kind!r}")
    return FilteredComplex(gens, bnd)


# ---------------------------------------------------------------------------
# text format


HEADER = "spectrum v1"


def format_spectrum(spectrum: ChordSpectrum) -> str:
    lines = [HEADER]
    lines += [f"chord {format_real(t)} {int(m)}" for t, m in zip(spectrum.lengths, spectrum.multiplicities)]
    if spectrum.complete_radius != spectrum.cutoff:
        lines.append(f"# complete below {format_real(spectrum.complete_radius)}")
    lines.append(f"cutoff {format_real(spectrum.cutoff)}")
    return "\n".join(lines) + "\n"


def parse_spectrum(text: str) -> ChordSpectrum:
    lengths, mult = [], []
    cutoff = None
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != HEADER:
                raise ParseError(f"expected header {HEADER!r}", lineno)
            seen_header = True
            continue
        if cutoff is not None:
            raise ParseError("nothing may follow the cutoff line", lineno)
        parts = line.split()
        try:
            if parts[0] == "chord" and len(parts) == 3:
                lengths.append(parse_real(parts[1]))
                mult.append(int(parts[2]))
            elif parts[0] == "cutoff" and len(parts) == 2:
                cutoff = parse_real(parts[1])
            else:
                raise ParseError(f"unexpected line {raw!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    if not seen_header:
        raise ParseError(f"missing header {HEADER!r}")
    if cutoff is None:
        raise ParseError("missing cutoff line")
    try:
        return ChordSpectrum(np.array(lengths, dtype=float), np.array(mult, dtype=np.int64), cutoff)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
