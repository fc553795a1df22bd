"""Finite barcodes and the module-level operations on them.

A barcode is a finite multiset of half-open bars ``[birth, death)`` with
``death`` possibly infinite.  It stands for the interval-decomposable
persistence module ``t -> sum of F(I)``, so evaluating, truncating,
shifting or reparametrizing the module is done bar by bar.

All bars follow one convention: closed on the left, open on the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import ParseError

INF = math.inf


def format_real(x: float) -> str:
    """Shortest decimal literal that round-trips to ``x`` (``inf`` for infinity)."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def parse_real(token: str) -> float:
    x = float(token)
    if math.isnan(x):
        raise ValueError("nan is not a valid value")
    return x


@dataclass(frozen=True, order=True)
class Bar:
    birth: float
    death: float
    multiplicity: int = 1

    def __post_init__(self):
        if not self.birth < self.death:
            raise ValueError(f"bar needs birth < death, got [{self.birth}, {self.death})")
        if math.isinf(self.birth):
            raise ValueError("births must be finite")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    @property
    def length(self) -> float:
        return self.death - self.birth

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.death)


class Barcode:
    """Immutable multiset of bars kept in canonical ``(birth, death)`` order.

    Equal ``(birth, death)`` pairs are merged into one :class:`Bar` with the
    summed multiplicity, and zero-length intervals are dropped, so two
    barcodes are equal exactly when they are equal as multisets.

    >>> Barcode([(0, 1), (0, 1), (2, 2)])
    Barcode([(0.0, 1.0, 2)])
    """

    __slots__ = ("_bars",)

    def __init__(self, bars: Iterable = ()):
        counts: dict[tuple[float, float], int] = {}
        for item in bars:
            if isinstance(item, Bar):
                b, d, m = item.birth, item.death, item.multiplicity
            elif len(item) == 3:
                b, d, m = item
            else:
                (b, d), m = item, 1
            b, d, m = float(b), float(d), int(m)
            if m < 1:
                raise ValueError("multiplicity must be positive")
            if b == d:
                continue
            if not b < d:
                raise ValueError(f"bar needs birth < death, got [{b}, {d})")
            counts[(b, d)] = counts.get((b, d), 0) + m
        self._bars = tuple(Bar(b, d, m) for (b, d), m in sorted(counts.items()))

    @property
    def bars(self) -> tuple[Bar, ...]:
        return self._bars

    def __iter__(self):
        return iter(self._bars)

    def __len__(self):
        """Total multiplicity, not the number of distinct bars."""
        return sum(bar.multiplicity for bar in self._bars)

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return self._bars == other._bars

    def __hash__(self):
        return hash(self._bars)

    def __repr__(self):
        items = ", ".join(f"({b.birth!r}, {b.death!r}, {b.multiplicity})" for b in self._bars)
        return f"Barcode([{items}])"

    def expanded(self) -> list[tuple[float, float]]:
        """One ``(birth, death)`` pair per unit of multiplicity."""
        return [(b.birth, b.death) for b in self._bars for _ in range(b.multiplicity)]

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(births, deaths, multiplicities)`` as numpy arrays."""
        births = np.array([b.birth for b in self._bars], dtype=float)
        deaths = np.array([b.death for b in self._bars], dtype=float)
        mult = np.array([b.multiplicity for b in self._bars], dtype=np.int64)
        return births, deaths, mult

    @property
    def n_infinite(self) -> int:
        return sum(b.multiplicity for b in self._bars if b.is_infinite)

    @property
    def n_finite(self) -> int:
        return sum(b.multiplicity for b in self._bars if not b.is_infinite)


# ---------------------------------------------------------------------------
# evaluation and counting


def dim_at(barcode: Barcode, t: float) -> int:
    return sum(b.multiplicity for b in barcode if b.birth <= t < b.death)


def rank_between(barcode: Barcode, s: float, t: float) -> int:
    """Rank of the structure map ``V_s -> V_t``."""
    if s > t:
        raise ValueError(f"rank_between needs s <= t, got s={s}, t={t}")
    return sum(b.multiplicity for b in barcode if b.birth <= s and b.death > t)


def _check_eps(eps):
    if not eps > 0:
        raise ValueError(f"epsilon must be positive, got {eps}")


def count_long_bars(barcode: Barcode, eps: float) -> int:
    """Number of bars of length at least ``eps`` (infinite bars always count)."""
    _check_eps(eps)
    return sum(b.multiplicity for b in barcode if b.death - b.birth >= eps)


def count_prefix_bars(barcode: Barcode, eps: float, t: float) -> int:
    """Number of bars of length at least ``eps`` born at or before ``t``."""
    _check_eps(eps)
    return sum(b.multiplicity for b in barcode if b.birth <= t and b.death - b.birth >= eps)


def bar_type_census(barcode: Barcode, eps: float, t: float) -> tuple[int, int, int, int]:
    """Split the bars born in ``(0, t]`` into four types.

    I: long, dies after t.   II: long, dies by t.
    III: short, dies after t.  IV: short, dies by t.

    "Long" means length >= eps.  Bars of type I and III have one endpoint in
    ``(0, t]``; bars of type II and IV have two.
    """
    _check_eps(eps)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    n = [0, 0, 0, 0]
    for b in barcode:
        if not 0 < b.birth <= t:
            continue
        long_ = b.death - b.birth >= eps
        crosses = b.death > t
        idx = (0 if crosses else 1) if long_ else (2 if crosses else 3)
        n[idx] += b.multiplicity
    return tuple(n)


# ---------------------------------------------------------------------------
# module operations


def truncate(barcode: Barcode, T: float) -> Barcode:
    """Barcode of the module that agrees with V below T and vanishes from T on."""
    return Barcode((b.birth, min(b.death, T), b.multiplicity) for b in barcode if b.birth < T)


def shift(barcode: Barcode, c: float) -> Barcode:
    """Barcode of ``t -> V_{t+c}``: every endpoint moves down by ``c``."""
    return Barcode((b.birth - c, b.death - c, b.multiplicity) for b in barcode)


BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class MonotoneMap:
    """A continuous strictly increasing map ``f: [lo, hi] -> [f(lo), f(hi)]``.

    ``hi`` may be infinite, in which case ``f`` is taken to be unbounded
    above.  ``inverse`` is optional; without it, preimages are found by
    bisection to an absolute tolerance of 1e-12.
    """

    forward: Callable[[float], float]
    lo: float
    hi: float
    inverse_fn: Optional[Callable[[float], float]] = None

    @classmethod
    def piecewise_linear(cls, xs, ys) -> "MonotoneMap":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
            raise ValueError("piecewise-linear map needs two equal-length knot arrays")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("piecewise-linear map must be strictly increasing")
        return cls(
            lambda t: float(np.interp(t, xs, ys)),
            float(xs[0]),
            float(xs[-1]),
            lambda y: float(np.interp(y, ys, xs)),
        )

    @classmethod
    def identity(cls) -> "MonotoneMap":
        return cls(lambda t: t, -INF, INF, lambda y: y)

    @classmethod
    def linear(cls, scale: float, offset: float = 0.0) -> "MonotoneMap":
        if not scale > 0:
            raise ValueError("scale must be positive")
        return cls(lambda t: scale * t + offset, -INF, INF, lambda y: (y - offset) / scale)

    def __call__(self, t: float) -> float:
        return self.forward(t)

    @property
    def range_lo(self) -> float:
        return -INF if math.isinf(self.lo) else self.forward(self.lo)

    @property
    def range_hi(self) -> float:
        return INF if math.isinf(self.hi) else self.forward(self.hi)

    def check_monotone(self, n: int = 257) -> None:
        lo = self.lo if not math.isinf(self.lo) else -1e6
        hi = self.hi if not math.isinf(self.hi) else (max(lo, 0.0) + 1e6)
        grid = np.linspace(lo, hi, n)
        vals = np.array([self.forward(float(x)) for x in grid])
        if not np.all(np.isfinite(vals)) or np.any(np.diff(vals) <= 0):
            raise ValueError("map is not strictly increasing on its domain")

    def inverse(self, y: float) -> float:
        if math.isinf(y):
            return y
        if not self.range_lo <= y <= self.range_hi:
            raise ValueError(f"{y} is outside the range [{self.range_lo}, {self.range_hi}]")
        if self.inverse_fn is not None:
            return self.inverse_fn(y)
        lo, hi = self.lo, self.hi
        if math.isinf(lo):
            lo = -1.0
            while self.forward(lo) > y:
                lo *= 2
        if math.isinf(hi):
            hi = 1.0
            while self.forward(hi) < y:
                hi *= 2
        for _ in range(400):
            if hi - lo <= BISECTION_TOL:
                break
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if self.forward(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def reparametrize(barcode: Barcode, f: MonotoneMap) -> Barcode:
    """Barcode of ``t -> V_{f(t)}``: each bar ``I`` becomes ``f^{-1}(I)``."""
    f.check_monotone()
    out = []
    for b in barcode:
        if b.birth < f.range_lo or b.birth > f.range_hi:
            raise ValueError(f"bar [{b.birth}, {b.death}) lies outside the range of the map")
        if b.is_infinite:
            if not math.isinf(f.hi):
                raise ValueError("infinite bar needs a map unbounded above")
            death = INF
        else:
            if b.death > f.range_hi:
                raise ValueError(f"bar [{b.birth}, {b.death}) lies outside the range of the map")
            death = f.inverse(b.death)
        out.append((f.inverse(b.birth), death, b.multiplicity))
    return Barcode(out)


# ---------------------------------------------------------------------------
# text format: ``bar <birth> <death|inf> <multiplicity>``


def format_barcode(barcode: Barcode) -> str:
    return "".join(
        f"bar {format_real(b.birth)} {format_real(b.death)} {b.multiplicity}\n" for b in barcode
    )


def parse_barcode(text: str) -> Barcode:
    bars = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "bar" or len(parts) != 4:
            raise ParseError(f"expected 'bar <birth> <death> <multiplicity>', got {raw!r}", lineno)
        try:
            b, d, m = parse_real(parts[1]), parse_real(parts[2]), int(parts[3])
            bars.append(Bar(b, d, m))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return Barcode(bars)
