"""Action-filtered chain complexes over F2 and their barcodes.

A :class:`FilteredComplex` is a finite set of generators with real actions
and a boundary operator that strictly lowers action.  Boundaries are stored
as frozensets of generator ids (an F2 sum).  Gradings are not modeled.

``reduce`` computes the barcode by column reduction on bit-packed columns.
``oracle_barcode`` recomputes it from ranks of inclusion-induced maps and
never looks at the pairing, so the two can be checked against each other.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional

from .barcode import INF, Barcode, bar_type_census, format_real, parse_real
from .errors import InvariantError, ParseError


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


class FilteredComplex:
    __slots__ = ("_actions", "_boundary", "_order")

    def __init__(self, generators: Iterable[tuple[Hashable, float]], boundary: Mapping = None):
        actions: dict = {}
        self._order = []
        for gid, action in generators:
            if gid in actions:
                raise InvariantError(f"duplicate generator id {gid!r}")
            actions[gid] = float(action)
            self._order.append(gid)
        self._actions = actions
        bnd = {}
        for gid, faces in (boundary or {}).items():
            fs = frozenset(_f2_sum(faces))
            if fs:
                bnd[gid] = fs
        self._boundary = bnd

    @property
    def ids(self) -> list:
        """Generator ids in declaration order."""
        return list(self._order)

    @property
    def actions(self) -> dict:
        return dict(self._actions)

    def action(self, gid) -> float:
        return self._actions[gid]

    def boundary(self, gid) -> frozenset:
        return self._boundary.get(gid, frozenset())

    def __len__(self):
        return len(self._order)

    def __repr__(self):
        return f"FilteredComplex(<{len(self)} generators, {len(self._boundary)} nonzero boundaries>)"

    def generators(self) -> list[tuple[Hashable, float]]:
        return [(g, self._actions[g]) for g in self._order]

    def boundary_map(self) -> dict:
        return {g: self._boundary[g] for g in self._order if g in self._boundary}

    def with_actions(self, actions: Mapping) -> "FilteredComplex":
        """Same generators and differential, new action values."""
        return FilteredComplex(((g, actions[g]) for g in self._order), self._boundary)

    def shifted(self, c: float) -> "FilteredComplex":
        """Every action lowered by ``c``; its barcode is ``shift(reduce(self), c)``."""
        return self.with_actions({g: a - c for g, a in self._actions.items()})

    def sorted_ids(self) -> list:
        """Ids by ascending action, ties broken by id."""
        return sorted(self._order, key=lambda g: (self._actions[g], _id_key(g)))


def _id_key(gid):
    return (type(gid).__name__, str(gid)) if not isinstance(gid, (int, float)) else ("", gid)


def _f2_sum(ids) -> set:
    out = set()
    for i in ids:
        out ^= {i}
    return out


# ---------------------------------------------------------------------------
# validation


def validate(cx: FilteredComplex) -> Optional[Violation]:
    """Return the first violated invariant, or None when the complex is valid."""
    acts = cx._actions
    bnd = cx._boundary
    for gid in cx._order:
        missing = [f for f in bnd.get(gid, ()) if f not in acts]
        if missing:
            face = min(missing, key=_id_key)
            return Violation("unknown id", (gid, face), f"boundary of {gid!r} references undeclared {face!r}")
    for gid in cx._order:
        if not math.isfinite(acts[gid]):
            return Violation("finite action", (gid,), f"action of {gid!r} is not finite")
    for gid in cx._order:
        a = acts[gid]
        bad = [f for f in bnd.get(gid, ()) if not acts[f] < a]
        if bad:
            face = min(bad, key=_id_key)
            return Violation(
                "strict action decrease",
                (gid, face),
                f"{face!r} (action {acts[face]}) in boundary of {gid!r} (action {a})",
            )
    for gid in cx._order:
        dd = set()
        for face in bnd.get(gid, ()):
            dd ^= bnd.get(face, frozenset())
        if dd:
            return Violation("boundary squared", (gid,), f"d(d({gid!r})) = {sorted(dd, key=_id_key)} != 0")
    return None


def require_valid(cx: FilteredComplex) -> None:
    v = validate(cx)
    if v is not None:
        raise InvariantError(str(v))


# ---------------------------------------------------------------------------
# reduction


def _columns(cx: FilteredComplex):
    order = cx.sorted_ids()
    index = {g: i for i, g in enumerate(order)}
    cols = []
    for g in order:
        mask = 0
        for face in cx.boundary(g):
            mask |= 1 << index[face]
        cols.append(mask)
    return order, index, cols


def _infer_grading(cols: list[int]) -> Optional[list[int]]:
    """Integer degrees with deg(face) = deg(generator) - 1, if such exist."""
    n = len(cols)
    adj = [[] for _ in range(n)]
    for j, mask in enumerate(cols):
        while mask:
            low = mask & -mask
            i = low.bit_length() - 1
            adj[j].append((i, -1))
            adj[i].append((j, 1))
            mask ^= low
    deg: list = [None] * n
    for root in range(n):
        if deg[root] is not None:
            continue
        deg[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, step in adj[u]:
                want = deg[u] + step
                if deg[v] is None:
                    deg[v] = want
                    queue.append(v)
                elif deg[v] != want:
                    return None
    return deg


def _pairing(cols: list[int]) -> tuple[list[tuple[int, int]], list[int]]:
    """Persistence pairs (birth index, death index) and essential indices.

    When the differential admits a grading, columns are processed from the
    top degree down and every pivot row is cleared (its column is known to
    reduce to zero).  Otherwise columns are reduced left to right.
    """
    n = len(cols)
    cols = list(cols)
    pivot_of: dict[int, int] = {}
    cleared = [False] * n
    grading = _infer_grading(cols)
    if grading is None:
        schedule = range(n)
    else:
        schedule = sorted(range(n), key=lambda j: (-grading[j], j))
    for j in schedule:
        if cleared[j]:
            cols[j] = 0
            continue
        col = cols[j]
        while col:
            low = col.bit_length() - 1
            k = pivot_of.get(low)
            if k is None:
                break
            col ^= cols[k]
        cols[j] = col
        if col:
            low = col.bit_length() - 1
            pivot_of[low] = j
            if grading is not None:
                cleared[low] = True
    paired = set()
    pairs = []
    for low, j in pivot_of.items():
        pairs.append((low, j))
        paired.add(low)
        paired.add(j)
    essential = [j for j in range(n) if j not in paired]
    return sorted(pairs), essential


def reduce(cx: FilteredComplex) -> Barcode:
    """Barcode of the persistence module ``a -> H(sublevel complex below a)``."""
    require_valid(cx)
    order, _, cols = _columns(cx)
    acts = [cx.action(g) for g in order]
    pairs, essential = _pairing(cols)
    bars = [(acts[i], acts[j]) for i, j in pairs]
    bars += [(acts[j], INF) for j in essential]
    return Barcode(bars)


# ---------------------------------------------------------------------------
# brute-force oracle

ORACLE_MAX_GENERATORS = 16


def _rank(vectors: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                break
            v ^= p
    return len(pivots)


def _kernel(columns: list[tuple[int, int]]) -> list[int]:
    """Kernel basis of a linear map given as (image vector, source vector) pairs."""
    pivots: dict[int, tuple[int, int]] = {}
    kernel = []
    for img, src in columns:
        while img:
            top = img.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = (img, src)
                break
            img ^= p[0]
            src ^= p[1]
        if not img:
            kernel.append(src)
    return kernel


def oracle_barcode(cx: FilteredComplex) -> Barcode:
    """Barcode by exact F2 linear algebra on every pair of sublevel complexes.

    With distinct actions ``a_1 < ... < a_k`` and ``r(i, j)`` the rank of
    ``H(K_i) -> H(K_j)``, the multiplicity of ``[a_i, a_j)`` is
    ``r(i, j-1) - r(i, j) - r(i-1, j-1) + r(i-1, j)``, and that of
    ``[a_i, inf)`` is ``r(i, k) - r(i-1, k)``.
    """
    require_valid(cx)
    if len(cx) > ORACLE_MAX_GENERATORS:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_GENERATORS} generators, got {len(cx)}")
    ids = cx.ids
    bit = {g: 1 << n for n, g in enumerate(ids)}
    dmask = {g: sum(bit[f] for f in cx.boundary(g)) for g in ids}
    levels = sorted(set(cx.actions.values()))
    k = len(levels)
    Z, Bd = [], []
    for a in levels:
        sub = [g for g in ids if cx.action(g) <= a]
        Z.append(_kernel([(dmask[g], bit[g]) for g in sub]))
        Bd.append([dmask[g] for g in sub if dmask[g]])
    dimB = [_rank(b) for b in Bd]

    def r(i, j):  # 1-based levels, 0 means the empty sublevel set
        if i == 0:
            return 0
        return _rank(Z[i - 1] + Bd[j - 1]) - dimB[j - 1]

    bars = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            mu = r(i, j - 1) - r(i, j) - r(i - 1, j - 1) + r(i - 1, j)
            if mu < 0:
                raise AssertionError("negative multiplicity in oracle")
            if mu:
                bars.append((levels[i - 1], levels[j - 1], mu))
        mu = r(i, k) - r(i - 1, k)
        if mu:
            bars.append((levels[i - 1], INF, mu))
    return Barcode(bars)


# ---------------------------------------------------------------------------
# sub- and quotient complexes


@dataclass(frozen=True)
class TriangleDecomposition:
    low: FilteredComplex
    quotient: FilteredComplex
    threshold: float


def split_at(cx: FilteredComplex, tau: float) -> TriangleDecomposition:
    """Subcomplex of actions below ``tau`` and the quotient by it."""
    require_valid(cx)
    acts = cx.actions
    if any(a == tau for a in acts.values()):
        raise ValueError(f"split threshold {tau} coincides with a generator action")
    low_ids = [g for g in cx.ids if acts[g] < tau]
    high_ids = [g for g in cx.ids if acts[g] > tau]
    high = set(high_ids)
    low = FilteredComplex(((g, acts[g]) for g in low_ids), {g: cx.boundary(g) for g in low_ids})
    quotient = FilteredComplex(
        ((g, acts[g]) for g in high_ids),
        {g: cx.boundary(g) & high for g in high_ids},
    )
    return TriangleDecomposition(low, quotient, float(tau))


# ---------------------------------------------------------------------------
# bookkeeping


@dataclass(frozen=True)
class ConservationReport:
    ok: bool
    message: str = ""

    def __bool__(self):
        return self.ok


def endpoint_conservation_check(cx: FilteredComplex, eps: float = None, t: float = None) -> ConservationReport:
    """Check that bar endpoints account for every generator action exactly once.

    With ``eps`` and ``t`` given, also check the census form of the same fact:
    the number of generator actions in ``(0, t]`` equals
    ``nI + 2 nII + nIII + 2 nIV`` plus the bars born at or below 0 that die
    in ``(0, t]``.
    """
    bc = reduce(cx)
    endpoints = Counter()
    for b in bc:
        endpoints[b.birth] += b.multiplicity
        if not b.is_infinite:
            endpoints[b.death] += b.multiplicity
    actions = Counter(cx.actions.values())
    if endpoints != actions:
        diff = (endpoints - actions) + (actions - endpoints)
        return ConservationReport(False, f"endpoint multiset differs from actions at {sorted(diff)}")
    if eps is not None and t is not None:
        n1, n2, n3, n4 = bar_type_census(bc, eps, t)
        early = sum(b.multiplicity for b in bc if b.birth <= 0 < b.death <= t)
        lhs = sum(1 for a in cx.actions.values() if 0 < a <= t)
        rhs = n1 + 2 * n2 + n3 + 2 * n4 + early
        if lhs != rhs:
            return ConservationReport(False, f"{lhs} actions in (0, {t}] but census accounts for {rhs}")
    return ConservationReport(True)


def planted_barcode_complex(barcode: Barcode) -> FilteredComplex:
    """A complex whose barcode is exactly ``barcode``.

    Each finite bar ``[b, d)`` becomes a pair ``d -> b``; each infinite bar
    becomes a cycle.  Birth values must be disjoint from death values.
    """
    births = {b.birth for b in barcode}
    deaths = {b.death for b in barcode if not b.is_infinite}
    clash = births & deaths
    if clash:
        raise ValueError(f"birth and death values collide at {sorted(clash)}; perturb first")
    gens, bnd = [], {}
    k = 0
    for b in barcode:
        for _ in range(b.multiplicity):
            if b.is_infinite:
                gens.append((f"e{k}", b.birth))
            else:
                gens.append((f"b{k}", b.birth))
                gens.append((f"d{k}", b.death))
                bnd[f"d{k}"] = {f"b{k}"}
            k += 1
    return FilteredComplex(gens, bnd)


# ---------------------------------------------------------------------------
# text format


HEADER = "filtered-complex v1"


def format_complex(cx: FilteredComplex) -> str:
    lines = [HEADER]
    for g, a in cx.generators():
        lines.append(f"gen {g} {format_real(a)}")
    for g in cx.ids:
        faces = cx.boundary(g)
        if faces:
            lines.append("bnd " + " ".join([str(g)] + sorted(map(str, faces))))
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> FilteredComplex:
    """Parse the ``filtered-complex v1`` format.

    Raises :class:`ParseError` for malformed input and :class:`InvariantError`
    (naming the offending line) when the complex is not valid.
    """
    gens: list = []
    actions: dict = {}
    bnd: dict = {}
    gen_line: dict = {}
    bnd_line: dict = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not seen_header:
            if line != HEADER:
                raise ParseError(f"expected header {HEADER!r}", lineno)
            seen_header = True
            continue
        if parts[0] == "gen":
            if len(parts) != 3:
                raise ParseError("expected 'gen <id> <action>'", lineno)
            gid = parts[1]
            if gid in actions:
                raise ParseError(f"duplicate generator {gid!r}", lineno)
            try:
                actions[gid] = parse_real(parts[2])
            except ValueError:
                raise ParseError(f"bad action {parts[2]!r}", lineno) from None
            if not math.isfinite(actions[gid]):
                raise ParseError(f"action of {gid!r} must be finite", lineno)
            gens.append((gid, actions[gid]))
            gen_line[gid] = lineno
        elif parts[0] == "bnd":
            if len(parts) < 3:
                raise ParseError("expected 'bnd <id> <id>+'", lineno)
            gid, faces = parts[1], parts[2:]
            for x in [gid] + faces:
                if x not in actions:
                    raise ParseError(f"unknown generator id {x!r}", lineno)
            if gid in bnd:
                raise ParseError(f"second boundary line for {gid!r}", lineno)
            bnd[gid] = _f2_sum(faces)
            bnd_line[gid] = lineno
        else:
            raise ParseError(f"unknown record {parts[0]!r}", lineno)
    if not seen_header:
        raise ParseError(f"missing header {HEADER!r}", None)
    cx = FilteredComplex(gens, bnd)
    v = validate(cx)
    if v is not None:
        where = bnd_line.get(v.ids[0], gen_line.get(v.ids[0]))
        raise InvariantError(f"line {where}: {v}")
    return cx
