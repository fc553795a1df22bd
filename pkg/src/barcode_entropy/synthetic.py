"""Random valid filtered complexes and synthetic filling pairs.

Random complexes start from a planted normal form (cycles and pairs
``z -> y``) and are then scrambled by a random filtered change of basis,
``e_i -> e_i + (sum of generators of strictly lower action)``.  Every valid
complex over F2 is filtered-isomorphic to such a normal form, so this
reaches all of them while keeping the differential valid by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import FilteredComplex, validate


def _lower_mixing(rng, acts, density):
    """Basis change G as bitmasks: G[i] = e_i + random strictly-lower terms."""
    n = len(acts)
    G = []
    for i in range(n):
        m = 1 << i
        for j in range(n):
            if acts[j] < acts[i] and rng.random() < density:
                m |= 1 << j
        G.append(m)
    return G


def _invert_unitriangular(G):
    """Inverse of a unitriangular (in action order) F2 matrix given by columns."""
    n = len(G)
    # solve column by column: G is "lower" w.r.t. action, so Gauss-Jordan works
    rows = [(G[i], 1 << i) for i in range(n)]
    pivots = {}
    for vec, src in rows:
        while vec:
            top = vec.bit_length() - 1
            if top not in pivots:
                pivots[top] = (vec, src)
                break
            pv, ps = pivots[top]
            vec ^= pv
            src ^= ps
    # back-substitute so that each pivot vector is a single bit
    for top in sorted(pivots):
        vec, src = pivots[top]
        rest = vec ^ (1 << top)
        while rest:
            b = rest.bit_length() - 1
            pv, ps = pivots[b]
            vec ^= pv
            src ^= ps
            rest = vec ^ (1 << top)
        pivots[top] = (vec, src)
    return [pivots[i][1] for i in range(n)]


def _bits(v):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def _apply(M, v):
    out = 0
    while v:
        low = v & -v
        out ^= M[low.bit_length() - 1]
        v ^= low
    return out


def conjugate(D, G, Ginv):
    """Differential G^{-1} D G, all maps as lists of column bitmasks."""
    return [_apply(Ginv, _apply(D, G[i])) for i in range(len(D))]


def random_complex(
    rng: np.random.Generator,
    n: int,
    *,
    pair_fraction: float = 0.7,
    action_grid: int | None = None,
    mixing: float = 0.4,
) -> FilteredComplex:
    """A random valid complex on ``n`` generators.

    Actions are uniform on [0, 10), or drawn from ``action_grid`` integer
    values when given (which produces ties between unrelated generators).
    """
    if action_grid:
        acts = [float(x) for x in rng.integers(0, action_grid, size=n)]
    else:
        acts = [float(x) for x in np.round(rng.uniform(0, 10, size=n), 6)]
    idx = [int(x) for x in rng.permutation(n)]
    D = [0] * n
    used = set()
    n_pairs = int(rng.binomial(n // 2, pair_fraction)) if n >= 2 else 0
    made = 0
    for a in idx:
        if made >= n_pairs:
            break
        if a in used:
            continue
        candidates = [b for b in idx if b not in used and b != a and acts[b] < acts[a]]
        if not candidates:
            continue
        b = candidates[int(rng.integers(len(candidates)))]
        D[a] = 1 << b
        used.update((a, b))
        made += 1
    G = _lower_mixing(rng, acts, mixing)
    Dp = conjugate(D, G, _invert_unitriangular(G))
    ids = [f"g{i}" for i in range(n)]
    bnd = {ids[i]: [ids[j] for j in _bits(Dp[i])] for i in range(n)}
    cx = FilteredComplex(zip(ids, acts), bnd)
    assert validate(cx) is None, validate(cx)
    return cx


def perturb_actions(rng, cx: FilteredComplex, delta: float, max_tries: int = 100) -> FilteredComplex:
    """Move each action by at most ``delta`` while keeping the complex valid."""
    for _ in range(max_tries):
        new = {g: a + float(rng.uniform(-delta, delta)) for g, a in cx.actions.items()}
        out = cx.with_actions(new)
        if validate(out) is None:
            return out
    return cx


# ---------------------------------------------------------------------------
# filling pairs


@dataclass(frozen=True)
class FillingPair:
    """Two complexes sharing their positive-action part.

    ``first`` and ``second`` agree on the generators with action above
    ``energy``; their differentials on those generators differ only by
    terms of action below ``energy`` and by terms at least ``gap`` lower in
    action than the generator.
    """

    first: FilteredComplex
    second: FilteredComplex
    energy: float
    gap: float


def _random_annihilator(rng, vectors, n):
    """Random F2 functional on n bits vanishing on the span of ``vectors``."""
    rows: dict[int, int] = {}
    for v in vectors:
        for p, r in rows.items():
            if v >> p & 1:
                v ^= r
        if not v:
            continue
        p = v.bit_length() - 1
        for q in list(rows):
            if rows[q] >> p & 1:
                rows[q] ^= v
        rows[p] = v
    phi = 0
    for f in range(n):
        if f in rows or rng.random() < 0.5:
            continue
        x = 1 << f
        for p, r in rows.items():
            if r >> f & 1:
                x |= 1 << p
        phi ^= x
    return phi


def filling_pair(
    rng: np.random.Generator,
    w_actions,
    w_differential,
    *,
    gap: float,
    n_low: tuple[int, int] = (3, 3),
    low_range: tuple[float, float] = (-2.0, 0.0),
    basis_density: float = 0.3,
) -> FillingPair:
    """Glue a shared high-action complex onto two different low-action parts.

    ``w_actions`` are positive actions of the shared part and
    ``w_differential`` its differential as column bitmasks.  In the second
    complex the shared part is re-expressed in a basis changed only by terms
    at least ``gap`` lower in action, so its differential differs from the
    first one by such terms.  Each low part is a random complex whose cycles
    receive the maps from the shared part.
    """
    w_actions = [float(a) for a in w_actions]
    m = len(w_actions)
    complexes = []
    for side, n_v in enumerate(n_low):
        if side == 0:
            Dw = list(w_differential)
        else:
            G = []
            for i in range(m):
                col = 1 << i
                for j in range(m):
                    if w_actions[j] < w_actions[i] - gap and rng.random() < basis_density:
                        col |= 1 << j
                G.append(col)
            Dw = conjugate(list(w_differential), G, _invert_unitriangular(G))
        v_acts = [float(x) for x in np.round(rng.uniform(*low_range, size=n_v), 6)]
        # low part: random pairs among V, plus maps W -> cycles of V
        Dv = [0] * n_v
        order = sorted(range(n_v), key=lambda i: v_acts[i])
        for a in order[::-1]:
            if any(Dv[c] >> a & 1 for c in range(n_v)):
                continue
            hit = {c for c in range(n_v) for b in range(n_v) if Dv[b] >> c & 1}
            lower = [b for b in order if v_acts[b] < v_acts[a] and Dv[b] == 0 and b not in hit]
            if lower and rng.random() < 0.4:
                b = lower[int(rng.integers(len(lower)))]
                Dv[a] = 1 << b
        cycles = [i for i in range(n_v) if Dv[i] == 0]
        # phi: W -> span(cycles), phi o Dw = 0
        phi_rows = []
        for c in cycles:
            phi_rows.append((c, _random_annihilator(rng, Dw, m)))
        ids_v = [f"v{side}_{i}" for i in range(n_v)]
        ids_w = [f"w{i}" for i in range(m)]
        gens = list(zip(ids_v, v_acts)) + list(zip(ids_w, w_actions))
        bnd = {ids_v[i]: [ids_v[j] for j in range(n_v) if Dv[i] >> j & 1] for i in range(n_v)}
        for i in range(m):
            faces = [ids_w[j] for j in _bits(Dw[i])]
            faces += [ids_v[c] for c, phi in phi_rows if phi >> i & 1]
            bnd[ids_w[i]] = faces
        cx = FilteredComplex(gens, bnd)
        v = validate(cx)
        if v is not None:
            raise AssertionError(f"filling construction produced an invalid complex: {v}")
        complexes.append(cx)
    energy = 0.5 * (low_range[1] + min(w_actions, default=low_range[1] + 1.0))
    return FillingPair(complexes[0], complexes[1], energy, gap)
