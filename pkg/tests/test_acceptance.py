"""Acceptance criteria, each with its tolerance and wall-clock limit.

Every test prints one ``PASS``/``FAIL`` line (collected into the terminal
summary by conftest).  Run with ``pytest tests/test_acceptance.py`` or
directly with ``python3 tests/test_acceptance.py``.
"""

import math
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from barcode_entropy import (  # noqa: E402
    Barcode,
    ConvexProfile,
    FamilyMember,
    GapModel,
    ScalingFamily,
    action_of_length,
    barcode_entropy,
    bottleneck,
    check_bilipschitz,
    complex_from_spectrum,
    count_long_bars,
    count_prefix_bars,
    crofton_lines,
    exp_spectrum,
    oracle_barcode,
    positive_part_entropy,
    profile_family,
    reduce,
    scaled_profile,
    split_at,
    tomograph_census,
    torus_spectrum,
    truncate,
)
from barcode_entropy.entropy import entropy_from_barcodes  # noqa: E402
from barcode_entropy.geometry import TrigPoly, calibrate_tomograph_constant, circle, curve_family  # noqa: E402
from barcode_entropy.synthetic import filling_pair, perturb_actions, random_complex  # noqa: E402

RESULTS: list[str] = []
EPS = (0.4, 0.2, 0.1)


def verdict(n: int, title: str, ok: bool, elapsed: float, limit: float, detail: str) -> None:
    passed = ok and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'} criterion {n:>2} {title}: {detail}; {elapsed:.2f}s (limit {limit:g}s)"
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert elapsed < limit, line


def _random_barcode(rng, max_bars=8):
    k = int(rng.integers(0, max_bars + 1))
    bars = []
    for _ in range(k):
        b = float(rng.integers(-40, 41)) / 4
        if rng.random() < 0.2:
            bars.append((b, math.inf))
        else:
            bars.append((b, b + float(rng.integers(1, 41)) / 4))
    return Barcode(bars)


def test_criterion_1_reduction_correctness():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    bad = 0
    for i in range(1000):
        cx = random_complex(rng, int(rng.integers(0, 13)), action_grid=6 if i % 4 == 0 else None)
        bad += reduce(cx) != oracle_barcode(cx)
    elapsed = time.perf_counter() - start
    verdict(1, "reduction = oracle", bad == 0, elapsed, 10, f"{bad} mismatches over 1000 complexes")


def test_criterion_2_stability():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst = -math.inf
    bad = 0
    for _ in range(500):
        cx = random_complex(rng, int(rng.integers(1, 13)))
        delta = float(rng.uniform(0.01, 1.0))
        moved = perturb_actions(rng, cx, delta)
        d = bottleneck(reduce(cx), reduce(moved))
        worst = max(worst, d - delta)
        bad += d > delta + 1e-12
    elapsed = time.perf_counter() - start
    verdict(2, "stability", bad == 0, elapsed, 30, f"{bad} violations, max d - delta = {worst:.3g}")


def test_criterion_3_exact_triangle():
    rng = np.random.default_rng(3)
    grid = np.linspace(0.1, 3.0, 10)
    start = time.perf_counter()
    bad = 0
    for _ in range(500):
        cx = random_complex(rng, int(rng.integers(1, 13)))
        acts = set(cx.actions.values())
        tau = float(rng.uniform(0, 10))
        while tau in acts:
            tau = float(rng.uniform(0, 10))
        tri = split_at(cx, tau)
        full, low, quo = reduce(cx), reduce(tri.low), reduce(tri.quotient)
        for eps in grid:
            bad += count_long_bars(full, 2 * eps) > count_long_bars(low, eps) + count_long_bars(quo, eps)
    elapsed = time.perf_counter() - start
    verdict(3, "exact-triangle inequality", bad == 0, elapsed, 30, f"{bad} violations over 500 splits x 10 eps")


def test_criterion_4_truncation():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    contraction = sandwich = 0
    for _ in range(1000):
        a, b = _random_barcode(rng), _random_barcode(rng)
        T = float(rng.integers(-40, 41)) / 4
        contraction += bottleneck(truncate(a, T), truncate(b, T)) > bottleneck(a, b)
        eps = float(rng.integers(1, 21)) / 4
        t = float(rng.integers(-40, 41)) / 4
        mid = count_long_bars(truncate(a, t), eps)
        sandwich += not count_prefix_bars(a, eps, t - eps) <= mid <= count_prefix_bars(a, eps, t)
    elapsed = time.perf_counter() - start
    verdict(4, "truncation contraction and sandwich", contraction + sandwich == 0, elapsed, 10,
            f"{contraction} contraction and {sandwich} sandwich violations over 1000 draws")


def test_criterion_5_reparametrization():
    start = time.perf_counter()
    prof = ConvexProfile.quadratic(r_max=2.0, T=2.0)
    t = np.linspace(0, 2, 1000)
    err = float(np.max(np.abs(action_of_length(prof, t) - (t + t * t / 4))))
    bilip = check_bilipschitz(prof, t)
    mono = True
    for s1, s2 in [(1, 2), (2, 5), (5, 40)]:
        a1 = action_of_length(scaled_profile(prof, s1), t)
        a2 = action_of_length(scaled_profile(prof, s2), t)
        mono &= bool(np.all(a2 <= a1 + 1e-12) and np.all(a2 >= t - 1e-12))
    elapsed = time.perf_counter() - start
    ok = err <= 1e-9 and bilip is None and mono
    verdict(5, "reparametrization", ok, elapsed, 5,
            f"max |A - closed form| = {err:.2e}, bilipschitz {'ok' if bilip is None else bilip}, "
            f"scaling monotone {mono}")


def _member_family(cx, levels):
    return ScalingFamily(tuple(FamilyMember(f"t={t:g}", float(t), float(t), complex=cx) for t in levels))


def test_criterion_6_entropy_calibration():
    start = time.perf_counter()
    exp_cx = complex_from_spectrum(exp_spectrum(0.5, 20.0), zero_action_count=3)
    exp_fam = _member_family(exp_cx, np.linspace(4, 20, 17))
    torus_cx = complex_from_spectrum(torus_spectrum((0, 0), (0.3, 0.4), 200.0), zero_action_count=3)
    torus_fam = _member_family(torus_cx, np.linspace(10, 200, 20))
    e_full, e_pos, e_cmp = positive_part_entropy(exp_fam, 0.5, EPS)
    t_full, t_pos, t_cmp = positive_part_entropy(torus_fam, 0.5, EPS)
    elapsed = time.perf_counter() - start
    ok = (
        abs(e_full.headline - 0.5) <= 0.05
        and t_full.headline <= 0.05
        and abs(e_full.headline - e_pos.headline) <= 0.02
        and abs(t_full.headline - t_pos.headline) <= 0.02
        and not e_cmp.count_violations
        and not t_cmp.count_violations
    )
    verdict(6, "entropy calibration", ok, elapsed, 60,
            f"exp {e_full.headline:.4f} (positive {e_pos.headline:.4f}), "
            f"torus {t_full.headline:.4f} (positive {t_pos.headline:.4f})")


def test_criterion_7_profile_independence():
    start = time.perf_counter()
    spec = exp_spectrum(0.5, 22.0)
    scales = np.linspace(2, 10, 9)
    heads = []
    for r_max in (2.0, 4.0):
        fam = profile_family(spec, ConvexProfile.quadratic(r_max=r_max, T=2.0), scales)
        heads.append(barcode_entropy(fam, EPS).headline)
    elapsed = time.perf_counter() - start
    diff = abs(heads[0] - heads[1])
    verdict(7, "profile independence", diff <= 0.05, elapsed, 60,
            f"r_max=2 {heads[0]:.4f}, r_max=4 {heads[1]:.4f}, difference {diff:.4f}")


def test_criterion_8_low_action_independence():
    eta = 0.5
    spec = exp_spectrum(0.5, 9.3)
    base = complex_from_spectrum(spec, GapModel("planted", "uniform", (0.05, 1.5), seed=8))
    ids = base.ids
    index = {g: i for i, g in enumerate(ids)}
    acts = [base.action(g) for g in ids]
    D = [sum(1 << index[f] for f in base.boundary(g)) for g in ids]
    levels = np.linspace(2.0, 9.3, 12)
    fam = ScalingFamily.truncations(Barcode(), levels)
    rng = np.random.default_rng(8)
    start = time.perf_counter()
    short_bad = head_bad = differ = 0
    max_gap = 0.0
    for _ in range(200):
        fp = filling_pair(rng, acts, D, gap=eta, n_low=tuple(int(x) for x in rng.integers(2, 7, size=2)))
        bcs = [reduce(fp.first), reduce(fp.second)]
        differ += bcs[0] != bcs[1]
        shorts = [Barcode(b for b in bc if b.birth > fp.energy and b.length < eta) for bc in bcs]
        short_bad += shorts[0] != shorts[1]
        heads = [entropy_from_barcodes([bc] * len(levels), fam, EPS, count="census").headline for bc in bcs]
        max_gap = max(max_gap, abs(heads[0] - heads[1]))
        head_bad += heads[0] != heads[1]
    elapsed = time.perf_counter() - start
    verdict(8, "low-action independence", short_bad + head_bad == 0, elapsed, 30,
            f"{short_bad} short-bar and {head_bad} headline mismatches over 200 filling pairs "
            f"({len(ids)} shared generators, full barcodes differ in {differ}), max headline gap {max_gap:.3g}")


def test_criterion_9_crofton():
    start = time.perf_counter()
    res = crofton_lines(circle(), 100_000, seed=7)
    again = crofton_lines(circle(), 100_000, seed=7)
    target = 4 * math.pi
    circle_ok = abs(res.estimate - target) <= 0.05 * target + 3 * res.stderr and res == again
    worst = 0.0
    family_ok = True
    for curve in curve_family():
        r = crofton_lines(curve, 10_000, seed=11)
        family_ok &= r.estimate <= 2 * 1.05 * r.length + 3 * r.stderr
        worst = max(worst, r.ratio)
    elapsed = time.perf_counter() - start
    verdict(9, "Crofton", circle_ok and family_ok, elapsed, 30,
            f"circle {res.estimate:.4f} vs 4pi {target:.4f} (stderr {res.stderr:.2g}), "
            f"family max ratio {worst:.4f}")


def test_criterion_10_tomograph():
    r, d = 0.1, 4
    calibration = [TrigPoly()] + [TrigPoly((0.0,) * (k - 1) + (a,)) for k in (1, 2, 3) for a in (r / 2, r, 2 * r)]
    references = [
        TrigPoly(),
        TrigPoly((0.05,), (0.0, 0.08)),
        TrigPoly((0.0, 0.2), (0.1,)),
        TrigPoly((0.03, 0.02, 0.01), (0.04,)),
        TrigPoly((0.15,), (0.05, 0.05, 0.02)),
    ]
    start = time.perf_counter()
    const = calibrate_tomograph_constant(calibration, d, r, 20_000, seed=100)
    worst_deg = 0.0
    worst_ratio = 0.0
    bound_ok = True
    for k, g in enumerate(references):
        res = tomograph_census(g, d, r, 100_000, seed=200 + k)
        worst_deg = max(worst_deg, res.degenerate_fraction)
        ratio = res.mean_n / g.graph_length()
        worst_ratio = max(worst_ratio, ratio)
        bound_ok &= ratio <= const
    elapsed = time.perf_counter() - start
    verdict(10, "tomograph", worst_deg < 1e-3 and bound_ok, elapsed, 60,
            f"max degenerate fraction {worst_deg:.2g}, max mean N / length {worst_ratio:.4f} "
            f"<= calibrated constant {const:.4f}")


if __name__ == "__main__":
    tests = [fn for name, fn in globals().items() if name.startswith("test_criterion_")]
    failed = 0
    for fn in sorted(tests, key=lambda f: int(f.__name__.split("_")[2])):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
