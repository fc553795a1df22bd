import math

import numpy as np
import pytest
from hypothesis import given

from barcode_entropy import FilteredComplex, crofton_lines, intersection_bound_check, tomograph_census
from barcode_entropy.geometry import (
    TrigPoly,
    calibrate_tomograph_constant,
    circle,
    curve_family,
    segment,
)

from strategies import complexes


class TestCurves:
    @pytest.mark.parametrize(
        "curve, length",
        [(circle(), 2 * math.pi), (circle(2.0), 4 * math.pi), (segment(1.5), 1.5)],
    )
    def test_lengths(self, curve, length):
        assert curve.length() == pytest.approx(length, rel=1e-9)

    def test_square_length(self):
        sq = next(c for c in curve_family() if c.name == "square")
        assert sq.length() == pytest.approx(4.0, rel=1e-9)

    def test_family_size_and_names(self):
        names = [c.name for c in curve_family()]
        assert len(names) == 10 == len(set(names))


class TestCrofton:
    def test_circle(self):
        res = crofton_lines(circle(), 100_000, seed=7)
        assert abs(res.estimate - 4 * math.pi) <= 0.05 * 4 * math.pi + 3 * res.stderr
        assert res.ratio == pytest.approx(2.0, rel=0.05)

    def test_segment(self):
        res = crofton_lines(segment(2.0), 50_000, seed=1)
        assert abs(res.ratio - 2.0) <= 0.05 * 2 + 3 * res.stderr / res.length

    def test_scaling(self):
        base = crofton_lines(circle().scaled(1.0), 20_000, seed=3)
        big = crofton_lines(circle().scaled(3.0), 20_000, seed=3)
        ellipse = curve_family()[2]
        e1 = crofton_lines(ellipse, 20_000, seed=5)
        e3 = crofton_lines(ellipse.scaled(3.0), 20_000, seed=5)
        assert big.estimate == pytest.approx(3 * base.estimate, rel=1e-9)
        assert abs(e3.estimate - 3 * e1.estimate) <= 2 * (e3.stderr + 3 * e1.stderr)

    def test_family_inequality(self):
        for curve in curve_family():
            res = crofton_lines(curve, 10_000, seed=11)
            assert res.estimate <= 2 * (1 + 0.05) * res.length + 3 * res.stderr, curve.name

    def test_table_input(self):
        u = np.linspace(0, 2 * math.pi, 4000, endpoint=False)
        res = crofton_lines(np.column_stack([np.cos(u), np.sin(u)]), 10_000, seed=2, closed=True)
        assert res.length == pytest.approx(2 * math.pi, rel=1e-5)
        assert res.ratio == pytest.approx(2.0, rel=1e-5)

    def test_seed_reproducible(self):
        a = crofton_lines(curve_family()[4], 10_000, seed=9)
        b = crofton_lines(curve_family()[4], 10_000, seed=9)
        c = crofton_lines(curve_family()[4], 10_000, seed=10)
        assert a == b and a != c

    @pytest.mark.parametrize(
        "table",
        [
            [[0, 0], [1, math.inf]],
            [[0, 0], [1, 0], [1, 0], [2, 0]],
            [[0, 0], [1, 0], [0, 0], [1, 0]],
            [[0, 0]],
        ],
    )
    def test_rejects_tables(self, table):
        with pytest.raises(ValueError):
            crofton_lines(np.array(table, dtype=float), 10_000, seed=0)

    def test_rejects_few_samples(self):
        with pytest.raises(ValueError):
            crofton_lines(circle(), 9_999, seed=0)


class TestTomograph:
    def test_pure_sinusoid_has_two_critical_points(self):
        res = tomograph_census(TrigPoly(), 2, 1.0, 20_000, seed=4)
        assert res.mean_n == 2.0 and res.max_n == 2
        assert res.degenerate_fraction == 0.0

    def test_counts_are_even(self):
        # zeros of a periodic function's derivative come in max/min pairs
        res = tomograph_census(TrigPoly((0.05,), (0.0, 0.08)), 4, 0.1, 5_000, seed=1)
        assert res.max_n % 2 == 0 and 2 <= res.mean_n <= 8

    def test_degenerate_fraction_small(self):
        res = tomograph_census(TrigPoly((0.1,)), 4, 0.1, 20_000, seed=2)
        assert res.degenerate_fraction < 1e-3

    def test_calibrated_bound(self):
        r = 0.1
        calib = [TrigPoly((0.0,) * (k - 1) + (a,)) for k in (1, 2) for a in (0.0, r)]
        const = calibrate_tomograph_constant(calib, 4, r, 5_000, seed=0)
        g = TrigPoly((0.03, 0.02), (0.05,))
        res = tomograph_census(g, 4, r, 5_000, seed=50)
        assert res.mean_n <= const * g.graph_length()

    def test_graph_length(self):
        assert TrigPoly().graph_length() == pytest.approx(2 * math.pi)
        assert TrigPoly((1.0,)).graph_length() > 2 * math.pi

    def test_seed_reproducible(self):
        g = TrigPoly((0.02,), (0.03,))
        assert tomograph_census(g, 3, 0.1, 2_000, seed=5) == tomograph_census(g, 3, 0.1, 2_000, seed=5)

    @pytest.mark.parametrize("d, r", [(1, 0.1), (0, 0.1), (2, 0.0), (2, -1.0)])
    def test_rejects(self, d, r):
        with pytest.raises(ValueError):
            tomograph_census(TrigPoly(), d, r, 100, seed=0)


class TestIntersectionBound:
    def test_pair(self):
        rep = intersection_bound_check(FilteredComplex([("a", 1), ("b", 2)], {"b": ["a"]}), 0.5)
        assert rep and (rep.n_generators, rep.n_finite, rep.n_infinite) == (2, 1, 0)

    def test_trivial_differential(self):
        rep = intersection_bound_check(FilteredComplex([(f"g{i}", i) for i in range(5)]), 1.0)
        assert rep and (rep.n_generators, rep.n_finite, rep.n_infinite) == (5, 0, 5)

    def test_long_bar_count(self):
        rep = intersection_bound_check(FilteredComplex([("a", 0), ("b", 0.5), ("c", 3)], {"b": ["a"]}), 1.0)
        assert rep.n_long == 1 and rep.n_bars == 2

    @given(complexes(max_generators=14, grid=5))
    def test_random(self, cx):
        rep = intersection_bound_check(cx, 0.5)
        assert rep, rep.message
