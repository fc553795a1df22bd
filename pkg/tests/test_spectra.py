import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from barcode_entropy import (
    Barcode,
    ChordSpectrum,
    GapModel,
    complex_from_spectrum,
    count_long_bars,
    count_prefix_bars,
    exp_spectrum,
    growth_rate,
    reduce,
    schottky_spectrum,
    torus_spectrum,
)
from barcode_entropy.errors import ParseError
from barcode_entropy.spectra import (
    SCHOTTKY_P,
    SCHOTTKY_Q,
    format_spectrum,
    parse_spectrum,
    standard_schottky_pair,
)

from oracles import lattice_count, reduced_words

INF = math.inf


def mobius(M, z):
    a, b, c, d = M.ravel()
    return (a * z + b) / (c * z + d)


def hyp(z, w):
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


class TestTorus:
    def test_half_offset_example(self):
        sp = torus_spectrum((0, 0), (0.5, 0), 1.2)
        assert sp.lengths.tolist() == pytest.approx([0.5, 1.118034], abs=1e-6)
        assert sp.multiplicities.tolist() == [2, 4]

    def test_same_point(self):
        sp = torus_spectrum((0.3, 0.7), (0.3, 0.7), 3.0)
        assert sp.lengths[0] == 1.0 and sp.multiplicities[0] == 4
        assert sp.counting(3.0) == lattice_count((0, 0), 3.0) - 1

    @pytest.mark.parametrize("v", [(0.0, 0.0), (0.5, 0.0), (0.25, 0.6), (0.9, 0.1)])
    def test_matches_lattice_oracle(self, v):
        sp = torus_spectrum((0, 0), v, 50.0)
        for t in np.linspace(0.5, 50, 23):
            expect = lattice_count(v, t) - (1 if v == (0.0, 0.0) else 0)
            assert sp.counting(t) == expect

    def test_gauss_circle(self):
        sp = torus_spectrum((0, 0), (0.2, 0.3), 200.0)
        assert abs(sp.total / 200.0 ** 2 - math.pi) <= 0.05 * math.pi

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            torus_spectrum((0, 0), (0, 0), 0)


class TestSchottky:
    def test_bound_zero(self):
        G = standard_schottky_pair()
        sp = schottky_spectrum(G, SCHOTTKY_P, SCHOTTKY_Q, 0)
        assert sp.total == 1
        assert sp.lengths[0] == pytest.approx(hyp(SCHOTTKY_P, SCHOTTKY_Q), abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_reduced_word_counts(self, n):
        sp = schottky_spectrum(standard_schottky_pair(), SCHOTTKY_P, SCHOTTKY_Q, n)
        assert sp.total == 1 + sum(reduced_words(2, k) for k in range(1, n + 1))
        assert reduced_words(2, n) == 4 * 3 ** (n - 1)

    def test_matches_mobius_enumeration(self):
        G = standard_schottky_pair()
        letters = [G[0], np.linalg.inv(G[0]), G[1], np.linalg.inv(G[1])]
        dists = [hyp(SCHOTTKY_P, SCHOTTKY_Q)]
        for n in range(1, 5):
            for w in itertools.product(range(4), repeat=n):
                if any(w[i + 1] == w[i] ^ 1 for i in range(n - 1)):
                    continue
                z = SCHOTTKY_Q
                for k in reversed(w):
                    z = mobius(letters[k], z)
                dists.append(hyp(SCHOTTKY_P, z))
        got = schottky_spectrum(G, SCHOTTKY_P, SCHOTTKY_Q, 4).expanded()
        assert np.allclose(np.sort(dists), got, atol=1e-9)

    def test_complete_radius_is_honest(self):
        G = standard_schottky_pair()
        short = schottky_spectrum(G, SCHOTTKY_P, SCHOTTKY_Q, 6)
        deep = schottky_spectrum(G, SCHOTTKY_P, SCHOTTKY_Q, 10)
        R = short.complete_radius
        assert 0 < R < short.cutoff
        assert short.counting(R) == deep.counting(R)

    def test_growth_on_complete_radius(self):
        sp = schottky_spectrum(standard_schottky_pair(), SCHOTTKY_P, SCHOTTKY_Q, 12)
        R = sp.complete_radius
        ts = np.linspace(R / 2, R, 12)
        rate = growth_rate(list(zip(ts, sp.counting(ts)))).rate
        assert 0.5 <= rate <= 1.3

    def test_overlapping_circles_certify_nothing(self):
        A = np.array([[2.0, 3.0], [1.0, 2.0]])
        sp = schottky_spectrum([A, A.T], 1j, 2j, 3)
        assert sp.complete_radius == 0.0

    def test_rejects_determinant(self):
        with pytest.raises(ValueError, match="determinant"):
            schottky_spectrum([np.eye(2) * 2], 1j, 1j, 2)

    def test_rejects_word_bound(self):
        with pytest.raises(ValueError):
            schottky_spectrum(standard_schottky_pair(), 1j, 1j, 15)

    def test_rejects_lower_half_plane(self):
        with pytest.raises(ValueError):
            schottky_spectrum(standard_schottky_pair(), -1j, 1j, 1)


class TestExp:
    def test_size(self):
        # lengths log(k)/h for k >= 2: floor(e^10) - 1 entries
        assert exp_spectrum(0.5, 20).total == 22025

    def test_counting_at_knots(self):
        sp = exp_spectrum(0.5, 10)
        k = np.arange(2, 100)
        assert np.array_equal(sp.counting(np.log(k) / 0.5), k - 1)

    def test_counting_closed_form(self):
        sp = exp_spectrum(0.7, 12)
        t = np.linspace(0.1, 12, 97)
        assert np.array_equal(sp.counting(t), np.floor(np.exp(0.7 * t)).astype(int) - 1)

    def test_growth_rate(self):
        sp = exp_spectrum(0.5, 20)
        ts = np.linspace(10, 20, 21)
        assert growth_rate(list(zip(ts, sp.counting(ts)))).rate == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize("h, t", [(0.0, 1.0), (-1.0, 1.0), (1.0, 31.0)])
    def test_rejects(self, h, t):
        with pytest.raises(ValueError):
            exp_spectrum(h, t)


class TestComplexFromSpectrum:
    S = ChordSpectrum.from_values([1.0, 2.0], 3.0)

    def test_trivial_with_zero_action(self):
        assert reduce(complex_from_spectrum(self.S, zero_action_count=1)) == Barcode([(0, INF), (1, INF), (2, INF)])

    def test_planted_constant_gap(self):
        cx = complex_from_spectrum(self.S, GapModel("planted", "constant", (0.1,)), zero_action_count=2)
        assert reduce(cx) == Barcode([(0, INF, 2), (1, 1.1), (2, 2.1)])

    def test_trivial_counts_match_prefix(self):
        sp = torus_spectrum((0, 0), (0.3, 0.1), 6.0)
        bc = reduce(complex_from_spectrum(sp, zero_action_count=3))
        assert bc.n_infinite == sp.total + 3 == len(bc)
        for t in (1.0, 2.5, 6.0):
            for eps in (0.1, 1.0, 5.0):
                assert count_prefix_bars(bc, eps, t) == sp.counting(t) + 3

    @given(st.integers(0, 2**32 - 1), st.sampled_from(["constant", "uniform", "exponential"]))
    def test_planted_bars_have_known_lengths(self, seed, dist):
        params = {"constant": (0.3,), "uniform": (0.1, 0.5), "exponential": (0.2,)}[dist]
        model = GapModel("planted", dist, params, seed)
        sp = exp_spectrum(1.0, 3.0)
        bc = reduce(complex_from_spectrum(sp, model))
        gaps = model.gaps(sp.total)
        births = sp.expanded()
        deaths = births + gaps
        assert bc == Barcode(zip(births, deaths))
        # compare against the realized lengths: t + g - t need not equal g
        assert count_long_bars(bc, 0.3) == int(np.sum(deaths - births >= 0.3))

    def test_rejects(self):
        with pytest.raises(ValueError):
            complex_from_spectrum(self.S, zero_action_count=-1)
        with pytest.raises(ValueError):
            complex_from_spectrum(self.S, GapModel("bogus"))
        with pytest.raises(ValueError):
            complex_from_spectrum(self.S, GapModel("planted", "constant", (0.0,)))


class TestChordSpectrum:
    def test_merging(self):
        sp = ChordSpectrum.from_values([1.0, 1.0 + 1e-14, 2.0, 5.0], 3.0)
        assert sp.multiplicities.tolist() == [2, 1]
        assert sp.cutoff == 3.0

    @pytest.mark.parametrize(
        "lengths, mult",
        [([0.0], [1]), ([2.0, 1.0], [1, 1]), ([1.0], [0]), ([4.0], [1])],
    )
    def test_rejects_invalid(self, lengths, mult):
        with pytest.raises(ValueError):
            ChordSpectrum(np.array(lengths), np.array(mult), 3.0)

    def test_counting_monotone(self):
        sp = torus_spectrum((0, 0), (0.1, 0.4), 10.0)
        assert np.all(np.diff(sp.counting(np.linspace(0, 10, 500))) >= 0)


class TestTextFormat:
    @pytest.mark.parametrize(
        "sp",
        [
            torus_spectrum((0, 0), (0.5, 0), 4.0),
            exp_spectrum(1.0, 4.0),
            ChordSpectrum.from_values([], 1.0),
        ],
    )
    def test_round_trip(self, sp):
        back = parse_spectrum(format_spectrum(sp))
        assert np.array_equal(back.lengths, sp.lengths)
        assert np.array_equal(back.multiplicities, sp.multiplicities)
        assert back.cutoff == sp.cutoff

    def test_deterministic(self):
        G = standard_schottky_pair()
        a = format_spectrum(schottky_spectrum(G, SCHOTTKY_P, SCHOTTKY_Q, 5))
        b = format_spectrum(schottky_spectrum(G, SCHOTTKY_P, SCHOTTKY_Q, 5))
        assert a == b
        assert "# complete below" in a

    @pytest.mark.parametrize(
        "text, line",
        [
            ("spectrum v2\n", 1),
            ("spectrum v1\nchord 1\ncutoff 2\n", 2),
            ("spectrum v1\ncutoff 2\nchord 1 1\n", 3),
            ("spectrum v1\nchord x 1\ncutoff 2\n", 2),
        ],
    )
    def test_errors(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_spectrum(text)
        assert exc.value.lineno == line

    def test_missing_cutoff_and_bad_order(self):
        with pytest.raises(ParseError):
            parse_spectrum("spectrum v1\nchord 1 1\n")
        with pytest.raises(ParseError):
            parse_spectrum("spectrum v1\nchord 2 1\nchord 1 1\ncutoff 3\n")
