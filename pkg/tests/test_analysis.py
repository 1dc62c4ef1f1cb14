import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ivtdds import analysis
from ivtdds.adds import type_one, type_two
from ivtdds.analysis import SeriesVerdict, box_counts, box_dimension, graph_points, ratio_sequence
from ivtdds.errors import DegenerateSample

# spread of |a_n / a_{n+1}| over n in [100, 1000] for j=11, A=1, B=1,
# pinned from a string-based digit substitution oracle
J11_SPREAD = 2.748971193415638


class TestGraph:
    def test_points(self):
        g = graph_points(type_one(3, 8, 1, 0), 27)
        assert g.points[16] == (16, 20)
        assert g.normalization == (0, 26, 0, 26)

    def test_floor(self):
        with pytest.raises(ValueError):
            graph_points(type_one(3, 8, 1, 0), 26)

    def test_unit_square(self):
        u = graph_points(type_one(3, 21, 1, 0), 81).unit_square()
        assert u.min() == 0.0 and u.max() == 1.0
        assert np.allclose(u[:, 0], u[:, 1])


class TestBoxCounting:
    def test_filled_square_is_two(self):
        # a full 3^6 x 3^6 lattice, checked straight through box_counts
        k = 3**5
        xs, ys = np.meshgrid(np.arange(k), np.arange(k))
        pts = np.stack([xs.ravel(), ys.ravel()], axis=1) / (k - 1)
        counts = box_counts(pts, 3, (1, 2, 3, 4))
        assert counts == [9, 81, 729, 6561]

    @pytest.mark.parametrize("j", [0, 21])
    def test_flat_and_diagonal(self, j):
        fit = box_dimension(graph_points(type_one(3, j, 1, 1)))
        assert fit.dimension == pytest.approx(1.0, abs=0.05)

    def test_j1_measured(self):
        # the digit map keeps each column of the grid inside one row band,
        # so the graph measures close to 1 rather than close to 2
        fit = box_dimension(graph_points(type_one(3, 1, 1, 1)))
        assert fit.counts == (5, 17, 53, 161, 486, 729)
        assert fit.dimension == pytest.approx(0.93836, abs=1e-5)

    def test_needs_levels(self):
        with pytest.raises(ValueError):
            box_dimension(graph_points(type_one(3, 7, 1, 1)), (1, 2, 3))

    def test_degenerate(self):
        spec = type_one(3, 0, 1, 0)
        sample = analysis.GraphSample(spec, ((0, 0),) * 30, (0, 0, 0, 0))
        with pytest.raises(DegenerateSample):
            box_dimension(sample)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 26), st.integers(0, 2), st.integers(1, 2))
    def test_counts_monotone(self, j, add, mul):
        unit = graph_points(type_one(3, j, mul, add), 729).unit_square()
        counts = box_counts(unit, 3, range(1, 7))
        assert all(a <= b for a, b in zip(counts, counts[1:]))
        assert counts[-1] <= 729


class TestSeries:
    def test_identity(self):
        s = ratio_sequence(type_one(3, 21, 1, 1))
        assert s.ratios[1000] > 0.999
        assert s.verdict is SeriesVerdict.RADIUS_ONE

    def test_j11(self):
        s = ratio_sequence(type_one(3, 11, 1, 1))
        assert s.verdict is SeriesVerdict.NON_CONVERGENT
        assert s.spread(100, 1000) == pytest.approx(J11_SPREAD, rel=1e-12)
        assert s.limit_estimate is None

    def test_constant(self):
        s = ratio_sequence(type_one(3, 0, 1, 1))
        assert set(s.ratios) == {1.0}
        assert s.verdict is SeriesVerdict.RADIUS_ONE

    def test_all_zero(self):
        s = ratio_sequence(type_one(3, 0, 1, 0))
        assert s.verdict is SeriesVerdict.DEGENERATE
        assert len(s.zero_terms) == 1002

    def test_zero_terms_recorded(self):
        # f6 = [0,2,0] zeroes every n whose base-3 digits avoid 1
        s = ratio_sequence(type_one(3, 6, 1, 0))
        assert 0 in s.zero_terms
        assert s.ratios[0] is not None and all(s.ratios[n - 1] is None for n in s.zero_terms if n)

    def test_radius_one_rules(self):
        assert analysis.radius_one_rules(3, 1, 1) == [0, 5, 13, 21, 26]

    def test_type_two_terms(self):
        assert analysis.series_terms(type_two(3, 8, 2, 1), 16)[16] == 74

    def test_n_max_floor(self):
        with pytest.raises(ValueError):
            ratio_sequence(type_one(3, 21, 1, 1), 99)
