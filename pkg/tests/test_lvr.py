from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelvar.errors import InvalidConfigError, InvalidInputError
from labelvar.lvr import (
    LabelMatrix,
    LvrVector,
    area_accuracy,
    compute_lvr,
    dominant_label,
    dominant_stats,
    partition_areas,
)


def matrix(rows, num_classes):
    return LabelMatrix(labels=np.array(rows, dtype=np.int64), num_classes=num_classes)


class TestDominantLabel:
    def test_all_identical(self):
        assert dominant_label([3, 3, 3], 4) == (3, 3)

    def test_tie_breaks_toward_smaller_label(self):
        assert dominant_label([1, 1, 2, 2], 3) == (1, 2)
        assert dominant_label([2, 2, 1, 1], 3) == (1, 2)

    def test_hand_count(self):
        assert dominant_label([0, 1, 1, 1, 2], 3) == (1, 3)

    def test_empty_row_rejected(self):
        with pytest.raises(InvalidInputError):
            dominant_label([], 3)

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidInputError):
            dominant_label([0, 5], 3)


class TestComputeLvr:
    def test_unanimous_row(self):
        lvr = compute_lvr(matrix([[3, 3, 3, 3]], 4))
        assert lvr.values[0] == 1.0

    def test_half_split(self):
        lvr = compute_lvr(matrix([[1, 1, 2, 2]], 3))
        assert lvr.values[0] == 0.5

    def test_three_of_five(self):
        lvr = compute_lvr(matrix([[0, 1, 1, 1, 2]], 3))
        assert lvr.values[0] == 0.6

    def test_matches_per_row_dominant_count(self):
        rng = np.random.default_rng(0)
        m = matrix(rng.integers(0, 4, size=(40, 7)), 4)
        lvr = compute_lvr(m)
        for i in range(40):
            _, count = dominant_label(m.labels[i], 4)
            assert lvr.dominant_counts[i] == count


class TestPartitionAreas:
    def test_maximum_lands_in_top_area(self):
        lvr = LvrVector(dominant_counts=np.array([4]), num_passes=4)
        assert partition_areas(lvr, 2).assignment[0] == 1

    def test_boundary_half(self):
        # LVR exactly 0.5 belongs to (0, 0.5], the lower of two areas
        lvr = LvrVector(dominant_counts=np.array([2]), num_passes=4)
        assert partition_areas(lvr, 2).assignment[0] == 0

    def test_minimum_lands_in_bottom_area(self):
        lvr = LvrVector(dominant_counts=np.array([1]), num_passes=50)
        assert partition_areas(lvr, 50).assignment[0] == 0

    def test_invalid_area_count(self):
        lvr = LvrVector(dominant_counts=np.array([1]), num_passes=2)
        with pytest.raises(InvalidConfigError):
            partition_areas(lvr, 0)

    def test_integer_assignment_matches_rational_intervals_exhaustively(self):
        # every (k, T, n) with T, n <= 64: the closed-form index equals
        # literal membership in (t/n, (t+1)/n]
        for T in range(1, 65):
            counts = np.arange(1, T + 1)
            for n in range(1, 65):
                assigned = partition_areas(
                    LvrVector(dominant_counts=counts, num_passes=T), n
                ).assignment
                for k, t in zip(counts, assigned):
                    v = Fraction(int(k), T)
                    assert Fraction(t, n) < v <= Fraction(t + 1, n)

    def test_equal_passes_and_areas_give_one_lvr_per_area(self):
        # with T = n, count k lands exactly in area k - 1
        for t_n in (1, 3, 7, 50):
            counts = np.arange(1, t_n + 1)
            part = partition_areas(LvrVector(dominant_counts=counts, num_passes=t_n), t_n)
            assert np.array_equal(part.assignment, counts - 1)


@settings(deadline=None, derandomize=True, max_examples=60)
@given(
    data=st.data(),
    num_classes=st.integers(2, 5),
    num_passes=st.integers(1, 12),
    num_samples=st.integers(1, 30),
    num_areas=st.integers(1, 12),
)
def test_partition_properties(data, num_classes, num_passes, num_samples, num_areas):
    rows = data.draw(
        st.lists(
            st.lists(st.integers(0, num_classes - 1), min_size=num_passes, max_size=num_passes),
            min_size=num_samples,
            max_size=num_samples,
        )
    )
    m = matrix(rows, num_classes)
    lvr = compute_lvr(m)

    # LVR values lie in (0, 1] and are integer multiples of 1/T
    assert np.all(lvr.values > 0) and np.all(lvr.values <= 1)
    assert np.all(lvr.dominant_counts >= 1) and np.all(lvr.dominant_counts <= num_passes)

    part = partition_areas(lvr, num_areas)
    # exhaustive and disjoint
    assert part.area_sizes.sum() == num_samples
    assert np.array_equal(np.bincount(part.assignment, minlength=num_areas), part.area_sizes)
    if num_areas == 1:
        assert np.all(part.assignment == 0)

    # permuting samples permutes assignments identically
    perm = data.draw(st.permutations(range(num_samples)))
    perm = np.array(perm, dtype=np.int64)
    m2 = matrix(np.array(rows, dtype=np.int64)[perm], num_classes)
    part2 = partition_areas(compute_lvr(m2), num_areas)
    assert np.array_equal(part2.assignment, part.assignment[perm])

    # permuting the passes within a row leaves its LVR unchanged
    col_perm = data.draw(st.permutations(range(num_passes)))
    m3 = matrix(np.array(rows, dtype=np.int64)[:, np.array(col_perm)], num_classes)
    assert np.array_equal(compute_lvr(m3).dominant_counts, lvr.dominant_counts)


class TestAreaAccuracy:
    def test_single_area_all_correct(self):
        m = matrix([[0, 0], [1, 1], [2, 2]], 3)
        part = partition_areas(compute_lvr(m), 1)
        dom, _ = dominant_stats(m)
        aa = area_accuracy(part, np.array([0, 1, 2]), dom)
        assert aa.values[0] == 1.0

    def test_two_thirds(self):
        m = matrix([[0, 0], [1, 1], [2, 2]], 3)
        part = partition_areas(compute_lvr(m), 1)
        dom, _ = dominant_stats(m)
        aa = area_accuracy(part, np.array([0, 1, 0]), dom)
        assert aa.correct[0] == 2 and aa.sizes[0] == 3
        assert aa.values[0] == pytest.approx(2 / 3)

    def test_empty_area_flagged_not_zeroed(self):
        # all samples are unanimous, so the lower area stays empty
        m = matrix([[1, 1], [0, 0]], 2)
        part = partition_areas(compute_lvr(m), 2)
        dom, _ = dominant_stats(m)
        aa = area_accuracy(part, np.array([1, 0]), dom)
        assert aa.empty[0] and not aa.empty[1]
        assert np.isnan(aa.values[0])

    def test_length_mismatch_rejected(self):
        m = matrix([[1, 1], [0, 0]], 2)
        part = partition_areas(compute_lvr(m), 2)
        dom, _ = dominant_stats(m)
        with pytest.raises(InvalidInputError):
            area_accuracy(part, np.array([1]), dom)


class TestLabelMatrixValidation:
    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInputError):
            matrix([[0, 3]], 3)

    def test_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            matrix([[0, -1]], 3)

    def test_rejects_single_class(self):
        with pytest.raises(InvalidInputError):
            matrix([[0, 0]], 1)

    def test_rejects_non_integer(self):
        with pytest.raises(InvalidInputError):
            LabelMatrix(labels=np.array([[0.5, 1.0]]), num_classes=2)

    def test_shape_accessors(self):
        m = matrix([[0, 1, 2], [2, 2, 2]], 3)
        assert m.num_samples == 2 and m.num_passes == 3
