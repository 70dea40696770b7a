import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphonca.ca import Genome, SimParams, develop
from morphonca.infotheory import JointHistogram, entropy
from morphonca.objectives import (
    LocalEmpowermentMap,
    action_sensor_pairs,
    empowerment,
    empowerment_bits,
    local_empowerment,
    loss,
)
from morphonca.shapes import TargetShape, make_square
from morphonca._validation import ConfigError

from conftest import brute_force_mi, make_trace, random_trace


def brute_force_loss(trace, target, n0, n1):
    m = trace.m
    total = 0.0
    for n in range(n0 + 1, n1 + 1):
        diff = 0
        for i in range(m):
            for j in range(m):
                diff += (int(trace.alive[n][i][j]) - int(target[i][j])) ** 2
        total += diff / m ** 2
    return total / (n1 - n0)


class TestLoss:
    def test_perfect_match(self):
        alive = np.zeros((5, 5, 5), dtype=np.uint8)
        alive[:, 1:4, 1:4] = 1
        target = TargetShape("t", alive[0])
        trace = make_trace(np.zeros((4, 5, 5)), np.zeros((4, 5, 5)), alive)
        assert loss(trace, target, 0, 4) == 0.0

    def test_zero_genome_square(self):
        trace = develop(Genome.zeros(), SimParams(m=25, n_steps=50))
        target = make_square(25, 15)
        assert (225 - 1) / 625 == 0.3584
        assert brute_force_loss(trace, target.cells, 0, 50) == pytest.approx(0.3584, abs=1e-15)
        assert loss(trace, target, 0, 50) == pytest.approx(0.3584, abs=1e-15)

    def test_halves_average_to_whole(self, rng):
        trace = develop(Genome.random(rng), SimParams(m=11, n_steps=20))
        target = make_square(11, 7)
        a, b = loss(trace, target, 0, 10), loss(trace, target, 10, 20)
        assert (a + b) / 2 == pytest.approx(loss(trace, target, 0, 20), abs=1e-12)

    @pytest.mark.parametrize("window", [(-1, 4), (3, 3), (2, 1), (0, 11)])
    def test_bad_window(self, window):
        trace = make_trace(np.zeros((10, 5, 5)), np.zeros((10, 5, 5)))
        with pytest.raises(ConfigError):
            loss(trace, make_square(5, 3), *window)

    def test_grid_mismatch(self):
        trace = make_trace(np.zeros((10, 5, 5)), np.zeros((10, 5, 5)))
        with pytest.raises(ConfigError):
            loss(trace, make_square(7, 3), 0, 10)

    def test_matches_brute_force(self, rng):
        for _ in range(20):
            trace = random_trace(rng, m=5, n=8)
            target = rng.integers(0, 2, (5, 5))
            n0 = int(rng.integers(0, 7))
            n1 = int(rng.integers(n0 + 1, 9))
            assert loss(trace, target, n0, n1) == pytest.approx(
                brute_force_loss(trace, target, n0, n1), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))
def test_loss_partition_and_bounds(seed, d1, d2, d3):
    rng = np.random.default_rng(seed)
    n = d1 + d2 + d3
    trace = random_trace(rng, m=5, n=n + (n % 2))
    target = rng.integers(0, 2, (5, 5))
    n0, n1, n2 = d3 - 1, d3 - 1 + d1, d3 - 1 + d1 + d2
    l01, l12, l02 = loss(trace, target, n0, n1), loss(trace, target, n1, n2), loss(trace, target, n0, n2)
    assert 0.0 <= min(l01, l12, l02) and max(l01, l12, l02) <= 1.0
    assert (n1 - n0) * l01 + (n2 - n1) * l12 == pytest.approx((n2 - n0) * l02, abs=1e-12)


class TestEmpowerment:
    def test_silent_trace(self):
        trace = make_trace(np.zeros((6, 3, 3)), np.zeros((6, 3, 3)))
        assert empowerment(trace) == 0.0
        assert not local_empowerment(trace).values.any()

    def test_perfect_channel(self, rng):
        actions = rng.integers(0, 256, (10, 5, 5))
        sensors = np.zeros_like(actions)
        sensors[5:] = actions[:5]
        trace = make_trace(actions, sensors)
        h = entropy(np.bincount(actions[:5].ravel(), minlength=256))
        assert empowerment(trace) == pytest.approx(-h, abs=1e-12)
        assert empowerment_bits(trace) == pytest.approx(h, abs=1e-12)

    def test_perfect_binary_channel_local_map(self):
        checker = np.indices((3, 3)).sum(axis=0) % 2
        actions = np.zeros((4, 3, 3), dtype=np.uint8)
        actions[0] = checker
        actions[1] = 1 - checker  # nine 0s and nine 1s over the first half
        sensors = np.zeros_like(actions)
        sensors[2:] = actions[:2]
        trace = make_trace(actions, sensors)
        np.testing.assert_array_equal(local_empowerment(trace).values, np.ones((3, 3)))
        assert empowerment_bits(trace) == 1.0

    def test_hand_built_m3_n4(self):
        actions = np.array([
            [[0, 1, 2], [1, 1, 0], [2, 0, 0]],
            [[1, 1, 1], [0, 2, 2], [0, 0, 1]],
            [[9, 9, 9], [9, 9, 9], [9, 9, 9]],
            [[9, 9, 9], [9, 9, 9], [9, 9, 9]],
        ])
        sensors = np.array([
            [[7, 7, 7], [7, 7, 7], [7, 7, 7]],
            [[7, 7, 7], [7, 7, 7], [7, 7, 7]],
            [[0, 1, 1], [1, 3, 0], [2, 0, 3]],
            [[1, 0, 1], [0, 2, 2], [3, 0, 1]],
        ])
        trace = make_trace(actions, sensors)
        pairs = [(actions[n, i, j], sensors[n + 2, i, j])
                 for n in range(2) for i in range(3) for j in range(3)]
        assert len(pairs) == 3 * 3 * 2
        oracle = brute_force_mi(pairs)
        assert empowerment_bits(trace) == pytest.approx(oracle, abs=1e-12)
        assert local_empowerment(trace).values.mean() == pytest.approx(oracle, abs=1e-9)

    def test_pair_count(self, rng):
        trace = develop(Genome.random(rng), SimParams(m=11, n_steps=30))
        a, s = action_sensor_pairs(trace)
        assert a.size == s.size == 11 * 11 * 15
        assert JointHistogram.from_pairs(a, s).total == 11 * 11 * 15

    def test_odd_steps_rejected(self):
        trace = make_trace(np.zeros((5, 3, 3)), np.zeros((5, 3, 3)))
        with pytest.raises(ConfigError):
            empowerment(trace)
        with pytest.raises(ConfigError):
            local_empowerment(trace)

    def test_bounds_on_developed_traces(self, rng):
        for _ in range(20):
            trace = develop(Genome.random(rng, -3, 3), SimParams(m=9, n_steps=20))
            bits = empowerment_bits(trace)
            assert 0.0 <= bits <= 8.0
            assert local_empowerment(trace).values.mean() == pytest.approx(bits, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 16, 256]))
def test_local_map_decomposes_mi(seed, k):
    trace = random_trace(np.random.default_rng(seed), m=5, n=10, k=k)
    local = local_empowerment(trace)
    assert np.isfinite(local.values).all() and local.values.shape == (5, 5)
    assert local.values.mean() == pytest.approx(-empowerment(trace), abs=1e-9)


def test_heatmap_csv_roundtrip(tmp_path, rng):
    local = local_empowerment(random_trace(rng, m=5, n=10, k=4))
    local.to_csv(tmp_path / "x.heat.csv")
    lines = (tmp_path / "x.heat.csv").read_text().splitlines()
    assert len(lines) == 5 and all(len(line.split(",")) == 5 for line in lines)
    np.testing.assert_array_equal(LocalEmpowermentMap.from_csv(tmp_path / "x.heat.csv").values,
                                  local.values)
