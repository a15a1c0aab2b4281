"""Traffic-matrix generation, profiles and CSV round-trip tests."""

import numpy as np
import pytest

from tesim.topology import Link, Node, Topology
from tesim.traffic import (
    TmSequence,
    TrafficMatrix,
    TrafficMatrixError,
    gravity_matrix,
    make_tm_sequence,
    tm_from_csv,
    tm_to_csv,
)


class TestTrafficMatrixType:
    def test_diagonal_must_be_zero(self):
        with pytest.raises(TrafficMatrixError):
            TrafficMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_negative_entries_rejected(self):
        with pytest.raises(TrafficMatrixError):
            TrafficMatrix(np.array([[0.0, -1.0], [0.0, 0.0]]))

    def test_square_required(self):
        with pytest.raises(TrafficMatrixError):
            TrafficMatrix(np.zeros((2, 3)))

    def test_total(self):
        tm = TrafficMatrix(np.array([[0.0, 2.0], [3.0, 0.0]]))
        assert tm.total() == 5.0


class TestGravityMatrix:
    def test_two_node_symmetric_split(self, two_node):
        tm = gravity_matrix(two_node, 6.0)
        assert tm.volumes[0, 1] == pytest.approx(3.0)
        assert tm.volumes[1, 0] == pytest.approx(3.0)

    def test_three_node_hand_computed(self):
        # weights w = (1,1,2) from incident capacities; normalizer
        # sum_{u!=v} w(u)w(v) = 1+2+1+2+2+2 = 10
        t = Topology(
            [Node(0, "a"), Node(1, "b"), Node(2, "c")],
            [Link(0, 0, 2, 1.0), Link(1, 1, 2, 1.0)],
        )
        w = np.zeros(3)
        for link in t.links:
            w[link.src] += link.capacity
            w[link.dst] += link.capacity
        assert list(w) == [1.0, 1.0, 2.0]
        tm = gravity_matrix(t, 10.0)
        assert tm.volumes[0, 1] == pytest.approx(1.0)
        assert tm.volumes[0, 2] == pytest.approx(2.0)
        assert tm.volumes[1, 2] == pytest.approx(2.0)
        assert tm.volumes[2, 0] == pytest.approx(2.0)

    def test_total_volume_zero_gives_zero_matrix(self, two_node):
        tm = gravity_matrix(two_node, 0.0)
        assert np.all(tm.volumes == 0.0)

    def test_sums_to_total_volume(self, geant):
        tm = gravity_matrix(geant, 1234.5)
        assert tm.total() == pytest.approx(1234.5, rel=1e-9)

    def test_scale_equivariant(self, geant):
        a = gravity_matrix(geant, 100.0)
        b = gravity_matrix(geant, 200.0)
        assert np.allclose(b.volumes, 2.0 * a.volumes, rtol=1e-12)

    def test_all_zero_capacity_is_error(self):
        t = Topology([Node(0, "a"), Node(1, "b")], [])
        with pytest.raises(TrafficMatrixError):
            gravity_matrix(t, 1.0)


class TestMakeTmSequence:
    def test_constant_without_jitter_copies_base(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        seq = make_tm_sequence(base, "constant", 3, 1.0, seed=1, jitter=False)
        assert len(seq) == 3
        for tm in seq.steps:
            assert tm == base

    def test_ramp_two_step_endpoints(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        seq = make_tm_sequence(base, "ramp", 2, 2.0, seed=1, jitter=False)
        assert np.allclose(seq.steps[0].volumes, 0.1 * base.volumes)
        assert np.allclose(seq.steps[1].volumes, 2.0 * base.volumes)

    def test_sinusoid_mean_and_amplitude(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        seq = make_tm_sequence(base, "sinusoid", 8, 1.0, seed=1, jitter=False)
        scales = [tm.volumes[0, 1] / base.volumes[0, 1] for tm in seq.steps]
        assert max(scales) == pytest.approx(1.0)
        assert min(scales) == pytest.approx(0.1)

    def test_same_seed_identical(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        a = make_tm_sequence(base, "sinusoid", 5, 1.5, seed=42)
        b = make_tm_sequence(base, "sinusoid", 5, 1.5, seed=42)
        assert a == b

    def test_different_seed_differs(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        a = make_tm_sequence(base, "constant", 5, 1.5, seed=1)
        b = make_tm_sequence(base, "constant", 5, 1.5, seed=2)
        assert a != b

    def test_jitter_bounds(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        seq = make_tm_sequence(base, "constant", 50, 1.0, seed=3)
        for tm in seq.steps:
            ratio = tm.volumes[0, 1] / base.volumes[0, 1]
            assert 0.95 <= ratio <= 1.05

    def test_unknown_profile(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        with pytest.raises(TrafficMatrixError, match="profile"):
            make_tm_sequence(base, "sawtooth", 3, 1.0, seed=1)


class TestTmCsv:
    def test_round_trip(self, two_node):
        base = gravity_matrix(two_node, 6.0)
        seq = make_tm_sequence(base, "ramp", 3, 2.0, seed=7)
        again = tm_from_csv(tm_to_csv(seq))
        assert again == seq

    def test_header_fixed(self, two_node):
        seq = make_tm_sequence(gravity_matrix(two_node, 6.0), "constant", 1, 1.0, seed=0)
        assert tm_to_csv(seq).splitlines()[0] == "step,src,dst,volume"

    def test_rows_sorted(self, geant):
        seq = make_tm_sequence(gravity_matrix(geant, 10.0), "constant", 2, 1.0, seed=0)
        lines = tm_to_csv(seq).splitlines()[1:]
        keys = [tuple(int(x) for x in line.split(",")[:3]) for line in lines]
        assert keys == sorted(keys)

    def test_reader_accepts_any_order(self):
        text = "step,src,dst,volume\n0,1,0,2.0\n0,0,1,1.0\n"
        seq = tm_from_csv(text)
        assert seq.steps[0].volumes[0, 1] == 1.0
        assert seq.steps[0].volumes[1, 0] == 2.0

    def test_negative_volume_names_row(self):
        text = "step,src,dst,volume\n0,0,1,1.0\n0,1,0,-1\n"
        with pytest.raises(TrafficMatrixError, match="row 3"):
            tm_from_csv(text)

    def test_nonzero_diagonal_rejected(self):
        text = "step,src,dst,volume\n0,0,0,5.0\n0,0,1,1.0\n"
        with pytest.raises(TrafficMatrixError, match="diagonal"):
            tm_from_csv(text)

    def test_dimension_mismatch_across_steps(self):
        text = "step,src,dst,volume\n0,0,1,1.0\n0,0,2,1.0\n1,0,1,1.0\n"
        with pytest.raises(TrafficMatrixError, match="dimension mismatch at step 1"):
            tm_from_csv(text)

    def test_bad_header(self):
        with pytest.raises(TrafficMatrixError, match="header"):
            tm_from_csv("a,b,c,d\n0,0,1,1.0\n")


class TestTmSequenceType:
    def test_mixed_sizes_rejected(self):
        a = TrafficMatrix(np.zeros((2, 2)))
        b = TrafficMatrix(np.zeros((3, 3)))
        with pytest.raises(TrafficMatrixError):
            TmSequence((a, b))

    def test_empty_rejected(self):
        with pytest.raises(TrafficMatrixError):
            TmSequence(())
