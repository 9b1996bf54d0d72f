import numpy as np
import pytest

from radonkit.geometry import (LineParam, ParallelBeam, Scattered,
                               line_coordinates, line_point,
                               parallel_beam_samples, scattered_samples)


class TestLineParametrization:
    def test_perpendicular_foot(self):
        assert line_point(LineParam(1.0, 0.0), 0.0) == (1.0, 0.0)

    def test_axis_case(self):
        x, y = line_point(LineParam(0.0, np.pi / 2), 2.0)
        assert abs(x + 2.0) < 1e-15 and abs(y) < 1e-15

    def test_norm_identity(self):
        rng = np.random.Generator(np.random.Philox(0))
        for _ in range(300):
            t, th, s = rng.uniform(-2, 2), rng.uniform(0, np.pi), rng.uniform(-3, 3)
            x, y = line_point(LineParam(t, th), s)
            assert abs(x * x + y * y - (t * t + s * s)) < 1e-12

    def test_coordinates_basics(self):
        assert line_coordinates((1.0, 0.0), 0.0) == (1.0, 0.0)
        assert line_coordinates((0.0, 1.0), 0.0) == (0.0, 1.0)

    def test_round_trip(self):
        rng = np.random.Generator(np.random.Philox(1))
        for _ in range(300):
            t, th, s = rng.uniform(-2, 2), rng.uniform(0, np.pi), rng.uniform(-3, 3)
            pt = line_point(LineParam(t, th), s)
            tt, ss = line_coordinates(pt, th)
            assert abs(tt - t) < 1e-12 and abs(ss - s) < 1e-12

    def test_specific_round_trip(self):
        t, s = line_coordinates((0.3, -0.4), np.pi / 3)
        x, y = line_point(LineParam(t, np.pi / 3), s)
        assert abs(x - 0.3) < 1e-15 and abs(y + 0.4) < 1e-15


class TestParallelBeam:
    def test_single_sample(self):
        s = parallel_beam_samples(1, 0, 1.0)
        assert len(s) == 1 and s[0] == LineParam(0.0, 0.0)

    def test_reference_grid(self):
        s = parallel_beam_samples(18, 20, 0.05)
        assert len(s) == 18 * 41
        assert s.t.min() == -1.0 and s.t.max() == 1.0
        assert isinstance(s.layout, ParallelBeam)

    def test_enumerated_grid(self):
        s = parallel_beam_samples(2, 1, 0.5)
        assert sorted(set(s.theta)) == [0.0, np.pi / 2]
        assert sorted(set(s.t)) == [-0.5, 0.0, 0.5]

    def test_angle_major_offset_ascending(self):
        s = parallel_beam_samples(3, 2, 0.1)
        assert np.all(np.diff(s.theta) >= 0)
        per_angle = s.t.reshape(3, 5)
        assert np.all(np.diff(per_angle, axis=1) > 0)

    def test_no_duplicates(self):
        s = parallel_beam_samples(7, 5, 0.11)
        assert len({(t, th) for t, th in s}) == len(s)

    def test_angles_below_pi_and_exact(self):
        for n in (5, 18, 30):
            s = parallel_beam_samples(n, 1, 1.0)
            assert s.theta.max() < np.pi
            # every angle is the exact double l*pi/N
            for l in range(n):
                assert s.theta[l * 3] == l * np.pi / n

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            parallel_beam_samples(0, 5, 0.1)
        with pytest.raises(ValueError):
            parallel_beam_samples(5, 5, 0.0)
        with pytest.raises(ValueError):
            parallel_beam_samples(5, -1, 0.1)


class TestScattered:
    def test_invalid_count(self):
        with pytest.raises(ValueError):
            scattered_samples(0)

    def test_deterministic(self):
        a = scattered_samples(5, seed=42)
        b = scattered_samples(5, seed=42)
        assert np.array_equal(a.t, b.t) and np.array_equal(a.theta, b.theta)
        assert isinstance(a.layout, Scattered)

    def test_distribution(self):
        s = scattered_samples(1000, seed=1)
        assert abs(s.t.mean()) < 0.05
        assert s.t.min() >= -1.0 and s.t.max() <= 1.0
        assert s.theta.min() >= 0.0 and s.theta.max() < np.pi
