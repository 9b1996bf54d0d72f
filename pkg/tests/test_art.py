import numpy as np
import pytest
import scipy.sparse as sp

import radonkit as rk
from radonkit.art import (KaczmarzConfig, SparseSystem, affine_project,
                          assemble_system, kaczmarz_solve, least_squares_solve,
                          pixel_radon, reconstruct_art)
from radonkit.grid import half_side, rmse
from radonkit.numerics import adaptive_quadrature
from radonkit.phantom import rasterize


def clip_chord(x0, x1, y1, y0, t, theta):
    """Chord length of line (t, theta) through the closed box, by parametric
    clipping; the independent oracle for pixel_radon and assembly."""
    ct, st = np.cos(theta), np.sin(theta)
    px, py, dx, dy = t * ct, t * st, -st, ct
    lo, hi = -np.inf, np.inf
    for p, q in ((-dx, px - x0), (dx, x1 - px), (-dy, py - y1), (dy, y0 - py)):
        if p == 0:
            if q < 0:
                return 0.0
        else:
            r = q / p
            if p < 0:
                lo = max(lo, r)
            else:
                hi = min(hi, r)
    return max(0.0, hi - lo)


def pixel_box(index, size):
    c = half_side(size)
    row, col = divmod(index - 1, size)
    x0 = col / c - 1.0
    y0 = 1.0 - row / c
    return x0, x0 + 1.0 / c, y0 - 1.0 / c, y0


class TestPixelRadon:
    def test_axis_aligned_value(self):
        # K=9: c=5, pixel side 0.2; a vertical ray inside the pixel's x-extent
        assert pixel_radon(41, 9, rk.LineParam(-0.15, 0.0)) == 0.2

    def test_diagonal_chord(self):
        # K=2: the line t=0 at 45 degrees runs along pixel 1's diagonal
        val = pixel_radon(1, 2, rk.LineParam(0.0, np.pi / 4))
        assert abs(val - np.sqrt(2)) < 1e-12

    def test_miss(self):
        assert pixel_radon(1, 4, rk.LineParam(-1.4, 0.7)) == 0.0

    def test_index_range(self):
        with pytest.raises(IndexError):
            pixel_radon(0, 4, rk.LineParam(0, 0))
        with pytest.raises(IndexError):
            pixel_radon(17, 4, rk.LineParam(0, 0))

    def test_against_clipping_oracle(self):
        rng = np.random.Generator(np.random.Philox(20))
        for size in (1, 2, 5, 8):
            for _ in range(200):
                i = int(rng.integers(1, size * size + 1))
                line = rk.LineParam(rng.uniform(-1.5, 1.5), rng.uniform(0, np.pi))
                assert abs(pixel_radon(i, size, line)
                           - clip_chord(*pixel_box(i, size), *line)) < 1e-10

    def test_half_open_membership_at_axis(self):
        # boundary ray between two pixels belongs to the right-hand pixel,
        # except on the grid's last column which keeps its outer edge
        size = 4  # c=2: pixel edges at x in {-1,-0.5,0,0.5,1}
        edge = rk.LineParam(-0.5, 0.0)
        assert pixel_radon(1, size, edge) == 0.0
        assert pixel_radon(2, size, edge) == 0.5
        right = rk.LineParam(1.0, 0.0)
        assert pixel_radon(4, size, right) == 0.5

    def test_wedges_vanish_at_extreme_offsets(self):
        line_theta = 0.6
        i, size = 6, 4
        x0, x1, y1, y0 = pixel_box(i, size)
        ct, st = np.cos(line_theta), np.sin(line_theta)
        corners = sorted([x0 * ct + y0 * st, x0 * ct + y1 * st,
                          x1 * ct + y1 * st, x1 * ct + y0 * st])
        for t_edge in (corners[0], corners[3]):
            for d in (1e-9, 1e-7):
                inside = pixel_radon(i, size, rk.LineParam(t_edge + d, line_theta))
                outside = pixel_radon(i, size, rk.LineParam(t_edge - d, line_theta))
                assert min(inside, outside) == 0.0
                assert max(inside, outside) < 1e-5  # r1/r3 vanish at the edge

    def test_continuity_inside(self):
        i, size, theta = 6, 4, 1.1
        t = np.linspace(-1, 1, 5001)
        vals = np.array([pixel_radon(i, size, rk.LineParam(tv, theta)) for tv in t])
        jumps = np.abs(np.diff(vals))
        assert jumps.max() < 2e-3  # piecewise linear, no interior jumps

    @pytest.mark.parametrize("size", [4, 9])
    def test_mass_conservation(self, size):
        rng = np.random.Generator(np.random.Philox(21))
        c = half_side(size)
        pixels = rng.integers(1, size * size + 1, size=10)
        for theta in (0.0, np.pi / 7, np.pi / 4, np.pi / 2, 2.9):
            for i in pixels[:4]:
                f = lambda t: np.array([pixel_radon(int(i), size,
                                                    rk.LineParam(float(tv), theta))
                                        for tv in np.atleast_1d(t)])
                r = adaptive_quadrature(f, -1.6, 1.6, tol=1e-10)
                assert r.converged
                assert abs(r.value - 1.0 / c**2) < 1e-8


class TestAssembly:
    def test_matches_scalar_entries(self):
        samples = rk.parallel_beam_samples(4, 3, 0.21)
        size = 3
        system = assemble_system(samples, size)
        dense = system.matrix.toarray()
        for j, line in enumerate(samples):
            for i in range(1, size * size + 1):
                assert dense[j, i - 1] == pixel_radon(i, size, line)

    def test_row_sums_equal_square_chords(self):
        samples = rk.parallel_beam_samples(5, 7, 0.131)
        system = assemble_system(samples, 6)
        sums = np.array(system.matrix.sum(axis=1)).ravel()
        chords = [clip_chord(-1, 1, -1, 1, t, th) for t, th in samples]
        assert np.max(np.abs(sums - chords)) < 1e-12

    def test_far_lines_give_zero_rows(self):
        samples = rk.SampleSet(np.array([1.5, -1.6]), np.array([0.3, 2.0]))
        system = assemble_system(samples, 4)
        assert system.matrix.nnz == 0

    def test_scattered_layout_supported(self):
        samples = rk.scattered_samples(40, seed=3)
        system = assemble_system(samples, 5)
        assert system.shape == (40, 25)
        assert np.all(system.matrix.data >= 0)

    def test_rhs_attached_from_sinogram(self, crescent):
        samples = rk.parallel_beam_samples(3, 2, 0.4)
        sino = rk.sample(crescent, samples)
        system = assemble_system(samples, 4, sino)
        assert np.array_equal(system.rhs, sino.values)

    def test_k1_single_pixel(self):
        # K=1: c=1, so the single pixel occupies [-1, 0) x (0, 1]; the entry
        # is the chord length through that box
        samples = rk.SampleSet(np.array([0.3]), np.array([0.7]))
        system = assemble_system(samples, 1)
        expected = clip_chord(*pixel_box(1, 1), 0.3, 0.7)
        assert abs(system.matrix[0, 0] - expected) < 1e-12


class TestKaczmarz:
    def test_single_projection(self):
        m = sp.csr_matrix(np.array([[1.0, 0.0, 0.0, 0.0]]))
        system = SparseSystem(m, np.array([2.0]))
        x, hist = kaczmarz_solve(system, KaczmarzConfig(1.0, 1))
        assert np.array_equal(x, [2.0, 0.0, 0.0, 0.0])
        assert hist[-1] == 0.0

    def test_row_satisfied_exactly_at_unit_relaxation(self):
        rng = np.random.Generator(np.random.Philox(22))
        row = rng.normal(size=6)
        x0 = rng.normal(size=6)
        x1 = affine_project(x0, row, 1.25, relaxation=1.0)
        assert abs(row @ x1 - 1.25) < 1e-14

    def test_reflection_at_two(self):
        rng = np.random.Generator(np.random.Philox(23))
        row = rng.normal(size=5)
        x0 = rng.normal(size=5)
        x2 = affine_project(x0, row, 0.4, relaxation=2.0)
        d0 = abs(row @ x0 - 0.4) / np.linalg.norm(row)
        d2 = abs(row @ x2 - 0.4) / np.linalg.norm(row)
        assert abs(d0 - d2) < 1e-13
        assert np.max(np.abs(x2 - x0)) > 0

    def test_consistent_system_converges(self):
        rng = np.random.Generator(np.random.Philox(1))
        a = rng.normal(size=(20, 15))
        xstar = rng.normal(size=15)
        system = SparseSystem(sp.csr_matrix(a), a @ xstar)
        x, hist = kaczmarz_solve(system, KaczmarzConfig(1.0, 500, 1e-8))
        assert hist[-1] <= 1e-8
        assert len(hist) <= 500

    def test_residual_nonincreasing_for_consistent(self):
        rng = np.random.Generator(np.random.Philox(24))
        for seed in range(3):
            a = rng.normal(size=(12, 8))
            system = SparseSystem(sp.csr_matrix(a), a @ rng.normal(size=8))
            _, hist = kaczmarz_solve(system, KaczmarzConfig(1.0, 40, 0.0))
            assert np.all(np.diff(hist) <= 1e-12)

    def test_zero_rows_skipped(self):
        a = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 1.0]]))
        system = SparseSystem(a, np.array([5.0, 2.0]))
        x, hist = kaczmarz_solve(system, KaczmarzConfig(1.0, 50, 1e-12))
        assert abs(x[0] + x[1] - 2.0) < 1e-12

    def test_relaxation_validation(self):
        with pytest.raises(ValueError):
            KaczmarzConfig(relaxation=2.0)
        with pytest.raises(ValueError):
            KaczmarzConfig(relaxation=0.0)


class TestLeastSquares:
    def test_square_nonsingular_matches_dense(self):
        rng = np.random.Generator(np.random.Philox(25))
        a = rng.normal(size=(8, 8)) + 4 * np.eye(8)
        b = rng.normal(size=8)
        system = SparseSystem(sp.csr_matrix(a), b)
        x, res, flag = least_squares_solve(system)
        assert np.max(np.abs(x - np.linalg.solve(a, b))) < 1e-8
        assert not flag

    def test_overdetermined_consistent(self):
        rng = np.random.Generator(np.random.Philox(26))
        a = rng.normal(size=(30, 10))
        xstar = rng.normal(size=10)
        system = SparseSystem(sp.csr_matrix(a), a @ xstar)
        x, res, _ = least_squares_solve(system)
        assert res <= 1e-8
        assert np.max(np.abs(x - xstar)) < 1e-8

    def test_duplicated_rows_same_solution(self):
        rng = np.random.Generator(np.random.Philox(27))
        a = rng.normal(size=(12, 6))
        xstar = rng.normal(size=6)
        p = a @ xstar
        single = SparseSystem(sp.csr_matrix(a), p)
        doubled = SparseSystem(sp.csr_matrix(np.vstack([a, a])),
                               np.concatenate([p, p]))
        x1, _, _ = least_squares_solve(single)
        x2, _, _ = least_squares_solve(doubled)
        assert np.max(np.abs(x1 - x2)) < 1e-6

    def test_rank_deficient_flagged(self):
        a = np.zeros((6, 4))
        a[:, 0] = 1.0
        system = SparseSystem(sp.csr_matrix(a), np.ones(6))
        x, res, flag = least_squares_solve(system)
        assert flag
        assert res < 1e-6


class TestReconstruct:
    def test_crescent_kaczmarz(self, crescent):
        samples = rk.parallel_beam_samples(30, 20, 1 / 20)
        sino = rk.sample(crescent, samples)
        img, hist = reconstruct_art(sino, 32, KaczmarzConfig(1.0, 50, 1e-10),
                                    method="kaczmarz")
        assert rmse(img, rasterize(crescent, 32)) < 0.25
        assert len(hist) == 50

    def test_zero_sinogram_fixed_point(self, crescent):
        samples = rk.parallel_beam_samples(8, 6, 1 / 6)
        zero = rk.Sinogram(samples, np.zeros(len(samples)))
        img, _ = reconstruct_art(zero, 8, KaczmarzConfig(1.0, 3, 1e-14),
                                 method="kaczmarz")
        assert np.all(img.values == 0.0)

    def test_single_pixel_ray(self):
        samples = rk.SampleSet(np.array([0.0]), np.array([0.3]))
        value = 1.7
        sino = rk.Sinogram(samples, np.array([value]))
        img, _ = reconstruct_art(sino, 1, KaczmarzConfig(1.0, 1, 0.0),
                                 method="kaczmarz")
        chord = clip_chord(*pixel_box(1, 1), 0.0, 0.3)
        assert abs(img.values[0, 0] - value / chord) < 1e-12

    def test_auto_picks_lsq_when_overdetermined(self, crescent):
        samples = rk.parallel_beam_samples(10, 8, 1 / 8)  # 170 rows
        sino = rk.sample(crescent, samples)
        auto_img, _ = reconstruct_art(sino, 8)             # 64 unknowns
        lsq_img, _ = reconstruct_art(sino, 8, method="lsq")
        assert np.array_equal(auto_img.values, lsq_img.values)

    def test_scattered_data_reconstruction(self, crescent):
        sino = rk.sample(crescent, rk.scattered_samples(600, seed=4))
        img, _ = reconstruct_art(sino, 24, KaczmarzConfig(1.0, 30, 1e-10),
                                 method="kaczmarz")
        assert rmse(img, rasterize(crescent, 24)) < 0.3

    def test_shepp_logan_pipeline(self):
        ph = rk.builtin("shepp-logan")
        sino = rk.sample(ph, rk.parallel_beam_samples(20, 16, 1 / 16))
        img, _ = reconstruct_art(sino, 16, KaczmarzConfig(1.0, 20, 1e-10),
                                 method="kaczmarz")
        assert np.all(np.isfinite(img.values))
