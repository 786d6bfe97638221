import numpy as np
import pytest

from torsorcheck import (
    GridFunction,
    ResolutionTooCoarse,
    dbar_fd,
    dz_fd,
    lattice_grid,
    wirtinger_at,
)
from torsorcheck.grids import measure_seam_jumps


def _interior(values, torus):
    """Restrict to nodes whose stencil does not wrap around the seam."""
    sl = tuple(slice(1, -1) for _ in range(2 * torus.genus))
    return values[sl]


class TestDbarBasics:
    def test_constant_annihilated(self, square_torus):
        gf = GridFunction.sample(square_torus, 16, lambda z: np.full(z.shape[:-1], 2.0 - 1.0j))
        assert dbar_fd(gf).max_abs() <= 1e-12

    def test_antiholomorphic_linear(self, square_torus):
        gf = GridFunction.sample(square_torus, 16, lambda z: np.conj(z[..., 0]),
                                 measure_jumps=True)
        assert np.max(np.abs(dbar_fd(gf).values[..., 0] - 1.0)) <= 1e-9

    def test_holomorphic_linear(self, square_torus):
        gf = GridFunction.sample(square_torus, 16, lambda z: z[..., 0], measure_jumps=True)
        assert dbar_fd(gf).max_abs() <= 1e-9

    def test_dz_of_holomorphic_linear(self, square_torus):
        gf = GridFunction.sample(square_torus, 16, lambda z: z[..., 0], measure_jumps=True)
        assert np.max(np.abs(dz_fd(gf).values[..., 0] - 1.0)) <= 1e-9

    def test_resolution_floor(self, square_torus):
        with pytest.raises(ResolutionTooCoarse):
            GridFunction.sample(square_torus, 3, lambda z: z[..., 0])

    def test_g2_mixed_affine_exact(self, g2_torus):
        coeff_z = np.array([0.3 - 1.0j, 2.0])
        coeff_zbar = np.array([1.5j, -0.7])

        def fn(z):
            return z @ coeff_z + np.conj(z) @ coeff_zbar

        gf = GridFunction.sample(g2_torus, 8, fn, measure_jumps=True)
        assert np.max(np.abs(dbar_fd(gf).values - coeff_zbar)) <= 1e-9
        assert np.max(np.abs(dz_fd(gf).values - coeff_z)) <= 1e-9


class TestDbarAccuracy:
    def test_annihilates_holomorphic_quadratic(self, square_torus):
        gf = GridFunction.sample(square_torus, 32, lambda z: z[..., 0] ** 2)
        interior = _interior(dbar_fd(gf).values, square_torus)
        assert np.max(np.abs(interior)) <= 1e-10

    def test_second_order_on_cubic(self, square_torus):
        errors = []
        for n in (16, 64):  # quadrupling the resolution
            gf = GridFunction.sample(square_torus, n, lambda z: z[..., 0] ** 3)
            errors.append(np.max(np.abs(_interior(dbar_fd(gf).values, square_torus))))
        assert errors[0] / errors[1] >= 3.5

    def test_dbar_squared_vanishes_as_a_form(self, square_torus):
        # mixed second derivatives commute, so the wedge (antisymmetric) part
        # of the twice-differentiated coefficients must vanish to O(h^2)
        n = 32

        def fn(z):
            c = square_torus.lattice_coords(z)
            return np.exp(np.sin(2 * np.pi * c[..., 0]) + 1j * np.cos(2 * np.pi * c[..., 1]))

        second = dbar_fd(dbar_fd(GridFunction.sample(square_torus, n, fn)))
        antisym = second.values - np.swapaxes(second.values, -1, -2)
        assert np.max(np.abs(antisym)) <= 10.0 / n**2


class TestSeams:
    def test_constant_jump_handled_exactly(self, square_torus):
        gf = GridFunction.sample(
            square_torus, 16, lambda z: np.conj(z[..., 0]) + 0.3, measure_jumps=True
        )
        assert np.allclose(gf.seam_jumps, [1.0, -1.0j], atol=1e-12)
        assert np.max(np.abs(dbar_fd(gf).values[..., 0] - 1.0)) <= 1e-9

    def test_nonconstant_jump_rejected(self, square_torus):
        with pytest.raises(ValueError):
            measure_seam_jumps(square_torus, lambda z: np.conj(z[..., 0]) ** 2)


class TestPointStencils:
    def test_wirtinger_exact_on_affine(self, g2_torus, rng):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)

        def fn(z):
            return z @ a + np.conj(z) @ b

        coords = rng.random((40, 4))
        dz, dzbar = wirtinger_at(g2_torus, fn, coords, h=1.0 / 32)
        assert np.max(np.abs(dz - a)) <= 1e-9
        assert np.max(np.abs(dzbar - b)) <= 1e-9


class TestGridFunction:
    def test_lattice_grid_shape(self):
        grid = lattice_grid(8, 2)
        assert grid.shape == (8, 8, 2)
        assert grid.max() < 1.0 and grid.min() == 0.0

    def test_rejects_nonfinite(self, square_torus):
        values = np.ones((8, 8))
        values[0, 0] = np.nan
        with pytest.raises(ValueError):
            GridFunction(square_torus, values)

    def test_mean_matches_average(self, square_torus, rng):
        values = rng.standard_normal((8, 8, 1)) + 1j * rng.standard_normal((8, 8, 1))
        gf = GridFunction(square_torus, values)
        assert np.allclose(gf.mean(), values.mean(axis=(0, 1)))
