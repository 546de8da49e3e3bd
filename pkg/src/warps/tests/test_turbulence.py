import numpy as np

from core.raster import ScalarField
from core.tests.test_base import TestBase
from warps.turbulence import (
    divergence,
    divergence_free_uv,
    grf_warp_uv,
    rescale_peak,
    stream_velocity,
)


class GrfWarpTest(TestBase):
    def test_displacement_scale(self) -> None:
        for seed in range(20):
            field = grf_warp_uv(128, 128, 32.0, 3.0, seed)
            with self.subTest(seed=seed):
                self.assertAlmostEqual(float(field.u.std()), 3.0, delta=0.15)
                self.assertAlmostEqual(float(field.v.std()), 3.0, delta=0.15)

    def test_components_independent(self) -> None:
        field = grf_warp_uv(128, 128, 16.0, 2.0, 5)
        self.assertFalse(np.allclose(field.u, field.v))
        correlation = np.corrcoef(field.u.ravel(), field.v.ravel())[0, 1]
        self.assertLess(abs(correlation), 0.3)

    def test_deterministic(self) -> None:
        first = grf_warp_uv(64, 48, 16.0, 2.0, 11)
        self.assertEqual(first, grf_warp_uv(64, 48, 16.0, 2.0, 11))
        self.assertNotEqual(first, grf_warp_uv(64, 48, 16.0, 2.0, 12))

    def test_zero_alpha(self) -> None:
        self.assert_all_zero(grf_warp_uv(32, 32, 8.0, 0.0, 1))

    def test_invalid_parameters(self) -> None:
        with self.assertRaises(ValueError):
            grf_warp_uv(32, 32, 0.0, 1.0, 1)
        with self.assertRaises(ValueError):
            grf_warp_uv(32, 32, 8.0, -1.0, 1)


class DivergenceFreeTest(TestBase):
    def test_interior_divergence_vanishes(self) -> None:
        alpha = 3.0
        for length in (16.0, 64.0):
            for seed in range(20):
                field = divergence_free_uv(256, 256, length, alpha, seed)
                with self.subTest(length=length, seed=seed):
                    self.assertLessEqual(
                        float(np.abs(divergence(field)).max()), 1e-4 * alpha / length
                    )

    def test_peak_is_alpha(self) -> None:
        field = divergence_free_uv(96, 64, 16.0, 2.5, 3)
        self.assertAlmostEqual(float(field.magnitude().max()), 2.5, delta=1e-12)

    def test_saddle_stream_function(self) -> None:
        psi = self._xy_field(9, 7, lambda xs, ys: xs * ys)
        field = stream_velocity(psi)
        xs, ys = np.meshgrid(np.arange(9.0), np.arange(7.0))
        np.testing.assert_allclose(field.u, xs, rtol=0, atol=1e-12)
        np.testing.assert_allclose(field.v, -ys, rtol=0, atol=1e-12)
        self.assertLess(float(np.abs(divergence(field)).max()), 1e-12)

    def test_constant_stream_function(self) -> None:
        field = rescale_peak(stream_velocity(ScalarField.constant(16, 16, 4.0)), 2.0)
        self.assert_all_zero(field)

    def test_zero_alpha(self) -> None:
        self.assert_all_zero(divergence_free_uv(64, 64, 16.0, 0.0, 9))

    def test_deterministic(self) -> None:
        self.assertEqual(
            divergence_free_uv(64, 64, 16.0, 1.0, 2),
            divergence_free_uv(64, 64, 16.0, 1.0, 2),
        )
