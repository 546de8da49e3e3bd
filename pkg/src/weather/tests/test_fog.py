import math

import numpy as np

from core.errors import DegenerateRangeError, NegativeFieldError
from core.raster import ScalarField
from core.tests.test_base import TestBase
from fields.perlin import OctaveSpec
from weather.fog import (
    DEFAULT_AIRLIGHT,
    FogParams,
    apply_koschmieder,
    depth_map,
    extinction_coefficient,
    extinction_map,
    hetero_fog,
    uniform_fog,
)


class DepthMapTest(TestBase):
    def test_rows(self) -> None:
        d = depth_map(5, 8, 160.0)
        np.testing.assert_array_equal(d.values[0], 160.0)
        np.testing.assert_array_equal(d.values[4], 80.0)
        np.testing.assert_allclose(d.values[7], 20.0, rtol=0, atol=1e-12)
        self.assertTrue(np.all(np.diff(d.values, axis=0) < 0))


class KoschmiederTest(TestBase):
    def test_zero_extinction_is_identity(self) -> None:
        img = self._random_image(64, 48)
        fogged, t = apply_koschmieder(
            img, 0.0, depth_map(64, 48, 160.0), DEFAULT_AIRLIGHT
        )
        self.assert_images_equal(img, fogged)
        np.testing.assert_array_equal(t.values, 1.0)

    def test_zero_depth_row_untouched(self) -> None:
        img = self._random_image(16, 4)
        depth = np.zeros((4, 16))
        depth[:2] = 50.0
        fogged, _ = apply_koschmieder(img, 0.05, ScalarField(depth), DEFAULT_AIRLIGHT)
        np.testing.assert_array_equal(fogged.data[2:], img.data[2:])

    def test_top_row_black_pixel(self) -> None:
        img = self._uniform_image(8, 8, (0, 0, 0))
        fogged, t = apply_koschmieder(
            img, 0.0375, depth_map(8, 8, 160.0), DEFAULT_AIRLIGHT
        )
        self.assertAlmostEqual(float(t.values[0, 0]), math.exp(-6), delta=1e-15)
        for channel, a in enumerate(DEFAULT_AIRLIGHT):
            expected = a * (1 - math.exp(-6))
            self.assertLessEqual(abs(int(fogged.data[0, 3, channel]) - expected), 0.51)

    def test_convex_blend(self) -> None:
        img = self._random_image(64, 64, seed=3)
        rng = np.random.default_rng(3)
        k = ScalarField(rng.uniform(0.0, 0.1, (64, 64)))
        fogged, _ = apply_koschmieder(
            img, k, depth_map(64, 64, 160.0), DEFAULT_AIRLIGHT
        )
        airlight = np.broadcast_to(np.array(DEFAULT_AIRLIGHT), img.data.shape)
        low = np.minimum(img.as_float(), airlight)
        high = np.maximum(img.as_float(), airlight)
        out = fogged.as_float()
        self.assertTrue(np.all(out >= low) and np.all(out <= high))

    def test_transmission_monotone(self) -> None:
        d = depth_map(4, 32, 160.0)
        img = self._random_image(4, 32)
        _, thin = apply_koschmieder(img, 0.01, d, DEFAULT_AIRLIGHT)
        _, thick = apply_koschmieder(img, 0.02, d, DEFAULT_AIRLIGHT)
        self.assertTrue(np.all(thick.values <= thin.values))
        self.assertTrue(np.all(np.diff(thin.values, axis=0) >= 0))

    def test_negative_inputs_rejected(self) -> None:
        img = self._random_image(8, 8)
        with self.assertRaises(NegativeFieldError):
            apply_koschmieder(img, -0.1, depth_map(8, 8, 10.0), DEFAULT_AIRLIGHT)
        with self.assertRaises(NegativeFieldError):
            apply_koschmieder(
                img, 0.1, ScalarField.constant(8, 8, -1.0), DEFAULT_AIRLIGHT
            )


class UniformFogTest(TestBase):
    def test_extinction_constants(self) -> None:
        self.assertAlmostEqual(extinction_coefficient(100.0), 0.029957, delta=1e-6)
        self.assertAlmostEqual(extinction_coefficient(80.0), 0.0374, delta=1e-4)
        self.assertEqual(FogParams().k0, 0.0375)
        self.assertEqual(
            FogParams(base_extinction=None).k0, extinction_coefficient(100.0)
        )

    def test_forced_jitter(self) -> None:
        img = self._random_image(16, 16)
        _, _, k = uniform_fog(img, FogParams(jitter=0.0), seed=5)
        self.assertEqual(k, 0.0375)

    def test_sampled_range(self) -> None:
        params = FogParams()
        ks = [params.k0 * (1 + params.draw_jitter(seed)) for seed in range(10_000)]
        self.assertGreaterEqual(min(ks), 0.95 * params.k0)
        self.assertLessEqual(max(ks), 1.05 * params.k0)
        self.assertGreater(max(ks) - min(ks), 0.09 * params.k0)

    def test_deterministic(self) -> None:
        img = self._random_image(32, 32)
        first = uniform_fog(img, FogParams(), seed=9)
        second = uniform_fog(img, FogParams(), seed=9)
        self.assertEqual(first[0], second[0])
        self.assertEqual(first[2], second[2])

    def test_invalid_params(self) -> None:
        with self.assertRaises(ValueError):
            FogParams(visibility=0.0)
        with self.assertRaises(ValueError):
            FogParams(jitter=0.06)
        with self.assertRaises(ValueError):
            FogParams(airlight=(0.0, 300.0, 0.0))


class HeteroFogTest(TestBase):
    def test_mean_extinction(self) -> None:
        img = self._random_image(96, 64)
        for jitter in (-0.05, 0.0, 0.03):
            params = FogParams(jitter=jitter)
            _, k_map, _ = hetero_fog(img, params, OctaveSpec(), seed=21)
            with self.subTest(jitter=jitter):
                ratio = k_map.values.mean() / (params.k0 * (1 + jitter))
                self.assertAlmostEqual(float(ratio), 1.0, delta=1e-6)
                self.assertTrue(np.all(k_map.values >= 0))

    def test_spatially_varying(self) -> None:
        img = self._random_image(64, 64)
        _, k_map, _ = hetero_fog(img, FogParams(), OctaveSpec(), 2)
        self.assertGreater(float(k_map.values.std()), 0.0)

    def test_transmission_follows_extinction(self) -> None:
        img = self._random_image(40, 30)
        params = FogParams()
        fogged, k_map, t = hetero_fog(img, params, OctaveSpec(), 6)
        d = depth_map(40, 30, params.depth_max)
        np.testing.assert_allclose(
            t.values, np.exp(-k_map.values * d.values), rtol=0, atol=1e-12
        )
        expected, _ = apply_koschmieder(img, k_map, d, params.airlight)
        self.assert_images_equal(expected, fogged)

    def test_constant_pattern_rejected(self) -> None:
        with self.assertRaises(DegenerateRangeError):
            extinction_map(ScalarField.constant(8, 8, 0.5), 0.0375)

    def test_deterministic(self) -> None:
        img = self._random_image(48, 32)
        self.assertEqual(
            hetero_fog(img, FogParams(), OctaveSpec(), 4),
            hetero_fog(img, FogParams(), OctaveSpec(), 4),
        )
