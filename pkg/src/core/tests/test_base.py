import unittest

import numpy as np

from core.raster import ImageBuffer, ScalarField, UVField


class TestBase(unittest.TestCase):
    @staticmethod
    def _random_image(width: int, height: int, seed: int = 7) -> ImageBuffer:
        rng = np.random.default_rng(seed)
        return ImageBuffer(rng.integers(0, 256, (height, width, 3), dtype=np.uint8))

    @staticmethod
    def _uniform_image(
        width: int, height: int, rgb: tuple[int, int, int]
    ) -> ImageBuffer:
        data = np.empty((height, width, 3), dtype=np.uint8)
        data[:, :] = rgb
        return ImageBuffer(data)

    @staticmethod
    def _smooth_image(width: int, height: int, seed: int = 0) -> ImageBuffer:
        """
        A natural-looking frame with no detail finer than ~40 px, so bilinear
        resampling error stays well below one intensity level per pixel shift.
        """
        rng = np.random.default_rng(seed)
        ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
        channels = []
        for _ in range(3):
            plane = np.full((height, width), 128.0)
            for _ in range(4):
                fx, fy = rng.uniform(-1, 1, 2) * (2 * np.pi / 48)
                phase = rng.uniform(0, 2 * np.pi)
                plane += rng.uniform(10, 25) * np.sin(fx * xs + fy * ys + phase)
            channels.append(plane)
        return ImageBuffer.from_float(np.stack(channels, axis=-1))

    @staticmethod
    def _scene_image(width: int, height: int, seed: int = 0) -> ImageBuffer:
        """
        Flat-shaded discs and squares with hard edges over a shaded background
        carrying a fine low-contrast grating.
        """
        rng = np.random.default_rng(seed)
        ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
        base = rng.uniform(70, 150, 3)
        shading = 40 * ys / height
        grating = 5 * np.sin(2 * np.pi * (xs + 0.6 * ys) / 9)
        rgb = base + (shading + grating)[:, :, np.newaxis]
        for _ in range(8):
            color = base + rng.uniform(-60, 60, 3)
            cx, cy = rng.uniform(0, width), rng.uniform(0, height)
            size = rng.uniform(0.05, 0.15) * min(width, height)
            if rng.random() < 0.5:
                mask = np.hypot(xs - cx, ys - cy) < size
            else:
                mask = (np.abs(xs - cx) < size) & (np.abs(ys - cy) < size)
            rgb[mask] = color
        return ImageBuffer.from_float(rgb)

    @staticmethod
    def _horizontal_ramp(width: int, height: int, step: int = 2) -> ImageBuffer:
        row = (np.arange(width) * step).astype(np.uint8)
        data = np.repeat(np.repeat(row[np.newaxis, :, np.newaxis], 3, 2), height, 0)
        return ImageBuffer(data)

    @staticmethod
    def _xy_field(width: int, height: int, fn) -> ScalarField:
        ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
        return ScalarField(fn(xs, ys))

    def assert_images_equal(self, expected: ImageBuffer, actual: ImageBuffer) -> None:
        self.assertEqual(expected.size, actual.size)
        np.testing.assert_array_equal(expected.data, actual.data)

    def assert_field_close(
        self, expected: UVField, actual: UVField, atol: float = 1e-9
    ) -> None:
        self.assertEqual(expected.size, actual.size)
        np.testing.assert_allclose(actual.u, expected.u, rtol=0, atol=atol)
        np.testing.assert_allclose(actual.v, expected.v, rtol=0, atol=atol)

    def assert_all_zero(self, field: UVField) -> None:
        self.assertTrue(np.all(field.u == 0) and np.all(field.v == 0))
