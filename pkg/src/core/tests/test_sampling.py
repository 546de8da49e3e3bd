import numpy as np

from core.errors import SizeMismatchError
from core.raster import ImageBuffer, UVField
from core.sampling import BorderPolicy, bilinear_sample, remap
from core.tests.test_base import TestBase


class BilinearSampleTest(TestBase):
    def test_grid_node_is_exact(self) -> None:
        img = self._random_image(9, 7)
        for x, y in [(0, 0), (3, 4), (8, 6), (5, 0)]:
            with self.subTest(x=x, y=y):
                expected = tuple(float(c) for c in img.data[y, x])
                self.assertEqual(bilinear_sample(img, x, y), expected)

    def test_half_pixel_between_10_and_20(self) -> None:
        data = np.zeros((2, 2, 3), dtype=np.uint8)
        data[:, 0] = 10
        data[:, 1] = 20
        self.assertEqual(bilinear_sample(ImageBuffer(data), 0.5, 0), (15.0, 15.0, 15.0))

    def test_clamp_far_outside(self) -> None:
        img = self._random_image(6, 5)
        cases = [
            ((-100.0, -100.0), (0, 0)),
            ((1000.0, 2.0), (2, 5)),
            ((3.0, 1e6), (4, 3)),
            ((1e6, -1e6), (0, 5)),
        ]
        for (x, y), (row, col) in cases:
            with self.subTest(x=x, y=y):
                expected = tuple(float(c) for c in img.data[row, col])
                self.assertEqual(bilinear_sample(img, x, y), expected)

    def test_constant_border(self) -> None:
        img = self._uniform_image(4, 4, (100, 100, 100))
        border = BorderPolicy.constant(0)
        self.assertEqual(bilinear_sample(img, -50, -50, border), (0.0, 0.0, 0.0))
        # Halfway past the edge blends with the border value
        self.assertEqual(bilinear_sample(img, -0.5, 1, border), (50.0, 50.0, 50.0))

    def test_continuity(self) -> None:
        img = self._random_image(16, 16, seed=3)
        rng = np.random.default_rng(5)
        for _ in range(200):
            x, y = rng.uniform(-2, 18, 2)
            eps = rng.uniform(0, 1)
            a = np.array(bilinear_sample(img, x, y))
            b = np.array(bilinear_sample(img, x + eps, y))
            self.assertTrue(np.all(np.abs(a - b) <= eps * 255 + 1e-9))


class RemapTest(TestBase):
    def test_zero_field_is_identity(self) -> None:
        for width, height in [(2, 2), (17, 9), (64, 48)]:
            with self.subTest(width=width, height=height):
                img = self._random_image(width, height)
                self.assert_images_equal(img, remap(img, UVField.zeros(width, height)))

    def test_unit_shift_duplicates_right_edge(self) -> None:
        img = self._random_image(8, 5)
        shifted = remap(img, UVField.constant(8, 5, 1.0, 0.0))
        np.testing.assert_array_equal(shifted.data[:, :-1], img.data[:, 1:])
        np.testing.assert_array_equal(shifted.data[:, -1], img.data[:, -1])

    def test_half_shift_on_ramp_averages_neighbours(self) -> None:
        img = self._horizontal_ramp(20, 4, step=4)
        shifted = remap(img, UVField.constant(20, 4, 0.5, 0.0))
        for x in range(0, 19):
            with self.subTest(x=x):
                expected = (int(img.data[0, x, 0]) + int(img.data[0, x + 1, 0])) // 2
                self.assertEqual(int(shifted.data[0, x, 0]), expected)

    def test_integer_shift_round_trip_restores_interior(self) -> None:
        img = self._random_image(32, 24)
        for a, b in [(2, 0), (0, -3), (3, 2), (-1, -4)]:
            with self.subTest(a=a, b=b):
                there = remap(img, UVField.constant(32, 24, a, b))
                back = remap(there, UVField.constant(32, 24, -a, -b))
                margin_x, margin_y = abs(a), abs(b)
                np.testing.assert_array_equal(
                    back.data[margin_y : 24 - margin_y, margin_x : 32 - margin_x],
                    img.data[margin_y : 24 - margin_y, margin_x : 32 - margin_x],
                )

    def test_size_mismatch(self) -> None:
        img = self._random_image(8, 8)
        with self.assertRaises(SizeMismatchError):
            remap(img, UVField.zeros(8, 9))
