from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import DegenerateRangeError, SizeMismatchError
from core.raster import ScalarField, pixel_grid
from core.seeding import Purpose, make_rng, sub_seed

# Lattice period in cells; larger than any frame at the finest default scale
TABLE_SIZE = 4096

# Default octaves for heterogeneous fog
DEFAULT_SCALES = (4.0, 8.0, 16.0, 32.0, 64.0, 128.0)
DEFAULT_WEIGHTS = (0.30, 0.22, 0.15, 0.11, 0.08, 0.07)


@dataclass(frozen=True)
class OctaveSpec:
    scales: tuple[float, ...] = DEFAULT_SCALES
    weights: tuple[float, ...] = DEFAULT_WEIGHTS

    def __post_init__(self) -> None:
        if len(self.scales) == 0:
            raise ValueError("At least one octave is required")
        if len(self.scales) != len(self.weights):
            raise ValueError(
                f"Got {len(self.scales)} scales but {len(self.weights)} weights"
            )
        if any(s < 1 for s in self.scales):
            raise ValueError(f"Octave scales must be at least 1, got {self.scales}")
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"Octave weights must be positive, got {self.weights}")

    def weight_sum(self) -> float:
        return float(sum(self.weights))


class GradientLattice:
    """
    Seeded permutation table and unit gradients for 2D gradient noise.
    """

    def __init__(self, seed: int) -> None:
        rng = make_rng(seed)
        self.permutation = rng.permutation(TABLE_SIZE)
        angles = rng.uniform(0.0, 2.0 * np.pi, TABLE_SIZE)
        self.gradients = np.stack([np.cos(angles), np.sin(angles)], axis=-1)

    def _hash(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        mask = TABLE_SIZE - 1
        return self.permutation[(self.permutation[i & mask] + j) & mask]

    def _corner(
        self, i: np.ndarray, j: np.ndarray, dx: np.ndarray, dy: np.ndarray
    ) -> np.ndarray:
        gradient = self.gradients[self._hash(i, j)]
        return gradient[..., 0] * dx + gradient[..., 1] * dy

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """
        Noise at lattice coordinates (x, y); exactly zero at integer nodes.
        """
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        x0 = np.floor(x)
        y0 = np.floor(y)
        tx = x - x0
        ty = y - y0
        i = x0.astype(np.int64)
        j = y0.astype(np.int64)

        n00 = self._corner(i, j, tx, ty)
        n10 = self._corner(i + 1, j, tx - 1, ty)
        n01 = self._corner(i, j + 1, tx, ty - 1)
        n11 = self._corner(i + 1, j + 1, tx - 1, ty - 1)

        fx = _fade(tx)
        fy = _fade(ty)
        top = n00 + fx * (n10 - n00)
        bottom = n01 + fx * (n11 - n01)
        return top + fy * (bottom - top)


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6 - 15) + 10)


def sample_perlin(width: int, height: int, scale: float, seed: int) -> ScalarField:
    assert scale >= 1, f"Perlin scale must be at least 1 pixel, got {scale}"
    xs, ys = pixel_grid(width, height)
    return ScalarField(GradientLattice(seed).evaluate(xs / scale, ys / scale))


def normalize_01(field: ScalarField) -> ScalarField:
    low = float(field.values.min())
    high = float(field.values.max())
    if not high > low:
        raise DegenerateRangeError(f"Cannot normalize a constant field ({low})")
    return ScalarField((field.values - low) / (high - low))


def combine_octaves(
    layers: Sequence[ScalarField], weights: Sequence[float]
) -> ScalarField:
    """
    Weighted mean of [0, 1] layers, divided by the weight sum.
    """
    assert len(layers) == len(weights) and len(layers) > 0
    size = layers[0].size
    total = np.zeros((layers[0].height, layers[0].width))
    for layer, weight in zip(layers, weights):
        if layer.size != size:
            raise SizeMismatchError("Octave layer", size, layer.size)
        total += weight * layer.values
    combined = total / float(sum(weights))
    # Rounding can push a convex combination a hair outside [0, 1]
    return ScalarField(np.clip(combined, 0.0, 1.0))


def multiscale_perlin(
    width: int, height: int, octaves: OctaveSpec, seed: int
) -> ScalarField:
    layers = [
        normalize_01(
            sample_perlin(width, height, scale, sub_seed(seed, Purpose.NOISE, index))
        )
        for index, scale in enumerate(octaves.scales)
    ]
    return combine_octaves(layers, octaves.weights)
