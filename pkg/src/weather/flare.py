import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from core.raster import ImageBuffer, ScalarField, pixel_grid
from core.seeding import Purpose, make_rng, sub_seed


@dataclass(frozen=True)
class FlareParams:
    """
    Gaussian veiling flare. `radius_fraction` is the flare radius as a fraction
    of the image diagonal and `intensity` the peak gain as a fraction of 255.
    Without a center one is drawn from the seed in the upper-middle of the frame.
    An explicit center is not restricted to the frame. Off-frame centers light
    only the part of the glow that reaches inside, and zero intensity is the
    identity wherever the center lies.
    """

    radius_fraction: float
    intensity: float
    center: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not self.radius_fraction > 0:
            raise ValueError(
                f"Flare radius fraction must be positive, got {self.radius_fraction}"
            )
        if not 0 <= self.intensity <= 1:
            raise ValueError(
                f"Flare intensity must lie in [0, 1], got {self.intensity}"
            )

    def serialize(self) -> dict[str, Any]:
        return {
            "radius_fraction": self.radius_fraction,
            "intensity": self.intensity,
            "center": None if self.center is None else list(self.center),
        }

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "FlareParams":
        center = data.get("center")
        return FlareParams(
            float(data["radius_fraction"]),
            float(data["intensity"]),
            None if center is None else (float(center[0]), float(center[1])),
        )


def flare_radius(width: int, height: int, radius_fraction: float) -> float:
    return radius_fraction * math.hypot(width, height)


def draw_flare_center(
    width: int, height: int, rng: np.random.Generator
) -> tuple[float, float]:
    cx = float(rng.uniform(0.3 * width, 0.7 * width))
    cy = float(rng.uniform(0.0, 0.3 * height))
    return cx, cy


def sample_flare_center(width: int, height: int, seed: int) -> tuple[float, float]:
    rng = make_rng(sub_seed(seed, Purpose.FLARE_CENTER))
    return draw_flare_center(width, height, rng)


def flare_mask(
    width: int, height: int, center: tuple[float, float], radius: float
) -> ScalarField:
    xs, ys = pixel_grid(width, height)
    distance = np.hypot(xs - center[0], ys - center[1])
    return ScalarField(np.exp(-0.5 * (distance / radius) ** 2))


def lens_flare(
    img: ImageBuffer, params: FlareParams, seed: int
) -> tuple[ImageBuffer, ScalarField]:
    center = params.center
    if center is None:
        center = sample_flare_center(img.width, img.height, seed)
    radius = flare_radius(img.width, img.height, params.radius_fraction)
    mask = flare_mask(img.width, img.height, center, radius)
    gain = params.intensity * 255.0 * mask.values
    return ImageBuffer.from_float(img.as_float() + gain[:, :, np.newaxis]), mask
