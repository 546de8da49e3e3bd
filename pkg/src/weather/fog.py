import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from core.errors import DegenerateRangeError, NegativeFieldError
from core.raster import ImageBuffer, ScalarField, pixel_grid, require_same_size
from core.seeding import Purpose, make_rng, sub_seed
from fields.perlin import OctaveSpec, multiscale_perlin

"""
Koschmieder fog. Every variant blends the clean frame toward the atmospheric
light A with transmission t = exp(-k d), where the scene depth d grows linearly
from the bottom of the frame to D_max at the top row.
"""

# Contrast threshold in the meteorological visibility definition
CONTRAST_THRESHOLD = 0.05
MAX_JITTER = 0.05

DEFAULT_VISIBILITY = 100.0
DEFAULT_DEPTH_MAX = 160.0
DEFAULT_AIRLIGHT = (220.0, 220.0, 235.0)
DEFAULT_EXTINCTION = 0.0375


def extinction_coefficient(visibility: float) -> float:
    """
    Extinction at which contrast falls to 5% over `visibility` meters. Note
    that 100 m gives ~0.030, not the 0.0375 default (which matches ~80 m).
    """
    assert visibility > 0, f"Visibility must be positive, got {visibility}"
    return -math.log(CONTRAST_THRESHOLD) / visibility


@dataclass(frozen=True)
class FogParams:
    visibility: float = DEFAULT_VISIBILITY
    depth_max: float = DEFAULT_DEPTH_MAX
    airlight: tuple[float, ...] = DEFAULT_AIRLIGHT
    # None derives the base extinction from the visibility
    base_extinction: float | None = DEFAULT_EXTINCTION
    # None samples the per-image perturbation from the seed
    jitter: float | None = None

    def __post_init__(self) -> None:
        if not self.visibility > 0:
            raise ValueError(f"Visibility must be positive, got {self.visibility}")
        if not self.depth_max > 0:
            raise ValueError(f"Maximum depth must be positive, got {self.depth_max}")
        if len(self.airlight) != 3 or not all(0 <= c <= 255 for c in self.airlight):
            raise ValueError(
                f"Atmospheric light must be RGB in [0, 255], got {self.airlight}"
            )
        if self.base_extinction is not None and not self.base_extinction >= 0:
            raise ValueError(
                f"Base extinction must be non-negative, got {self.base_extinction}"
            )
        if self.jitter is not None and not abs(self.jitter) <= MAX_JITTER:
            raise ValueError(
                f"Jitter must lie within +-{MAX_JITTER}, got {self.jitter}"
            )

    @property
    def k0(self) -> float:
        if self.base_extinction is None:
            return extinction_coefficient(self.visibility)
        return self.base_extinction

    def with_jitter(self, jitter: float) -> "FogParams":
        return FogParams(
            self.visibility, self.depth_max, self.airlight, self.base_extinction, jitter
        )

    def draw_jitter(self, seed: int) -> float:
        if self.jitter is not None:
            return self.jitter
        rng = make_rng(sub_seed(seed, Purpose.JITTER))
        return float(rng.uniform(-MAX_JITTER, MAX_JITTER))

    def serialize(self) -> dict[str, Any]:
        return {
            "visibility": self.visibility,
            "depth_max": self.depth_max,
            "airlight": list(self.airlight),
            "base_extinction": self.base_extinction,
            "jitter": self.jitter,
        }

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "FogParams":
        airlight = tuple(float(c) for c in data.get("airlight", DEFAULT_AIRLIGHT))
        return FogParams(
            visibility=float(data.get("visibility", DEFAULT_VISIBILITY)),
            depth_max=float(data.get("depth_max", DEFAULT_DEPTH_MAX)),
            airlight=airlight,
            base_extinction=data.get("base_extinction", DEFAULT_EXTINCTION),
            jitter=data.get("jitter"),
        )


def depth_map(width: int, height: int, depth_max: float) -> ScalarField:
    assert depth_max > 0, f"Maximum depth must be positive, got {depth_max}"
    _, ys = pixel_grid(width, height)
    return ScalarField((1.0 - ys / height) * depth_max)


def apply_koschmieder(
    img: ImageBuffer,
    k: ScalarField | float,
    d: ScalarField,
    airlight: tuple[float, ...],
) -> tuple[ImageBuffer, ScalarField]:
    """
    I_fog = I t + A (1 - t) per channel with t = exp(-k d), rounded once.
    Returns the fogged frame and the transmission map.
    """
    require_same_size("Depth map", img.size, d.size)
    if isinstance(k, ScalarField):
        require_same_size("Extinction map", img.size, k.size)
        extinction = k.values
    else:
        extinction = np.full(d.values.shape, float(k))
    if np.min(extinction) < 0:
        raise NegativeFieldError(
            f"Extinction must be non-negative, got {np.min(extinction)}"
        )
    if np.min(d.values) < 0:
        raise NegativeFieldError(f"Depth must be non-negative, got {np.min(d.values)}")

    t = np.exp(-extinction * d.values)
    blend = t[:, :, np.newaxis]
    fogged = img.as_float() * blend + np.asarray(airlight, float) * (1.0 - blend)
    return ImageBuffer.from_float(fogged), ScalarField(t)


def uniform_fog(
    img: ImageBuffer, params: FogParams, seed: int
) -> tuple[ImageBuffer, ScalarField, float]:
    k = params.k0 * (1.0 + params.draw_jitter(seed))
    d = depth_map(img.width, img.height, params.depth_max)
    fogged, t = apply_koschmieder(img, k, d, params.airlight)
    return fogged, t, k


def extinction_map(pattern: ScalarField, k: float) -> ScalarField:
    """
    Scales a non-negative noise pattern so its mean is exactly k.
    """
    low = float(pattern.values.min())
    high = float(pattern.values.max())
    if not high > low:
        raise DegenerateRangeError(f"Fog pattern is constant ({low})")
    if low < 0:
        raise NegativeFieldError(f"Fog pattern must be non-negative, got {low}")
    return ScalarField(k * pattern.values / pattern.values.mean())


def hetero_fog(
    img: ImageBuffer, params: FogParams, octaves: OctaveSpec, seed: int
) -> tuple[ImageBuffer, ScalarField, ScalarField]:
    """
    Returns the fogged frame, the extinction map and the transmission map.
    """
    k = params.k0 * (1.0 + params.draw_jitter(seed))
    pattern = multiscale_perlin(
        img.width, img.height, octaves, sub_seed(seed, Purpose.NOISE)
    )
    k_map = extinction_map(pattern, k)
    d = depth_map(img.width, img.height, params.depth_max)
    fogged, t = apply_koschmieder(img, k_map, d, params.airlight)
    return fogged, k_map, t
