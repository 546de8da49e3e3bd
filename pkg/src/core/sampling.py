from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import ndimage

from core.raster import ImageBuffer, UVField, pixel_grid, require_same_size


class BorderMode(StrEnum):
    CLAMP = "clamp"
    CONSTANT = "constant"


@dataclass(frozen=True)
class BorderPolicy:
    mode: BorderMode = BorderMode.CLAMP
    value: float = 0.0

    def __post_init__(self) -> None:
        assert 0.0 <= self.value <= 255.0, "Border value must be an 8-bit intensity"

    @staticmethod
    def clamp() -> "BorderPolicy":
        return BorderPolicy(BorderMode.CLAMP)

    @staticmethod
    def constant(value: float) -> "BorderPolicy":
        return BorderPolicy(BorderMode.CONSTANT, value)

    def scipy_mode(self) -> str:
        # grid-constant blends with the constant beyond the edge instead of
        # switching to it abruptly, which keeps sampling continuous
        if self.mode == BorderMode.CLAMP:
            return "nearest"
        return "grid-constant"


CLAMP = BorderPolicy.clamp()


def sample_plane(
    plane: np.ndarray, xs: np.ndarray, ys: np.ndarray, border: BorderPolicy = CLAMP
) -> np.ndarray:
    """
    Bilinear lookup of a single real-valued plane at fractional (x, y).
    """
    return ndimage.map_coordinates(
        plane,
        [ys, xs],
        order=1,
        mode=border.scipy_mode(),
        cval=border.value,
        output=np.float64,
    )


def sample_channels(
    img: ImageBuffer, xs: np.ndarray, ys: np.ndarray, border: BorderPolicy = CLAMP
) -> np.ndarray:
    """
    Returns the real-valued bilinear samples of every channel, shape xs.shape + (3,).
    """
    data = img.as_float()
    return np.stack(
        [sample_plane(data[:, :, c], xs, ys, border) for c in range(3)], axis=-1
    )


def bilinear_sample(
    img: ImageBuffer, x: float, y: float, border: BorderPolicy = CLAMP
) -> tuple[float, float, float]:
    rgb = sample_channels(img, np.array([x]), np.array([y]), border)[0]
    return (float(rgb[0]), float(rgb[1]), float(rgb[2]))


def remap(
    img: ImageBuffer, field: UVField, border: BorderPolicy = CLAMP
) -> ImageBuffer:
    """
    out(x, y) = img(x + u(x, y), y + v(x, y)), bilinear, rounded once to 8-bit.
    """
    require_same_size("UV field vs image", img.size, field.size)
    xs, ys = pixel_grid(img.width, img.height)
    return ImageBuffer.from_float(
        sample_channels(img, xs + field.u, ys + field.v, border)
    )
