from dataclasses import dataclass, field
from typing import Any

import numpy as np

from core.raster import UVField, pixel_grid


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self) -> None:
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(
                f"Focal lengths must be positive, got {self.fx}, {self.fy}"
            )

    @staticmethod
    def default_for(width: int, height: int) -> "CameraIntrinsics":
        """
        Uncalibrated fallback: focal length equal to the image width, principal
        point at the image centre.
        """
        return CameraIntrinsics(
            float(width), float(width), (width - 1) / 2.0, (height - 1) / 2.0
        )

    def check_inside(self, width: int, height: int) -> None:
        if not (0 <= self.cx <= width - 1 and 0 <= self.cy <= height - 1):
            raise ValueError(
                f"Principal point ({self.cx}, {self.cy}) is outside a "
                f"{width}x{height} image"
            )

    def serialize(self) -> dict[str, Any]:
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy}

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "CameraIntrinsics":
        return CameraIntrinsics(
            float(data["fx"]), float(data["fy"]), float(data["cx"]), float(data["cy"])
        )


@dataclass(frozen=True)
class LensParams:
    """
    Extended Brown-Conrady coefficients: radial k1..k6, tangential p1, p2 and
    thin-prism s1..s4.
    """

    k: tuple[float, ...] = field(default=(0.0,) * 6)
    p: tuple[float, ...] = (0.0, 0.0)
    s: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        assert len(self.k) == 6, f"Expected 6 radial coefficients, got {len(self.k)}"
        assert len(self.p) == 2 and len(self.s) == 4
        values = (*self.k, *self.p, *self.s)
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"Lens coefficients must be finite, got {values}")

    @staticmethod
    def radial(*k: float) -> "LensParams":
        return LensParams(k=tuple(k) + (0.0,) * (6 - len(k)))

    def serialize(self) -> dict[str, Any]:
        return {"k": list(self.k), "p": list(self.p), "s": list(self.s)}

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "LensParams":
        k = tuple(float(v) for v in data.get("k", []))
        return LensParams(
            k=k + (0.0,) * (6 - len(k)),
            p=tuple(float(v) for v in data.get("p", [0.0, 0.0])),
            s=tuple(float(v) for v in data.get("s", [0.0] * 4)),
        )


def distort_normalized(
    x: np.ndarray, y: np.ndarray, lens: LensParams
) -> tuple[np.ndarray, np.ndarray]:
    """
    Forward Brown-Conrady model on normalized image-plane coordinates.
    """
    r2 = x * x + y * y
    radial = np.ones_like(r2)
    power = np.ones_like(r2)
    for k in lens.k:
        power = power * r2
        radial = radial + k * power
    p1, p2 = lens.p
    s1, s2, s3, s4 = lens.s
    r4 = r2 * r2
    x_d = x * radial + 2 * p1 * x * y + p2 * (r2 + 2 * x * x) + s1 * r2 + s2 * r4
    y_d = y * radial + p1 * (r2 + 2 * y * y) + 2 * p2 * x * y + s3 * r2 + s4 * r4
    return x_d, y_d


def brown_conrady_uv(
    width: int, height: int, intr: CameraIntrinsics, lens: LensParams
) -> UVField:
    """
    Evaluates the model at every destination pixel and stores the source
    position minus the pixel, so remap() applies the distortion directly.
    """
    xs, ys = pixel_grid(width, height)
    x = (xs - intr.cx) / intr.fx
    y = (ys - intr.cy) / intr.fy
    x_d, y_d = distort_normalized(x, y, lens)
    # Differences taken in normalized units so a zero model gives exact zeros
    return UVField((x_d - x) * intr.fx, (y_d - y) * intr.fy)
