from dataclasses import dataclass
from typing import Self

import numpy as np

from core.errors import SizeMismatchError

"""
Immutable raster and field containers. All arrays are row-major with the
origin at the top-left, indexed [y, x].
"""


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    data: np.ndarray

    def __post_init__(self) -> None:
        assert self.data.dtype == np.uint8, f"Expected uint8, got {self.data.dtype}"
        assert (
            self.data.ndim == 3 and self.data.shape[2] == 3
        ), f"Expected HxWx3 data, got shape {self.data.shape}"
        assert self.width >= 2 and self.height >= 2, "Images must be at least 2x2"
        object.__setattr__(self, "data", _frozen(self.data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    @staticmethod
    def from_float(values: np.ndarray) -> "ImageBuffer":
        """
        Single rounding step from real-valued [0, 255] channels to 8-bit.
        """
        return ImageBuffer(np.clip(np.rint(values), 0, 255).astype(np.uint8))

    def as_float(self) -> np.ndarray:
        return self.data.astype(np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return False
        return np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class ScalarField:
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        assert values.ndim == 2, f"Expected HxW values, got shape {values.shape}"
        assert np.all(np.isfinite(values)), "Scalar fields must be finite"
        object.__setattr__(self, "values", _frozen(values))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    @classmethod
    def constant(cls, width: int, height: int, value: float) -> Self:
        return cls(np.full((height, width), value, dtype=np.float64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarField):
            return False
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class UVField:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        assert u.ndim == 2, f"Expected HxW displacements, got shape {u.shape}"
        if u.shape != v.shape:
            raise SizeMismatchError(
                "UV components", (u.shape[1], u.shape[0]), (v.shape[1], v.shape[0])
            )
        assert np.all(np.isfinite(u)) and np.all(
            np.isfinite(v)
        ), "UV fields must be finite"
        object.__setattr__(self, "u", _frozen(u))
        object.__setattr__(self, "v", _frozen(v))

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def height(self) -> int:
        return self.u.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    @staticmethod
    def zeros(width: int, height: int) -> "UVField":
        return UVField(np.zeros((height, width)), np.zeros((height, width)))

    @staticmethod
    def constant(width: int, height: int, u: float, v: float) -> "UVField":
        return UVField(np.full((height, width), u), np.full((height, width), v))

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.u, self.v)

    def scaled(self, factor: float) -> "UVField":
        return UVField(self.u * factor, self.v * factor)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UVField):
            return False
        return np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v)


def pixel_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns (xs, ys), each HxW, holding the pixel coordinates.
    """
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    return xs, ys


def require_same_size(what: str, expected: tuple[int, int], actual: tuple[int, int]):
    if expected != actual:
        raise SizeMismatchError(what, expected, actual)
