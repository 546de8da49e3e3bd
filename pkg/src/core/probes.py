import numpy as np

from core.raster import ImageBuffer, ScalarField, UVField

MIDPOINT = 128
HALF_RANGE = 127


def render_checkerboard(width: int, height: int, cell: int) -> ImageBuffer:
    """
    Black and white cells with the top-left cell white: pixel (x, y) is white
    iff floor(x / cell) + floor(y / cell) is even.
    """
    assert cell >= 1, f"Cell size must be at least 1, got {cell}"
    ys, xs = np.mgrid[0:height, 0:width]
    white = ((xs // cell + ys // cell) % 2) == 0
    plane = np.where(white, 255, 0).astype(np.uint8)
    return ImageBuffer(np.repeat(plane[:, :, np.newaxis], 3, axis=2))


def _encode_signed(values: np.ndarray, scale: float) -> np.ndarray:
    return np.clip(np.rint(MIDPOINT + HALF_RANGE * values / scale), 0, 255)


def visualize_uv(field: UVField, scale: float) -> ImageBuffer:
    """
    Red encodes u and green encodes v around a 128 midpoint; +scale maps to 255
    and -scale to 1. Blue is always 0.
    """
    assert scale > 0, f"Scale must be positive, got {scale}"
    rgb = np.zeros((field.height, field.width, 3))
    rgb[:, :, 0] = _encode_signed(field.u, scale)
    rgb[:, :, 1] = _encode_signed(field.v, scale)
    return ImageBuffer(rgb.astype(np.uint8))


def visualize_scalar(field: ScalarField) -> ImageBuffer:
    low = float(field.values.min())
    high = float(field.values.max())
    if high > low:
        gray = np.rint((field.values - low) / (high - low) * 255)
    else:
        # Constant fields have no contrast to show
        gray = np.full(field.values.shape, MIDPOINT)
    plane = gray.astype(np.uint8)
    return ImageBuffer(np.repeat(plane[:, :, np.newaxis], 3, axis=2))


def default_uv_scale(field: UVField) -> float:
    peak = float(max(np.abs(field.u).max(), np.abs(field.v).max()))
    return peak if peak > 0 else 1.0
