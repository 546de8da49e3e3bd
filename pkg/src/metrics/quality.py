import math

import numpy as np

from core.raster import ImageBuffer, UVField, require_same_size

MAX_VALUE = 255.0


def mean_squared_error(a: ImageBuffer, b: ImageBuffer) -> float:
    require_same_size("Compared image", a.size, b.size)
    diff = a.as_float() - b.as_float()
    return float(np.mean(diff * diff))


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """
    Peak signal-to-noise ratio in dB over all pixels and channels. Identical
    images give math.inf.
    """
    mse = mean_squared_error(a, b)
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(MAX_VALUE**2 / mse)


def epe(pred: UVField, gt: UVField) -> float:
    """
    Mean Euclidean distance between predicted and ground-truth displacements.
    """
    require_same_size("Predicted field", gt.size, pred.size)
    return float(np.mean(np.hypot(pred.u - gt.u, pred.v - gt.v)))
