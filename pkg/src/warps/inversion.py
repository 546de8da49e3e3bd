import logging

import numpy as np

from core.raster import UVField, pixel_grid
from core.sampling import sample_plane

logger = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 50
DEFAULT_TOLERANCE = 1e-3


def invert_uv(
    field: UVField,
    iterations: int = DEFAULT_ITERATIONS,
    tol: float = DEFAULT_TOLERANCE,
) -> UVField:
    """
    Approximate inverse g of a backward-sampling field f, such that
    remap(remap(img, f), g) ~ img. Solves g(p) = -f(p + g(p)) by fixed-point
    iteration from g = 0, sampling f bilinearly with clamped borders. Converges
    where the field's local gradient is below one.
    """
    assert iterations >= 1, f"Need at least one iteration, got {iterations}"
    xs, ys = pixel_grid(field.width, field.height)
    gu = np.zeros_like(xs)
    gv = np.zeros_like(ys)
    update = np.inf
    for iteration in range(iterations):
        qx = xs + gu
        qy = ys + gv
        next_u = -sample_plane(field.u, qx, qy)
        next_v = -sample_plane(field.v, qx, qy)
        update = float(np.max(np.hypot(next_u - gu, next_v - gv), initial=0.0))
        gu, gv = next_u, next_v
        if update < tol:
            logger.debug("Field inverse converged after %d iterations", iteration + 1)
            break
    else:
        logger.debug(
            "Field inverse stopped at %d iterations (last update %.3g px)",
            iterations,
            update,
        )
    return UVField(gu, gv)


def composition_residual(field: UVField, inverse: UVField) -> np.ndarray:
    """
    Per-pixel length of inverse(p) + field(p + inverse(p)); zero for an exact
    inverse.
    """
    xs, ys = pixel_grid(field.width, field.height)
    qx = xs + inverse.u
    qy = ys + inverse.v
    ru = inverse.u + sample_plane(field.u, qx, qy)
    rv = inverse.v + sample_plane(field.v, qx, qy)
    return np.hypot(ru, rv)
