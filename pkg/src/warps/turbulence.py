import numpy as np

from core.raster import ScalarField, UVField
from core.seeding import Purpose, sub_seed
from fields.grf import GrfParams, sample_grf


def _check(length: float, alpha: float) -> None:
    if not length > 0:
        raise ValueError(f"Correlation length must be positive, got {length}")
    if not alpha >= 0:
        raise ValueError(f"Displacement scale must be non-negative, got {alpha}")


def grf_warp_uv(
    width: int, height: int, length: float, alpha: float, seed: int
) -> UVField:
    """
    Heat-shimmer turbulence: two independent unit-variance exponential GRFs,
    scaled by alpha pixels.
    """
    _check(length, alpha)
    params = GrfParams(length)
    rx = sample_grf(width, height, params, sub_seed(seed, Purpose.FIELD_U))
    ry = sample_grf(width, height, params, sub_seed(seed, Purpose.FIELD_V))
    return UVField(alpha * rx.values, alpha * ry.values)


def stream_velocity(psi: ScalarField) -> UVField:
    """
    u = d(psi)/dy, v = -d(psi)/dx by central differences, one-sided on the
    border rows and columns.
    """
    d_dy, d_dx = np.gradient(psi.values)
    return UVField(d_dy, -d_dx)


def divergence(field: UVField) -> np.ndarray:
    """
    Central-difference divergence on the interior, shape (H-2)x(W-2).
    """
    du_dx = (field.u[1:-1, 2:] - field.u[1:-1, :-2]) / 2
    dv_dy = (field.v[2:, 1:-1] - field.v[:-2, 1:-1]) / 2
    return du_dx + dv_dy


def rescale_peak(field: UVField, alpha: float) -> UVField:
    peak = float(field.magnitude().max())
    if peak == 0:
        return UVField.zeros(field.width, field.height)
    return field.scaled(alpha / peak)


def divergence_free_uv(
    width: int, height: int, length: float, alpha: float, seed: int
) -> UVField:
    """
    Swirling incompressible warp from a GRF stream function, rescaled after
    differentiation so the largest displacement is exactly alpha pixels.
    """
    _check(length, alpha)
    psi = sample_grf(
        width, height, GrfParams(length), sub_seed(seed, Purpose.STREAM_FUNCTION)
    )
    return rescale_peak(stream_velocity(psi), alpha)
