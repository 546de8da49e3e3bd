"""
Gaussian random fields with exponential covariance exp(-d / l).

Sampling uses circulant embedding: the covariance is laid out on a torus of at
least twice the requested size (so no pair of output pixels wraps around), its
2D FFT gives the eigenvalues of the embedded covariance matrix, and complex
white noise shaped by their square root yields an exact sample wherever the
eigenvalues are non-negative. Exponential covariance on a doubled torus leaves
only tiny negative eigenvalues, which are clipped to zero. The output window
is finally standardized to empirical mean 0 and variance 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy import fft

from core.raster import ScalarField
from core.seeding import make_rng


@dataclass(frozen=True)
class GrfParams:
    correlation_length: float
    target_variance: float = 1.0

    def __post_init__(self) -> None:
        if not self.correlation_length > 0:
            raise ValueError(
                f"Correlation length must be positive, got {self.correlation_length}"
            )
        if not self.target_variance > 0:
            raise ValueError(
                f"Target variance must be positive, got {self.target_variance}"
            )


def _torus_distances(rows: int, cols: int) -> np.ndarray:
    dy = np.minimum(np.arange(rows), rows - np.arange(rows)).astype(np.float64)
    dx = np.minimum(np.arange(cols), cols - np.arange(cols)).astype(np.float64)
    return np.hypot(dy[:, np.newaxis], dx[np.newaxis, :])


def _embedding_spectrum(width: int, height: int, length: float) -> np.ndarray:
    rows = fft.next_fast_len(2 * height)
    cols = fft.next_fast_len(2 * width)
    covariance = np.exp(-_torus_distances(rows, cols) / length)
    eigenvalues = fft.fft2(covariance).real
    return np.clip(eigenvalues, 0.0, None)


def sample_grf(width: int, height: int, params: GrfParams, seed: int) -> ScalarField:
    spectrum = _embedding_spectrum(width, height, params.correlation_length)
    rows, cols = spectrum.shape
    rng = make_rng(seed)
    noise = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    # Real and imaginary parts are two independent samples; only one is kept
    sample = fft.fft2(np.sqrt(spectrum / (rows * cols)) * noise).real
    window = sample[:height, :width]
    window = window - window.mean()
    std = window.std()
    assert std > 0, "Degenerate Gaussian random field sample"
    return ScalarField(window / std * np.sqrt(params.target_variance))
