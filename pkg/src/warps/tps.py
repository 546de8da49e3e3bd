from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg

from core.errors import ConditioningError
from core.raster import UVField, pixel_grid

# Above this the (N+3)x(N+3) system no longer pins the interpolant down
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class TpsControlSet:
    """
    Key-point pairs: each source pixel (row of `sources`) should map to the
    matching row of `targets`. Both are Nx2 arrays of (x, y) in pixels.
    """

    sources: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        sources = np.asarray(self.sources, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        assert sources.ndim == 2 and sources.shape[1] == 2, "Sources must be Nx2"
        if sources.shape != targets.shape:
            raise ValueError(
                f"Got {len(sources)} source points but {len(targets)} targets"
            )
        if len(sources) < 3:
            raise ValueError(f"TPS needs at least 3 control points, got {len(sources)}")
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)

    @property
    def count(self) -> int:
        return len(self.sources)

    def serialize(self) -> dict[str, Any]:
        return {"sources": self.sources.tolist(), "targets": self.targets.tolist()}

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "TpsControlSet":
        return TpsControlSet(np.array(data["sources"]), np.array(data["targets"]))


def kernel(r2: np.ndarray) -> np.ndarray:
    """
    U(r) = r^2 ln r written in terms of r^2, with U(0) = 0.
    """
    safe = np.where(r2 > 0, r2, 1.0)
    return 0.5 * r2 * np.log(safe)


@dataclass(frozen=True, eq=False)
class TpsModel:
    """
    Fitted spline in scaled coordinates p' = (p - center) / scale. `affine` is
    2x3 (rows f_x, f_y; columns 1, x', y'), `weights` is 2xN.
    """

    center: np.ndarray
    scale: float
    controls: np.ndarray
    affine: np.ndarray
    weights: np.ndarray

    def _to_scaled(
        self, xs: np.ndarray, ys: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        return (xs - self.center[0]) / self.scale, (ys - self.center[1]) / self.scale

    def evaluate(self, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sx, sy = self._to_scaled(np.asarray(xs, float), np.asarray(ys, float))
        fx = self.affine[0, 0] + self.affine[0, 1] * sx + self.affine[0, 2] * sy
        fy = self.affine[1, 0] + self.affine[1, 1] * sx + self.affine[1, 2] * sy
        for (cx, cy), wx, wy in zip(self.controls, self.weights[0], self.weights[1]):
            u = kernel((sx - cx) ** 2 + (sy - cy) ** 2)
            fx = fx + wx * u
            fy = fy + wy * u
        return fx, fy

    def pixel_affine(self) -> np.ndarray:
        """
        The affine part in pixel units: f = A[:, 0] + A[:, 1] x + A[:, 2] y.
        """
        linear = self.affine[:, 1:] / self.scale
        offset = self.affine[:, 0] - linear @ self.center
        return np.column_stack([offset, linear])

    def side_constraint_sums(self) -> np.ndarray:
        """
        Rows per axis of (sum w, sum w x', sum w y'); zero for a valid fit.
        """
        moments = np.column_stack([np.ones(len(self.controls)), self.controls])
        return self.weights @ moments


def tps_fit(controls: TpsControlSet) -> TpsModel:
    sources = controls.sources
    center = sources.mean(axis=0)
    scale = float(np.abs(sources - center).max())
    if scale == 0:
        raise ConditioningError("All TPS source points coincide")
    scaled = (sources - center) / scale

    n = controls.count
    moments = np.column_stack([np.ones(n), scaled])
    if np.linalg.matrix_rank(moments) < 3:
        raise ConditioningError("TPS source points are collinear")

    deltas = scaled[:, np.newaxis, :] - scaled[np.newaxis, :, :]
    system = np.zeros((n + 3, n + 3))
    system[:n, :n] = kernel(np.sum(deltas**2, axis=-1))
    system[:n, n:] = moments
    system[n:, :n] = moments.T

    condition = np.linalg.cond(system)
    if not condition < MAX_CONDITION:
        raise ConditioningError(f"TPS system is ill-conditioned (cond={condition:.3g})")

    rhs = np.zeros((n + 3, 2))
    rhs[:n] = controls.targets
    solution = linalg.solve(system, rhs, assume_a="sym")
    return TpsModel(
        center=center,
        scale=scale,
        controls=scaled,
        affine=solution[n:].T.copy(),
        weights=solution[:n].T.copy(),
    )


def tps_uv(model: TpsModel, width: int, height: int) -> UVField:
    xs, ys = pixel_grid(width, height)
    fx, fy = model.evaluate(xs, ys)
    return UVField(fx - xs, fy - ys)


def jittered_grid_controls(
    width: int, height: int, grid: int, jitter: float, rng: np.random.Generator
) -> TpsControlSet:
    """
    Default key-point sampler: a grid x grid lattice spanning the frame, each
    node paired with itself plus N(0, jitter^2) pixels of offset.
    """
    assert grid >= 2, f"Control grid must be at least 2x2, got {grid}"
    gx, gy = np.meshgrid(
        np.linspace(0, width - 1, grid), np.linspace(0, height - 1, grid)
    )
    sources = np.column_stack([gx.ravel(), gy.ravel()])
    targets = sources + rng.normal(0.0, jitter, sources.shape)
    return TpsControlSet(sources, targets)
