from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, override

import numpy as np

from core.errors import ConfigError
from core.raster import ImageBuffer, ScalarField, UVField
from core.sampling import remap
from core.seeding import Purpose
from fields.perlin import OctaveSpec
from pipeline.schema import Range, check_keys, join, read_int, read_number, read_numbers
from warps.lens import CameraIntrinsics, LensParams, brown_conrady_uv
from warps.tps import TpsControlSet, jittered_grid_controls, tps_fit, tps_uv
from warps.turbulence import divergence_free_uv, grf_warp_uv
from weather.fog import MAX_JITTER, FogParams, hetero_fog, uniform_fog
from weather.flare import FlareParams, draw_flare_center, lens_flare


@dataclass(frozen=True, eq=False)
class CorruptionResult:
    image: ImageBuffer
    uv: UVField | None = None
    scalar_map: ScalarField | None = None
    transmission: ScalarField | None = None
    scalars: dict[str, float] = field(default_factory=dict)


class Corruption(ABC):
    """
    One configured corruption family. Instances hold the sampling ranges read
    from the config; `sample_params` turns them into concrete values for one
    image, and `apply` depends only on those values and the record seed so a
    manifest record can be replayed without the config.
    """

    weight: float = 1.0

    @staticmethod
    @abstractmethod
    def get_name() -> str:
        pass

    @staticmethod
    @abstractmethod
    def purpose() -> Purpose:
        pass

    @staticmethod
    @abstractmethod
    def default() -> "Corruption":
        pass

    @staticmethod
    @abstractmethod
    def deserialize(data: dict[str, Any], path: str) -> "Corruption":
        pass

    @abstractmethod
    def serialize(self) -> dict[str, Any]:
        pass

    @abstractmethod
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        pass

    @classmethod
    @abstractmethod
    def apply(
        cls, img: ImageBuffer, params: dict[str, Any], seed: int
    ) -> CorruptionResult:
        pass


class RefractiveCorruption(Corruption):
    @classmethod
    @abstractmethod
    def displacement(
        cls, params: dict[str, Any], width: int, height: int, seed: int
    ) -> UVField:
        pass

    @classmethod
    @override
    def apply(
        cls, img: ImageBuffer, params: dict[str, Any], seed: int
    ) -> CorruptionResult:
        uv = cls.displacement(params, img.width, img.height, seed)
        return CorruptionResult(remap(img, uv), uv=uv)


def _read_weight(data: dict[str, Any], path: str) -> float:
    if "weight" not in data:
        return 1.0
    weight = read_number(data["weight"], join(path, "weight"))
    if weight < 0:
        raise ConfigError(join(path, "weight"), f"must be non-negative, got {weight}")
    return weight


def _read_range(data: dict[str, Any], key: str, path: str, fallback: Range) -> Range:
    if key not in data:
        return fallback
    return Range.deserialize(data[key], join(path, key))


def _read_ranges(
    data: dict[str, Any], key: str, path: str, fallback: tuple[Range, ...]
) -> tuple[Range, ...]:
    """
    A list of up to len(fallback) ranges; omitted trailing entries are fixed at 0.
    """
    if key not in data:
        return fallback
    values = data[key]
    if not isinstance(values, list) or len(values) > len(fallback):
        raise ConfigError(
            join(path, key), f"expected a list of at most {len(fallback)} ranges"
        )
    ranges = [
        Range.deserialize(v, join(join(path, key), i)) for i, v in enumerate(values)
    ]
    return tuple(ranges) + (Range.fixed(0.0),) * (len(fallback) - len(ranges))


def _check_length_alpha(length: Range, alpha: Range, path: str) -> None:
    if not length.low > 0:
        raise ConfigError(join(path, "correlation_length"), "must be positive")
    if not alpha.low >= 0:
        raise ConfigError(join(path, "alpha"), "must be non-negative")


class BrownConradyCorruption(RefractiveCorruption):
    def __init__(
        self,
        k: tuple[Range, ...],
        p: tuple[Range, ...],
        s: tuple[Range, ...],
        weight: float = 1.0,
    ) -> None:
        assert len(k) == 6 and len(p) == 2 and len(s) == 4
        self.k = k
        self.p = p
        self.s = s
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "brown_conrady"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.BROWN_CONRADY

    @staticmethod
    @override
    def default() -> Corruption:
        small = Range(-0.01, 0.01)
        return BrownConradyCorruption(
            k=(Range(-0.3, 0.3), Range(-0.1, 0.1)) + (Range.fixed(0.0),) * 4,
            p=(small,) * 2,
            s=(small,) * 4,
        )

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", "k", "p", "s"], path)
        default = BrownConradyCorruption.default()
        assert isinstance(default, BrownConradyCorruption)
        return BrownConradyCorruption(
            k=_read_ranges(data, "k", path, default.k),
            p=_read_ranges(data, "p", path, default.p),
            s=_read_ranges(data, "s", path, default.s),
            weight=_read_weight(data, path),
        )

    @override
    def serialize(self) -> dict[str, Any]:
        return {
            "weight": self.weight,
            "k": [r.serialize() for r in self.k],
            "p": [r.serialize() for r in self.p],
            "s": [r.serialize() for r in self.s],
        }

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        lens = LensParams(
            k=tuple(r.sample(rng) for r in self.k),
            p=(self.p[0].sample(rng), self.p[1].sample(rng)),
            s=tuple(r.sample(rng) for r in self.s),
        )
        return {"lens": lens.serialize(), "intrinsics": intrinsics.serialize()}

    @classmethod
    @override
    def displacement(
        cls, params: dict[str, Any], width: int, height: int, seed: int
    ) -> UVField:
        return brown_conrady_uv(
            width,
            height,
            CameraIntrinsics.deserialize(params["intrinsics"]),
            LensParams.deserialize(params["lens"]),
        )


class GrfWarpCorruption(RefractiveCorruption):
    def __init__(
        self, correlation_length: Range, alpha: Range, weight: float = 1.0
    ) -> None:
        self.correlation_length = correlation_length
        self.alpha = alpha
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "grf_warp"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.GRF_WARP

    @staticmethod
    @override
    def default() -> Corruption:
        return GrfWarpCorruption(Range(16.0, 64.0), Range(1.0, 4.0))

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", "correlation_length", "alpha"], path)
        length = _read_range(data, "correlation_length", path, Range(16.0, 64.0))
        alpha = _read_range(data, "alpha", path, Range(1.0, 4.0))
        _check_length_alpha(length, alpha, path)
        return GrfWarpCorruption(length, alpha, _read_weight(data, path))

    @override
    def serialize(self) -> dict[str, Any]:
        return {
            "weight": self.weight,
            "correlation_length": self.correlation_length.serialize(),
            "alpha": self.alpha.serialize(),
        }

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        return {
            "correlation_length": self.correlation_length.sample(rng),
            "alpha": self.alpha.sample(rng),
        }

    @classmethod
    @override
    def displacement(
        cls, params: dict[str, Any], width: int, height: int, seed: int
    ) -> UVField:
        return grf_warp_uv(
            width, height, params["correlation_length"], params["alpha"], seed
        )


class TpsCorruption(RefractiveCorruption):
    def __init__(self, grid: int = 4, jitter: float = 8.0, weight: float = 1.0) -> None:
        self.grid = grid
        self.jitter = jitter
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "tps"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.TPS

    @staticmethod
    @override
    def default() -> Corruption:
        return TpsCorruption()

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", "grid", "jitter"], path)
        grid = read_int(data.get("grid", 4), join(path, "grid"), minimum=2)
        jitter = read_number(data.get("jitter", 8.0), join(path, "jitter"))
        if jitter < 0:
            raise ConfigError(
                join(path, "jitter"), f"must be non-negative, got {jitter}"
            )
        return TpsCorruption(grid, jitter, _read_weight(data, path))

    @override
    def serialize(self) -> dict[str, Any]:
        return {"weight": self.weight, "grid": self.grid, "jitter": self.jitter}

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        controls = jittered_grid_controls(width, height, self.grid, self.jitter, rng)
        return {"controls": controls.serialize()}

    @classmethod
    @override
    def displacement(
        cls, params: dict[str, Any], width: int, height: int, seed: int
    ) -> UVField:
        model = tps_fit(TpsControlSet.deserialize(params["controls"]))
        return tps_uv(model, width, height)


class DivergenceFreeCorruption(RefractiveCorruption):
    def __init__(
        self, correlation_length: Range, alpha: Range, weight: float = 1.0
    ) -> None:
        self.correlation_length = correlation_length
        self.alpha = alpha
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "divergence_free"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.DIVERGENCE_FREE

    @staticmethod
    @override
    def default() -> Corruption:
        return DivergenceFreeCorruption(Range(16.0, 64.0), Range(1.0, 4.0))

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", "correlation_length", "alpha"], path)
        length = _read_range(data, "correlation_length", path, Range(16.0, 64.0))
        alpha = _read_range(data, "alpha", path, Range(1.0, 4.0))
        _check_length_alpha(length, alpha, path)
        return DivergenceFreeCorruption(length, alpha, _read_weight(data, path))

    @override
    def serialize(self) -> dict[str, Any]:
        return {
            "weight": self.weight,
            "correlation_length": self.correlation_length.serialize(),
            "alpha": self.alpha.serialize(),
        }

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        return {
            "correlation_length": self.correlation_length.sample(rng),
            "alpha": self.alpha.sample(rng),
        }

    @classmethod
    @override
    def displacement(
        cls, params: dict[str, Any], width: int, height: int, seed: int
    ) -> UVField:
        return divergence_free_uv(
            width, height, params["correlation_length"], params["alpha"], seed
        )


_FOG_KEYS = ["visibility", "depth_max", "airlight", "base_extinction"]


def _read_fog(data: dict[str, Any], path: str) -> FogParams:
    default = FogParams()
    visibility = default.visibility
    if "visibility" in data:
        visibility = read_number(data["visibility"], join(path, "visibility"))
        if visibility <= 0:
            raise ConfigError(join(path, "visibility"), "must be positive")
    depth_max = default.depth_max
    if "depth_max" in data:
        depth_max = read_number(data["depth_max"], join(path, "depth_max"))
        if depth_max <= 0:
            raise ConfigError(join(path, "depth_max"), "must be positive")
    airlight = default.airlight
    if "airlight" in data:
        values = read_numbers(data["airlight"], join(path, "airlight"), 3)
        if not all(0 <= c <= 255 for c in values):
            raise ConfigError(join(path, "airlight"), "channels must lie in [0, 255]")
        airlight = (values[0], values[1], values[2])
    base_extinction = default.base_extinction
    if "base_extinction" in data:
        if data["base_extinction"] is None:
            base_extinction = None
        else:
            base_extinction = read_number(
                data["base_extinction"], join(path, "base_extinction")
            )
            if base_extinction < 0:
                raise ConfigError(join(path, "base_extinction"), "must be non-negative")
    return FogParams(visibility, depth_max, airlight, base_extinction)


def _serialize_fog(fog: FogParams) -> dict[str, Any]:
    data = fog.serialize()
    del data["jitter"]
    return data


class UniformFogCorruption(Corruption):
    def __init__(self, fog: FogParams = FogParams(), weight: float = 1.0) -> None:
        self.fog = fog
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "uniform_fog"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.UNIFORM_FOG

    @staticmethod
    @override
    def default() -> Corruption:
        return UniformFogCorruption()

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", *_FOG_KEYS], path)
        return UniformFogCorruption(_read_fog(data, path), _read_weight(data, path))

    @override
    def serialize(self) -> dict[str, Any]:
        return {"weight": self.weight, **_serialize_fog(self.fog)}

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        jitter = float(rng.uniform(-MAX_JITTER, MAX_JITTER))
        return {"fog": self.fog.with_jitter(jitter).serialize()}

    @classmethod
    @override
    def apply(
        cls, img: ImageBuffer, params: dict[str, Any], seed: int
    ) -> CorruptionResult:
        fogged, t, k = uniform_fog(img, FogParams.deserialize(params["fog"]), seed)
        return CorruptionResult(
            fogged,
            scalar_map=ScalarField.constant(img.width, img.height, k),
            transmission=t,
            scalars={"k": k},
        )


class HeteroFogCorruption(Corruption):
    def __init__(
        self,
        fog: FogParams = FogParams(),
        octaves: OctaveSpec = OctaveSpec(),
        weight: float = 1.0,
    ) -> None:
        self.fog = fog
        self.octaves = octaves
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "hetero_fog"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.HETERO_FOG

    @staticmethod
    @override
    def default() -> Corruption:
        return HeteroFogCorruption()

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", "octaves", *_FOG_KEYS], path)
        octaves = OctaveSpec()
        if "octaves" in data:
            octaves_path = join(path, "octaves")
            block = check_keys(data["octaves"], ["scales", "weights"], octaves_path)
            scales = read_numbers(
                block.get("scales", list(octaves.scales)), join(octaves_path, "scales")
            )
            weights = read_numbers(
                block.get("weights", list(octaves.weights)),
                join(octaves_path, "weights"),
            )
            try:
                octaves = OctaveSpec(scales, weights)
            except ValueError as e:
                raise ConfigError(octaves_path, str(e)) from e
        return HeteroFogCorruption(
            _read_fog(data, path), octaves, _read_weight(data, path)
        )

    @override
    def serialize(self) -> dict[str, Any]:
        return {
            "weight": self.weight,
            **_serialize_fog(self.fog),
            "octaves": {
                "scales": list(self.octaves.scales),
                "weights": list(self.octaves.weights),
            },
        }

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        jitter = float(rng.uniform(-MAX_JITTER, MAX_JITTER))
        return {
            "fog": self.fog.with_jitter(jitter).serialize(),
            "octaves": {
                "scales": list(self.octaves.scales),
                "weights": list(self.octaves.weights),
            },
        }

    @classmethod
    @override
    def apply(
        cls, img: ImageBuffer, params: dict[str, Any], seed: int
    ) -> CorruptionResult:
        fog = FogParams.deserialize(params["fog"])
        octaves = OctaveSpec(
            tuple(params["octaves"]["scales"]), tuple(params["octaves"]["weights"])
        )
        fogged, k_map, t = hetero_fog(img, fog, octaves, seed)
        k = fog.k0 * (1.0 + (fog.jitter or 0.0))
        return CorruptionResult(
            fogged, scalar_map=k_map, transmission=t, scalars={"k": k}
        )


class LensFlareCorruption(Corruption):
    def __init__(
        self,
        radius_fraction: Range = Range(0.25, 0.35),
        intensity: Range = Range(0.55, 0.65),
        weight: float = 1.0,
    ) -> None:
        self.radius_fraction = radius_fraction
        self.intensity = intensity
        self.weight = weight

    @staticmethod
    @override
    def get_name() -> str:
        return "lens_flare"

    @staticmethod
    @override
    def purpose() -> Purpose:
        return Purpose.LENS_FLARE

    @staticmethod
    @override
    def default() -> Corruption:
        return LensFlareCorruption()

    @staticmethod
    @override
    def deserialize(data: dict[str, Any], path: str) -> Corruption:
        check_keys(data, ["weight", "radius_fraction", "intensity"], path)
        radius = _read_range(data, "radius_fraction", path, Range(0.25, 0.35))
        intensity = _read_range(data, "intensity", path, Range(0.55, 0.65))
        if not radius.low > 0:
            raise ConfigError(join(path, "radius_fraction"), "must be positive")
        if not (intensity.low >= 0 and intensity.high <= 1):
            raise ConfigError(join(path, "intensity"), "must lie in [0, 1]")
        return LensFlareCorruption(radius, intensity, _read_weight(data, path))

    @override
    def serialize(self) -> dict[str, Any]:
        return {
            "weight": self.weight,
            "radius_fraction": self.radius_fraction.serialize(),
            "intensity": self.intensity.serialize(),
        }

    @override
    def sample_params(
        self,
        rng: np.random.Generator,
        width: int,
        height: int,
        intrinsics: CameraIntrinsics,
    ) -> dict[str, Any]:
        radius_fraction = self.radius_fraction.sample(rng)
        intensity = self.intensity.sample(rng)
        center = draw_flare_center(width, height, rng)
        return {"flare": FlareParams(radius_fraction, intensity, center).serialize()}

    @classmethod
    @override
    def apply(
        cls, img: ImageBuffer, params: dict[str, Any], seed: int
    ) -> CorruptionResult:
        flared, mask = lens_flare(img, FlareParams.deserialize(params["flare"]), seed)
        return CorruptionResult(flared, scalar_map=mask)


class CorruptionRegistry:
    def __init__(self) -> None:
        self.corruptions: dict[str, type[Corruption]] = {
            c.get_name(): c
            for c in [
                BrownConradyCorruption,
                GrfWarpCorruption,
                TpsCorruption,
                DivergenceFreeCorruption,
                UniformFogCorruption,
                HeteroFogCorruption,
                LensFlareCorruption,
            ]
        }

    def names(self) -> list[str]:
        return list(self.corruptions)

    def get(self, name: str) -> type[Corruption]:
        if name not in self.corruptions:
            raise KeyError(f"Unknown corruption {name!r}")
        return self.corruptions[name]

    def deserialize(self, name: str, data: dict[str, Any], path: str) -> Corruption:
        if name not in self.corruptions:
            raise ConfigError(
                path, f"unknown corruption, expected one of {self.names()}"
            )
        return self.corruptions[name].deserialize(data, path)
