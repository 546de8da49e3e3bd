import json
from dataclasses import dataclass, field, replace
from enum import StrEnum
from pathlib import Path
from typing import Any

from core.errors import ConfigError
from core.seeding import MASK_64
from pipeline.corruption import Corruption, CorruptionRegistry
from pipeline.schema import check_keys, join, read_bool, read_int
from warps.lens import CameraIntrinsics, LensParams

"""
Generation config, read from a JSON file:

    {
        "input": "frames",
        "output": "corrupted",
        "seed": 7,
        "mode": "mix",
        "workers": 4,
        "visualize": true,
        "emit_transmission": false,
        "camera": {
            "intrinsics": {"fx": 1280, "fy": 1280, "cx": 639.5, "cy": 359.5},
            "calibration": {"k": [-0.12, 0.03], "p": [0, 0], "s": [0, 0, 0, 0]}
        },
        "corruptions": {
            "grf_warp": {"weight": 2, "correlation_length": [16, 64], "alpha": [1, 4]},
            "uniform_fog": {"visibility": 100, "base_extinction": 0.0375},
            "lens_flare": {}
        }
    }

Every corruption block is optional and falls back to the defaults of its
class; a range is either [low, high] or a single number. Unknown keys are
errors. "calibration", when present, is removed from every input before it is
corrupted.
"""


class GenerationMode(StrEnum):
    # One corruption per input, drawn from the weights
    MIX = "mix"
    # Every configured corruption on every input
    ALL = "all"


@dataclass(frozen=True)
class CameraConfig:
    intrinsics: CameraIntrinsics | None = None
    calibration: LensParams | None = None

    def intrinsics_for(self, width: int, height: int) -> CameraIntrinsics:
        if self.intrinsics is None:
            return CameraIntrinsics.default_for(width, height)
        self.intrinsics.check_inside(width, height)
        return self.intrinsics

    def serialize(self) -> dict[str, Any]:
        data: dict[str, Any] = {}
        if self.intrinsics is not None:
            data["intrinsics"] = self.intrinsics.serialize()
        if self.calibration is not None:
            data["calibration"] = self.calibration.serialize()
        return data

    @staticmethod
    def deserialize(data: Any, path: str) -> "CameraConfig":
        check_keys(data, ["intrinsics", "calibration"], path)
        intrinsics = None
        if "intrinsics" in data:
            intrinsics_path = join(path, "intrinsics")
            block = check_keys(
                data["intrinsics"], ["fx", "fy", "cx", "cy"], intrinsics_path
            )
            try:
                intrinsics = CameraIntrinsics.deserialize(block)
            except (KeyError, TypeError, ValueError) as e:
                raise ConfigError(intrinsics_path, f"invalid intrinsics ({e})") from e
        calibration = None
        if "calibration" in data:
            calibration_path = join(path, "calibration")
            block = check_keys(data["calibration"], ["k", "p", "s"], calibration_path)
            try:
                calibration = LensParams.deserialize(block)
            except (AssertionError, TypeError, ValueError) as e:
                raise ConfigError(calibration_path, f"invalid lens ({e})") from e
        return CameraConfig(intrinsics, calibration)


def _default_corruptions() -> tuple[Corruption, ...]:
    registry = CorruptionRegistry()
    return tuple(registry.get(name).default() for name in registry.names())


@dataclass(frozen=True)
class GenerationConfig:
    corruptions: tuple[Corruption, ...] = field(default_factory=_default_corruptions)
    input_dir: Path | None = None
    output_dir: Path | None = None
    seed: int = 0
    mode: GenerationMode = GenerationMode.MIX
    workers: int = 1
    visualize: bool = False
    emit_transmission: bool = False
    camera: CameraConfig = CameraConfig()

    def __post_init__(self) -> None:
        if len(self.corruptions) == 0:
            raise ConfigError("corruptions", "at least one corruption is required")
        if self.mode == GenerationMode.MIX and not sum(self.weights()) > 0:
            raise ConfigError("corruptions", "mix weights must not all be zero")

    def weights(self) -> list[float]:
        return [c.weight for c in self.corruptions]

    def with_overrides(
        self,
        input_dir: Path | None = None,
        output_dir: Path | None = None,
        seed: int | None = None,
        workers: int | None = None,
        visualize: bool | None = None,
    ) -> "GenerationConfig":
        """
        Command-line flags win over the file; None keeps the file's value.
        """
        if seed is not None and not 0 <= seed <= MASK_64:
            raise ConfigError("seed", f"must fit in 64 bits, got {seed}")
        if workers is not None and workers < 1:
            raise ConfigError("workers", f"must be at least 1, got {workers}")
        return replace(
            self,
            input_dir=self.input_dir if input_dir is None else input_dir,
            output_dir=self.output_dir if output_dir is None else output_dir,
            seed=self.seed if seed is None else seed,
            workers=self.workers if workers is None else workers,
            visualize=self.visualize if visualize is None else visualize,
        )

    def serialize(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "seed": self.seed,
            "mode": str(self.mode),
            "workers": self.workers,
            "visualize": self.visualize,
            "emit_transmission": self.emit_transmission,
            "camera": self.camera.serialize(),
            "corruptions": {c.get_name(): c.serialize() for c in self.corruptions},
        }
        if self.input_dir is not None:
            data["input"] = str(self.input_dir)
        if self.output_dir is not None:
            data["output"] = str(self.output_dir)
        return data

    @staticmethod
    def deserialize(data: Any) -> "GenerationConfig":
        check_keys(
            data,
            [
                "input",
                "output",
                "seed",
                "mode",
                "workers",
                "visualize",
                "emit_transmission",
                "camera",
                "corruptions",
            ],
            "",
        )
        seed = read_int(data.get("seed", 0), "seed", minimum=0)
        if seed > MASK_64:
            raise ConfigError("seed", f"must fit in 64 bits, got {seed}")

        mode = data.get("mode", str(GenerationMode.MIX))
        if mode not in list(GenerationMode):
            raise ConfigError(
                "mode", f"expected one of {[str(m) for m in GenerationMode]}"
            )

        registry = CorruptionRegistry()
        if "corruptions" in data:
            blocks = check_keys(data["corruptions"], registry.names(), "corruptions")
            # Registry order, not file order, so reordering keys keeps the mix draws
            corruptions = tuple(
                registry.deserialize(name, blocks[name], join("corruptions", name))
                for name in registry.names()
                if name in blocks
            )
        else:
            corruptions = _default_corruptions()

        return GenerationConfig(
            corruptions=corruptions,
            input_dir=_read_path(data, "input"),
            output_dir=_read_path(data, "output"),
            seed=seed,
            mode=GenerationMode(mode),
            workers=read_int(data.get("workers", 1), "workers", minimum=1),
            visualize=read_bool(data.get("visualize", False), "visualize"),
            emit_transmission=read_bool(
                data.get("emit_transmission", False), "emit_transmission"
            ),
            camera=CameraConfig.deserialize(data.get("camera", {}), "camera"),
        )

    @staticmethod
    def load(path: Path) -> "GenerationConfig":
        try:
            with open(path, "r") as config_file:
                data = json.loads(config_file.read())
        except OSError as e:
            raise ConfigError("", f"cannot read config {path}: {e.strerror}") from e
        except json.JSONDecodeError as e:
            raise ConfigError("", f"{path} is not valid JSON: {e}") from e
        return GenerationConfig.deserialize(data)


def _read_path(data: dict[str, Any], key: str) -> Path | None:
    if key not in data:
        return None
    if not isinstance(data[key], str):
        raise ConfigError(key, f"expected a path string, got {data[key]!r}")
    return Path(data[key])
