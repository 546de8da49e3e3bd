import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from core.formats import read_png
from core.raster import ImageBuffer
from core.sampling import remap
from pipeline.corruption import CorruptionRegistry, CorruptionResult
from warps.lens import CameraIntrinsics, LensParams, brown_conrady_uv

MANIFEST_NAME = "manifest.jsonl"


@dataclass(frozen=True)
class Rectification:
    """
    Calibrated lens removed from an input before it is corrupted.
    """

    intrinsics: CameraIntrinsics
    lens: LensParams

    def apply(self, img: ImageBuffer) -> ImageBuffer:
        field = brown_conrady_uv(img.width, img.height, self.intrinsics, self.lens)
        return remap(img, field)

    def serialize(self) -> dict[str, Any]:
        return {
            "intrinsics": self.intrinsics.serialize(),
            "lens": self.lens.serialize(),
        }

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "Rectification":
        return Rectification(
            CameraIntrinsics.deserialize(data["intrinsics"]),
            LensParams.deserialize(data["lens"]),
        )


@dataclass(frozen=True)
class GenerationRecord:
    """
    One generated pair. `outputs` maps a role (image, uv, map, transmission,
    viz) to a file name inside the output directory; `params` holds every
    sampled value so `replay` needs nothing but the record and the input.
    """

    input: str
    stream_id: int
    corruption: str
    seed: int
    params: dict[str, Any]
    outputs: dict[str, str]
    scalars: dict[str, float] = field(default_factory=dict)
    rectification: Rectification | None = None

    @property
    def image_name(self) -> str:
        return self.outputs["image"]

    def serialize(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "input": self.input,
            "stream_id": self.stream_id,
            "corruption": self.corruption,
            "seed": self.seed,
            "params": self.params,
            "outputs": self.outputs,
        }
        if self.scalars:
            data["scalars"] = self.scalars
        if self.rectification is not None:
            data["rectification"] = self.rectification.serialize()
        return data

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "GenerationRecord":
        rectification = data.get("rectification")
        if rectification is not None:
            rectification = Rectification.deserialize(rectification)
        return GenerationRecord(
            input=data["input"],
            stream_id=int(data["stream_id"]),
            corruption=data["corruption"],
            seed=int(data["seed"]),
            params=data["params"],
            outputs=data["outputs"],
            scalars=data.get("scalars", {}),
            rectification=rectification,
        )


def write_manifest(path: Path, records: Sequence[GenerationRecord]) -> None:
    with open(path, "w") as manifest_file:
        for record in records:
            manifest_file.write(json.dumps(record.serialize()) + "\n")


def read_manifest(path: Path) -> list[GenerationRecord]:
    with open(path, "r") as manifest_file:
        return [
            GenerationRecord.deserialize(json.loads(line))
            for line in manifest_file
            if line.strip()
        ]


def input_path(record: GenerationRecord, input_dir: Path | None = None) -> Path:
    if input_dir is None:
        return Path(record.input)
    return input_dir / Path(record.input).name


def load_clean(record: GenerationRecord, input_dir: Path | None = None) -> ImageBuffer:
    """
    The uncorrupted counterpart of a record: its input, rectified if the run
    was calibrated.
    """
    img = read_png(input_path(record, input_dir))
    if record.rectification is not None:
        img = record.rectification.apply(img)
    return img


def replay(record: GenerationRecord, input_dir: Path | None = None) -> CorruptionResult:
    corruption = CorruptionRegistry().get(record.corruption)
    return corruption.apply(load_clean(record, input_dir), record.params, record.seed)
