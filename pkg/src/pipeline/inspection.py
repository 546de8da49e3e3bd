import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from core.formats import read_field, write_png
from core.probes import default_uv_scale, visualize_scalar, visualize_uv
from core.raster import UVField
from core.report_format import ReportFormat


@dataclass(frozen=True)
class ChannelStats:
    name: str
    minimum: float
    maximum: float
    mean: float

    @staticmethod
    def of(name: str, values: np.ndarray) -> "ChannelStats":
        return ChannelStats(
            name, float(values.min()), float(values.max()), float(values.mean())
        )

    def serialize(self) -> dict[str, Any]:
        return {"min": self.minimum, "max": self.maximum, "mean": self.mean}


@dataclass(frozen=True)
class InspectResult:
    path: Path
    kind: str
    width: int
    height: int
    channels: list[ChannelStats]
    visualization: Path

    def serialize(self) -> dict[str, Any]:
        return {
            "path": str(self.path),
            "kind": self.kind,
            "width": self.width,
            "height": self.height,
            "channels": {c.name: c.serialize() for c in self.channels},
            "visualization": str(self.visualization),
        }

    def print(self, mode: ReportFormat) -> None:
        if mode == ReportFormat.JSON:
            print(json.dumps(self.serialize()))
            return

        print(f"{self.path}: {self.kind} field, {self.width}x{self.height}")
        for channel in self.channels:
            print(
                f"\t{channel.name}: min {channel.minimum:.6g}, "
                f"max {channel.maximum:.6g}, mean {channel.mean:.6g}"
            )
        print(f"Visualization written to {self.visualization}")


def run_inspect(path: Path, output: Path | None = None) -> InspectResult:
    """
    Renders a UVF or KMF file as a PNG (next to it unless `output` is given)
    and summarizes its values.
    """
    field = read_field(path)
    if output is None:
        output = path.with_name(path.name + ".png")
    if isinstance(field, UVField):
        write_png(output, visualize_uv(field, default_uv_scale(field)))
        channels = [ChannelStats.of("u", field.u), ChannelStats.of("v", field.v)]
        kind = "uv"
    else:
        write_png(output, visualize_scalar(field))
        channels = [ChannelStats.of("value", field.values)]
        kind = "scalar"
    return InspectResult(path, kind, field.width, field.height, channels, output)
