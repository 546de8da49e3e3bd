import tempfile
from pathlib import Path
from typing import Any

from core.formats import write_png
from core.tests.test_base import TestBase
from pipeline.config import GenerationConfig


class PipelineTestBase(TestBase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.root = Path(self._tmp.name)
        self.input_dir = self.root / "frames"
        self.output_dir = self.root / "out"
        self.input_dir.mkdir()

    def _write_inputs(
        self, count: int, width: int = 32, height: int = 24
    ) -> list[Path]:
        paths = []
        for i in range(count):
            path = self.input_dir / f"frame_{i:03d}.png"
            write_png(path, self._random_image(width, height, seed=i))
            paths.append(path)
        return paths

    def _config(self, **data: Any) -> GenerationConfig:
        data.setdefault("input", str(self.input_dir))
        data.setdefault("output", str(self.output_dir))
        return GenerationConfig.deserialize(data)

    @staticmethod
    def _tree_bytes(directory: Path) -> dict[str, bytes]:
        return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}
