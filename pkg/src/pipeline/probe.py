import logging
from dataclasses import dataclass
from pathlib import Path

from core.errors import ConfigError
from core.formats import write_png, write_uvf
from core.probes import default_uv_scale, render_checkerboard, visualize_uv
from core.raster import ImageBuffer, UVField
from core.sampling import remap
from core.seeding import make_rng
from pipeline.config import GenerationConfig
from pipeline.corruption import RefractiveCorruption
from pipeline.generate import record_seed

logger = logging.getLogger(__name__)

DEFAULT_PROBE_SIZE = 512
DEFAULT_CELL = 32


@dataclass(frozen=True)
class ProbeResult:
    corruption: str
    field: UVField
    probe: ImageBuffer
    paths: list[Path]


def run_checkerboard(
    config: GenerationConfig,
    width: int = DEFAULT_PROBE_SIZE,
    height: int = DEFAULT_PROBE_SIZE,
    cell: int = DEFAULT_CELL,
) -> list[ProbeResult]:
    """
    Warps a checkerboard with one field sampled from each refractive corruption
    in the config (stream 0), writing the probe, its field and the field
    visualization. Weather corruptions are ignored.
    """
    refractive = [c for c in config.corruptions if isinstance(c, RefractiveCorruption)]
    if not refractive:
        raise ConfigError(
            "corruptions", "checkerboard probes need a refractive corruption"
        )
    if config.output_dir is None:
        raise ConfigError("output", "no output directory given")
    config.output_dir.mkdir(parents=True, exist_ok=True)

    board = render_checkerboard(width, height, cell)
    intrinsics = config.camera.intrinsics_for(width, height)
    results = []
    for corruption in refractive:
        seed = record_seed(config.seed, 0, corruption)
        params = corruption.sample_params(make_rng(seed), width, height, intrinsics)
        field = corruption.displacement(params, width, height, seed)
        probe = remap(board, field)
        stem = config.output_dir / f"checkerboard.{corruption.get_name()}"
        paths = [
            stem.with_name(stem.name + ".png"),
            stem.with_name(stem.name + ".uvf"),
            stem.with_name(stem.name + ".viz.png"),
        ]
        write_png(paths[0], probe)
        write_uvf(paths[1], field)
        write_png(paths[2], visualize_uv(field, default_uv_scale(field)))
        logger.info("Wrote checkerboard probe for %s", corruption.get_name())
        results.append(ProbeResult(corruption.get_name(), field, probe, paths))
    return results
