import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import UnidentifiedImageError
from tqdm import tqdm

from core.errors import InputError
from core.formats import read_png, write_kmf, write_png, write_uvf
from core.probes import default_uv_scale, visualize_scalar, visualize_uv
from core.seeding import Purpose, SeedSpec, derive_seed, make_rng
from pipeline.config import GenerationConfig, GenerationMode
from pipeline.corruption import Corruption, CorruptionResult
from pipeline.record import (
    MANIFEST_NAME,
    GenerationRecord,
    Rectification,
    write_manifest,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Job:
    stream_id: int
    input_path: Path
    corruption: Corruption
    seed: int
    output_dir: Path
    visualize: bool
    emit_transmission: bool
    config: GenerationConfig


@dataclass(frozen=True)
class Skipped:
    input_path: Path
    reason: str


@dataclass
class GenerationResult:
    records: list[GenerationRecord] = field(default_factory=list)
    skipped: list[Skipped] = field(default_factory=list)

    @property
    def skipped_inputs(self) -> list[Path]:
        return sorted({s.input_path for s in self.skipped})


def list_inputs(input_dir: Path) -> list[Path]:
    """
    PNG files in sorted name order; the position in this list is the stream id.
    """
    if not input_dir.is_dir():
        raise InputError(f"Input directory {input_dir} does not exist")
    inputs = sorted(
        (p for p in input_dir.iterdir() if p.is_file() and p.suffix.lower() == ".png"),
        key=lambda p: p.name,
    )
    if not inputs:
        raise InputError(f"No PNG files found in {input_dir}")
    return inputs


def select_corruption(weights: list[float], global_seed: int, stream_id: int) -> int:
    """
    Index of the corruption drawn for one input in mix mode.
    """
    rng = make_rng(derive_seed(SeedSpec(global_seed, stream_id, Purpose.SELECT)))
    p = np.asarray(weights, dtype=np.float64)
    return int(rng.choice(len(p), p=p / p.sum()))


def record_seed(global_seed: int, stream_id: int, corruption: Corruption) -> int:
    return derive_seed(SeedSpec(global_seed, stream_id, corruption.purpose()))


def plan_jobs(config: GenerationConfig, inputs: list[Path]) -> list[Job]:
    assert config.output_dir is not None
    jobs = []
    for stream_id, path in enumerate(inputs):
        if config.mode == GenerationMode.MIX:
            index = select_corruption(config.weights(), config.seed, stream_id)
            chosen = [config.corruptions[index]]
        else:
            chosen = list(config.corruptions)
        for corruption in chosen:
            jobs.append(
                Job(
                    stream_id,
                    path,
                    corruption,
                    record_seed(config.seed, stream_id, corruption),
                    config.output_dir,
                    config.visualize,
                    config.emit_transmission,
                    config,
                )
            )
    return jobs


def _write_outputs(job: Job, stem: str, result: CorruptionResult) -> dict[str, str]:
    outputs = {"image": f"{stem}.png"}
    write_png(job.output_dir / outputs["image"], result.image)
    if result.uv is not None:
        outputs["uv"] = f"{stem}.uvf"
        write_uvf(job.output_dir / outputs["uv"], result.uv)
    if result.scalar_map is not None:
        outputs["map"] = f"{stem}.kmf"
        write_kmf(job.output_dir / outputs["map"], result.scalar_map)
    if job.emit_transmission and result.transmission is not None:
        outputs["transmission"] = f"{stem}.t.kmf"
        write_kmf(job.output_dir / outputs["transmission"], result.transmission)
    if job.visualize:
        outputs["viz"] = f"{stem}.viz.png"
        if result.uv is not None:
            viz = visualize_uv(result.uv, default_uv_scale(result.uv))
        else:
            assert result.scalar_map is not None
            viz = visualize_scalar(result.scalar_map)
        write_png(job.output_dir / outputs["viz"], viz)
    return outputs


def process_job(job: Job) -> GenerationRecord | Skipped:
    """
    A failure anywhere in one record skips that record only. The corruption is
    fully computed before the first output file is written.
    """
    try:
        return _generate_record(job)
    except (OSError, UnidentifiedImageError, ValueError) as e:
        return Skipped(job.input_path, str(e))


def _generate_record(job: Job) -> GenerationRecord:
    img = read_png(job.input_path)
    rectification = None
    camera = job.config.camera
    if camera.calibration is not None:
        rectification = Rectification(
            camera.intrinsics_for(img.width, img.height), camera.calibration
        )
        img = rectification.apply(img)

    corruption = job.corruption
    params = corruption.sample_params(
        make_rng(job.seed),
        img.width,
        img.height,
        camera.intrinsics_for(img.width, img.height),
    )
    result = corruption.apply(img, params, job.seed)
    stem = f"{job.input_path.stem}.{corruption.get_name()}"
    return GenerationRecord(
        input=str(job.input_path),
        stream_id=job.stream_id,
        corruption=corruption.get_name(),
        seed=job.seed,
        params=params,
        outputs=_write_outputs(job, stem, result),
        scalars=result.scalars,
        rectification=rectification,
    )


def run_generate(config: GenerationConfig) -> GenerationResult:
    """
    Corrupts every input and writes the outputs plus manifest.jsonl. Seeds are
    fixed before any work starts, so the worker count never changes a byte of
    output. Records that fail to decode or corrupt are skipped and reported.
    """
    if config.input_dir is None:
        raise InputError("No input directory given")
    if config.output_dir is None:
        raise InputError("No output directory given")
    inputs = list_inputs(config.input_dir)
    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(
            f"Cannot create output directory {config.output_dir}: {e}"
        ) from e

    jobs = plan_jobs(config, inputs)
    logger.info(
        "Generating %d records from %d inputs (mode %s, corruptions %s, %d workers)",
        len(jobs),
        len(inputs),
        config.mode,
        ", ".join(c.get_name() for c in config.corruptions),
        config.workers,
    )

    with tqdm(total=len(jobs), desc="Generating", unit="record") as progress:
        if config.workers == 1:
            outcomes = map(process_job, jobs)
            result = _collect(outcomes, progress)
        else:
            with ProcessPoolExecutor(max_workers=config.workers) as executor:
                # map() yields in submission order, keeping the manifest stable
                outcomes = executor.map(process_job, jobs, chunksize=4)
                result = _collect(outcomes, progress)

    try:
        write_manifest(config.output_dir / MANIFEST_NAME, result.records)
    except OSError as e:
        raise InputError(f"Cannot write manifest to {config.output_dir}: {e}") from e
    logger.info(
        "Wrote %d records, skipped %d inputs",
        len(result.records),
        len(result.skipped_inputs),
    )
    return result


def _collect(outcomes, progress: tqdm) -> GenerationResult:
    result = GenerationResult()
    for outcome in outcomes:
        if isinstance(outcome, Skipped):
            logger.warning("Skipping %s: %s", outcome.input_path, outcome.reason)
            result.skipped.append(outcome)
        else:
            logger.debug("Wrote %s", outcome.image_name)
            result.records.append(outcome)
        progress.update(1)
    return result
