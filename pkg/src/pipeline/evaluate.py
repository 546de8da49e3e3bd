import logging
import shutil
from dataclasses import dataclass
from pathlib import Path

from PIL import UnidentifiedImageError
from tqdm import tqdm

from core.formats import read_png, read_uvf, write_png
from core.sampling import remap
from metrics.quality import epe, psnr
from metrics.report import MetricReport, MetricSummary, write_report
from pipeline.record import GenerationRecord, load_clean, read_manifest
from warps.inversion import invert_uv

logger = logging.getLogger(__name__)

REPORT_NAME = "report.jsonl"


@dataclass(frozen=True)
class MetricsResult:
    reports: list[MetricReport]
    summary: MetricSummary


def _evaluate(
    record: GenerationRecord, pred_dir: Path, gt_dir: Path, input_dir: Path | None
) -> MetricReport:
    prediction = read_png(pred_dir / record.image_name)
    score = psnr(prediction, load_clean(record, input_dir))
    error = None
    uv_name = record.outputs.get("uv")
    # EPE only when a displacement estimate was submitted next to the image
    if uv_name is not None and (pred_dir / uv_name).exists():
        error = epe(read_uvf(pred_dir / uv_name), read_uvf(gt_dir / uv_name))
    return MetricReport(record.image_name, score, error)


def run_metrics(
    pred_dir: Path,
    manifest: Path,
    input_dir: Path | None = None,
    report_path: Path | None = None,
) -> MetricsResult:
    """
    Scores every prediction named after a manifest record against its clean
    input. Missing predictions and pairs that cannot be scored (unreadable
    files, wrong frame size) are listed in the summary rather than raised so
    the remaining pairs are still scored.
    """
    records = read_manifest(manifest)
    gt_dir = manifest.parent
    reports = []
    missing = []
    failed = []
    for record in tqdm(records, desc="Evaluating", unit="pair"):
        if not (pred_dir / record.image_name).exists():
            missing.append(record.image_name)
            continue
        try:
            reports.append(_evaluate(record, pred_dir, gt_dir, input_dir))
        except (OSError, UnidentifiedImageError, ValueError) as e:
            logger.warning("Cannot score %s: %s", record.image_name, e)
            failed.append(record.image_name)

    if missing:
        logger.warning("%d of %d predictions are missing", len(missing), len(records))
    summary = MetricSummary.from_reports(reports, missing, failed)
    if report_path is None:
        report_path = pred_dir / REPORT_NAME
    write_report(report_path, reports, summary)
    return MetricsResult(reports, summary)


def run_baseline(manifest: Path, pred_dir: Path) -> int:
    """
    Classical correction: refractive outputs are resampled with the numerical
    inverse of their ground-truth field, weather outputs are copied unchanged.
    Returns the number of predictions written.
    """
    records = read_manifest(manifest)
    gt_dir = manifest.parent
    pred_dir.mkdir(parents=True, exist_ok=True)
    for record in tqdm(records, desc="Restoring", unit="image"):
        source = gt_dir / record.image_name
        target = pred_dir / record.image_name
        uv_name = record.outputs.get("uv")
        if uv_name is None:
            shutil.copyfile(source, target)
            continue
        restored = remap(read_png(source), invert_uv(read_uvf(gt_dir / uv_name)))
        write_png(target, restored)
        logger.debug("Restored %s", record.image_name)
    return len(records)
