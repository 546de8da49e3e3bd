import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from core.report_format import ReportFormat

logger = logging.getLogger(__name__)

# Stands in for an infinite PSNR in serialized reports
INFINITE = "inf"


def _encode_psnr(value: float) -> float | str:
    return INFINITE if math.isinf(value) else value


def _decode_psnr(value: float | str) -> float:
    return math.inf if value == INFINITE else float(value)


@dataclass(frozen=True)
class MetricReport:
    name: str
    psnr: float
    epe: float | None = None

    def __post_init__(self) -> None:
        assert self.psnr >= 0, f"PSNR must be non-negative, got {self.psnr}"
        assert (
            self.epe is None or self.epe >= 0
        ), f"EPE must be non-negative, got {self.epe}"

    def serialize(self) -> dict[str, Any]:
        data: dict[str, Any] = {"name": self.name, "psnr": _encode_psnr(self.psnr)}
        if self.epe is not None:
            data["epe"] = self.epe
        return data

    @staticmethod
    def deserialize(data: dict[str, Any]) -> "MetricReport":
        epe = data.get("epe")
        return MetricReport(
            data["name"],
            _decode_psnr(data["psnr"]),
            None if epe is None else float(epe),
        )


@dataclass(frozen=True)
class MetricSummary:
    """
    Aggregate over the evaluated pairs. Infinite PSNRs are counted apart and left
    out of the mean so a few perfect pairs cannot dominate it.
    """

    pairs: int
    mean_psnr: float | None
    infinite_psnr_count: int
    mean_epe: float | None
    missing: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)

    @staticmethod
    def from_reports(
        reports: Sequence[MetricReport],
        missing: Sequence[str] = (),
        failed: Sequence[str] = (),
    ) -> "MetricSummary":
        finite = [r.psnr for r in reports if not math.isinf(r.psnr)]
        epes = [r.epe for r in reports if r.epe is not None]
        return MetricSummary(
            pairs=len(reports),
            mean_psnr=sum(finite) / len(finite) if finite else None,
            infinite_psnr_count=len(reports) - len(finite),
            mean_epe=sum(epes) / len(epes) if epes else None,
            missing=sorted(missing),
            failed=sorted(failed),
        )

    def serialize(self) -> dict[str, Any]:
        return {
            "summary": True,
            "pairs": self.pairs,
            "mean_psnr": self.mean_psnr,
            "infinite_psnr_count": self.infinite_psnr_count,
            "mean_epe": self.mean_epe,
            "missing": list(self.missing),
            "failed": list(self.failed),
        }

    def print(self, mode: ReportFormat) -> None:
        if mode == ReportFormat.JSON:
            print(json.dumps(self.serialize()))
            return

        print(f"Pairs evaluated = {self.pairs}")
        if self.mean_psnr is not None:
            print(f"Mean PSNR = {self.mean_psnr:.2f} dB")
        print(f"Identical pairs (infinite PSNR) = {self.infinite_psnr_count}")
        if self.mean_epe is not None:
            print(f"Mean EPE = {self.mean_epe:.4f} px")
        if self.missing:
            print(f"Missing predictions ({len(self.missing)}):")
            for name in self.missing:
                print(f"\t{name}")
        if self.failed:
            print(f"Pairs that could not be scored ({len(self.failed)}):")
            for name in self.failed:
                print(f"\t{name}")


def write_report(
    path: Path, reports: Sequence[MetricReport], summary: MetricSummary
) -> None:
    """
    One JSON object per pair followed by the summary object.
    """
    with open(path, "w") as report_file:
        for report in reports:
            report_file.write(json.dumps(report.serialize()) + "\n")
        report_file.write(json.dumps(summary.serialize()) + "\n")
    logger.info("Wrote %d metric records to %s", len(reports), path)


def read_report(path: Path) -> tuple[list[MetricReport], dict[str, Any]]:
    reports = []
    summary: dict[str, Any] = {}
    with open(path, "r") as report_file:
        for line in report_file:
            data = json.loads(line)
            if data.get("summary"):
                summary = data
            else:
                reports.append(MetricReport.deserialize(data))
    return reports, summary
