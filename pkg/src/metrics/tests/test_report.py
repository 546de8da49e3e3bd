import io
import json
import math
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from core.report_format import ReportFormat
from core.tests.test_base import TestBase
from metrics.report import MetricReport, MetricSummary, read_report, write_report


class MetricSummaryTest(TestBase):
    def test_infinite_pairs_counted_apart(self) -> None:
        reports = [
            MetricReport("a.grf_warp.png", math.inf, 0.0),
            MetricReport("b.grf_warp.png", 30.0, 1.0),
            MetricReport("c.uniform_fog.png", 20.0),
        ]
        summary = MetricSummary.from_reports(reports, ["d.tps.png"])
        self.assertEqual(summary.pairs, 3)
        self.assertEqual(summary.infinite_psnr_count, 1)
        self.assertEqual(summary.mean_psnr, 25.0)
        self.assertEqual(summary.mean_epe, 0.5)
        self.assertEqual(summary.missing, ["d.tps.png"])

    def test_all_identical(self) -> None:
        summary = MetricSummary.from_reports([MetricReport("a.png", math.inf)])
        self.assertIsNone(summary.mean_psnr)
        self.assertIsNone(summary.mean_epe)
        self.assertEqual(summary.infinite_psnr_count, 1)

    def test_json_output(self) -> None:
        summary = MetricSummary.from_reports([MetricReport("a.png", 12.5, 2.0)])
        out = io.StringIO()
        with redirect_stdout(out):
            summary.print(ReportFormat.JSON)
        data = json.loads(out.getvalue())
        self.assertEqual(data["mean_psnr"], 12.5)
        self.assertEqual(data["pairs"], 1)

    def test_text_output_lists_missing(self) -> None:
        summary = MetricSummary.from_reports([], ["x.png", "a.png"])
        out = io.StringIO()
        with redirect_stdout(out):
            summary.print(ReportFormat.TEXT)
        self.assertIn("Missing predictions (2)", out.getvalue())
        self.assertLess(out.getvalue().index("a.png"), out.getvalue().index("x.png"))


class ReportFileTest(TestBase):
    def test_write_and_read(self) -> None:
        reports = [MetricReport("a.png", math.inf, 0.0), MetricReport("b.png", 31.5)]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "report.jsonl"
            write_report(path, reports, MetricSummary.from_reports(reports))
            lines = path.read_text().splitlines()
            self.assertEqual(json.loads(lines[0])["psnr"], "inf")
            loaded, summary = read_report(path)
        self.assertEqual(loaded, reports)
        self.assertEqual(summary["infinite_psnr_count"], 1)
        self.assertEqual(summary["mean_psnr"], 31.5)
