import shutil

from core.formats import read_png, write_png
from metrics.quality import psnr
from metrics.report import read_report
from pipeline.evaluate import REPORT_NAME, run_baseline, run_metrics
from pipeline.generate import run_generate
from pipeline.record import MANIFEST_NAME, read_manifest
from pipeline.tests.pipeline_test_base import PipelineTestBase


class RunMetricsTest(PipelineTestBase):
    def setUp(self) -> None:
        super().setUp()
        self._write_inputs(4, width=48, height=32)
        run_generate(self._config(mode="all", seed=2))
        self.manifest = self.output_dir / MANIFEST_NAME
        self.records = read_manifest(self.manifest)
        self.pred_dir = self.root / "pred"
        self.pred_dir.mkdir()

    def test_clean_predictions(self) -> None:
        for record in self.records:
            shutil.copyfile(record.input, self.pred_dir / record.image_name)
            if "uv" in record.outputs:
                shutil.copyfile(
                    self.output_dir / record.outputs["uv"],
                    self.pred_dir / record.outputs["uv"],
                )
        result = run_metrics(self.pred_dir, self.manifest)
        self.assertEqual(result.summary.infinite_psnr_count, len(self.records))
        self.assertIsNone(result.summary.mean_psnr)
        self.assertEqual(result.summary.mean_epe, 0.0)
        self.assertEqual(result.summary.missing, [])

    def test_corrupted_predictions(self) -> None:
        result = run_metrics(
            self.output_dir, self.manifest, report_path=self.root / "r.jsonl"
        )
        for record, report in zip(self.records, result.reports):
            expected = psnr(
                read_png(self.output_dir / record.image_name), read_png(record.input)
            )
            self.assertEqual(report.psnr, expected)
            # The ground-truth fields sit next to the images, so they score as exact
            if "uv" in record.outputs:
                self.assertEqual(report.epe, 0.0)
            else:
                self.assertIsNone(report.epe)
        reports, summary = read_report(self.root / "r.jsonl")
        self.assertEqual(reports, result.reports)
        self.assertEqual(summary["pairs"], len(self.records))

    def test_missing_predictions_listed(self) -> None:
        kept = self.records[:3]
        for record in kept:
            shutil.copyfile(
                self.output_dir / record.image_name, self.pred_dir / record.image_name
            )
        result = run_metrics(self.pred_dir, self.manifest)
        self.assertEqual(result.summary.pairs, 3)
        self.assertEqual(
            result.summary.missing, sorted(r.image_name for r in self.records[3:])
        )
        self.assertTrue((self.pred_dir / REPORT_NAME).exists())

    def test_unscorable_predictions_listed(self) -> None:
        for record in self.records:
            shutil.copyfile(
                self.output_dir / record.image_name, self.pred_dir / record.image_name
            )
        wrong_size, broken = self.records[0].image_name, self.records[1].image_name
        write_png(self.pred_dir / wrong_size, self._random_image(16, 12))
        (self.pred_dir / broken).write_bytes(b"not a png")
        result = run_metrics(self.pred_dir, self.manifest)
        self.assertEqual(result.summary.pairs, len(self.records) - 2)
        self.assertEqual(result.summary.failed, sorted([wrong_size, broken]))
        self.assertEqual(result.summary.missing, [])
        _, summary = read_report(self.pred_dir / REPORT_NAME)
        self.assertEqual(summary["failed"], sorted([wrong_size, broken]))

    def test_input_dir_override(self) -> None:
        moved = self.root / "moved"
        shutil.copytree(self.input_dir, moved)
        shutil.rmtree(self.input_dir)
        result = run_metrics(self.output_dir, self.manifest, input_dir=moved)
        self.assertEqual(result.summary.pairs, len(self.records))


class RunBaselineTest(PipelineTestBase):
    def test_inverse_improves_refractive_outputs(self) -> None:
        for i in range(3):
            write_png(
                self.input_dir / f"smooth_{i}.png", self._smooth_image(128, 96, seed=i)
            )
        run_generate(
            self._config(
                mode="all",
                corruptions={
                    "grf_warp": {"correlation_length": 64, "alpha": 2},
                    "uniform_fog": {},
                },
            )
        )
        manifest = self.output_dir / MANIFEST_NAME
        pred_dir = self.root / "baseline"
        self.assertEqual(run_baseline(manifest, pred_dir), 6)

        restored = run_metrics(pred_dir, manifest)
        untouched = run_metrics(
            self.output_dir, manifest, report_path=self.root / "r.jsonl"
        )
        for before, after, record in zip(
            untouched.reports, restored.reports, read_manifest(manifest)
        ):
            if record.corruption == "grf_warp":
                self.assertGreater(after.psnr, before.psnr)
            else:
                self.assertEqual(after.psnr, before.psnr)
