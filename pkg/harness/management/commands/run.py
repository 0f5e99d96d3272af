"""
Run one optimization and write its CSV files.
"""

from harness.management.commands._base import OptimizerCommand
from harness.services.report_service import ReportService
from orchestrator.models import BASELINES
from orchestrator.services.baseline_service import BaselineService


class Command(OptimizerCommand):
    help = "Optimize one scenario under a baseline and write result.csv, iters.csv and summary.csv"

    def add_arguments(self, parser):
        self.add_scenario_arguments(parser)
        parser.add_argument("--baseline", choices=BASELINES, default="noma")

    def handle(self, *args, **options):
        scenario = self.load_scenario(options["scenario"], options["seed"])
        with self.dumping(options["dump_problems"]):
            result = self.run_domain(BaselineService.run_baseline, scenario, options["baseline"])
        paths = ReportService.write_run(result, options["out"])
        summary = ReportService.summary_row(result)
        self.stdout.write(
            f"{summary['baseline']}: total AoI {summary['total_aoi']:.6f} s after {summary['iterations']} "
            f"iterations ({summary['status']}); files: {', '.join(sorted(paths))}"
        )
