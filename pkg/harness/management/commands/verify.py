"""
Run the verification battery.
"""

import functools

from django.core.management.base import CommandError

from harness.management.commands._base import EXIT_FAILURE, EXIT_USAGE, OptimizerCommand
from harness.services.report_service import ReportService
from harness.services.verification_service import VerificationService


class Command(OptimizerCommand):
    help = "Check the analytics, surrogates and subproblem solvers against their oracles; writes verify.csv"

    def add_arguments(self, parser):
        parser.add_argument("--out", required=True, help="Output directory")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--check", action="append", dest="checks", help="Run only this check (repeatable)")
        parser.add_argument("--trials", type=int, help="Monte-Carlo trials per hypothesis")

    def handle(self, *args, **options):
        registry = VerificationService.checks()
        if options["trials"]:
            registry["detection_mc"] = functools.partial(VerificationService.check_detection_mc, trials=options["trials"])
        try:
            outcomes = VerificationService.run(options["checks"], seed=options["seed"], checks=registry)
        except KeyError as e:
            raise CommandError(f"Error: {e.args[0]}", returncode=EXIT_USAGE)

        ReportService.write_verification(outcomes, options["out"])
        failed = [outcome.name for outcome in outcomes if not outcome.passed]
        if failed:
            raise CommandError(f"Failed checks: {', '.join(failed)}", returncode=EXIT_FAILURE)
        self.stdout.write(f"All {len(outcomes)} checks passed")
