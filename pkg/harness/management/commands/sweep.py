"""
Sweep one scenario parameter over baselines and repetitions.
"""

from django.core.management.base import CommandError

from harness.management.commands._base import EXIT_USAGE, OptimizerCommand
from harness.serializers import SweepSpecSerializer
from harness.services.sweep_service import SweepService
from utils.exceptions import ScenarioError
from utils.helpers import load_json_file


class Command(OptimizerCommand):
    help = "Run a parameter sweep and write sweep.csv, aggregate.csv and column_map.csv"

    def add_arguments(self, parser):
        self.add_scenario_arguments(parser)
        parser.add_argument("--spec", required=True, help="Sweep definition JSON file")
        parser.add_argument("--jobs", type=int, help="Local worker processes")
        parser.add_argument("--executor", choices=("local", "celery"), help="Where sweep points run")

    def handle(self, *args, **options):
        scenario = self.load_scenario(options["scenario"], options["seed"])
        try:
            document = load_json_file(options["spec"])
        except ScenarioError as e:
            raise CommandError(f"Invalid sweep spec: {str(e)}", returncode=EXIT_USAGE)
        if options["seed"] is not None:
            document["seed"] = options["seed"]

        serializer = SweepSpecSerializer(data=document)
        if not serializer.is_valid():
            field, messages = next(iter(serializer.errors.items()))
            message = messages[0] if isinstance(messages, list) else messages
            raise CommandError(f"Invalid sweep spec ({field}): {message}", returncode=EXIT_USAGE)
        if options["jobs"] is not None and options["jobs"] < 1:
            raise CommandError("--jobs must be at least 1", returncode=EXIT_USAGE)

        with self.dumping(options["dump_problems"]):
            rows = SweepService.run_sweep(
                serializer.validated_data, scenario, options["out"],
                jobs=options["jobs"], executor=options["executor"],
            )
        failed = sum(row["status"] in ("infeasible", "error") for row in rows)
        self.stdout.write(f"{len(rows)} sweep points written to {options['out']} ({failed} failed)")
