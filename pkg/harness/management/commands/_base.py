"""
Shared plumbing for the harness management commands.
"""

import contextlib
import logging

from django.core.management.base import BaseCommand, CommandError

from conic.services.solver_service import SolverService
from scenarios.services.scenario_service import ScenarioService
from utils.exceptions import CovertAoiError, InfeasibleError, ScenarioError
from utils.helpers import load_json_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 3


class OptimizerCommand(BaseCommand):
    """
    Base command mapping domain errors to the documented exit codes.
    """

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = lambda message: self.usage_error(parser, message)
        return parser

    @staticmethod
    def usage_error(parser, message):
        if parser.called_from_command_line:
            parser.print_usage()
            parser.exit(EXIT_USAGE, f"{parser.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=EXIT_USAGE)

    @staticmethod
    def add_scenario_arguments(parser):
        parser.add_argument("--scenario", help="Scenario JSON file (the default scenario when omitted)")
        parser.add_argument("--seed", type=int, help="Override the scenario seed")
        parser.add_argument("--out", required=True, help="Output directory")
        parser.add_argument("--dump-problems", dest="dump_problems", help="Write a text dump of every conic problem here")

    @staticmethod
    def load_scenario(path=None, seed=None):
        """
        Load the scenario of a command, applying a seed override before positions are drawn.

        Raises:
            CommandError: With the usage exit code if the scenario is unreadable or invalid
        """
        try:
            document = load_json_file(path) if path else {}
            if seed is not None:
                document["seed"] = seed
            return ScenarioService.from_dict(document)
        except ScenarioError as e:
            raise CommandError(f"Invalid scenario: {str(e)}", returncode=EXIT_USAGE)

    @staticmethod
    def dumping(directory):
        if directory:
            return SolverService.dumping(directory)
        return contextlib.nullcontext()

    @staticmethod
    def domain_error(error):
        """
        Translate a domain error into a CommandError with its exit code.
        """
        if isinstance(error, InfeasibleError):
            return CommandError(f"Infeasible: {str(error)}", returncode=EXIT_INFEASIBLE)
        if isinstance(error, ScenarioError):
            return CommandError(f"Invalid scenario: {str(error)}", returncode=EXIT_USAGE)
        return CommandError(f"{type(error).__name__}: {str(error)}", returncode=EXIT_FAILURE)

    def run_domain(self, function, *args, **kwargs):
        try:
            return function(*args, **kwargs)
        except CovertAoiError as e:
            logger.error(f"Command failed: {str(e)}")
            raise self.domain_error(e)
