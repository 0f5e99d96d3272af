"""
Service for solving ConicProblem instances through cvxpy.
"""

import contextlib
import contextvars
import logging
import os

import cvxpy as cp
import numpy as np
from django.conf import settings

from conic.models import (
    STATUS_INFEASIBLE,
    STATUS_MAX_ITERS,
    STATUS_OPTIMAL,
    ConicSolution,
)
from utils.exceptions import SolverError

logger = logging.getLogger(__name__)

# Active dump target: {"directory": path, "count": int} or None
_dump_target = contextvars.ContextVar("conic_dump_target", default=None)

INFEASIBLE_STATUSES = (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE)
UNBOUNDED_STATUSES = (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE)


def _solver_options(solver, tol_feas, tol_obj, max_iters):
    accuracy = min(tol_feas, tol_obj, settings.CONIC_ACCURACY)
    if solver == cp.CLARABEL:
        return {"max_iter": max_iters, "tol_feas": accuracy, "tol_gap_rel": accuracy, "tol_gap_abs": accuracy}
    if solver == cp.SCS:
        return {"max_iters": settings.CONIC_FALLBACK_MAX_ITERS, "eps_abs": accuracy, "eps_rel": accuracy}
    return {}


def _violation(record, constraint):
    if record.kind == "psd":
        value = record.psd_variable.value
        if value is None:
            return np.inf
        hermitian = 0.5 * (value + value.conj().T)
        return float(max(0.0, -np.linalg.eigvalsh(hermitian).min()))
    try:
        violation = constraint.violation()
    except (ValueError, TypeError):
        return np.inf
    return float(np.max(np.atleast_1d(violation), initial=0.0))


class SolverService:
    """
    Service that solves conic problems with a primary and a fallback solver,
    grades the answer and locates infeasibility witnesses.
    """

    @staticmethod
    @contextlib.contextmanager
    def dumping(directory):
        """
        Write a text dump of every problem solved inside the block.

        Args:
            directory: Target directory (created if missing)
        """
        os.makedirs(directory, exist_ok=True)
        token = _dump_target.set({"directory": str(directory), "count": 0})
        try:
            yield
        finally:
            _dump_target.reset(token)

    @staticmethod
    def solve(problem, tol_feas=None, tol_obj=None, max_iters=None):
        """
        Solve a ConicProblem.

        Args:
            problem: ConicProblem
            tol_feas: Feasibility tolerance (defaults to OPTIMIZER_TOL_FEAS)
            tol_obj: Relative objective tolerance (defaults to OPTIMIZER_TOL_FEAS)
            max_iters: Iteration cap of the primary solver

        Returns:
            ConicSolution: Status, values and residuals; infeasible solutions carry a witness

        Raises:
            SolverError: If the problem is unbounded
        """
        tol_feas = settings.OPTIMIZER_TOL_FEAS if tol_feas is None else tol_feas
        tol_obj = settings.OPTIMIZER_TOL_FEAS if tol_obj is None else tol_obj
        max_iters = settings.CONIC_MAX_ITERS if max_iters is None else max_iters

        cvx_problem, constraints = problem.compile()
        solver = SolverService._run(cvx_problem, problem.name, tol_feas, tol_obj, max_iters)
        status = cvx_problem.status

        residuals = {}
        # every status except a certificate leaves a point to grade
        if status not in INFEASIBLE_STATUSES + UNBOUNDED_STATUSES:
            residuals = {
                record.name: _violation(record, constraint)
                for record, constraint in zip(problem.records, constraints)
            }
        violation = max(residuals.values(), default=0.0)

        if status == cp.OPTIMAL:
            outcome = STATUS_OPTIMAL
        elif status == cp.OPTIMAL_INACCURATE:
            outcome = STATUS_OPTIMAL if violation <= tol_feas else STATUS_MAX_ITERS
        elif status in INFEASIBLE_STATUSES:
            outcome = STATUS_INFEASIBLE
        elif status in UNBOUNDED_STATUSES:
            logger.error(f"{problem.name} is unbounded")
            raise SolverError(f"{problem.name} is unbounded")
        else:
            outcome = STATUS_MAX_ITERS

        solution = ConicSolution(name=problem.name, status=outcome, violation=violation,
                                 residuals=residuals, solver=solver)
        if outcome == STATUS_OPTIMAL:
            solution.objective = float(cvx_problem.value)
            solution.values = {
                name: np.array(variable.value) for name, variable in problem.variables.items()
            }
        elif outcome == STATUS_MAX_ITERS and all(v.value is not None for v in problem.variables.values()):
            solution.values = {
                name: np.array(variable.value) for name, variable in problem.variables.items()
            }
        elif outcome == STATUS_INFEASIBLE:
            solution.witness = SolverService.infeasibility_witness(problem, tol_feas, tol_obj, max_iters)

        logger.debug(
            f"{problem.name}: {outcome} via {solver} (objective {solution.objective}, violation {violation:.2e})"
        )
        SolverService._dump(problem, constraints, solution)
        return solution

    @staticmethod
    def infeasibility_witness(problem, tol_feas=1e-6, tol_obj=1e-6, max_iters=500):
        """
        Name the inequality that needs the largest slack in the elastic relaxation.

        Returns:
            str or None: Record name, or None when the elastic problem fails too
        """
        elastic, slacks = problem.elastic()
        if not slacks:
            return None
        try:
            SolverService._run(elastic, f"{problem.name}_elastic", tol_feas, tol_obj, max_iters)
        except SolverError as e:
            logger.warning(f"Elastic solve of {problem.name} failed: {str(e)}")
            return None
        if elastic.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return None
        name, slack = max(slacks.items(), key=lambda item: float(item[1].value))
        logger.info(f"{problem.name} infeasible; largest elastic slack {float(slack.value):.3e} at {name}")
        return name

    @staticmethod
    def _run(cvx_problem, name, tol_feas, tol_obj, max_iters):
        primary = settings.CONIC_SOLVER
        try:
            cvx_problem.solve(solver=primary, **_solver_options(primary, tol_feas, tol_obj, max_iters))
            return primary
        except cp.SolverError as e:
            fallback = settings.CONIC_FALLBACK_SOLVER
            logger.warning(f"{primary} failed on {name}: {str(e)}; retrying with {fallback}")
            try:
                cvx_problem.solve(solver=fallback, **_solver_options(fallback, tol_feas, tol_obj, max_iters))
            except cp.SolverError as e:
                logger.error(f"{fallback} failed on {name}: {str(e)}")
                raise SolverError(f"no solver could handle {name}: {e}") from e
            return fallback

    @staticmethod
    def _dump(problem, constraints, solution):
        target = _dump_target.get()
        if target is None:
            return
        target["count"] += 1
        path = os.path.join(target["directory"], f"{target['count']:04d}_{problem.name}.txt")
        lines = [f"problem {problem.name}", f"sense {problem.sense}"]
        for name, variable in problem.variables.items():
            if variable.is_hermitian() and variable.ndim == 2 and variable.is_complex():
                lines.append(f"var {name} psd {variable.shape[0]}")
            else:
                shape = "x".join(str(n) for n in variable.shape) or "scalar"
                lines.append(f"var {name} real {shape}")
        for record, constraint in zip(problem.records, constraints):
            lines.append(f"con {record.name} {record.kind} : {constraint}")
        lines.append(f"objective : {problem.objective}")
        lines.append(f"status {solution.status} objective {solution.objective} violation {solution.violation!r}")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
