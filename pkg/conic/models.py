"""
Problem builder and solution record for the conic app.
"""

from dataclasses import dataclass, field
from typing import Callable

import cvxpy as cp
import numpy as np

from utils.exceptions import InfeasibleError, SolverError

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAX_ITERS = "max_iters"

# Constraint kinds that take an elastic slack when locating an infeasibility witness
ELASTIC_KINDS = ("affine_le", "soc", "hyperbolic", "quad_le", "log_le", "psd")


@dataclass
class ConstraintRecord:
    """
    A named constraint; ``build(slack)`` returns it loosened by a nonnegative slack.

    ``build(0.0)`` is the constraint itself.
    """

    name: str
    kind: str
    build: Callable
    psd_variable: object = None

    def constraint(self):
        """The constraint without slack."""
        return self.build(0.0)


class ConicProblem:
    """
    Builder for convex problems mixing affine, second-order cone,
    concave-log and Hermitian PSD constraints over named variables.
    """

    def __init__(self, name):
        self.name = name
        self.variables = {}
        self.records = []
        self.objective = None
        self.sense = None

    def real(self, name, shape=(), nonneg=False):
        """
        Declare a real variable.

        Args:
            name: Variable name, unique within the problem
            shape: Variable shape (scalar by default)
            nonneg: Whether to restrict the variable to be nonnegative

        Returns:
            cvxpy.Variable: The new variable
        """
        variable = cp.Variable(shape, name=name, nonneg=nonneg)
        self.variables[name] = variable
        return variable

    def psd(self, name, dim):
        """
        Declare a Hermitian PSD matrix variable and its membership constraint.

        The membership constraint is recorded as ``<name>_psd`` and loosens
        by a multiple of the identity in the elastic copy.

        Args:
            name: Variable name
            dim: Matrix dimension

        Returns:
            cvxpy.Variable: The (dim, dim) Hermitian variable
        """
        variable = cp.Variable((dim, dim), hermitian=True, name=name)
        self.variables[name] = variable
        identity = np.eye(dim)
        self.records.append(ConstraintRecord(
            name=f"{name}_psd",
            kind="psd",
            build=lambda s: variable + s * identity >> 0,
            psd_variable=variable,
        ))
        return variable

    def affine_le(self, name, lhs, rhs):
        """Elementwise lhs <= rhs; takes an elastic slack."""
        self.records.append(ConstraintRecord(name, "affine_le", lambda s: lhs <= rhs + s))

    def affine_eq(self, name, lhs, rhs):
        """Elementwise lhs == rhs; kept exact in the elastic copy."""
        self.records.append(ConstraintRecord(name, "affine_eq", lambda s: lhs == rhs))

    def soc(self, name, t, x, axis=0):
        """
        ||x|| <= t; with ``axis=0`` each column of x pairs with one entry of t.
        """
        self.records.append(ConstraintRecord(name, "soc", lambda s: cp.SOC(t + s, x, axis=axis)))

    def hyperbolic(self, name, x, y, scale=1.0):
        """
        x * y >= scale^2 with x, y >= 0, as ||[2 scale, x - y]|| <= x + y.
        """
        x = cp.reshape(x, (x.size,))
        y = cp.reshape(y, (y.size,))
        stacked = cp.vstack([2.0 * scale * np.ones(x.shape[0]), x - y])
        self.records.append(ConstraintRecord(name, "hyperbolic", lambda s: cp.SOC(x + y + s, stacked, axis=0)))

    def quad_le(self, name, x, t):
        """
        ||x_n||^2 <= t_n for the rows x_n of an (N, k) expression, as ||[2 x_n, t_n - 1]|| <= t_n + 1.
        """
        stacked = cp.vstack([2.0 * x.T, cp.reshape(t - 1.0, (1, t.shape[0]))])
        self.records.append(ConstraintRecord(name, "quad_le", lambda s: cp.SOC(t + 1.0 + s, stacked, axis=0)))

    def log_le(self, name, t, terms, affine=0.0):
        """
        t <= sum_i gamma_i log2(affine_i) + affine with gamma_i >= 0.

        Args:
            name: Constraint name
            t: Left-hand side expression
            terms: List of (gamma, affine argument) pairs
            affine: Affine remainder
        """
        for gamma, _ in terms:
            if np.any(np.asarray(gamma) < 0):
                raise ValueError(f"{name}: log weights must be nonnegative")

        def build(s):
            concave = sum(cp.multiply(np.asarray(gamma) / np.log(2.0), cp.log(argument)) for gamma, argument in terms)
            return t <= concave + affine + s

        self.records.append(ConstraintRecord(name, "log_le", build))

    def maximize(self, expression):
        """Set a concave objective to maximize."""
        self.objective, self.sense = expression, "maximize"

    def minimize(self, expression):
        """Set a convex objective to minimize."""
        self.objective, self.sense = expression, "minimize"

    def constraints(self):
        """cvxpy constraints in record order."""
        return [record.constraint() for record in self.records]

    def compile(self):
        """
        Assemble the cvxpy problem; also returns the constraint objects in record order.
        """
        constraints = self.constraints()
        objective = cp.Maximize(self.objective) if self.sense == "maximize" else cp.Minimize(self.objective)
        return cp.Problem(objective, constraints), constraints

    def elastic(self):
        """
        Elastic copy: every inequality record gets its own nonnegative slack and the sum is minimized.

        Returns:
            tuple: (cvxpy problem, {record name: slack variable})
        """
        slacks, constraints = {}, []
        for record in self.records:
            if record.kind in ELASTIC_KINDS:
                slack = cp.Variable(nonneg=True, name=f"slack_{record.name}")
                slacks[record.name] = slack
                constraints.append(record.build(slack))
            else:
                constraints.append(record.constraint())
        return cp.Problem(cp.Minimize(sum(slacks.values())), constraints), slacks


@dataclass
class ConicSolution:
    """
    Result of one conic solve.

    Attributes:
        status: ``optimal``, ``infeasible`` or ``max_iters``
        objective: Objective value (None unless optimal)
        values: Primal values per variable name
        violation: Largest constraint violation
        residuals: Violation per constraint record
        witness: Record name most responsible for infeasibility
        solver: Solver that produced the answer
    """

    name: str
    status: str
    objective: float = None
    values: dict = field(default_factory=dict)
    violation: float = 0.0
    residuals: dict = field(default_factory=dict)
    witness: str = None
    solver: str = None

    @property
    def optimal(self):
        """Whether the solve reached an optimal point."""
        return self.status == STATUS_OPTIMAL

    def value(self, name):
        """Primal value of a named variable."""
        return self.values[name]

    def raise_for_status(self):
        """
        Raise InfeasibleError or SolverError unless the solve was optimal.
        """
        if self.status == STATUS_INFEASIBLE:
            raise InfeasibleError(f"{self.name} is infeasible", binding=self.witness)
        if self.status != STATUS_OPTIMAL:
            raise SolverError(f"{self.name} stopped with status {self.status}", residuals=self.residuals)
        return self
