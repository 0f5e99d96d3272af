import cvxpy as cp
import numpy as np
import pytest
from scipy.optimize import linprog

from conic.models import STATUS_INFEASIBLE, STATUS_MAX_ITERS, ConicProblem, ConicSolution
from conic.services.solver_service import SolverService
from utils.exceptions import InfeasibleError, SolverError


def test_scalar_lower_bound():
    problem = ConicProblem("floor")
    x = problem.real("x")
    problem.affine_le("x_min", 1.0 - x, 0.0)
    problem.minimize(x)
    solution = SolverService.solve(problem)
    assert solution.optimal
    assert float(solution.value("x")) == pytest.approx(1.0, abs=1e-6)


def test_single_constraint_sdp_is_rank_one():
    h = np.array([1.0, 1.0j])
    gram = np.outer(h, h.conj())
    problem = ConicProblem("sdp")
    W = problem.psd("W", 2)
    problem.affine_le("signal", 1.0 - cp.real(cp.trace(gram @ W)), 0.0)
    problem.minimize(cp.real(cp.trace(W)))
    solution = SolverService.solve(problem)

    assert solution.objective == pytest.approx(0.5, abs=1e-6)
    eigenvalues, eigenvectors = np.linalg.eigh(solution.value("W"))
    assert eigenvalues[0] == pytest.approx(0.0, abs=1e-6)
    direction = eigenvectors[:, -1]
    assert abs(np.vdot(direction, h)) ** 2 == pytest.approx(2.0, rel=1e-5)


@pytest.mark.parametrize("seed", range(5))
def test_random_single_constraint_sdp(seed):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    problem = ConicProblem("sdp")
    W = problem.psd("W", 3)
    problem.affine_le("signal", 1.0 - cp.real(cp.trace(np.outer(h, h.conj()) @ W)), 0.0)
    problem.minimize(cp.real(cp.trace(W)))
    solution = SolverService.solve(problem)
    assert solution.objective == pytest.approx(1.0 / np.vdot(h, h).real, rel=1e-6, abs=1e-8)


def test_log_constraint():
    problem = ConicProblem("log")
    t = problem.real("t")
    x = problem.real("x", nonneg=True)
    problem.affine_le("x_max", x, 3.0)
    problem.log_le("rate", t, [(1.0, 1.0 + x)])
    problem.maximize(t)
    solution = SolverService.solve(problem)
    assert solution.objective == pytest.approx(2.0, abs=1e-6)
    assert float(solution.value("x")) == pytest.approx(3.0, abs=1e-5)


def test_log_constraint_rejects_negative_weight():
    problem = ConicProblem("log")
    t = problem.real("t")
    with pytest.raises(ValueError):
        problem.log_le("rate", t, [(-1.0, t + 2.0)])


def test_hyperbolic_constraint():
    problem = ConicProblem("hyperbolic")
    x = problem.real("x", shape=(1,))
    y = problem.real("y", shape=(1,))
    problem.hyperbolic("product", x, y, scale=2.0)
    problem.minimize(cp.sum(x + y))
    solution = SolverService.solve(problem)
    assert solution.objective == pytest.approx(4.0, abs=1e-5)
    assert float(solution.value("x")[0]) == pytest.approx(2.0, abs=1e-4)


def test_quadratic_constraint():
    problem = ConicProblem("quad")
    q = problem.real("q", shape=(2, 2))
    t = problem.real("t", shape=(2,))
    problem.affine_eq("pin", q, np.array([[3.0, 4.0], [1.0, 0.0]]))
    problem.quad_le("reach", q, t)
    problem.minimize(cp.sum(t))
    solution = SolverService.solve(problem)
    np.testing.assert_allclose(solution.value("t"), [25.0, 1.0], atol=1e-5)


def _random_lp(rng, n):
    rows = n // 2 + 1
    A = rng.standard_normal((rows, n))
    interior = rng.uniform(0.5, 2.0, size=n)
    b = A @ interior + rng.uniform(0.1, 1.0, size=rows)
    c = rng.standard_normal(n)
    return A, b, c


@pytest.mark.parametrize("seed", range(100))
def test_random_lp_matches_simplex(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 21))
    A, b, c = _random_lp(rng, n)

    problem = ConicProblem("lp")
    x = problem.real("x", shape=(n,), nonneg=True)
    problem.affine_le("rows", A @ x, b)
    problem.affine_le("box", x, 10.0)
    problem.minimize(c @ x)
    solution = SolverService.solve(problem)

    reference = linprog(c, A_ub=A, b_ub=b, bounds=[(0.0, 10.0)] * n, method="highs")
    assert reference.status == 0
    assert solution.objective == pytest.approx(reference.fun, abs=1e-6 * max(1.0, abs(reference.fun)))


def _infeasible_problem():
    problem = ConicProblem("clash")
    x = problem.real("x")
    problem.affine_eq("pin", x, 5.0)
    problem.affine_le("ceiling", x, 1.0)
    problem.minimize(x)
    return problem


def test_infeasible_problem_names_witness():
    solution = SolverService.solve(_infeasible_problem())
    assert solution.status == STATUS_INFEASIBLE
    assert solution.witness == "ceiling"
    with pytest.raises(InfeasibleError) as excinfo:
        solution.raise_for_status()
    assert excinfo.value.binding == "ceiling"


def test_max_iters_raises_with_residuals():
    solution = ConicSolution(name="stalled", status=STATUS_MAX_ITERS, residuals={"rows": 0.3})
    with pytest.raises(SolverError) as excinfo:
        solution.raise_for_status()
    assert excinfo.value.residuals == {"rows": 0.3}


def test_stalled_solve_grades_its_point():
    rng = np.random.default_rng(5)
    A, b, c = _random_lp(rng, 20)
    problem = ConicProblem("lp")
    x = problem.real("x", shape=(20,), nonneg=True)
    problem.affine_le("rows", A @ x, b)
    problem.affine_le("box", x, 10.0)
    problem.minimize(c @ x)
    solution = SolverService.solve(problem, max_iters=1)
    assert solution.status == STATUS_MAX_ITERS
    assert set(solution.residuals) == {"rows", "box"}
    assert solution.violation == max(solution.residuals.values())
    with pytest.raises(SolverError) as excinfo:
        solution.raise_for_status()
    assert excinfo.value.residuals == solution.residuals


def test_unbounded_problem_raises():
    problem = ConicProblem("open")
    x = problem.real("x")
    problem.affine_le("ceiling", x, 1.0)
    problem.minimize(x)
    with pytest.raises(SolverError):
        SolverService.solve(problem)


def test_solutions_are_deterministic():
    def build():
        rng = np.random.default_rng(3)
        A, b, c = _random_lp(rng, 12)
        problem = ConicProblem("lp")
        x = problem.real("x", shape=(12,), nonneg=True)
        problem.affine_le("rows", A @ x, b)
        problem.affine_le("box", x, 10.0)
        problem.minimize(c @ x)
        return problem

    first = SolverService.solve(build())
    second = SolverService.solve(build())
    assert first.objective == second.objective
    np.testing.assert_array_equal(first.value("x"), second.value("x"))


def test_residuals_reported_per_record():
    problem = ConicProblem("floor")
    x = problem.real("x")
    problem.affine_le("x_min", 1.0 - x, 0.0)
    problem.minimize(x)
    solution = SolverService.solve(problem)
    assert set(solution.residuals) == {"x_min"}
    assert solution.violation <= 1e-6


def test_dump_grammar(tmp_path):
    problem = ConicProblem("dumped")
    x = problem.real("x", shape=(2,))
    W = problem.psd("W", 2)
    problem.affine_le("x_min", 1.0 - x, 0.0)
    problem.affine_le("trace", cp.real(cp.trace(W)), cp.sum(x))
    problem.minimize(cp.sum(x))

    with SolverService.dumping(tmp_path):
        SolverService.solve(problem)

    files = sorted(tmp_path.iterdir())
    assert [f.name for f in files] == ["0001_dumped.txt"]
    lines = files[0].read_text(encoding="utf-8").splitlines()
    assert lines[0] == "problem dumped"
    assert lines[1] == "sense minimize"
    assert "var x real 2" in lines
    assert "var W psd 2" in lines
    assert any(line.startswith("con W_psd psd : ") for line in lines)
    assert any(line.startswith("con x_min affine_le : ") for line in lines)
    assert lines[-1].startswith("status optimal objective ")


def test_no_dump_outside_block(tmp_path):
    problem = ConicProblem("quiet")
    x = problem.real("x")
    problem.affine_le("x_min", 1.0 - x, 0.0)
    problem.minimize(x)
    with SolverService.dumping(tmp_path):
        pass
    SolverService.solve(problem)
    assert list(tmp_path.iterdir()) == []
