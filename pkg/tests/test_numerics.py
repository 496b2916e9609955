import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from netfactor.errors import DimensionTooLarge, NonFiniteMatrix, SingularSylvester
from netfactor.numerics import (
    AreProblem,
    SolutionKind,
    are_residual,
    enumerate_are_solutions,
    hamiltonian,
    is_positive_definite,
    solve_lyapunov,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def _kron_lyapunov(a, q):
    n = a.shape[0]
    op = np.kron(np.eye(n), a) + np.kron(a, np.eye(n))
    return np.linalg.solve(op, -q.reshape(-1, order="F")).reshape(n, n, order="F")


@settings(max_examples=60, deadline=None)
@given(arrays(float, (3, 3), elements=finite), arrays(float, (3, 3), elements=finite))
def test_lyapunov_matches_kronecker_oracle(m, r):
    a = m - (np.abs(np.linalg.eigvals(m)).max() + 1.0) * np.eye(3)
    q = r + r.T
    x = solve_lyapunov(a, q)
    np.testing.assert_allclose(x, _kron_lyapunov(a, q), atol=1e-9 * (1 + np.abs(q).max()))
    np.testing.assert_allclose(x, x.T, atol=1e-12 * (1 + np.abs(x).max()))


def test_lyapunov_singular_operator():
    with pytest.raises(SingularSylvester):
        solve_lyapunov(np.diag([1.0, -1.0]), np.eye(2))


def test_lyapunov_rejects_nonfinite():
    with pytest.raises(NonFiniteMatrix):
        solve_lyapunov([[np.nan]], [[1.0]])


def test_lyapunov_empty():
    assert solve_lyapunov(np.zeros((0, 0)), np.zeros((0, 0))).shape == (0, 0)


def test_positive_definite():
    assert is_positive_definite(np.diag([1.0, 2.0]))
    assert not is_positive_definite(np.diag([1.0, 0.0]))
    assert not is_positive_definite(np.diag([1.0, -1e-3]))


def test_hamiltonian_layout():
    prob = AreProblem([[1.0]], [[2.0]], [[3.0]], -1)
    np.testing.assert_array_equal(hamiltonian(prob), [[1.0, -2.0], [-3.0, -1.0]])


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3), st.floats(0.05, 5))
def test_scalar_homogeneous_roots(a, g):
    res = enumerate_are_solutions(AreProblem([[a]], [[g]], [[0.0]], -1))
    got = sorted(float(x[0, 0]) for x in res.solutions)
    np.testing.assert_allclose(got, sorted([0.0, 2 * a / g]), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize(
    "a, g, expected",
    [
        # exact solution sets obtained symbolically
        ([[1, 1], [0, 1]], np.eye(2), [[[0, 0], [0, 0]], [[0, 0], [0, 2]], [[1.6, 0.8], [0.8, 2.4]]]),
        ([[1, 1], [0, 1]], [[1, 0], [0, 0]], [[[0, 0], [0, 0]]]),
        ([[-1, 2], [0, 3]], [[2, 1], [1, 1]],
         [[[-1.6, 0.8], [0.8, -0.4]], [[-1, 2], [2, 2]], [[0, 0], [0, 0]], [[0, 0], [0, 6]]]),
    ],
)
def test_symbolic_solution_sets(a, g, expected):
    res = enumerate_are_solutions(AreProblem(a, g, np.zeros((2, 2)), -1))
    assert res.kind is SolutionKind.FINITE
    assert res.count == len(expected)
    for x in expected:
        assert any(np.allclose(x, y, atol=1e-9) for y in res.solutions)


def test_pruned_matches_exhaustive():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a = rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 2))
        prob = AreProblem(a, b @ b.T, np.zeros((3, 3)), -1)
        fast = enumerate_are_solutions(prob)
        slow = enumerate_are_solutions(prob, exhaustive=True)
        assert fast.count == slow.count
        for x in fast.solutions:
            assert any(np.allclose(x, y, atol=1e-8) for y in slow.solutions)


def test_solutions_are_symmetric_and_accurate():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = rng.standard_normal((3, 3))
        g = rng.standard_normal((3, 3))
        q = rng.standard_normal((3, 3))
        prob = AreProblem(a, g @ g.T, q @ q.T, +1)
        for x in enumerate_are_solutions(prob).solutions:
            np.testing.assert_allclose(x, x.T, atol=1e-12)
            assert np.linalg.norm(are_residual(prob, x)) <= 1e-8 * (1 + np.linalg.norm(x) ** 2)


def test_repeated_eigenvalue_gives_continuum():
    res = enumerate_are_solutions(AreProblem(np.eye(2), np.eye(2), np.zeros((2, 2)), -1))
    assert res.kind is SolutionKind.CONTINUUM
    assert res.is_continuum


def test_dimension_limit():
    with pytest.raises(DimensionTooLarge):
        enumerate_are_solutions(AreProblem(-np.eye(4), np.eye(4), np.zeros((4, 4)), -1), max_dim=3)


def test_empty_problem():
    res = enumerate_are_solutions(AreProblem(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, 0)), -1))
    assert res.count == 1
