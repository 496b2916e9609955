import numpy as np
import pytest
from scipy import linalg

from netfactor.errors import DimensionMismatch, ImproperFraction, NonFiniteMatrix, NonSquare, NotCoprime, PoleHit
from netfactor.statespace import (
    PartitionedSystem,
    StateSpace,
    apply_transformation,
    controllable_dimension,
    freqresp,
    is_hurwitz,
    is_minimal,
    is_minimum_phase,
    manifest_output,
    permutation_matrix,
    permute_channels,
    realize_siso_controllable,
    transmission_zeros,
    validate_assumptions,
)


def test_shape_validation():
    with pytest.raises(DimensionMismatch):
        StateSpace(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))
    with pytest.raises(NonFiniteMatrix):
        StateSpace([[np.inf]], [[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        StateSpace(np.ones((2, 3)), np.ones((2, 1)), np.ones((1, 2)))


def test_matrices_are_read_only(example_system):
    with pytest.raises(ValueError):
        example_system.a[0, 0] = 1.0


def test_static_system():
    sys = StateSpace(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((1, 0)), [[1.0, 2.0]])
    np.testing.assert_array_equal(sys(1j), [[1.0, 2.0]])


def test_transformation_keeps_transfer_matrix(example_system, rng):
    t = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    moved = apply_transformation(example_system, t)
    pts = np.array([0.3j, 2j, 1 + 5j])
    np.testing.assert_allclose(freqresp(moved, pts), freqresp(example_system, pts), atol=1e-12)


def test_permute_channels(example_system):
    swapped = permute_channels(example_system, [1, 0])
    np.testing.assert_array_equal(swapped.c, manifest_output(2, 1))
    g, h = example_system(0.7j), swapped(0.7j)
    pi = permutation_matrix([1, 0])
    np.testing.assert_allclose(h, pi @ g @ pi.T, atol=1e-14)


def test_partition_round_trip(example_system):
    part = PartitionedSystem.from_statespace(example_system)
    assert (part.p, part.l, part.m) == (2, 1, 2)
    back = part.to_statespace()
    np.testing.assert_array_equal(back.a, example_system.a)


def test_assumptions_hold_for_example(example_system):
    report = validate_assumptions(example_system)
    assert report.all_ok, report.failures()


def test_assumption_failures(example_system):
    unstable = StateSpace(example_system.a + 10 * np.eye(3), example_system.b, example_system.c)
    assert validate_assumptions(unstable).failures() == ["hurwitz"]
    mixed = StateSpace(example_system.a, example_system.b @ np.array([[1.0, 1.0], [0.0, 1.0]]), example_system.c)
    assert not validate_assumptions(mixed).p_diagonal
    shifted = StateSpace(example_system.a, example_system.b, np.roll(example_system.c, 1, axis=1))
    assert not validate_assumptions(shifted).c_is_identity_zero


def test_example_transmission_zero(example_system):
    z = transmission_zeros(example_system)
    assert np.all(z.real < 0)
    assert is_minimum_phase(example_system)


def test_non_minimum_phase_zero_at_three():
    r = realize_siso_controllable([1.0, -3.0], [1.0, 4.0, 5.0]).to_statespace()
    np.testing.assert_allclose(transmission_zeros(r), [3.0], atol=1e-10)
    assert not is_minimum_phase(r)


def test_transmission_zeros_need_square():
    with pytest.raises(NonSquare):
        transmission_zeros(StateSpace(-np.eye(2), np.ones((2, 1)), np.eye(2)))


def test_siso_realization():
    r = realize_siso_controllable([2.0, 1.0], [1.0, 3.0, 2.0])
    assert r.r == 2
    s = 0.4 + 1.1j
    np.testing.assert_allclose(r.to_statespace()(s)[0, 0], (2 * s + 1) / (s * s + 3 * s + 2))


def test_siso_realization_biproper():
    r = realize_siso_controllable([3.0, 1.0], [1.0, 2.0])
    assert r.d == 3.0
    s = 2j
    np.testing.assert_allclose(r.to_statespace()(s)[0, 0], (3 * s + 1) / (s + 2))


def test_siso_realization_errors():
    with pytest.raises(ImproperFraction):
        realize_siso_controllable([1.0, 0.0, 0.0], [1.0, 1.0])
    with pytest.raises(NotCoprime):
        realize_siso_controllable([1.0, 1.0], [1.0, 3.0, 2.0])
    with pytest.raises(ValueError):
        realize_siso_controllable([1.0], [0.0])


def test_pole_hit():
    with pytest.raises(PoleHit):
        StateSpace([[-1.0]], [[1.0]], [[1.0]])(-1.0)


def test_hurwitz():
    assert is_hurwitz(np.diag([-1.0, -2.0]))
    assert not is_hurwitz(np.diag([-1.0, 0.0]))


def test_staircase_on_poorly_scaled_chain():
    # a 16-state chain whose Krylov matrix is numerically rank deficient
    n = 16
    a = np.diag(-np.arange(1.0, n + 1)) + np.diag(np.full(n - 1, 0.5), 1)
    b = np.zeros((n, 1))
    b[-1] = 1.0
    assert controllable_dimension(a, b) == n
    ctrb = np.hstack([np.linalg.matrix_power(a, k) @ b for k in range(n)])
    assert np.linalg.matrix_rank(ctrb) < n


def test_staircase_detects_uncontrollable_mode():
    a = linalg.block_diag(-1.0, -2.0, -3.0)
    b = np.array([[1.0], [1.0], [0.0]])
    assert controllable_dimension(a, b) == 2
    assert not is_minimal(StateSpace(a, b, np.ones((1, 3))))
