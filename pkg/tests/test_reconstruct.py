import numpy as np
import pytest

from netfactor.dsf import compute_dsf, dsf_equal, to_pdiag_form2
from netfactor.errors import AssumptionViolation, NotRelativeDegreeZero
from netfactor.numerics import SolutionKind
from netfactor.reconstruct import (
    canonical_signs,
    classify_minimum_phase_solution,
    enumerate_equivalent_networks,
    full_noise_domain,
    full_noise_scalar_family,
    full_noise_verify,
    s_block_deviation,
    reconstruct_from_phi,
    theorem3_problem,
)
from netfactor.simharness import SystemDims, random_system
from netfactor.spectral import phi_equal, positive_real_realization, verify_glover_willems
from netfactor.statespace import StateSpace, is_minimum_phase

POINTS = 1j * np.array([0.1, 0.7, 2.0, 6.5, 40.0])


def test_example_riccati_problem(example_system):
    prob = theorem3_problem(to_pdiag_form2(example_system))
    assert prob.n == 1 and prob.sign == -1
    np.testing.assert_array_equal(prob.q, [[0.0]])


def test_example_two_networks(example_system):
    res = enumerate_equivalent_networks(example_system)
    assert (res.are_count, res.eq11_count, res.pdiag_count, res.l2) == (2, 2, 2, 1)
    params = sorted(float(s.parameter[0, 0]) for s in res.solutions)
    np.testing.assert_allclose(params, [-6 / 41, 0.0], atol=1e-12)
    other = next(s for s in res.solutions if abs(s.parameter[0, 0]) > 0)
    # exact entries of the second network; they round to the published display
    a = np.array([[-137, -120, 164], [-120, -232, 205], [-342, -150, 123]]) / 41
    np.testing.assert_allclose(other.system.a, a, atol=1e-10)
    assert not other.minimum_phase
    same = next(s for s in res.solutions if abs(s.parameter[0, 0]) == 0)
    assert dsf_equal(same.dsf, compute_dsf(example_system), tol=1e-10)


def test_example_second_network_matches_display(example_system, alternate_system):
    res = enumerate_equivalent_networks(example_system)
    other = next(s for s in res.solutions if not s.minimum_phase)
    np.testing.assert_allclose(other.system.a, alternate_system.a, atol=0.05)


def test_certificates_verify(example_system):
    res = enumerate_equivalent_networks(example_system)
    for sol in res.solutions:
        cert = sol.certificate
        report = verify_glover_willems(res.reference, _unsigned(sol.system, cert.j), cert.s, cert.t, tol=1e-10)
        assert report.passed, str(report)
        assert s_block_deviation(cert.s, res.dims["p"], res.l2) == 0.0
        np.testing.assert_array_equal(np.abs(np.diag(cert.j)), 1.0)


def _unsigned(sys, j):
    return StateSpace(sys.a, sys.b @ np.linalg.inv(j), sys.c, sys.d @ np.linalg.inv(j))


def test_minimum_phase_filter(example_system):
    res = enumerate_equivalent_networks(example_system, require_minimum_phase=True)
    assert len(res) == 1
    assert dsf_equal(res.solutions[0].dsf, compute_dsf(example_system), tol=1e-10)
    full = enumerate_equivalent_networks(example_system)
    idx = classify_minimum_phase_solution(full)
    assert full.solutions[idx].minimum_phase


def test_no_latent_riccati_block_gives_one_network(rng):
    sys = random_system(SystemDims((2, 1, 0), 3), rng)
    res = enumerate_equivalent_networks(sys)
    assert res.l2 == 0
    assert len(res) == res.are_count == 1
    signs = np.diag(canonical_signs(sys))
    assert dsf_equal(res.solutions[0].dsf, compute_dsf(sys).with_input_signs(signs), tol=1e-8)


def test_counts_are_ordered_and_sound(rng):
    for degrees, l in [((0, 1), 3), ((1, 1, 0), 4), ((2, 0), 4), ((0, 0, 0), 3)]:
        sys = random_system(SystemDims(degrees, l), rng)
        res = enumerate_equivalent_networks(sys, seed=1)
        if res.kind is SolutionKind.CONTINUUM:
            continue
        assert res.pdiag_count <= res.eq11_count <= res.are_count
        for sol in res.solutions:
            assert phi_equal(sys, sol.system, tol=1e-8)
            assert s_block_deviation(sol.certificate.s, res.dims["p"], res.l2) <= 1e-8


def test_assumptions_are_enforced(example_system):
    mixed = StateSpace(example_system.a, example_system.b @ np.array([[1.0, 0.4], [0.0, 1.0]]), example_system.c)
    with pytest.raises(AssumptionViolation):
        enumerate_equivalent_networks(mixed)


def test_s_block_deviation():
    s = np.zeros((4, 4))
    s[2:, 2:] = [[1.0, 2.0], [2.0, 3.0]]
    assert s_block_deviation(s, 2, 2) == 0.0
    s[0, 3] = s[3, 0] = 0.5
    assert s_block_deviation(s, 2, 2) == pytest.approx(np.sqrt(0.5))
    assert s_block_deviation(np.eye(2), 2, 0) == pytest.approx(np.sqrt(2.0))


def test_reconstruction_from_density(example_system, example_basis):
    z = positive_real_realization(example_system, basis=example_basis)
    res = reconstruct_from_phi(z)
    assert len(res) == 2
    assert dsf_equal(res.solutions[0].dsf, compute_dsf(example_system), tol=1e-6)
    assert any(not is_minimum_phase(s.system) for s in res.solutions)


def test_reconstruction_round_trip(rng):
    for _ in range(5):
        sys = random_system(SystemDims((0, 0, 0), int(rng.integers(1, 4))), rng)
        res = reconstruct_from_phi(positive_real_realization(sys))
        signs = np.diag(canonical_signs(sys))
        target = compute_dsf(sys).with_input_signs(signs)
        assert any(dsf_equal(s.dsf, target, tol=1e-6) for s in res.solutions)
        for s in res.solutions:
            assert phi_equal(sys, s.system, tol=1e-8)


def test_reconstruction_without_latent_states():
    sys = StateSpace([[-2.0]], [[3.0]], [[1.0]])
    res = reconstruct_from_phi(positive_real_realization(sys))
    assert len(res) == 1
    np.testing.assert_allclose(res.solutions[0].system.b, [[3.0]], atol=1e-12)


def test_reconstruction_needs_invertible_noise_gain(rng):
    sys = random_system(SystemDims((1, 0), 2), rng)
    with pytest.raises(NotRelativeDegreeZero):
        reconstruct_from_phi(positive_real_realization(sys))


# full-noise family ---------------------------------------------------------------

def _family_closed_form(theta):
    # derived symbolically from the certificate relations for this system
    q12 = (np.array([20 * theta, 40 * theta]), np.array([1.0, 4 + 25 * theta, 27 + 25 * theta]))
    q21 = (np.array([20 * theta, -(30 - 20 * theta)]), np.array([1.0, 5 + 16 * theta, 6 + 32 * theta]))
    return q12, q21


@pytest.mark.parametrize("theta", [-0.2, -0.1, 0.0, 0.05, 0.09])
def test_full_noise_family_closed_form(fullnoise_system, theta):
    (sample,) = full_noise_scalar_family(fullnoise_system, [theta])
    assert sample.phi_ok
    assert phi_equal(fullnoise_system, sample.system, tol=1e-8)
    for (i, j), (num, den) in zip([(0, 1), (1, 0)], _family_closed_form(theta)):
        for s in POINTS:
            expected = np.polyval(num, s) / np.polyval(den, s)
            assert abs(sample.dsf.q(s)[i, j] - expected) <= 1e-9 * (1 + abs(expected))
    report = full_noise_verify(fullnoise_system, sample.system, sample.certificate.s[2:, 2:],
                               sample.certificate.t)
    assert report.passed, str(report)


def test_full_noise_domain(fullnoise_system):
    lo, hi = full_noise_domain(fullnoise_system)
    # roots of 1 - 6 theta - 41 theta^2
    np.testing.assert_allclose([lo, hi], [(-3 - np.sqrt(50)) / 41, (-3 + np.sqrt(50)) / 41], rtol=1e-12)
    assert full_noise_scalar_family(fullnoise_system, [lo - 0.01, hi + 0.01]) == []


def test_full_noise_requires_one_latent_state():
    with pytest.raises(AssumptionViolation):
        full_noise_domain(StateSpace(-np.eye(4), np.eye(4), np.hstack([np.eye(2), np.zeros((2, 2))])))
