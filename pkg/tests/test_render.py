import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from netfactor.dsf import compute_dsf
from netfactor.render import (
    ReportBundle,
    check_rendering,
    faddeev_leverrier,
    format_poly,
    rational_matrix,
    render_dsf,
    siso_coefficients,
)
from netfactor.simharness import SystemDims, random_system

POINTS = 1j * np.array([0.3, 1.0, 4.0, 20.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_faddeev_leverrier_matches_poly(seed, n):
    a = np.random.default_rng(seed).standard_normal((n, n))
    coeffs, adj = faddeev_leverrier(a)
    np.testing.assert_allclose(coeffs, np.poly(a), atol=1e-8 * (1 + np.abs(np.poly(a)).max()))
    s = 0.7 + 1.3j
    resolvent_adj = sum(s ** (n - 1 - k) * m for k, m in enumerate(adj))
    np.testing.assert_allclose(resolvent_adj, np.polyval(coeffs, s) * np.linalg.inv(s * np.eye(n) - a),
                               atol=1e-7 * (1 + np.abs(resolvent_adj).max()))


def test_example_q_entry(example_system):
    q = rational_matrix(compute_dsf(example_system).q_realization)
    entry = q[1][0]
    np.testing.assert_allclose(entry.num, [-30.0], atol=1e-10)
    np.testing.assert_allclose(entry.den, [1.0, 5.0, 6.0], atol=1e-10)
    assert q[0][1].is_zero and q[0][0].is_zero
    assert entry.render(4) == "(-30) / (s^2 + 5 s + 6)"


def test_example_p_entries(example_system):
    p = rational_matrix(compute_dsf(example_system).p_realization)
    np.testing.assert_allclose(p[0][0].num, [1.0, 3.0], atol=1e-10)
    np.testing.assert_allclose(p[0][0].den, [1.0, 4.0, 27.0], atol=1e-10)
    np.testing.assert_allclose(p[0][0].zeros, [-3.0], atol=1e-10)
    assert p[1][1].gain == 1.0


def test_rendering_matches_realization(rng):
    sys = random_system(SystemDims((0, 1, 2), 5), rng)
    dsf = compute_dsf(sys)
    for part in (dsf.q_realization, dsf.p_realization):
        assert check_rendering(part, rational_matrix(part), POINTS) <= 1e-8


def test_roundoff_numerator_is_zero():
    num, den = siso_coefficients(-np.eye(2), [1.0, 0.0], [0.0, 1e-17], 0.0)
    np.testing.assert_array_equal(num, [0.0])
    np.testing.assert_array_equal(den, [1.0])


def test_format_poly():
    assert format_poly([1.0, 4.0, 27.0]) == "s^2 + 4 s + 27"
    assert format_poly([-2.5, 0.0, -1.0]) == "-2.5 s^2 - 1"
    assert format_poly([0.0]) == "0"
    assert format_poly([1.23456, 1.0], digits=3, var="z") == "1.23 z + 1"


def test_report_bundle(example_system):
    bundle = render_dsf(compute_dsf(example_system), label="0")
    text = bundle.text()
    assert "Q(2,1) = (-30) / (s^2 + 5 s + 6)" in text
    assert set(bundle.data) == {"Q0", "P0"}
    plain = ReportBundle("title")
    assert plain.text() == "title\n=====\n"
