import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlspec.errors import PoleProximity
from nlspec.geometry import (LameParameters, MetricJet, christoffel, christoffel_derivative,
                             flat_field, inverse_metric, jet_from_field, polar_field,
                             ricci_mixed, sphere_field)
from nlspec.symbols import (a2_symbol, invert_a2, multi_indices, parametrix_defect,
                            q3_closed_form, recursion_terms, resolvent_term, split_symbol,
                            symbol_A, trace_q2, xi_derivative, xi_norm2)


def random_jet(rng, n):
    m = rng.standard_normal((n, n))
    dg = rng.standard_normal((n, n, n))
    dg = dg + dg.transpose(1, 0, 2)
    d2g = rng.standard_normal((n, n, n, n))
    d2g = d2g + d2g.transpose(1, 0, 2, 3)
    d2g = d2g + d2g.transpose(0, 1, 3, 2)
    return MetricJet(m @ m.T + n * np.eye(n), dg, d2g)


def loop_symbol(jet, params, xi):
    """Entry-by-entry assembly of the component form, plain loops only."""
    n = jet.dim
    mu, lam = params.mu, params.lam
    gi = inverse_metric(jet)
    G = christoffel(jet)           # G[j, l, k] = Gamma^j_lk
    dG = christoffel_derivative(jet)
    ric = ricci_mixed(jet)
    A = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            v = 0j
            if j == k:
                for m in range(n):
                    for l in range(n):
                        v += mu * gi[m, l] * xi[m] * xi[l]
                        for s in range(n):
                            v += 1j * mu * gi[m, l] * G[s, m, l] * xi[s]
            for m in range(n):
                v += (mu + lam) * gi[j, m] * xi[m] * xi[k]
                for l in range(n):
                    v -= 1j * mu * 2 * gi[m, l] * G[j, k, m] * xi[l]
                    v -= 1j * (mu + lam) * gi[j, m] * G[l, k, l] * xi[m]
                    v -= (mu + lam) * gi[j, m] * dG[l, k, l, m]
                    c = dG[j, k, l, m]
                    for h in range(n):
                        c += G[j, h, l] * G[h, k, m] - G[j, k, h] * G[h, m, l]
                    v -= mu * gi[m, l] * c
            v -= mu * ric[j, k]
            A[j, k] = v
    return A


def test_flat_symbol_examples():
    np.testing.assert_allclose(symbol_A(MetricJet.flat(2), LameParameters(1, 0), [1.0, 0.0]),
                               np.diag([2.0, 1.0]))
    xi = np.array([1.0, 1.0]) / math.sqrt(2)
    np.testing.assert_allclose(symbol_A(MetricJet.flat(2), LameParameters(1, 1), xi),
                               [[2.0, 1.0], [1.0, 2.0]], atol=1e-15)


def test_polar_symbol_matches_loop_assembly():
    jet = jet_from_field(polar_field(), [2.0, 0.1])
    p = LameParameters(1.0, 1.0)
    xi = np.array([1.0, 0.0])
    a = symbol_A(jet, p, xi)
    np.testing.assert_allclose(a, loop_symbol(jet, p, xi), atol=1e-12)
    # leading part is the flat-looking quadratic form, first order part is imaginary
    assert np.abs(a.imag).max() > 0.1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_random_symbol_matches_loop_assembly(n, seed):
    rng = np.random.default_rng(seed)
    jet = random_jet(rng, n)
    p = LameParameters(rng.uniform(0.5, 2), rng.uniform(-0.4, 2))
    xi = rng.standard_normal(n)
    np.testing.assert_allclose(symbol_A(jet, p, xi), loop_symbol(jet, p, xi), atol=1e-10, rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_split_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    jet = random_jet(rng, n)
    p = LameParameters(1.3, 0.4)
    xi = rng.standard_normal(n)
    tau = complex(rng.standard_normal(), rng.standard_normal())
    a2, a1, a0 = split_symbol(jet, p, xi, tau)
    target = tau * np.eye(n) - symbol_A(jet, p, xi)
    assert np.abs(a2 + a1 + a0 - target).max() < 1e-13 * max(1.0, np.abs(target).max())
    assert np.abs(a1.real).max() == 0.0


def test_flat_lower_order_vanish():
    _, a1, a0 = split_symbol(MetricJet.flat(3), LameParameters(1, 1), [0.3, 1.0, -2.0], 2j)
    assert not a1.any() and not a0.any()


def test_invert_a2_example():
    p = LameParameters(1.0, 0.0)
    xi = np.array([1.0, 0.0])
    inv = invert_a2(MetricJet.flat(2), p, xi, 5.0)
    dense = np.linalg.inv(a2_symbol(MetricJet.flat(2), p, xi, 5.0))
    np.testing.assert_allclose(inv, dense, atol=1e-15)
    assert inv[1, 1] == pytest.approx(0.25)               # s1
    assert inv[0, 0] - inv[1, 1] == pytest.approx(1 / 12)  # s2 |xi|^2


def test_invert_zero_xi():
    np.testing.assert_allclose(invert_a2(MetricJet.flat(3), LameParameters(1, 1), np.zeros(3), 1.0), np.eye(3))


@pytest.mark.parametrize("tau", [1.0, 3.0])
def test_pole_proximity(tau):
    with pytest.raises(PoleProximity):
        invert_a2(MetricJet.flat(2), LameParameters(1, 1), [1.0, 0.0], tau)


def test_invert_random_spd_n3():
    rng = np.random.default_rng(11)
    jet = random_jet(rng, 3)
    p = LameParameters(0.7, 1.9)
    xi = rng.standard_normal(3)
    tau = 1j * (1 + xi_norm2(jet, xi))
    err = np.abs(a2_symbol(jet, p, xi, tau) @ invert_a2(jet, p, xi, tau) - np.eye(3)).max()
    assert err < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1), st.floats(0.1, 10))
def test_inverse_homogeneity(n, seed, c):
    rng = np.random.default_rng(seed)
    jet = random_jet(rng, n)
    p = LameParameters(1.0, 0.5)
    xi = rng.standard_normal(n)
    tau = complex(rng.uniform(-2, 2), rng.uniform(0.5, 3))
    lhs = invert_a2(jet, p, c * xi, c * c * tau)
    rhs = invert_a2(jet, p, xi, tau) / c ** 2
    assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(rhs).max())


def test_trace_q2_example_and_matrix_route():
    p = LameParameters(1, 1)
    assert trace_q2(MetricJet.flat(2), p, [1.0, 0.0], 5.0) == pytest.approx(0.75)
    assert trace_q2(MetricJet.flat(4), p, np.zeros(4), 1.0) == pytest.approx(4.0)
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        jet = random_jet(rng, n)
        xi = rng.standard_normal(n)
        tau = complex(-1.0, 2.0)
        assert abs(trace_q2(jet, p, xi, tau) - np.trace(invert_a2(jet, p, xi, tau))) < 1e-12


def test_xi_derivatives_match_finite_differences():
    rng = np.random.default_rng(9)
    jet = random_jet(rng, 3)
    p = LameParameters(1.1, 0.3)
    xi = rng.standard_normal(3)
    tau = 2j
    h = 1e-4
    for k in (1, 2):
        for alpha in multi_indices(3, 1):
            e = np.array(alpha, dtype=float) * h
            fd = (split_symbol(jet, p, xi + e, tau)[2 - k] - split_symbol(jet, p, xi - e, tau)[2 - k]) / (2 * h)
            np.testing.assert_allclose(xi_derivative(jet, p, xi, tau, k, alpha), fd, atol=1e-7)


def test_recursion_enumeration():
    assert recursion_terms(1, 2) == [(0, (0, 0), 1), (0, (1, 0), 2), (0, (0, 1), 2)]
    terms = recursion_terms(2, 2)
    assert (0, (0, 0), 0) in terms and (1, (0, 0), 1) in terms and (0, (1, 1), 2) in terms
    assert all(j + sum(a) + 2 - k == 2 for j, a, k in terms)


def test_flat_field_higher_terms_vanish():
    p = LameParameters(1, 1)
    for l in (1, 2):
        q = resolvent_term(flat_field(2), p, [0.2, 0.4], [1.0, -0.5], 3j, l)
        assert np.abs(q).max() < 1e-12


def test_q3_against_closed_form():
    p = LameParameters(1, 1)
    x, xi, tau = np.array([2.0, 0.0]), np.array([1.0, 0.0]), 4j
    q3 = resolvent_term(polar_field(), p, x, xi, tau, 1)
    ref = q3_closed_form(polar_field(), p, x, xi, tau, h=2e-3)
    assert np.abs(q3 - ref).max() < 1e-6 * np.abs(ref).max()
    assert np.abs(ref).max() > 1e-3


@pytest.mark.parametrize("field, x, L, limit", [
    (flat_field(2), [0.3, -0.2], 2, 1e-10),
    (polar_field(), [2.0, 0.3], 1, 1e-6),
    (sphere_field(), [math.pi / 4, 0.2], 2, 1e-5),
])
def test_parametrix_defect(field, x, L, limit):
    assert parametrix_defect(field, LameParameters(1, 1), x, [1.0, 0.5], 4j, L) < limit
