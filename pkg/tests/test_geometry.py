import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlspec.errors import ChartError, InvalidMetric, InvalidParameters
from nlspec.geometry import (LameParameters, MetricField, MetricJet, christoffel,
                             christoffel_derivative, flat_field, inverse_metric,
                             jet_from_field, polar_field, ricci_mixed, sphere_field)


def polar_jet(r):
    g = np.diag([1.0, r * r])
    dg = np.zeros((2, 2, 2))
    dg[1, 1, 0] = 2 * r
    d2g = np.zeros((2, 2, 2, 2))
    d2g[1, 1, 0, 0] = 2.0
    return MetricJet(g, dg, d2g)


def sphere_jet(theta, radius=1.0):
    s, c = math.sin(theta), math.cos(theta)
    r2 = radius ** 2
    g = r2 * np.diag([1.0, s * s])
    dg = np.zeros((2, 2, 2))
    dg[1, 1, 0] = r2 * 2 * s * c
    d2g = np.zeros((2, 2, 2, 2))
    d2g[1, 1, 0, 0] = r2 * 2 * (c * c - s * s)
    return MetricJet(g, dg, d2g)


def test_lame_flags():
    assert LameParameters(1, 1).admissible
    assert LameParameters(1, -1).laplacian_limit
    assert not LameParameters(1, -1).admissible
    with pytest.raises(InvalidParameters):
        LameParameters(0, 1)
    with pytest.raises(InvalidParameters):
        LameParameters(1, -1.5)


def test_inverse_identity_and_diagonal():
    assert np.array_equal(inverse_metric(MetricJet.flat(3)), np.eye(3))
    np.testing.assert_allclose(inverse_metric(MetricJet(np.diag([4.0, 1.0]))), np.diag([0.25, 1.0]))


def test_inverse_random_spd():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((4, 4))
    g = m @ m.T + 4 * np.eye(4)
    ginv = inverse_metric(MetricJet(g))
    assert np.abs(g @ ginv - np.eye(4)).max() < 1e-13
    # dense solve oracle
    assert np.abs(ginv - np.linalg.solve(g, np.eye(4))).max() < 1e-13


@pytest.mark.parametrize("g", [np.array([[1.0, 2.0], [2.0, 1.0]]), np.array([[1.0, 0.5], [0.0, 1.0]]),
                               np.array([[1.0, np.nan], [np.nan, 1.0]]), np.ones((2, 3))])
def test_invalid_metric(g):
    with pytest.raises(InvalidMetric):
        MetricJet(g)


def test_christoffel_flat_zero():
    assert not christoffel(MetricJet.flat(3)).any()
    assert not ricci_mixed(MetricJet.flat(3)).any()


def test_christoffel_polar():
    gam = christoffel(polar_jet(2.0))
    assert gam[0, 1, 1] == pytest.approx(-2.0)
    assert gam[1, 0, 1] == pytest.approx(0.5)
    assert gam[1, 1, 0] == pytest.approx(0.5)
    mask = np.ones_like(gam, dtype=bool)
    mask[0, 1, 1] = mask[1, 0, 1] = mask[1, 1, 0] = False
    assert not gam[mask].any()


def test_christoffel_sphere():
    gam = christoffel(sphere_jet(math.pi / 4))
    assert gam[0, 1, 1] == pytest.approx(-0.5)
    assert gam[1, 0, 1] == pytest.approx(1.0)  # cot(pi/4)


def test_christoffel_derivative_polar():
    dgam = christoffel_derivative(polar_jet(1.0))
    assert dgam[0, 1, 1, 0] == pytest.approx(-1.0)
    assert dgam[1, 0, 1, 0] == pytest.approx(-1.0)  # d/dr (1/r) at r = 1


def test_christoffel_derivative_matches_fd_on_sphere():
    field = sphere_field()
    x = np.array([0.7, 0.1])
    exact = christoffel_derivative(jet_from_field(field, x))
    h = 1e-4
    for m in range(2):
        e = np.zeros(2)
        e[m] = h
        fd = (christoffel(jet_from_field(field, x + e)) - christoffel(jet_from_field(field, x - e))) / (2 * h)
        scale = np.abs(exact[..., m]).max()
        assert np.abs(fd - exact[..., m]).max() < 1e-6 * max(scale, 1.0)


@pytest.mark.parametrize("radius, value", [(1.0, 1.0), (2.0, 0.25)])
def test_ricci_sphere(radius, value):
    np.testing.assert_allclose(ricci_mixed(sphere_jet(0.9, radius)), value * np.eye(2), atol=1e-13)


def test_jet_from_constant_field():
    jet = jet_from_field(MetricField(2, lambda x: np.array([[2.0, 0.3], [0.3, 1.0]])), [0.1, 0.2])
    assert np.abs(jet.dg).max() < 1e-10 and np.abs(jet.d2g).max() < 1e-10


def test_jet_from_polar_field():
    jet = jet_from_field(polar_field(), [2.0, 0.4])
    np.testing.assert_allclose(christoffel(jet), christoffel(polar_jet(2.0)), atol=1e-8)


def test_jet_quadratic_perturbation():
    def g(x):
        m = np.eye(2)
        m[0, 0] += x[0] ** 2
        return m
    jet = jet_from_field(MetricField(2, g), [0.3, 0.0])
    assert jet.d2g[0, 0, 0, 0] == pytest.approx(2.0, abs=1e-8)


def test_chart_error():
    bad = MetricField(2, lambda x: 1 / 0)
    with pytest.raises(ChartError):
        jet_from_field(bad, [0.0, 0.0])
    with pytest.raises(ChartError):
        MetricField(2, lambda x: np.eye(3))([0.0, 0.0])


def test_one_dimensional_jet():
    jet = jet_from_field(MetricField(1, lambda x: np.array([[1.0 + x[0] ** 2]])), [0.5])
    assert ricci_mixed(jet).shape == (1, 1)
    assert ricci_mixed(jet)[0, 0] == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_christoffel_lower_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    dg = rng.standard_normal((n, n, n))
    dg = dg + dg.transpose(1, 0, 2)
    gam = christoffel(MetricJet(m @ m.T + n * np.eye(n), dg))
    assert np.array_equal(gam, gam.transpose(0, 2, 1))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 2.8))
def test_ricci_scaling(c, theta):
    base = ricci_mixed(sphere_jet(theta, 1.0))
    np.testing.assert_allclose(ricci_mixed(sphere_jet(theta, c)), base / c ** 2, atol=1e-12)


def test_jet_fd_accuracy_bound():
    h = 1e-2
    jet = jet_from_field(sphere_field(), [0.8, 0.0], h)
    exact = christoffel(sphere_jet(0.8))
    assert np.abs(christoffel(jet) - exact).max() <= 10 * h ** 4 * np.abs(exact).max()
