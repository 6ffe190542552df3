import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonkit import default_grid
from photonkit.fields import (ZERO, GaussianPacket, euclid_norm, fd_jacobian, longitudinal,
                              lorenz_residual, pseudo_inner, transverse_form)
from photonkit.gauge import (GaugeFunction, PureGauge, apply_gauge, are_equivalent,
                             radiation_gauge_representative)
from photonkit.sampling import random_field, random_gauge, transverse_packet

GRID = default_grid()
POINTS = np.array([[0.3, -0.2, 1.1], [1.5, 0.4, -0.7], [-0.9, 2.0, 0.25]])
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_gauge_shift_leaves_pseudo_inner_unchanged(seed):
    rng = np.random.default_rng(seed)
    a, c, psi = random_field(rng), random_gauge(rng), random_field(rng)
    shifted = apply_gauge(a, c)
    scale = euclid_norm(shifted, GRID) * euclid_norm(psi, GRID)
    assert abs(pseudo_inner(shifted, psi, GRID) - pseudo_inner(a, psi, GRID)) < 1e-10 * scale


def test_gauge_shift_keeps_lorenz_condition(rng):
    shifted = apply_gauge(random_field(rng), random_gauge(rng))
    assert np.max(np.abs(lorenz_residual(shifted, POINTS))) < 1e-14


def test_pure_gauge_is_null_against_lorenz_fields(rng):
    # <i c (|k|, k) | psi> vanishes pointwise for Lorenz psi
    g = PureGauge(GaugeFunction(1.0, [0.0, 0.0, 1.0], None))
    psi = random_field(rng)
    assert abs(pseudo_inner(g, psi, GRID)) < 1e-12 * euclid_norm(g, GRID) * euclid_norm(psi, GRID)


def test_pure_gauge_jacobian():
    g = PureGauge(GaugeFunction(0.3 - 0.2j, [0.5, 0.5, 1.5], 0.8))
    np.testing.assert_allclose(g.jacobian(POINTS), fd_jacobian(g.evaluate, POINTS), atol=1e-9)


def test_representative_satisfies_radiation_conditions(rng):
    psi = random_field(rng)
    rep = radiation_gauge_representative(psi).evaluate(POINTS)
    assert np.max(np.abs(rep[:, 0])) == 0.0
    assert np.max(np.abs(np.einsum("ij,ij->i", POINTS, rep[:, 1:]))) < 1e-14


@given(seeds)
@settings(max_examples=8, deadline=None)
def test_representative_is_equivalent(seed):
    rng = np.random.default_rng(seed)
    psi = random_field(rng)
    report = are_equivalent(psi, radiation_gauge_representative(psi), GRID, seed=seed % 1000)
    assert report.equivalent
    assert report.max_ratio < 1e-10


@given(seeds)
@settings(max_examples=8, deadline=None)
def test_representative_is_idempotent(seed):
    rng = np.random.default_rng(seed)
    psi = random_field(rng)
    once = radiation_gauge_representative(psi)
    twice = radiation_gauge_representative(once)
    scale = np.max(np.abs(psi.sample(GRID)))
    assert np.max(np.abs(twice.sample(GRID) - once.sample(GRID))) < 1e-14 * scale


def test_representative_jacobian(rng):
    rep = radiation_gauge_representative(random_field(rng))
    np.testing.assert_allclose(rep.jacobian(POINTS), fd_jacobian(rep.evaluate, POINTS), atol=1e-8)


def test_longitudinal_input_maps_to_zero():
    c = GaugeFunction(1.0, [0.0, 0.0, 1.5], 0.7)
    rep = radiation_gauge_representative(longitudinal(c.evaluate))
    assert np.max(np.abs(rep.sample(GRID))) < 1e-15
    assert radiation_gauge_representative(ZERO) is ZERO


def test_transverse_input_keeps_its_norm(rng):
    psi = transverse_packet(rng)
    rep = radiation_gauge_representative(psi)
    assert transverse_form(rep, GRID) == pytest.approx(transverse_form(psi, GRID), rel=1e-12)
    assert are_equivalent(psi, rep, GRID).max_ratio < 1e-10


def test_inequivalent_fields_are_detected():
    psi = GaussianPacket([1.0, 0.0, 0.0], [0.0, 0.0, 2.0], 0.6)
    phi = GaussianPacket([0.0, 1.0, 0.0], [0.0, 0.0, 2.0], 0.6)
    report = are_equivalent(psi, phi, GRID)
    assert not report
    assert report.max_ratio > 1e-3


def test_constant_gauge_function():
    c = GaugeFunction(2.0)
    np.testing.assert_allclose(c.evaluate(POINTS), 2.0)
    np.testing.assert_allclose(c.gradient(POINTS), 0.0)
