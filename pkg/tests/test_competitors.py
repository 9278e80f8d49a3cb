import numpy as np
import pytest

from diskmin.competitors import (
    ProbeReport,
    TwistMap,
    compose,
    make_twist,
    probe_minimality,
    strict_gap_scaling,
)
from diskmin.errors import ParameterError
from diskmin.geometry import det2, make_grid
from diskmin.integrand import QuadraticIntegrand
from diskmin.maps import field_from_map, ncover


def test_make_twist_polynomial_canonical():
    tw = make_twist("polynomial", 0.2)
    R = np.linspace(0.0, 1.0, 11)
    assert np.max(np.abs(tw.offsets(R) - 0.2 * (1.0 - R))) < 1e-14
    assert abs(tw.offsets(np.array([1.0]))[0]) < 1e-15
    assert np.max(np.abs(tw.offset_slopes(R) + 0.2)) < 1e-14


def test_make_twist_bump_support():
    tw = make_twist("bump", 0.3)
    R = np.linspace(0.0, 1.0, 101)
    w = tw.offsets(R)
    assert np.max(np.abs(w)) <= 0.3 + 1e-12
    assert np.all(w[R <= 0.25] == 0.0)
    assert np.all(w[R >= 0.75] == 0.0)


def test_make_twist_amplitude_bound_seeded():
    for seed in range(5):
        for profile in ("polynomial", "bump"):
            tw = make_twist(profile, 0.4, seed=seed)
            R = np.linspace(0.0, 1.0, 513)
            assert np.max(np.abs(tw.offsets(R))) <= 0.4 + 1e-12
            assert abs(tw.offsets(np.array([1.0]))[0]) < 1e-12


def test_make_twist_zero_amplitude_is_identity(grid_small):
    tw = make_twist("polynomial", 0.0)
    u = ncover(2)
    v = compose(u, tw, grid_small)
    base = field_from_map(u, grid_small)
    assert np.array_equal(v.values, base.values)
    assert np.array_equal(v.grads, base.grads)
    with pytest.raises(ParameterError):
        make_twist("polynomial", np.inf)
    with pytest.raises(ParameterError):
        make_twist("spiral", 0.1)


def test_compose_exact_determinant(grid_med):
    u = ncover(3)
    tw = make_twist("polynomial", 0.6, seed=1) + make_twist("bump", 0.3, seed=2)
    v = compose(u, tw, grid_med)
    assert np.max(np.abs(det2(v.grads) - 1.0)) < 1e-12
    assert v.values.shape[:2] == grid_med.shape


def test_compose_boundary_trace_exact():
    u = ncover(2)
    tw = make_twist("polynomial", 0.5, seed=3)
    theta = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    w1 = tw.offsets(np.ones_like(theta))
    assert np.max(np.abs(w1)) < 1e-15
    trace_v = u.g(theta + w1)
    assert np.max(np.abs(trace_v - u.g(theta))) < 1e-12


def test_probe_minimality_report(grid_med, m_const):
    report = probe_minimality(m_const, 2, 3.0, 1.0, count=40, amplitude=0.5, seed=7, grid=grid_med)
    assert isinstance(report, ProbeReport)
    assert report.certified and report.passed
    assert report.min_gap >= -report.gap_tolerance
    assert report.max_residual <= 1e-6
    assert report.max_det_err <= 1e-9
    assert len(report.samples) == 40
    assert "evidence" in report.scope

    again = probe_minimality(m_const, 2, 3.0, 1.0, count=40, amplitude=0.5, seed=7, grid=grid_med)
    assert [p.gap for p in again.samples] == [p.gap for p in report.samples]


def test_probe_amplitude_zero_gaps_vanish(grid_small, m_const):
    report = probe_minimality(m_const, 2, 3.0, 1.0, count=5, amplitude=0.0, seed=1, grid=grid_small)
    assert report.min_gap == 0.0 and report.max_gap == 0.0


def test_probe_outside_admissible_range_reports_only(grid_small):
    m = QuadraticIntegrand.constant(8.0, 1.0)
    report = probe_minimality(m, 2, 8.0, 1.0, count=10, amplitude=0.4, seed=3, grid=grid_small)
    assert not report.certified
    assert report.count == 10  # no assertion about gap signs is implied


def test_strict_gap_scaling_quadratic(grid_med, m_const):
    tw = make_twist("bump", 1.0)
    amplitudes = [0.0125, 0.025, 0.05, 0.1, 0.2]
    gaps = strict_gap_scaling(m_const, 2, 3.0, 1.0, tw, amplitudes, grid_med)
    assert all(g >= 0.0 for g in gaps)
    for small, big in zip(gaps[:-1], gaps[1:]):
        assert 3.5 <= big / small <= 4.5
    assert gaps == sorted(gaps)  # monotone along the ray


def test_strict_gap_scaling_zero_amplitude(grid_small, m_const):
    tw = make_twist("polynomial", 1.0)
    gaps = strict_gap_scaling(m_const, 2, 3.0, 1.0, tw, [0.0, 0.1], grid_small)
    assert gaps[0] == 0.0
    with pytest.raises(ParameterError):
        strict_gap_scaling(m_const, 2, 3.0, 1.0, tw, [0.2, 0.1], grid_small)


def test_twistmap_addition_and_scaling():
    t1 = make_twist("polynomial", 0.1)
    t2 = make_twist("bump", 0.2)
    combined = t1 + t2
    R = np.linspace(0.0, 1.0, 33)
    assert np.max(np.abs(combined.offsets(R) - t1.offsets(R) - t2.offsets(R))) < 1e-15
    scaled = t1.scaled(3.0)
    assert np.max(np.abs(scaled.offsets(R) - 3.0 * t1.offsets(R))) < 1e-15
    assert isinstance(scaled, TwistMap)
