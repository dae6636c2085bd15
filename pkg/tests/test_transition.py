import numpy as np
import pytest
from scipy.integrate import quad

from wildmap.errors import DomainError
from wildmap.transition import TransitionProfile, default_profile, smooth_step, smooth_step_integral


@pytest.fixture(scope="module")
def profile():
    return default_profile(1e-12)


def test_endpoint_values(profile):
    assert profile.step(0.0) == 0.0
    assert profile.step(1.0) == 1.0
    assert profile.step(0.5) == 0.5
    assert profile.step_integral(0.0) == 0.0
    assert abs(profile.half - 0.5) < 1e-12


def test_symmetry(profile):
    ts = np.linspace(0.0, 1.0, 757)
    assert np.max(np.abs(profile.step(ts) + profile.step(1.0 - ts) - 1.0)) < 1e-14


def test_strictly_increasing_interior(profile):
    ts = np.linspace(0.05, 0.95, 400)
    assert np.all(np.diff(profile.step(ts)) > 0)
    assert np.all(profile.step_derivative(ts) > 0)


def test_flat_tails(profile):
    for t in (1e-9, 1e-4, 0.01):
        assert profile.step(t) == 0.0 or profile.step(t) < 1e-40
        assert profile.step_derivative(t) < 1e-30
        assert profile.step(1.0 - t) >= 1.0 - 1e-30


def test_integral_against_quadrature(profile):
    # Independent oracle: adaptive quadrature of the closed-form step.
    for t in (0.1, 0.25, 0.5, 0.75, 0.9, 1.0):
        ref, _ = quad(lambda u: smooth_step(u), 0.0, t, epsabs=1e-15, limit=200)
        assert profile.step_integral(t) == pytest.approx(ref, abs=1e-12)


def test_reflection_identity(profile):
    # Integrate step(t) + step(1-t) = 1 from 0 to t.
    ts = np.linspace(0.0, 1.0, 211)
    lhs = profile.step_integral(1.0 - ts)
    rhs = profile.half - ts + profile.step_integral(ts)
    assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_derivative_matches_finite_differences(profile):
    h = 1e-6
    for t in (0.2, 0.35, 0.5, 0.65, 0.8):
        fd = (profile.step(t + h) - profile.step(t - h)) / (2.0 * h)
        assert profile.step_derivative(t) == pytest.approx(fd, rel=1e-4)


def test_integral_monotone_and_bounded(profile):
    ts = np.linspace(0.0, 1.0, 1001)
    vals = profile.step_integral(ts)
    assert np.all(vals >= 0.0)
    assert np.all(vals <= profile.half)


def test_scalar_and_vector_shapes(profile):
    assert isinstance(profile.step(0.3), float)
    out = profile.step_integral(np.array([0.1, 0.9]))
    assert out.shape == (2,)
    assert smooth_step_integral(1.0) == pytest.approx(0.5, abs=1e-12)


def test_bad_tolerance_rejected():
    with pytest.raises(DomainError):
        TransitionProfile(tol=0.5)
    with pytest.raises(DomainError):
        TransitionProfile(tol=-1e-9)


def test_profile_cache_shares_instances():
    assert default_profile(1e-12) is default_profile(1e-12)
