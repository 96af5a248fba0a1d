import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from spinweak.errors import InvalidArgumentError, OrthogonalPostselectionError
from spinweak.hilbert import SPIN_X_PLUS, PostSelection, spin_state
from spinweak.qmath import SIGMA_X, SIGMA_Z, StateVector, expectation
from spinweak.weakvalue import AS_PRINTED, closed_form, is_anomalous, overlap_sq, weak_value


def brute_weak_value(theta, phi):
    """Plain-numpy evaluation of <f|sz|i>/<f|i>, independent of the package."""
    f = np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])
    i = np.array([1, 1]) / math.sqrt(2)
    sz = np.diag([1, -1])
    return np.vdot(f, sz @ i) / np.vdot(f, i)


def test_weak_value_examples():
    w = weak_value(SIGMA_Z, SPIN_X_PLUS, spin_state(PostSelection(math.pi / 2, 0)))
    assert (w.re, w.im) == pytest.approx((0, 0), abs=1e-15)
    w = weak_value(SIGMA_Z, SPIN_X_PLUS, spin_state(PostSelection(0, 0)))
    assert (w.re, w.im) == pytest.approx((1, 0), abs=1e-15)
    w = weak_value(SIGMA_Z, SPIN_X_PLUS, spin_state(PostSelection(math.pi / 2, math.pi / 2)))
    assert (w.re, w.im) == pytest.approx((0, 1), abs=1e-15)
    with pytest.raises(OrthogonalPostselectionError):
        weak_value(SIGMA_Z, SPIN_X_PLUS, spin_state(PostSelection(-math.pi / 2, 0)))


def test_closed_form_examples():
    w = closed_form(PostSelection(5 * math.pi / 6, 0))
    assert w.re == pytest.approx(-1 / math.sqrt(3), abs=1e-15)
    assert w.re == pytest.approx(-0.577350, abs=5e-7)
    assert w.im == 0.0
    assert closed_form(PostSelection(math.pi / 2, math.pi / 2)).modulus == pytest.approx(1.0, abs=1e-15)
    w = closed_form(PostSelection(-1.0, 0))
    assert w.re == pytest.approx(brute_weak_value(-1.0, 0).real, abs=1e-12)
    assert w.re == pytest.approx(3.408, abs=5e-4)
    with pytest.raises(OrthogonalPostselectionError):
        closed_form(PostSelection(-math.pi / 2, 0))


def test_phase_sign_convention():
    p = PostSelection(math.pi / 3, math.pi / 2)
    derived, printed = closed_form(p), closed_form(p, AS_PRINTED)
    assert printed.re == derived.re and printed.im == -derived.im
    assert derived.im == pytest.approx(brute_weak_value(p.theta, p.phi).imag, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        closed_form(p, "sideways")


def test_ratio_and_closed_form_agree_on_grid():
    for th in np.linspace(-math.pi, math.pi, 61):
        for ph in np.linspace(0, 2 * math.pi, 8, endpoint=False):
            p = PostSelection(th, ph)
            if overlap_sq(p) < 1e-3:
                continue
            a = weak_value(SIGMA_Z, SPIN_X_PLUS, p.state)
            b = closed_form(p)
            assert abs(a.re - b.re) <= 1e-12 * max(1, abs(b.re))
            assert abs(a.im - b.im) <= 1e-12 * max(1, abs(b.im))


def test_phi_zero_is_real_and_phi_half_pi_unit_modulus():
    for th in np.linspace(-math.pi, math.pi, 61):
        if overlap_sq(PostSelection(th, 0)) > 1e-12:
            assert closed_form(PostSelection(th, 0)).im == 0.0
        w = closed_form(PostSelection(th, math.pi / 2))
        assert w.re ** 2 + w.im ** 2 == pytest.approx(1.0, abs=1e-12)


def test_post_equal_pre_gives_expectation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        s = StateVector(v / np.linalg.norm(v))
        for op in (SIGMA_X, SIGMA_Z):
            w = weak_value(op, s, s)
            assert w.re == pytest.approx(expectation(s, op), abs=1e-12)
            assert w.im == pytest.approx(0.0, abs=1e-12)


def test_unbounded_near_orthogonal():
    w = closed_form(PostSelection(-math.pi / 2 + 0.01, 0))
    assert abs(w.re) > 100
    assert is_anomalous(w)
    assert not is_anomalous(closed_form(PostSelection(0.3, 0)))


@given(st.floats(-math.pi, math.pi), st.floats(0, 2 * math.pi))
def test_closed_form_matches_brute_force(theta, phi):
    p = PostSelection(theta, phi)
    assume(overlap_sq(p) > 1e-3)
    w = closed_form(p)
    ref = brute_weak_value(p.theta, p.phi)
    assert complex(w) == pytest.approx(ref, abs=1e-9 * max(1, abs(ref)))
