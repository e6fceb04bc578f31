"""Planar extension steps, the conjugacy between them, and the complex step."""

from fractions import Fraction

import numpy as np
import pytest

import cfx
from cfx.errors import PoleInDual, Singular, StraddlesBranchBoundary, ZeroInput
from cfx.mobius import PiecewiseSystem, normalize_branch
from cfx.skew import (
    dual_density,
    dual_step,
    from_dual,
    gaussian_round,
    hurwitz_step,
    jacobian_determinant,
    skew_step,
    to_dual,
)

from oracles import frac_dual_v, frac_from_dual, frac_skew_y, frac_to_dual


@pytest.fixture(scope="module")
def gauss():
    return cfx.make_system("gauss")[0]


def test_skew_step_matches_exact_arithmetic(gauss):
    rng = np.random.default_rng(31)
    for _ in range(200):
        den = int(rng.integers(3, 50))
        x = Fraction(int(rng.integers(1, den)), den)
        y = Fraction(int(rng.integers(0, 40)), 41)
        br = gauss.branch_at(float(x))
        (xp, yp), label = skew_step(gauss, (float(x), float(y)))
        n = int(label)
        want_x = 1 / x - n
        want_y = frac_skew_y(-n, 1, 1, 0, br.det, x, y)
        assert xp == pytest.approx(float(want_x), abs=1e-9)
        assert yp == pytest.approx(float(want_y), abs=1e-9)


def test_dual_step_matches_exact_arithmetic(gauss):
    rng = np.random.default_rng(37)
    for _ in range(200):
        den = int(rng.integers(3, 50))
        x = Fraction(int(rng.integers(1, den)), den)
        v = Fraction(int(rng.integers(0, 40)), 41)
        br = gauss.branch_at(float(x))
        (xp, vp), label = dual_step(gauss, (float(x), float(v)))
        n = int(label)
        want_v = frac_dual_v(-n, 1, 1, 0, v)
        assert vp == pytest.approx(float(want_v), abs=1e-9)


def test_dual_step_frozen_example():
    br = normalize_branch(2.0, 1.0, 1.0, 1.0, 0.0, 1.0)
    system = PiecewiseSystem((0.0, 1.0), branches=[br])
    (_, vp), _ = dual_step(system, (0.5, 0.352941))
    assert vp == pytest.approx(-0.3928571, abs=1e-6)


def test_conjugacy_round_trip():
    rng = np.random.default_rng(41)
    for _ in range(300):
        x = float(rng.uniform(0.0, 1.0))
        y = float(rng.uniform(0.0, 0.95 / max(x, 1e-9)))
        if abs(1.0 - x * y) < 1e-3:
            continue
        _, v = to_dual((x, y))
        assert v == pytest.approx(float(frac_to_dual(Fraction(x), Fraction(y))), rel=1e-12)
        _, back = from_dual((x, v))
        assert back == pytest.approx(y, rel=1e-9, abs=1e-12)


def test_conjugacy_intertwines_the_two_forms(gauss):
    rng = np.random.default_rng(43)
    for _ in range(300):
        x = float(rng.uniform(1e-3, 1.0))
        y = float(rng.uniform(0.0, 1.0 / (1.0 + x)))
        (xs, ys), _ = skew_step(gauss, (x, y))
        _, v = to_dual((x, y))
        (xd, vd), _ = dual_step(gauss, (x, v))
        assert xd == pytest.approx(xs, abs=1e-12)
        _, v_direct = to_dual((xs, ys))
        assert vd == pytest.approx(v_direct, abs=1e-10)


def test_singularities_raise():
    with pytest.raises(Singular):
        to_dual((0.5, 2.0))
    with pytest.raises(Singular):
        from_dual((0.5, -2.0))
    br = normalize_branch(1.0, 1.0, 1.0, 2.0, 0.0, 1.0)
    system = PiecewiseSystem((0.0, 1.0), branches=[br])
    a, b = br.a, br.b
    with pytest.raises(PoleInDual):
        dual_step(system, (0.5, a / b))


def test_dual_density_formula():
    rng = np.random.default_rng(47)
    for _ in range(100):
        x, v = rng.uniform(0.0, 1.0, 2)
        assert dual_density(x, v) == pytest.approx(1.0 / (1.0 + x * v) ** 2, rel=1e-12)


def test_jacobian_is_one_on_generic_points(gauss):
    rng = np.random.default_rng(53)
    checked = 0
    for _ in range(200):
        x = float(rng.uniform(0.02, 0.98))
        y = float(rng.uniform(0.0, 1.0 / (1.0 + x)))
        try:
            det = jacobian_determinant(gauss, (x, y))
        except StraddlesBranchBoundary:
            continue
        checked += 1
        assert det == pytest.approx(1.0, abs=1e-5)
    assert checked > 150


def test_jacobian_refuses_straddling_stencil(gauss):
    with pytest.raises(StraddlesBranchBoundary):
        jacobian_determinant(gauss, (0.5, 0.1), h=0.01)


def test_gaussian_round_basics():
    assert gaussian_round(2.4137931 - 1.0344828j) == 2 - 1j
    assert gaussian_round(-0.2 + 0.3j) == 0j
    assert gaussian_round(1.8 - 2.9j) == 2 - 3j


def test_hurwitz_step_frozen_example():
    (z, w), label = hurwitz_step((0.35 + 0.15j, 0.0j))
    assert z.real == pytest.approx(0.4137931, abs=1e-6)
    assert z.imag == pytest.approx(-0.0344828, abs=1e-6)
    # w' = 1/(w + q) with digit q = 2 - i
    assert w == pytest.approx((2 + 1j) / 5, abs=1e-12)
    assert label == "+2-1i"
    with pytest.raises(ZeroInput):
        hurwitz_step((0.0j, 0.0j))


def test_hurwitz_orbit_and_digit_geometry():
    z = 0.31 + 0.21j
    w = 0.0j
    for _ in range(2000):
        q = gaussian_round(1.0 / z)
        # the remainder constraint forbids unit digits: |q| >= sqrt(2)
        assert abs(q) >= 2.0 ** 0.5 - 1e-12
        (z, w), _ = hurwitz_step((z, w))
        assert max(abs(z.real), abs(z.imag)) <= 0.5 + 1e-12
        assert abs(w) <= 1.0 + 1e-9
