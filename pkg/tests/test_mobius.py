"""Branch normalization and exact homographic arithmetic."""

from fractions import Fraction

import numpy as np
import pytest

import cfx
from cfx.errors import (
    BadParameter,
    NoBranch,
    NotExpanding,
    OutOfDomain,
    OutOfRange,
    PoleInDomain,
    UnboundedShift,
    ZeroDeterminant,
)
from cfx.mobius import (
    BranchFamily,
    PiecewiseSystem,
    expansion_bound,
    normalize_branch,
    shift_bound,
    validate,
)

from oracles import frac_mobius, rational_grid


def random_branch(rng):
    """Integer matrix with nonzero determinant and a pole-free domain."""
    while True:
        a, b, c, d = (int(v) for v in rng.integers(-6, 7, 4))
        if a * d - b * c == 0:
            continue
        lo, hi = sorted(rng.uniform(-4.0, 4.0, 2))
        if hi - lo < 0.1:
            continue
        if c != 0:
            pole = -d / c
            if lo - 0.3 <= pole <= hi + 0.3:
                continue
        return (a, b, c, d), (lo, hi)


def test_normalized_form_is_canonical():
    rng = np.random.default_rng(3)
    for _ in range(200):
        (a, b, c, d), (lo, hi) = random_branch(rng)
        br = normalize_branch(a, b, c, d, lo, hi, label="t")
        det = br.a * br.d - br.b * br.c
        assert det == pytest.approx(br.det, abs=1e-12)
        assert br.det in (-1, 1)
        assert br.c > 0.0 or (br.c == 0.0 and br.d > 0.0)
        assert br.label == "t"
        # scaling the input matrix does not change the branch
        br2 = normalize_branch(3 * a, 3 * b, 3 * c, 3 * d, lo, hi)
        assert br2.a == pytest.approx(br.a, abs=1e-12)
        assert br2.d == pytest.approx(br.d, abs=1e-12)


def test_apply_matches_exact_rational_arithmetic():
    rng = np.random.default_rng(11)
    for _ in range(100):
        (a, b, c, d), (lo, hi) = random_branch(rng)
        br = normalize_branch(a, b, c, d, lo, hi)
        for x in rational_grid(rng, 5, lo, hi):
            want = frac_mobius(a, b, c, d, x)
            assert br.apply(float(x)) == pytest.approx(float(want), rel=1e-11, abs=1e-11)


def test_inverse_round_trip():
    rng = np.random.default_rng(13)
    for _ in range(100):
        (a, b, c, d), (lo, hi) = random_branch(rng)
        br = normalize_branch(a, b, c, d, lo, hi)
        for x in rng.uniform(lo, hi, 5):
            assert br.inverse(br.apply(x)) == pytest.approx(x, abs=1e-9)
    g = cfx.make_system("gauss")[0].branch_at(0.6)
    with pytest.raises(OutOfRange):
        g.inverse(5.0)


def test_derivative_sign_and_value():
    br = normalize_branch(-1.0, 1.0, 1.0, 0.0, 0.5, 1.0)  # 1/x - 1
    assert br.det == -1
    assert br.derivative(0.5) == pytest.approx(-4.0)
    assert br.apply(0.5) == pytest.approx(1.0)
    with pytest.raises(OutOfDomain):
        br.apply(0.4)


def test_expansion_attained_at_endpoint():
    rng = np.random.default_rng(19)
    for _ in range(100):
        (a, b, c, d), (lo, hi) = random_branch(rng)
        br = normalize_branch(a, b, c, d, lo, hi)
        dense = max(br.q(x) ** 2 for x in np.linspace(lo, hi, 500))
        assert br.expansion() >= dense - 1e-12


def test_rejections():
    with pytest.raises(ZeroDeterminant):
        normalize_branch(2.0, 4.0, 1.0, 2.0, 0.0, 1.0)
    with pytest.raises(BadParameter):
        normalize_branch(0.0, 1.0, 1.0, 0.0, 1.0, 0.5)
    with pytest.raises(PoleInDomain):
        normalize_branch(0.0, 1.0, 1.0, -0.5, 0.0, 1.0)  # pole at 0.5


def test_pole_margin_scales_with_domain_width():
    # pole at 0, one full domain width below lo: clearly outside
    lo, hi = 2.0 ** -40, 2.0 ** -39
    br = normalize_branch(0.0, 1.0, 1.0, 0.0, lo, hi)
    assert br.apply(lo) == pytest.approx(2.0 ** 40)


def test_fixed_points_and_parabolicity():
    golden = normalize_branch(-1.0, 1.0, 1.0, 0.0, 0.5, 1.0)  # 1/x - 1
    ((xstar, deriv),) = golden.fixed_points()
    assert xstar == pytest.approx((5 ** 0.5 - 1) / 2)
    assert deriv == pytest.approx(-1.0 / xstar ** 2)
    assert not golden.is_parabolic()
    farey_left = normalize_branch(-1.0, 0.0, 1.0, -1.0, 0.0, 0.5)  # x/(1-x)
    assert any(x == pytest.approx(0.0) for x, _ in farey_left.fixed_points())
    assert farey_left.is_parabolic()


def test_system_construction_rules():
    br = normalize_branch(0.0, 1.0, 1.0, 0.0, 0.5, 1.0)
    with pytest.raises(BadParameter):
        PiecewiseSystem((0.0, 1.0))
    with pytest.raises(BadParameter):
        PiecewiseSystem((0.0, 0.6), branches=[br])
    with pytest.raises(BadParameter):
        PiecewiseSystem((0.0, 1.0), branches=[])


def test_branch_lookup():
    system, _ = cfx.make_system("gauss")
    assert system.branch_at(0.6).label == "1"
    assert system.branch_at(1.0 / (10 ** 7 + 0.5)).label == str(10 ** 7)
    with pytest.raises(OutOfDomain):
        system.branch_at(1.5)
    two, _ = cfx.make_system("farey")
    assert two.branch_at(0.3).label == "L"
    assert two.branch_at(0.7).label == "R"


def test_expansion_bound_snaps_weak_expansion():
    system, _ = cfx.make_system("gauss")
    assert expansion_bound(system) == 1.0
    contracting = PiecewiseSystem(
        (0.0, 1.0), branches=[normalize_branch(1.0, 0.0, 0.0, 2.0, 0.0, 1.0)]
    )
    with pytest.raises(NotExpanding):
        expansion_bound(contracting)


def test_shift_bound_finite_and_unbounded():
    system, _ = cfx.make_system("gauss")
    bound = shift_bound(system)
    worst = max(br.shift() for br in system.branches(level=64))
    assert bound >= worst > 0.0

    def enum(level):
        out = []
        for n in range(1, level + 1):
            lo, hi = (n - 1) / (level + 1.0), n / (level + 1.0)
            out.append(normalize_branch(1.0, 0.0, float(n), 1.0, lo, hi))
        return out

    growing = PiecewiseSystem(
        (0.0, 1.0), family=BranchFamily(enumerate_fn=enum, locate_fn=lambda x: None)
    )
    with pytest.raises(UnboundedShift):
        shift_bound(growing)


def test_validate_reports_weak_expansion():
    system, _ = cfx.make_system("gauss")
    diag = validate(system)
    assert diag.k == 1.0
    assert diag.weakly_expanding
