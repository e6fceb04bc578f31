"""Tests for densities, orbit clouds, and statistical experiments."""

import math

import numpy as np
import pytest

import cfx
from cfx import engine, measure
from cfx.errors import BadParameter, ZeroMass

from oracles import LOG2, gauss_density, gauss_truncation_residual


def test_ruelle_residual_equals_truncation_tail():
    # Feeding the transfer operator the exact invariant density leaves only
    # the discarded branches, whose telescoping sum is known in closed form.
    system, sheet = cfx.make_system("gauss")
    xs = np.array([0.1, 0.37, 0.52, 0.9])
    for level in (10, 100, 1000):
        got = measure.ruelle_residual(system, sheet.density, xs=xs, level=level)
        want = max(gauss_truncation_residual(x, level) for x in xs)
        assert got == pytest.approx(want, rel=1e-12)


def test_ruelle_residual_finite_systems_are_exact():
    for name in ("farey", "farey-plus"):
        system, sheet = cfx.make_system(name)
        xs = np.linspace(0.05, 0.95, 7)
        assert measure.ruelle_residual(system, sheet.density, xs=xs) <= 1e-13


def test_ruelle_residual_detects_a_wrong_density():
    system, _ = cfx.make_system("gauss")
    xs = np.linspace(0.1, 0.9, 9)
    wrong = lambda x: 1.0  # noqa: E731 - uniform is not invariant here
    assert measure.ruelle_residual(system, wrong, xs=xs, level=2000) > 0.1


def test_density_profile_integrates_to_one():
    system, _ = cfx.make_system("gauss")
    grid, _ = engine.fixed_point(system, n_cells=256, tol=5e-3)
    prof = measure.density_profile(grid)
    assert float(np.sum(prof.ps) * prof.h) == pytest.approx(1.0, abs=1e-12)
    raw = measure.density_profile(grid, normalize=False)
    assert float(np.sum(raw.ps) * raw.h) == pytest.approx(
        grid.total_mass(), abs=1e-12
    )


def test_density_profile_matches_classical_density(gauss_run):
    _, _, grid, _, _ = gauss_run
    prof = measure.density_profile(grid)
    xs = prof.xs
    want = gauss_density(xs)
    assert float(np.max(np.abs(prof.ps - want))) <= 5e-3


def test_density_profile_rejects_empty_grid():
    zero = cfx.AttractorGrid.seeded((0.0, 1.0), 32, value=0.0)
    with pytest.raises(ZeroMass):
        measure.density_profile(zero)


def test_fiber_measure_matches_known_fiber(gauss_run):
    _, _, grid, _, _ = gauss_run
    for x in (0.2, 0.5, 0.8):
        assert measure.fiber_measure(grid, x) == pytest.approx(
            1.0 / (1.0 + x), abs=3.0 * grid.h
        )


def test_sample_attractor_is_deterministic_and_inside(gauss_run):
    _, _, grid, _, _ = gauss_run
    a = measure.sample_attractor(grid, count=2000, seed=9)
    b = measure.sample_attractor(grid, count=2000, seed=9)
    c = measure.sample_attractor(grid, count=2000, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.shape == (2000, 2)
    for x, y in a[:200]:
        cell = grid.cell_of(x)
        assert grid.fiber(cell).contains(y, tol=1e-12)


def test_orbit_cloud_skew_stays_under_known_fiber_top():
    system, _ = cfx.make_system("gauss")
    cloud = measure.orbit_cloud(
        system, form="skew", start=(0.35, 0.0), burn=100, count=5000
    )
    assert cloud.form == "skew"
    assert cloud.points.shape == (5000, 2)
    assert cloud.start == (0.35, 0.0)
    assert cloud.burn == 100
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    assert np.all(y <= 1.0 / (1.0 + x) + 1e-9)
    assert np.all(y >= -1e-9)


def test_orbit_cloud_dual_matches_conjugated_skew():
    system, _ = cfx.make_system("gauss")
    skew = measure.orbit_cloud(
        system, form="skew", start=(0.35, 0.0), burn=0, count=400
    )
    dual = measure.orbit_cloud(
        system, form="dual", start=(0.35, 0.0), burn=0, count=400
    )
    x, y = skew.points[:, 0], skew.points[:, 1]
    assert np.allclose(dual.points[:, 0], x, atol=1e-12)
    assert np.allclose(dual.points[:, 1], y / (1.0 - x * y), atol=1e-9)
    assert skew.labels == dual.labels


def test_orbit_cloud_is_deterministic():
    system, _ = cfx.make_system("gauss")
    a = measure.orbit_cloud(system, form="skew", count=300)
    b = measure.orbit_cloud(system, form="skew", count=300)
    assert np.array_equal(a.points, b.points)
    assert a.labels == b.labels
    assert a.start == b.start and a.burn == b.burn


def test_orbit_cloud_rejects_unknown_form():
    system, _ = cfx.make_system("gauss")
    with pytest.raises(BadParameter):
        measure.orbit_cloud(system, form="nope")


def test_orbit_cloud_hurwitz_form():
    system, _ = cfx.make_system("hurwitz")
    cloud = measure.orbit_cloud(system, count=500, burn=20)
    assert cloud.form == "hurwitz"
    assert cloud.points.shape == (500, 4)
    z = cloud.points[:, 0] + 1j * cloud.points[:, 1]
    w = cloud.points[:, 2] + 1j * cloud.points[:, 3]
    assert np.all(np.abs(z.real) <= 0.5 + 1e-12)
    assert np.all(np.abs(z.imag) <= 0.5 + 1e-12)
    assert np.all(np.abs(w) <= 1.0 + 1e-9)
    assert cloud.start == complex(0.35, 0.15)


def test_marginal_histogram_approximates_density():
    system, sheet = cfx.make_system("gauss")
    cloud = measure.orbit_cloud(system, form="skew", count=40000)
    hist = measure.marginal_histogram(cloud, bins=50)
    want = gauss_density(hist.xs)
    l1 = float(np.mean(np.abs(hist.ps - want)))
    # Well below the ~0.12 gap to the uniform density.
    assert l1 <= 0.05
    # Histogram is itself a probability density.
    assert float(np.sum(hist.ps) * hist.h) == pytest.approx(1.0, abs=1e-9)


def test_birkhoff_average_recovers_space_averages():
    system, _ = cfx.make_system("gauss")
    mean_x = measure.birkhoff_average(system, lambda x: x, start=0.35, n=200000)
    assert mean_x == pytest.approx(1.0 / LOG2 - 1.0, abs=2e-3)
    lyap = measure.birkhoff_average(
        system, lambda x: -2.0 * np.log(x), start=0.35, n=200000
    )
    assert lyap == pytest.approx(math.pi**2 / (6.0 * LOG2), abs=2e-2)


def test_gauss_kuzmin_depth_dependence():
    _, shallow = measure.gauss_kuzmin_experiment(samples=20000, depth=1)
    _, deep = measure.gauss_kuzmin_experiment(samples=20000, depth=20)
    _, uniform = measure.gauss_kuzmin_experiment(samples=20000, depth=0)
    assert deep < shallow
    assert uniform < shallow
    for bad in ({"samples": 0}, {"depth": -1}, {"bins": 0}):
        with pytest.raises(BadParameter):
            measure.gauss_kuzmin_experiment(**bad)


def test_gauss_kuzmin_cdf_shape():
    cdf, dev = measure.gauss_kuzmin_experiment(samples=20000, depth=5, bins=64)
    assert cdf.xs.shape == cdf.ps.shape
    assert cdf.ps[0] == 0.0 and cdf.ps[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(cdf.ps) >= 0.0)
    assert dev >= 0.0


def test_gauss_kuzmin_frozen_values():
    # Deviation is measured against the law the digits should follow at
    # that depth: uniform at depth 0, log2(1 + x) afterwards.
    _, deep = measure.gauss_kuzmin_experiment(samples=100000, depth=20)
    assert deep == pytest.approx(0.0016245584023782955, abs=1e-12)
    _, uniform = measure.gauss_kuzmin_experiment(samples=100000, depth=0)
    assert uniform == pytest.approx(0.0027800000000000047, abs=1e-12)
    _, one = measure.gauss_kuzmin_experiment(samples=100000, depth=1)
    assert one == pytest.approx(0.02907059272389373, abs=1e-12)
