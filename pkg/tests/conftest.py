"""Shared fixtures: converged attractors are expensive, so build them once."""

import time

import pytest

import cfx
from cfx import engine


def _timed_fixed_point(name, params=None, **kw):
    system, sheet = cfx.make_system(name, params)
    t0 = time.perf_counter()
    grid, report = engine.fixed_point(system, **kw)
    elapsed = time.perf_counter() - t0
    return system, sheet, grid, report, elapsed


@pytest.fixture(scope="session")
def gauss_run():
    return _timed_fixed_point("gauss", n_cells=1024, tol=1e-3)


@pytest.fixture(scope="session")
def sym_gauss_run():
    return _timed_fixed_point("symmetrized-gauss", n_cells=2048, tol=1e-3)


@pytest.fixture(scope="session")
def nakada_run():
    return _timed_fixed_point("nakada", {"alpha": 0.4}, n_cells=1024, tol=1e-3)


@pytest.fixture(scope="session")
def chan_add_run():
    return _timed_fixed_point("chan-add", n_cells=1024, tol=1e-3)


@pytest.fixture(scope="session")
def chan_mult_run():
    return _timed_fixed_point("chan-mult", n_cells=1024, tol=1e-3)


@pytest.fixture(scope="session")
def ralston_run():
    return _timed_fixed_point("ralston", n_cells=1024, tol=5e-3)
