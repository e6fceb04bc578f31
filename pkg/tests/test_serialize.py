"""Tests for JSON and CSV persistence."""

import numpy as np
import pytest

import cfx
from cfx import engine, measure, serialize
from cfx.errors import BadCSV, BadInput


@pytest.fixture(scope="module")
def small_run():
    system, _ = cfx.make_system("gauss")
    grid, report = engine.fixed_point(system, n_cells=64, tol=2e-2)
    return system, grid, report


def test_attractor_json_round_trip(tmp_path, small_run):
    system, grid, report = small_run
    path = tmp_path / "attractor.json"
    serialize.save_attractor(path, system, grid, report=report)
    sys2, grid2, rep2 = serialize.load_attractor(path)
    assert (grid2.flo == grid.flo).all()
    assert (grid2.fhi == grid.fhi).all()
    assert (grid2.start == grid.start).all()
    assert grid2.lo == grid.lo and grid2.hi == grid.hi
    assert sys2.interval == system.interval
    assert rep2["iterations"] == report.iterations
    assert rep2["final_distance"] == report.final_distance
    assert rep2["k"] == report.k
    assert rep2["N"] == report.N


def test_attractor_json_rewrite_is_byte_identical(tmp_path, small_run):
    system, grid, report = small_run
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    serialize.save_attractor(first, system, grid, report=report)
    sys2, grid2, _ = serialize.load_attractor(first)
    serialize.save_attractor(second, sys2, grid2, report=report)
    assert first.read_bytes() == second.read_bytes()


def test_attractor_floats_survive_the_round_trip(tmp_path, small_run):
    # 17 significant digits are enough to reproduce every double exactly.
    system, grid, _ = small_run
    path = tmp_path / "a.json"
    serialize.save_attractor(path, system, grid)
    _, grid2, rep2 = serialize.load_attractor(path)
    assert rep2 is None
    assert np.array_equal(grid2.flo, grid.flo)
    assert np.array_equal(grid2.fhi, grid.fhi)


def test_builtin_system_objects():
    system, _ = cfx.make_system("gauss")
    assert serialize.system_to_obj(system) == {"builtin": "gauss"}
    nakada, _ = cfx.make_system("nakada", {"alpha": 0.4})
    obj = serialize.system_to_obj(nakada)
    assert obj == {"builtin": "nakada", "params": {"alpha": 0.4}}
    back = serialize.system_from_obj(obj)
    assert back.interval == nakada.interval
    assert back.map(0.3) == nakada.map(0.3)


def test_explicit_system_object_round_trip():
    branch = cfx.normalize_branch(0.0, 1.0, 1.0, 1.0, 0.0, 1.0, label="a")
    system = cfx.PiecewiseSystem((0.0, 1.0), [branch])
    obj = serialize.system_to_obj(system)
    assert obj["interval"] == [0.0, 1.0]
    assert obj["branches"][0]["label"] == "a"
    back = serialize.system_from_obj(obj)
    for x in (0.0, 0.25, 0.7, 1.0):
        assert back.branches()[0].apply(x) == branch.apply(x)


def test_system_from_obj_rejects_malformed_input():
    for obj in ({"foo": 1}, {"builtin": "nope"}, {"interval": [0, 1]}, []):
        with pytest.raises(BadInput):
            serialize.system_from_obj(obj)


def test_json_text_round_trip():
    obj = {"a": [1.0, 0.1 + 0.2], "b": "text"}
    assert serialize.loads(serialize.dumps(obj)) == obj
    with pytest.raises(BadInput):
        serialize.loads("{not json")


def test_orbit_csv_round_trip(tmp_path):
    system, _ = cfx.make_system("gauss")
    cloud = measure.orbit_cloud(system, form="skew", count=40)
    path = tmp_path / "orbit.csv"
    serialize.write_orbit_csv(path, cloud)
    header, rows = serialize.read_csv_table(path, expect_header=["x", "y", "branch"])
    assert header == ("x", "y", "branch")
    assert len(rows) == 40
    xs = np.array([float(r[0]) for r in rows])
    ys = np.array([float(r[1]) for r in rows])
    assert np.array_equal(xs, cloud.points[:, 0])
    assert np.array_equal(ys, cloud.points[:, 1])
    assert tuple(r[2] for r in rows) == cloud.labels


def test_hurwitz_orbit_csv_has_four_coordinates(tmp_path):
    system, _ = cfx.make_system("hurwitz")
    cloud = measure.orbit_cloud(system, count=25, burn=5)
    path = tmp_path / "orbit.csv"
    serialize.write_orbit_csv(path, cloud)
    header, rows = serialize.read_csv_table(path)
    assert header == ("re_z", "im_z", "re_w", "im_w", "branch")
    assert len(rows) == 25
    assert all(len(r) == 5 for r in rows)


def test_density_csv(tmp_path, small_run):
    _, grid, _ = small_run
    prof = measure.density_profile(grid)
    path = tmp_path / "density.csv"
    serialize.write_density_csv(path, prof)
    header, rows = serialize.read_csv_table(path)
    assert header == ("x", "phi")
    assert len(rows) == grid.n_cells
    ps = np.array([float(r[1]) for r in rows])
    assert np.array_equal(ps, prof.ps)


def test_cdf_csv(tmp_path):
    cdf, _ = measure.gauss_kuzmin_experiment(samples=2000, depth=3, bins=32)
    path = tmp_path / "cdf.csv"
    serialize.write_cdf_csv(path, cdf)
    header, rows = serialize.read_csv_table(path)
    assert header == ("x", "P")
    assert float(rows[0][1]) == 0.0
    assert float(rows[-1][1]) == pytest.approx(1.0, abs=1e-12)


def test_csv_rewrite_is_byte_identical(tmp_path):
    system, _ = cfx.make_system("gauss")
    cloud = measure.orbit_cloud(system, form="skew", count=30)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    serialize.write_orbit_csv(a, cloud)
    serialize.write_orbit_csv(b, cloud)
    assert a.read_bytes() == b.read_bytes()


def test_read_csv_table_errors(tmp_path):
    missing = tmp_path / "missing.csv"
    with pytest.raises(OSError):
        serialize.read_csv_table(missing)
    bad = tmp_path / "bad.csv"
    bad.write_text("x,phi\n0.5\n")
    with pytest.raises(BadCSV):
        serialize.read_csv_table(bad)
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\n1,2\n")
    with pytest.raises(BadCSV):
        serialize.read_csv_table(wrong, expect_header=["x", "y"])


def test_load_attractor_rejects_wrong_payload(tmp_path):
    path = tmp_path / "sys.json"
    serialize.write_json(path, {"builtin": "gauss"})
    with pytest.raises(BadInput):
        serialize.load_attractor(path)
