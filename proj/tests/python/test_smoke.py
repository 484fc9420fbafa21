import math

import pytest

import harnacklab as hl


def test_geometry_closed_forms():
    assert hl.dtilde((0, 0), (0, 1)) == pytest.approx(2.0)
    assert hl.box_area((0, 0), 1.0) == pytest.approx(4.0)
    assert hl.box_area((0, 0), 2.0) / hl.box_area((0, 0), 1.0) == pytest.approx(8.0)
    area, err = hl.region_measure("box", (0, 0), 1.0)
    assert abs(area - 4.0) <= err


def test_dilation_scales_dtilde():
    x, y = (0.3, 1.0), (-1.2, 0.5)
    assert hl.dtilde(hl.dilate(2.0, x), hl.dilate(2.0, y)) == pytest.approx(2 * hl.dtilde(x, y))


def test_worked_case_ledger():
    led = hl.ledger(gamma=0.5, c=0.5, k_max=8)
    assert led["M0"] == pytest.approx(4.0)
    assert led["M1"] == pytest.approx(16.0)
    assert led["M"] == pytest.approx(16.0)


def test_barrier_case_one():
    assert hl.barrier_alpha(1.0, 1.0) == pytest.approx(-6.0)
    assert hl.barrier_constants((0, 0), 1.0, -6.0)["M1"] == pytest.approx(1 / 728)


def test_solver_quadratic_case():
    res = hl.solve_manufactured("x2sq", n=33, coefficients="random", seed=3)
    assert res["u"].shape == (33, 33)
    assert res["max_error"] < 1e-9


def test_verify_run_passes():
    out = hl.verify_run(seed=1, n=33)
    assert not out["discarded"]
    assert math.isfinite(out["quotient"])
    assert all(c["status"] != "fail" for c in out["checks"])


def test_geometry_only_suite():
    rep = hl.suite("sections = geometry\nregions = 5\nrays = 64\n")
    assert rep["summary"]["ok"]
    assert not rep["summary"]["solver_invoked"]


def test_errors_are_typed():
    with pytest.raises(hl.ConfigError, match="<python>:2"):
        hl.run_suite("seed = 1\nseed = 2\n")
    with pytest.raises(hl.InvalidParameter):
        hl.solve_manufactured("cubic", n=17)
    assert issubclass(hl.ConfigError, hl.HarnackLabError)
