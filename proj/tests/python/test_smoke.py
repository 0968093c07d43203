import math

import pytest

import wolffkit

DIRAC = {"kind": "atomic", "dim": 3, "atoms": [{"x": [0, 0, 0], "mass": 1.0}]}
BUMP = {"kind": "mollified_dirac", "center": [0, 0, 0], "mass": 1.0, "bandwidth": 0.1}
SYSTEM = {"N": 3, "p": 2, "q1": 1, "q2": 1, "alpha": 1, "beta": 0.5, "R": math.inf}


def test_dirac_closed_forms():
    w = wolffkit.potential(DIRAC, [[2, 0, 0]], kind="wolff", alpha=1, p=2)
    assert w[0] == pytest.approx(0.5, rel=1e-15)
    r = wolffkit.potential(DIRAC, [[0, 0.25, 0]], kind="riesz", alpha=2)
    assert r[0] == pytest.approx(4.0, rel=1e-15)


def test_wolff_homogeneity():
    heavy = dict(DIRAC, atoms=[{"x": [0, 0, 0], "mass": 4.0}])
    a = wolffkit.potential(DIRAC, [[0.3, 0.1, 0]], alpha=1, p=1.5)[0]
    b = wolffkit.potential(heavy, [[0.3, 0.1, 0]], alpha=1, p=1.5)[0]
    assert b == pytest.approx(16.0 * a, rel=1e-12)


def test_parameter_errors_map_to_value_error():
    with pytest.raises(wolffkit.ParameterError):
        wolffkit.potential(DIRAC, [[1, 0, 0]], alpha=2, p=2)
    with pytest.raises(ValueError):
        wolffkit.potential({"kind": "nonsense"}, [[1, 0, 0]])


def test_capacity_bounds_are_ordered():
    est = wolffkit.capacity({"balls": [{"center": [0, 0, 0], "radius": 0.5}]}, alpha=1, p=2, grid=6)
    assert est["feasible"]
    assert 0 < est["lower"] <= est["upper"]


def test_growth_check_flags_a_dirac():
    params = dict(SYSTEM, q1=4, q2=0)
    assert wolffkit.growth_exponent(params) == pytest.approx(1.0 / 3.0)
    rep = wolffkit.check("growth", DIRAC, params)
    assert rep["verdict"] == "blowup_suspected"


def test_system_and_pde():
    sol = wolffkit.solve_system(BUMP, SYSTEM, epsilon=1e-3)
    assert sol["status"] == "converged"
    assert sol["monotone"]
    assert min(sol["U"]) >= 0
    assert wolffkit.solve_system(BUMP, SYSTEM, epsilon=1e3)["status"] == "diverged"

    small = dict(BUMP, mass=1e-3)
    res = wolffkit.pde(small, p=2)
    assert res["status"] == "converged"
    assert res["in_tube"]
    assert all(math.isfinite(res[k]) for k in ("C_up", "C_low", "C_grad"))
    assert res["u"][-1] == 0.0


def test_linear_pde_is_newtonian():
    res = wolffkit.pde({"kind": "radial", "center": [0, 0, 0], "radii": [0.0], "cumulative": [1.0]}, p=2,
                       R_dom=100.0, linear=True)
    for r, u in zip(res["r"], res["u"]):
        if 0.1 <= r <= 1.0:
            assert u == pytest.approx((1 / r - 0.01) / (4 * math.pi), rel=1e-10)
