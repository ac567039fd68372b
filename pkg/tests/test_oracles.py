from types import SimpleNamespace

import numpy as np
import pytest
from scipy.special import jv, yv

from fembem.config import config_from_dict
from fembem.errors import ConfigurationError
from fembem.oracles import (ConvergenceTable, SeriesError, brute_quadrature, convergence_study,
                            fitted_order, mie_far_field, mie_near_field, mie_solution,
                            observed_orders, optical_theorem_sides, series_truth)

# Reference values computed once with 30-digit arbitrary-precision arithmetic.
BESSEL_TABLE = [
    ("j", 0, 0.5, 0.9384698072408129),
    ("j", 0, 2.0, 0.22389077914123567),
    ("j", 0, 10.0, -0.24593576445134834),
    ("j", 1, 1.0, 0.44005058574493352),
    ("j", 1, 3.14159265358979, 0.28461534317975404),
    ("j", 2, 5.0, 0.046565116277752216),
    ("j", 5, 2.5, 0.01950162513450322),
    ("j", 10, 12.0, 0.30047603527126931),
    ("j", 20, 6.0, 9.2963984090066681e-10),
    ("j", 3, 0.01, 2.083320312532552e-8),
    ("y", 0, 0.5, -0.44451873350670656),
    ("y", 0, 2.0, 0.51037567264974512),
    ("y", 1, 1.0, -0.78121282130028872),
    ("y", 1, 7.5, -0.25912851048611625),
    ("y", 2, 3.0, -0.16040039348492373),
    ("y", 5, 4.0, -0.79585142111420001),
    ("y", 0, 25.0, -0.12724943226800614),
    ("y", 3, 0.9, -7.7753605330219063),
    ("y", 1, 0.1, -6.458951094702027),
    ("y", 10, 15.0, 0.21997141360195586),
]


@pytest.mark.parametrize("kind,n,x,value", BESSEL_TABLE)
def test_bessel_functions_against_reference_table(kind, n, x, value):
    fn = jv if kind == "j" else yv
    assert fn(n, x) == pytest.approx(value, rel=1e-13, abs=1e-300)


# --------------------------------------------------------------------------- series

ANGLES = 2 * np.pi * np.arange(1000) / 1000


def test_sound_soft_boundary_value_vanishes():
    sol = mie_solution("sound-soft", np.pi, 1.0)
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    pts = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert np.abs(mie_near_field(sol, pts)).max() < 1e-13


def test_low_frequency_sound_soft_is_isotropic():
    F = np.abs(mie_far_field(mie_solution("sound-soft", 1e-4, 1.0), ANGLES))
    assert F.max() / F.min() <= 1.01


@pytest.mark.parametrize("kind,n0", [("sound-soft", None), ("penetrable", 2.0),
                                     ("penetrable", 0.5)])
@pytest.mark.parametrize("k", [0.7, np.pi, 12.0])
def test_optical_theorem(kind, n0, k):
    lhs, rhs = optical_theorem_sides(mie_solution(kind, k, 1.0, n0=n0, direction=0.3))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_unit_index_disk_does_not_scatter():
    sol = mie_solution("penetrable", 2.0, 1.0, n0=1.0)
    assert np.abs(mie_far_field(sol, ANGLES)).max() < 1e-15
    pts = np.array([[0.2, 0.1], [0.9, -0.3], [2.0, 1.0]])
    np.testing.assert_allclose(mie_near_field(sol, pts), np.exp(2j * pts[:, 0]), atol=1e-13)


def test_truncation_is_converged():
    k = 5.0
    base = mie_solution("penetrable", k, 1.0, n0=1.5)
    more = mie_solution("penetrable", k, 1.0, n0=1.5, extra_modes=10)
    assert more.M == base.M + 10
    diff = np.abs(mie_far_field(base, ANGLES) - mie_far_field(more, ANGLES)).max()
    assert diff <= 1e-12 * np.abs(mie_far_field(more, ANGLES)).max()


def test_penetrable_field_continuous_across_boundary():
    sol = mie_solution("penetrable", np.pi, 1.0, n0=2.0)
    t = np.linspace(0, 2 * np.pi, 37)
    eps = 1e-12
    inside = (1 - eps) * np.stack([np.cos(t), np.sin(t)], axis=1)
    outside = (1 + eps) * np.stack([np.cos(t), np.sin(t)], axis=1)
    assert np.abs(mie_near_field(sol, inside) - mie_near_field(sol, outside)).max() <= 1e-10


def test_large_index_approaches_sound_soft():
    k = 2.0
    soft = mie_far_field(mie_solution("sound-soft", k, 1.0), ANGLES)
    hard = mie_far_field(mie_solution("penetrable", k, 1.0, n0=1e6), ANGLES)
    assert np.abs(soft - hard).max() <= 1e-3 * np.abs(soft).max()


def test_far_field_rotates_with_incidence():
    a = mie_far_field(mie_solution("penetrable", 3.0, 1.0, n0=1.7), ANGLES)
    b = mie_far_field(mie_solution("penetrable", 3.0, 1.0, n0=1.7, direction=ANGLES[250]),
                      ANGLES)
    np.testing.assert_allclose(np.roll(a, 250), b, atol=1e-13)


def test_radial_profile_with_constant_index_matches_penetrable():
    n0 = 1.8
    radial = mie_solution("radial", np.pi, 1.0, n0=n0, inner=0.0, profile=lambda r: n0**2)
    disk = mie_solution("penetrable", np.pi, 1.0, n0=n0)
    scale = np.abs(mie_far_field(disk, ANGLES)).max()
    assert np.abs(mie_far_field(radial, ANGLES) - mie_far_field(disk, ANGLES)).max() <= 1e-9 * scale
    pts = np.array([[0.3, 0.2], [-0.5, 0.4], [0.0, -0.9]])
    np.testing.assert_allclose(mie_near_field(radial, pts), mie_near_field(disk, pts), atol=1e-9)


def test_radial_profile_continuity_and_optical_theorem():
    profile = lambda r: 1.0 + 3.0 * np.cos(0.5 * np.pi * np.clip((r - 0.25) / 0.75, 0, 1)) ** 2
    sol = mie_solution("radial", np.pi, 1.0, n0=2.0, inner=0.25, profile=profile)
    lhs, rhs = optical_theorem_sides(sol)
    assert lhs == pytest.approx(rhs, rel=1e-9)
    t = np.linspace(0, 2 * np.pi, 17)
    ring = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert np.abs(mie_near_field(sol, 0.999999 * ring) - mie_near_field(sol, 1.000001 * ring)).max() < 1e-5
    core = np.stack([0.25 * np.cos(t), 0.25 * np.sin(t)], axis=1)
    assert np.abs(mie_near_field(sol, 0.9999999 * core) - mie_near_field(sol, 1.0000001 * core)).max() < 1e-5


@pytest.mark.parametrize("args,kwargs", [
    (("sound-soft", 1.0), {"n0": 2.0}),
    (("penetrable", 1.0), {}),
    (("penetrable", -1.0), {"n0": 2.0}),
    (("radial", 1.0), {"n0": 2.0}),
    (("elastic", 1.0), {}),
])
def test_series_parameter_errors(args, kwargs):
    with pytest.raises(SeriesError):
        mie_solution(*args, **kwargs)


def test_series_mode_cap():
    with pytest.raises(SeriesError, match="converge"):
        mie_solution("sound-soft", 200.0, 1.0, max_modes=20)


# --------------------------------------------------------------------------- brute quadrature

@pytest.mark.parametrize("ell", [0, 1, 3])
def test_brute_quadrature_log_identities(ell):
    s = 0.7
    val = brute_quadrature(lambda t: np.cos(ell * (t - s)), 20_000, log_singular=True, s=s)
    expected = -2 * np.pi * np.log(4) if ell == 0 else -2 * np.pi / ell
    assert val == pytest.approx(expected, rel=1e-12)


def test_brute_quadrature_smooth():
    assert brute_quadrature(np.cos, 64) == pytest.approx(0.0, abs=1e-14)
    assert brute_quadrature(lambda t: np.exp(np.cos(t)), 64) == pytest.approx(
        2 * np.pi * 1.2660658777520082, rel=1e-13)


# --------------------------------------------------------------------------- convergence tables

def test_observed_and_fitted_orders():
    h = np.array([1.0, 0.5, 0.25, 0.125])
    err = 3.0 * h**2.5
    np.testing.assert_allclose(observed_orders(h, err), 2.5)
    assert fitted_order(h, err) == pytest.approx(2.5)


def fake_runner(rate):
    """Runner stand-in whose far field error is exactly h**rate."""

    def run(cfg, level, N, n_angles):
        h = 2.0 ** -level
        mesh = SimpleNamespace(n_free=4**level, n_dirichlet=4 * 2**level, h=h)
        F = np.full(n_angles, h**rate, dtype=complex)
        return SimpleNamespace(far_field=F, problem=SimpleNamespace(mesh=mesh),
                               state=SimpleNamespace(iterations=7))

    return run


def small_config(**medium):
    return config_from_dict({
        "geometry": {"curve": {"name": "circle", "params": {"radius": 1.25}},
                     "rectangle": [-3, 3, -3, 3], "divisions": [12, 12], "level": 0,
                     "degree": 2},
        "medium": medium or {"preset": "uniform"},
        "wave": {"k": 1.0},
    })


def test_convergence_table_with_orders():
    cfg = small_config()
    table = convergence_study(cfg, [2, 0, 1], [20], truth="series", n_angles=16,
                              runner=fake_runner(3.0))
    assert table.truth == "series"
    assert [r.level for r in table.rows] == [0, 1, 2]
    np.testing.assert_allclose(table.errors(20), [1.0, 0.125, 0.015625])
    np.testing.assert_allclose(table.orders(20), [3.0, 3.0])
    text = table.to_text()
    assert text.splitlines()[0].split() == ["level", "N", "L", "M", "h", "error", "iterations",
                                            "order"]
    csv_lines = table.to_csv().splitlines()
    assert csv_lines[0] == "level,N,L,M,h,error,iterations,order"
    assert len(csv_lines) == 4


def test_single_row_table_has_no_order_column():
    table = convergence_study(small_config(), [1], [20], n_angles=8, runner=fake_runner(2.0))
    assert len(table.rows) == 1
    assert "order" not in table.columns()
    assert isinstance(table, ConvergenceTable)


def test_self_reference_truth():
    cfg = small_config(preset="star", params={})
    assert series_truth(cfg) is None
    table = convergence_study(cfg, [0, 1], [20], n_angles=8, runner=fake_runner(2.0))
    assert table.truth == "self"
    # the reference is the run at level 2, so errors are h^2 - 1/16 relative to 1/16
    np.testing.assert_allclose(table.errors(20), [15.0, 3.0])
    with pytest.raises(ConfigurationError):
        convergence_study(cfg, [0], [20], truth="series", runner=fake_runner(2.0))
    with pytest.raises(ConfigurationError):
        convergence_study(cfg, [0], [20], truth="guess", runner=fake_runner(2.0))


def test_series_truth_for_disks():
    sol = series_truth(small_config(preset="constant_disk", params={"radius": 1.0, "n0": 1.5}))
    assert sol.kind == "penetrable" and sol.n0 == 1.5
    sol = series_truth(small_config(preset="smooth_disk",
                                    params={"radius": 1.0, "n0": 2.0, "inner": 0.25}))
    assert sol.kind == "radial"
    assert series_truth(small_config(preset="constant_disk",
                                     params={"radius": 1.0, "n0": 1.5,
                                             "center": [0.2, 0.0]})) is None
