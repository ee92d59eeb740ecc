import math

import numpy as np
import pytest

from core.convergence_analysis import (
    INV_E, crossing_interval, crossing_profile, crossing_record, default_oracle_dt, interval_solution,
    iterate_map, lambert_w0, map_slope_at_origin, map_x, next_crossing_error, oracle_crossing,
    transient_solution,
)
from core.exceptions import DomainError
from core.models import ErrorMapParams

RHOS = (0.01, 1.0, 100.0)
KS = (1.0, 1000.0)
UNIT = ErrorMapParams(k=1.0, L_delta=1.0)


def _e_grid(rho):
    magnitudes = rho * np.logspace(-6, 3, 37)
    return np.concatenate((-magnitudes[::-1], magnitudes))


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

def test_lambert_w0_endpoints():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(-INV_E) == -1.0


def test_lambert_w0_known_value():
    assert lambert_w0(-2.0 * math.exp(-2.0)) == pytest.approx(-0.4063757399599599, abs=1e-13)


def test_lambert_w0_residual_on_log_grid():
    ys = -INV_E * np.logspace(-15, 0, 10_000)
    for y in ys:
        w = lambert_w0(float(y))
        assert -1.0 <= w <= 0.0
        assert abs(w * math.exp(w) - y) <= 1e-13


def test_lambert_w0_agrees_with_scipy():
    special = pytest.importorskip("scipy.special")
    for y in np.linspace(-0.36, -1e-8, 500):
        assert lambert_w0(float(y)) == pytest.approx(special.lambertw(y, 0).real, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("y", [0.1, -0.5, float("nan")])
def test_lambert_w0_rejects_values_outside_domain(y):
    with pytest.raises(DomainError):
        lambert_w0(y)


# ---------------------------------------------------------------------------
# Return map
# ---------------------------------------------------------------------------

def test_map_x():
    assert map_x(1.0, 1.0) == -2.0
    assert map_x(-3.0, 1.5) == -3.0
    assert map_x(0.0, 7.0) == -1.0
    with pytest.raises(ValueError):
        map_x(1.0, 0.0)


def test_unit_example():
    assert crossing_interval(1.0, UNIT) == pytest.approx(1.5936242600400401, abs=1e-12)
    assert next_crossing_error(1.0, UNIT) == pytest.approx(-0.5936242600400401, abs=1e-12)


def test_zero_error_is_a_fixed_point():
    assert next_crossing_error(0.0, UNIT) == 0.0
    assert crossing_interval(0.0, UNIT) == 0.0


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("k", KS)
def test_map_contracts_alternates_and_is_odd(rho, k):
    p = ErrorMapParams.from_rho(k, rho)
    for e in _e_grid(rho):
        out = next_crossing_error(float(e), p)
        assert abs(out) < abs(e)
        assert abs(out) <= rho
        assert np.sign(out) == -np.sign(e)
        assert next_crossing_error(float(-e), p) == -out
        assert crossing_interval(float(e), p) > 0


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("k", KS)
def test_map_is_consistent_with_constant_drive(rho, k):
    p = ErrorMapParams.from_rho(k, rho)
    for e in _e_grid(rho):
        rec = crossing_record(float(e), p)
        assert rec.e_sigma_out == pytest.approx(rec.e_sigma_in + rec.r * rec.t_delta, abs=1e-12 * (abs(e) + rho))


@pytest.mark.parametrize("rho", RHOS)
def test_scale_law(rho):
    # scaling e and rho together scales e_out and leaves k * t_delta unchanged
    lam = 2.0
    for k in KS:
        p = ErrorMapParams.from_rho(k, rho)
        scaled = ErrorMapParams.from_rho(k, lam * rho)
        for e in _e_grid(rho):
            e = float(e)
            assert next_crossing_error(lam * e, scaled) == pytest.approx(lam * next_crossing_error(e, p), rel=1e-12)
            assert crossing_interval(lam * e, scaled) == pytest.approx(crossing_interval(e, p), rel=1e-12)


@pytest.mark.parametrize("rho", RHOS)
def test_map_does_not_depend_on_k(rho):
    p1, p2 = ErrorMapParams.from_rho(1.0, rho), ErrorMapParams.from_rho(1000.0, rho)
    for e in _e_grid(rho):
        e = float(e)
        assert next_crossing_error(e, p1) == pytest.approx(next_crossing_error(e, p2), rel=1e-14)
        assert 1.0 * crossing_interval(e, p1) == pytest.approx(1000.0 * crossing_interval(e, p2), rel=1e-12)


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("k", KS)
def test_slope_at_origin_is_minus_one(rho, k):
    assert map_slope_at_origin(ErrorMapParams.from_rho(k, rho)) == pytest.approx(-1.0, abs=1e-3)


def test_small_error_expansion():
    # e_out ~ -(e - 2 e^2 / (3 rho)) for e << rho
    for e in (1e-8, 1e-5, 1e-3):
        assert next_crossing_error(e, UNIT) == pytest.approx(-(e - 2.0 * e * e / 3.0), rel=1e-6)


def test_iterate_map():
    it = iterate_map(1000.0, UNIT, 6)
    values = it.e_values
    assert len(it.sequence) == 6
    assert len(values) == 7
    assert values[0] == 1000.0
    assert all(abs(b) < abs(a) for a, b in zip(values, values[1:]))
    assert all(np.sign(b) == -np.sign(a) for a, b in zip(values, values[1:]))
    assert values[1] == pytest.approx(-1.0, rel=1e-3)
    with pytest.raises(ValueError):
        iterate_map(1.0, UNIT, 0)


# ---------------------------------------------------------------------------
# Closed-form solutions
# ---------------------------------------------------------------------------

def test_transient_solution():
    p = ErrorMapParams.from_rho(2.0, 0.5)
    assert transient_solution(1.5, p, 0.0, 1) == pytest.approx(1.5)
    assert transient_solution(1.5, p, 50.0, 1) == pytest.approx(-0.5)
    assert transient_solution(1.5, p, 50.0, -1) == pytest.approx(0.5)
    assert transient_solution(0.0, p, 1.0, 1) == pytest.approx(0.5 * math.exp(-2.0) - 0.5)
    with pytest.raises(ValueError):
        transient_solution(1.0, p, 1.0, 0)
    with pytest.raises(ValueError):
        transient_solution(1.0, p, -1.0, 1)


@pytest.mark.parametrize("e", [0.01, 1.0, -3.0, 250.0])
def test_interval_solution_meets_next_crossing(e):
    p = ErrorMapParams.from_rho(10.0, 1.0)
    e_d, e_sigma, e_alpha = interval_solution(e, p, 0.0)
    assert float(e_alpha) == 0.0
    assert float(e_sigma) == e

    t_delta = crossing_interval(e, p)
    e_d, e_sigma, e_alpha = interval_solution(e, p, t_delta)
    assert float(e_sigma) == pytest.approx(next_crossing_error(e, p), rel=1e-12)
    assert abs(float(e_alpha)) <= 1e-12 * (abs(e) + p.rho)

    inside = interval_solution(e, p, np.linspace(0.0, t_delta, 50)[1:-1])[2]
    assert np.all(np.sign(inside) == np.sign(e))


def test_crossing_profile():
    p = ErrorMapParams.from_rho(5.0, 1.0)
    profile = crossing_profile(20.0, p, 4, n_samples=801)
    it = iterate_map(20.0, p, 4)
    assert len(profile) == 801
    assert profile.column("e_sigma")[0] == 20.0
    assert profile.times[-1] == pytest.approx(sum(rec.t_delta for rec in it.sequence))
    assert profile.column("e_sigma")[-1] == pytest.approx(it.e_values[-1], rel=1e-9)
    assert np.max(np.abs(np.diff(profile.column("e_sigma")))) <= p.L_delta * profile.record_period * (1 + 1e-9)


def test_crossing_profile_from_zero():
    profile = crossing_profile(0.0, UNIT, 3)
    assert len(profile) == 1
    assert profile.column("e_alpha")[0] == 0.0


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------

ORACLE_POINTS = [
    (rho, k, sign * ratio * rho)
    for rho in (0.1, 1.0, 10.0)
    for k in (1.0, 100.0)
    for sign, ratio in ((1, 0.01), (-1, 0.3), (1, 2.0), (-1, 7.0), (1, 50.0))
]


@pytest.mark.parametrize("rho, k, e", ORACLE_POINTS)
def test_oracle_agrees_with_closed_form(rho, k, e):
    p = ErrorMapParams.from_rho(k, rho)
    oracle = oracle_crossing(0.0, e, p, default_oracle_dt(e, p))
    assert oracle.e_sigma_out == pytest.approx(next_crossing_error(e, p), rel=1e-4)
    assert oracle.t_delta == pytest.approx(crossing_interval(e, p), rel=1e-4)
    assert oracle.r == -p.L_delta * np.sign(e)


def test_oracle_scale_law():
    p, scaled = ErrorMapParams.from_rho(3.0, 0.5), ErrorMapParams.from_rho(3.0, 1.0)
    a = oracle_crossing(0.0, 0.8, p, default_oracle_dt(0.8, p))
    b = oracle_crossing(0.0, 1.6, scaled, default_oracle_dt(1.6, scaled))
    assert b.e_sigma_out == pytest.approx(2.0 * a.e_sigma_out, rel=1e-6)
    assert b.t_delta == pytest.approx(a.t_delta, rel=1e-6)


def test_oracle_at_rest():
    rec = oracle_crossing(0.0, 0.0, UNIT, 1e-3)
    assert rec.t_delta == 0.0
    assert rec.e_sigma_out == 0.0
    with pytest.raises(ValueError):
        oracle_crossing(0.0, 1.0, UNIT, 0.0)
