"""Brute-force relay search against the exact channel model."""
import numpy as np
import pytest

import uanrelay as ur
from uanrelay import BracketError, LinkSpec, OracleResult, ValidationError


def spec_for(l, snr=15.0, pr=1.0):
    return LinkSpec(l=l, snr0_db=snr, p_r=pr)


def test_numeric_energy_reference_values(env, cache):
    short = LinkSpec(l=10.0, snr0_db=10.0, p_r=0.5)
    assert np.isclose(ur.numeric_energy(0.0, short, env, cache), 0.13809490270364913, rtol=1e-9)
    assert np.isclose(ur.numeric_energy(5.0, short, env, cache), 0.18933155496830617, rtol=1e-9)
    long = LinkSpec(l=50.0, snr0_db=25.0, p_r=0.5)
    assert np.isclose(ur.numeric_energy(0.0, long, env, cache), 14.162776462665411, rtol=1e-9)
    assert np.isclose(ur.numeric_energy(25.0, long, env, cache), 3.997719134636738, rtol=1e-9)


def test_numeric_energy_endpoints_mean_direct(env, cache):
    spec = spec_for(20.0)
    assert ur.numeric_energy(0.0, spec, env, cache) == ur.numeric_energy(20.0, spec, env, cache)


def test_numeric_energy_position_validation(env, cache):
    spec = spec_for(20.0)
    for x in (-1.0, 20.5, float("nan")):
        with pytest.raises(ValidationError):
            ur.numeric_energy(x, spec, env, cache)


def test_numeric_energy_cache_is_transparent(env, cache):
    spec = spec_for(12.0)
    assert ur.numeric_energy(4.0, spec, env, cache) == ur.numeric_energy(4.0, spec, env)


def test_cache_power_matches_link_budget(env, cache):
    direct = ur.electrical_power(ur.required_transmit_power_acoustic(10.0, 20.0, env), env)
    assert np.isclose(cache.transmit_power_w(10.0, 20.0), direct, rtol=1e-12)


def test_cache_hop_energy_formula(env, cache):
    spec = spec_for(18.0)
    band, _, _ = cache.profile(9.0)
    expected = (cache.transmit_power_w(9.0, spec.snr0_db) + spec.p_r) * (
        spec.packet_bits / (spec.alpha * band.width_khz * 1e3)
    )
    assert np.isclose(cache.hop_energy_joule(9.0, spec), expected, rtol=1e-12)


@pytest.mark.parametrize("l", [5.0, 10.0, 15.0, 20.0, 25.0])
def test_argmin_stays_on_boundary_below_turning(l, env, cache):
    result = ur.grid_argmin_relay(spec_for(l), env, l / 16.0, cache)
    assert result.best_x == 0.0


def test_argmin_jumps_to_midpoint_past_turning(env, cache):
    result = ur.grid_argmin_relay(spec_for(30.0), env, 30.0 / 16.0, cache)
    assert result.best_x == 15.0


def test_argmin_stable_under_step_halving(env, cache):
    coarse = ur.grid_argmin_relay(spec_for(30.0), env, 30.0 / 8.0, cache)
    fine = ur.grid_argmin_relay(spec_for(30.0), env, 30.0 / 16.0, cache)
    assert coarse.best_x == fine.best_x == 15.0


def test_argmin_tie_resolves_to_smallest_position(env, cache):
    # both endpoints sample the identical direct energy; the left one wins
    result = ur.grid_argmin_relay(spec_for(10.0), env, 10.0 / 16.0, cache)
    curve = dict(result.energy_curve)
    assert curve[0.0] == curve[10.0]
    assert result.best_x == 0.0


def test_energy_curve_is_symmetric(env, cache):
    result = ur.grid_argmin_relay(spec_for(30.0), env, 30.0 / 16.0, cache)
    curve = dict(result.energy_curve)
    worst = max(abs(curve[x] - curve[30.0 - x]) for x, _ in result.energy_curve)
    assert worst <= 1e-12


def test_grid_argmin_step_validation(env, cache):
    with pytest.raises(ValidationError):
        ur.grid_argmin_relay(spec_for(20.0), env, 6.0, cache)
    with pytest.raises(ValidationError):
        ur.grid_argmin_relay(spec_for(20.0), env, 0.0, cache)


def test_oracle_result_minimum_invariant():
    with pytest.raises(ValidationError):
        OracleResult(
            best_x=0.0,
            best_energy_joule=2.0,
            grid_step=1.0,
            energy_curve=((0.0, 2.0), (1.0, 1.0)),
        )


def test_turning_point_near_closed_form(env, cache, m15):
    lop = ur.open_distance(m15, 1.0)
    grid = lop * np.linspace(0.75, 1.45, 10)
    turning = ur.realistic_open_distance(15.0, 1.0, env, grid, position_divisor=16, cache=cache)
    assert np.isclose(turning, 29.172940343361024, rtol=1e-9)
    assert abs(turning - lop) / turning < 0.10


def test_turning_point_monotone_in_receive_power(env, cache, m15):
    lop_half = ur.open_distance(m15, 0.5)
    grid = lop_half * np.linspace(0.75, 1.45, 10)
    low = ur.realistic_open_distance(15.0, 0.5, env, grid, position_divisor=16, cache=cache)
    lop_full = ur.open_distance(m15, 1.0)
    grid = lop_full * np.linspace(0.75, 1.45, 10)
    high = ur.realistic_open_distance(15.0, 1.0, env, grid, position_divisor=16, cache=cache)
    assert low < high


def test_turning_point_insensitive_to_position_divisor(env, cache):
    # even divisors place the midpoint exactly on the grid, so the crossing
    # interpolation sees the same direct-vs-midpoint gap
    v16 = ur.realistic_open_distance(15.0, 1.0, env, [28.0, 30.0], position_divisor=16, cache=cache)
    v32 = ur.realistic_open_distance(15.0, 1.0, env, [28.0, 30.0], position_divisor=32, cache=cache)
    assert abs(v16 - v32) <= 1e-12


def test_turning_point_bracket_errors(env, cache):
    with pytest.raises(BracketError):
        ur.realistic_open_distance(15.0, 1.0, env, [5.0, 10.0], position_divisor=16, cache=cache)
    with pytest.raises(BracketError):
        ur.realistic_open_distance(15.0, 1.0, env, [35.0, 40.0], position_divisor=16, cache=cache)


def test_turning_point_grid_validation(env, cache):
    with pytest.raises(ValidationError):
        ur.realistic_open_distance(15.0, 1.0, env, [10.0], cache=cache)
    with pytest.raises(ValidationError):
        ur.realistic_open_distance(15.0, 1.0, env, [10.0, 5.0], cache=cache)
    with pytest.raises(ValidationError):
        ur.realistic_open_distance(15.0, 1.0, env, [-5.0, 10.0], cache=cache)
    with pytest.raises(ValidationError):
        ur.realistic_open_distance(15.0, 1.0, env, [20.0, 30.0], position_divisor=3, cache=cache)


def test_fitted_midpoint_energy_tracks_oracle(models, env, cache):
    # fitted models follow the exact channel closely at short range and
    # within a wider envelope everywhere in the planning range
    worst_all = 0.0
    worst_short = 0.0
    for l in (5.0, 10.0, 20.0, 30.0, 50.0):
        for snr in (10.0, 15.0, 20.0, 25.0):
            spec = LinkSpec(l=l, snr0_db=snr, p_r=0.5)
            fitted = ur.relay_energy(l / 2.0, spec, models[snr])
            exact = ur.numeric_energy(l / 2.0, spec, env, cache)
            rel = abs(fitted - exact) / exact
            worst_all = max(worst_all, rel)
            if l <= 20.0 and snr <= 15.0:
                worst_short = max(worst_short, rel)
    assert worst_all < 0.20
    assert worst_short < 0.05
