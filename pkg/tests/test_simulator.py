import math

import numpy as np
import pytest

from wpaoi import (
    EventLog,
    NoSuccessError,
    SimConfig,
    Warmup,
    average_aoi,
    batch_ci,
    derive,
    empirical_aoi,
    extract_cycles,
    sample_events,
    simulate,
    trace_rows,
    write_trace,
)


def _trace_events(config):
    """Recover fill slots and decode outcomes from the per-slot trace."""
    cap = config.params.capacitor_j
    fills, outcomes = [], []
    for slot, _harvest, level, transmitted, success, _age in trace_rows(config):
        if transmitted:
            outcomes.append(success)
        if level == cap:
            fills.append(slot)
    return np.asarray(fills, dtype=np.int64), np.asarray(outcomes, dtype=bool)


# --- event extraction -------------------------------------------------------

def test_extract_cycles_constructed_log():
    log = EventLog(
        fill_slots=np.array([3, 5, 9], dtype=np.int64),
        success=np.array([False, False, True]),
        horizon_slots=12,
    )
    t, x, m = extract_cycles(log)
    assert t.tolist() == [3, 2, 4]
    assert x.tolist() == [9]
    assert m.tolist() == [3]


def test_extract_cycles_all_successes():
    log = EventLog(
        fill_slots=np.array([2, 6, 7, 11], dtype=np.int64),
        success=np.array([True, True, True, True]),
        horizon_slots=12,
    )
    t, x, m = extract_cycles(log)
    assert x.tolist() == t.tolist()
    assert m.tolist() == [1, 1, 1, 1]


def test_extract_cycles_random_log_sum_identity():
    rng = np.random.default_rng(7)
    gaps = rng.integers(1, 30, size=10_000)
    fills = np.cumsum(gaps)
    success = rng.random(fills.size) < 0.3
    log = EventLog(fill_slots=fills, success=success, horizon_slots=int(fills[-1]) + 1)
    t, x, m = extract_cycles(log)
    assert int(np.sum(x)) == int(np.sum(t[: int(np.sum(m))]))
    # per-cycle identity
    edges = np.cumsum(m)
    starts = np.concatenate(([0], edges[:-1]))
    for k in range(x.size):
        assert int(x[k]) == int(np.sum(t[starts[k] : edges[k]]))


def test_extract_cycles_rejects_malformed_logs():
    with pytest.raises(ValueError):
        extract_cycles(
            EventLog(
                fill_slots=np.array([5, 3], dtype=np.int64),
                success=np.array([True, True]),
                horizon_slots=10,
            )
        )
    with pytest.raises(ValueError):
        extract_cycles(
            EventLog(
                fill_slots=np.array([3], dtype=np.int64),
                success=np.array([True, True]),
                horizon_slots=10,
            )
        )
    with pytest.raises(ValueError):
        extract_cycles(
            EventLog(
                fill_slots=np.array([3, 20], dtype=np.int64),
                success=np.array([True, True]),
                horizon_slots=10,
            )
        )


# --- empirical age over cycles ---------------------------------------------

def test_empirical_aoi_reference_points():
    assert empirical_aoi([1, 1, 1]) == 1.0
    assert empirical_aoi([2, 3]) == pytest.approx(1.8, rel=1e-15)
    assert empirical_aoi([5]) == 3.0


def test_empirical_aoi_rejects_bad_input():
    with pytest.raises(ValueError):
        empirical_aoi([])
    with pytest.raises(ValueError):
        empirical_aoi([0, 2])
    with pytest.raises(ValueError):
        empirical_aoi([1.5])


# --- batch means confidence intervals ---------------------------------------

def test_batch_ci_constant_samples():
    mean, half = batch_ci([4.2] * 40)
    assert mean == pytest.approx(4.2)
    # the grand mean accumulates a few ulp of rounding against the batch
    # means, so a constant input gives a tiny rather than exactly zero width
    assert 0.0 <= half < 1e-12


def test_batch_ci_two_batches_hand_value():
    mean, half = batch_ci(list(range(1, 21)), n_batches=2)
    assert mean == pytest.approx(10.5, rel=1e-15)
    # batch means 5.5 and 15.5, spread sqrt(50), t quantile for 1 dof
    assert half == pytest.approx(63.53102368216048, rel=1e-12)


def test_batch_ci_alternating_signs():
    mean, half = batch_ci([1.0, -1.0] * 50, n_batches=10)
    assert mean == 0.0
    assert half == 0.0


def test_batch_ci_rejects_short_input():
    with pytest.raises(ValueError):
        batch_ci([1.0, 2.0, 3.0], n_batches=4)
    with pytest.raises(ValueError):
        batch_ci([1.0, 2.0], n_batches=1)


# --- the two execution paths agree ------------------------------------------

@pytest.mark.parametrize("capacitor_j", [1e-4, 3e-4, 1e-3])
def test_vectorized_path_matches_per_slot_path(ref_point, capacitor_j):
    config = SimConfig(ref_point(capacitor_j=capacitor_j), 50_000, seed=2024)
    log = sample_events(config)
    fills, outcomes = _trace_events(config)
    assert np.array_equal(fills, log.fill_slots)
    assert np.array_equal(outcomes, log.success)


def test_vectorized_path_matches_per_slot_path_toy(toy_point):
    config = SimConfig(toy_point, 20_000, seed=5)
    log = sample_events(config)
    fills, outcomes = _trace_events(config)
    assert np.array_equal(fills, log.fill_slots)
    assert np.array_equal(outcomes, log.success)
    assert bool(np.all(log.success))


def test_block_size_does_not_change_events(ref_point):
    config = SimConfig(ref_point(), 50_000, seed=77)
    a = sample_events(config)
    b = sample_events(config, block=997)
    assert np.array_equal(a.fill_slots, b.fill_slots)
    assert np.array_equal(a.success, b.success)


def test_simulate_is_deterministic(ref_point):
    config = SimConfig(ref_point(), 200_000, seed=31)
    assert simulate(config) == simulate(config)


# --- capacitor and age dynamics ---------------------------------------------

def test_trace_energy_and_age_dynamics(ref_point):
    params = ref_point(capacitor_j=2e-4)
    cap = params.capacitor_j
    prev_full = False
    for _slot, harvest, level, transmitted, success, age in trace_rows(
        SimConfig(params, 20_000, seed=8)
    ):
        assert harvest >= 0.0
        assert 0.0 <= level <= cap
        assert transmitted == prev_full
        if success:
            assert transmitted
            assert age == 1
        else:
            assert age >= 2
        prev_full = level == cap


def test_windowed_age_equals_cycle_decomposition(ref_point):
    config = SimConfig(ref_point(), 50_000, seed=13)
    stats = simulate(config)
    rows = list(trace_rows(config))
    success_slots = [slot for slot, _h, _e, _tx, success, _a in rows if success]
    first, last = success_slots[0], success_slots[-1]
    ages = [age for slot, _h, _e, _tx, _s, age in rows if first <= slot < last]
    assert stats.delta_hat == sum(ages) / len(ages)
    assert stats.n_slots_measured == last - first == len(ages)


def test_full_horizon_age_equals_per_slot_average(ref_point):
    config = SimConfig(ref_point(), 5_000, seed=123, warmup=Warmup.FULL_HORIZON)
    stats = simulate(config)
    ages = [age for *_rest, age in trace_rows(config)]
    assert stats.delta_hat == sum(ages) / len(ages)
    assert stats.n_slots_measured == config.horizon_slots


def test_every_attempt_succeeds_when_threshold_vanishes(toy_point):
    stats = simulate(SimConfig(toy_point, 50_000, seed=11))
    assert stats.m_mean == 1.0
    assert stats.t_samples_mean == stats.x_samples_mean
    assert stats.t_samples_m2 == stats.x_samples_m2
    log = sample_events(SimConfig(toy_point, 50_000, seed=11))
    t, x, m = extract_cycles(log)
    assert np.array_equal(x, t[: x.size])


def test_moments_converge_on_toy_point(toy_point):
    stats = simulate(SimConfig(toy_point, 2_000_000, seed=42))
    # T = 1 + Poisson(1): mean 2, second moment 5, age 1.75
    assert stats.t_samples_mean == pytest.approx(2.0, rel=5e-3)
    assert stats.t_samples_m2 == pytest.approx(5.0, rel=2e-2)
    assert stats.delta_hat == pytest.approx(1.75, rel=1e-2)
    assert stats.delta_ci_half < 0.05
    assert stats.n_successes <= stats.n_recharges


def test_attempts_per_update_tracks_success_probability(ref_point):
    params = ref_point()
    d = derive(params)
    stats = simulate(SimConfig(params, 2_000_000, seed=3))
    sigma = math.sqrt((1.0 - d.pi) / d.pi**2 / stats.n_successes)
    assert abs(stats.m_mean - 1.0 / d.pi) < 4.0 * sigma


def test_windowed_age_tracks_closed_form(ref_point):
    params = ref_point()
    d = derive(params)
    target = average_aoi(d.beta, d.pi)
    stats = simulate(SimConfig(params, 2_000_000, seed=17))
    assert stats.delta_hat == pytest.approx(target, rel=0.05)
    assert stats.delta_ci_half > 0.0


# --- failure modes ----------------------------------------------------------

def test_no_fill_raises_with_counters(ref_point):
    with pytest.raises(NoSuccessError) as err:
        simulate(SimConfig(ref_point(capacitor_j=0.5), 100, seed=0))
    assert err.value.n_recharges == 0
    assert err.value.n_successes == 0


def test_single_success_raises_under_windowing(ref_point):
    params = ref_point()
    full = sample_events(SimConfig(params, 100_000, seed=55))
    second_success_fill = int(full.fill_slots[np.flatnonzero(full.success)[1]])
    short = SimConfig(params, second_success_fill, seed=55)
    with pytest.raises(NoSuccessError) as err:
        simulate(short)
    assert err.value.n_successes == 1
    stats = simulate(SimConfig(params, second_success_fill, seed=55, warmup=Warmup.FULL_HORIZON))
    assert stats.n_successes == 1
    assert stats.delta_hat >= 1.0


def test_sim_config_validation(ref_point):
    with pytest.raises(ValueError):
        SimConfig(ref_point(), 0, seed=0)
    with pytest.raises(ValueError):
        SimConfig(ref_point(), 100, seed=-1)
    with pytest.raises(ValueError):
        SimConfig(ref_point(), 100, seed=2**64)


# --- trace file -------------------------------------------------------------

def test_write_trace_round_trips(tmp_path, toy_point):
    config = SimConfig(toy_point, 200, seed=1)
    path = tmp_path / "trace.csv"
    write_trace(config, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "slot,harvest_j,energy_j,transmitted,success,age"
    assert len(lines) == 201
    rows = list(trace_rows(config))
    for line, row in zip(lines[1:], rows):
        cells = line.split(",")
        assert int(cells[0]) == row[0]
        assert float(cells[1]) == row[1]
        assert float(cells[2]) == row[2]
        assert int(cells[3]) == int(row[3])
        assert int(cells[4]) == int(row[4])
        assert int(cells[5]) == row[5]
