"""Monte Carlo simulation: determinism, convergence, quantile measures."""

import io
import math
import random

import numpy as np
import pytest

from qber import (
    BusinessProfile,
    BusinessUnit,
    Money,
    QberError,
    Rating,
    Segment,
    SimulationConfig,
    ThreatExposure,
    cvar,
    losses_to_csv,
    simulate_losses,
    summary_json,
    value_at_risk,
)
from qber.simulation import LossDistribution


def _profile(risk_weight=5.0, seg_share=1.0, revenue=1_000_000.0,
             rating=Rating.HIGH):
    return BusinessProfile(
        name="P", sector="BFSI", country="India",
        yearly_revenue=Money.from_float(revenue, "USD"), employee_count=10,
        units=(BusinessUnit(
            name="U", revenue_share=1.0,
            segments=(Segment(
                name="S", revenue_share=seg_share, implemented_controls=(),
                threat_exposures=(ThreatExposure("T-BREACH", risk_weight,
                                                 rating, rating),),
            ),),
        ),),
    )


def _dist(values, currency="USD") -> LossDistribution:
    array = np.sort(np.asarray(values, dtype=np.float64))
    return LossDistribution(losses=array, currency=currency,
                            iterations=len(array), seed=0)


# ---------------------------------------------------------------------------
# Config validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    {"iterations": 0},
    {"seed": -1},
    {"confidence_levels": (0.0,)},
    {"confidence_levels": (1.0,)},
    {"confidence_levels": (0.99, 0.95)},
    {"impact_spread": 1.0},
    {"impact_spread": -0.1},
])
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(QberError) as exc_info:
        SimulationConfig(**kwargs)
    assert exc_info.value.code == "INVALID_CONFIG"


def test_config_json_round_trip():
    cfg = SimulationConfig(iterations=500, seed=9,
                           confidence_levels=(0.9, 0.99), impact_spread=0.2)
    assert SimulationConfig.from_json(cfg.to_json()) == cfg


# ---------------------------------------------------------------------------
# Sampling behaviour
# ---------------------------------------------------------------------------

def test_certain_threat_zero_spread_is_point_mass(fixture_catalog):
    profile = _profile(risk_weight=10.0)
    cfg = SimulationConfig(iterations=500, seed=1, impact_spread=0.0)
    dist = simulate_losses(profile, fixture_catalog, cfg)
    # every iteration: full occurrence at exactly the combined impact 0.64
    assert np.allclose(dist.losses, 1_000_000 * 0.64)


def test_same_seed_bit_identical(fixture_catalog):
    profile = _profile()
    cfg = SimulationConfig(iterations=2_000, seed=42, impact_spread=0.3)
    first = simulate_losses(profile, fixture_catalog, cfg)
    second = simulate_losses(profile, fixture_catalog, cfg)
    assert np.array_equal(first.losses, second.losses)


def test_different_seeds_differ(fixture_catalog):
    profile = _profile()
    a = simulate_losses(profile, fixture_catalog,
                        SimulationConfig(iterations=2_000, seed=1))
    b = simulate_losses(profile, fixture_catalog,
                        SimulationConfig(iterations=2_000, seed=2))
    assert not np.array_equal(a.losses, b.losses)


def test_mean_converges_to_analytic_expectation(fixture_catalog):
    profile = _profile(risk_weight=5.0)  # expectation 1M * 0.64 * 0.5 = 320k
    cfg = SimulationConfig(iterations=20_000, seed=3, impact_spread=0.0)
    dist = simulate_losses(profile, fixture_catalog, cfg)
    expected = 320_000.0
    # Bernoulli standard error at 20k draws is ~0.7% of the mean; 4 sigma
    sigma = expected * math.sqrt(0.5 * 0.5 / 0.5**2 / 20_000)
    assert abs(dist.mean().as_float() - expected) < 4 * sigma


def test_raising_risk_never_lowers_mean(fixture_catalog):
    cfg = SimulationConfig(iterations=5_000, seed=7, impact_spread=0.2)
    low = simulate_losses(_profile(risk_weight=3.0), fixture_catalog, cfg)
    high = simulate_losses(_profile(risk_weight=7.0), fixture_catalog, cfg)
    # common random numbers: same substreams, only the threshold moves
    assert high.mean().as_float() >= low.mean().as_float()


def test_spread_stays_within_bounds(fixture_catalog):
    profile = _profile(risk_weight=10.0)
    cfg = SimulationConfig(iterations=2_000, seed=5, impact_spread=0.9)
    dist = simulate_losses(profile, fixture_catalog, cfg)
    assert dist.losses.min() >= 0.0
    assert dist.losses.max() <= 1_000_000.0 + 1e-6


def test_segment_attribution_sums_to_mean(fixture_catalog):
    profile = _profile()
    cfg = SimulationConfig(iterations=3_000, seed=11, impact_spread=0.4)
    dist = simulate_losses(profile, fixture_catalog, cfg)
    attributed = sum(m.as_float() for m in dist.segment_means.values())
    assert attributed == pytest.approx(dist.mean().as_float(), rel=1e-9)


# ---------------------------------------------------------------------------
# VaR / CVaR
# ---------------------------------------------------------------------------

def test_var_nearest_rank_on_1_to_100():
    dist = _dist(range(1, 101))
    assert value_at_risk(dist, 0.95).as_float() == 95.0
    # brute force the nearest-rank rule across many levels
    for confidence in [0.01, 0.25, 0.5, 0.9, 0.95, 0.99, 0.999]:
        expected = math.ceil(confidence * 100) - 1
        assert value_at_risk(dist, confidence).as_float() == float(expected + 1)


def test_var_constant_sample():
    dist = _dist([7.0] * 50)
    for confidence in (0.05, 0.5, 0.95):
        assert value_at_risk(dist, confidence).as_float() == 7.0
        assert cvar(dist, confidence).as_float() == 7.0


def test_var_confidence_domain():
    dist = _dist(range(10))
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(QberError) as exc_info:
            value_at_risk(dist, bad)
        assert exc_info.value.code == "OUT_OF_RANGE"
        with pytest.raises(QberError):
            cvar(dist, bad)


def test_cvar_tail_mean_on_1_to_100():
    dist = _dist(range(1, 101))
    assert cvar(dist, 0.95).as_float() == pytest.approx(97.5)  # mean(95..100)


def test_cvar_dominates_var_random_samples():
    rng = random.Random(17)
    for _ in range(50):
        dist = _dist([rng.uniform(0, 1e6) for _ in range(200)])
        for confidence in (0.5, 0.9, 0.95, 0.99):
            assert cvar(dist, confidence).as_float() >= \
                value_at_risk(dist, confidence).as_float()


def test_var_monotone_in_confidence():
    rng = random.Random(19)
    dist = _dist([rng.uniform(0, 1e6) for _ in range(500)])
    levels = [0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99]
    values = [value_at_risk(dist, c).as_float() for c in levels]
    assert values == sorted(values)


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------

def test_csv_export_one_loss_per_line():
    dist = _dist([3.0, 1.0, 2.0])
    buffer = io.StringIO()
    losses_to_csv(dist, buffer)
    lines = buffer.getvalue().strip().splitlines()
    assert lines[0] == "loss"
    assert [float(line) for line in lines[1:]] == [1.0, 2.0, 3.0]


def test_summary_json_fields(fixture_catalog):
    profile = _profile()
    cfg = SimulationConfig(iterations=1_000, seed=13)
    dist = simulate_losses(profile, fixture_catalog, cfg)
    summary = summary_json(dist, cfg.confidence_levels)
    assert summary["iterations"] == 1_000
    assert summary["seed"] == 13
    assert summary["currency"] == "USD"
    assert set(summary["value_at_risk"]) == {"0.95", "0.99"}
    assert summary["cvar"]["0.99"] >= summary["value_at_risk"]["0.99"]
    assert "U/S" in summary["segment_means"]
