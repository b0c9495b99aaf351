"""Monte Carlo annual-loss simulation with quantile risk measures.

Randomness is counter-based: every (segment, threat) pair owns a Philox
substream keyed by the seed and its indices, and iteration i always
consumes row i of that substream. Results are therefore bit-identical
regardless of evaluation order, which makes parallel execution and
regression testing trivial.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import Catalog
from .errors import INVALID_CONFIG, OUT_OF_RANGE, QberError
from .model import (
    DEFAULT_RATING_MAPPING,
    BusinessProfile,
    Money,
    RatingMapping,
    normalize,
)
from .risk import combined_impact


@dataclass(frozen=True)
class SimulationConfig:
    iterations: int = 10_000
    seed: int = 0
    confidence_levels: tuple[float, ...] = (0.95, 0.99)
    impact_spread: float = 0.0  # half-width of the impact distribution, as a fraction of center

    def __post_init__(self):
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise QberError(INVALID_CONFIG, f"iterations must be >= 1, got {self.iterations}")
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed > 2**64 - 1:
            raise QberError(INVALID_CONFIG, f"seed must fit in 64 unsigned bits, got {self.seed}")
        levels = tuple(self.confidence_levels)
        if any(not (0.0 < c < 1.0) for c in levels):
            raise QberError(INVALID_CONFIG, "confidence levels must lie strictly in (0, 1)")
        if list(levels) != sorted(levels):
            raise QberError(INVALID_CONFIG, "confidence levels must be sorted ascending")
        if not (0.0 <= self.impact_spread < 1.0):
            raise QberError(INVALID_CONFIG, f"impact_spread must be in [0, 1), got {self.impact_spread}")
        object.__setattr__(self, "confidence_levels", levels)

    def to_json(self) -> dict:
        return {
            "iterations": self.iterations,
            "seed": self.seed,
            "confidence_levels": list(self.confidence_levels),
            "impact_spread": self.impact_spread,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SimulationConfig":
        return cls(
            iterations=int(doc.get("iterations", 10_000)),
            seed=int(doc.get("seed", 0)),
            confidence_levels=tuple(doc.get("confidence_levels", (0.95, 0.99))),
            impact_spread=float(doc.get("impact_spread", 0.0)),
        )


@dataclass(frozen=True)
class LossDistribution:
    """Sorted empirical annual-loss sample plus attribution."""

    losses: np.ndarray  # sorted ascending, dtype float64
    currency: str
    iterations: int
    seed: int
    segment_means: dict[tuple[str, str], Money] = field(default_factory=dict)

    def mean(self) -> Money:
        return Money.from_float(float(self.losses.mean()), self.currency)


def _triangular_offsets(u: np.ndarray) -> np.ndarray:
    """Map uniforms to [-1, 1] via the symmetric triangular inverse CDF."""
    lower = np.sqrt(2.0 * u) - 1.0
    upper = 1.0 - np.sqrt(2.0 * (1.0 - u))
    return np.where(u < 0.5, lower, upper)


def simulate_losses(
    profile: BusinessProfile,
    catalog: Catalog,
    cfg: SimulationConfig,
    mapping: RatingMapping = DEFAULT_RATING_MAPPING,
) -> LossDistribution:
    """Simulate yearly losses across all segments and threats.

    Per iteration each (segment, threat) pair flips an occurrence coin at
    its likelihood weight; on occurrence the loss fraction is drawn from a
    symmetric triangular distribution centered at the combined impact with
    half-width impact_spread * center, clipped to [0, 1].
    """
    currency = profile.yearly_revenue.currency
    totals = np.zeros(cfg.iterations, dtype=np.float64)
    segment_sums: dict[tuple[str, str], float] = {}

    seg_index = 0
    for unit in profile.units:
        for segment in unit.segments:
            ref = (unit.name, segment.name)
            share = unit.revenue_share * segment.revenue_share
            seg_revenue = profile.yearly_revenue.as_float() * share
            seg_total = 0.0
            for threat_index, te in enumerate(segment.threat_exposures):
                impacts = combined_impact(te.operational, te.financial, mapping)
                center = impacts.value
                half_width = cfg.impact_spread * center
                risk_fraction = normalize(te.risk_weight)

                key = np.array(
                    [cfg.seed, (seg_index << 32) | threat_index], dtype=np.uint64
                )
                stream = np.random.Generator(np.random.Philox(key=key))
                draws = stream.random((cfg.iterations, 2))
                occurred = draws[:, 0] < risk_fraction
                fractions = np.clip(
                    center + half_width * _triangular_offsets(draws[:, 1]), 0.0, 1.0
                )
                contribution = seg_revenue * fractions * occurred
                totals += contribution
                seg_total += float(contribution.sum())
            segment_sums[ref] = seg_total / cfg.iterations
            seg_index += 1

    totals.sort()
    return LossDistribution(
        losses=totals,
        currency=currency,
        iterations=cfg.iterations,
        seed=cfg.seed,
        segment_means={
            ref: Money.from_float(value, currency)
            for ref, value in segment_sums.items()
        },
    )


def _rank_index(confidence: float, n: int) -> int:
    if not (0.0 < confidence < 1.0):
        raise QberError(
            OUT_OF_RANGE, f"confidence must lie strictly in (0, 1), got {confidence}"
        )
    # Nearest-rank rule, no interpolation: exactly testable by brute force.
    return max(0, math.ceil(confidence * n) - 1)


def value_at_risk(distribution: LossDistribution, confidence: float) -> Money:
    """Loss at the given confidence level of the sorted sample."""
    idx = _rank_index(confidence, len(distribution.losses))
    return Money.from_float(float(distribution.losses[idx]), distribution.currency)


def cvar(distribution: LossDistribution, confidence: float) -> Money:
    """Mean loss in the tail at or beyond the value-at-risk rank."""
    idx = _rank_index(confidence, len(distribution.losses))
    tail = distribution.losses[idx:]
    return Money.from_float(float(tail.mean()), distribution.currency)


def losses_to_csv(distribution: LossDistribution, stream) -> None:
    """One loss per line, full float precision."""
    writer = csv.writer(stream)
    writer.writerow(["loss"])
    for value in distribution.losses:
        writer.writerow([repr(float(value))])


def summary_json(distribution: LossDistribution, levels: tuple[float, ...]) -> dict:
    """Compact summary: mean plus VaR/CVaR at each confidence level."""
    return {
        "iterations": distribution.iterations,
        "seed": distribution.seed,
        "currency": distribution.currency,
        "mean": distribution.mean().as_float(),
        "value_at_risk": {
            repr(level): value_at_risk(distribution, level).as_float()
            for level in levels
        },
        "cvar": {
            repr(level): cvar(distribution, level).as_float()
            for level in levels
        },
        "segment_means": {
            f"{unit}/{segment}": money.as_float()
            for (unit, segment), money in sorted(distribution.segment_means.items())
        },
    }
