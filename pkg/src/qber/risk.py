"""Risk analysis: threat impact weighting, CIA posture, domain ranking.

Everything here is a pure function over immutable inputs, so results are
safe to compute in parallel across segments and are reproducible by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .catalog import Catalog
from .errors import EMPTY_FACTORS, OUT_OF_RANGE, UNKNOWN_ID, QberError
from .model import (
    DEFAULT_RATING_MAPPING,
    CiaPosture,
    ControlImplementation,
    Rating,
    RatingMapping,
    normalize,
    rating_to_weight,
)


@dataclass(frozen=True)
class CombinedImpact:
    """Joint severity of a threat: operational weight times financial weight."""

    value: float
    operational: float
    financial: float


@dataclass(frozen=True)
class EconomicRiskScore:
    """Company-level economic risk score.

    `cia_mean` holds the multiplicand actually used, so value is always
    factor_mean * cia_mean. When the exposure substitution is enabled it
    carries the complement of the posture mean.
    """

    value: float
    factor_mean: float
    cia_mean: float


@dataclass(frozen=True)
class DomainPriority:
    """Ranking entry for one security domain."""

    domain_id: str
    score: float
    # (threat id, summed contribution), largest first
    contributions: tuple[tuple[str, float], ...]


def combined_impact(
    operational: Rating,
    financial: Rating,
    mapping: RatingMapping = DEFAULT_RATING_MAPPING,
) -> CombinedImpact:
    """Multiply the normalized operational and financial severity ratings."""
    op = normalize(rating_to_weight(operational, mapping))
    fin = normalize(rating_to_weight(financial, mapping))
    return CombinedImpact(value=op * fin, operational=op, financial=fin)


def _maturity_adjustment(catalog: Catalog, level) -> float:
    # Same structure as control efficacy scaling: NotImplemented zeroes the
    # control, Optimized passes it through. Clamped so edited catalogs with
    # out-of-band multipliers cannot push a contribution past full strength.
    raw = 1.25 - catalog.maturity_multiplier(level)
    return min(1.0, max(0.0, raw))


def cia_posture(
    controls: Sequence[ControlImplementation],
    catalog: Catalog,
) -> CiaPosture:
    """Aggregate implemented controls into a confidentiality/integrity/availability posture.

    Uses complementary products per dimension: each control independently
    covers a fraction of the remaining gap, so two half-strength controls
    do not add up to full coverage. No controls means no posture.
    """
    remaining = [1.0, 1.0, 1.0]
    for impl in controls:
        control = catalog.controls.get(impl.control_id)
        if control is None:
            raise QberError(UNKNOWN_ID, f"unknown control id {impl.control_id!r}")
        adjustment = _maturity_adjustment(catalog, impl.maturity)
        for d in range(3):
            term = min(1.0, max(0.0, control.cia_contribution[d] * adjustment))
            remaining[d] *= 1.0 - term
    return CiaPosture(
        confidentiality=1.0 - remaining[0],
        integrity=1.0 - remaining[1],
        availability=1.0 - remaining[2],
    )


def economic_risk_score(
    factors: Sequence[float],
    cia: CiaPosture,
    use_exposure: bool = False,
) -> EconomicRiskScore:
    """Mean of the external risk factors times the mean CIA posture.

    `use_exposure` substitutes the posture mean with its complement for
    deployments that want a stronger posture to lower the score.
    """
    if not factors:
        raise QberError(EMPTY_FACTORS, "economic risk score requires at least one factor")
    factor_mean = sum(factors) / len(factors)
    cia_mean = cia.mean()
    if use_exposure:
        cia_mean = 1.0 - cia_mean
    return EconomicRiskScore(
        value=factor_mean * cia_mean,
        factor_mean=factor_mean,
        cia_mean=cia_mean,
    )


def domain_priorities(
    threat_impacts: Iterable[tuple[str, CombinedImpact]],
    catalog: Catalog,
    alpha: float = 1.0,
) -> list[DomainPriority]:
    """Rank every catalog domain by summed threat relevance.

    Each (threat, domain) mapping contributes normalized weight times
    (alpha + impact value); contributions from repeated threat rows (one
    per segment) accumulate. Domains without mappings score 0 and sort
    last. Ordering is total: score descending, then domain id.
    """
    if alpha < 0:
        raise QberError(OUT_OF_RANGE, f"alpha must be non-negative, got {alpha}")
    per_domain: dict[str, dict[str, float]] = {d: {} for d in catalog.domains}
    for threat_id, impacts in threat_impacts:
        if threat_id not in catalog.threats:
            raise QberError(UNKNOWN_ID, f"unknown threat id {threat_id!r}")
        for (t_id, d_id), weight in catalog.threat_domain_weights.items():
            if t_id != threat_id or weight == 0:
                continue
            contribution = normalize(weight) * (alpha + impacts.value)
            bucket = per_domain[d_id]
            bucket[threat_id] = bucket.get(threat_id, 0.0) + contribution

    ranked = []
    for domain_id, bucket in per_domain.items():
        contributions = tuple(
            sorted(bucket.items(), key=lambda item: (-item[1], item[0]))
        )
        ranked.append(DomainPriority(
            domain_id=domain_id,
            score=sum(bucket.values()),
            contributions=contributions,
        ))
    ranked.sort(key=lambda p: (-p.score, p.domain_id))
    return ranked
