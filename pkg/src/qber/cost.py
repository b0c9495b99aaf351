"""Cost analysis: monetary loss chain, control return ratios, budget planning.

The chain bound 0 <= segment_risk <= segment_impact <= segment_revenue <=
company revenue holds for all valid inputs because every step multiplies
by a factor in [0,1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .catalog import Catalog, ControlDef, maturity_multiplier
from .errors import CURRENCY_MISMATCH, UNKNOWN_REF, ZERO_COST, QberError
from .model import (
    BusinessProfile,
    CiaPosture,
    MaturityLevel,
    Money,
    Rating,
    Segment,
    normalize,
)
from .risk import CombinedImpact

# (unit name, segment name) pair identifying a segment within a profile
SegmentRef = tuple[str, str]


@dataclass(frozen=True)
class ThreatRow:
    """Quantified loss figures for one threat against one segment."""

    threat_id: str
    impacts: CombinedImpact
    risk_fraction: float  # likelihood weight normalized to [0,1]
    seg_impact: Money
    seg_risk: Money


@dataclass(frozen=True)
class SegmentAssessment:
    unit: str
    segment: str
    seg_revenue: Money
    threat_rows: tuple[ThreatRow, ...]
    posture: CiaPosture
    exposure: float
    ale: Money


@dataclass(frozen=True)
class ControlCandidate:
    """One control considered for a segment, priced and scored."""

    unit: str
    segment: str
    control_id: str
    control_name: str
    implemented: bool
    current_maturity: MaturityLevel | None
    target_maturity: MaturityLevel
    annualized_cost: Money
    cost_rate: float
    actual_efficacy: float
    z_rosi: float


@dataclass(frozen=True)
class RecommendationPlan:
    budget: Money | None
    chosen: tuple[ControlCandidate, ...]
    total_cost: Money
    residual_risk_estimate: Money


def segment_revenue(profile: BusinessProfile, unit_name: str, segment_name: str) -> Money:
    """Revenue attributable to one segment: company revenue scaled by both shares."""
    unit = profile.find_unit(unit_name)
    if unit is None:
        raise QberError(UNKNOWN_REF, f"unknown business unit {unit_name!r}")
    segment = next((s for s in unit.segments if s.name == segment_name), None)
    if segment is None:
        raise QberError(
            UNKNOWN_REF, f"unknown segment {segment_name!r} in unit {unit_name!r}"
        )
    return profile.yearly_revenue.times(unit.revenue_share * segment.revenue_share)


def segment_impact(seg_revenue: Money, impacts: CombinedImpact) -> Money:
    """Worst-case monetary loss for a segment under one threat."""
    return seg_revenue.times(impacts.value)


def segment_risk(seg_impact: Money, impacts: CombinedImpact, risk_fraction: float) -> Money:
    """Expected-loss style figure: impact discounted by severity and likelihood."""
    return seg_impact.times(impacts.value * risk_fraction)


def control_efficacy(
    base: float,
    level: MaturityLevel,
    catalog: Catalog | None = None,
) -> float:
    """Actual efficacy a control delivers at an operating maturity.

    The adjustment (1.25 - multiplier) spans 0 at NotImplemented to 1 at
    Optimized with the default table; clamping guards edited catalogs.
    """
    adjusted = base * (1.25 - maturity_multiplier(level, catalog))
    return min(1.0, max(0.0, adjusted))


def efficacy_bucket(efficacy: float) -> Rating:
    """Coarse qualitative label for an efficacy value, in thirds."""
    if efficacy < 1.0 / 3.0:
        return Rating.LOW
    if efficacy < 2.0 / 3.0:
        return Rating.MEDIUM
    return Rating.HIGH


def exposure(cia: CiaPosture) -> float:
    """Fraction of the company left unprotected by the current posture."""
    return 1.0 - cia.mean()


def ale(exposure_fraction: float, seg_impact: Money) -> Money:
    """Annual loss expectancy: exposure applied to the worst-case impact."""
    return seg_impact.times(exposure_fraction)


def z_rosi(ale_value: Money, efficacy: float, cost: Money, cost_rate: float) -> float:
    """Return ratio of a control: averted loss net of adjusted cost, over that cost.

    Positive means the control averts more loss than it costs; exactly -1
    when the control delivers nothing.
    """
    ale_value._check_currency(cost)
    denominator = cost.as_float() * cost_rate
    if denominator <= 0.0:
        raise QberError(
            ZERO_COST,
            f"control cost times cost rate must be positive, got {denominator}",
        )
    return (ale_value.as_float() * efficacy - denominator) / denominator


def annualized_control_cost(control: ControlDef, amortization_years: float = 3.0) -> Money:
    """Yearly price of running a control: opex plus amortized capex."""
    if amortization_years <= 0:
        raise QberError(ZERO_COST, "amortization_years must be positive")
    return control.opex_annual.plus(control.capex.times(1.0 / amortization_years))


def build_candidates(
    profile: BusinessProfile,
    catalog: Catalog,
    ale_by_segment: Mapping[SegmentRef, Money],
    cost_rate: float = 1.0,
    amortization_years: float = 3.0,
    new_control_maturity: MaturityLevel = MaturityLevel.DEFINED,
) -> list[ControlCandidate]:
    """Score every catalog control against every segment it can protect.

    Implemented controls are scored at their current maturity (the value
    they deliver today) with Optimized as the upgrade target; absent
    controls are scored at the maturity a fresh deployment would reach.
    Controls with no efficacy against the segment's threats, or with zero
    annualized cost, are not candidates.
    """
    candidates: list[ControlCandidate] = []
    for unit in profile.units:
        for segment in unit.segments:
            ref = (unit.name, segment.name)
            seg_ale = ale_by_segment.get(ref)
            if seg_ale is None:
                continue
            threat_ids = [t.threat_id for t in segment.threat_exposures]
            implemented = {c.control_id: c for c in segment.implemented_controls}
            for control in catalog.controls.values():
                relevant = [
                    control.base_efficacy[t] for t in threat_ids
                    if t in control.base_efficacy
                ]
                if not relevant or max(relevant) == 0.0:
                    continue
                cost = annualized_control_cost(control, amortization_years)
                if cost.as_float() <= 0.0:
                    continue
                current = implemented.get(control.id)
                if current is not None:
                    level = current.maturity
                    target = MaturityLevel.OPTIMIZED
                else:
                    level = new_control_maturity
                    target = new_control_maturity
                actual = control_efficacy(max(relevant), level, catalog)
                candidates.append(ControlCandidate(
                    unit=unit.name,
                    segment=segment.name,
                    control_id=control.id,
                    control_name=control.name,
                    implemented=current is not None,
                    current_maturity=current.maturity if current else None,
                    target_maturity=target,
                    annualized_cost=cost,
                    cost_rate=cost_rate,
                    actual_efficacy=actual,
                    z_rosi=z_rosi(seg_ale, actual, cost, cost_rate),
                ))
    return candidates


def rank_candidates(candidates: Sequence[ControlCandidate]) -> list[ControlCandidate]:
    """Deterministic total order: best return first, cheaper breaks ties."""
    return sorted(candidates, key=lambda c: (
        -c.z_rosi, c.annualized_cost.as_float(), c.control_id, c.unit, c.segment,
    ))


def recommend(
    candidates: Sequence[ControlCandidate],
    budget: Money | None,
    ale_by_segment: Mapping[SegmentRef, Money] | None = None,
) -> RecommendationPlan:
    """Greedy plan: walk candidates by descending return, buy what fits.

    Only candidates with positive return are eligible; a candidate that
    would exceed the remaining budget is skipped, not queued. Greedy is
    deliberate: the trace is explainable step by step, at the price of
    not being a knapsack optimum.
    """
    currency = None
    for candidate in candidates:
        if currency is None:
            currency = candidate.annualized_cost.currency
        elif candidate.annualized_cost.currency != currency:
            raise QberError(
                CURRENCY_MISMATCH,
                "candidates must be priced in a single currency, "
                f"saw {currency} and {candidate.annualized_cost.currency}",
            )
    if currency is None:
        currency = budget.currency if budget is not None else "USD"
    if budget is not None and budget.currency != currency:
        raise QberError(
            CURRENCY_MISMATCH,
            f"budget currency {budget.currency} does not match candidate currency {currency}",
        )

    chosen: list[ControlCandidate] = []
    total = Money.from_float(0.0, currency)
    remaining = budget.as_float() if budget is not None else None
    for candidate in rank_candidates(candidates):
        if candidate.z_rosi <= 0.0:
            continue
        price = candidate.annualized_cost.as_float()
        if remaining is not None and price > remaining + 1e-9:
            continue
        chosen.append(candidate)
        total = total.plus(candidate.annualized_cost)
        if remaining is not None:
            remaining -= price

    residual = Money.from_float(0.0, currency)
    if ale_by_segment:
        for ref, seg_ale in sorted(ale_by_segment.items()):
            keep = 1.0
            for candidate in chosen:
                if (candidate.unit, candidate.segment) == ref:
                    keep *= 1.0 - candidate.actual_efficacy
            residual = residual.plus(seg_ale.times(keep))
    return RecommendationPlan(
        budget=budget,
        chosen=tuple(chosen),
        total_cost=total,
        residual_risk_estimate=residual,
    )


def threat_rows_for_segment(
    segment: Segment,
    seg_revenue: Money,
    impacts_by_threat: Mapping[str, CombinedImpact],
) -> tuple[ThreatRow, ...]:
    """Assemble the per-threat monetary chain for one segment."""
    rows = []
    for te in segment.threat_exposures:
        impacts = impacts_by_threat[te.threat_id]
        risk_fraction = normalize(te.risk_weight)
        impact_money = segment_impact(seg_revenue, impacts)
        rows.append(ThreatRow(
            threat_id=te.threat_id,
            impacts=impacts,
            risk_fraction=risk_fraction,
            seg_impact=impact_money,
            seg_risk=segment_risk(impact_money, impacts, risk_fraction),
        ))
    return tuple(rows)
