"""End-to-end assessment pipeline, report documents, and what-if deltas.

An assessment report is self-contained: it embeds the full profile
snapshot, content hashes, and the engine configuration, so any number can
be reproduced later from the report alone plus the same catalog.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

from .catalog import Catalog, catalog_to_json, rcvar_factors
from .cost import (
    ControlCandidate,
    RecommendationPlan,
    SegmentAssessment,
    ThreatRow,
    ale,
    build_candidates,
    efficacy_bucket,
    exposure,
    rank_candidates,
    recommend,
    segment_revenue,
    threat_rows_for_segment,
)
from .errors import (
    STALE_CATALOG,
    UNKNOWN_ENTITY,
    VALIDATION_FAILED,
    QberError,
)
from .model import (
    DEFAULT_RATING_MAPPING,
    BusinessProfile,
    CiaPosture,
    ControlImplementation,
    MaturityLevel,
    Money,
    Rating,
    RatingMapping,
    Segment,
    ThreatExposure,
    profile_from_json,
    profile_to_json,
    validate_profile,
)
from .risk import (
    CombinedImpact,
    DomainPriority,
    EconomicRiskScore,
    cia_posture,
    combined_impact,
    domain_priorities,
    economic_risk_score,
)
from .simulation import SimulationConfig, simulate_losses, summary_json


def canonical_json_bytes(doc) -> bytes:
    """Stable byte encoding: sorted keys, no whitespace."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def content_hash(doc) -> str:
    return hashlib.sha256(canonical_json_bytes(doc)).hexdigest()


def catalog_hash(catalog: Catalog) -> str:
    return content_hash(catalog_to_json(catalog))


# ---------------------------------------------------------------------------
# Engine configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 1.0
    rating_mapping: RatingMapping = DEFAULT_RATING_MAPPING
    cost_rate: float = 1.0
    amortization_years: float = 3.0
    use_exposure_in_rs: bool = False
    budget: Money | None = None
    new_control_maturity: MaturityLevel = MaturityLevel.DEFINED
    seed: int = 0
    simulation: SimulationConfig | None = None

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "rating_mapping": self.rating_mapping.to_json(),
            "cost_rate": self.cost_rate,
            "amortization_years": self.amortization_years,
            "use_exposure_in_rs": self.use_exposure_in_rs,
            "budget": self.budget.to_json() if self.budget is not None else None,
            "new_control_maturity": self.new_control_maturity.value,
            "seed": self.seed,
            "simulation": self.simulation.to_json() if self.simulation else None,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "EngineConfig":
        budget = doc.get("budget")
        simulation = doc.get("simulation")
        mapping = doc.get("rating_mapping")
        return cls(
            alpha=float(doc.get("alpha", 1.0)),
            rating_mapping=(
                RatingMapping.from_json(mapping) if mapping else DEFAULT_RATING_MAPPING
            ),
            cost_rate=float(doc.get("cost_rate", 1.0)),
            amortization_years=float(doc.get("amortization_years", 3.0)),
            use_exposure_in_rs=bool(doc.get("use_exposure_in_rs", False)),
            budget=Money.from_json(budget) if budget else None,
            new_control_maturity=MaturityLevel.from_str(
                doc.get("new_control_maturity", "defined")
            ),
            seed=int(doc.get("seed", 0)),
            simulation=SimulationConfig.from_json(simulation) if simulation else None,
        )


# ---------------------------------------------------------------------------
# Report document
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssessmentReport:
    id: str
    created_at: str
    base_id: str | None
    catalog_version: str
    catalog_digest: str
    profile_digest: str
    profile_snapshot: dict
    config: EngineConfig
    segments: tuple[SegmentAssessment, ...]
    company_posture: CiaPosture
    economic_risk: EconomicRiskScore
    domain_ranking: tuple[DomainPriority, ...]
    recommendation: RecommendationPlan
    candidates: tuple[ControlCandidate, ...]
    simulation_summary: dict | None


def assess(
    profile: BusinessProfile,
    catalog: Catalog,
    config: EngineConfig = EngineConfig(),
) -> AssessmentReport:
    """Run the full pipeline: validate, score risk, price it, recommend."""
    validation = validate_profile(profile, catalog)
    if not validation.ok:
        raise QberError(
            VALIDATION_FAILED,
            "profile failed validation",
            details=validation.to_json(),
        )

    segments: list[SegmentAssessment] = []
    ale_by_segment: dict[tuple[str, str], Money] = {}
    all_threat_impacts: list[tuple[str, CombinedImpact]] = []

    for unit in profile.units:
        for segment in unit.segments:
            posture = cia_posture(segment.implemented_controls, catalog)
            seg_rev = segment_revenue(profile, unit.name, segment.name)
            impacts_by_threat = {
                te.threat_id: combined_impact(
                    te.operational, te.financial, config.rating_mapping
                )
                for te in segment.threat_exposures
            }
            rows = threat_rows_for_segment(segment, seg_rev, impacts_by_threat)
            all_threat_impacts.extend(impacts_by_threat.items())

            exposure_fraction = exposure(posture)
            worst_impact = Money.from_float(0.0, seg_rev.currency)
            for row in rows:
                if worst_impact < row.seg_impact:
                    worst_impact = row.seg_impact
            seg_ale = ale(exposure_fraction, worst_impact)

            assessment = SegmentAssessment(
                unit=unit.name,
                segment=segment.name,
                seg_revenue=seg_rev,
                threat_rows=rows,
                posture=posture,
                exposure=exposure_fraction,
                ale=seg_ale,
            )
            segments.append(assessment)
            ale_by_segment[(unit.name, segment.name)] = seg_ale

    count = len(segments)
    company_posture = CiaPosture(
        confidentiality=sum(s.posture.confidentiality for s in segments) / count,
        integrity=sum(s.posture.integrity for s in segments) / count,
        availability=sum(s.posture.availability for s in segments) / count,
    )
    factors = rcvar_factors(profile, catalog)
    econ = economic_risk_score(
        factors, company_posture, use_exposure=config.use_exposure_in_rs
    )
    ranking = domain_priorities(all_threat_impacts, catalog, config.alpha)

    candidates = rank_candidates(build_candidates(
        profile,
        catalog,
        ale_by_segment,
        cost_rate=config.cost_rate,
        amortization_years=config.amortization_years,
        new_control_maturity=config.new_control_maturity,
    ))
    plan = recommend(candidates, config.budget, ale_by_segment)

    simulation_summary = None
    if config.simulation is not None:
        distribution = simulate_losses(
            profile, catalog, config.simulation, mapping=config.rating_mapping
        )
        simulation_summary = summary_json(
            distribution, config.simulation.confidence_levels
        )

    snapshot = profile_to_json(profile)
    return AssessmentReport(
        id=uuid.uuid4().hex,
        created_at=datetime.now(timezone.utc).isoformat(),
        base_id=None,
        catalog_version=catalog.version,
        catalog_digest=catalog_hash(catalog),
        profile_digest=content_hash(snapshot),
        profile_snapshot=snapshot,
        config=config,
        segments=tuple(segments),
        company_posture=company_posture,
        economic_risk=econ,
        domain_ranking=tuple(ranking),
        recommendation=plan,
        candidates=tuple(candidates),
        simulation_summary=simulation_summary,
    )


# ---------------------------------------------------------------------------
# What-if deltas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AddControl:
    unit: str
    segment: str
    control_id: str
    maturity: MaturityLevel
    op = "add_control"


@dataclass(frozen=True)
class RemoveControl:
    unit: str
    segment: str
    control_id: str
    op = "remove_control"


@dataclass(frozen=True)
class SetMaturity:
    unit: str
    segment: str
    control_id: str
    maturity: MaturityLevel
    op = "set_maturity"


@dataclass(frozen=True)
class SetBudget:
    budget: Money | None
    op = "set_budget"


@dataclass(frozen=True)
class SetThreatRating:
    unit: str
    segment: str
    threat_id: str
    operational: Rating | None = None
    financial: Rating | None = None
    risk_weight: float | None = None
    op = "set_threat_rating"


Change = AddControl | RemoveControl | SetMaturity | SetBudget | SetThreatRating


@dataclass(frozen=True)
class WhatIfDelta:
    changes: tuple[Change, ...] = ()

    def to_json(self) -> dict:
        return {"changes": [_change_to_json(c) for c in self.changes]}

    @classmethod
    def from_json(cls, doc: dict) -> "WhatIfDelta":
        return cls(changes=tuple(
            _change_from_json(c) for c in doc.get("changes", [])
        ))


def _change_to_json(change: Change) -> dict:
    doc: dict = {"op": change.op}
    if isinstance(change, (AddControl, SetMaturity)):
        doc.update(unit=change.unit, segment=change.segment,
                   control_id=change.control_id, maturity=change.maturity.value)
    elif isinstance(change, RemoveControl):
        doc.update(unit=change.unit, segment=change.segment,
                   control_id=change.control_id)
    elif isinstance(change, SetBudget):
        doc["budget"] = change.budget.to_json() if change.budget else None
    elif isinstance(change, SetThreatRating):
        doc.update(unit=change.unit, segment=change.segment,
                   threat_id=change.threat_id)
        if change.operational is not None:
            doc["operational"] = change.operational.value
        if change.financial is not None:
            doc["financial"] = change.financial.value
        if change.risk_weight is not None:
            doc["risk_weight"] = change.risk_weight
    return doc


def _change_from_json(doc: dict) -> Change:
    op = doc.get("op")
    if op == "add_control":
        return AddControl(doc["unit"], doc["segment"], doc["control_id"],
                          MaturityLevel.from_str(doc["maturity"]))
    if op == "remove_control":
        return RemoveControl(doc["unit"], doc["segment"], doc["control_id"])
    if op == "set_maturity":
        return SetMaturity(doc["unit"], doc["segment"], doc["control_id"],
                           MaturityLevel.from_str(doc["maturity"]))
    if op == "set_budget":
        budget = doc.get("budget")
        return SetBudget(Money.from_json(budget) if budget else None)
    if op == "set_threat_rating":
        operational = doc.get("operational")
        financial = doc.get("financial")
        weight = doc.get("risk_weight")
        return SetThreatRating(
            doc["unit"], doc["segment"], doc["threat_id"],
            operational=Rating.from_str(operational) if operational else None,
            financial=Rating.from_str(financial) if financial else None,
            risk_weight=float(weight) if weight is not None else None,
        )
    raise QberError(UNKNOWN_ENTITY, f"unknown what-if operation {op!r}")


def _find_segment(profile: BusinessProfile, unit_name: str, segment_name: str) -> Segment:
    unit = profile.find_unit(unit_name)
    if unit is None:
        raise QberError(UNKNOWN_ENTITY, f"unknown business unit {unit_name!r}")
    for segment in unit.segments:
        if segment.name == segment_name:
            return segment
    raise QberError(
        UNKNOWN_ENTITY, f"unknown segment {segment_name!r} in unit {unit_name!r}"
    )


def _replace_segment(
    profile: BusinessProfile, unit_name: str, segment_name: str, new_segment: Segment
) -> BusinessProfile:
    units = []
    for unit in profile.units:
        if unit.name != unit_name:
            units.append(unit)
            continue
        segments = tuple(
            new_segment if s.name == segment_name else s for s in unit.segments
        )
        units.append(dataclasses.replace(unit, segments=segments))
    return dataclasses.replace(profile, units=tuple(units))


def _apply_change(
    change: Change,
    profile: BusinessProfile,
    config: EngineConfig,
    catalog: Catalog,
) -> tuple[BusinessProfile, EngineConfig, Change]:
    """Apply one change; also return its inverse against the pre-change state."""
    if isinstance(change, SetBudget):
        inverse = SetBudget(config.budget)
        return profile, dataclasses.replace(config, budget=change.budget), inverse

    segment = _find_segment(profile, change.unit, change.segment)

    if isinstance(change, AddControl):
        if change.control_id not in catalog.controls:
            raise QberError(UNKNOWN_ENTITY, f"unknown control id {change.control_id!r}")
        if any(c.control_id == change.control_id for c in segment.implemented_controls):
            raise QberError(
                VALIDATION_FAILED,
                f"control {change.control_id!r} already implemented in "
                f"segment {change.segment!r}",
            )
        new_segment = dataclasses.replace(segment, implemented_controls=(
            *segment.implemented_controls,
            ControlImplementation(change.control_id, change.maturity),
        ))
        inverse: Change = RemoveControl(change.unit, change.segment, change.control_id)
        return _replace_segment(profile, change.unit, change.segment, new_segment), config, inverse

    if isinstance(change, RemoveControl):
        existing = next(
            (c for c in segment.implemented_controls if c.control_id == change.control_id),
            None,
        )
        if existing is None:
            raise QberError(
                UNKNOWN_ENTITY,
                f"control {change.control_id!r} not implemented in segment {change.segment!r}",
            )
        new_segment = dataclasses.replace(segment, implemented_controls=tuple(
            c for c in segment.implemented_controls if c.control_id != change.control_id
        ))
        inverse = AddControl(change.unit, change.segment, change.control_id, existing.maturity)
        return _replace_segment(profile, change.unit, change.segment, new_segment), config, inverse

    if isinstance(change, SetMaturity):
        existing = next(
            (c for c in segment.implemented_controls if c.control_id == change.control_id),
            None,
        )
        if existing is None:
            raise QberError(
                UNKNOWN_ENTITY,
                f"control {change.control_id!r} not implemented in segment {change.segment!r}",
            )
        new_segment = dataclasses.replace(segment, implemented_controls=tuple(
            ControlImplementation(c.control_id, change.maturity)
            if c.control_id == change.control_id else c
            for c in segment.implemented_controls
        ))
        inverse = SetMaturity(change.unit, change.segment, change.control_id, existing.maturity)
        return _replace_segment(profile, change.unit, change.segment, new_segment), config, inverse

    if isinstance(change, SetThreatRating):
        existing_te = next(
            (t for t in segment.threat_exposures if t.threat_id == change.threat_id),
            None,
        )
        if existing_te is None:
            raise QberError(
                UNKNOWN_ENTITY,
                f"threat {change.threat_id!r} not present in segment {change.segment!r}",
            )
        updated = ThreatExposure(
            threat_id=existing_te.threat_id,
            risk_weight=(
                change.risk_weight if change.risk_weight is not None
                else existing_te.risk_weight
            ),
            operational=change.operational or existing_te.operational,
            financial=change.financial or existing_te.financial,
        )
        new_segment = dataclasses.replace(segment, threat_exposures=tuple(
            updated if t.threat_id == change.threat_id else t
            for t in segment.threat_exposures
        ))
        inverse = SetThreatRating(
            change.unit, change.segment, change.threat_id,
            operational=existing_te.operational if change.operational else None,
            financial=existing_te.financial if change.financial else None,
            risk_weight=existing_te.risk_weight if change.risk_weight is not None else None,
        )
        return _replace_segment(profile, change.unit, change.segment, new_segment), config, inverse

    raise QberError(UNKNOWN_ENTITY, f"unsupported change type {type(change).__name__}")


def apply_delta(
    delta: WhatIfDelta,
    profile: BusinessProfile,
    config: EngineConfig,
    catalog: Catalog,
) -> tuple[BusinessProfile, EngineConfig]:
    profile_out, config_out, _ = apply_delta_with_inverse(delta, profile, config, catalog)
    return profile_out, config_out


def apply_delta_with_inverse(
    delta: WhatIfDelta,
    profile: BusinessProfile,
    config: EngineConfig,
    catalog: Catalog,
) -> tuple[BusinessProfile, EngineConfig, WhatIfDelta]:
    """Apply all changes in order; the returned delta undoes them exactly."""
    inverses: list[Change] = []
    for change in delta.changes:
        profile, config, inverse = _apply_change(change, profile, config, catalog)
        inverses.append(inverse)
    return profile, config, WhatIfDelta(changes=tuple(reversed(inverses)))


def whatif(
    base: AssessmentReport,
    delta: WhatIfDelta,
    catalog: Catalog,
) -> AssessmentReport:
    """Re-run the pipeline on a modified snapshot of the base report.

    The catalog must be the exact one the base report was computed with;
    anything else would make before/after numbers incomparable.
    """
    digest = catalog_hash(catalog)
    if base.catalog_version != catalog.version or base.catalog_digest != digest:
        raise QberError(
            STALE_CATALOG,
            "catalog does not match the one the base report was computed with",
            details=[{
                "report_catalog_version": base.catalog_version,
                "current_catalog_version": catalog.version,
            }],
        )
    profile = profile_from_json(base.profile_snapshot)
    new_profile, new_config = apply_delta(delta, profile, base.config, catalog)
    report = assess(new_profile, catalog, new_config)
    return dataclasses.replace(report, base_id=base.id)


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

def _impact_to_json(impacts: CombinedImpact) -> dict:
    return {
        "value": impacts.value,
        "operational": impacts.operational,
        "financial": impacts.financial,
    }


def _candidate_to_json(candidate: ControlCandidate) -> dict:
    return {
        "unit": candidate.unit,
        "segment": candidate.segment,
        "control_id": candidate.control_id,
        "control_name": candidate.control_name,
        "implemented": candidate.implemented,
        "current_maturity": (
            candidate.current_maturity.value if candidate.current_maturity else None
        ),
        "target_maturity": candidate.target_maturity.value,
        "annualized_cost": candidate.annualized_cost.to_json(),
        "cost_rate": candidate.cost_rate,
        "actual_efficacy": candidate.actual_efficacy,
        "efficacy_bucket": efficacy_bucket(candidate.actual_efficacy).value,
        "z_rosi": candidate.z_rosi,
    }


def _candidate_from_json(doc: dict) -> ControlCandidate:
    current = doc.get("current_maturity")
    return ControlCandidate(
        unit=doc["unit"],
        segment=doc["segment"],
        control_id=doc["control_id"],
        control_name=doc["control_name"],
        implemented=bool(doc["implemented"]),
        current_maturity=MaturityLevel.from_str(current) if current else None,
        target_maturity=MaturityLevel.from_str(doc["target_maturity"]),
        annualized_cost=Money.from_json(doc["annualized_cost"]),
        cost_rate=float(doc["cost_rate"]),
        actual_efficacy=float(doc["actual_efficacy"]),
        z_rosi=float(doc["z_rosi"]),
    )


def _posture_from_json(doc: dict) -> CiaPosture:
    return CiaPosture(
        confidentiality=float(doc["confidentiality"]),
        integrity=float(doc["integrity"]),
        availability=float(doc["availability"]),
    )


def report_to_json(report: AssessmentReport) -> dict:
    return {
        "id": report.id,
        "created_at": report.created_at,
        "base_id": report.base_id,
        "catalog_version": report.catalog_version,
        "catalog_digest": report.catalog_digest,
        "profile_digest": report.profile_digest,
        "profile_snapshot": report.profile_snapshot,
        "config": report.config.to_json(),
        "segments": [
            {
                "unit": s.unit,
                "segment": s.segment,
                "seg_revenue": s.seg_revenue.to_json(),
                "posture": s.posture.to_json(),
                "exposure": s.exposure,
                "ale": s.ale.to_json(),
                "threats": [
                    {
                        "threat_id": row.threat_id,
                        "impacts": _impact_to_json(row.impacts),
                        "risk_fraction": row.risk_fraction,
                        "seg_impact": row.seg_impact.to_json(),
                        "seg_risk": row.seg_risk.to_json(),
                    }
                    for row in s.threat_rows
                ],
            }
            for s in report.segments
        ],
        "company_posture": report.company_posture.to_json(),
        "economic_risk": {
            "value": report.economic_risk.value,
            "factor_mean": report.economic_risk.factor_mean,
            "cia_mean": report.economic_risk.cia_mean,
        },
        "domain_ranking": [
            {
                "domain_id": p.domain_id,
                "score": p.score,
                "contributions": [
                    {"threat_id": t, "contribution": v} for t, v in p.contributions
                ],
            }
            for p in report.domain_ranking
        ],
        "recommendation": {
            "budget": (
                report.recommendation.budget.to_json()
                if report.recommendation.budget else None
            ),
            "chosen": [_candidate_to_json(c) for c in report.recommendation.chosen],
            "total_cost": report.recommendation.total_cost.to_json(),
            "residual_risk_estimate": report.recommendation.residual_risk_estimate.to_json(),
        },
        "candidates": [_candidate_to_json(c) for c in report.candidates],
        "simulation": report.simulation_summary,
    }


def report_from_json(doc: dict) -> AssessmentReport:
    segments = []
    for sdoc in doc["segments"]:
        rows = tuple(
            ThreatRow(
                threat_id=r["threat_id"],
                impacts=CombinedImpact(
                    value=float(r["impacts"]["value"]),
                    operational=float(r["impacts"]["operational"]),
                    financial=float(r["impacts"]["financial"]),
                ),
                risk_fraction=float(r["risk_fraction"]),
                seg_impact=Money.from_json(r["seg_impact"]),
                seg_risk=Money.from_json(r["seg_risk"]),
            )
            for r in sdoc["threats"]
        )
        segments.append(SegmentAssessment(
            unit=sdoc["unit"],
            segment=sdoc["segment"],
            seg_revenue=Money.from_json(sdoc["seg_revenue"]),
            threat_rows=rows,
            posture=_posture_from_json(sdoc["posture"]),
            exposure=float(sdoc["exposure"]),
            ale=Money.from_json(sdoc["ale"]),
        ))

    rec = doc["recommendation"]
    budget = rec.get("budget")
    plan = RecommendationPlan(
        budget=Money.from_json(budget) if budget else None,
        chosen=tuple(_candidate_from_json(c) for c in rec["chosen"]),
        total_cost=Money.from_json(rec["total_cost"]),
        residual_risk_estimate=Money.from_json(rec["residual_risk_estimate"]),
    )
    econ = doc["economic_risk"]
    return AssessmentReport(
        id=doc["id"],
        created_at=doc["created_at"],
        base_id=doc.get("base_id"),
        catalog_version=doc["catalog_version"],
        catalog_digest=doc["catalog_digest"],
        profile_digest=doc["profile_digest"],
        profile_snapshot=doc["profile_snapshot"],
        config=EngineConfig.from_json(doc["config"]),
        segments=tuple(segments),
        company_posture=_posture_from_json(doc["company_posture"]),
        economic_risk=EconomicRiskScore(
            value=float(econ["value"]),
            factor_mean=float(econ["factor_mean"]),
            cia_mean=float(econ["cia_mean"]),
        ),
        domain_ranking=tuple(
            DomainPriority(
                domain_id=p["domain_id"],
                score=float(p["score"]),
                contributions=tuple(
                    (c["threat_id"], float(c["contribution"]))
                    for c in p["contributions"]
                ),
            )
            for p in doc["domain_ranking"]
        ),
        recommendation=plan,
        candidates=tuple(_candidate_from_json(c) for c in doc["candidates"]),
        simulation_summary=doc.get("simulation"),
    )


def report_body_bytes(report: AssessmentReport) -> bytes:
    """Canonical bytes of the report content, identity fields excluded.

    Two runs over the same inputs produce identical bodies even though
    their ids and timestamps differ.
    """
    body = report_to_json(report)
    for key in ("id", "created_at", "base_id"):
        body.pop(key, None)
    return canonical_json_bytes(body)
