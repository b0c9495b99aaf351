"""Cyber risk quantification engine.

Turns a business profile (units, segments, revenue shares, threats,
implemented controls) plus a security catalog into monetary risk figures:
per-segment impact and risk, exposure, annual loss expectancy, simulated
loss quantiles, and a return-ranked control recommendation plan.
"""

from .assessment import (
    AddControl,
    AssessmentReport,
    EngineConfig,
    RemoveControl,
    SetBudget,
    SetMaturity,
    SetThreatRating,
    WhatIfDelta,
    apply_delta,
    apply_delta_with_inverse,
    assess,
    catalog_hash,
    content_hash,
    report_body_bytes,
    report_from_json,
    report_to_json,
    whatif,
)
from .catalog import (
    Catalog,
    ControlDef,
    SecurityDomain,
    Threat,
    catalog_to_json,
    load_catalog,
    load_catalog_path,
    load_default_catalog,
    maturity_multiplier,
    rcvar_factors,
    threat_domain_weight,
)
from .cost import (
    ControlCandidate,
    RecommendationPlan,
    SegmentAssessment,
    ThreatRow,
    ale,
    annualized_control_cost,
    build_candidates,
    control_efficacy,
    efficacy_bucket,
    exposure,
    recommend,
    segment_impact,
    segment_revenue,
    segment_risk,
    z_rosi,
)
from .errors import QberError
from .model import (
    BusinessProfile,
    BusinessUnit,
    CiaPosture,
    ControlImplementation,
    MaturityLevel,
    Money,
    Rating,
    RatingMapping,
    Segment,
    ThreatExposure,
    load_profile,
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
from .simulation import (
    LossDistribution,
    SimulationConfig,
    cvar,
    losses_to_csv,
    simulate_losses,
    summary_json,
    value_at_risk,
)
from .store import FileDocumentStore

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
