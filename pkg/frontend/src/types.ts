/**
 * Wire types for the v1 risk API. These mirror the server's JSON documents
 * exactly; the console never derives or recomputes any score from them.
 */

export interface MoneyDoc {
  amount: number;
  currency: string;
}

export interface PostureDoc {
  confidentiality: number;
  integrity: number;
  availability: number;
}

// ---- profile documents ----

export interface ControlImplementationDoc {
  control_id: string;
  maturity: string;
}

export interface ThreatExposureDoc {
  threat_id: string;
  risk_weight: number;
  operational: string;
  financial: string;
}

export interface SegmentDoc {
  name: string;
  revenue_share: number;
  implemented_controls: ControlImplementationDoc[];
  threat_exposures: ThreatExposureDoc[];
}

export interface BusinessUnitDoc {
  name: string;
  revenue_share: number;
  regulations: string[];
  segments: SegmentDoc[];
}

export interface ProfileDoc {
  schema_version: string;
  name: string;
  sector: string;
  country: string;
  yearly_revenue: MoneyDoc;
  employee_count: number;
  units: BusinessUnitDoc[];
  listed_company: boolean | null;
}

// ---- catalog documents (read-only on this side) ----

export interface CatalogControlDoc {
  id: string;
  name: string;
  capex: MoneyDoc;
  opex_annual: MoneyDoc;
  base_efficacy: Record<string, number>;
  cia_contribution: PostureDoc;
  domains: string[];
}

export interface CatalogDoc {
  schema_version: string;
  catalog_version: string;
  threats: { id: string; name: string; taxonomy_ref?: string | null }[];
  domains: { id: string; name: string }[];
  controls: CatalogControlDoc[];
  maturity_multipliers?: Record<string, number>;
}

// ---- assessment report documents ----

export interface ThreatRowDoc {
  threat_id: string;
  impacts: { value: number; operational: number; financial: number };
  risk_fraction: number;
  seg_impact: MoneyDoc;
  seg_risk: MoneyDoc;
}

export interface SegmentReportDoc {
  unit: string;
  segment: string;
  seg_revenue: MoneyDoc;
  posture: PostureDoc;
  exposure: number;
  ale: MoneyDoc;
  threats: ThreatRowDoc[];
}

export interface CandidateDoc {
  unit: string;
  segment: string;
  control_id: string;
  control_name: string;
  implemented: boolean;
  current_maturity: string;
  target_maturity: string;
  annualized_cost: MoneyDoc;
  cost_rate: number;
  actual_efficacy: number;
  efficacy_bucket: string;
  z_rosi: number;
}

export interface RecommendationDoc {
  budget: MoneyDoc | null;
  chosen: CandidateDoc[];
  total_cost: MoneyDoc;
  residual_risk_estimate: MoneyDoc;
}

export interface DomainRankDoc {
  domain_id: string;
  score: number;
  contributions: { threat_id: string; contribution: number }[];
}

export interface ReportDoc {
  id: string;
  created_at: string;
  base_id: string | null;
  catalog_version: string;
  catalog_digest: string;
  profile_digest: string;
  profile_snapshot: ProfileDoc;
  config: Record<string, unknown>;
  segments: SegmentReportDoc[];
  company_posture: PostureDoc;
  economic_risk: { value: number; factor_mean: number; cia_mean: number };
  domain_ranking: DomainRankDoc[];
  recommendation: RecommendationDoc;
  candidates: CandidateDoc[];
  simulation: Record<string, unknown> | null;
}

// ---- what-if change documents ----

export type ChangeDoc =
  | { op: 'add_control'; unit: string; segment: string; control_id: string; maturity: string }
  | { op: 'remove_control'; unit: string; segment: string; control_id: string }
  | { op: 'set_maturity'; unit: string; segment: string; control_id: string; maturity: string }
  | { op: 'set_budget'; budget: MoneyDoc | null }
  | {
      op: 'set_threat_rating';
      unit: string;
      segment: string;
      threat_id: string;
      risk_weight: number;
      operational: string;
      financial: string;
    };

export interface DeltaDoc {
  changes: ChangeDoc[];
}

// ---- error envelope ----

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: unknown[];
}
