/**
 * Guided profile entry. The wizard is a pure draft editor: it holds strings
 * as typed by the user, validates them inline with the same codes the server
 * reports, and only on explicit submission is the finished document sent
 * anywhere. Abandoning a draft therefore never touches the API.
 */

import { parseAmount } from './money.js';
import type { CatalogDoc, ProfileDoc } from './types.js';

export interface DraftControl {
  controlId: string;
  maturity: string;
}

export interface DraftThreat {
  threatId: string;
  riskWeight: string;
  operational: string;
  financial: string;
}

export interface DraftSegment {
  name: string;
  revenueShare: string;
  controls: DraftControl[];
  threats: DraftThreat[];
}

export interface DraftUnit {
  name: string;
  revenueShare: string;
  segments: DraftSegment[];
}

export interface WizardDraft {
  companyName: string;
  employeeCount: string;
  yearlyRevenue: string;
  currency: string;
  sector: string;
  country: string;
  listedCompany: boolean | null;
  units: DraftUnit[];
}

export interface WizardIssue {
  path: string;
  code: string;
  message: string;
}

export type StepId = 'size' | 'market' | 'structure' | 'shares' | 'controls';

export interface WizardStep {
  id: StepId;
  title: string;
  description: string;
}

export const WIZARD_STEPS: WizardStep[] = [
  {
    id: 'size',
    title: 'Business size',
    description: 'Company name, yearly revenue, and headcount.',
  },
  {
    id: 'market',
    title: 'Sector and country',
    description: 'Where the company operates; drives the consequence factors.',
  },
  {
    id: 'structure',
    title: 'Units and segments',
    description: 'Business units and the revenue-bearing segments inside them.',
  },
  {
    id: 'shares',
    title: 'Revenue shares',
    description: 'What fraction of revenue each unit and segment carries.',
  },
  {
    id: 'controls',
    title: 'Controls and threats',
    description: 'Implemented controls with maturity, and threat exposure ratings.',
  },
];

export function emptyDraft(): WizardDraft {
  return {
    companyName: '',
    employeeCount: '',
    yearlyRevenue: '',
    currency: 'USD',
    sector: '',
    country: '',
    listedCompany: null,
    units: [],
  };
}

export const MATURITY_LEVELS = [
  'not_implemented',
  'initial',
  'repeatable',
  'defined',
  'managed',
  'optimized',
];

export const RATINGS = ['low', 'medium', 'high'];

const issue = (path: string, code: string, message: string): WizardIssue => ({
  path,
  code,
  message,
});

function shareIssues(raw: string, path: string, out: WizardIssue[]): number | null {
  const value = parseAmount(raw);
  if (value === null) {
    out.push(issue(path, 'REQUIRED', 'enter a share between 0 and 1'));
    return null;
  }
  if (value < 0 || value > 1) {
    out.push(issue(path, 'OUT_OF_RANGE', `share ${value} outside 0..1`));
    return null;
  }
  return value;
}

/** Inline checks for one step. Codes match the server's validation report. */
export function validateStep(draft: WizardDraft, step: StepId, catalog?: CatalogDoc): WizardIssue[] {
  const issues: WizardIssue[] = [];

  if (step === 'size') {
    if (draft.companyName.trim() === '') {
      issues.push(issue('name', 'REQUIRED', 'company name is required'));
    }
    const revenue = parseAmount(draft.yearlyRevenue);
    if (revenue === null) {
      issues.push(issue('yearly_revenue', 'NEGATIVE_REVENUE', 'enter a non-negative amount'));
    }
    const employees = parseAmount(draft.employeeCount);
    if (employees === null || !Number.isInteger(employees) || employees < 1) {
      issues.push(issue('employee_count', 'OUT_OF_RANGE', 'employee count must be a whole number of at least 1'));
    }
  }

  if (step === 'market') {
    if (draft.sector.trim() === '') {
      issues.push(issue('sector', 'REQUIRED', 'sector is required'));
    }
    if (draft.country.trim() === '') {
      issues.push(issue('country', 'REQUIRED', 'country is required'));
    }
  }

  if (step === 'structure') {
    if (draft.units.length === 0) {
      issues.push(issue('units', 'REQUIRED', 'add at least one business unit'));
    }
    draft.units.forEach((unit, ui) => {
      if (unit.name.trim() === '') {
        issues.push(issue(`units[${ui}].name`, 'REQUIRED', 'unit name is required'));
      }
      if (unit.segments.length === 0) {
        issues.push(issue(`units[${ui}]`, 'EMPTY_UNIT', `unit ${unit.name || ui} has no segments`));
      }
      unit.segments.forEach((segment, si) => {
        if (segment.name.trim() === '') {
          issues.push(issue(`units[${ui}].segments[${si}].name`, 'REQUIRED', 'segment name is required'));
        }
      });
    });
  }

  if (step === 'shares') {
    let unitSum = 0;
    let unitSumComplete = true;
    draft.units.forEach((unit, ui) => {
      const share = shareIssues(unit.revenueShare, `units[${ui}].revenue_share`, issues);
      if (share === null) {
        unitSumComplete = false;
      } else {
        unitSum += share;
      }

      let segSum = 0;
      let segSumComplete = true;
      unit.segments.forEach((segment, si) => {
        const segShare = shareIssues(
          segment.revenueShare,
          `units[${ui}].segments[${si}].revenue_share`,
          issues,
        );
        if (segShare === null) {
          segSumComplete = false;
        } else {
          segSum += segShare;
        }
      });
      if (segSumComplete && segSum > 1 + 1e-9) {
        issues.push(issue(
          `units[${ui}].segments`,
          'SHARE_SUM_EXCEEDED',
          `segment shares in ${unit.name || `unit ${ui}`} sum to ${segSum.toFixed(4)} > 1`,
        ));
      }
    });
    if (unitSumComplete && unitSum > 1 + 1e-9) {
      issues.push(issue('units', 'SHARE_SUM_EXCEEDED', `unit shares sum to ${unitSum.toFixed(4)} > 1`));
    }
  }

  if (step === 'controls') {
    const knownControls = catalog ? new Set(catalog.controls.map((c) => c.id)) : null;
    const knownThreats = catalog ? new Set(catalog.threats.map((t) => t.id)) : null;
    draft.units.forEach((unit, ui) => {
      unit.segments.forEach((segment, si) => {
        const spath = `units[${ui}].segments[${si}]`;
        const seenControls = new Set<string>();
        segment.controls.forEach((control) => {
          if (seenControls.has(control.controlId)) {
            issues.push(issue(`${spath}.implemented_controls`, 'VALIDATION_FAILED',
              `control ${control.controlId} listed twice`));
          }
          seenControls.add(control.controlId);
          if (knownControls && !knownControls.has(control.controlId)) {
            issues.push(issue(`${spath}.implemented_controls`, 'UNKNOWN_CONTROL',
              `control ${control.controlId} not in catalog`));
          }
          if (!MATURITY_LEVELS.includes(control.maturity)) {
            issues.push(issue(`${spath}.implemented_controls`, 'OUT_OF_RANGE',
              `unknown maturity ${control.maturity}`));
          }
        });
        segment.threats.forEach((threat, ti) => {
          const tpath = `${spath}.threat_exposures[${ti}]`;
          if (knownThreats && !knownThreats.has(threat.threatId)) {
            issues.push(issue(tpath, 'UNKNOWN_THREAT', `threat ${threat.threatId} not in catalog`));
          }
          const weight = parseAmount(threat.riskWeight);
          if (weight === null || weight < 0 || weight > 10) {
            issues.push(issue(`${tpath}.risk_weight`, 'OUT_OF_RANGE', 'risk weight must be within 0..10'));
          }
          if (!RATINGS.includes(threat.operational)) {
            issues.push(issue(`${tpath}.operational`, 'OUT_OF_RANGE', `unknown rating ${threat.operational}`));
          }
          if (!RATINGS.includes(threat.financial)) {
            issues.push(issue(`${tpath}.financial`, 'OUT_OF_RANGE', `unknown rating ${threat.financial}`));
          }
        });
      });
    });
  }

  return issues;
}

export function validateDraft(draft: WizardDraft, catalog?: CatalogDoc): WizardIssue[] {
  return WIZARD_STEPS.flatMap((step) => validateStep(draft, step.id, catalog));
}

/**
 * Assemble the submission document. Call only after validateDraft is clean;
 * unparsable numbers fall back to 0 rather than throwing mid-submit.
 */
export function toProfileDocument(draft: WizardDraft): ProfileDoc {
  return {
    schema_version: '1.0.0',
    name: draft.companyName.trim(),
    sector: draft.sector.trim(),
    country: draft.country.trim(),
    yearly_revenue: {
      amount: parseAmount(draft.yearlyRevenue) ?? 0,
      currency: draft.currency,
    },
    employee_count: parseAmount(draft.employeeCount) ?? 0,
    units: draft.units.map((unit) => ({
      name: unit.name.trim(),
      revenue_share: parseAmount(unit.revenueShare) ?? 0,
      regulations: [],
      segments: unit.segments.map((segment) => ({
        name: segment.name.trim(),
        revenue_share: parseAmount(segment.revenueShare) ?? 0,
        implemented_controls: segment.controls.map((control) => ({
          control_id: control.controlId,
          maturity: control.maturity,
        })),
        threat_exposures: segment.threats.map((threat) => ({
          threat_id: threat.threatId,
          risk_weight: parseAmount(threat.riskWeight) ?? 0,
          operational: threat.operational,
          financial: threat.financial,
        })),
      })),
    })),
    listed_company: draft.listedCompany,
  };
}
