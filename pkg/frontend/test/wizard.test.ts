import { describe, expect, it, vi } from 'vitest';
import { ApiClient } from '../src/api.js';
import {
  WIZARD_STEPS,
  emptyDraft,
  toProfileDocument,
  validateDraft,
  validateStep,
} from '../src/wizard.js';
import { workedDraft } from './helpers.js';

describe('wizard steps', () => {
  it('covers size, market, structure, shares, controls in order', () => {
    expect(WIZARD_STEPS.map((s) => s.id)).toEqual([
      'size',
      'market',
      'structure',
      'shares',
      'controls',
    ]);
  });

  it('a complete draft validates clean', () => {
    expect(validateDraft(workedDraft())).toEqual([]);
  });

  it('empty draft fails the first step with REQUIRED codes', () => {
    const issues = validateStep(emptyDraft(), 'size');
    expect(issues.map((i) => i.code)).toContain('REQUIRED');
  });
});

describe('share validation', () => {
  it('unit shares summing past 1 raise SHARE_SUM_EXCEEDED before submission', () => {
    const draft = workedDraft();
    draft.units.push({
      name: 'Branch',
      revenueShare: '0.2',
      segments: [{ name: 'Tellers', revenueShare: '0.5', controls: [], threats: [] }],
    });
    const first = draft.units[0];
    if (first) first.revenueShare = '1.0'; // 1.0 + 0.2 = 1.2
    const issues = validateStep(draft, 'shares');
    expect(issues.some((i) => i.code === 'SHARE_SUM_EXCEEDED' && i.path === 'units')).toBe(true);
  });

  it('segment shares within a unit are checked the same way', () => {
    const draft = workedDraft();
    draft.units[0]?.segments.push({
      name: 'Support',
      revenueShare: '0.7', // 0.6 + 0.7 = 1.3
      controls: [],
      threats: [],
    });
    const issues = validateStep(draft, 'shares');
    expect(issues.some((i) => i.code === 'SHARE_SUM_EXCEEDED' && i.path.endsWith('.segments'))).toBe(true);
  });

  it('a share outside 0..1 is OUT_OF_RANGE', () => {
    const draft = workedDraft();
    const first = draft.units[0];
    if (first) first.revenueShare = '1.5';
    const issues = validateStep(draft, 'shares');
    expect(issues.some((i) => i.code === 'OUT_OF_RANGE')).toBe(true);
  });
});

describe('draft to document', () => {
  it('produces the versioned wire shape with parsed numbers', () => {
    const doc = toProfileDocument(workedDraft());
    expect(doc.schema_version).toBe('1.0.0');
    expect(doc.yearly_revenue).toEqual({ amount: 10_000_000, currency: 'USD' });
    expect(doc.employee_count).toBe(500);
    expect(doc.units[0]?.revenue_share).toBe(1.0);
    expect(doc.units[0]?.segments[0]?.revenue_share).toBe(0.6);
    expect(doc.units[0]?.segments[0]?.implemented_controls).toEqual([
      { control_id: 'CTL-AWARENESS', maturity: 'optimized' },
      { control_id: 'CTL-MFA', maturity: 'initial' },
    ]);
    expect(doc.units[0]?.segments[0]?.threat_exposures).toEqual([
      { threat_id: 'THR-PHISHING', risk_weight: 5, operational: 'high', financial: 'high' },
    ]);
  });

  it('abandoning a draft never touches the network', () => {
    const fetchSpy = vi.fn();
    new ApiClient('http://example.invalid', fetchSpy);

    const draft = workedDraft();
    for (const step of WIZARD_STEPS) {
      validateStep(draft, step.id);
    }
    toProfileDocument(draft);
    // draft discarded here; the client was never asked to send anything
    expect(fetchSpy).not.toHaveBeenCalled();
  });
});
