import type { WizardDraft } from '../src/wizard.js';

/** The $10M bank with a 60%-of-revenue sales platform segment. */
export function workedDraft(): WizardDraft {
  return {
    companyName: 'Worked Example Bank',
    employeeCount: '500',
    yearlyRevenue: '10,000,000',
    currency: 'USD',
    sector: 'BFSI',
    country: 'India',
    listedCompany: null,
    units: [
      {
        name: 'Digital',
        revenueShare: '1.0',
        segments: [
          {
            name: 'Sales Platform',
            revenueShare: '0.6',
            controls: [
              { controlId: 'CTL-AWARENESS', maturity: 'optimized' },
              { controlId: 'CTL-MFA', maturity: 'initial' },
            ],
            threats: [
              { threatId: 'THR-PHISHING', riskWeight: '5', operational: 'high', financial: 'high' },
            ],
          },
        ],
      },
    ],
  };
}
