import type { MoneyDoc } from './types.js';

const formatter = new Intl.NumberFormat('en-US', {
  minimumFractionDigits: 2,
  maximumFractionDigits: 2,
});

/** "USD 6,000,000.00" -- currency code up front, thousands separators. */
export function formatMoney(money: MoneyDoc): string {
  return `${money.currency} ${formatter.format(money.amount)}`;
}

/** Compact axis label: "USD 1.2M" style, for bars and sliders. */
export function formatMoneyShort(money: MoneyDoc): string {
  const abs = Math.abs(money.amount);
  let scaled = money.amount;
  let suffix = '';
  if (abs >= 1e9) {
    scaled = money.amount / 1e9;
    suffix = 'B';
  } else if (abs >= 1e6) {
    scaled = money.amount / 1e6;
    suffix = 'M';
  } else if (abs >= 1e3) {
    scaled = money.amount / 1e3;
    suffix = 'k';
  }
  const digits = Number.isInteger(scaled) ? 0 : 1;
  return `${money.currency} ${scaled.toFixed(digits)}${suffix}`;
}

/**
 * Parse a user-entered amount ("10,000,000", "10000000.5", " 250000 ").
 * Returns null when the input is not a non-negative finite number.
 */
export function parseAmount(raw: string): number | null {
  const cleaned = raw.trim().replace(/[,_\s]/g, '');
  if (cleaned === '' || !/^\d+(\.\d+)?$/.test(cleaned)) {
    return null;
  }
  const value = Number(cleaned);
  return Number.isFinite(value) ? value : null;
}
