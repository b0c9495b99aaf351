import { describe, expect, it } from 'vitest';
import { formatMoney, formatMoneyShort, parseAmount } from '../src/money.js';

describe('formatMoney', () => {
  it('renders currency code with thousands separators', () => {
    expect(formatMoney({ amount: 6_000_000, currency: 'USD' })).toBe('USD 6,000,000.00');
    expect(formatMoney({ amount: 1228800, currency: 'EUR' })).toBe('EUR 1,228,800.00');
  });

  it('always shows two decimal places', () => {
    expect(formatMoney({ amount: 0, currency: 'USD' })).toBe('USD 0.00');
    expect(formatMoney({ amount: 12.5, currency: 'USD' })).toBe('USD 12.50');
  });
});

describe('formatMoneyShort', () => {
  it('scales to k/M/B', () => {
    expect(formatMoneyShort({ amount: 1_200_000, currency: 'USD' })).toBe('USD 1.2M');
    expect(formatMoneyShort({ amount: 250_000, currency: 'USD' })).toBe('USD 250k');
    expect(formatMoneyShort({ amount: 3_000_000_000, currency: 'USD' })).toBe('USD 3B');
  });
});

describe('parseAmount', () => {
  it('accepts separators and whitespace', () => {
    expect(parseAmount('10,000,000')).toBe(10_000_000);
    expect(parseAmount(' 250000 ')).toBe(250_000);
    expect(parseAmount('0.6')).toBe(0.6);
  });

  it('rejects junk and negatives', () => {
    expect(parseAmount('')).toBeNull();
    expect(parseAmount('ten')).toBeNull();
    expect(parseAmount('-5')).toBeNull();
    expect(parseAmount('1..2')).toBeNull();
  });
});
