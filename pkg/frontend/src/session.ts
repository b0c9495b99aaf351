/**
 * What-if session over one base assessment. Toggles accumulate into a
 * pending change set keyed by toggle identity, so toggling the same thing
 * twice leaves the set (and therefore the rendered view) exactly where it
 * started. Every refresh sends the full pending set against the base
 * report; responses racing each other are serialized by a sequence gate so
 * a slow old response can never overwrite a newer one.
 */

import { ApiClient } from './api.js';
import { createRequestGate, type RequestGate } from './gate.js';
import { buildView, type ConsoleView } from './view.js';
import type { ChangeDoc, DeltaDoc, ReportDoc } from './types.js';

export interface RefreshOutcome {
  status: 'applied' | 'stale' | 'error';
  latencyMs: number;
  error?: unknown;
}

export class ConsoleSession {
  readonly baseReport: ReportDoc;
  private readonly api: ApiClient;
  private readonly gate: RequestGate = createRequestGate();
  private readonly pending = new Map<string, ChangeDoc>();
  private budgetAmount: number | null = null;
  private currentReport: ReportDoc;
  private currentView: ConsoleView;
  private lastLatency: number | null = null;

  constructor(api: ApiClient, baseReport: ReportDoc) {
    this.api = api;
    this.baseReport = baseReport;
    this.currentReport = baseReport;
    this.currentView = buildView(baseReport);
  }

  get view(): ConsoleView {
    return this.currentView;
  }

  get report(): ReportDoc {
    return this.currentReport;
  }

  get latencyMs(): number | null {
    return this.lastLatency;
  }

  get pendingCount(): number {
    return this.pending.size + (this.budgetAmount === null ? 0 : 1);
  }

  isActive(key: string): boolean {
    return this.pending.has(key);
  }

  /** Returns true when the toggle is now on, false when it switched off. */
  toggle(key: string, change: ChangeDoc): boolean {
    if (this.pending.has(key)) {
      this.pending.delete(key);
      return false;
    }
    this.pending.set(key, change);
    return true;
  }

  /** Budget slider position; null reverts to the base report's budget. */
  setBudget(amount: number | null): void {
    this.budgetAmount = amount;
  }

  private currency(): string {
    return this.baseReport.profile_snapshot.yearly_revenue.currency;
  }

  buildDelta(): DeltaDoc {
    const changes: ChangeDoc[] = [...this.pending.values()];
    if (this.budgetAmount !== null) {
      changes.push({
        op: 'set_budget',
        budget: { amount: this.budgetAmount, currency: this.currency() },
      });
    }
    return { changes };
  }

  /**
   * Re-run the what-if with the current pending set. A response is applied
   * only if no newer refresh was started while it was in flight.
   */
  async refresh(): Promise<RefreshOutcome> {
    const token = this.gate.next();
    const startedAt = Date.now();
    try {
      const { report } = await this.api.whatif(this.baseReport.id, this.buildDelta());
      const latencyMs = Date.now() - startedAt;
      if (!this.gate.isLatest(token)) {
        return { status: 'stale', latencyMs };
      }
      this.currentReport = report;
      this.currentView = buildView(report);
      this.lastLatency = latencyMs;
      return { status: 'applied', latencyMs };
    } catch (error) {
      const latencyMs = Date.now() - startedAt;
      if (!this.gate.isLatest(token)) {
        return { status: 'stale', latencyMs };
      }
      return { status: 'error', latencyMs, error };
    }
  }
}
