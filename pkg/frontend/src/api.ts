import type {
  CatalogDoc,
  DeltaDoc,
  ErrorEnvelope,
  ProfileDoc,
  ReportDoc,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx responses are surfaced with the server's envelope fields intact. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: unknown[];

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message);
    this.name = 'ApiError';
    this.status = status;
    this.code = envelope.code;
    this.details = envelope.details ?? [];
  }
}

export interface StoredProfile {
  id: string;
  version: number;
  profile: ProfileDoc;
}

export interface AssessmentResponse {
  id: string;
  report: ReportDoc;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    // default must go through globalThis so the browser keeps its receiver
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let envelope: ErrorEnvelope;
      try {
        envelope = (await response.json()) as ErrorEnvelope;
      } catch {
        envelope = { code: 'INTERNAL', message: `HTTP ${response.status}`, details: [] };
      }
      throw new ApiError(response.status, envelope);
    }
    return (await response.json()) as T;
  }

  getCatalog(): Promise<CatalogDoc> {
    return this.request('GET', '/v1/catalog');
  }

  createProfile(profile: ProfileDoc): Promise<{ id: string; version: number }> {
    return this.request('POST', '/v1/profiles', profile);
  }

  updateProfile(
    profile: ProfileDoc,
    id: string,
    baseVersion: number,
  ): Promise<{ id: string; version: number }> {
    return this.request('POST', '/v1/profiles', { profile, id, base_version: baseVersion });
  }

  getProfile(id: string): Promise<StoredProfile> {
    return this.request('GET', `/v1/profiles/${encodeURIComponent(id)}`);
  }

  createAssessment(
    profileId: string,
    config?: Record<string, unknown>,
  ): Promise<AssessmentResponse> {
    return this.request('POST', '/v1/assessments', { profile_id: profileId, config });
  }

  getAssessment(id: string): Promise<{ id: string; version: number; report: ReportDoc }> {
    return this.request('GET', `/v1/assessments/${encodeURIComponent(id)}`);
  }

  whatif(reportId: string, delta: DeltaDoc): Promise<AssessmentResponse> {
    return this.request('POST', `/v1/assessments/${encodeURIComponent(reportId)}/whatif`, {
      delta,
    });
  }

  simulate(reportId: string, config: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.request('POST', `/v1/assessments/${encodeURIComponent(reportId)}/simulate`, config);
  }

  async reportCsv(reportId: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/v1/assessments/${encodeURIComponent(reportId)}/report.csv`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, {
        code: 'INTERNAL',
        message: `HTTP ${response.status}`,
        details: [],
      });
    }
    return response.text();
  }
}
