// Typed client for the design service. All statistics shown anywhere in the
// UI originate from responses returned here; the client never computes any.

import type {
  AnalysisReport,
  CalibrationResult,
  ConfigSpec,
  Curve,
  Job,
  ScenarioSpec,
  SettingsSpec,
  SimulationRequest,
  TrialDataSpec,
} from './types';

export interface FieldError {
  field: string | null;
  message: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly errors: FieldError[];

  constructor(status: number, errors: FieldError[]) {
    super(errors.map((e) => (e.field ? `${e.field}: ${e.message}` : e.message)).join('; '));
    this.status = status;
    this.errors = errors;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function extractErrors(status: number, body: unknown): FieldError[] {
  if (body && typeof body === 'object' && 'detail' in body) {
    const detail = (body as { detail: unknown }).detail;
    if (detail && typeof detail === 'object' && 'errors' in detail) {
      return (detail as { errors: FieldError[] }).errors;
    }
    if (typeof detail === 'string') {
      return [{ field: null, message: detail }];
    }
  }
  return [{ field: null, message: `request failed with status ${status}` }];
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    const body = await res.json().catch(() => null);
    if (!res.ok) {
      throw new ApiError(res.status, extractErrors(res.status, body));
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  async scenarios(): Promise<ScenarioSpec[]> {
    const body = await this.request<{ scenarios: ScenarioSpec[] }>('/scenarios');
    return body.scenarios;
  }

  async submitSimulation(req: SimulationRequest): Promise<string> {
    const body = await this.post<{ id: string }>('/simulations', req);
    return body.id;
  }

  getJob(id: string): Promise<Job> {
    return this.request<Job>(`/simulations/${id}`);
  }

  async listJobs(): Promise<Job[]> {
    const body = await this.request<{ jobs: Job[] }>('/simulations');
    return body.jobs;
  }

  analyze(payload: {
    data: TrialDataSpec;
    stage: 'interim' | 'final';
    config?: ConfigSpec;
    settings?: SettingsSpec;
    seed?: number;
  }): Promise<AnalysisReport> {
    return this.post<AnalysisReport>('/analyze', payload);
  }

  calibrate(payload: {
    delta: number;
    p2: number[];
    grid?: { min: number; max: number; step: number };
  }): Promise<CalibrationResult> {
    return this.post<CalibrationResult>('/calibrate-tau2', payload);
  }

  async curves(tau2Values: number[], p2Min = 0.01, p2Max = 0.99, points = 99): Promise<Curve[]> {
    const params = new URLSearchParams({
      tau2: tau2Values.join(','),
      p2_min: String(p2Min),
      p2_max: String(p2Max),
      points: String(points),
    });
    const body = await this.request<{ curves: Curve[] }>(`/curves?${params}`);
    return body.curves;
  }
}
