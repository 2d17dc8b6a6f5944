// Thin typed client for the causaldesign HTTP service. All analysis numbers
// shown in the UI come from these responses verbatim; the client never
// recomputes anything.

import type {
  ConstraintsPayload,
  ConstraintsResponse,
  DatasetInfoResponse,
  DatasetResponse,
  DiscoverResponse,
  EstimateRequest,
  EstimateResponse,
  GraphResponse,
  IdentifyResponse,
} from './types';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(
  base: string,
  path: string,
  init?: RequestInit,
): Promise<T> {
  const response = await fetch(`${base}${path}`, {
    headers: { 'content-type': 'application/json' },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class CausalDesignClient {
  constructor(public readonly base: string) {}

  health(): Promise<{ status: string }> {
    return request(this.base, '/health');
  }

  generateDataset(n: number, seed: number, noise: number): Promise<DatasetResponse> {
    return request(this.base, '/datasets', {
      method: 'POST',
      body: JSON.stringify({ generate: { n, seed, noise } }),
    });
  }

  datasetInfo(datasetId: string): Promise<DatasetInfoResponse> {
    return request(this.base, `/datasets/${datasetId}`);
  }

  discover(datasetId: string, penalty = 0.75): Promise<DiscoverResponse> {
    return request(this.base, `/datasets/${datasetId}/discover`, {
      method: 'POST',
      body: JSON.stringify({ penalty }),
    });
  }

  getGraph(graphId: string): Promise<GraphResponse> {
    return request(this.base, `/graphs/${graphId}`);
  }

  applyConstraints(
    graphId: string,
    constraints: ConstraintsPayload,
  ): Promise<ConstraintsResponse> {
    return request(this.base, `/graphs/${graphId}/constraints`, {
      method: 'POST',
      body: JSON.stringify(constraints),
    });
  }

  identify(
    graphId: string,
    treatment: string,
    outcome: string,
  ): Promise<IdentifyResponse> {
    return request(this.base, `/graphs/${graphId}/identify`, {
      method: 'POST',
      body: JSON.stringify({ treatment, outcome }),
    });
  }

  estimate(graphId: string, body: EstimateRequest): Promise<EstimateResponse> {
    return request(this.base, `/graphs/${graphId}/estimate`, {
      method: 'POST',
      body: JSON.stringify(body),
    });
  }
}
