/**
 * Thin HTTP client for the cohortselect service plus job polling with
 * exponential backoff. All methods throw ServiceError on non-2xx
 * responses, carrying the parsed error detail.
 */

import type {
  AttributeSchema,
  DatasetInfo,
  JobRecord,
  SelectionParamsBody,
} from './types';

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service responded ${status}: ${JSON.stringify(detail)}`);
  }
}

async function parseDetail(response: Response): Promise<unknown> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    return body.detail ?? body;
  } catch {
    return response.statusText;
  }
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const base = this.baseUrl.replace(/\/$/, '');
    const response = await this.fetchImpl(`${base}${path}`, init);
    if (!response.ok) {
      throw new ServiceError(response.status, await parseDetail(response));
    }
    return response;
  }

  async uploadDataset(csv: string, idColumn?: string): Promise<DatasetInfo> {
    const query = idColumn
      ? `?id_column=${encodeURIComponent(idColumn)}`
      : '';
    const response = await this.request(`/datasets${query}`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/csv' },
      body: csv,
    });
    return (await response.json()) as DatasetInfo;
  }

  async submitSelection(
    datasetId: string,
    attributes: AttributeSchema[],
    params: SelectionParamsBody,
  ): Promise<string> {
    const response = await this.request(`/datasets/${datasetId}/selections`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ attributes, params }),
    });
    const body = (await response.json()) as { job_id: string };
    return body.job_id;
  }

  async getJob(jobId: string): Promise<JobRecord> {
    const response = await this.request(`/selections/${jobId}`);
    return (await response.json()) as JobRecord;
  }

  async getReportCsv(jobId: string): Promise<string> {
    const response = await this.request(`/selections/${jobId}/report`);
    return await response.text();
  }
}

export interface PollOptions {
  initialDelayMs?: number;
  maxDelayMs?: number;
  factor?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
  clock?: () => number;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a job until done, backing off between requests. Throws on a failed
 * job (with its error message) and on timeout.
 */
export async function pollJob(
  client: ServiceClient,
  jobId: string,
  options: PollOptions = {},
): Promise<JobRecord> {
  const {
    initialDelayMs = 50,
    maxDelayMs = 2000,
    factor = 1.6,
    timeoutMs = 60000,
    sleep = defaultSleep,
    clock = Date.now,
  } = options;
  let delay = initialDelayMs;
  const deadline = clock() + timeoutMs;
  for (;;) {
    const job = await client.getJob(jobId);
    if (job.status === 'done') {
      return job;
    }
    if (job.status === 'failed') {
      throw new Error(`job ${jobId} failed: ${job.error ?? 'unknown error'}`);
    }
    if (clock() >= deadline) {
      throw new Error(
        `job ${jobId} timed out after ${timeoutMs}ms (still ${job.status})`,
      );
    }
    await sleep(delay);
    delay = Math.min(delay * factor, maxDelayMs);
  }
}
