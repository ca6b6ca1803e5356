// Poll a simulation job until it reaches a terminal state.

import type { ApiClient } from './api';
import type { Job } from './types';

export const DEFAULT_POLL_INTERVAL_MS = 2000;

export async function pollJob(
  api: ApiClient,
  jobId: string,
  options: { intervalMs?: number; onUpdate?: (job: Job) => void } = {},
): Promise<Job> {
  const interval = options.intervalMs ?? DEFAULT_POLL_INTERVAL_MS;
  for (;;) {
    const job = await api.getJob(jobId);
    options.onUpdate?.(job);
    if (job.status === 'done' || job.status === 'failed') {
      return job;
    }
    await new Promise((resolve) => setTimeout(resolve, interval));
  }
}
