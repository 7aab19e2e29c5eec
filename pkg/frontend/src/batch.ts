/** Batch driver: captures are independent; one failure never aborts the run. */

export interface BatchFailure {
  target: string;
  error: string;
}

export interface BatchSummary {
  ok_count: number;
  failed: BatchFailure[];
}

export async function captureBatch(
  targets: readonly string[],
  capture: (target: string) => Promise<unknown>,
): Promise<BatchSummary> {
  const summary: BatchSummary = { ok_count: 0, failed: [] };
  for (const target of targets) {
    try {
      await capture(target);
      summary.ok_count += 1;
    } catch (err) {
      summary.failed.push({ target, error: err instanceof Error ? err.message : String(err) });
    }
  }
  return summary;
}
