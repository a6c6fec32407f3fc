import type {
  CompareReport,
  ComponentsIndex,
  HistoryReport,
  SystemReport,
  SystemSpecDoc,
} from "./types";

const BASE = "/api";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function parseOrThrow<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep statusText
    }
    throw new ApiError(res.status, detail);
  }
  return res.json() as Promise<T>;
}

export async function fetchComponents(): Promise<ComponentsIndex> {
  return parseOrThrow(await fetch(`${BASE}/components`));
}

export async function fetchHistory(component: string): Promise<HistoryReport> {
  const res = await fetch(`${BASE}/components/${encodeURIComponent(component)}/history?bins=month`);
  return parseOrThrow(res);
}

export async function assessSystem(
  spec: SystemSpecDoc,
  params?: Record<string, unknown>,
): Promise<SystemReport> {
  const body = params ? { system: spec, params } : spec;
  const res = await fetch(`${BASE}/systems/assess`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  return parseOrThrow(res);
}

export async function compareSystems(
  a: SystemSpecDoc,
  b: SystemSpecDoc,
  actuals?: { actual_a?: number; actual_b?: number },
): Promise<CompareReport> {
  const res = await fetch(`${BASE}/systems/compare`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ a, b, ...actuals }),
  });
  return parseOrThrow(res);
}
