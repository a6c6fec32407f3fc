// Payload shapes mirror the vulntrust HTTP API; the UI renders these
// fields verbatim and performs no trust arithmetic of its own.

export type SpecNode =
  | { atom: string }
  | { and: SpecNode[] }
  | { or: SpecNode[] };

export interface SystemSpecDoc {
  name: string;
  formula: SpecNode;
  description?: string;
}

export interface ComponentReport {
  component: string;
  t: number;
  c: number;
  f: number;
  expectation: number;
  equivalent_vulns: number;
}

export interface SystemReport {
  system: string;
  t: number;
  c: number;
  f: number;
  expectation: number;
  equivalent_vulns: number;
  simplification_log: Array<Record<string, unknown>>;
  components: ComponentReport[];
}

export interface HistoryReport {
  component: string;
  start: string;
  counts: number[];
  predicted?: {
    pred: number;
    error: number;
    horizon_months: number;
    monthly_rate: number;
  };
}

export interface ComponentsIndex {
  params: Record<string, unknown>;
  components: ComponentReport[];
  fingerprint: string;
  created_at: string;
}

export interface CompareReport {
  a: SystemReport;
  b: SystemReport;
  ratio_equivalent: number;
  ratio_actual?: number;
  norm_error?: number;
}
