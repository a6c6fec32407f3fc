// Console wiring: load assessments, render the system sunburst, handle
// slice drill-down, and run the what-if loop through the API.  Every
// number shown on screen is copied from an API payload field; the only
// arithmetic performed here is the baseline-vs-draft delta of the
// equivalent-vulnerability counts, which is the comparison the panel
// exists to show.

import { ApiError, assessSystem, fetchComponents, fetchHistory } from "./api";
import { renderDetail } from "./detail";
import { renderSunburst } from "./sunburst";
import type { SystemReport, SystemSpecDoc } from "./types";
import {
  type WhatIfDraft,
  DraftError,
  applyDraft,
  atomsOf,
  newDraft,
  parseDraft,
  serializeDraft,
  withEdit,
} from "./whatif";

export const SUNBURST_SIZE = 800;

export interface AppHandle {
  baselineReport: SystemReport;
  draft: WhatIfDraft;
  draftReport: SystemReport | null;
  refresh(): Promise<void>;
  select(component: string): Promise<void>;
  edit(edit: Parameters<typeof withEdit>[1]): Promise<void>;
  resetDraft(): Promise<void>;
  promoteDraft(): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function scoreCard(title: string, report: SystemReport, field: string): HTMLElement {
  const card = el("div", "score-card");
  card.appendChild(el("h4", undefined, title));
  const dl = el("dl");
  const entries: Array<[string, number | string]> = [
    ["system", report.system],
    ["expectation", report.expectation],
    ["t", report.t],
    ["c", report.c],
    ["equivalent_vulns", report.equivalent_vulns],
  ];
  for (const [label, value] of entries) {
    const dt = el("dt", undefined, label);
    const dd = el("dd", undefined, String(value));
    dd.dataset.field = `${field}-${label}`;
    dl.append(dt, dd);
  }
  card.appendChild(dl);
  return card;
}

export async function initApp(root: HTMLElement, baseSpec?: SystemSpecDoc): Promise<AppHandle> {
  root.replaceChildren();
  const banner = el("div", "error-banner");
  banner.hidden = true;
  const chart = el("section", "chart");
  const detail = el("aside", "detail");
  const whatif = el("section", "whatif");
  const main = el("main");
  main.append(chart, detail);
  root.append(banner, main, whatif);

  const showBanner = (message: string) => {
    banner.hidden = false;
    banner.textContent = message;
  };

  let baseline: SystemSpecDoc;
  try {
    if (baseSpec) {
      baseline = baseSpec;
    } else {
      const index = await fetchComponents();
      const atoms = index.components.map((c) => ({ atom: c.component }));
      baseline =
        atoms.length === 1
          ? { name: "current-configuration", formula: atoms[0] }
          : { name: "current-configuration", formula: { and: atoms } };
    }
  } catch (err) {
    showBanner(`failed to load assessments: ${(err as Error).message}`);
    throw err;
  }

  const state = {
    baseline,
    baselineReport: null as SystemReport | null,
    draft: newDraft(baseline),
    draftReport: null as SystemReport | null,
  };

  const renderWhatIf = () => {
    whatif.replaceChildren();
    whatif.appendChild(el("h3", undefined, "What-if"));
    const inlineError = el("div", "inline-error");
    inlineError.hidden = true;
    whatif.appendChild(inlineError);
    const cards = el("div", "cards");
    if (state.baselineReport) {
      cards.appendChild(scoreCard("baseline", state.baselineReport, "baseline"));
    }
    if (state.draftReport && state.draft.edits.length > 0) {
      cards.appendChild(scoreCard("draft", state.draftReport, "draft"));
      const delta = el("div", "delta");
      const change =
        state.draftReport.equivalent_vulns - (state.baselineReport?.equivalent_vulns ?? 0);
      delta.dataset.field = "delta-equivalent_vulns";
      delta.textContent = `${change >= 0 ? "+" : ""}${change} equivalent vulnerabilities`;
      cards.appendChild(delta);
    }
    whatif.appendChild(cards);
    const edits = el("ul", "edits");
    for (const edit of state.draft.edits) {
      edits.appendChild(el("li", undefined, JSON.stringify(edit)));
    }
    whatif.appendChild(edits);
  };

  const handle: AppHandle = {
    get baselineReport() {
      return state.baselineReport as SystemReport;
    },
    get draft() {
      return state.draft;
    },
    get draftReport() {
      return state.draftReport;
    },

    async refresh() {
      banner.hidden = true;
      try {
        state.baselineReport = await assessSystem(state.baseline);
        renderSunburst(chart, state.baselineReport, SUNBURST_SIZE, (name) => {
          void handle.select(name);
        });
      } catch (err) {
        showBanner(`assessment failed: ${(err as Error).message}`);
        return;
      }
      renderWhatIf();
    },

    async select(component: string) {
      const assessment = state.baselineReport?.components.find(
        (c) => c.component === component,
      );
      if (!assessment) return;
      try {
        renderDetail(detail, assessment, await fetchHistory(component));
      } catch (err) {
        showBanner(`history unavailable: ${(err as Error).message}`);
      }
    },

    async edit(edit) {
      const candidate = withEdit(state.draft, edit);
      let spec: SystemSpecDoc;
      try {
        spec = applyDraft(candidate);
      } catch (err) {
        if (err instanceof DraftError) {
          showInline(whatif, err.message);
          return; // draft unchanged
        }
        throw err;
      }
      try {
        state.draftReport = await assessSystem(spec);
      } catch (err) {
        if (err instanceof ApiError) {
          showInline(whatif, err.message); // keep the previous draft
          return;
        }
        throw err;
      }
      state.draft = candidate;
      renderWhatIf();
    },

    async resetDraft() {
      state.draft = newDraft(state.baseline);
      state.draftReport = null;
      renderWhatIf();
    },

    async promoteDraft() {
      if (state.draft.edits.length === 0) return;
      state.baseline = applyDraft(state.draft);
      state.draft = newDraft(state.baseline);
      state.draftReport = null;
      await handle.refresh();
    },
  };

  await handle.refresh();
  return handle;
}

function showInline(whatif: HTMLElement, message: string): void {
  const inline = whatif.querySelector<HTMLElement>(".inline-error");
  if (inline) {
    inline.hidden = false;
    inline.textContent = message;
  }
}

export { applyDraft, atomsOf, newDraft, parseDraft, serializeDraft, withEdit };
