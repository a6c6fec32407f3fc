// What-if drafts: a base system spec plus pending edits.  The draft
// itself is plain data; applying it always yields a valid spec (and/or
// nodes keep >= 2 children by splicing single survivors upward).

import type { SpecNode, SystemSpecDoc } from "./types";

export type Edit =
  | { kind: "swap"; from: string; to: string }
  | { kind: "remove"; atom: string }
  | { kind: "add_and"; atom: string }
  | { kind: "wrap_or"; alternative: SpecNode; name?: string };

export interface WhatIfDraft {
  base: SystemSpecDoc;
  edits: Edit[];
}

export function newDraft(base: SystemSpecDoc): WhatIfDraft {
  return { base, edits: [] };
}

export function withEdit(draft: WhatIfDraft, edit: Edit): WhatIfDraft {
  return { base: draft.base, edits: [...draft.edits, edit] };
}

export function atomsOf(node: SpecNode): string[] {
  if ("atom" in node) return [node.atom];
  const children = "and" in node ? node.and : node.or;
  return children.flatMap(atomsOf);
}

function cloneNode(node: SpecNode): SpecNode {
  return JSON.parse(JSON.stringify(node)) as SpecNode;
}

function swapAtom(node: SpecNode, from: string, to: string): SpecNode {
  if ("atom" in node) return node.atom === from ? { atom: to } : node;
  if ("and" in node) return { and: node.and.map((c) => swapAtom(c, from, to)) };
  return { or: node.or.map((c) => swapAtom(c, from, to)) };
}

function removeAtom(node: SpecNode, atom: string): SpecNode | null {
  if ("atom" in node) return node.atom === atom ? null : node;
  const children = ("and" in node ? node.and : node.or)
    .map((c) => removeAtom(c, atom))
    .filter((c): c is SpecNode => c !== null);
  if (children.length === 0) return null;
  if (children.length === 1) return children[0];
  return "and" in node ? { and: children } : { or: children };
}

export class DraftError extends Error {}

export function applyDraft(draft: WhatIfDraft): SystemSpecDoc {
  let formula = cloneNode(draft.base.formula);
  let name = draft.base.name;
  for (const edit of draft.edits) {
    switch (edit.kind) {
      case "swap": {
        if (!atomsOf(formula).includes(edit.from)) {
          throw new DraftError(`cannot swap ${edit.from}: not in the system`);
        }
        formula = swapAtom(formula, edit.from, edit.to);
        break;
      }
      case "remove": {
        const next = removeAtom(formula, edit.atom);
        if (next === null) {
          throw new DraftError(`cannot remove ${edit.atom}: the system would be empty`);
        }
        formula = next;
        break;
      }
      case "add_and": {
        formula = "and" in formula
          ? { and: [...formula.and, { atom: edit.atom }] }
          : { and: [formula, { atom: edit.atom }] };
        break;
      }
      case "wrap_or": {
        formula = { or: [formula, cloneNode(edit.alternative)] };
        if (edit.name) name = edit.name;
        break;
      }
    }
  }
  const doc: SystemSpecDoc = { name, formula };
  if (draft.base.description !== undefined) doc.description = draft.base.description;
  return doc;
}

export function serializeDraft(draft: WhatIfDraft): string {
  return JSON.stringify(draft);
}

export function parseDraft(text: string): WhatIfDraft {
  const parsed = JSON.parse(text) as WhatIfDraft;
  if (!parsed || typeof parsed !== "object" || !parsed.base || !Array.isArray(parsed.edits)) {
    throw new DraftError("not a what-if draft");
  }
  return parsed;
}
