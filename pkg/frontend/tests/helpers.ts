// Fetch interception for the UI tests: every response comes from a
// fixture recorded off the real service, and every request is logged so
// tests can assert that displayed numbers arrived over the wire.

import { vi } from "vitest";

import componentsFixture from "./fixtures/components.json";
import historySteady from "./fixtures/history_steady.json";
import systemPair from "./fixtures/system_pair.json";
import systemOneOfTwo from "./fixtures/system_one_of_two.json";
import systemPairSwapped from "./fixtures/system_pair_swapped.json";
import errorBadSpec from "./fixtures/error_bad_spec.json";

import type { SpecNode } from "../src/types";

export interface RecordedRequest {
  method: string;
  url: string;
  body?: unknown;
}

export const PAIR_SPEC = {
  name: "pair",
  formula: { and: [{ atom: "steady" }, { atom: "spiky" }] } as SpecNode,
};

export const ALTERNATIVE_NODE: SpecNode = {
  and: [{ atom: "steady" }, { atom: "fallback" }],
};

const SWAPPED_FORMULA: SpecNode = {
  and: [{ atom: "steady" }, { atom: "pristine-new" }],
};

const ONE_OF_TWO_FORMULA: SpecNode = {
  or: [PAIR_SPEC.formula, ALTERNATIVE_NODE],
};

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function sameFormula(a: unknown, b: unknown): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}

export function interceptFetch(): RecordedRequest[] {
  const requests: RecordedRequest[] = [];
  const router = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    requests.push({ method, url, body });

    if (method === "GET" && url.endsWith("/api/components")) {
      return json(componentsFixture);
    }
    if (method === "GET" && url.includes("/api/components/steady/history")) {
      return json(historySteady);
    }
    if (method === "POST" && url.endsWith("/api/systems/assess")) {
      const spec = body && typeof body === "object" && "system" in body ? body.system : body;
      if (sameFormula(spec.formula, PAIR_SPEC.formula)) return json(systemPair);
      if (sameFormula(spec.formula, ONE_OF_TWO_FORMULA)) return json(systemOneOfTwo);
      if (sameFormula(spec.formula, SWAPPED_FORMULA)) return json(systemPairSwapped);
      return json(errorBadSpec.body, errorBadSpec.status);
    }
    return json({ error: `unrouted ${method} ${url}` }, 404);
  };
  vi.stubGlobal("fetch", vi.fn(router));
  return requests;
}

export {
  componentsFixture,
  historySteady,
  systemPair,
  systemOneOfTwo,
  systemPairSwapped,
  errorBadSpec,
};
