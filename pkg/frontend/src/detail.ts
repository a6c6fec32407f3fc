// Component drill-down: reported monthly counts (blue) with the
// predicted monthly rate (red) extended over the horizon.

import type { ComponentReport, HistoryReport } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export function smooth(counts: number[], window = 3): number[] {
  return counts.map((_, i) => {
    const lo = Math.max(0, i - window + 1);
    const slice = counts.slice(lo, i + 1);
    return slice.reduce((a, b) => a + b, 0) / slice.length;
  });
}

export function renderDetail(
  container: HTMLElement,
  assessment: ComponentReport,
  history: HistoryReport,
): void {
  container.replaceChildren();

  const heading = document.createElement("h3");
  heading.textContent = assessment.component;
  container.appendChild(heading);

  const facts = document.createElement("dl");
  facts.className = "facts";
  const rows: Array<[string, number]> = [
    ["t", assessment.t],
    ["c", assessment.c],
    ["f", assessment.f],
    ["expectation", assessment.expectation],
    ["equivalent vulnerabilities", assessment.equivalent_vulns],
  ];
  for (const [label, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.dataset.field = label;
    dd.textContent = String(value);
    facts.append(dt, dd);
  }
  container.appendChild(facts);
  container.appendChild(renderSeries(history));
}

function renderSeries(history: HistoryReport): SVGSVGElement {
  const width = 460;
  const height = 140;
  const pad = 8;
  const horizon = history.predicted?.horizon_months ?? 0;
  const months = history.counts.length + horizon;
  const smoothed = smooth(history.counts);
  const peak = Math.max(1, ...smoothed, history.predicted?.monthly_rate ?? 0);

  const x = (i: number) => pad + (i / Math.max(1, months - 1)) * (width - 2 * pad);
  const y = (v: number) => height - pad - (v / peak) * (height - 2 * pad);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "history");

  const actual = document.createElementNS(SVG_NS, "polyline");
  actual.setAttribute("points", smoothed.map((v, i) => `${x(i)},${y(v)}`).join(" "));
  actual.setAttribute("fill", "none");
  actual.setAttribute("stroke", "#3465a4");
  actual.setAttribute("class", "series-actual");
  svg.appendChild(actual);

  if (history.predicted && horizon > 0) {
    const rate = history.predicted.monthly_rate;
    const start = history.counts.length - 1;
    const predicted = document.createElementNS(SVG_NS, "polyline");
    predicted.setAttribute(
      "points",
      `${x(start)},${y(rate)} ${x(start + horizon)},${y(rate)}`,
    );
    predicted.setAttribute("fill", "none");
    predicted.setAttribute("stroke", "#cc0000");
    predicted.setAttribute("class", "series-predicted");
    svg.appendChild(predicted);
  }
  return svg;
}
