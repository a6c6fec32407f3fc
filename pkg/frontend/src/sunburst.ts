// Sunburst encoding of a system assessment, one ring of component slices:
//   angular length  ~ trust value t   (share of the full circle)
//   radial width    ~ certainty c     (thin = shaky estimate)
//   fill color      ~ expectation E   (red 0 .. green 1, fixed anchors)
//   center label    = system expectation, verbatim from the payload.

import type { ComponentReport, SystemReport } from "./types";

export interface SunburstSlice {
  component: string;
  startAngle: number; // radians, 0 at 12 o'clock, clockwise
  endAngle: number;
  innerRadius: number;
  outerRadius: number;
  color: string;
  report: ComponentReport;
}

export interface SunburstLayout {
  size: number;
  centerLabel: string;
  slices: SunburstSlice[];
}

const INNER_FRACTION = 0.3; // hole for the center label
const MIN_WIDTH_FRACTION = 0.08; // c = 0 stays visible as a sliver
const GAP = 0.015; // radians between slices

export function colorForExpectation(e: number): string {
  const clamped = Math.max(0, Math.min(1, e));
  const red = { r: 0xcc, g: 0x00, b: 0x00 };
  const green = { r: 0x1a, g: 0x99, b: 0x3e };
  const mix = (a: number, b: number) => Math.round(a + (b - a) * clamped);
  const channel = (v: number) => v.toString(16).padStart(2, "0");
  return `#${channel(mix(red.r, green.r))}${channel(mix(red.g, green.g))}${channel(mix(red.b, green.b))}`;
}

export function layoutSunburst(report: SystemReport, size: number): SunburstLayout {
  const radius = size / 2;
  const inner = radius * INNER_FRACTION;
  const maxWidth = radius * 0.95 - inner;
  const totalT = report.components.reduce((acc, c) => acc + c.t, 0);
  const slices: SunburstSlice[] = [];
  let cursor = 0;
  for (const component of report.components) {
    const share = totalT > 0 ? component.t / totalT : 1 / report.components.length;
    const span = share * 2 * Math.PI;
    const width = maxWidth * (MIN_WIDTH_FRACTION + (1 - MIN_WIDTH_FRACTION) * component.c);
    slices.push({
      component: component.component,
      startAngle: cursor,
      endAngle: cursor + span,
      innerRadius: inner,
      outerRadius: inner + width,
      color: colorForExpectation(component.expectation),
      report: component,
    });
    cursor += span;
  }
  return { size, centerLabel: String(report.expectation), slices };
}

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  // angle 0 at 12 o'clock, increasing clockwise
  return [cx + r * Math.sin(angle), cy - r * Math.cos(angle)];
}

function arcPath(slice: SunburstSlice, cx: number, cy: number, gap: number): string {
  const a0 = slice.startAngle + gap / 2;
  const a1 = Math.max(a0, slice.endAngle - gap / 2);
  const large = a1 - a0 > Math.PI ? 1 : 0;
  const [x0, y0] = polar(cx, cy, slice.innerRadius, a0);
  const [x1, y1] = polar(cx, cy, slice.outerRadius, a0);
  const [x2, y2] = polar(cx, cy, slice.outerRadius, a1);
  const [x3, y3] = polar(cx, cy, slice.innerRadius, a1);
  return [
    `M ${x0} ${y0}`,
    `L ${x1} ${y1}`,
    `A ${slice.outerRadius} ${slice.outerRadius} 0 ${large} 1 ${x2} ${y2}`,
    `L ${x3} ${y3}`,
    `A ${slice.innerRadius} ${slice.innerRadius} 0 ${large} 0 ${x0} ${y0}`,
    "Z",
  ].join(" ");
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderSunburst(
  container: HTMLElement,
  report: SystemReport,
  size: number,
  onSelect: (component: string) => void,
): SunburstLayout {
  const layout = layoutSunburst(report, size);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size));
  svg.setAttribute("role", "img");
  const cx = size / 2;
  const cy = size / 2;

  for (const slice of layout.slices) {
    const path = document.createElementNS(SVG_NS, "path");
    const gap = layout.slices.length > 1 ? GAP : 0;
    path.setAttribute("d", arcPath(slice, cx, cy, gap));
    path.setAttribute("fill", slice.color);
    path.setAttribute("data-component", slice.component);
    path.setAttribute("class", "slice");
    const label = slice.report;
    path.appendChild(titleFor(label));
    path.addEventListener("click", () => onSelect(slice.component));
    svg.appendChild(path);
  }

  const center = document.createElementNS(SVG_NS, "text");
  center.setAttribute("x", String(cx));
  center.setAttribute("y", String(cy));
  center.setAttribute("text-anchor", "middle");
  center.setAttribute("dominant-baseline", "central");
  center.setAttribute("class", "center-label");
  center.textContent = layout.centerLabel;
  svg.appendChild(center);

  container.replaceChildren(svg);
  return layout;
}

function titleFor(c: ComponentReport): SVGTitleElement {
  const title = document.createElementNS(SVG_NS, "title") as SVGTitleElement;
  title.textContent = `${c.component}: t=${c.t} c=${c.c} E=${c.expectation}`;
  return title;
}
