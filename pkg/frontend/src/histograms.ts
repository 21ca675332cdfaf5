/** Overlaid fixed/random histogram panels with a shared-bin guarantee.
 *
 * Bin edges come straight from the histogram CSVs (never recomputed); a
 * panel refuses to render when its two series disagree on the edges or the
 * query. The returned data block is exactly what gets drawn, so tests can
 * compare plotted series against golden files without rasterizing.
 */

import { RunArtifacts, checkSchemaVersions, loadRun } from "./schema";
import { SvgBuilder, linearScale, ticks } from "./svg";

export interface PanelData {
  label: string;
  truth: number;
  edges: number[];
  series: Array<{ name: string; counts: number[] }>;
}

export interface HistogramFigure {
  svg: string;
  data: PanelData[];
}

const PANEL_W = 280;
const PANEL_H = 230;
const MARGIN = { top: 34, right: 14, bottom: 40, left: 52 };
const SERIES_STYLE: Record<string, string> = {
  fixed: "fill:#4878a8;fill-opacity:0.55;stroke:#2c4a68;stroke-width:0.5",
  random: "fill:#e0883a;fill-opacity:0.55;stroke:#8a4e18;stroke-width:0.5",
};

function edgesEqual(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((value, k) => value === b[k]);
}

export function buildPanel(fixed: RunArtifacts, random: RunArtifacts): PanelData {
  if (!edgesEqual(fixed.bins.edges, random.bins.edges)) {
    throw new Error(
      `bin edges differ between ${fixed.valuesPath} and ${random.valuesPath}; ` +
      `panels need histograms computed with shared edges`);
  }
  const queryA = JSON.stringify(fixed.summary.query);
  const queryB = JSON.stringify(random.summary.query);
  if (queryA !== queryB) {
    throw new Error(`query mismatch between inputs: ${queryA} vs ${queryB}`);
  }
  if (fixed.summary.truth !== random.summary.truth) {
    throw new Error("true value differs between the two inputs");
  }
  return {
    label: `s = ${fixed.summary.s}`,
    truth: fixed.summary.truth,
    edges: fixed.bins.edges,
    series: [
      { name: fixed.design, counts: fixed.bins.counts },
      { name: random.design, counts: random.bins.counts },
    ],
  };
}

function drawPanel(svg: SvgBuilder, panel: PanelData): void {
  const innerW = PANEL_W - MARGIN.left - MARGIN.right;
  const innerH = PANEL_H - MARGIN.top - MARGIN.bottom;
  const xLo = Math.min(panel.edges[0], panel.truth);
  const xHi = Math.max(panel.edges[panel.edges.length - 1], panel.truth);
  const pad = (xHi - xLo || 1) * 0.05;
  const x = linearScale([xLo - pad, xHi + pad], [MARGIN.left, MARGIN.left + innerW]);
  const yMax = Math.max(1, ...panel.series.flatMap((s) => s.counts));
  const y = linearScale([0, yMax * 1.05], [MARGIN.top + innerH, MARGIN.top]);

  for (const series of panel.series) {
    const style = SERIES_STYLE[series.name] ?? "fill:#888;fill-opacity:0.5";
    series.counts.forEach((count, k) => {
      if (count === 0) return;
      const x0 = x(panel.edges[k]);
      const x1 = x(panel.edges[k + 1]);
      svg.rect(x0, y(count), Math.max(x1 - x0, 0.75), y(0) - y(count), style,
               `bar-${series.name}`);
    });
  }
  svg.line(x(panel.truth), y(0), x(panel.truth), MARGIN.top,
           "stroke:black;stroke-width:1.4", "truth-line");

  svg.line(MARGIN.left, y(0), MARGIN.left + innerW, y(0), "stroke:#333;stroke-width:1");
  svg.line(MARGIN.left, y(0), MARGIN.left, MARGIN.top, "stroke:#333;stroke-width:1");
  for (const t of ticks(x.domain[0], x.domain[1], 4)) {
    svg.line(x(t), y(0), x(t), y(0) + 4, "stroke:#333;stroke-width:1");
    svg.text(x(t), y(0) + 16, t.toPrecision(2), "font-size:9px;fill:#333");
  }
  for (const t of ticks(0, yMax, 4)) {
    svg.line(MARGIN.left - 4, y(t), MARGIN.left, y(t), "stroke:#333;stroke-width:1");
    svg.text(MARGIN.left - 7, y(t) + 3, String(t), "font-size:9px;fill:#333", "end");
  }
  svg.text(PANEL_W / 2, 18, panel.label, "font-size:12px;fill:#111");
}

export function buildHistogramFigure(panels: Array<[RunArtifacts, RunArtifacts]>): HistogramFigure {
  if (panels.length === 0) {
    throw new Error("no histogram panels given");
  }
  checkSchemaVersions(
    panels.flatMap(([a, b]) => [a.summary.schema_version, b.summary.schema_version]));
  const data = panels.map(([fixed, random]) => buildPanel(fixed, random));
  const svg = new SvgBuilder(PANEL_W * data.length, PANEL_H + 26);
  data.forEach((panel, k) => {
    svg.group(`translate(${k * PANEL_W},0)`, (g) => drawPanel(g, panel));
  });
  // legend under the panels
  const legendY = PANEL_H + 12;
  svg.rect(MARGIN.left, legendY - 8, 12, 10, SERIES_STYLE.fixed);
  svg.text(MARGIN.left + 18, legendY, "fixed design", "font-size:10px;fill:#111", "start");
  svg.rect(MARGIN.left + 100, legendY - 8, 12, 10, SERIES_STYLE.random);
  svg.text(MARGIN.left + 118, legendY, "random design", "font-size:10px;fill:#111", "start");
  return { svg: svg.render(), data };
}

/** Resolve values CSV paths (fixed, random alternating) into panels. */
export function loadPanels(valueCsvPaths: string[]): Array<[RunArtifacts, RunArtifacts]> {
  if (valueCsvPaths.length === 0 || valueCsvPaths.length % 2 !== 0) {
    throw new Error("expected pairs of value CSVs: FIXED RANDOM [FIXED RANDOM ...]");
  }
  const panels: Array<[RunArtifacts, RunArtifacts]> = [];
  for (let k = 0; k < valueCsvPaths.length; k += 2) {
    panels.push([loadRun(valueCsvPaths[k]), loadRun(valueCsvPaths[k + 1])]);
  }
  return panels;
}
