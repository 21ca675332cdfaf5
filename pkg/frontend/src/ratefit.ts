/** Log-log rate plot: per-n statistics with the fitted decay line and the
 * predicted-slope reference line.
 *
 * Points come from rates.csv; the fitted slope/intercept and the predicted
 * exponent come from ratefit.json (natural-log fit, value = exp(intercept)
 * * n^-slope). The predicted reference is anchored at the fitted value of
 * the smallest n so the two lines share a point and differ only in slope.
 */

import { RateFitEntry, checkSchemaVersions, loadRateFit, loadRatePoints } from "./schema";
import { SvgBuilder, linearScale } from "./svg";

export interface RateSeriesData {
  design: string;
  points: Array<{ n: number; value: number }>;
  slope: number;
  intercept: number;
  r_squared: number;
  predicted: number | null;
}

export interface RateFigure {
  svg: string;
  data: { statistic: string; series: RateSeriesData[] };
}

const WIDTH = 440;
const HEIGHT = 340;
const MARGIN = { top: 30, right: 16, bottom: 46, left: 64 };
const DESIGN_COLOR: Record<string, string> = { fixed: "#4878a8", random: "#e0883a" };

export function fittedValue(entry: Pick<RateFitEntry, "slope" | "intercept">, n: number): number {
  return Math.exp(entry.intercept - entry.slope * Math.log(n));
}

export function buildRateFigure(ratesCsvPath: string, fitJsonPath: string,
                                statistic = "total_variance"): RateFigure {
  const fit = loadRateFit(fitJsonPath);
  checkSchemaVersions([fit.schema_version]);
  const points = loadRatePoints(ratesCsvPath, statistic);
  const designs = [...new Set(points.map((p) => p.design))];

  const series: RateSeriesData[] = designs.map((design) => {
    const entry = fit.fits[design]?.[statistic];
    if (!entry) {
      throw new Error(`ratefit.json has no ${design}/${statistic} fit`);
    }
    return {
      design,
      points: points.filter((p) => p.design === design)
                    .map((p) => ({ n: p.n, value: p.value })),
      slope: entry.slope,
      intercept: entry.intercept,
      r_squared: entry.r_squared,
      predicted: entry.predicted,
    };
  });

  const logX = (n: number) => Math.log10(n);
  const logY = (v: number) => Math.log10(v);
  const allN = points.map((p) => p.n);
  const allV = points.map((p) => p.value);
  if (allV.some((v) => v <= 0)) {
    throw new Error("rate plot needs strictly positive statistic values");
  }
  const xDom: [number, number] = [Math.min(...allN.map(logX)), Math.max(...allN.map(logX))];
  const yDom: [number, number] = [Math.min(...allV.map(logY)), Math.max(...allV.map(logY))];
  const xPad = (xDom[1] - xDom[0] || 1) * 0.06;
  const yPad = (yDom[1] - yDom[0] || 1) * 0.10;
  const x = linearScale([xDom[0] - xPad, xDom[1] + xPad],
                        [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([yDom[0] - yPad, yDom[1] + yPad],
                        [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const svg = new SvgBuilder(WIDTH, HEIGHT);
  svg.line(MARGIN.left, HEIGHT - MARGIN.bottom, WIDTH - MARGIN.right, HEIGHT - MARGIN.bottom,
           "stroke:#333;stroke-width:1");
  svg.line(MARGIN.left, HEIGHT - MARGIN.bottom, MARGIN.left, MARGIN.top,
           "stroke:#333;stroke-width:1");

  for (const s of series) {
    const color = DESIGN_COLOR[s.design] ?? "#555";
    const ns = s.points.map((p) => p.n).sort((a, b) => a - b);
    const lineN = [ns[0], ns[ns.length - 1]];
    svg.polyline(
      lineN.map((n) => [x(logX(n)), y(logY(fittedValue(s, n)))] as [number, number]),
      `stroke:${color};stroke-width:1.6;fill:none`, `fitted-${s.design}`);
    if (s.predicted !== null) {
      const anchor = fittedValue(s, ns[0]);
      const predicted = (n: number) => anchor * Math.pow(n / ns[0], -(s.predicted as number));
      svg.polyline(
        lineN.map((n) => [x(logX(n)), y(logY(predicted(n)))] as [number, number]),
        `stroke:${color};stroke-width:1.2;fill:none;stroke-dasharray:5 4`,
        `predicted-${s.design}`);
    }
    for (const p of s.points) {
      svg.circle(x(logX(p.n)), y(logY(p.value)), 3.4,
                 `fill:${color};stroke:white;stroke-width:0.8`, `point-${s.design}`);
    }
  }

  for (const n of [...new Set(allN)].sort((a, b) => a - b)) {
    svg.line(x(logX(n)), HEIGHT - MARGIN.bottom, x(logX(n)), HEIGHT - MARGIN.bottom + 4,
             "stroke:#333;stroke-width:1");
    svg.text(x(logX(n)), HEIGHT - MARGIN.bottom + 17, String(n), "font-size:10px;fill:#333");
  }
  const yTickCount = 4;
  for (let k = 0; k <= yTickCount; k += 1) {
    const v = yDom[0] + ((yDom[1] - yDom[0]) * k) / yTickCount;
    svg.line(MARGIN.left - 4, y(v), MARGIN.left, y(v), "stroke:#333;stroke-width:1");
    svg.text(MARGIN.left - 7, y(v) + 3, `1e${v.toFixed(1)}`, "font-size:10px;fill:#333", "end");
  }
  svg.text(WIDTH / 2, HEIGHT - 10, "number of nodes n (log scale)", "font-size:11px;fill:#111");
  svg.text(WIDTH / 2, 16, `${statistic} vs n: fitted (solid) and predicted (dashed) slopes`,
           "font-size:12px;fill:#111");
  const legendY = MARGIN.top + 8;
  series.forEach((s, k) => {
    const color = DESIGN_COLOR[s.design] ?? "#555";
    const label = `${s.design}: slope ${s.slope.toFixed(3)}` +
      (s.predicted !== null ? ` (predicted ${s.predicted})` : "");
    svg.circle(WIDTH - MARGIN.right - 176, legendY + k * 16 - 3, 3.4, `fill:${color}`);
    svg.text(WIDTH - MARGIN.right - 168, legendY + k * 16, label,
             "font-size:10px;fill:#111", "start");
  });

  return { svg: svg.render(), data: { statistic, series } };
}
