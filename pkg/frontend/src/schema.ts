/** Loading and validation of the smoother CLI's output files.
 *
 * A histogram run directory holds values_{design}.csv, histogram_{design}.csv
 * and one summary.json; a rate study holds rates.csv and ratefit.json. The
 * figures consume only these documented files, never package internals.
 */

import * as fs from "fs";
import * as path from "path";

import { numericColumn, parseCsv } from "./csv";

export const SCHEMA_VERSION = "1";

export interface HistogramBins {
  edges: number[]; // length = bins + 1
  counts: number[];
}

export interface DesignStats {
  count: number;
  mean: number;
  variance: number;
}

export interface RunSummary {
  schema_version: string;
  truth: number;
  query: number[];
  n: number;
  h: number;
  lambda: number;
  s: number;
  designs: Record<string, DesignStats>;
  [key: string]: unknown;
}

export interface RunArtifacts {
  design: string;
  values: number[];
  bins: HistogramBins;
  summary: RunSummary;
  valuesPath: string;
}

function readJson(file: string): any {
  if (!fs.existsSync(file)) {
    throw new Error(`missing input file: ${file}`);
  }
  return JSON.parse(fs.readFileSync(file, "utf8"));
}

function designFromFilename(valuesCsvPath: string): string {
  const match = path.basename(valuesCsvPath).match(/^values_([a-z]+)\.csv$/);
  if (!match) {
    throw new Error(
      `cannot infer the design from ${valuesCsvPath}; expected a values_<design>.csv file`);
  }
  return match[1];
}

function loadBins(file: string): HistogramBins {
  if (!fs.existsSync(file)) {
    throw new Error(`missing input file: ${file}`);
  }
  const rows = parseCsv(fs.readFileSync(file, "utf8"));
  const left = numericColumn(rows, "bin_left");
  const right = numericColumn(rows, "bin_right");
  for (let k = 1; k < rows.length; k += 1) {
    if (left[k] !== right[k - 1]) {
      throw new Error(`histogram bins in ${file} are not contiguous at row ${k}`);
    }
  }
  return { edges: [...left, right[right.length - 1]], counts: numericColumn(rows, "count") };
}

/** Load one design's artifacts starting from its values CSV path. */
export function loadRun(valuesCsvPath: string): RunArtifacts {
  if (!fs.existsSync(valuesCsvPath)) {
    throw new Error(`missing input file: ${valuesCsvPath}`);
  }
  const design = designFromFilename(valuesCsvPath);
  const dir = path.dirname(valuesCsvPath);
  const values = numericColumn(parseCsv(fs.readFileSync(valuesCsvPath, "utf8")), "f_hat");
  const bins = loadBins(path.join(dir, `histogram_${design}.csv`));
  const summary = readJson(path.join(dir, "summary.json")) as RunSummary;
  if (summary.schema_version === undefined) {
    throw new Error(`summary.json in ${dir} carries no schema_version`);
  }
  return { design, values, bins, summary, valuesPath: valuesCsvPath };
}

/** All inputs of a figure must carry one and the same schema version. */
export function checkSchemaVersions(versions: string[]): void {
  const distinct = [...new Set(versions)];
  if (distinct.length > 1) {
    throw new Error(`schema mismatch between inputs: versions ${distinct.join(", ")}`);
  }
  if (distinct[0] !== SCHEMA_VERSION) {
    throw new Error(
      `unsupported schema_version ${distinct[0]}; this tool reads version ${SCHEMA_VERSION}`);
  }
}

export interface RateFitEntry {
  ns: number[];
  values: number[];
  slope: number;
  intercept: number;
  r_squared: number;
  predicted: number | null;
}

export interface RateFitFile {
  schema_version: string;
  statistics: string[];
  fits: Record<string, Record<string, RateFitEntry>>;
  [key: string]: unknown;
}

export interface RatePoint {
  design: string;
  n: number;
  value: number;
}

export function loadRatePoints(ratesCsvPath: string, statistic: string): RatePoint[] {
  if (!fs.existsSync(ratesCsvPath)) {
    throw new Error(`missing input file: ${ratesCsvPath}`);
  }
  const rows = parseCsv(fs.readFileSync(ratesCsvPath, "utf8"));
  const points = rows
    .filter((row) => row.statistic === statistic)
    .map((row) => ({ design: row.design, n: Number(row.n), value: Number(row.value) }));
  if (points.length === 0) {
    throw new Error(`rates CSV has no rows for statistic ${statistic}`);
  }
  return points;
}

export function loadRateFit(fitJsonPath: string): RateFitFile {
  const fit = readJson(fitJsonPath) as RateFitFile;
  if (fit.schema_version === undefined) {
    throw new Error(`${fitJsonPath} carries no schema_version`);
  }
  return fit;
}
