#!/usr/bin/env node
/** Figure rendering CLI.
 *
 *   plot-histograms FIXED_VALUES RANDOM_VALUES [FIXED2 RANDOM2 ...] -o OUT.svg
 *   plot-ratefit RATES_CSV RATEFIT_JSON [--statistic NAME] -o OUT.svg
 *
 * Writes the SVG figure plus a `<OUT>.data.json` sidecar holding exactly the
 * plotted series, so figures can be diffed numerically. Inputs are read-only;
 * on any error nothing is written and the exit code is 1.
 */

import * as fs from "fs";
import * as path from "path";

import { buildHistogramFigure, loadPanels } from "./histograms";
import { buildRateFigure } from "./ratefit";

interface ParsedArgs {
  positional: string[];
  out: string | null;
  statistic: string;
}

function parseArgs(argv: string[]): ParsedArgs {
  const parsed: ParsedArgs = { positional: [], out: null, statistic: "total_variance" };
  for (let k = 0; k < argv.length; k += 1) {
    const arg = argv[k];
    if (arg === "-o" || arg === "--out") {
      parsed.out = argv[++k];
    } else if (arg === "--statistic") {
      parsed.statistic = argv[++k];
    } else if (arg.startsWith("-")) {
      throw new Error(`unknown flag ${arg}`);
    } else {
      parsed.positional.push(arg);
    }
  }
  if (!parsed.out) {
    throw new Error("missing -o OUT.svg");
  }
  return parsed;
}

function sidecarPath(outPath: string): string {
  const ext = path.extname(outPath);
  return ext ? outPath.slice(0, -ext.length) + ".data.json" : outPath + ".data.json";
}

function writeFigure(outPath: string, svg: string, data: unknown): void {
  if (path.extname(outPath).toLowerCase() === ".png") {
    process.stderr.write("note: output is SVG markup; prefer a .svg extension\n");
  }
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg + "\n");
  fs.writeFileSync(sidecarPath(outPath), JSON.stringify(data, null, 2) + "\n");
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "plot-histograms") {
      const args = parseArgs(rest);
      const figure = buildHistogramFigure(loadPanels(args.positional));
      writeFigure(args.out as string, figure.svg, figure.data);
      return 0;
    }
    if (command === "plot-ratefit") {
      const args = parseArgs(rest);
      if (args.positional.length !== 2) {
        throw new Error("plot-ratefit expects RATES_CSV and RATEFIT_JSON");
      }
      const figure = buildRateFigure(args.positional[0], args.positional[1], args.statistic);
      writeFigure(args.out as string, figure.svg, figure.data);
      return 0;
    }
    process.stderr.write(
      "usage: plot-histograms FIXED RANDOM [FIXED2 RANDOM2 ...] -o OUT.svg\n" +
      "       plot-ratefit RATES_CSV RATEFIT_JSON [--statistic NAME] -o OUT.svg\n");
    return 2;
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
