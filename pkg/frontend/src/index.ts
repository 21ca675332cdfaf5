export { parseCsv, numericColumn } from "./csv";
export {
  SCHEMA_VERSION,
  checkSchemaVersions,
  loadRateFit,
  loadRatePoints,
  loadRun,
} from "./schema";
export type { RunArtifacts, RateFitFile, RunSummary } from "./schema";
export { buildHistogramFigure, buildPanel, loadPanels } from "./histograms";
export type { HistogramFigure, PanelData } from "./histograms";
export { buildRateFigure, fittedValue } from "./ratefit";
export type { RateFigure, RateSeriesData } from "./ratefit";
export { main } from "./cli";
