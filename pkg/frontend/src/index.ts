export {
  SchemaError,
  parseCsv,
  requireColumns,
  readThroughput,
  readUtilization,
  readLatency,
  readCapacity,
} from "./csv.js";
export type {
  Table,
  ThroughputRow,
  UtilizationRow,
  LatencyRow,
  CapacityRow,
} from "./csv.js";
export { empiricalCdf, weightedCdf, log10Histogram } from "./stats.js";
export type { CdfPoint, HistogramBucket } from "./stats.js";
export {
  FIGURE_KINDS,
  isFigureKind,
  renderFigure,
  render,
  throughputSeries,
  throughputCdf,
  mluSeries,
  utilizationCdf,
  latencyCdf,
  capacityBuckets,
  multirunCdf,
} from "./figures.js";
export type { FigureKind, CsvInput, PlotSpec } from "./figures.js";
export { lineChart, cdfChart, logHistogram, linearScale, log10Scale } from "./svg.js";
export type { Style, Series, CdfSeries, Bar, Scale } from "./svg.js";
