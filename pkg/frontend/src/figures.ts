/**
 * Figure definitions: each kind maps one or more simulator CSV outputs
 * onto a chart. Extraction (CSV -> plottable series) is exported
 * separately from rendering so values can be tested without parsing SVG.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import {
  SchemaError,
  readCapacity,
  readLatency,
  readThroughput,
  readUtilization,
} from "./csv.js";
import { empiricalCdf, log10Histogram, weightedCdf } from "./stats.js";
import type { CdfPoint, HistogramBucket } from "./stats.js";
import { cdfChart, lineChart, logHistogram } from "./svg.js";
import type { Bar, CdfSeries, Series, Style } from "./svg.js";

export const FIGURE_KINDS = [
  "throughput_ts",
  "throughput_cdf",
  "mlu_ts",
  "util_cdf",
  "latency_cdf",
  "capacity_hist",
  "multirun_cdf",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export function isFigureKind(value: string): value is FigureKind {
  return (FIGURE_KINDS as readonly string[]).includes(value);
}

export interface CsvInput {
  source: string;
  text: string;
}

export interface PlotSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  style: Style;
}

function sortedSystems(rows: Array<{ system: string }>): string[] {
  return [...new Set(rows.map((r) => r.system))].sort();
}

/** throughput.csv -> per-system time series of throughput vs step. */
export function throughputSeries(input: CsvInput): Series[] {
  const rows = readThroughput(input.text, input.source);
  return sortedSystems(rows).map((system) => ({
    label: system,
    points: rows
      .filter((r) => r.system === system)
      .sort((a, b) => a.step - b.step)
      .map((r) => ({ x: r.step, y: r.throughput })),
  }));
}

/** throughput.csv -> per-system CDF over the per-step throughput values. */
export function throughputCdf(input: CsvInput): CdfSeries[] {
  const rows = readThroughput(input.text, input.source);
  return sortedSystems(rows).map((system) => ({
    label: system,
    points: empiricalCdf(rows.filter((r) => r.system === system).map((r) => r.throughput)),
  }));
}

/** link_utilization.csv -> per-system time series of the max link utilization. */
export function mluSeries(input: CsvInput): Series[] {
  const rows = readUtilization(input.text, input.source);
  return sortedSystems(rows).map((system) => {
    const mlu = new Map<number, number>();
    for (const r of rows) {
      if (r.system !== system) {
        continue;
      }
      mlu.set(r.step, Math.max(mlu.get(r.step) ?? 0, r.utilization));
    }
    return {
      label: system,
      points: [...mlu.entries()].sort((a, b) => a[0] - b[0]).map(([x, y]) => ({ x, y })),
    };
  });
}

/** link_utilization.csv -> per-system CDF over all link-step utilizations. */
export function utilizationCdf(input: CsvInput): CdfSeries[] {
  const rows = readUtilization(input.text, input.source);
  return sortedSystems(rows).map((system) => ({
    label: system,
    points: empiricalCdf(rows.filter((r) => r.system === system).map((r) => r.utilization)),
  }));
}

/**
 * path_latency.csv -> per-system delivered-traffic-weighted latency CDF:
 * F(x) is the fraction of delivered volume that experienced latency <= x.
 */
export function latencyCdf(input: CsvInput): CdfSeries[] {
  const rows = readLatency(input.text, input.source);
  return sortedSystems(rows).map((system) => ({
    label: system,
    points: weightedCdf(
      rows
        .filter((r) => r.system === system)
        .map((r) => [r.latency, r.delivered] as [number, number]),
    ),
  }));
}

/** link_capacity.csv -> histogram of capacities over log10 decade buckets. */
export function capacityBuckets(input: CsvInput): HistogramBucket[] {
  const rows = readCapacity(input.text, input.source);
  return log10Histogram(rows.map((r) => r.capacity));
}

/** Several throughput.csv files -> one pooled-throughput CDF per file. */
export function multirunCdf(inputs: CsvInput[]): CdfSeries[] {
  return inputs.map((input) => ({
    label: basename(input.source).replace(/\.csv$/, ""),
    points: empiricalCdf(readThroughput(input.text, input.source).map((r) => r.throughput)),
  }));
}

function requireSingleInput(kind: FigureKind, inputs: CsvInput[]): CsvInput {
  if (inputs.length !== 1) {
    throw new SchemaError(`figure "${kind}" takes exactly one input CSV, got ${inputs.length}`);
  }
  return inputs[0] as CsvInput;
}

/** Render a figure from already-loaded CSV text. Pure aside from Date-free SVG assembly. */
export function renderFigure(kind: FigureKind, inputs: CsvInput[], style: Style): string {
  switch (kind) {
    case "throughput_ts":
      return lineChart(
        throughputSeries(requireSingleInput(kind, inputs)),
        "step",
        "throughput",
        style,
      );
    case "throughput_cdf":
      return cdfChart(throughputCdf(requireSingleInput(kind, inputs)), "throughput", style);
    case "mlu_ts":
      return lineChart(
        mluSeries(requireSingleInput(kind, inputs)),
        "step",
        "max link utilization",
        style,
      );
    case "util_cdf":
      return cdfChart(
        utilizationCdf(requireSingleInput(kind, inputs)),
        "link utilization",
        style,
      );
    case "latency_cdf":
      return cdfChart(latencyCdf(requireSingleInput(kind, inputs)), "path latency", style);
    case "capacity_hist": {
      const bars: Bar[] = capacityBuckets(requireSingleInput(kind, inputs)).map((b) => ({
        lo: b.lo,
        hi: b.hi,
        value: b.count,
      }));
      return logHistogram(bars, "link capacity", "links", style);
    }
    case "multirun_cdf": {
      if (inputs.length === 0) {
        throw new SchemaError(`figure "multirun_cdf" needs at least one input CSV`);
      }
      return cdfChart(multirunCdf(inputs), "throughput", style);
    }
  }
}

/** Load the spec's input files, render, and write the SVG to spec.output. */
export function render(spec: PlotSpec): void {
  const inputs = spec.inputs.map((path) => ({
    source: path,
    text: readFileSync(path, "utf8"),
  }));
  writeFileSync(spec.output, renderFigure(spec.kind, inputs, spec.style), "utf8");
}

export type { CdfPoint };
