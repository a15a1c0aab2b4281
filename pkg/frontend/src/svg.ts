/**
 * Minimal deterministic SVG chart rendering.
 *
 * Everything is assembled from strings with a fixed palette, fixed
 * margins and value-derived coordinates rounded to a fixed precision,
 * so rendering the same data twice yields byte-identical output.
 */

export interface Style {
  width?: number;
  height?: number;
  title?: string;
}

export interface Series {
  label: string;
  points: Array<{ x: number; y: number }>;
}

export interface CdfSeries {
  label: string;
  points: Array<{ x: number; f: number }>;
}

export interface Bar {
  lo: number;
  hi: number;
  value: number;
}

interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

const MARGIN = { left: 64, right: 24, top: 40, bottom: 48 };

function frame(style: Style): Frame {
  const width = style.width ?? 720;
  const height = style.height ?? 440;
  return {
    width,
    height,
    left: MARGIN.left,
    right: width - MARGIN.right,
    top: MARGIN.top,
    bottom: height - MARGIN.bottom,
  };
}

function fmt(value: number): string {
  return value.toFixed(2);
}

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function tickLabel(value: number): string {
  if (value !== 0 && (Math.abs(value) >= 10_000 || Math.abs(value) < 0.01)) {
    return value.toExponential(1);
  }
  return String(Math.round(value * 1000) / 1000);
}

export interface Scale {
  (value: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const scale = ((value: number) => outLo + ((value - lo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  const count = 5;
  for (let i = 0; i <= count; i++) {
    ticks.push(lo + (span * i) / count);
  }
  scale.ticks = ticks;
  return scale;
}

export function log10Scale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new RangeError("log scale requires positive bounds");
  }
  const llo = Math.log10(lo);
  const span = Math.log10(hi) - llo || 1;
  const scale = ((value: number) =>
    outLo + ((Math.log10(value) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let d = Math.floor(llo); d <= Math.ceil(llo + span); d++) {
    const tick = 10 ** d;
    if (tick >= lo / 1.0001 && tick <= hi * 1.0001) {
      ticks.push(tick);
    }
  }
  scale.ticks = ticks.length > 0 ? ticks : [lo, hi];
  return scale;
}

function axes(
  f: Frame,
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
  title: string | undefined,
): string[] {
  const parts: string[] = [];
  parts.push(
    `<rect x="0" y="0" width="${f.width}" height="${f.height}" fill="#ffffff"/>`,
    `<line x1="${f.left}" y1="${f.bottom}" x2="${f.right}" y2="${f.bottom}" stroke="#333333"/>`,
    `<line x1="${f.left}" y1="${f.top}" x2="${f.left}" y2="${f.bottom}" stroke="#333333"/>`,
  );
  for (const tick of sx.ticks) {
    const x = fmt(sx(tick));
    parts.push(
      `<line x1="${x}" y1="${f.bottom}" x2="${x}" y2="${f.bottom + 5}" stroke="#333333"/>`,
      `<text x="${x}" y="${f.bottom + 20}" font-size="11" text-anchor="middle" fill="#333333">${tickLabel(tick)}</text>`,
    );
  }
  for (const tick of sy.ticks) {
    const y = fmt(sy(tick));
    parts.push(
      `<line x1="${f.left - 5}" y1="${y}" x2="${f.left}" y2="${y}" stroke="#333333"/>`,
      `<line x1="${f.left}" y1="${y}" x2="${f.right}" y2="${y}" stroke="#eeeeee"/>`,
      `<text x="${f.left - 9}" y="${Number(y) + 4}" font-size="11" text-anchor="end" fill="#333333">${tickLabel(tick)}</text>`,
    );
  }
  parts.push(
    `<text x="${(f.left + f.right) / 2}" y="${f.height - 10}" font-size="12" text-anchor="middle" fill="#333333">${escapeText(xLabel)}</text>`,
    `<text x="16" y="${(f.top + f.bottom) / 2}" font-size="12" text-anchor="middle" fill="#333333" transform="rotate(-90 16 ${(f.top + f.bottom) / 2})">${escapeText(yLabel)}</text>`,
  );
  if (title) {
    parts.push(
      `<text x="${(f.left + f.right) / 2}" y="22" font-size="14" text-anchor="middle" fill="#111111">${escapeText(title)}</text>`,
    );
  }
  return parts;
}

function legend(f: Frame, labels: string[]): string[] {
  const parts: string[] = [];
  labels.forEach((label, i) => {
    const y = f.top + 8 + i * 16;
    const color = PALETTE[i % PALETTE.length] as string;
    parts.push(
      `<line x1="${f.right - 150}" y1="${y}" x2="${f.right - 126}" y2="${y}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${f.right - 120}" y="${y + 4}" font-size="11" fill="#333333">${escapeText(label)}</text>`,
    );
  });
  return parts;
}

function document(f: Frame, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">`,
    ...body,
    `</svg>`,
    ``,
  ].join("\n");
}

function bounds(series: Series[]): { xLo: number; xHi: number; yLo: number; yHi: number } {
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (xs.length === 0) {
    return { xLo: 0, xHi: 1, yLo: 0, yHi: 1 };
  }
  return {
    xLo: Math.min(...xs),
    xHi: Math.max(...xs),
    yLo: Math.min(0, ...ys),
    yHi: Math.max(...ys),
  };
}

/** Connected line chart with point markers, one colored series per label. */
export function lineChart(series: Series[], xLabel: string, yLabel: string, style: Style): string {
  const f = frame(style);
  const b = bounds(series);
  const sx = linearScale(b.xLo, b.xHi, f.left, f.right);
  const sy = linearScale(b.yLo, b.yHi * 1.05 || 1, f.bottom, f.top);
  const parts = axes(f, sx, sy, xLabel, yLabel, style.title);
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length] as string;
    const coords = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`);
    if (coords.length > 1) {
      parts.push(
        `<polyline points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="2"/>`,
      );
    }
    for (const c of coords) {
      const [x, y] = c.split(",");
      parts.push(`<circle cx="${x}" cy="${y}" r="3" fill="${color}"/>`);
    }
  });
  parts.push(...legend(f, series.map((s) => s.label)));
  return document(f, parts);
}

/**
 * Empirical-CDF step chart: horizontal runs with vertical jumps at each
 * sample, rising to exactly 1.
 */
export function cdfChart(series: CdfSeries[], xLabel: string, style: Style): string {
  const f = frame(style);
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const xLo = xs.length > 0 ? Math.min(0, ...xs) : 0;
  const xHi = xs.length > 0 ? Math.max(...xs) : 1;
  const sx = linearScale(xLo, xHi || 1, f.left, f.right);
  const sy = linearScale(0, 1, f.bottom, f.top);
  const parts = axes(f, sx, sy, xLabel, "cumulative fraction", style.title);
  series.forEach((s, i) => {
    if (s.points.length === 0) {
      return;
    }
    const color = PALETTE[i % PALETTE.length] as string;
    let d = `M ${fmt(sx(xLo))} ${fmt(sy(0))}`;
    for (const p of s.points) {
      d += ` H ${fmt(sx(p.x))} V ${fmt(sy(p.f))}`;
    }
    d += ` H ${fmt(sx(xHi || 1))}`;
    parts.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="2"/>`);
  });
  parts.push(...legend(f, series.map((s) => s.label)));
  return document(f, parts);
}

/** Log-x histogram: one bar per bucket, bar spans the bucket's edges. */
export function logHistogram(bars: Bar[], xLabel: string, yLabel: string, style: Style): string {
  const f = frame(style);
  if (bars.length === 0) {
    return document(f, axes(f, linearScale(0, 1, f.left, f.right), linearScale(0, 1, f.bottom, f.top), xLabel, yLabel, style.title));
  }
  const lo = Math.min(...bars.map((b) => b.lo));
  const hi = Math.max(...bars.map((b) => b.hi));
  const top = Math.max(...bars.map((b) => b.value));
  const sx = log10Scale(lo, hi, f.left, f.right);
  const sy = linearScale(0, top * 1.05 || 1, f.bottom, f.top);
  const parts = axes(f, sx, sy, xLabel, yLabel, style.title);
  bars.forEach((bar) => {
    const x0 = sx(bar.lo) + 1;
    const x1 = sx(bar.hi) - 1;
    const y = sy(bar.value);
    parts.push(
      `<rect x="${fmt(x0)}" y="${fmt(y)}" width="${fmt(Math.max(1, x1 - x0))}" height="${fmt(f.bottom - y)}" fill="#1f77b4" stroke="#0d3a57"/>`,
    );
  });
  return document(f, parts);
}
