import { describe, expect, it } from "vitest";

import { empiricalCdf, log10Histogram, weightedCdf } from "../src/stats.js";

describe("weightedCdf", () => {
  it("puts 75% of mass at or below 1 for samples (1, w=3) and (2, w=1)", () => {
    const points = weightedCdf([
      [1, 3],
      [2, 1],
    ]);
    expect(points).toHaveLength(2);
    expect(points[0]?.x).toBe(1);
    expect(points[0]?.f).toBe(0.75);
    expect(points[1]?.x).toBe(2);
    expect(points[1]?.f).toBe(1);
  });

  it("reaches exactly 1.0 at the maximum sample even with awkward weights", () => {
    const samples: Array<[number, number]> = [];
    for (let i = 0; i < 50; i++) {
      samples.push([Math.sin(i) + 2, 0.1 + (i % 7) / 3]);
    }
    const points = weightedCdf(samples);
    const last = points[points.length - 1];
    expect(last?.f).toBe(1);
    expect(last?.x).toBe(Math.max(...samples.map(([x]) => x)));
  });

  it("merges samples sharing an x into a single jump", () => {
    const points = weightedCdf([
      [2, 1],
      [1, 1],
      [2, 2],
    ]);
    expect(points).toEqual([
      { x: 1, f: 0.25 },
      { x: 2, f: 1 },
    ]);
  });

  it("ignores zero- and negative-weight samples", () => {
    const points = weightedCdf([
      [5, 0],
      [1, 2],
      [9, -3],
    ]);
    expect(points).toEqual([{ x: 1, f: 1 }]);
  });

  it("returns no points when nothing carries weight", () => {
    expect(weightedCdf([])).toEqual([]);
    expect(weightedCdf([[1, 0]])).toEqual([]);
  });

  it("is monotone in x and f", () => {
    const samples: Array<[number, number]> = [];
    for (let i = 0; i < 200; i++) {
      samples.push([((i * 7919) % 101) / 10, ((i * 31) % 13) + 0.5]);
    }
    const points = weightedCdf(samples);
    for (let i = 1; i < points.length; i++) {
      expect(points[i]!.x).toBeGreaterThan(points[i - 1]!.x);
      expect(points[i]!.f).toBeGreaterThan(points[i - 1]!.f);
    }
    expect(points[points.length - 1]?.f).toBe(1);
  });
});

describe("empiricalCdf", () => {
  it("collapses identical samples to one step: all-0.5 jumps once at 0.5", () => {
    expect(empiricalCdf([0.5, 0.5, 0.5, 0.5])).toEqual([{ x: 0.5, f: 1 }]);
  });

  it("weights every sample equally", () => {
    expect(empiricalCdf([3, 1, 2, 4])).toEqual([
      { x: 1, f: 0.25 },
      { x: 2, f: 0.5 },
      { x: 3, f: 0.75 },
      { x: 4, f: 1 },
    ]);
  });
});

describe("log10Histogram", () => {
  it("buckets by decades anchored at the minimum value", () => {
    const buckets = log10Histogram([34, 50, 340, 999, 3400]);
    expect(buckets).toEqual([
      { lo: 34, hi: 340, count: 2 },
      { lo: 340, hi: 3400, count: 2 },
      { lo: 3400, hi: 34000, count: 1 },
    ]);
  });

  it("treats the lower edge as inclusive and the upper as exclusive", () => {
    const buckets = log10Histogram([1, 9.999, 10]);
    expect(buckets).toEqual([
      { lo: 1, hi: 10, count: 2 },
      { lo: 10, hi: 100, count: 1 },
    ]);
  });

  it("rejects non-positive values", () => {
    expect(() => log10Histogram([10, 0])).toThrow(RangeError);
    expect(() => log10Histogram([-5])).toThrow(/positive/);
  });

  it("returns no buckets for no values", () => {
    expect(log10Histogram([])).toEqual([]);
  });
});
