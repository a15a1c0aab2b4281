/**
 * Empirical distributions for the CDF and histogram figures.
 *
 * CDFs are exact step functions over the samples: one point per
 * distinct x holding the cumulative fraction at-or-below it, and the
 * final fraction is exactly 1 at the maximum sample (integer counts or
 * a total-weight division of the full sum, never an accumulation that
 * could fall short of 1).
 */

export interface CdfPoint {
  /** sample value */
  x: number;
  /** fraction of mass at or below x */
  f: number;
}

/** Unweighted empirical CDF; one point per distinct sample. */
export function empiricalCdf(values: number[]): CdfPoint[] {
  return weightedCdf(values.map((v) => [v, 1]));
}

/** Mass-weighted empirical CDF; zero-weight samples contribute nothing. */
export function weightedCdf(samples: Array<[number, number]>): CdfPoint[] {
  const kept = samples.filter(([, w]) => w > 0);
  if (kept.length === 0) {
    return [];
  }
  kept.sort((a, b) => a[0] - b[0]);
  const total = kept.reduce((acc, [, w]) => acc + w, 0);
  const points: CdfPoint[] = [];
  let cumulative = 0;
  for (let i = 0; i < kept.length; i++) {
    const [x, w] = kept[i] as [number, number];
    cumulative += w;
    const next = kept[i + 1];
    if (next !== undefined && next[0] === x) {
      continue; // merge equal x into one jump
    }
    // the last point divides the full sum by itself: exactly 1
    points.push({ x, f: i === kept.length - 1 ? 1 : cumulative / total });
  }
  return points;
}

export interface HistogramBucket {
  /** inclusive lower edge */
  lo: number;
  /** exclusive upper edge */
  hi: number;
  count: number;
}

/**
 * Decade buckets starting at the minimum value: [min*10^k, min*10^(k+1)).
 * Mirrors the simulator's capacity histogram so the figure matches the
 * emitted topology summary.
 */
export function log10Histogram(values: number[]): HistogramBucket[] {
  if (values.length === 0) {
    return [];
  }
  for (const v of values) {
    if (!(v > 0)) {
      throw new RangeError(`histogram values must be positive, got ${v}`);
    }
  }
  const min = Math.min(...values);
  const buckets: HistogramBucket[] = [];
  for (const v of values) {
    let k = 0;
    let lo = min;
    while (v >= lo * 10) {
      lo *= 10;
      k += 1;
    }
    while (buckets.length <= k) {
      const edge = min * 10 ** buckets.length;
      buckets.push({ lo: edge, hi: edge * 10, count: 0 });
    }
    (buckets[k] as HistogramBucket).count += 1;
  }
  return buckets;
}
