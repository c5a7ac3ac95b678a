/**
 * Linear-interpolation empirical quantile, the same definition the
 * simulator reports: fractional rank (n - 1) * p / 100 over the sorted
 * samples, interpolating between the two closest ranks.
 */
export function percentile(samples: number[], p: number): number {
  if (samples.length === 0) {
    throw new Error("percentile of an empty sample set");
  }
  if (!(p > 0 && p < 100)) {
    throw new Error("p must be in the open interval (0, 100)");
  }
  const xs = [...samples].sort((a, b) => a - b);
  const rank = ((xs.length - 1) * p) / 100;
  const lo = Math.floor(rank);
  const hi = Math.ceil(rank);
  const frac = rank - lo;
  return xs[lo] * (1 - frac) + xs[hi] * frac;
}
