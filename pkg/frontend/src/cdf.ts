/**
 * Rate-CDF comparison figure: one staircase per protocol mode for one
 * operator, x in Mbit/s against cumulative probability.
 */

import { Figure, MODE_COLORS } from "./figure.js";
import { ALL_MODES, loadCdf } from "./report.js";

export function buildCdfFigure(
  dir: string,
  operator: string,
  modes: string[] = [...ALL_MODES],
  xLog = false
): Figure {
  if (modes.length === 0) {
    throw new Error("at least one mode is required");
  }
  if (operator !== "A" && operator !== "B") {
    throw new Error(`operator must be A or B, got '${operator}'`);
  }
  const series = modes.map((mode) => {
    const cdf = loadCdf(dir, operator, mode);
    return {
      label: mode,
      color: MODE_COLORS[mode] ?? "#555",
      // keep raw bit/s so the plotted data matches the CSV exactly;
      // ticks display Mbit/s via the axis scale
      points: cdf.rates.map((r, i) => [r, cdf.cdf[i]] as [number, number]),
      step: true,
    };
  });
  return {
    title: `UE rate distribution, operator ${operator}`,
    xLabel: "rate (Mbit/s)",
    yLabel: "cumulative probability",
    series,
    guides: [],
    xLog,
    yRange: [0, 1],
    xTickScale: 1e-6,
  };
}
