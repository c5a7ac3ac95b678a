import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { buildCdfFigure } from "../src/cdf.js";
import { renderPoints } from "../src/figure.js";
import { percentile } from "../src/percentile.js";
import { numericColumn, readCsv } from "../src/csv.js";
import { extractFigureData, renderSvg } from "../src/svg.js";

const S1 = join(__dirname, "fixtures", "s1");
const MODES = ["no-sharing", "one-shot-only", "combined", "full-cooperation"];

describe("cdf figure from the scenario-1 report", () => {
  it("produces one curve per mode (four curves)", () => {
    const fig = buildCdfFigure(S1, "A", MODES);
    expect(fig.series.map((s) => s.label)).toEqual(MODES);
    const svg = renderSvg(fig);
    expect((svg.match(/<polyline /g) ?? []).length).toBe(4);
    for (const m of MODES) {
      expect(svg).toContain(`data-series="${m}"`);
      expect(svg).toContain(`>${m}</text>`); // legend entry
    }
  });

  it("plotted series match the CSV data and percentiles exactly", () => {
    const fig = buildCdfFigure(S1, "A", MODES);
    const embedded = extractFigureData(renderSvg(fig));
    const summary = JSON.parse(readFileSync(join(S1, "summary.json"), "utf8"));
    for (const series of embedded.series) {
      const path = join(S1, `cdf_A_${series.label}.csv`);
      const table = readCsv(path);
      const csvRates = numericColumn(table, "rate_bps", path);
      const plottedRates = series.points.map((p) => p[0]);
      expect(plottedRates).toEqual(csvRates);
      // spot-check p10/p50: identical through the same quantile rule
      expect(percentile(plottedRates, 10)).toBe(percentile(csvRates, 10));
      expect(percentile(plottedRates, 50)).toBe(percentile(csvRates, 50));
      // and consistent with what the simulator reported
      const entry = summary.results.find(
        (e: any) => e.operator === "A" && e.mode === series.label
      );
      expect(percentile(plottedRates, 10)).toBeCloseTo(entry.p10, 3);
      expect(percentile(plottedRates, 50)).toBeCloseTo(entry.p50, 3);
    }
  });

  it("cdf columns are plotted unchanged on the y axis", () => {
    const fig = buildCdfFigure(S1, "B", ["combined"]);
    const path = join(S1, "cdf_B_combined.csv");
    const table = readCsv(path);
    expect(fig.series[0].points.map((p) => p[1])).toEqual(
      numericColumn(table, "cdf", path)
    );
  });

  it("rejects an empty mode list", () => {
    expect(() => buildCdfFigure(S1, "A", [])).toThrow(/at least one mode/);
  });

  it("rejects unknown operators", () => {
    expect(() => buildCdfFigure(S1, "C", MODES)).toThrow(/operator must be A or B/);
  });

  it("names the file when a mode's CSV is absent", () => {
    expect(() => buildCdfFigure(S1, "A", ["bogus-mode"])).toThrow(
      /missing report file.*cdf_A_bogus-mode\.csv/
    );
  });

  it("renders a single-sample CDF as a step from 0 to 1", () => {
    const dir = mkdtempSync(join(tmpdir(), "cdf-"));
    writeFileSync(join(dir, "cdf_A_combined.csv"), "rate_bps,cdf\n5000000.0,1.0\n");
    const fig = buildCdfFigure(dir, "A", ["combined"]);
    expect(renderPoints(fig.series[0])).toEqual([
      [5000000.0, 0],
      [5000000.0, 1.0],
    ]);
  });
});
