import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { buildLedgerFigure } from "../src/ledger.js";
import { extractFigureData, renderSvg } from "../src/svg.js";

const S1 = join(__dirname, "fixtures", "s1");
const S2 = join(__dirname, "fixtures", "s2");

describe("ledger figure", () => {
  it("no-sharing mode is a flat zero line", () => {
    const fig = buildLedgerFigure(S1, "no-sharing");
    const ys = fig.series[0].points.map((p) => p[1]);
    expect(ys.every((y) => y === 0)).toBe(true);
  });

  it("combined balance stays within the credit-limit band", () => {
    const fig = buildLedgerFigure(S2, "combined");
    const limit = fig.guides[0].y;
    expect(limit).toBeGreaterThan(0);
    for (const [, y] of fig.series[0].points) {
      expect(Math.abs(y)).toBeLessThanOrEqual(limit);
    }
    // and the trajectory is not trivially flat for the favor-heavy run
    const ys = fig.series[0].points.map((p) => p[1]);
    expect(Math.max(...ys.map(Math.abs))).toBeGreaterThan(0);
  });

  it("guides track a custom credit limit from the config", () => {
    const dir = mkdtempSync(join(tmpdir(), "ledger-"));
    writeFileSync(
      join(dir, "stages.csv"),
      "mode,stage,balance\ncombined,0,1\ncombined,1,-2\n"
    );
    writeFileSync(
      join(dir, "summary.json"),
      JSON.stringify({ config: { n_stages: 2, strategy: { credit_limit_units: 7 } } })
    );
    const fig = buildLedgerFigure(dir, "combined");
    expect(fig.guides.map((g) => g.y)).toEqual([7, -7]);
    const data = extractFigureData(renderSvg(fig));
    expect(data.guides.map((g) => g.y)).toEqual([7, -7]);
  });

  it("null credit limit resolves to half the horizon", () => {
    const fig = buildLedgerFigure(S2, "combined");
    // fixture ran 250 stages with the default (null) limit
    expect(fig.guides[0].y).toBe(125);
  });

  it("unknown mode is rejected with the file named", () => {
    expect(() => buildLedgerFigure(S1, "bogus")).toThrow(/no 'bogus' rows/);
  });
});
