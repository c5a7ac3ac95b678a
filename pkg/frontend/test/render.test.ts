import { describe, expect, it } from "vitest";

import { Figure, makeTransform, renderPoints } from "../src/figure.js";
import { renderPng } from "../src/png.js";
import { extractFigureData, renderSvg } from "../src/svg.js";

const FIG: Figure = {
  title: "Test figure",
  xLabel: "x",
  yLabel: "y",
  series: [
    { label: "up", color: "#2ca02c", points: [[0, 0], [1, 1], [2, 4]] },
    { label: "down", color: "#d62728", points: [[0, 4], [2, 0]] },
  ],
  guides: [{ y: 3, label: "limit" }],
};

describe("rendering", () => {
  it("svg embeds the exact data series", () => {
    const data = extractFigureData(renderSvg(FIG));
    expect(data.title).toBe("Test figure");
    expect(data.series).toEqual([
      { label: "up", points: [[0, 0], [1, 1], [2, 4]] },
      { label: "down", points: [[0, 4], [2, 0]] },
    ]);
    expect(data.guides).toEqual([{ label: "limit", y: 3 }]);
  });

  it("regenerating the svg from the same inputs is byte-identical", () => {
    expect(renderSvg(FIG)).toBe(renderSvg(FIG));
  });

  it("transform maps data corners onto the plot box", () => {
    const t = makeTransform(FIG, 800, 500);
    expect(t.x(t.xRange[0])).toBeCloseTo(72); // left margin
    expect(t.x(t.xRange[1])).toBeCloseTo(800 - 16);
    expect(t.y(t.yRange[0])).toBeGreaterThan(t.y(t.yRange[1])); // y grows upward
  });

  it("step rendering starts the staircase at zero", () => {
    const pts = renderPoints({
      label: "s",
      color: "#000",
      step: true,
      points: [
        [1, 0.5],
        [2, 1.0],
      ],
    });
    expect(pts).toEqual([
      [1, 0],
      [1, 0.5],
      [2, 0.5],
      [2, 1.0],
    ]);
  });

  it("png has the requested dimensions and draws ink", () => {
    const buf = renderPng(FIG, 400, 300);
    // width and height live in the IHDR chunk at fixed offsets
    expect(buf.readUInt32BE(16)).toBe(400);
    expect(buf.readUInt32BE(20)).toBe(300);
    const { PNG } = require("pngjs");
    const img = PNG.sync.read(buf);
    let colored = 0;
    for (let i = 0; i < img.data.length; i += 4) {
      if (img.data[i] !== 255 || img.data[i + 1] !== 255 || img.data[i + 2] !== 255) {
        colored++;
      }
    }
    expect(colored).toBeGreaterThan(500);
  });
});
