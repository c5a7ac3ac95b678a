/**
 * Raster rendering via pngjs: same layout as the SVG path, with a 5x7
 * bitmap font (uppercased) for titles, ticks and the legend.
 */

import { PNG } from "pngjs";

import {
  Figure,
  MARGIN,
  formatTick,
  makeTransform,
  renderPoints,
} from "./figure.js";

// each glyph: 7 rows of 5 bits, most significant bit = leftmost pixel
const GLYPHS: Record<string, number[]> = {
  A: [0x0e, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11],
  B: [0x1e, 0x11, 0x11, 0x1e, 0x11, 0x11, 0x1e],
  C: [0x0e, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0e],
  D: [0x1c, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1c],
  E: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f],
  F: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x10],
  G: [0x0e, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0f],
  H: [0x11, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11],
  I: [0x0e, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e],
  J: [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0c],
  K: [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
  L: [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1f],
  M: [0x11, 0x1b, 0x15, 0x15, 0x11, 0x11, 0x11],
  N: [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11],
  O: [0x0e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e],
  P: [0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10],
  Q: [0x0e, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0d],
  R: [0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11],
  S: [0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e],
  T: [0x1f, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
  U: [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e],
  V: [0x11, 0x11, 0x11, 0x11, 0x11, 0x0a, 0x04],
  W: [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0a],
  X: [0x11, 0x11, 0x0a, 0x04, 0x0a, 0x11, 0x11],
  Y: [0x11, 0x11, 0x0a, 0x04, 0x04, 0x04, 0x04],
  Z: [0x1f, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1f],
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  ",": [0x00, 0x00, 0x00, 0x00, 0x0c, 0x04, 0x08],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  "+": [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  "/": [0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10],
  "%": [0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03],
  "(": [0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02],
  ")": [0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08],
  ":": [0x00, 0x0c, 0x0c, 0x00, 0x0c, 0x0c, 0x00],
  " ": [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00],
};

type Rgb = [number, number, number];

function parseColor(hex: string): Rgb {
  const h = hex.replace("#", "");
  return [
    parseInt(h.slice(0, 2), 16),
    parseInt(h.slice(2, 4), 16),
    parseInt(h.slice(4, 6), 16),
  ];
}

class Raster {
  png: PNG;

  constructor(public width: number, public height: number) {
    this.png = new PNG({ width, height });
    this.png.data.fill(255);
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) {
      return;
    }
    const idx = (yi * this.width + xi) * 4;
    this.png.data[idx] = r;
    this.png.data[idx + 1] = g;
    this.png.data[idx + 2] = b;
    this.png.data[idx + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb, thick = 1): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, color);
      if (thick > 1) {
        this.set(xa + 1, ya, color);
        this.set(xa, ya + 1, color);
      }
      if (xa === xb && ya === yb) {
        break;
      }
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  dashedLine(x0: number, y0: number, x1: number, y1: number, color: Rgb): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0));
    for (let i = 0; i <= steps; i++) {
      if (i % 8 < 5) {
        this.set(x0 + ((x1 - x0) * i) / steps, y0 + ((y1 - y0) * i) / steps, color);
      }
    }
  }

  text(x: number, y: number, s: string, color: Rgb, align: "left" | "center" | "right" = "left"): void {
    const up = s.toUpperCase();
    const w = up.length * 6 - 1;
    let cx = align === "center" ? x - w / 2 : align === "right" ? x - w : x;
    for (const ch of up) {
      const glyph = GLYPHS[ch] ?? GLYPHS["."];
      for (let row = 0; row < 7; row++) {
        for (let col = 0; col < 5; col++) {
          if ((glyph[row] >> (4 - col)) & 1) {
            this.set(cx + col, y + row, color);
          }
        }
      }
      cx += 6;
    }
  }
}

const BLACK: Rgb = [40, 40, 40];
const GRID: Rgb = [221, 221, 221];
const GUIDE: Rgb = [136, 136, 136];

export function renderPng(fig: Figure, width = 820, height = 520): Buffer {
  const t = makeTransform(fig, width, height);
  const r = new Raster(width, height);
  const plotRight = width - MARGIN.right;
  const plotBottom = height - MARGIN.bottom;

  r.text(width / 2, 12, fig.title, BLACK, "center");
  const xScale = fig.xTickScale ?? 1;
  for (const v of t.xTicks) {
    const x = t.x(v);
    r.dashedLine(x, MARGIN.top, x, plotBottom, GRID);
    r.line(x, plotBottom, x, plotBottom + 4, BLACK);
    r.text(x, plotBottom + 8, formatTick(v * xScale), BLACK, "center");
  }
  for (const v of t.yTicks) {
    const y = t.y(v);
    r.dashedLine(MARGIN.left, y, plotRight, y, GRID);
    r.line(MARGIN.left - 4, y, MARGIN.left, y, BLACK);
    r.text(MARGIN.left - 8, y - 3, formatTick(v), BLACK, "right");
  }
  r.line(MARGIN.left, MARGIN.top, plotRight, MARGIN.top, BLACK);
  r.line(MARGIN.left, plotBottom, plotRight, plotBottom, BLACK);
  r.line(MARGIN.left, MARGIN.top, MARGIN.left, plotBottom, BLACK);
  r.line(plotRight, MARGIN.top, plotRight, plotBottom, BLACK);
  r.text((MARGIN.left + plotRight) / 2, height - 14, fig.xLabel, BLACK, "center");
  r.text(6, 14, fig.yLabel, BLACK, "left");

  for (const g of fig.guides) {
    const y = t.y(g.y);
    r.dashedLine(MARGIN.left, y, plotRight, y, GUIDE);
    r.text(plotRight - 4, y - 9, g.label, GUIDE, "right");
  }

  for (const s of fig.series) {
    const color = parseColor(s.color);
    const pts = renderPoints(s);
    for (let i = 1; i < pts.length; i++) {
      r.line(
        t.x(pts[i - 1][0]),
        t.y(pts[i - 1][1]),
        t.x(pts[i][0]),
        t.y(pts[i][1]),
        color,
        2
      );
    }
  }

  let ly = MARGIN.top + 10;
  for (const s of fig.series) {
    const color = parseColor(s.color);
    r.line(MARGIN.left + 12, ly + 3, MARGIN.left + 34, ly + 3, color, 2);
    r.text(MARGIN.left + 40, ly, s.label, BLACK);
    ly += 13;
  }

  return PNG.sync.write(r.png);
}
