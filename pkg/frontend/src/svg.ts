/**
 * SVG rendering. The figure's raw data series are embedded verbatim in a
 * <desc id="figure-data"> JSON block so consumers (and tests) can verify
 * plotted values without touching pixels.
 */

import {
  Figure,
  MARGIN,
  formatTick,
  makeTransform,
  renderPoints,
} from "./figure.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(fig: Figure, width = 820, height = 520): string {
  const t = makeTransform(fig, width, height);
  const plotRight = width - MARGIN.right;
  const plotBottom = height - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`
  );
  const data = {
    title: fig.title,
    series: fig.series.map((s) => ({ label: s.label, points: s.points })),
    guides: fig.guides.map((g) => ({ label: g.label, y: g.y })),
  };
  parts.push(`<desc id="figure-data">${esc(JSON.stringify(data))}</desc>`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">${esc(fig.title)}</text>`
  );

  // axes, ticks, grid
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotRight - MARGIN.left}" ` +
      `height="${plotBottom - MARGIN.top}" fill="none" stroke="#333"/>`
  );
  const xScale = fig.xTickScale ?? 1;
  for (const v of t.xTicks) {
    const x = t.x(v);
    parts.push(`<line x1="${x}" y1="${plotBottom}" x2="${x}" y2="${plotBottom + 5}" stroke="#333"/>`);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${plotBottom}" stroke="#ddd" stroke-dasharray="2,3"/>`
    );
    parts.push(
      `<text x="${x}" y="${plotBottom + 18}" text-anchor="middle">${esc(formatTick(v * xScale))}</text>`
    );
  }
  for (const v of t.yTicks) {
    const y = t.y(v);
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${y}" x2="${MARGIN.left}" y2="${y}" stroke="#333"/>`);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${plotRight}" y2="${y}" stroke="#ddd" stroke-dasharray="2,3"/>`
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end">${esc(formatTick(v))}</text>`
    );
  }
  parts.push(
    `<text x="${(MARGIN.left + plotRight) / 2}" y="${height - 10}" text-anchor="middle">${esc(fig.xLabel)}</text>`
  );
  parts.push(
    `<text x="16" y="${(MARGIN.top + plotBottom) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(MARGIN.top + plotBottom) / 2})">${esc(fig.yLabel)}</text>`
  );

  for (const g of fig.guides) {
    const y = t.y(g.y);
    const color = g.color ?? "#888";
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${plotRight}" y2="${y}" stroke="${color}" stroke-dasharray="6,4"/>`
    );
    parts.push(`<text x="${plotRight - 4}" y="${y - 4}" text-anchor="end" fill="${color}">${esc(g.label)}</text>`);
  }

  for (const s of fig.series) {
    const pts = renderPoints(s)
      .map(([x, y]) => `${t.x(x).toFixed(2)},${t.y(y).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline data-series="${esc(s.label)}" points="${pts}" fill="none" ` +
        `stroke="${s.color}" stroke-width="1.6"/>`
    );
  }

  // legend
  let ly = MARGIN.top + 14;
  for (const s of fig.series) {
    const lx = MARGIN.left + 12;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 24}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 30}" y="${ly}">${esc(s.label)}</text>`);
    ly += 16;
  }

  parts.push("</svg>");
  return parts.join("\n");
}

/** Pull the embedded data series back out of a rendered SVG. */
export function extractFigureData(svg: string): {
  title: string;
  series: Array<{ label: string; points: Array<[number, number]> }>;
  guides: Array<{ label: string; y: number }>;
} {
  const m = svg.match(/<desc id="figure-data">([\s\S]*?)<\/desc>/);
  if (!m) {
    throw new Error("SVG carries no figure-data block");
  }
  const json = m[1].replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
  return JSON.parse(json);
}
