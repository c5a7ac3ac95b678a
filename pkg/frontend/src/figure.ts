/**
 * Figure model shared by the SVG and PNG renderers. Series points stay in
 * data coordinates; the renderers apply one affine (or log-x) transform,
 * so the underlying data survives verbatim into the output.
 */

export interface Series {
  label: string;
  color: string;
  points: Array<[number, number]>;
  /** render as a pre-step staircase starting from y = 0 */
  step?: boolean;
}

export interface Guide {
  y: number;
  label: string;
  color?: string;
}

export interface Figure {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  guides: Guide[];
  xLog?: boolean;
  /** fixed y range (e.g. [0, 1] for a CDF); autoscaled when absent */
  yRange?: [number, number];
  /** display-only multiplier for x tick labels (data stays raw) */
  xTickScale?: number;
}

export const MODE_COLORS: Record<string, string> = {
  "no-sharing": "#d62728",
  "one-shot-only": "#1f77b4",
  combined: "#2ca02c",
  "full-cooperation": "#9467bd",
};

export const MARGIN = { left: 72, right: 16, top: 34, bottom: 48 };

export interface Transform {
  x: (v: number) => number;
  y: (v: number) => number;
  xTicks: number[];
  yTicks: number[];
  xRange: [number, number];
  yRange: [number, number];
}

function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const raw = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    const v = Math.pow(10, e);
    if (v >= lo * 0.999 && v <= hi * 1.001) {
      ticks.push(v);
    }
  }
  return ticks.length >= 2 ? ticks : niceTicks(lo, hi);
}

export function renderPoints(s: Series): Array<[number, number]> {
  if (!s.step || s.points.length === 0) {
    return s.points;
  }
  const out: Array<[number, number]> = [[s.points[0][0], 0]];
  for (let i = 0; i < s.points.length; i++) {
    const [x, y] = s.points[i];
    out.push([x, y]);
    if (i + 1 < s.points.length) {
      out.push([s.points[i + 1][0], y]);
    }
  }
  return out;
}

export function makeTransform(fig: Figure, width: number, height: number): Transform {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of fig.series) {
    for (const [x, y] of renderPoints(s)) {
      xs.push(x);
      ys.push(y);
    }
  }
  for (const g of fig.guides) {
    ys.push(g.y);
  }
  if (xs.length === 0) {
    xs.push(0, 1);
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (fig.xLog) {
    xLo = Math.max(xLo, Math.min(...xs.filter((v) => v > 0), 1e-3));
  }
  if (xHi === xLo) {
    xHi = xLo + 1;
    xLo = xLo - 1;
  }
  let [yLo, yHi] = fig.yRange ?? [Math.min(...ys, 0), Math.max(...ys, 0)];
  if (yHi === yLo) {
    yHi += 1;
    yLo -= 1;
  }
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const fx = fig.xLog
    ? (v: number) =>
        MARGIN.left +
        ((Math.log10(Math.max(v, xLo)) - Math.log10(xLo)) /
          (Math.log10(xHi) - Math.log10(xLo))) *
          plotW
    : (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const fy = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;
  return {
    x: fx,
    y: fy,
    xTicks: fig.xLog ? logTicks(xLo, xHi) : niceTicks(xLo, xHi),
    yTicks: niceTicks(yLo, yHi),
    xRange: [xLo, xHi],
    yRange: [yLo, yHi],
  };
}

export function formatTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-2) {
    return v.toExponential(0).replace("+", "");
  }
  return Number(v.toPrecision(4)).toString();
}
