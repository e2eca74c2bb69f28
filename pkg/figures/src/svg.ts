/**
 * Deterministic SVG chart scenes.
 *
 * Hand-rolled on purpose: the output must be byte-identical across runs, so
 * everything is fixed — palette, fonts, margins, tick rules, and numeric
 * formatting. No timestamps, no random ids, no environment-dependent state.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Axis {
  label: string;
  log?: boolean;
  range?: [number, number];
}

export interface Panel {
  title: string;
  x: Axis;
  y: Axis;
  series: Series[];
}

/** Okabe-Ito colorblind-safe palette; series pick colors by index. */
export const PALETTE = [
  "#0072b2",
  "#d55e00",
  "#009e73",
  "#cc79a7",
  "#e69f00",
  "#56b4e9",
  "#000000",
];

const PANEL_WIDTH = 430;
const PANEL_HEIGHT = 330;
const MARGIN = { left: 64, right: 14, top: 30, bottom: 48 };
const FONT = "DejaVu Sans, sans-serif";

/** Fixed two-decimal coordinate formatting keeps the text stable. */
function px(value: number): string {
  return value.toFixed(2);
}

/** Tick label: up to 6 significant digits, trailing zeros stripped. */
function tickLabel(value: number): string {
  if (value !== 0 && (Math.abs(value) >= 1e5 || Math.abs(value) < 1e-3)) {
    const exp = Math.floor(Math.log10(Math.abs(value)));
    const mantissa = value / 10 ** exp;
    const m = String(parseFloat(mantissa.toPrecision(3)));
    return m === "1" ? `1e${exp}` : `${m}e${exp}`;
  }
  return String(parseFloat(value.toPrecision(6)));
}

function finiteExtent(values: number[], log: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (log && v <= 0) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) {
    throw new Error("series carry no plottable values");
  }
  if (lo === hi) {
    const pad = log ? 0 : Math.max(1, Math.abs(lo) * 0.1);
    lo = log ? lo / 10 : lo - pad;
    hi = log ? hi * 10 : hi + pad;
  }
  return [lo, hi];
}

function linearTicks(lo: number, hi: number): number[] {
  const span = hi - lo;
  const raw = span / 5;
  const mag = 10 ** Math.floor(Math.log10(raw));
  let step = 10 * mag;
  for (const m of [1, 2, 5]) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    // snap to the grid to avoid 0.30000000000000004-style labels
    ticks.push(parseFloat(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e += 1) {
    ticks.push(10 ** e);
  }
  if (ticks.length < 2) {
    return [lo, hi];
  }
  return ticks;
}

interface Scale {
  map(value: number): number;
  ticks: number[];
  lo: number;
  hi: number;
}

function buildScale(axis: Axis, values: number[], outLo: number, outHi: number): Scale {
  const log = axis.log === true;
  const [lo, hi] = axis.range ?? finiteExtent(values, log);
  if (log && lo <= 0) {
    throw new Error(`log axis "${axis.label}" needs positive bounds, got ${lo}`);
  }
  const t = (v: number) => (log ? Math.log10(v) : v);
  const span = t(hi) - t(lo);
  return {
    map: (v: number) => outLo + ((t(v) - t(lo)) / span) * (outHi - outLo),
    ticks: log ? logTicks(lo, hi) : linearTicks(lo, hi),
    lo,
    hi,
  };
}

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/**
 * Split a series into polyline segments, breaking at values a scale cannot
 * place (non-finite, or nonpositive on a log axis), and express each segment
 * in pixel coordinates.
 */
function segments(series: Series, sx: Scale, sy: Scale, logY: boolean): string[] {
  const out: string[] = [];
  let current: string[] = [];
  for (let i = 0; i < series.x.length; i += 1) {
    const x = series.x[i];
    const y = series.y[i];
    const drawable =
      Number.isFinite(x) && Number.isFinite(y) && (!logY || y > 0);
    if (!drawable) {
      if (current.length > 1) out.push(current.join(" "));
      current = [];
      continue;
    }
    current.push(`${px(sx.map(x))},${px(sy.map(y))}`);
  }
  if (current.length > 1) out.push(current.join(" "));
  return out;
}

function renderPanel(panel: Panel, index: number, originX: number): string {
  if (panel.series.length === 0) {
    throw new Error(`panel "${panel.title}" has no series`);
  }
  const plotLo = { x: originX + MARGIN.left, y: MARGIN.top };
  const plotHi = {
    x: originX + PANEL_WIDTH - MARGIN.right,
    y: PANEL_HEIGHT - MARGIN.bottom,
  };
  const sx = buildScale(
    panel.x,
    panel.series.flatMap((s) => s.x),
    plotLo.x,
    plotHi.x
  );
  const sy = buildScale(
    panel.y,
    panel.series.flatMap((s) => s.y),
    plotHi.y,
    plotLo.y
  );

  const parts: string[] = [];
  parts.push(
    `<rect x="${px(plotLo.x)}" y="${px(plotLo.y)}" width="${px(plotHi.x - plotLo.x)}" ` +
      `height="${px(plotHi.y - plotLo.y)}" fill="none" stroke="#444444" stroke-width="1"/>`
  );

  for (const tick of sx.ticks) {
    if (tick < sx.lo - 1e-12 || tick > sx.hi + 1e-12) continue;
    const x = px(sx.map(tick));
    parts.push(
      `<line x1="${x}" y1="${px(plotLo.y)}" x2="${x}" y2="${px(plotHi.y)}" ` +
        `stroke="#dddddd" stroke-width="0.6"/>`
    );
    parts.push(
      `<text x="${x}" y="${px(plotHi.y + 16)}" font-family="${FONT}" font-size="11" ` +
        `fill="#222222" text-anchor="middle">${tickLabel(tick)}</text>`
    );
  }
  for (const tick of sy.ticks) {
    if (tick < sy.lo - 1e-12 || tick > sy.hi + 1e-12) continue;
    const y = px(sy.map(tick));
    parts.push(
      `<line x1="${px(plotLo.x)}" y1="${y}" x2="${px(plotHi.x)}" y2="${y}" ` +
        `stroke="#dddddd" stroke-width="0.6"/>`
    );
    parts.push(
      `<text x="${px(plotLo.x - 6)}" y="${px(sy.map(tick) + 3.5)}" font-family="${FONT}" ` +
        `font-size="11" fill="#222222" text-anchor="end">${tickLabel(tick)}</text>`
    );
  }

  const clipId = `plot-${index}`;
  parts.push(
    `<clipPath id="${clipId}"><rect x="${px(plotLo.x)}" y="${px(plotLo.y)}" ` +
      `width="${px(plotHi.x - plotLo.x)}" height="${px(plotHi.y - plotLo.y)}"/></clipPath>`
  );
  panel.series.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length];
    for (const points of segments(series, sx, sy, panel.y.log === true)) {
      parts.push(
        `<polyline points="${points}" fill="none" stroke="${color}" stroke-width="1.6" ` +
          `clip-path="url(#${clipId})"/>`
      );
    }
  });

  panel.series.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length];
    const ly = plotLo.y + 14 + si * 15;
    const lx = plotHi.x - 150;
    parts.push(
      `<line x1="${px(lx)}" y1="${px(ly - 3.5)}" x2="${px(lx + 22)}" y2="${px(ly - 3.5)}" ` +
        `stroke="${color}" stroke-width="1.6"/>`
    );
    parts.push(
      `<text x="${px(lx + 27)}" y="${px(ly)}" font-family="${FONT}" font-size="11" ` +
        `fill="#222222">${escapeText(series.label)}</text>`
    );
  });

  const centerX = (plotLo.x + plotHi.x) / 2;
  parts.push(
    `<text x="${px(centerX)}" y="${px(MARGIN.top - 10)}" font-family="${FONT}" ` +
      `font-size="13" fill="#000000" text-anchor="middle">${escapeText(panel.title)}</text>`
  );
  parts.push(
    `<text x="${px(centerX)}" y="${px(PANEL_HEIGHT - 10)}" font-family="${FONT}" ` +
      `font-size="12" fill="#000000" text-anchor="middle">${escapeText(panel.x.label)}</text>`
  );
  const labelY = (plotLo.y + plotHi.y) / 2;
  parts.push(
    `<text x="${px(originX + 16)}" y="${px(labelY)}" font-family="${FONT}" font-size="12" ` +
      `fill="#000000" text-anchor="middle" ` +
      `transform="rotate(-90 ${px(originX + 16)} ${px(labelY)})">${escapeText(panel.y.label)}</text>`
  );
  return parts.join("\n");
}

/** Compose one or more panels side by side into a standalone SVG document. */
export function renderFigure(panels: Panel[]): string {
  if (panels.length === 0) {
    throw new Error("a figure needs at least one panel");
  }
  const width = PANEL_WIDTH * panels.length;
  const body = panels.map((panel, i) => renderPanel(panel, i, i * PANEL_WIDTH));
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_HEIGHT}" ` +
      `viewBox="0 0 ${width} ${PANEL_HEIGHT}">`,
    `<rect width="${width}" height="${PANEL_HEIGHT}" fill="#ffffff"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
