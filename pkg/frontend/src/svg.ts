/**
 * Deterministic SVG scene builder: no timestamps, no random ids, fixed
 * numeric formatting, styling chosen by a hash of each curve's label.
 * Output is a standalone vector file suitable for publication.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Whisker {
  x: number;
  lo: number;
  hi: number;
}

export interface Curve {
  label: string;
  points: Point[];
  whiskers?: Whisker[];
}

export interface Overlay {
  label: string;
  y: number;
}

export interface FigureLayout {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
}

const WIDTH = 760;
const HEIGHT = 540;
const MARGIN = { left: 86, right: 24, top: 46, bottom: 62 };

const PALETTE = [
  "#0072b2", "#d55e00", "#009e73", "#cc79a7",
  "#e69f00", "#56b4e9", "#888888", "#000000",
];
const MARKERS = ["circle", "square", "diamond", "triangle"] as const;

export function hashLabel(label: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < label.length; i++) {
    h ^= label.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h;
}

function fmt(v: number): string {
  return v.toFixed(2);
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((c) => c * mag);
  const step = candidates.find((c) => c >= rawStep) ?? 10 * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    ticks.push(Math.abs(v) < 1e-12 ? 0 : v);
  }
  return ticks;
}

function tickLabel(v: number): string {
  const text = v.toPrecision(6);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

class Scale {
  constructor(
    private lo: number, private hi: number,
    private outLo: number, private outHi: number,
    private log: boolean,
  ) {}

  map(v: number): number {
    const a = this.log ? Math.log10(v) : v;
    const lo = this.log ? Math.log10(this.lo) : this.lo;
    const hi = this.log ? Math.log10(this.hi) : this.hi;
    const u = hi === lo ? 0.5 : (a - lo) / (hi - lo);
    return this.outLo + u * (this.outHi - this.outLo);
  }
}

function marker(kind: (typeof MARKERS)[number], x: number, y: number,
                color: string): string {
  const r = 3.4;
  switch (kind) {
    case "circle":
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${color}"/>`;
    case "square":
      return `<rect x="${fmt(x - r)}" y="${fmt(y - r)}" width="${fmt(2 * r)}" `
        + `height="${fmt(2 * r)}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M ${fmt(x)} ${fmt(y - r)} L ${fmt(x + r)} ${fmt(y)} `
        + `L ${fmt(x)} ${fmt(y + r)} L ${fmt(x - r)} ${fmt(y)} Z" fill="${color}"/>`;
    case "triangle":
      return `<path d="M ${fmt(x)} ${fmt(y - r)} L ${fmt(x + r)} ${fmt(y + r)} `
        + `L ${fmt(x - r)} ${fmt(y + r)} Z" fill="${color}"/>`;
  }
}

export function renderFigure(
  curves: Curve[], overlays: Overlay[], layout: FigureLayout,
): string {
  const xs = curves.flatMap((c) => c.points.map((p) => p.x));
  const ys = curves.flatMap((c) => c.points.map((p) => p.y))
    .concat(curves.flatMap((c) => (c.whiskers ?? []).flatMap((w) => [w.lo, w.hi])))
    .concat(overlays.map((o) => o.y))
    .filter((v) => !layout.logY || v > 0);
  if (xs.length === 0 || ys.length === 0) {
    throw new Error("no data: nothing to plot");
  }

  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  const pad = 0.04 * (xHi - xLo);
  xLo -= pad;
  xHi += pad;

  let yLo: number;
  let yHi: number;
  if (layout.logY) {
    yLo = Math.pow(10, Math.floor(Math.log10(Math.min(...ys))));
    yHi = Math.pow(10, Math.ceil(Math.log10(Math.max(...ys))));
    if (yLo === yHi) {
      yHi = yLo * 10;
    }
  } else {
    yLo = Math.min(0, Math.min(...ys));
    yHi = Math.max(...ys) * 1.05;
  }

  const sx = new Scale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right, false);
  const sy = new Scale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top, layout.logY);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" `
    + `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="26" text-anchor="middle" `
    + `font-family="Helvetica" font-size="16">${escapeXml(layout.title)}</text>`);

  // gridlines and ticks
  const plotBottom = HEIGHT - MARGIN.bottom;
  if (layout.logY) {
    for (let e = Math.log10(yLo); e <= Math.log10(yHi) + 1e-9; e += 1) {
      const v = Math.pow(10, Math.round(e));
      const y = sy.map(v);
      parts.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" `
        + `x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#dddddd"/>`);
      parts.push(`<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" `
        + `text-anchor="end" font-family="Helvetica" font-size="12">`
        + `1e${Math.round(Math.log10(v))}</text>`);
    }
  } else {
    for (const v of niceTicks(yLo, yHi)) {
      const y = sy.map(v);
      parts.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" `
        + `x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#dddddd"/>`);
      parts.push(`<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" `
        + `text-anchor="end" font-family="Helvetica" font-size="12">`
        + `${tickLabel(v)}</text>`);
    }
  }
  for (const v of niceTicks(xLo, xHi)) {
    const x = sx.map(v);
    parts.push(`<line x1="${fmt(x)}" y1="${plotBottom}" x2="${fmt(x)}" `
      + `y2="${plotBottom + 6}" stroke="#000000"/>`);
    parts.push(`<text x="${fmt(x)}" y="${plotBottom + 22}" text-anchor="middle" `
      + `font-family="Helvetica" font-size="12">${tickLabel(v)}</text>`);
  }

  // frame and axis labels
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" `
    + `width="${WIDTH - MARGIN.left - MARGIN.right}" `
    + `height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#000000"/>`);
  parts.push(`<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" `
    + `y="${HEIGHT - 16}" text-anchor="middle" font-family="Helvetica" `
    + `font-size="14">${escapeXml(layout.xLabel)}</text>`);
  parts.push(`<text x="22" y="${(MARGIN.top + plotBottom) / 2}" `
    + `text-anchor="middle" font-family="Helvetica" font-size="14" `
    + `transform="rotate(-90 22 ${(MARGIN.top + plotBottom) / 2})">`
    + `${escapeXml(layout.yLabel)}</text>`);

  // theory overlays: dashed horizontal lines
  for (const overlay of overlays) {
    if (layout.logY && overlay.y <= 0) {
      continue;
    }
    const y = sy.map(overlay.y);
    const color = PALETTE[hashLabel(overlay.label) % PALETTE.length];
    parts.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" `
      + `x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="${color}" `
      + `stroke-dasharray="7 4"/>`);
  }

  // curves with optional confidence whiskers
  for (const curve of curves) {
    const h = hashLabel(curve.label);
    const color = PALETTE[h % PALETTE.length];
    const mark = MARKERS[(h >>> 8) % MARKERS.length];
    const drawable = curve.points.filter((p) => !layout.logY || p.y > 0);
    if (drawable.length > 0) {
      const d = drawable
        .map((p, i) => `${i === 0 ? "M" : "L"} ${fmt(sx.map(p.x))} ${fmt(sy.map(p.y))}`)
        .join(" ");
      parts.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
    }
    for (const w of curve.whiskers ?? []) {
      if (layout.logY && (w.lo <= 0 || w.hi <= 0)) {
        continue;
      }
      const x = sx.map(w.x);
      parts.push(`<line x1="${fmt(x)}" y1="${fmt(sy.map(w.lo))}" `
        + `x2="${fmt(x)}" y2="${fmt(sy.map(w.hi))}" stroke="${color}"/>`);
      for (const v of [w.lo, w.hi]) {
        const y = sy.map(v);
        parts.push(`<line x1="${fmt(x - 3)}" y1="${fmt(y)}" `
          + `x2="${fmt(x + 3)}" y2="${fmt(y)}" stroke="${color}"/>`);
      }
    }
    for (const p of drawable) {
      parts.push(marker(mark, sx.map(p.x), sy.map(p.y), color));
    }
  }

  // legend
  let legendY = MARGIN.top + 14;
  const legendX = MARGIN.left + 12;
  for (const curve of curves) {
    const h = hashLabel(curve.label);
    const color = PALETTE[h % PALETTE.length];
    parts.push(`<line x1="${legendX}" y1="${legendY - 4}" x2="${legendX + 26}" `
      + `y2="${legendY - 4}" stroke="${color}" stroke-width="1.6"/>`);
    parts.push(marker(MARKERS[(h >>> 8) % MARKERS.length], legendX + 13,
      legendY - 4, color));
    parts.push(`<text x="${legendX + 32}" y="${legendY}" font-family="Helvetica" `
      + `font-size="12">${escapeXml(curve.label)}</text>`);
    legendY += 16;
  }
  for (const overlay of overlays) {
    const color = PALETTE[hashLabel(overlay.label) % PALETTE.length];
    parts.push(`<line x1="${legendX}" y1="${legendY - 4}" x2="${legendX + 26}" `
      + `y2="${legendY - 4}" stroke="${color}" stroke-dasharray="7 4"/>`);
    parts.push(`<text x="${legendX + 32}" y="${legendY}" font-family="Helvetica" `
      + `font-size="12">${escapeXml(overlay.label)}</text>`);
    legendY += 16;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
