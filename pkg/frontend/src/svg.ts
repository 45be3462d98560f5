/**
 * Minimal SVG plotting: linear scales, polylines, axes and a panel grid.
 * Pixel data derives only from the arrays handed in; there is no model
 * evaluation anywhere in this package.
 */

export interface Extent {
  min: number;
  max: number;
}

export function extentOf(values: number[], pad = 0.05): Extent {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) {
    return { min: 0, max: 1 };
  }
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

export class Scale {
  constructor(
    private readonly domain: Extent,
    private readonly range: [number, number],
  ) {}

  map(v: number): number {
    const t = (v - this.domain.min) / (this.domain.max - this.domain.min);
    return this.range[0] + t * (this.range[1] - this.range[0]);
  }
}

export interface Series {
  x: number[];
  y: number[];
  color: string;
  /** break the polyline where consecutive x jump by more than this */
  gapThreshold?: number;
  width?: number;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  /** horizontal guide lines in data units */
  guides?: number[];
  /** vertical guide lines in data units */
  verticalGuides?: number[];
  xExtent?: Extent;
  yExtent?: Extent;
}

const PANEL_W = 320;
const PANEL_H = 230;
const MARGIN = { left: 56, right: 14, top: 28, bottom: 40 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function ticks(extent: Extent, count = 4): number[] {
  const out: number[] = [];
  for (let i = 0; i <= count; i += 1) {
    out.push(extent.min + ((extent.max - extent.min) * i) / count);
  }
  return out;
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  const magnitude = Math.abs(v);
  if (magnitude >= 1000 || magnitude < 0.01) return v.toExponential(1);
  return Number(v.toPrecision(3)).toString();
}

function renderPanel(spec: PanelSpec, x0: number, y0: number): string {
  const innerW = PANEL_W - MARGIN.left - MARGIN.right;
  const innerH = PANEL_H - MARGIN.top - MARGIN.bottom;
  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  const xExt = spec.xExtent ?? extentOf(xs, 0.02);
  const yExt = spec.yExtent ?? extentOf(ys.concat(spec.guides ?? []));
  const sx = new Scale(xExt, [0, innerW]);
  const sy = new Scale(yExt, [innerH, 0]);

  const parts: string[] = [];
  parts.push(`<g transform="translate(${x0 + MARGIN.left},${y0 + MARGIN.top})">`);
  parts.push(`<rect x="0" y="0" width="${innerW}" height="${innerH}" fill="none" stroke="#333"/>`);
  parts.push(
    `<text x="${innerW / 2}" y="-10" text-anchor="middle" font-size="12" font-weight="bold">${esc(spec.title)}</text>`,
  );
  for (const t of ticks(xExt)) {
    const px = sx.map(t);
    parts.push(`<line x1="${px}" y1="${innerH}" x2="${px}" y2="${innerH + 4}" stroke="#333"/>`);
    parts.push(
      `<text x="${px}" y="${innerH + 16}" text-anchor="middle" font-size="9">${formatTick(t)}</text>`,
    );
  }
  for (const t of ticks(yExt)) {
    const py = sy.map(t);
    parts.push(`<line x1="-4" y1="${py}" x2="0" y2="${py}" stroke="#333"/>`);
    parts.push(
      `<text x="-7" y="${py + 3}" text-anchor="end" font-size="9">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${innerW / 2}" y="${innerH + 30}" text-anchor="middle" font-size="11">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text transform="translate(${-MARGIN.left + 14},${innerH / 2}) rotate(-90)" text-anchor="middle" font-size="11">${esc(spec.yLabel)}</text>`,
  );
  for (const guide of spec.guides ?? []) {
    const py = sy.map(guide);
    parts.push(
      `<line x1="0" y1="${py}" x2="${innerW}" y2="${py}" stroke="#999" stroke-dasharray="4 3"/>`,
    );
  }
  for (const guide of spec.verticalGuides ?? []) {
    const px = sx.map(guide);
    parts.push(
      `<line x1="${px}" y1="0" x2="${px}" y2="${innerH}" stroke="#999" stroke-dasharray="4 3"/>`,
    );
  }
  for (const series of spec.series) {
    const segments: string[][] = [[]];
    for (let i = 0; i < series.x.length; i += 1) {
      const xv = series.x[i];
      const yv = series.y[i];
      if (!Number.isFinite(xv) || !Number.isFinite(yv)) {
        segments.push([]);
        continue;
      }
      if (
        series.gapThreshold !== undefined &&
        i > 0 &&
        Math.abs(series.y[i] - series.y[i - 1]) > series.gapThreshold
      ) {
        segments.push([]);
      }
      segments[segments.length - 1].push(`${sx.map(xv).toFixed(2)},${sy.map(yv).toFixed(2)}`);
    }
    for (const seg of segments) {
      if (seg.length >= 2) {
        parts.push(
          `<polyline points="${seg.join(" ")}" fill="none" stroke="${series.color}" stroke-width="${series.width ?? 1.4}"/>`,
        );
      } else if (seg.length === 1) {
        parts.push(`<circle cx="${seg[0].split(",")[0]}" cy="${seg[0].split(",")[1]}" r="1.5" fill="${series.color}"/>`);
      }
    }
  }
  parts.push("</g>");
  return parts.join("\n");
}

export function renderGrid(panels: PanelSpec[], columns: number): string {
  const rows = Math.ceil(panels.length / columns);
  const width = columns * PANEL_W;
  const height = rows * PANEL_H;
  const body = panels
    .map((p, i) => renderPanel(p, (i % columns) * PANEL_W, Math.floor(i / columns) * PANEL_H))
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    "</svg>",
  ].join("\n");
}

export function countPanels(svg: string): number {
  return (svg.match(/font-weight="bold"/g) ?? []).length;
}
