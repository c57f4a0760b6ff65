/**
 * Figure model and the two renderers (SVG text, rasterized PNG).
 *
 * Rendering is fully deterministic: fixed canvas size, fixed palette, no
 * timestamps; the same Figure always produces identical bytes.
 */

import { heatColor, rgbHex } from './color.js';
import { encodePng } from './png.js';
import { Raster } from './raster.js';
import { Scale, apply, extent, formatTick, padDomain, ticks } from './scale.js';

export interface Series {
  label: string;
  color: string;
  x: number[];
  y: number[];
  markers?: boolean;
}

export interface Heatmap {
  x: number[]; // sorted unique cell centers
  y: number[];
  z: number[][]; // z[iy][ix]
  zRange: [number, number];
}

export interface Panel {
  title?: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  heatmap?: Heatmap;
  equalAspect?: boolean;
}

export interface Figure {
  title: string;
  panels: Panel[];
}

const PANEL_W = 430;
const PANEL_H = 300;
const MARGIN = { left: 64, right: 14, top: 30, bottom: 44 };
const LEGEND_H = 14;

interface Frame {
  px: number; // plot-area origin
  py: number;
  pw: number;
  ph: number;
  xScale: Scale;
  yScale: Scale;
}

function panelColumns(n: number): number {
  return n <= 1 ? 1 : 2;
}

export function figureSize(fig: Figure): [number, number] {
  const cols = panelColumns(fig.panels.length);
  const rows = Math.ceil(fig.panels.length / cols);
  return [cols * PANEL_W, rows * PANEL_H + 20];
}

function panelFrame(fig: Figure, idx: number): Frame {
  const cols = panelColumns(fig.panels.length);
  const col = idx % cols;
  const row = Math.floor(idx / cols);
  const x0 = col * PANEL_W;
  const y0 = 20 + row * PANEL_H;
  const panel = fig.panels[idx];
  const legendRows = panel.series.length > 0 ? Math.ceil(panel.series.length / 3) : 0;
  const px = x0 + MARGIN.left;
  const py = y0 + MARGIN.top;
  const pw = PANEL_W - MARGIN.left - MARGIN.right;
  const ph = PANEL_H - MARGIN.top - MARGIN.bottom - legendRows * LEGEND_H;

  let xDomain: [number, number];
  let yDomain: [number, number];
  if (panel.heatmap) {
    xDomain = cellDomain(panel.heatmap.x);
    yDomain = cellDomain(panel.heatmap.y);
  } else {
    xDomain = padDomain(extent(panel.series.flatMap((s) => s.x)));
    yDomain = padDomain(extent(panel.series.flatMap((s) => s.y)));
  }
  if (panel.equalAspect) {
    // widen the narrower domain so one data unit spans the same pixels on
    // both axes
    const unitX = (xDomain[1] - xDomain[0]) / pw;
    const unitY = (yDomain[1] - yDomain[0]) / ph;
    const unit = Math.max(unitX, unitY);
    const cx = (xDomain[0] + xDomain[1]) / 2;
    const cy = (yDomain[0] + yDomain[1]) / 2;
    xDomain = [cx - (unit * pw) / 2, cx + (unit * pw) / 2];
    yDomain = [cy - (unit * ph) / 2, cy + (unit * ph) / 2];
  }
  return {
    px, py, pw, ph,
    xScale: { domain: xDomain, range: [px, px + pw] },
    yScale: { domain: yDomain, range: [py + ph, py] },
  };
}

function cellDomain(centers: number[]): [number, number] {
  if (centers.length === 1) return [centers[0] - 0.5, centers[0] + 0.5];
  const step0 = centers[1] - centers[0];
  const stepN = centers[centers.length - 1] - centers[centers.length - 2];
  return [centers[0] - step0 / 2, centers[centers.length - 1] + stepN / 2];
}

function num(v: number): string {
  return String(parseFloat(v.toFixed(2)));
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

export function renderSvg(fig: Figure): string {
  const [w, h] = figureSize(fig);
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" ` +
    `viewBox="0 0 ${w} ${h}" font-family="Helvetica, Arial, sans-serif">`,
  );
  out.push(`<rect width="${w}" height="${h}" fill="#ffffff"/>`);
  out.push(
    `<text x="${w / 2}" y="14" text-anchor="middle" font-size="12">${esc(fig.title)}</text>`,
  );
  fig.panels.forEach((panel, i) => {
    const f = panelFrame(fig, i);
    const unitX = (f.xScale.domain[1] - f.xScale.domain[0]) / f.pw;
    const unitY = (f.yScale.domain[1] - f.yScale.domain[0]) / f.ph;
    out.push(
      `<g data-panel="${i}" data-unit-per-px-x="${unitX.toPrecision(8)}" ` +
      `data-unit-per-px-y="${unitY.toPrecision(8)}">`,
    );
    if (panel.heatmap) svgHeatmap(out, panel.heatmap, f);
    svgAxes(out, panel, f);
    for (const s of panel.series) {
      const pts = s.x
        .map((xv, j) => `${num(apply(f.xScale, xv))},${num(apply(f.yScale, s.y[j]))}`)
        .join(' ');
      out.push(
        `<polyline data-series="${esc(s.label)}" points="${pts}" fill="none" ` +
        `stroke="${s.color}" stroke-width="1.3"/>`,
      );
      if (s.markers) {
        for (let j = 0; j < s.x.length; j++) {
          out.push(
            `<circle cx="${num(apply(f.xScale, s.x[j]))}" cy="${num(apply(f.yScale, s.y[j]))}" ` +
            `r="2" fill="${s.color}"/>`,
          );
        }
      }
    }
    svgLegend(out, panel, f);
    out.push('</g>');
  });
  out.push('</svg>');
  return out.join('\n') + '\n';
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function svgAxes(out: string[], panel: Panel, f: Frame) {
  out.push(
    `<rect x="${f.px}" y="${f.py}" width="${f.pw}" height="${f.ph}" ` +
    `fill="none" stroke="#000000" stroke-width="1"/>`,
  );
  for (const t of ticks(f.xScale.domain)) {
    const x = num(apply(f.xScale, t));
    out.push(`<line x1="${x}" y1="${f.py + f.ph}" x2="${x}" y2="${f.py + f.ph + 4}" stroke="#000"/>`);
    out.push(
      `<text x="${x}" y="${f.py + f.ph + 15}" text-anchor="middle" font-size="9">` +
      `${formatTick(t)}</text>`,
    );
  }
  for (const t of ticks(f.yScale.domain)) {
    const y = num(apply(f.yScale, t));
    out.push(`<line x1="${f.px - 4}" y1="${y}" x2="${f.px}" y2="${y}" stroke="#000"/>`);
    out.push(
      `<text x="${f.px - 6}" y="${Number(y) + 3}" text-anchor="end" font-size="9">` +
      `${formatTick(t)}</text>`,
    );
  }
  out.push(
    `<text x="${f.px + f.pw / 2}" y="${f.py + f.ph + 30}" text-anchor="middle" ` +
    `font-size="10">${esc(panel.xLabel)}</text>`,
  );
  out.push(
    `<text x="${f.px - 48}" y="${f.py + f.ph / 2}" text-anchor="middle" font-size="10" ` +
    `transform="rotate(-90 ${f.px - 48} ${f.py + f.ph / 2})">${esc(panel.yLabel)}</text>`,
  );
  if (panel.title) {
    out.push(
      `<text x="${f.px + f.pw / 2}" y="${f.py - 6}" text-anchor="middle" font-size="10">` +
      `${esc(panel.title)}</text>`,
    );
  }
}

function svgLegend(out: string[], panel: Panel, f: Frame) {
  panel.series.forEach((s, i) => {
    const col = i % 3;
    const row = Math.floor(i / 3);
    const lx = f.px + col * (f.pw / 3);
    const ly = f.py + f.ph + 34 + row * LEGEND_H;
    out.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 14}" y2="${ly}" stroke="${s.color}" stroke-width="2"/>`);
    out.push(`<text x="${lx + 18}" y="${ly + 3}" font-size="9">${esc(s.label)}</text>`);
  });
}

function svgHeatmap(out: string[], hm: Heatmap, f: Frame) {
  const [zl, zh] = hm.zRange;
  for (let iy = 0; iy < hm.y.length; iy++) {
    for (let ix = 0; ix < hm.x.length; ix++) {
      const t = zh > zl ? (hm.z[iy][ix] - zl) / (zh - zl) : 0.5;
      const [x0, x1] = cellEdges(hm.x, ix);
      const [y0, y1] = cellEdges(hm.y, iy);
      const px = apply(f.xScale, x0);
      const pw = apply(f.xScale, x1) - px;
      const py = apply(f.yScale, y1);
      const ph = apply(f.yScale, y0) - py;
      out.push(
        `<rect x="${num(px)}" y="${num(py)}" width="${num(pw)}" height="${num(ph)}" ` +
        `fill="${rgbHex(heatColor(t))}"/>`,
      );
    }
  }
}

function cellEdges(centers: number[], i: number): [number, number] {
  const lo = i > 0 ? (centers[i - 1] + centers[i]) / 2
    : centers[i] - (centers.length > 1 ? (centers[i + 1] - centers[i]) / 2 : 0.5);
  const hi = i < centers.length - 1 ? (centers[i] + centers[i + 1]) / 2
    : centers[i] + (centers.length > 1 ? (centers[i] - centers[i - 1]) / 2 : 0.5);
  return [lo, hi];
}

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

export function renderPng(fig: Figure): Buffer {
  const [w, h] = figureSize(fig);
  const r = new Raster(w, h);
  r.text(w / 2, 14, fig.title, '#000000', 'middle');
  fig.panels.forEach((panel, i) => {
    const f = panelFrame(fig, i);
    if (panel.heatmap) {
      const hm = panel.heatmap;
      const [zl, zh] = hm.zRange;
      for (let iy = 0; iy < hm.y.length; iy++) {
        for (let ix = 0; ix < hm.x.length; ix++) {
          const t = zh > zl ? (hm.z[iy][ix] - zl) / (zh - zl) : 0.5;
          const [x0, x1] = cellEdges(hm.x, ix);
          const [y0, y1] = cellEdges(hm.y, iy);
          const px = apply(f.xScale, x0);
          const py = apply(f.yScale, y1);
          r.fillRect(px, py, apply(f.xScale, x1) - px, apply(f.yScale, y0) - py,
            rgbHex(heatColor(t)));
        }
      }
    }
    // frame and ticks
    r.line(f.px, f.py, f.px + f.pw, f.py, '#000000');
    r.line(f.px, f.py + f.ph, f.px + f.pw, f.py + f.ph, '#000000');
    r.line(f.px, f.py, f.px, f.py + f.ph, '#000000');
    r.line(f.px + f.pw, f.py, f.px + f.pw, f.py + f.ph, '#000000');
    for (const t of ticks(f.xScale.domain)) {
      const x = apply(f.xScale, t);
      r.line(x, f.py + f.ph, x, f.py + f.ph + 4, '#000000');
      r.text(x, f.py + f.ph + 16, formatTick(t), '#000000', 'middle');
    }
    for (const t of ticks(f.yScale.domain)) {
      const y = apply(f.yScale, t);
      r.line(f.px - 4, y, f.px, y, '#000000');
      r.text(f.px - 6, y + 3, formatTick(t), '#000000', 'end');
    }
    r.text(f.px + f.pw / 2, f.py + f.ph + 30, panel.xLabel, '#000000', 'middle');
    r.text(f.px + 2, f.py - 4, panel.yLabel, '#000000', 'start');
    if (panel.title) r.text(f.px + f.pw / 2, f.py - 4, panel.title, '#000000', 'middle');
    for (const s of panel.series) {
      const pts: Array<[number, number]> = s.x.map((xv, j) => [
        apply(f.xScale, xv),
        apply(f.yScale, s.y[j]),
      ]);
      r.polyline(pts, s.color, 1);
    }
    panel.series.forEach((s, j) => {
      const col = j % 3;
      const row = Math.floor(j / 3);
      const lx = f.px + col * (f.pw / 3);
      const ly = f.py + f.ph + 34 + row * LEGEND_H;
      r.line(lx, ly, lx + 14, ly, s.color, 2);
      r.text(lx + 18, ly + 4, s.label, '#000000');
    });
  });
  return encodePng(w, h, r.data);
}
