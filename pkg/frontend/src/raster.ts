/** Software RGBA raster with line, rect and bitmap-text drawing. */

import { GLYPH_H, GLYPH_W, glyph, textWidth } from './font.js';
import { hexRgb } from './color.js';

export class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number]) {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = rgb[0];
    this.data[i + 1] = rgb[1];
    this.data[i + 2] = rgb[2];
    this.data[i + 3] = 255;
  }

  fillRect(x: number, y: number, w: number, h: number, color: string) {
    const rgb = hexRgb(color);
    const x1 = Math.max(0, Math.round(x));
    const y1 = Math.max(0, Math.round(y));
    const x2 = Math.min(this.width, Math.round(x + w));
    const y2 = Math.min(this.height, Math.round(y + h));
    for (let yy = y1; yy < y2; yy++) {
      for (let xx = x1; xx < x2; xx++) this.set(xx, yy, rgb);
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, color: string, width = 1) {
    const rgb = hexRgb(color);
    let ix0 = Math.round(x0);
    let iy0 = Math.round(y0);
    const ix1 = Math.round(x1);
    const iy1 = Math.round(y1);
    const dx = Math.abs(ix1 - ix0);
    const dy = -Math.abs(iy1 - iy0);
    const sx = ix0 < ix1 ? 1 : -1;
    const sy = iy0 < iy1 ? 1 : -1;
    let err = dx + dy;
    const r = Math.floor(width / 2);
    for (;;) {
      for (let ox = -r; ox <= r; ox++) {
        for (let oy = -r; oy <= r; oy++) this.set(ix0 + ox, iy0 + oy, rgb);
      }
      if (ix0 === ix1 && iy0 === iy1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ix0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        iy0 += sy;
      }
    }
  }

  polyline(points: Array<[number, number]>, color: string, width = 1) {
    for (let i = 1; i < points.length; i++) {
      this.line(points[i - 1][0], points[i - 1][1], points[i][0], points[i][1], color, width);
    }
  }

  /** anchor: 'start' | 'middle' | 'end' relative to x; y is the text baseline. */
  text(x: number, y: number, s: string, color: string, anchor: 'start' | 'middle' | 'end' = 'start') {
    const rgb = hexRgb(color);
    const w = textWidth(s);
    let cx = Math.round(anchor === 'middle' ? x - w / 2 : anchor === 'end' ? x - w : x);
    const top = Math.round(y) - GLYPH_H;
    for (const ch of s) {
      const rows = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < GLYPH_W; gx++) {
          if (rows[gy] & (1 << (GLYPH_W - 1 - gx))) this.set(cx + gx, top + gy, rgb);
        }
      }
      cx += GLYPH_W + 1;
    }
  }
}
