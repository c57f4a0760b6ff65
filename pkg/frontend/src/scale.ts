/** Linear scales and tick placement. */

export interface Scale {
  domain: [number, number];
  range: [number, number];
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

export function padDomain([lo, hi]: [number, number], frac = 0.04): [number, number] {
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

export function apply(scale: Scale, v: number): number {
  const [d0, d1] = scale.domain;
  const [r0, r1] = scale.range;
  return r0 + ((v - d0) / (d1 - d0)) * (r1 - r0);
}

/** Tick positions at 1/2/5 multiples covering the domain. */
export function ticks([lo, hi]: [number, number], count = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step0 = span / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const norm = step0 / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(6)));
}
