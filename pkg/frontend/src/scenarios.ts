/** Per-scenario mapping from CSV columns to figure panels. */

import {
  SchemaError,
  Table,
  columnsWithPrefix,
  numericColumn,
  stringColumn,
} from './csv.js';
import { seriesColor } from './color.js';
import { Figure, Heatmap, Panel, Series } from './plot.js';

export interface Manifest {
  scenario?: string;
  config?: { units?: string };
  [key: string]: unknown;
}

const GATES = ['unshaped', 'k1', 'k4', 'k19'];
const STATES = ['ff', 'fp', 'pf', 'pp'];

function timeColumn(table: Table, suffix = ''): { name: string; label: string } {
  for (const base of ['time', 'time_ns']) {
    const name = suffix ? `${base}_${suffix}` : base;
    if (table.columns.includes(name)) {
      return { name, label: base === 'time_ns' ? 'time (ns)' : 'time (1/g_m)' };
    }
  }
  throw new SchemaError(
    `missing column '${suffix ? `time_${suffix}` : 'time'}'`,
    suffix ? `time_${suffix}` : 'time',
  );
}

function series(table: Table, xCol: string, yCol: string, label: string, i: number): Series {
  return {
    label,
    color: seriesColor(i),
    x: numericColumn(table, xCol),
    y: numericColumn(table, yCol),
  };
}

function fig2(table: Table): Figure {
  const t = timeColumn(table);
  const top: Panel = {
    xLabel: t.label,
    yLabel: 'population / fidelity',
    series: [
      ...STATES.map((s, i) => series(table, t.name, `pop_${s}`, `pop ${s}`, i)),
      series(table, t.name, 'fidelity', 'fidelity', 4),
      series(table, t.name, 'avg_fidelity', 'avg fidelity', 5),
    ],
  };
  const bottom: Panel = {
    xLabel: t.label,
    yLabel: 'phase (rad)',
    series: STATES.map((s, i) => series(table, t.name, `phase_${s}`, `phase ${s}`, i)),
  };
  return { title: 'fig2: unshaped gate evolution', panels: [top, bottom] };
}

function fig3a(table: Table): Figure {
  const panel: Panel = {
    xLabel: 'time',
    yLabel: 'mean photon number',
    series: GATES.map((g, i) => {
      const t = timeColumn(table, g);
      return series(table, t.name, `n_${g}`, g, i);
    }),
  };
  return { title: 'fig3a: cavity excitation', panels: [panel] };
}

function fig3b(table: Table): Figure {
  const panel: Panel = {
    xLabel: 'Re<a>',
    yLabel: 'Im<a>',
    equalAspect: true,
    series: GATES.map((g, i) => ({
      label: g,
      color: seriesColor(i),
      x: numericColumn(table, `x_${g}`),
      y: numericColumn(table, `p_${g}`),
    })),
  };
  return { title: 'fig3b: phase-space trajectories', panels: [panel] };
}

function fig4(table: Table): Figure {
  const panels: Panel[] = [];
  for (const g of ['k1', 'k19']) {
    const t = timeColumn(table, g);
    panels.push({
      title: `order ${g.slice(1)}`,
      xLabel: t.label,
      yLabel: 'population / fidelity',
      series: [
        ...STATES.map((s, i) => series(table, t.name, `pop_${s}_${g}`, `pop ${s}`, i)),
        series(table, t.name, `fidelity_${g}`, 'fidelity', 4),
        series(table, t.name, `avg_fidelity_${g}`, 'avg fidelity', 5),
      ],
    });
  }
  for (const g of ['k1', 'k19']) {
    const t = timeColumn(table, g);
    panels.push({
      title: `order ${g.slice(1)} phases`,
      xLabel: t.label,
      yLabel: 'phase (rad)',
      series: STATES.map((s, i) => series(table, t.name, `phase_${s}_${g}`, `phase ${s}`, i)),
    });
  }
  return { title: 'fig4: shaped gate evolution', panels };
}

function fig5(which: string) {
  const param: Record<string, string> = {
    fig5a: 'tau', fig5b: 'delta', fig5c: 'omega', fig5d: 'g_m',
  };
  return (table: Table): Figure => {
    const x = `delta_${param[which]}`;
    const panel: Panel = {
      xLabel: `relative error in ${param[which]}`,
      yLabel: 'fidelity at gate time',
      series: ['unshaped', 'k1', 'k19'].map((g, i) =>
        series(table, x, `fidelity_${g}`, g, i)),
    };
    return { title: `${which}: robustness to ${param[which]} error`, panels: [panel] };
  };
}

function fig6(table: Table): Figure {
  const labels: Array<[string, string]> = [];
  for (const rate of ['kappa', 'gamma']) {
    for (const g of ['unshaped', 'k1', 'k19']) {
      labels.push([`fidelity_${g}_${rate}`, `${g} (${rate})`]);
    }
  }
  const panel: Panel = {
    xLabel: 'decay rate (g_m units)',
    yLabel: 'fidelity at gate time',
    series: labels.map(([col, label], i) => series(table, 'rate', col, label, i)),
  };
  return { title: 'fig6: decoherence scan', panels: [panel] };
}

function fig7(table: Table): Figure {
  const tags = stringColumn(table, 'surface');
  const ts = numericColumn(table, 'time_ns');
  const ds = numericColumn(table, 'delta_mhz');
  const fs = numericColumn(table, 'fidelity');
  const unique = [...new Set(tags)].sort();
  if (unique.length === 0) {
    throw new SchemaError("missing column 'surface'", 'surface');
  }
  let zl = Infinity;
  let zh = -Infinity;
  for (const f of fs) {
    zl = Math.min(zl, f);
    zh = Math.max(zh, f);
  }
  const panels: Panel[] = unique.map((tag) => {
    const xs = [...new Set(ts.filter((_, i) => tags[i] === tag))].sort((a, b) => a - b);
    const ys = [...new Set(ds.filter((_, i) => tags[i] === tag))].sort((a, b) => a - b);
    const z = ys.map(() => xs.map(() => NaN));
    for (let i = 0; i < tags.length; i++) {
      if (tags[i] !== tag) continue;
      z[ys.indexOf(ds[i])][xs.indexOf(ts[i])] = fs[i];
    }
    const hm: Heatmap = { x: xs, y: ys, z, zRange: [zl, zh] };
    return {
      title: `surface ${tag}`,
      xLabel: 'time (ns)',
      yLabel: 'delta/2pi (MHz)',
      series: [],
      heatmap: hm,
    };
  });
  return { title: 'fig7: fidelity surface', panels };
}

function fig8(table: Table): Figure {
  const overlaps = columnsWithPrefix(table, 'overlap_rp');
  if (overlaps.length === 0) {
    throw new SchemaError("missing column 'overlap_rp*'", 'overlap_rp*');
  }
  const panel: Panel = {
    xLabel: 'time',
    yLabel: 'exact-vs-ideal overlap',
    series: overlaps.map((col, i) => {
      const tag = col.slice('overlap_rp'.length);
      const t = table.columns.includes(`time_rp${tag}`)
        ? `time_rp${tag}` : `time_ns_rp${tag}`;
      return series(table, t, col, `r_p = ${tag.replace('_', '.')}`, i);
    }),
  };
  return { title: 'fig8: ideal-model validity', panels: [panel] };
}

function sweep(table: Table): Figure {
  const x = table.columns[0];
  const panel: Panel = {
    xLabel: x,
    yLabel: 'fidelity',
    series: [series(table, x, 'fidelity', 'fidelity', 0)],
  };
  return { title: `sweep over ${x}`, panels: [panel] };
}

export const SCENARIO_BUILDERS: Record<string, (table: Table) => Figure> = {
  fig2,
  fig3a,
  fig3b,
  fig4,
  fig5a: fig5('fig5a'),
  fig5b: fig5('fig5b'),
  fig5c: fig5('fig5c'),
  fig5d: fig5('fig5d'),
  fig6,
  fig7,
  fig8,
  sweep,
};

export function buildFigure(scenario: string, table: Table): Figure {
  const builder = SCENARIO_BUILDERS[scenario];
  if (!builder) {
    throw new SchemaError(`unknown scenario '${scenario}'`);
  }
  return builder(table);
}
