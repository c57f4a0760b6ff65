/**
 * figkit render --scenario <id> --in <dir> --out <dir>
 *
 * Reads <in>/<id>.csv (and <id>.manifest.json when present, unused beyond
 * existence today), writes <out>/<id>.svg and <out>/<id>.png.  Exits 2 on
 * usage or schema errors, naming the offending column.
 */

import { mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { SchemaError, parseCsv } from './csv.js';
import { renderPng, renderSvg } from './plot.js';
import { buildFigure } from './scenarios.js';

export interface RenderResult {
  svgPath: string;
  pngPath: string;
}

export function renderScenario(scenario: string, inDir: string, outDir: string): RenderResult {
  const csvPath = join(inDir, `${scenario}.csv`);
  const table = parseCsv(readFileSync(csvPath, 'utf8'));
  const figure = buildFigure(scenario, table);
  mkdirSync(outDir, { recursive: true });
  const svgPath = join(outDir, `${scenario}.svg`);
  const pngPath = join(outDir, `${scenario}.png`);
  writeFileSync(svgPath, renderSvg(figure));
  writeFileSync(pngPath, renderPng(figure));
  return { svgPath, pngPath };
}

function parseArgs(argv: string[]): { scenario: string; inDir: string; outDir: string } {
  if (argv[0] !== 'render') {
    throw new Error(`unknown command '${argv[0] ?? ''}'; usage: figkit render --scenario <id> --in <dir> --out <dir>`);
  }
  const opts: Record<string, string> = {};
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key.startsWith('--') || val === undefined) {
      throw new Error(`bad argument '${key}'`);
    }
    opts[key.slice(2)] = val;
  }
  for (const req of ['scenario', 'in', 'out']) {
    if (!opts[req]) throw new Error(`missing --${req}`);
  }
  return { scenario: opts['scenario'], inDir: opts['in'], outDir: opts['out'] };
}

export function main(argv: string[]): number {
  try {
    const { scenario, inDir, outDir } = parseArgs(argv);
    const { svgPath, pngPath } = renderScenario(scenario, inDir, outDir);
    console.log(`wrote ${svgPath}`);
    console.log(`wrote ${pngPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error${err.column ? ` in column '${err.column}'` : ''}: ${err.message}`);
    } else {
      console.error(String(err instanceof Error ? err.message : err));
    }
    return 2;
  }
}

if (process.argv[1] && process.argv[1].endsWith('cli.js')) {
  process.exit(main(process.argv.slice(2)));
}
