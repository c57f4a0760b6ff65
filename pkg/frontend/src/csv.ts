/**
 * Parsing and schema checks for gatesim scenario CSVs.
 *
 * Format: one header row, comma separator, '\n' line endings, numeric cells
 * printed with 12 significant digits; a few columns (e.g. the fig7 surface
 * tag) are plain strings.
 */

export interface Table {
  columns: string[];
  rows: (number | string)[][];
}

export class SchemaError extends Error {
  constructor(message: string, public readonly column?: string) {
    super(message);
    this.name = 'SchemaError';
  }
}

export function parseCsv(text: string): Table {
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaError('CSV needs a header row and at least one data row');
  }
  const columns = lines[0].split(',');
  const rows: (number | string)[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(',');
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `row ${i} has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    rows.push(
      cells.map((c) => {
        const v = Number(c);
        return c !== '' && Number.isFinite(v) ? v : c;
      }),
    );
  }
  return { columns, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column '${name}'`, name);
  }
  return idx;
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row, i) => {
    const v = row[idx];
    if (typeof v !== 'number') {
      throw new SchemaError(`column '${name}' has a non-numeric cell in row ${i}`, name);
    }
    return v;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => String(row[idx]));
}

/** Column names matching a prefix, in header order. */
export function columnsWithPrefix(table: Table, prefix: string): string[] {
  return table.columns.filter((c) => c.startsWith(prefix));
}
