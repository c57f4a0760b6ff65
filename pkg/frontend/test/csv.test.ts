import { describe, expect, it } from 'vitest';

import { SchemaError, numericColumn, parseCsv, stringColumn } from '../src/csv.js';

describe('csv parsing', () => {
  it('parses numbers and keeps string cells', () => {
    const t = parseCsv('a,b,tag\n1,2.5,S.I\n-3e-2,4,S.II\n');
    expect(t.columns).toEqual(['a', 'b', 'tag']);
    expect(numericColumn(t, 'a')).toEqual([1, -0.03]);
    expect(stringColumn(t, 'tag')).toEqual(['S.I', 'S.II']);
  });

  it('rejects a missing header or data', () => {
    expect(() => parseCsv('only-header\n')).toThrow(SchemaError);
  });

  it('rejects ragged rows', () => {
    expect(() => parseCsv('a,b\n1\n')).toThrow(/row 1/);
  });

  it('names the offending column', () => {
    const t = parseCsv('a,b\n1,2\n');
    try {
      numericColumn(t, 'missing');
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe('missing');
    }
    try {
      numericColumn(t, 'b');
      const t2 = parseCsv('a,b\n1,oops\n');
      numericColumn(t2, 'b');
      expect.unreachable();
    } catch (err) {
      expect((err as SchemaError).column).toBe('b');
    }
  });
});
