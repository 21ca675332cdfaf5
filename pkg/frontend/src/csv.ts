/** Minimal reader for the smoother CLI's CSV dialect (header row, comma
 * separated, no quoting, LF endings). */

export type CsvRow = Record<string, string>;

export function parseCsv(text: string): CsvRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  const rows: CsvRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`malformed CSV row: expected ${header.length} cells, got ${cells.length}`);
    }
    const row: CsvRow = {};
    header.forEach((name, k) => {
      row[name] = cells[k];
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new Error("empty CSV: header only, no data rows");
  }
  return rows;
}

export function numericColumn(rows: CsvRow[], name: string): number[] {
  return rows.map((row) => {
    const value = Number(row[name]);
    if (!Number.isFinite(value)) {
      throw new Error(`non-numeric value ${JSON.stringify(row[name])} in column ${name}`);
    }
    return value;
  });
}
