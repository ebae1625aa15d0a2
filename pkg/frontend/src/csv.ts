/** Minimal CSV reader for the bundle tables: header row, numeric cells,
 * comma separators, LF endings, no quoting. */

export interface Table {
  columns: string[];
  rows: number[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header row");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `row ${i} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    rows.push(
      cells.map((cell, j) => {
        const trimmed = cell.trim();
        // Flag columns are written as booleans.
        if (trimmed === "true" || trimmed === "True") return 1;
        if (trimmed === "false" || trimmed === "False") return 0;
        const v = Number(trimmed);
        if (Number.isNaN(v) || trimmed === "") {
          throw new CsvError(`row ${i}, column ${columns[j]}: not a number: ${cell}`);
        }
        return v;
      }),
    );
  }
  return { columns, rows };
}

/** Values of one named column; throws if the column is absent. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(
      `missing column ${name}; have [${table.columns.join(", ")}]`,
    );
  }
  return table.rows.map((r) => r[idx]);
}
