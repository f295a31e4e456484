import { readFileSync } from "fs";
import Papa from "papaparse";

export interface Table {
  columns: string[];
  rows: Record<string, number | string>[];
}

/** Load a simulation CSV and fail loudly on anything malformed or empty. */
export function loadCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new Error(`cannot read CSV file: ${path}`);
  }
  if (text.trim() === "") {
    throw new Error(`empty CSV: ${path}`);
  }
  const parsed = Papa.parse<Record<string, number | string>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`malformed CSV ${path}: ${first.message} (row ${first.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new Error(`empty CSV: ${path}`);
  }
  return { columns, rows: parsed.data };
}

export function requireColumns(table: Table, needed: string[], path: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new Error(`CSV ${path} is missing column '${col}' (has: ${table.columns.join(", ")})`);
    }
  }
}

export function numericColumn(table: Table, column: string): number[] {
  return table.rows.map((row) => Number(row[column]));
}
