import Papa from "papaparse";

import { FigureKind, Row, SchemaError, checkColumns } from "./schema.js";

export interface Table {
  header: string[];
  rows: Row[];
}

export function parseCsv(text: string, kind: FigureKind): Table {
  const result = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new SchemaError(
      `csv parse error at row ${first.row ?? "?"}: ${first.message}`,
    );
  }
  const header = result.meta.fields ?? [];
  checkColumns(kind, header);
  return { header, rows: result.data };
}
