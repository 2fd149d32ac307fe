/** Column contracts for the CSV files written by the outwalk CLI. */

export type FigureKind = "convergence" | "drift" | "density" | "census";

export const FIGURE_KINDS: FigureKind[] = [
  "convergence",
  "drift",
  "density",
  "census",
];

/** Required columns per figure kind; any further columns are allowed
 * (spectrum files carry one column per conjugacy class). */
export const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  convergence: ["seed", "step", "epsilon"],
  drift: ["seed", "step", "dsym_over_n"],
  density: ["seed", "L", "density"],
  census: ["k", "ball_size", "strip_count"],
};

export class SchemaError extends Error {}

export interface Row {
  [column: string]: string;
}

export function checkColumns(kind: FigureKind, header: string[]): void {
  for (const col of REQUIRED_COLUMNS[kind]) {
    if (!header.includes(col)) {
      throw new SchemaError(
        `csv is missing required column "${col}" for figure kind "${kind}"`,
      );
    }
  }
}

export function numeric(row: Row, column: string, line: number): number {
  const raw = row[column];
  if (raw === undefined || raw === "") {
    return NaN;
  }
  const value = Number(raw);
  if (Number.isNaN(value)) {
    throw new SchemaError(
      `non-numeric value "${raw}" in column "${column}" at data row ${line}`,
    );
  }
  return value;
}
