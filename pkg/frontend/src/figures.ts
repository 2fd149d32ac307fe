import { Table } from "./csv.js";
import { FigureKind, Row, SchemaError, numeric } from "./schema.js";
import {
  PALETTE,
  SvgBuilder,
  linearScale,
  logScale,
  plotArea,
} from "./svg.js";

export interface FigureOptions {
  title?: string;
  /** Horizontal reference line, e.g. a known asymptote from a manifest. */
  asymptote?: number;
}

interface Series {
  label: string;
  points: Array<[number, number]>;
}

function groupSeries(
  table: Table,
  keyCol: string,
  xCol: string,
  yCol: string,
): Series[] {
  const byKey = new Map<string, Array<[number, number]>>();
  table.rows.forEach((row: Row, i: number) => {
    const x = numeric(row, xCol, i + 1);
    const y = numeric(row, yCol, i + 1);
    if (Number.isNaN(x) || Number.isNaN(y)) return; // blank cell, e.g. step 0
    const key = row[keyCol];
    if (!byKey.has(key)) byKey.set(key, []);
    byKey.get(key)!.push([x, y]);
  });
  const labels = [...byKey.keys()].sort((a, b) => Number(a) - Number(b));
  return labels.map((label) => {
    const points = byKey.get(label)!;
    points.sort((p, q) => p[0] - q[0]);
    return { label, points };
  });
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) throw new SchemaError("no plottable data rows in csv");
  return [lo, hi];
}

function drawSeries(
  svg: SvgBuilder,
  series: Series[],
  xs: (v: number) => number,
  ys: (v: number) => number,
): void {
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    svg.polyline(
      s.points.map(([x, y]) => [xs(x), ys(y)]),
      color,
    );
  });
}

function legendEntries(series: Series[], prefix: string): Array<[string, string]> {
  const shown = series.slice(0, 8);
  return shown.map((s, i) => [
    `${prefix} ${s.label}`,
    PALETTE[i % PALETTE.length],
  ]);
}

export function renderConvergence(table: Table, opts: FigureOptions = {}): string {
  const series = groupSeries(table, "seed", "step", "epsilon");
  const area = plotArea();
  const allX = series.flatMap((s) => s.points.map((p) => p[0]));
  const allY = series
    .flatMap((s) => s.points.map((p) => p[1]))
    .filter((v) => v > 0);
  if (allY.length === 0) throw new SchemaError("all epsilon values are zero or missing");
  const xs = linearScale(extent(allX), area.x);
  const ys = logScale(extent(allY), area.y);
  const svg = new SvgBuilder(opts.title ?? "spectrum Cauchy gap per step");
  svg.axes(xs, ys, "step", "epsilon (log)", true);
  drawSeries(
    svg,
    series.map((s) => ({
      label: s.label,
      points: s.points.filter(([, y]) => y > 0),
    })),
    xs,
    ys,
  );
  svg.legend(legendEntries(series, "seed"));
  return svg.render();
}

export function renderDrift(table: Table, opts: FigureOptions = {}): string {
  const series = groupSeries(table, "seed", "step", "dsym_over_n");
  const area = plotArea();
  const allX = series.flatMap((s) => s.points.map((p) => p[0]));
  const allY = series.flatMap((s) => s.points.map((p) => p[1]));
  if (opts.asymptote !== undefined) allY.push(opts.asymptote);
  const xs = linearScale(extent(allX), area.x);
  const ys = linearScale(extent(allY), area.y);
  const svg = new SvgBuilder(opts.title ?? "normalized symmetric distance per step");
  svg.axes(xs, ys, "step", "d_sym / n");
  drawSeries(svg, series, xs, ys);
  if (opts.asymptote !== undefined) {
    svg.line(area.x[0], ys(opts.asymptote), area.x[1], ys(opts.asymptote), "#000", "4 3");
  }
  svg.legend(legendEntries(series, "seed"));
  return svg.render();
}

export function renderDensity(table: Table, opts: FigureOptions = {}): string {
  const series = groupSeries(table, "seed", "L", "density");
  const area = plotArea();
  const allX = series.flatMap((s) => s.points.map((p) => p[0]));
  const xs = linearScale(extent(allX), area.x);
  const ys = linearScale([0, 1], area.y);
  const svg = new SvgBuilder(opts.title ?? "axis-time density by strip width");
  svg.axes(xs, ys, "L", "density");
  drawSeries(svg, series, xs, ys);
  svg.legend(legendEntries(series, "seed"));
  return svg.render();
}

export function renderCensus(table: Table, opts: FigureOptions = {}): string {
  const balls = groupSeries(table, "k", "k", "ball_size").flatMap((s) => s.points);
  const strips = groupSeries(table, "k", "k", "strip_count").flatMap((s) => s.points);
  const area = plotArea();
  const allX = balls.map((p) => p[0]);
  const allY = [...balls, ...strips].map((p) => p[1]);
  const xs = linearScale(extent(allX), area.x);
  const ys = logScale([1, Math.max(...allY, 10)], area.y);
  const clamp = (v: number) => Math.max(v, 1);
  const svg = new SvgBuilder(opts.title ?? "ball size vs strip count");
  svg.axes(xs, ys, "radius k", "count (log)", true);
  balls.sort((p, q) => p[0] - q[0]);
  strips.sort((p, q) => p[0] - q[0]);
  svg.polyline(balls.map(([x, y]) => [xs(x), ys(clamp(y))]), PALETTE[0]);
  svg.polyline(strips.map(([x, y]) => [xs(x), ys(clamp(y))]), PALETTE[1]);
  svg.legend([
    ["ball size", PALETTE[0]],
    ["strip count", PALETTE[1]],
  ]);
  return svg.render();
}

export const RENDERERS: Record<
  FigureKind,
  (table: Table, opts?: FigureOptions) => string
> = {
  convergence: renderConvergence,
  drift: renderDrift,
  density: renderDensity,
  census: renderCensus,
};
