/** Deterministic SVG primitives: no timestamps, no randomness, fixed
 * number formatting, so identical inputs give byte-identical files. */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 28, right: 24, bottom: 46, left: 64 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const rounded = Number(x.toPrecision(6));
  return String(rounded);
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  ticks: number[];
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? 10 * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step / 1e6; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  let [lo, hi] = domain;
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const f = (value: number) =>
    range[0] + ((value - lo) / (hi - lo)) * (range[1] - range[0]);
  const scale = f as Scale;
  scale.domain = [lo, hi];
  scale.ticks = niceTicks(lo, hi);
  return scale;
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const base = linearScale([lo, hi], range);
  const f = (value: number) => base(Math.log10(value));
  const scale = f as Scale;
  scale.domain = domain;
  // decade ticks only; log plots here span many orders of magnitude
  const ticks: number[] = [];
  for (let e = Math.ceil(lo); e <= Math.floor(hi); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  scale.ticks = ticks.length > 0 ? ticks : [domain[0], domain[1]];
  return scale;
}

function escapeText(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    );
    this.parts.push(
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    );
    this.text(WIDTH / 2, 18, escapeText(title), {
      anchor: "middle",
      size: 14,
      weight: "bold",
    });
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.5"/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`,
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { anchor?: string; size?: number; weight?: string; rotate?: boolean } = {},
  ): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? 11;
    const weight = opts.weight ? ` font-weight="${opts.weight}"` : "";
    const transform = opts.rotate
      ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"`
      : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" font-size="${size}"${weight}${transform}>${escapeText(content)}</text>`,
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string, logY = false): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.line(x0, y0, x1, y0, "#333");
    this.line(x0, y0, x0, y1, "#333");
    for (const t of xs.ticks) {
      const px = xs(t);
      this.line(px, y0, px, y0 + 4, "#333");
      this.text(px, y0 + 16, fmt(t), { anchor: "middle" });
    }
    for (const t of ys.ticks) {
      const py = ys(t);
      this.line(x0 - 4, py, x0, py, "#333");
      this.line(x0, py, x1, py, "#eee");
      const label = logY ? `1e${Math.round(Math.log10(t))}` : fmt(t);
      this.text(x0 - 7, py + 3, label, { anchor: "end" });
    }
    this.text((x0 + x1) / 2, HEIGHT - 10, xLabel, { anchor: "middle", size: 12 });
    this.text(16, (y0 + y1) / 2, yLabel, {
      anchor: "middle",
      size: 12,
      rotate: true,
    });
  }

  legend(entries: Array<[string, string]>): void {
    let y = MARGIN.top + 8;
    const x = WIDTH - MARGIN.right - 110;
    for (const [label, color] of entries) {
      this.line(x, y - 3, x + 16, y - 3, color);
      this.text(x + 21, y, label, { size: 10 });
      y += 14;
    }
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function plotArea(): { x: [number, number]; y: [number, number] } {
  return {
    x: [MARGIN.left, WIDTH - MARGIN.right],
    y: [HEIGHT - MARGIN.bottom, MARGIN.top],
  };
}
