/** Tiny SVG assembly helpers: linear scales, shapes, axis ticks. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function ticks(lo: number, hi: number, count: number): number[] {
  if (!Number.isFinite(lo) || !Number.isFinite(hi) || lo === hi) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count);
  const power = Math.pow(10, Math.floor(Math.log10(Math.abs(rawStep))));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[3];
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

const esc = (text: string) =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgBuilder {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  rect(x: number, y: number, w: number, h: number, style: string, cls = ""): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}"` +
      `${cls ? ` class="${cls}"` : ""} style="${style}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string, cls = ""): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}"` +
      `${cls ? ` class="${cls}"` : ""} style="${style}"/>`);
  }

  polyline(points: Array<[number, number]>, style: string, cls = ""): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${path}"${cls ? ` class="${cls}"` : ""} style="${style}"/>`);
  }

  circle(cx: number, cy: number, r: number, style: string, cls = ""): void {
    this.parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}"` +
      `${cls ? ` class="${cls}"` : ""} style="${style}"/>`);
  }

  text(x: number, y: number, content: string, style: string, anchor = "middle"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" style="${style}">` +
      `${esc(content)}</text>`);
  }

  group(transform: string, body: (svg: this) => void): void {
    this.parts.push(`<g transform="${transform}">`);
    body(this);
    this.parts.push("</g>");
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}"` +
      ` viewBox="0 0 ${this.width} ${this.height}" font-family="sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" style="fill:white"/>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

function fmt(value: number): string {
  return Number(value.toFixed(3)).toString();
}
