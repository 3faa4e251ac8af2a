// Small deterministic SVG helpers. Everything is plain string assembly with
// one number formatter, so a figure's bytes depend only on its inputs.

export interface AxisScale {
  (v: number): number;
  ticks(count?: number): number[];
}

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  if (x === 0) return '0';
  return String(Number(x.toPrecision(6)));
}

export function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const MARGIN: Margin = { top: 34, right: 16, bottom: 42, left: 56 };

export function svgDoc(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="Helvetica, Arial, sans-serif" font-size="11">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    '</svg>\n'
  );
}

export function titleText(width: number, title: string): string {
  if (!title) return '';
  return (
    `<text x="${fmt(width / 2)}" y="16" text-anchor="middle" ` +
    `font-size="13">${esc(title)}</text>\n`
  );
}

export interface StrokeStyle {
  color: string;
  dash?: string; // e.g. "5,3"; omitted means solid
  width?: number;
}

export function pathLine(pts: [number, number][], style: StrokeStyle): string {
  if (pts.length === 0) return '';
  const d = pts
    .map(([x, y], i) => `${i === 0 ? 'M' : 'L'}${fmt(x)},${fmt(y)}`)
    .join('');
  const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : '';
  return (
    `<path class="series" d="${d}" fill="none" stroke="${style.color}" ` +
    `stroke-width="${style.width ?? 1.5}"${dash}/>\n`
  );
}

export function dots(pts: [number, number][], color: string, r = 2.5): string {
  return pts
    .map(
      ([x, y]) =>
        `<circle class="series" cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" ` +
        `fill="${color}"/>\n`,
    )
    .join('');
}

export function axisBottom(
  scale: AxisScale,
  y: number,
  x0: number,
  x1: number,
  label: string,
  tickValues?: number[],
): string {
  const ticks = tickValues ?? scale.ticks(6);
  let out = `<line x1="${fmt(x0)}" y1="${fmt(y)}" x2="${fmt(x1)}" y2="${fmt(y)}" stroke="black"/>\n`;
  for (const t of ticks) {
    const x = scale(t);
    out += `<line x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x)}" y2="${fmt(y + 5)}" stroke="black"/>\n`;
    out += `<text x="${fmt(x)}" y="${fmt(y + 17)}" text-anchor="middle">${esc(fmt(t))}</text>\n`;
  }
  out +=
    `<text x="${fmt((x0 + x1) / 2)}" y="${fmt(y + 33)}" ` +
    `text-anchor="middle" font-style="italic">${esc(label)}</text>\n`;
  return out;
}

export function axisLeft(
  scale: AxisScale,
  x: number,
  y0: number,
  y1: number,
  label: string,
  tickValues?: number[],
): string {
  const ticks = tickValues ?? scale.ticks(6);
  let out = `<line x1="${fmt(x)}" y1="${fmt(y0)}" x2="${fmt(x)}" y2="${fmt(y1)}" stroke="black"/>\n`;
  for (const t of ticks) {
    const y = scale(t);
    out += `<line x1="${fmt(x - 5)}" y1="${fmt(y)}" x2="${fmt(x)}" y2="${fmt(y)}" stroke="black"/>\n`;
    out += `<text x="${fmt(x - 8)}" y="${fmt(y + 3.5)}" text-anchor="end">${esc(fmt(t))}</text>\n`;
  }
  const cy = (y0 + y1) / 2;
  out +=
    `<text x="${fmt(x - 42)}" y="${fmt(cy)}" text-anchor="middle" ` +
    `font-style="italic" transform="rotate(-90 ${fmt(x - 42)} ${fmt(cy)})">` +
    `${esc(label)}</text>\n`;
  return out;
}

export interface LegendEntry {
  label: string;
  style: StrokeStyle;
}

export function legend(entries: LegendEntry[], x: number, y: number): string {
  let out = '';
  entries.forEach((e, i) => {
    const yy = y + 16 * i;
    const dash = e.style.dash ? ` stroke-dasharray="${e.style.dash}"` : '';
    out +=
      `<line x1="${fmt(x)}" y1="${fmt(yy)}" x2="${fmt(x + 22)}" y2="${fmt(yy)}" ` +
      `stroke="${e.style.color}" stroke-width="${e.style.width ?? 1.5}"${dash}/>\n`;
    out += `<text x="${fmt(x + 27)}" y="${fmt(yy + 3.5)}">${esc(e.label)}</text>\n`;
  });
  return out;
}

// Okabe-Ito palette: distinguishable in print and for most color vision types.
export const PALETTE = [
  '#0072B2',
  '#D55E00',
  '#009E73',
  '#CC79A7',
  '#E69F00',
  '#56B4E9',
  '#000000',
];
