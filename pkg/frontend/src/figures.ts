import * as fs from 'fs';
import * as path from 'path';
import { scaleLinear, scaleLog } from 'd3-scale';

import { FigureKind, Table, loadTable, num } from './schemas.js';
import {
  MARGIN,
  PALETTE,
  StrokeStyle,
  axisBottom,
  axisLeft,
  dots,
  fmt,
  legend,
  pathLine,
  svgDoc,
  titleText,
} from './svg.js';

export interface FigureSpec {
  kind: FigureKind;
  /** Input CSV paths; several files of the same schema are overlaid. */
  inputs: string[];
  /** Output SVG path. */
  output: string;
  width?: number;
  height?: number;
  title?: string;
}

const DEFAULT_WIDTH = 640;
const DEFAULT_HEIGHT = 420;

type Row = Record<string, string>;

function allRows(tables: Table[]): Row[] {
  return tables.flatMap((t) => t.rows);
}

/** Group rows by a key and return entries sorted by the numeric key parts. */
function groupSorted(rows: Row[], key: (r: Row) => string): [string, Row[]][] {
  const groups = new Map<string, Row[]>();
  for (const r of rows) {
    const k = key(r);
    const list = groups.get(k);
    if (list) list.push(r);
    else groups.set(k, [r]);
  }
  return [...groups.entries()].sort(([a], [b]) => {
    const pa = a.split('|').map(Number);
    const pb = b.split('|').map(Number);
    for (let i = 0; i < Math.max(pa.length, pb.length); i++) {
      const da = Number.isNaN(pa[i]) ? 0 : pa[i];
      const db = Number.isNaN(pb[i]) ? 0 : pb[i];
      if (da !== db) return da - db;
    }
    return a < b ? -1 : a > b ? 1 : 0;
  });
}

function extent(values: number[], lo: number, hi: number): [number, number] {
  if (values.length === 0) return [lo, hi];
  let mn = Infinity;
  let mx = -Infinity;
  for (const v of values) {
    if (v < mn) mn = v;
    if (v > mx) mx = v;
  }
  if (mn === mx) {
    mn -= Math.abs(mn) * 0.5 || 0.5;
    mx += Math.abs(mx) * 0.5 || 0.5;
  }
  return [mn, mx];
}

function logTicks(values: number[], scale: { ticks(n?: number): number[] }): number[] {
  const distinct = [...new Set(values)].sort((a, b) => a - b);
  if (distinct.length > 0 && distinct.length <= 8) return distinct;
  const t = scale.ticks(6);
  if (t.length <= 8) return t;
  return t.filter((v) => Number.isInteger(Math.log10(v)));
}

function renderErrorLoglog(tables: Table[], w: number, h: number, title: string): string {
  const rows = allRows(tables);
  const ns = rows.map((r) => num(r, 'N'));
  const mses = rows.map((r) => num(r, 'mse')).filter((v) => v > 0);
  const x = scaleLog()
    .domain(extent(ns, 10, 1000))
    .range([MARGIN.left, w - MARGIN.right]);
  const [ylo, yhi] = extent(mses, 1e-4, 1);
  const y = scaleLog()
    .domain([ylo / 1.3, yhi * 1.3])
    .range([h - MARGIN.bottom, MARGIN.top]);

  let body = '';
  const entries = [];
  const groups = groupSorted(rows, (r) => `${r.alpha}|${r.lambda}`);
  for (let i = 0; i < groups.length; i++) {
    const [key, grows] = groups[i];
    const [alpha, lambda] = key.split('|').map(Number);
    const sorted = [...grows].sort((a, b) => num(a, 'N') - num(b, 'N'));
    const pts = sorted
      .filter((r) => num(r, 'mse') > 0)
      .map((r) => [x(num(r, 'N')), y(num(r, 'mse'))] as [number, number]);
    const style: StrokeStyle = {
      color: PALETTE[i % PALETTE.length],
      dash: alpha < 0 ? '6,3' : undefined,
    };
    body += pathLine(pts, style);
    body += dots(pts, style.color);
    entries.push({ label: `alpha=${fmt(alpha)}, lambda=${fmt(lambda)}`, style });
  }
  body += axisBottom(x, h - MARGIN.bottom, MARGIN.left, w - MARGIN.right, 'N', logTicks(ns, x));
  body += axisLeft(y, MARGIN.left, h - MARGIN.bottom, MARGIN.top, 'MSE');
  body += legend(entries, MARGIN.left + 14, MARGIN.top + 10);
  body += titleText(w, title);
  return svgDoc(w, h, body);
}

function renderAcfBands(tables: Table[], w: number, h: number, title: string): string {
  const rows = allRows(tables);
  const groups = groupSorted(rows, (r) => String(num(r, 'k')));
  const nPanels = Math.max(groups.length, 1);
  const gap = 18;
  const panelW = (w - MARGIN.left - MARGIN.right - gap * (nPanels - 1)) / nPanels;

  let body = '';
  for (let i = 0; i < nPanels; i++) {
    const grows = groups[i] ? groups[i][1] : [];
    const x0 = MARGIN.left + i * (panelW + gap);
    const lags = grows.map((r) => num(r, 'lag'));
    const ally = grows.flatMap((r) => [
      num(r, 'theory'), num(r, 'emp_mean'), num(r, 'band_lo'), num(r, 'band_hi'),
    ]);
    const x = scaleLinear()
      .domain(extent(lags, 0, 10))
      .range([x0, x0 + panelW]);
    const [ylo, yhi] = extent(ally, 0, 1);
    const y = scaleLinear()
      .domain([Math.min(ylo, 0), Math.max(yhi, 1)])
      .range([h - MARGIN.bottom, MARGIN.top]);

    const sorted = [...grows].sort((a, b) => num(a, 'lag') - num(b, 'lag'));
    const pick = (col: string) =>
      sorted.map((r) => [x(num(r, 'lag')), y(num(r, col))] as [number, number]);
    body += pathLine(pick('band_lo'), { color: '#888888', dash: '4,3', width: 1 });
    body += pathLine(pick('band_hi'), { color: '#888888', dash: '4,3', width: 1 });
    body += pathLine(pick('theory'), { color: '#000000', width: 1.8 });
    body += pathLine(pick('emp_mean'), { color: PALETTE[0] });
    body += axisBottom(x, h - MARGIN.bottom, x0, x0 + panelW, 'lag', x.ticks(5));
    body += axisLeft(y, x0, h - MARGIN.bottom, MARGIN.top, i === 0 ? 'autocorrelation' : '');
    if (groups[i]) {
      body +=
        `<text x="${fmt(x0 + panelW / 2)}" y="${MARGIN.top - 6}" ` +
        `text-anchor="middle">k=${fmt(Number(groups[i][0]))}</text>\n`;
    }
  }
  body += legend(
    [
      { label: 'model', style: { color: '#000000', width: 1.8 } },
      { label: 'empirical mean', style: { color: PALETTE[0] } },
      { label: '95% band', style: { color: '#888888', dash: '4,3', width: 1 } },
    ],
    w - MARGIN.right - 130,
    MARGIN.top + 10,
  );
  body += titleText(w, title);
  return svgDoc(w, h, body);
}

function renderPStudy(tables: Table[], w: number, h: number, title: string): string {
  const rows = allRows(tables);
  const ps = rows.map((r) => num(r, 'p'));
  const rmses = rows.map((r) => num(r, 'rmse'));
  const x = scaleLinear()
    .domain(extent(ps, 0.5, 4))
    .range([MARGIN.left, w - MARGIN.right]);
  const [ylo, yhi] = extent(rmses, 0, 0.2);
  const y = scaleLinear()
    .domain([Math.min(ylo * 0.9, ylo - 0.005), yhi * 1.1])
    .range([h - MARGIN.bottom, MARGIN.top]);

  let body = '';
  const entries = [];
  const groups = groupSorted(rows, (r) => r.alpha);
  for (let i = 0; i < groups.length; i++) {
    const [key, grows] = groups[i];
    const sorted = [...grows].sort((a, b) => num(a, 'p') - num(b, 'p'));
    const pts = sorted.map(
      (r) => [x(num(r, 'p')), y(num(r, 'rmse'))] as [number, number],
    );
    const style: StrokeStyle = { color: PALETTE[i % PALETTE.length] };
    body += pathLine(pts, style);
    body += dots(pts, style.color);
    entries.push({ label: `alpha=${fmt(Number(key))}`, style });
  }
  body += axisBottom(x, h - MARGIN.bottom, MARGIN.left, w - MARGIN.right, 'p');
  body += axisLeft(y, MARGIN.left, h - MARGIN.bottom, MARGIN.top, 'RMSE');
  body += legend(entries, w - MARGIN.right - 120, MARGIN.top + 10);
  body += titleText(w, title);
  return svgDoc(w, h, body);
}

function renderSizeCurves(tables: Table[], w: number, h: number, title: string): string {
  const rows = allRows(tables);
  const ns = rows.map((r) => num(r, 'n_obs'));
  const rates = rows.map((r) => num(r, 'rejection_rate'));
  const levels = [...new Set(rows.map((r) => num(r, 'level')))].sort((a, b) => a - b);
  const x = scaleLog()
    .domain(extent(ns, 10, 1000))
    .range([MARGIN.left, w - MARGIN.right]);
  const ymax = Math.max(rates.length ? Math.max(...rates) * 1.2 : 0.12,
    levels.length ? Math.max(...levels) * 2 : 0.12);
  const y = scaleLinear()
    .domain([0, ymax])
    .range([h - MARGIN.bottom, MARGIN.top]);

  let body = '';
  for (const lvl of levels) {
    body +=
      `<line x1="${fmt(MARGIN.left)}" y1="${fmt(y(lvl))}" ` +
      `x2="${fmt(w - MARGIN.right)}" y2="${fmt(y(lvl))}" stroke="#aaaaaa" ` +
      `stroke-dasharray="2,3"/>\n`;
  }
  const entries = [];
  const groups = groupSorted(rows, (r) => `${r.level}|${r.metric}`);
  for (let i = 0; i < groups.length; i++) {
    const [key, grows] = groups[i];
    const [lvl] = key.split('|');
    const metric = grows[0].metric;
    const sorted = [...grows].sort((a, b) => num(a, 'n_obs') - num(b, 'n_obs'));
    const pts = sorted.map(
      (r) => [x(num(r, 'n_obs')), y(num(r, 'rejection_rate'))] as [number, number],
    );
    const style: StrokeStyle = { color: PALETTE[i % PALETTE.length] };
    body += pathLine(pts, style);
    body += dots(pts, style.color);
    entries.push({ label: `${metric}, level ${fmt(Number(lvl))}`, style });
  }
  body += axisBottom(x, h - MARGIN.bottom, MARGIN.left, w - MARGIN.right, 'N', logTicks(ns, x));
  body += axisLeft(y, MARGIN.left, h - MARGIN.bottom, MARGIN.top, 'rejection rate');
  body += legend(entries, w - MARGIN.right - 140, MARGIN.top + 10);
  body += titleText(w, title);
  return svgDoc(w, h, body);
}

function renderBiasCurve(tables: Table[], w: number, h: number, title: string): string {
  const rows = allRows(tables);
  const ns = rows.map((r) => num(r, 'n_obs'));
  const biases = rows.map((r) => num(r, 'bias'));
  const x = scaleLog()
    .domain(extent(ns, 10, 1000))
    .range([MARGIN.left, w - MARGIN.right]);
  const [blo, bhi] = extent(biases, -0.1, 0.02);
  const y = scaleLinear()
    .domain([Math.min(blo * 1.15, -0.01), Math.max(bhi * 1.15, 0.01)])
    .range([h - MARGIN.bottom, MARGIN.top]);

  let body =
    `<line x1="${fmt(MARGIN.left)}" y1="${fmt(y(0))}" ` +
    `x2="${fmt(w - MARGIN.right)}" y2="${fmt(y(0))}" stroke="#aaaaaa" ` +
    `stroke-dasharray="2,3"/>\n`;
  const entries = [];
  const groups = groupSorted(rows, (r) => r.alpha);
  for (let i = 0; i < groups.length; i++) {
    const [key, grows] = groups[i];
    const sorted = [...grows].sort((a, b) => num(a, 'n_obs') - num(b, 'n_obs'));
    const pts = sorted.map(
      (r) => [x(num(r, 'n_obs')), y(num(r, 'bias'))] as [number, number],
    );
    const style: StrokeStyle = { color: PALETTE[i % PALETTE.length] };
    body += pathLine(pts, style);
    body += dots(pts, style.color);
    entries.push({ label: `alpha=${fmt(Number(key))}`, style });
  }
  body += axisBottom(x, h - MARGIN.bottom, MARGIN.left, w - MARGIN.right, 'N (log scale)', logTicks(ns, x));
  body += axisLeft(y, MARGIN.left, h - MARGIN.bottom, MARGIN.top, 'bias');
  body += legend(entries, w - MARGIN.right - 120, h - MARGIN.bottom - 20 - 16 * groups.length);
  body += titleText(w, title);
  return svgDoc(w, h, body);
}

const RENDERERS: Record<
  FigureKind,
  (tables: Table[], w: number, h: number, title: string) => string
> = {
  error_loglog: renderErrorLoglog,
  acf_bands: renderAcfBands,
  p_study: renderPStudy,
  size_curves: renderSizeCurves,
  bias_curve: renderBiasCurve,
};

/** Render a figure to an SVG string without touching the filesystem output. */
export function renderToString(spec: FigureSpec): string {
  const tables = spec.inputs.map((p) => loadTable(spec.kind, p));
  const w = spec.width ?? DEFAULT_WIDTH;
  const h = spec.height ?? DEFAULT_HEIGHT;
  return RENDERERS[spec.kind](tables, w, h, spec.title ?? '');
}

/** Render a figure and write it to spec.output. */
export function render(spec: FigureSpec): void {
  const svg = renderToString(spec);
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg);
}
