import * as fs from 'fs';
import { csvParse } from 'd3-dsv';

export type FigureKind =
  | 'error_loglog'
  | 'acf_bands'
  | 'p_study'
  | 'size_curves'
  | 'bias_curve';

export const FIGURE_KINDS: FigureKind[] = [
  'error_loglog',
  'acf_bands',
  'p_study',
  'size_curves',
  'bias_curve',
];

// Required header per figure kind, matching the Monte Carlo harness's
// documented CSV schema for the experiment kind the figure consumes.
const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  error_loglog: ['N', 'alpha', 'lambda', 'c1', 'c2', 'c3', 'mse', 'rmse'],
  acf_bands: [
    'alpha', 'lam', 'delta', 'n_obs', 'k', 'lag',
    'theory', 'emp_mean', 'band_lo', 'band_hi', 'n_reps_effective',
  ],
  p_study: [
    'regime', 'alpha', 'lam', 'beta', 'rho', 'n_obs', 'p', 'k',
    'bias', 'rmse', 'mc_stderr', 'n_reps_effective',
  ],
  size_curves: [
    'regime', 'alpha', 'lam', 'beta', 'rho', 'n_obs', 'p', 'k',
    'metric', 'level', 'rejection_rate', 'mc_stderr', 'n_reps_effective',
  ],
  bias_curve: [
    'regime', 'alpha', 'lam', 'beta', 'rho', 'n_obs', 'p', 'k',
    'bias', 'rmse', 'mc_stderr', 'n_reps_effective',
  ],
};

// Columns the renderer actually reads as numbers; a cell here that does not
// parse is a data error, not a style question.
const NUMERIC_COLUMNS: Record<FigureKind, string[]> = {
  error_loglog: ['N', 'alpha', 'lambda', 'mse', 'rmse'],
  acf_bands: ['k', 'lag', 'theory', 'emp_mean', 'band_lo', 'band_hi'],
  p_study: ['alpha', 'p', 'rmse'],
  size_curves: ['n_obs', 'level', 'rejection_rate'],
  bias_curve: ['alpha', 'n_obs', 'bias'],
};

export class SchemaError extends Error {}

export interface Table {
  /** Source path, used in error messages and legends. */
  path: string;
  rows: Record<string, string>[];
}

export function loadTable(kind: FigureKind, path: string): Table {
  let text: string;
  try {
    text = fs.readFileSync(path, 'utf8');
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
  const parsed = csvParse(text);
  const have = new Set(parsed.columns);
  const missing = REQUIRED_COLUMNS[kind].filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: missing columns: ${missing.join(', ')}`);
  }
  const rows = parsed as unknown as Record<string, string>[];
  for (const col of NUMERIC_COLUMNS[kind]) {
    rows.forEach((row, i) => {
      if (row[col] === '' || !Number.isFinite(Number(row[col]))) {
        throw new SchemaError(
          `${path}: row ${i + 1}: cannot parse ${col}=${JSON.stringify(row[col])}`,
        );
      }
    });
  }
  return { path, rows };
}

export function num(row: Record<string, string>, col: string): number {
  return Number(row[col]);
}
