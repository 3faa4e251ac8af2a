import { spawnSync } from 'child_process';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { fileURLToPath } from 'url';
import { describe, expect, it } from 'vitest';

import { FigureSpec, renderToString } from '../src/figures.js';
import { FIGURE_KINDS, SchemaError, loadTable } from '../src/schemas.js';

const HERE = path.dirname(fileURLToPath(import.meta.url));
const GOLDEN = path.join(HERE, 'golden');
const CLI = path.join(HERE, '..', 'dist', 'cli.js');

const GOLDEN_INPUTS: Record<string, string[]> = {
  error_loglog: [
    path.join(GOLDEN, 'error_rough.csv'),
    path.join(GOLDEN, 'error_smooth.csv'),
  ],
  acf_bands: [path.join(GOLDEN, 'acf_bands.csv')],
  p_study: [path.join(GOLDEN, 'p_study.csv')],
  size_curves: [path.join(GOLDEN, 'size_curves.csv')],
  bias_curve: [path.join(GOLDEN, 'bias_curve.csv')],
};

function spec(kind: string, out = 'unused.svg'): FigureSpec {
  return {
    kind: kind as FigureSpec['kind'],
    inputs: GOLDEN_INPUTS[kind],
    output: out,
  };
}

describe('rendering from golden CSVs', () => {
  for (const kind of FIGURE_KINDS) {
    it(`renders ${kind}`, () => {
      const svg = renderToString(spec(kind));
      expect(svg.startsWith('<svg ')).toBe(true);
      expect(svg.endsWith('</svg>\n')).toBe(true);
      expect(svg).toContain('class="series"');
      expect(svg).toContain('<line'); // axes
    });
  }

  it('is byte-deterministic across two runs for every kind', () => {
    for (const kind of FIGURE_KINDS) {
      const a = renderToString(spec(kind));
      const b = renderToString(spec(kind));
      expect(b).toBe(a);
    }
  });

  it('draws rough-kernel error curves dashed and smooth ones solid', () => {
    const rough = renderToString({
      kind: 'error_loglog',
      inputs: [path.join(GOLDEN, 'error_rough.csv')],
      output: 'unused.svg',
    });
    const smooth = renderToString({
      kind: 'error_loglog',
      inputs: [path.join(GOLDEN, 'error_smooth.csv')],
      output: 'unused.svg',
    });
    const seriesPath = (svg: string) =>
      svg.split('\n').find((l) => l.startsWith('<path class="series"')) ?? '';
    expect(seriesPath(rough)).toContain('stroke-dasharray');
    expect(seriesPath(smooth)).not.toContain('stroke-dasharray');
  });

  it('overlays several input files as separate legend entries', () => {
    const svg = renderToString(spec('error_loglog'));
    expect(svg).toContain('alpha=-0.25, lambda=1');
    expect(svg).toContain('alpha=0.25, lambda=1');
  });

  it('lays out one ACF panel per refinement factor', () => {
    const svg = renderToString(spec('acf_bands'));
    expect(svg).toContain('>k=1<');
    expect(svg).toContain('>k=100<');
  });

  it('marks every nominal level as a reference rule in size curves', () => {
    const svg = renderToString(spec('size_curves'));
    const rules = svg.split('\n').filter((l) => l.includes('stroke-dasharray="2,3"'));
    expect(rules.length).toBe(2); // levels 0.01 and 0.05
  });
});

describe('schema validation', () => {
  it('names the missing columns', () => {
    expect(() =>
      loadTable('error_loglog', path.join(GOLDEN, 'acf_bands.csv')),
    ).toThrow(/missing columns: N, lambda, c1, c2, c3, mse, rmse/);
    expect(() =>
      loadTable('size_curves', path.join(GOLDEN, 'bias_curve.csv')),
    ).toThrow(/missing columns: metric, level, rejection_rate/);
  });

  it('rejects unparseable numeric cells with column and row', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'figtest-'));
    const bad = path.join(dir, 'bad.csv');
    fs.writeFileSync(
      bad,
      'N,alpha,lambda,c1,c2,c3,mse,rmse\n50,-0.25,1,1,1,-2,oops,0.2\n',
    );
    expect(() => loadTable('error_loglog', bad)).toThrow(/row 1: cannot parse mse="oops"/);
  });

  it('raises SchemaError, not a generic failure', () => {
    try {
      loadTable('error_loglog', path.join(GOLDEN, 'p_study.csv'));
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
    }
  });
});

describe('empty-but-valid input', () => {
  it('renders empty axes without series marks', () => {
    const svg = renderToString({
      kind: 'error_loglog',
      inputs: [path.join(GOLDEN, 'error_empty.csv')],
      output: 'unused.svg',
    });
    expect(svg).toContain('<line'); // axes still present
    expect(svg).not.toContain('class="series"');
  });
});

describe('command line', () => {
  function run(args: string[]) {
    return spawnSync('node', [CLI, ...args], { encoding: 'utf8' });
  }

  it('writes identical bytes on repeated runs of every kind', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'figtest-'));
    for (const kind of FIGURE_KINDS) {
      const out1 = path.join(dir, `${kind}-1.svg`);
      const out2 = path.join(dir, `${kind}-2.svg`);
      for (const out of [out1, out2]) {
        const res = run([kind, '--in', ...GOLDEN_INPUTS[kind], '--out', out]);
        expect(res.status).toBe(0);
      }
      expect(fs.readFileSync(out1)).toEqual(fs.readFileSync(out2));
    }
  });

  it('exits 0 on an empty-but-valid CSV', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'figtest-'));
    const out = path.join(dir, 'empty.svg');
    const res = run([
      'error_loglog', '--in', path.join(GOLDEN, 'error_empty.csv'), '--out', out,
    ]);
    expect(res.status).toBe(0);
    expect(fs.existsSync(out)).toBe(true);
  });

  it('exits 3 with named columns on a schema mismatch', () => {
    const res = run([
      'size_curves', '--in', path.join(GOLDEN, 'acf_bands.csv'), '--out', '/tmp/x.svg',
    ]);
    expect(res.status).toBe(3);
    expect(res.stderr).toContain('missing columns:');
    expect(res.stderr).toContain('rejection_rate');
  });

  it('exits 3 on a missing input file', () => {
    const res = run(['p_study', '--in', '/does/not/exist.csv', '--out', '/tmp/x.svg']);
    expect(res.status).toBe(3);
  });

  it('exits 2 on an unknown figure kind', () => {
    const res = run(['histogram', '--in', 'a.csv', '--out', 'b.svg']);
    expect(res.status).toBe(2);
  });
});
