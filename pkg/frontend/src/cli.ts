#!/usr/bin/env node
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { render } from './figures.js';
import { FIGURE_KINDS, FigureKind, SchemaError } from './schemas.js';

// Exit codes: 2 usage, 3 input data problems (missing file, schema mismatch).
async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .usage('Usage: semistat-figures <kind> --in <csv...> --out <svg>')
    .command('$0 <kind>', 'Render one figure from Monte Carlo CSV output')
    .positional('kind', { choices: FIGURE_KINDS, demandOption: true })
    .option('in', {
      type: 'string',
      array: true,
      demandOption: true,
      describe: 'Input CSV path(s) with the harness schema for this kind',
    })
    .option('out', { type: 'string', demandOption: true, describe: 'Output SVG path' })
    .option('width', { type: 'number', default: 640 })
    .option('height', { type: 'number', default: 420 })
    .option('title', { type: 'string', default: '' })
    .strict()
    .fail((msg, err) => {
      console.error(msg ?? err?.message);
      process.exit(2);
    })
    .parse();

  try {
    render({
      kind: argv.kind as FigureKind,
      inputs: argv.in as string[],
      output: argv.out as string,
      width: argv.width,
      height: argv.height,
      title: argv.title,
    });
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
      process.exit(3);
    }
    throw err;
  }
}

main();
