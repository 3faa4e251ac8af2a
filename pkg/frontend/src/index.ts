export { render, renderToString } from './figures.js';
export type { FigureSpec } from './figures.js';
export { FIGURE_KINDS, SchemaError, loadTable } from './schemas.js';
export type { FigureKind, Table } from './schemas.js';
