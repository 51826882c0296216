export { parseCsv, readAggCsv, REQUIRED_COLUMNS, KEY_COLUMNS } from "./csv.js";
export type { Row } from "./csv.js";
export { buildFigure, STRATEGY_ORDER } from "./data.js";
export type { Series, Figure, Selection } from "./data.js";
export { FAMILIES, isFamily } from "./families.js";
export type { Family } from "./families.js";
export { figureToSvg } from "./svg.js";
export { renderFigure, renderToFile } from "./render.js";
