import fs from "node:fs";
import path from "node:path";
import { readAggCsv } from "./csv.js";
import { buildFigure, Selection, Figure } from "./data.js";
import { figureToSvg } from "./svg.js";
import { isFamily } from "./families.js";

export function renderFigure(csvPath: string, family: string, sel: Selection = {}): {
  figure: Figure;
  svg: string;
} {
  if (!isFamily(family)) throw new Error(`unknown family: ${family}`);
  const rows = readAggCsv(csvPath);
  const figure = buildFigure(family, rows, sel);
  return { figure, svg: figureToSvg(figure) };
}

export function renderToFile(csvPath: string, family: string, outPath: string,
  sel: Selection = {}): Figure {
  const { figure, svg } = renderFigure(csvPath, family, sel);
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, svg);
  return figure;
}
