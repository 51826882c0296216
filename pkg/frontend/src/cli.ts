#!/usr/bin/env node
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import { renderToFile } from "./render.js";
import { FAMILIES } from "./families.js";

const USAGE = `usage: wbansim-figures render --csv PATH --family NAME [--posture P] [--buffer B] [--rate R] --out FILE

families: ${FAMILIES.join(", ")}`;

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        csv: { type: "string" },
        family: { type: "string" },
        posture: { type: "string" },
        buffer: { type: "string" },
        rate: { type: "string" },
        out: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    return 2;
  }
  if (args.values.help) {
    console.log(USAGE);
    return 0;
  }
  const [command] = args.positionals;
  if (command !== "render") {
    console.error(command ? `unknown command: ${command}` : "missing command");
    console.error(USAGE);
    return 2;
  }
  const { csv, family, out } = args.values;
  if (!csv || !family || !out) {
    console.error("render needs --csv, --family and --out");
    console.error(USAGE);
    return 2;
  }
  try {
    const figure = renderToFile(csv, family, out, {
      posture: args.values.posture,
      buffer: args.values.buffer,
      rate: args.values.rate,
    });
    console.log(`wrote ${out} (${figure.series.length} series)`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? "").href) {
  process.exit(main(process.argv.slice(2)));
}
