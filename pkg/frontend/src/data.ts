/** Shapes the csv rows into per-figure series. A Series keeps the raw csv
 *  strings for y (and sd) so the rendered values are the file values. */
import { Row, num, uniqueSorted } from "./csv.js";

export const STRATEGY_ORDER = [
  "flooding", "plain", "pruned", "probabilistic", "mbp", "optflood", "clpb",
];

export interface Series {
  name: string;
  x: string[];   // raw csv strings (rate_pps, node id, posture, ...)
  y: string[];   // raw csv strings, rendered verbatim into the svg
  sd?: string[]; // optional error bar values, raw strings
}

export interface Figure {
  family: string;
  title: string;
  xLabel: string;
  yLabel: string;
  kind: "line" | "bar";
  logX: boolean;
  series: Series[];
}

export interface Selection {
  posture?: string;
  buffer?: string;
  rate?: string;
}

function strategiesPresent(rows: Row[]): string[] {
  const present = new Set(rows.map((r) => r.strategy));
  return STRATEGY_ORDER.filter((s) => present.has(s));
}

function pick(rows: Row[], sel: Selection): { rows: Row[]; posture: string; buffer: string } {
  const posture = sel.posture ?? uniqueSorted(rows, "posture")[0];
  if (!rows.some((r) => r.posture === posture)) {
    throw new Error(`posture ${posture} not in csv`);
  }
  let out = rows.filter((r) => r.posture === posture);
  const buffers = uniqueSorted(out, "buffer", true);
  const buffer = sel.buffer ?? buffers[0];
  if (!buffers.includes(buffer)) throw new Error(`buffer ${buffer} not in csv`);
  out = out.filter((r) => r.buffer === buffer);
  return { rows: out, posture, buffer };
}

// bar charts compare strategies on one burst, so default to the lowest rate
function pickRate(rows: Row[], sel: Selection): string {
  const rates = uniqueSorted(rows, "rate_pps", true);
  const rate = sel.rate ?? rates[0];
  if (!rates.includes(rate)) throw new Error(`rate ${rate} not in csv`);
  return rate;
}

function rateSeries(rows: Row[], yCol: string, sdCol?: string): Series[] {
  const out: Series[] = [];
  for (const strategy of strategiesPresent(rows)) {
    const mine = rows
      .filter((r) => r.strategy === strategy)
      .sort((a, b) => num(a, "rate_pps") - num(b, "rate_pps"));
    out.push({
      name: strategy,
      x: mine.map((r) => r.rate_pps),
      y: mine.map((r) => r[yCol]),
      sd: sdCol ? mine.map((r) => r[sdCol]) : undefined,
    });
  }
  return out;
}

const NODE_IDS = ["0", "1", "2", "3", "4", "5", "6"];

function perNodeSeries(rows: Row[], rate: string, stem: string): Series[] {
  const out: Series[] = [];
  for (const strategy of strategiesPresent(rows)) {
    const row = rows.find((r) => r.strategy === strategy && r.rate_pps === rate);
    if (!row) continue;
    out.push({
      name: strategy,
      x: NODE_IDS.slice(),
      y: NODE_IDS.map((i) => row[stem.replace("*", i) + "_mean"]),
      sd: NODE_IDS.map((i) => row[stem.replace("*", i) + "_sd"]),
    });
  }
  return out;
}

export function buildFigure(family: string, rows: Row[], sel: Selection = {}): Figure {
  switch (family) {
    case "coverage_vs_rate": {
      const { rows: r, posture, buffer } = pick(rows, sel);
      return {
        family, kind: "line", logX: true,
        title: `coverage vs rate (${posture}, B=${buffer})`,
        xLabel: "rate (pps)", yLabel: "coverage (%)",
        series: rateSeries(r, "coverage_pct_mean", "coverage_pct_sd"),
      };
    }
    case "deseq_vs_rate": {
      const { rows: r, posture, buffer } = pick(rows, sel);
      return {
        family, kind: "line", logX: true,
        title: `de-sequencing vs rate (${posture}, B=${buffer})`,
        xLabel: "rate (pps)", yLabel: "de-sequencing (%)",
        series: rateSeries(r, "deseq_pct_mean", "deseq_pct_sd"),
      };
    }
    case "txrx_vs_rate": {
      const { rows: r, posture, buffer } = pick(rows, sel);
      const tx = rateSeries(r, "tx_total_mean").map((s) => ({ ...s, name: `${s.name} tx` }));
      const rx = rateSeries(r, "rx_total_mean").map((s) => ({ ...s, name: `${s.name} rx` }));
      return {
        family, kind: "line", logX: true,
        title: `traffic vs rate (${posture}, B=${buffer})`,
        xLabel: "rate (pps)", yLabel: "frames per run",
        series: [...tx, ...rx],
      };
    }
    case "coverage_by_strategy": {
      const { rows: r, posture, buffer } = pick(rows, sel);
      const rate = pickRate(r, sel);
      const at = r.filter((row) => row.rate_pps === rate);
      const names = strategiesPresent(at);
      return {
        family, kind: "bar", logX: false,
        title: `coverage by strategy (${posture}, B=${buffer}, ${rate} pps)`,
        xLabel: "strategy", yLabel: "coverage (%)",
        series: [{
          name: "coverage",
          x: names,
          y: names.map((s) => at.find((row) => row.strategy === s)!.coverage_pct_mean),
          sd: names.map((s) => at.find((row) => row.strategy === s)!.coverage_pct_sd),
        }],
      };
    }
    case "delay_per_node": {
      const { rows: r, posture, buffer } = pick(rows, sel);
      const rate = pickRate(r, sel);
      return {
        family, kind: "bar", logX: false,
        title: `per-node delay (${posture}, B=${buffer}, ${rate} pps)`,
        xLabel: "node", yLabel: "delay (ms)",
        series: perNodeSeries(r, rate, "delay_n*_ms"),
      };
    }
    case "txrx_per_node": {
      const { rows: r, posture, buffer } = pick(rows, sel);
      const rate = pickRate(r, sel);
      return {
        family, kind: "bar", logX: false,
        title: `per-node traffic (${posture}, B=${buffer}, ${rate} pps)`,
        xLabel: "node", yLabel: "tx+rx frames",
        series: perNodeSeries(r, rate, "txrx_n*"),
      };
    }
    case "delay_per_posture": {
      // posture is the x axis here, so only buffer/rate filters apply
      const buffers = uniqueSorted(rows, "buffer", true);
      const buffer = sel.buffer ?? buffers[0];
      if (!buffers.includes(buffer)) throw new Error(`buffer ${buffer} not in csv`);
      const atBuf = rows.filter((r) => r.buffer === buffer);
      const rate = pickRate(atBuf, sel);
      const at = atBuf.filter((r) => r.rate_pps === rate);
      const postures = uniqueSorted(at, "posture");
      const series: Series[] = [];
      for (const strategy of strategiesPresent(at)) {
        const mine = at.filter((r) => r.strategy === strategy);
        const have = postures.filter((p) => mine.some((r) => r.posture === p));
        series.push({
          name: strategy,
          x: have,
          y: have.map((p) => mine.find((r) => r.posture === p)!.delay_mean_ms_mean),
          sd: have.map((p) => mine.find((r) => r.posture === p)!.delay_mean_ms_sd),
        });
      }
      return {
        family, kind: "bar", logX: false,
        title: `mean delay by posture (B=${buffer}, ${rate} pps)`,
        xLabel: "posture", yLabel: "delay (ms)",
        series,
      };
    }
    default:
      throw new Error(`unknown family: ${family}`);
  }
}
