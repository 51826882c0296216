/** Reader for the simulator's aggregated.csv. Values stay as the exact
 *  strings from the file; numeric parsing happens only where a chart needs
 *  coordinates. */
import fs from "node:fs";

export type Row = Record<string, string>;

export const KEY_COLUMNS = ["posture", "strategy", "rate_pps", "buffer", "seeds"];

export const REQUIRED_COLUMNS = [
  ...KEY_COLUMNS,
  "coverage_pct_mean", "coverage_pct_sd",
  "deseq_pct_mean", "deseq_pct_sd",
  "delay_mean_ms_mean", "delay_mean_ms_sd",
  "tx_total_mean", "rx_total_mean",
  ...Array.from({ length: 7 }, (_, i) => `delay_n${i}_ms_mean`),
  ...Array.from({ length: 7 }, (_, i) => `delay_n${i}_ms_sd`),
  ...Array.from({ length: 7 }, (_, i) => `txrx_n${i}_mean`),
  ...Array.from({ length: 7 }, (_, i) => `txrx_n${i}_sd`),
];

export function parseCsv(text: string): { header: string[]; rows: Row[] } {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) throw new Error("empty csv");
  const header = lines[0].split(",");
  const rows: Row[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`line ${i + 1}: ${cells.length} cells, expected ${header.length}`);
    }
    const row: Row = {};
    header.forEach((name, k) => (row[name] = cells[k]));
    rows.push(row);
  }
  return { header, rows };
}

export function readAggCsv(path: string): Row[] {
  const { header, rows } = parseCsv(fs.readFileSync(path, "utf8"));
  for (const col of REQUIRED_COLUMNS) {
    if (!header.includes(col)) throw new Error(`${path}: missing column ${col}`);
  }
  if (rows.length === 0) throw new Error(`${path}: no data rows`);
  return rows;
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (Number.isNaN(v)) throw new Error(`bad number in ${col}: ${row[col]}`);
  return v;
}

export function uniqueSorted(rows: Row[], col: string, numeric = false): string[] {
  const seen = [...new Set(rows.map((r) => r[col]))];
  if (numeric) seen.sort((a, b) => Number(a) - Number(b));
  else seen.sort();
  return seen;
}
