/** Minimal svg chart writer. No chart library: the output needs to carry the
 *  exact csv strings it plots (in data-* attributes), which is easiest when we
 *  own the markup. */
import { Figure, Series } from "./data.js";

export const WIDTH = 880;
export const HEIGHT = 560;
const MARGIN = { top: 48, right: 160, bottom: 56, left: 72 };

export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
  "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
];

const plotW = WIDTH - MARGIN.left - MARGIN.right;
const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

interface Scale {
  (v: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (hi === lo) hi = lo + 1;
  const f = ((v: number) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mul = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / (step * mul)) * step * mul; t <= hi + 1e-9; t += step * mul) {
    ticks.push(Number(t.toPrecision(12)));
  }
  f.ticks = ticks;
  return f;
}

function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(Math.max(lo, 1e-12));
  const lhi = Math.log10(Math.max(hi, lo * 10));
  const f = ((v: number) =>
    outLo + ((Math.log10(Math.max(v, 1e-12)) - llo) / (lhi - llo)) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.floor(llo); e <= Math.ceil(lhi); e++) {
    const t = Math.pow(10, e);
    if (t >= lo / 1.0001 && t <= hi * 1.0001) ticks.push(t);
  }
  f.ticks = ticks;
  return f;
}

function yRange(series: Series[]): [number, number] {
  let hi = 0;
  let lo = 0;
  for (const s of series) {
    s.y.forEach((v, i) => {
      const y = Number(v);
      const e = s.sd ? Number(s.sd[i]) : 0;
      hi = Math.max(hi, y + e);
      lo = Math.min(lo, y - e);
    });
  }
  if (hi === 0) hi = 1;
  return [Math.min(lo, 0), hi * 1.05];
}

function axes(fig: Figure, sx: Scale, sy: Scale, xTickLabel: (t: number) => string): string[] {
  const out: string[] = [];
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  out.push(`<g class="axes" stroke="#333" fill="none">`);
  out.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}"/>`);
  out.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}"/>`);
  out.push(`</g>`);
  out.push(`<g class="ticks" font-size="12" fill="#333" text-anchor="middle">`);
  for (const t of sx.ticks) {
    const px = sx(t);
    out.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#333"/>`);
    out.push(`<text x="${fmt(px)}" y="${y0 + 20}">${esc(xTickLabel(t))}</text>`);
  }
  out.push(`</g>`);
  out.push(`<g class="ticks" font-size="12" fill="#333" text-anchor="end">`);
  for (const t of sy.ticks) {
    const py = sy(t);
    out.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#333"/>`);
    out.push(`<line x1="${x0}" y1="${fmt(py)}" x2="${x0 + plotW}" y2="${fmt(py)}" stroke="#eee"/>`);
    out.push(`<text x="${x0 - 9}" y="${fmt(py + 4)}">${fmt(t)}</text>`);
  }
  out.push(`</g>`);
  out.push(`<text x="${x0 + plotW / 2}" y="${HEIGHT - 12}" font-size="14" text-anchor="middle">${esc(fig.xLabel)}</text>`);
  out.push(`<text x="20" y="${MARGIN.top + plotH / 2}" font-size="14" text-anchor="middle" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(fig.yLabel)}</text>`);
  out.push(`<text x="${WIDTH / 2}" y="28" font-size="16" text-anchor="middle">${esc(fig.title)}</text>`);
  return out;
}

function legend(series: Series[]): string[] {
  const out: string[] = [`<g class="legend" font-size="12">`];
  series.forEach((s, i) => {
    const y = MARGIN.top + 10 + i * 18;
    const x = MARGIN.left + plotW + 14;
    out.push(`<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${PALETTE[i % PALETTE.length]}"/>`);
    out.push(`<text x="${x + 18}" y="${y + 2}" fill="#333">${esc(s.name)}</text>`);
  });
  out.push(`</g>`);
  return out;
}

/** The series group carries the plotted values verbatim from the csv in
 *  data-x / data-y / data-sd, pipe separated. */
function seriesAttrs(s: Series): string {
  const sd = s.sd ? ` data-sd="${esc(s.sd.join("|"))}"` : "";
  return `data-name="${esc(s.name)}" data-x="${esc(s.x.join("|"))}" data-y="${esc(s.y.join("|"))}"${sd}`;
}

function renderLines(fig: Figure): string[] {
  const xs = fig.series.flatMap((s) => s.x.map(Number));
  const sx = (fig.logX ? logScale : linearScale)(
    Math.min(...xs), Math.max(...xs), MARGIN.left, MARGIN.left + plotW);
  const [ylo, yhi] = yRange(fig.series);
  const sy = linearScale(ylo, yhi, MARGIN.top + plotH, MARGIN.top);
  const out = axes(fig, sx, sy, (t) => String(t));
  fig.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.x.map((xv, k) => `${fmt(sx(Number(xv)))},${fmt(sy(Number(s.y[k])))}`);
    out.push(`<g class="series" ${seriesAttrs(s)}>`);
    out.push(`<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${pts.join(" ")}"/>`);
    s.x.forEach((xv, k) => {
      const px = sx(Number(xv));
      const py = sy(Number(s.y[k]));
      out.push(`<circle cx="${fmt(px)}" cy="${fmt(py)}" r="3" fill="${color}"/>`);
      if (s.sd) {
        const e = Number(s.sd[k]);
        if (e > 0) {
          out.push(`<line x1="${fmt(px)}" y1="${fmt(sy(Number(s.y[k]) - e))}" x2="${fmt(px)}" y2="${fmt(sy(Number(s.y[k]) + e))}" stroke="${color}" stroke-width="1"/>`);
        }
      }
    });
    out.push(`</g>`);
  });
  return out;
}

function renderBars(fig: Figure): string[] {
  const cats: string[] = [];
  for (const s of fig.series) for (const c of s.x) if (!cats.includes(c)) cats.push(c);
  const [ylo, yhi] = yRange(fig.series);
  const sy = linearScale(ylo, yhi, MARGIN.top + plotH, MARGIN.top);
  const slot = plotW / cats.length;
  const barW = (slot * 0.8) / fig.series.length;
  const sx = ((v: number) => MARGIN.left + (v + 0.5) * slot) as Scale;
  sx.ticks = cats.map((_, i) => i);
  const out = axes(fig, sx, sy, (t) => cats[t] ?? "");
  const y0 = sy(0);
  fig.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    out.push(`<g class="series" ${seriesAttrs(s)}>`);
    s.x.forEach((cat, k) => {
      const ci = cats.indexOf(cat);
      const x = MARGIN.left + ci * slot + slot * 0.1 + i * barW;
      const yv = Number(s.y[k]);
      const py = sy(yv);
      const h = Math.abs(y0 - py);
      out.push(`<rect x="${fmt(x)}" y="${fmt(Math.min(py, y0))}" width="${fmt(barW)}" height="${fmt(h)}" fill="${color}"/>`);
      if (s.sd) {
        const e = Number(s.sd[k]);
        if (e > 0) {
          const cx = x + barW / 2;
          out.push(`<line x1="${fmt(cx)}" y1="${fmt(sy(yv - e))}" x2="${fmt(cx)}" y2="${fmt(sy(yv + e))}" stroke="#333" stroke-width="1"/>`);
        }
      }
    });
    out.push(`</g>`);
  });
  return out;
}

export function figureToSvg(fig: Figure): string {
  if (fig.series.length === 0 || fig.series.every((s) => s.x.length === 0)) {
    throw new Error(`no data for ${fig.family}`);
  }
  const body = fig.kind === "line" ? renderLines(fig) : renderBars(fig);
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" data-family="${esc(fig.family)}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    ...legend(fig.series),
    `</svg>`,
    ``,
  ].join("\n");
}
