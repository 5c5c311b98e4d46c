import { scaleLinear, scaleLog } from "d3-scale";
import { area, line } from "d3-shape";
import type { Series } from "./data.js";
import type { Panel } from "./spec.js";
import { panelMetric } from "./spec.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];
const MARGIN = { top: 24, right: 16, bottom: 44, left: 64 };

function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const abs = Math.abs(v);
  if (abs !== 0 && (abs >= 1e5 || abs < 1e-3)) return v.toExponential(2);
  return Number(v.toPrecision(6)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Render one panel as a standalone SVG string; output is a pure function of its inputs. */
export function renderPanelSvg(panel: Panel, series: Series[]): string {
  const width = panel.width;
  const height = panel.height;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.x);
  const lows = series.flatMap((s) => s.mean.map((m, i) => m - s.std[i]));
  const highs = series.flatMap((s) => s.mean.map((m, i) => m + s.std[i]));
  const useLog = panel.kind === "ee" && lows.every((v) => v > 0);

  const x = scaleLinear()
    .domain([Math.min(...xs), Math.max(...xs)])
    .range([0, innerW]);
  const y = (useLog ? scaleLog() : scaleLinear())
    .domain([useLog ? Math.min(...lows) : Math.min(0, ...lows), Math.max(...highs)])
    .nice()
    .range([innerH, 0]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="11">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(`<g transform="translate(${MARGIN.left},${MARGIN.top})">`);

  // axes with ticks
  for (const t of x.ticks(6)) {
    const px = fmt(x(t));
    parts.push(`<line x1="${px}" y1="${innerH}" x2="${px}" y2="${innerH + 4}" stroke="#000"/>`);
    parts.push(`<text x="${px}" y="${innerH + 16}" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of y.ticks(useLog ? 4 : 6)) {
    const py = fmt(y(t));
    parts.push(`<line x1="-4" y1="${py}" x2="0" y2="${py}" stroke="#000"/>`);
    parts.push(`<line x1="0" y1="${py}" x2="${innerW}" y2="${py}" stroke="#ddd"/>`);
    parts.push(`<text x="-8" y="${py}" dy="3" text-anchor="end">${fmt(t)}</text>`);
  }
  parts.push(`<rect width="${innerW}" height="${innerH}" fill="none" stroke="#000"/>`);

  series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const bandGen = area<number>()
      .x((_, i) => x(s.x[i]))
      .y0((_, i) => y(s.mean[i] - s.std[i]))
      .y1((_, i) => y(s.mean[i] + s.std[i]));
    const lineGen = line<number>().x((_, i) => x(s.x[i])).y((v) => y(v));
    const band = bandGen(s.mean);
    const path = lineGen(s.mean);
    if (band) parts.push(`<path d="${band}" fill="${color}" fill-opacity="0.15" stroke="none"/>`);
    if (path) parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
    s.x.forEach((xi, i) => {
      parts.push(
        `<circle cx="${fmt(x(xi))}" cy="${fmt(y(s.mean[i]))}" r="2.4" fill="${color}"/>`
      );
    });
    // legend entry
    const ly = 6 + idx * 16;
    parts.push(`<line x1="8" y1="${ly}" x2="28" y2="${ly}" stroke="${color}" stroke-width="1.6"/>`);
    parts.push(`<text x="34" y="${ly}" dy="3">${esc(s.label)}</text>`);
  });

  const yLabel =
    panel.kind === "ee" ? `${panelMetric(panel)} (log scale)` : `${panelMetric(panel)} (bits/s/Hz)`;
  parts.push(
    `<text x="${innerW / 2}" y="${innerH + 36}" text-anchor="middle">transmit power (dBm)</text>`
  );
  parts.push(
    `<text transform="translate(${-MARGIN.left + 14},${innerH / 2}) rotate(-90)" ` +
      `text-anchor="middle">${esc(yLabel)}</text>`
  );
  parts.push(`<text x="${innerW / 2}" y="-8" text-anchor="middle" font-weight="bold">${esc(panel.name)}</text>`);
  parts.push("</g></svg>");
  return parts.join("\n") + "\n";
}
