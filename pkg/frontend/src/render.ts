import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import { extractSeries, readSummaryCsv } from "./data.js";
import type { PlotSpec } from "./spec.js";
import { renderPanelSvg } from "./svg.js";

/**
 * Render every panel in the spec to an SVG file. Returns the written paths in
 * panel order. Inputs are only ever read, so re-rendering is idempotent.
 */
export function render(spec: PlotSpec): string[] {
  const rows = readSummaryCsv(spec.input);
  mkdirSync(spec.outputDir, { recursive: true });
  const written: string[] = [];
  for (const panel of spec.panels) {
    const series = extractSeries(rows, panel);
    const svg = renderPanelSvg(panel, series);
    const out = join(spec.outputDir, `${panel.name}.svg`);
    writeFileSync(out, svg, "utf8");
    written.push(out);
  }
  return written;
}
