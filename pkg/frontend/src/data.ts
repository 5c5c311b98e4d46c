import { readFileSync } from "fs";
import Papa from "papaparse";
import type { Panel } from "./spec.js";
import { panelMetric } from "./spec.js";

export type Cell = string | number | boolean | null;
export type SummaryRow = Record<string, Cell>;

export interface Series {
  key: string;
  label: string;
  x: number[];
  mean: number[];
  std: number[];
}

/** Read a summary CSV into typed rows; "True"/"False" cells become booleans. */
export function readSummaryCsv(path: string): SummaryRow[] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<SummaryRow>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`${path}: ${e.message} (row ${e.row ?? "?"})`);
  }
  return parsed.data.map((row) => {
    const out: SummaryRow = {};
    for (const [k, v] of Object.entries(row)) {
      out[k] = v === "True" ? true : v === "False" ? false : v;
    }
    return out;
  });
}

export function applyFilter(rows: SummaryRow[], filter: Record<string, Cell>): SummaryRow[] {
  return rows.filter((row) => Object.entries(filter).every(([k, v]) => row[k] === v));
}

function availableFrontends(rows: SummaryRow[]): string[] {
  return [...new Set(rows.map((r) => String(r.frontend)))].sort();
}

/**
 * Pull one (x, mean, std) series per requested frontend out of the filtered
 * rows, sorted by transmit power. Missing series or columns are hard errors
 * that name what is actually present.
 */
export function extractSeries(rows: SummaryRow[], panel: Panel): Series[] {
  const metric = panelMetric(panel);
  const filtered = applyFilter(rows, panel.filter);
  const available = availableFrontends(filtered);
  const keys = Object.keys(panel.series);
  if (keys.length === 0) {
    throw new Error(
      `panel '${panel.name}': empty series list; available series: ${available.join(", ") || "(none)"}`
    );
  }
  for (const col of ["p_t_dbm", `${metric}_mean`, `${metric}_std`]) {
    if (filtered.length > 0 && !(col in filtered[0])) {
      throw new Error(`panel '${panel.name}': column '${col}' not found in input CSV`);
    }
  }
  const out: Series[] = [];
  for (const key of keys) {
    const picked = filtered
      .filter((r) => r.frontend === key)
      .sort((a, b) => Number(a.p_t_dbm) - Number(b.p_t_dbm));
    if (picked.length === 0) {
      throw new Error(
        `panel '${panel.name}': series '${key}' not found; available series: ` +
          `${available.join(", ") || "(none)"}`
      );
    }
    out.push({
      key,
      label: panel.series[key],
      x: picked.map((r) => Number(r.p_t_dbm)),
      mean: picked.map((r) => Number(r[`${metric}_mean`])),
      std: picked.map((r) => Number(r[`${metric}_std`])),
    });
  }
  return out;
}
