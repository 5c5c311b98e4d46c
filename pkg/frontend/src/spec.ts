import { readFileSync } from "fs";
import { dirname, resolve } from "path";
import { z } from "zod";

const filterValue = z.union([z.string(), z.number(), z.boolean()]);

export const panelSchema = z.object({
  name: z.string().min(1),
  kind: z.enum(["rate", "ee"]).default("rate"),
  metric: z.string().optional(),
  filter: z.record(filterValue).default({}),
  series: z.record(z.string()),
  width: z.number().int().positive().default(480),
  height: z.number().int().positive().default(320),
});

export const plotSpecSchema = z.object({
  input: z.string().min(1),
  outputDir: z.string().min(1),
  panels: z.array(panelSchema).min(1),
});

export type Panel = z.infer<typeof panelSchema>;
export type PlotSpec = z.infer<typeof plotSpecSchema>;

/** Default metric column prefix for a panel kind. */
export function panelMetric(panel: Panel): string {
  if (panel.metric) return panel.metric;
  return panel.kind === "ee" ? "ee_bits_per_j" : "sum_rate";
}

/**
 * Load and validate a plot spec. Relative input/output paths are resolved
 * against the directory containing the spec file, so specs stay portable.
 */
export function loadSpec(path: string): PlotSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new Error(`${path}: ${(err as Error).message}`);
  }
  const parsed = plotSpecSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new Error(`${path}: invalid spec at ${issue.path.join(".") || "<root>"}: ${issue.message}`);
  }
  const base = dirname(resolve(path));
  return {
    ...parsed.data,
    input: resolve(base, parsed.data.input),
    outputDir: resolve(base, parsed.data.outputDir),
  };
}
