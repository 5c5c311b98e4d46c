#!/usr/bin/env node
import { parseArgs } from "node:util";
import { render } from "./render.js";
import { loadSpec } from "./spec.js";

function usage(): string {
  return "usage: dmasim-figures render --spec <plot-spec.json>";
}

export function main(argv: string[]): number {
  const [verb, ...rest] = argv;
  if (verb !== "render") {
    console.error(usage());
    return 2;
  }
  let specPath: string | undefined;
  try {
    const { values } = parseArgs({
      args: rest,
      options: { spec: { type: "string" } },
    });
    specPath = values.spec;
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  if (!specPath) {
    console.error(usage());
    return 2;
  }
  try {
    const written = render(loadSpec(specPath));
    console.log(`wrote ${written.length} panel(s):`);
    for (const p of written) console.log(`  ${p}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
