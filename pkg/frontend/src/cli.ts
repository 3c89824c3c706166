/** CLI entry: node dist/cli.js <figure-spec.json> [...more specs] */

import { renderSpecFile } from "./render.js";

export function main(argv: string[]): number {
  if (argv.length === 0 || argv.includes("--help")) {
    console.log("usage: render <figure-spec.json> [...more specs]");
    console.log("spec: {kind: line|heatmap, input_csv, output, manifest?, " +
                "title?, units?, styles?}");
    return argv.length === 0 ? 2 : 0;
  }
  let failed = false;
  for (const path of argv) {
    try {
      const outcome = renderSpecFile(path);
      for (const warning of outcome.warnings) {
        console.warn(`warning: ${warning}`);
      }
      console.log(`wrote ${outcome.output}`);
    } catch (err) {
      console.error(`error rendering ${path}: ${(err as Error).message}`);
      failed = true;
    }
  }
  return failed ? 1 : 0;
}

process.exitCode = main(process.argv.slice(2));
